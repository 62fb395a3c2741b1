import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import poisson

from bdsplit.errors import ParameterError, TruncationError
from bdsplit.fock import (
    Collective,
    FockSpace,
    PairPhase,
    build_collective_state,
    coherent_pair_coefficients,
    coherent_pair_state,
    commutator_residuals,
    coupling_annihilates_dark,
    coupling_residual,
    fock_check,
    orthonormality_residual,
    single_mode_tail,
    single_photon_split_oracle,
)

SPACE = FockSpace(8)
H = 1 / math.sqrt(2)


def binomial_state(space, sign, N):
    """Independent expansion: sum_k C(N,k) sign^(N-k) sqrt(k!(N-k)!) / sqrt(2^N N!) |k, N-k>."""
    v = np.zeros(space.dim, complex)
    for k in range(N + 1):
        coeff = math.comb(N, k) * sign ** (N - k) * math.sqrt(math.factorial(k) * math.factorial(N - k))
        v[space.index(k, N - k)] = coeff / math.sqrt(2**N * math.factorial(N))
    return v


def coherent_outer(alpha, beta, levels):
    """|alpha> (x) |beta> from single-mode Poisson amplitudes."""
    n = np.arange(levels)
    fact = np.sqrt([math.factorial(k) for k in n])
    ca = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / fact
    cb = np.exp(-abs(beta) ** 2 / 2) * beta**n / fact
    return np.outer(ca, cb).ravel()


class TestSpace:
    def test_ladder_action(self):
        v = SPACE.a_dag @ SPACE.basis(2, 3)
        assert v[SPACE.index(3, 3)] == pytest.approx(math.sqrt(3))
        w = SPACE.b @ SPACE.basis(2, 3)
        assert w[SPACE.index(2, 2)] == pytest.approx(math.sqrt(3))

    def test_rejects_bad_cutoff(self):
        with pytest.raises(ParameterError):
            FockSpace(0)

    def test_commutators_on_interior(self):
        pp, pm = commutator_residuals(SPACE)
        assert pp < 1e-13 and pm < 1e-13


class TestCollectiveStates:
    @pytest.mark.parametrize("N", range(0, 6))
    @pytest.mark.parametrize("kind,sign", [("bright", 1), ("dark", -1)])
    def test_matches_binomial(self, kind, sign, N):
        st_ = build_collective_state(SPACE, kind, N)
        assert np.max(np.abs(st_.amplitudes - binomial_state(SPACE, sign, N))) < 1e-14
        assert st_.norm() == pytest.approx(1.0, abs=1e-14)

    def test_dark_two_photons(self):
        s = build_collective_state(SPACE, Collective.DARK, 2)
        assert s[2, 0] == pytest.approx(0.5) and s[0, 2] == pytest.approx(0.5)
        assert s[1, 1] == pytest.approx(-H)

    @pytest.mark.parametrize("N", range(1, 6))
    def test_dark_decoupled(self, N):
        assert coupling_annihilates_dark(SPACE, N) < 1e-13

    @pytest.mark.parametrize("N", range(1, 6))
    def test_bright_enhanced(self, N):
        assert coupling_residual(SPACE, "bright", N) == pytest.approx(math.sqrt(2 * N), abs=1e-13)

    def test_orthonormal(self):
        assert orthonormality_residual(SPACE, 5) < 1e-13

    def test_number_eigenstates(self):
        for N in range(5):
            v = build_collective_state(SPACE, "dark", N).amplitudes
            assert np.linalg.norm(SPACE.number @ v - N * v) < 1e-13

    def test_truncation(self):
        with pytest.raises(TruncationError):
            build_collective_state(SPACE, "dark", 9)
        with pytest.raises(TruncationError):
            coupling_residual(SPACE, "dark", 8)


class TestCoherentPairs:
    @pytest.mark.parametrize("phase,sign", [(PairPhase.SAME, 1), (PairPhase.OPPOSITE, -1)])
    def test_state_matches_tensor_product(self, phase, sign):
        v = coherent_pair_state(SPACE, 0.5, phase)
        assert np.max(np.abs(v - coherent_outer(0.5, sign * 0.5, SPACE.levels))) < 1e-13

    def test_opposite_has_no_bright_part(self):
        proj = coherent_pair_coefficients(0.5, "opposite", 5, SPACE)
        assert np.max(np.abs(proj.opposite[1:])) < 1e-12
        # the shared vacuum carries exp(-|alpha|^2)
        assert proj.opposite[0] == pytest.approx(math.exp(-0.25), abs=1e-14)

    @given(st.floats(0.05, 0.55))
    def test_matching_family_is_poisson(self, alpha):
        proj = coherent_pair_coefficients(alpha, "same", 5, SPACE)
        # |coefficient|^2 is Poisson in N with mean 2|alpha|^2
        assert np.allclose(np.abs(proj.matching) ** 2, poisson.pmf(np.arange(6), 2 * alpha**2), atol=1e-12)
        assert np.max(np.abs(proj.opposite[1:])) < 1e-12

    def test_tail_bound(self):
        assert single_mode_tail(0.5, 8) == pytest.approx(poisson.sf(8, 0.25), rel=1e-10)

    def test_large_amplitude_rejected(self):
        with pytest.raises(TruncationError):
            coherent_pair_coefficients(2.0, "same", 5, SPACE)


class TestSplit:
    def test_port_a(self):
        r = single_photon_split_oracle(SPACE)
        assert r.bright_overlap == pytest.approx(H, abs=1e-15)
        assert r.dark_overlap == pytest.approx(H, abs=1e-15)
        assert abs(r.bright_dark_overlap) < 1e-15

    def test_port_b(self):
        r = single_photon_split_oracle(SPACE)
        assert r.b_bright_overlap == pytest.approx(H, abs=1e-15)
        assert r.b_dark_overlap == pytest.approx(-H, abs=1e-15)

    def test_two_photon_families_orthogonal(self):
        b2 = build_collective_state(SPACE, "bright", 2)
        d2 = build_collective_state(SPACE, "dark", 2)
        assert abs(b2.overlap(d2)) < 1e-15


def test_fock_check_all_small():
    out = fock_check()
    assert len(out) > 20
    assert max(out.values()) < 1e-12
