"""Dense two-mode Fock-space checks of the bright/dark state algebra.

States live in the truncated space span{|n_a, n_b>: n_a, n_b <= cutoff}; the
flat index of |n_a, n_b> is n_a * (cutoff + 1) + n_b.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc

from .errors import ParameterError, TruncationError

TAIL_TOL = 1e-10


class Collective(enum.Enum):
    BRIGHT = "bright"
    DARK = "dark"

    @property
    def sign(self):
        return 1.0 if self is Collective.BRIGHT else -1.0

    @classmethod
    def parse(cls, value):
        return value if isinstance(value, cls) else cls(str(value).lower())


class PairPhase(enum.Enum):
    SAME = "same"
    OPPOSITE = "opposite"

    @classmethod
    def parse(cls, value):
        return value if isinstance(value, cls) else cls(str(value).lower())


def _ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


class FockSpace:
    def __init__(self, cutoff=8):
        if int(cutoff) != cutoff or cutoff < 1:
            raise ParameterError(f"cutoff must be an integer >= 1, got {cutoff!r}")
        self.cutoff = int(cutoff)
        self.levels = self.cutoff + 1
        self.dim = self.levels**2

    def __repr__(self):
        return f"FockSpace(cutoff={self.cutoff})"

    @cached_property
    def a(self):
        return np.kron(_ladder(self.levels), np.eye(self.levels))

    @cached_property
    def b(self):
        return np.kron(np.eye(self.levels), _ladder(self.levels))

    @property
    def a_dag(self):
        return self.a.T

    @property
    def b_dag(self):
        return self.b.T

    def x_mode(self, kind):
        """Collective annihilator (a +- b)/sqrt(2)."""
        return (self.a + Collective.parse(kind).sign * self.b) / math.sqrt(2.0)

    @cached_property
    def number(self):
        return self.a_dag @ self.a + self.b_dag @ self.b

    def index(self, n_a, n_b):
        return n_a * self.levels + n_b

    def basis(self, n_a, n_b):
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n_a, n_b)] = 1.0
        return v

    def vacuum(self):
        return self.basis(0, 0)

    def interior_mask(self):
        """Basis states with n_a + n_b <= cutoff - 1, where truncation cannot bite."""
        n = np.arange(self.levels)
        return (n[:, None] + n[None, :] <= self.cutoff - 1).ravel()


@dataclass
class TwoModeState:
    space: FockSpace
    amplitudes: np.ndarray

    def __getitem__(self, key):
        n_a, n_b = key
        return self.amplitudes[self.space.index(n_a, n_b)]

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        other = other.amplitudes if isinstance(other, TwoModeState) else other
        return complex(np.vdot(self.amplitudes, other))


def build_collective_state(space, kind, N):
    """[(a^dag +- b^dag)/sqrt(2)]^N / sqrt(N!) |0, 0>."""
    kind = Collective.parse(kind)
    if int(N) != N or N < 0:
        raise ParameterError(f"photon number must be a non-negative integer, got {N!r}")
    if N > space.cutoff:
        raise TruncationError(f"N = {N} photons do not fit below cutoff {space.cutoff}")
    create = space.x_mode(kind).T
    v = space.vacuum()
    for _ in range(N):
        v = create @ v
    return TwoModeState(space, v / math.sqrt(math.factorial(N)))


def coupling_residual(space, kind, N):
    """||(a + b)|Psi_N>|| for a bright or dark N-photon state."""
    if N > space.cutoff - 1:
        raise TruncationError(f"N = {N} needs cutoff >= {N + 1}")
    state = build_collective_state(space, kind, N)
    return float(np.linalg.norm((space.a + space.b) @ state.amplitudes))


def coupling_annihilates_dark(space, N):
    """Norm of the atom-coupling operator a + b acting on the N-photon dark state (ideally zero)."""
    return coupling_residual(space, Collective.DARK, N)


def single_mode_tail(alpha, cutoff):
    """Probability weight of a coherent state above ``cutoff`` photons."""
    return float(gammainc(cutoff + 1, abs(alpha) ** 2))


@dataclass(frozen=True)
class CoherentPairProjection:
    matching: np.ndarray
    opposite: np.ndarray
    tail_bound: float


def coherent_pair_state(space, alpha, phase):
    """|alpha, +-alpha> built as exp(alpha a^dag +- alpha b^dag)|0,0> in the truncated space."""
    phase = PairPhase.parse(phase)
    beta = alpha if phase is PairPhase.SAME else -alpha
    gen = alpha * space.a_dag + beta * space.b_dag
    v = expm(gen) @ space.vacuum()
    return v * math.exp(-abs(alpha) ** 2)


def coherent_pair_coefficients(alpha, phase, n_max, space):
    """Projections of |alpha, +-alpha> onto the bright and dark N-photon families.

    ``matching`` holds <Psi^N|alpha, +-alpha> for the family the pair lives
    in (bright for in-phase, dark for opposite phase), ``opposite`` the other
    family.  Both are length n_max + 1.  The expected matching coefficients
    are exp(-|alpha|^2) (sqrt(2) alpha)^N / sqrt(N!).
    """
    phase = PairPhase.parse(phase)
    if n_max > space.cutoff:
        raise TruncationError(f"n_max = {n_max} exceeds cutoff {space.cutoff}")
    single = single_mode_tail(alpha, space.cutoff)
    tail = 1.0 - (1.0 - single) ** 2
    if tail >= TAIL_TOL:
        raise TruncationError(f"coherent amplitude {alpha!r} leaves tail weight {tail:.3g} above cutoff")
    v = coherent_pair_state(space, alpha, phase)
    match = Collective.BRIGHT if phase is PairPhase.SAME else Collective.DARK
    other = Collective.DARK if match is Collective.BRIGHT else Collective.BRIGHT
    proj = {
        kind: np.array([np.vdot(build_collective_state(space, kind, n).amplitudes, v) for n in range(n_max + 1)])
        for kind in (match, other)
    }
    return CoherentPairProjection(proj[match], proj[other], tail)


@dataclass(frozen=True)
class SplitReport:
    bright_overlap: complex
    dark_overlap: complex
    bright_dark_overlap: complex
    b_bright_overlap: complex
    b_dark_overlap: complex


def single_photon_split_oracle(space):
    """Decompose a^dag|0,0> and b^dag|0,0> into the single-photon bright and dark states."""
    bright = build_collective_state(space, Collective.BRIGHT, 1)
    dark = build_collective_state(space, Collective.DARK, 1)
    in_a = space.a_dag @ space.vacuum()
    in_b = space.b_dag @ space.vacuum()
    return SplitReport(
        bright.overlap(in_a),
        dark.overlap(in_a),
        bright.overlap(dark),
        bright.overlap(in_b),
        dark.overlap(in_b),
    )


def commutator_residuals(space):
    """Max entrywise deviations of [X+, X+^dag] = 1 and [X+, X-^dag] = 0 on the interior."""
    xp = space.x_mode(Collective.BRIGHT)
    xm = space.x_mode(Collective.DARK)
    mask = space.interior_mask()
    c_pp = (xp @ xp.T - xp.T @ xp)[np.ix_(mask, mask)]
    c_pm = (xp @ xm.T - xm.T @ xp)[np.ix_(mask, mask)]
    return (
        float(np.max(np.abs(c_pp - np.eye(c_pp.shape[0])))),
        float(np.max(np.abs(c_pm))),
    )


def orthonormality_residual(space, n_max=None):
    """Max |<Psi_s^N|Psi_s'^N'> - delta| over both families and N, N' <= n_max."""
    n_max = space.cutoff // 2 if n_max is None else n_max
    states = [
        build_collective_state(space, kind, n).amplitudes
        for kind in (Collective.BRIGHT, Collective.DARK)
        for n in range(n_max + 1)
    ]
    gram = np.array([[np.vdot(u, v) for v in states] for u in states])
    expected = np.eye(len(states))
    # N = 0 is the vacuum in both families
    expected[0, n_max + 1] = expected[n_max + 1, 0] = 1.0
    return float(np.max(np.abs(gram - expected)))


def fock_check(cutoff=8, n_max=5, alpha=0.5):
    """Run every oracle check; returns {name: residual}.  All should be ~0."""
    space = FockSpace(cutoff)
    out = {}
    for n in range(1, min(n_max, cutoff - 1) + 1):
        out[f"dark_coupling_N{n}"] = coupling_annihilates_dark(space, n)
        out[f"bright_coupling_N{n}"] = abs(coupling_residual(space, Collective.BRIGHT, n) - math.sqrt(2 * n))
    out["orthonormality"] = orthonormality_residual(space)
    for n in range(0, cutoff // 2 + 1):
        for kind in Collective:
            st = build_collective_state(space, kind, n)
            out[f"number_{kind.value}_N{n}"] = float(np.linalg.norm(space.number @ st.amplitudes - n * st.amplitudes))
    pp, pm = commutator_residuals(space)
    out["commutator_bright"] = pp
    out["commutator_cross"] = pm
    nm = min(n_max, cutoff)
    for phase in PairPhase:
        proj = coherent_pair_coefficients(alpha, phase, nm, space)
        n = np.arange(nm + 1)
        expected = np.exp(-abs(alpha) ** 2) * (math.sqrt(2) * alpha) ** n / np.sqrt([math.factorial(k) for k in n])
        out[f"coherent_{phase.value}_matching"] = float(np.max(np.abs(proj.matching - expected)))
        out[f"coherent_{phase.value}_other"] = float(np.max(np.abs(proj.opposite[1:])))
    rep = single_photon_split_oracle(space)
    h = 1.0 / math.sqrt(2.0)
    out["split_a"] = max(abs(rep.bright_overlap - h), abs(rep.dark_overlap - h))
    out["split_b"] = max(abs(rep.b_bright_overlap - h), abs(rep.b_dark_overlap + h))
    out["split_orthogonal"] = abs(rep.bright_dark_overlap)
    return out
