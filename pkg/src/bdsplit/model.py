"""Physical parameters, pulses and input states of the cross-cavity setup.

Units: every rate is measured in units of the total field decay rate of one
cavity, kappa = kappa_r + kappa_t, which defaults to 1.  Times are in 1/kappa.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

ALGEBRAIC_TOL = 1e-12
QUADRATURE_TOL = 1e-9

SQRT2 = math.sqrt(2.0)
FWHM_FACTOR = 2.0 * math.sqrt(2.0 * math.log(2.0))


def _check_rate(name, value, strictly_positive=False):
    if isinstance(value, complex):
        raise ParameterError(f"{name} must be real, got {value!r}")
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    if strictly_positive and value <= 0:
        raise ParameterError(f"{name} must be > 0, got {value!r}")
    if value < 0:
        raise ParameterError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Couplings and decay rates of two two-sided cavities sharing one atom.

    ``kappa_*_r`` is the field decay through the mirror facing the incoming
    pulse, ``kappa_*_t`` through the opposite mirror.  ``gamma_1`` and
    ``gamma_2`` are spontaneous decay rates of |e> into |g1> and |g2>.
    """

    g_a: float = 1.0
    g_b: float = 1.0
    kappa_a_r: float = 0.5
    kappa_a_t: float = 0.5
    kappa_b_r: float = 0.5
    kappa_b_t: float = 0.5
    gamma_1: float = 0.1
    gamma_2: float = 0.0

    def __post_init__(self):
        for name in ("g_a", "g_b", "gamma_1", "gamma_2"):
            _check_rate(name, getattr(self, name))
        for name in ("kappa_a_r", "kappa_a_t", "kappa_b_r", "kappa_b_t"):
            _check_rate(name, getattr(self, name), strictly_positive=True)

    @classmethod
    def symmetric(cls, g=1.0, gamma=0.1, kappa=1.0, kappa_r=None):
        """Identical cavities with coupling ``g`` and total decay ``kappa``.

        ``kappa_r`` defaults to ``kappa / 2`` (symmetric mirrors).
        """
        kr = kappa / 2.0 if kappa_r is None else kappa_r
        kt = kappa - kr
        return cls(g, g, kr, kt, kr, kt, gamma, 0.0)

    @classmethod
    def from_cooperativity(cls, cooperativity, gamma=0.1, kappa=1.0):
        """Symmetric identical cavities with g solved from C = 2 g^2 / (kappa Gamma)."""
        if cooperativity < 0:
            raise ParameterError("cooperativity must be >= 0")
        if gamma <= 0:
            raise ParameterError("cooperativity is undefined for gamma = 0")
        g = math.sqrt(cooperativity * kappa * gamma / 2.0)
        return cls.symmetric(g=g, gamma=gamma, kappa=kappa)

    @property
    def gamma(self):
        return self.gamma_1 + self.gamma_2

    @property
    def kappa_a(self):
        return self.kappa_a_r + self.kappa_a_t

    @property
    def kappa_b(self):
        return self.kappa_b_r + self.kappa_b_t

    def identical_cavities(self):
        """True when both cavities have the same coupling and mirror rates."""
        return (
            self.g_a == self.g_b
            and self.kappa_a_r == self.kappa_b_r
            and self.kappa_a_t == self.kappa_b_t
        )

    def symmetric_identical(self):
        """Identical cavities whose two mirrors also leak at the same rate."""
        return self.identical_cavities() and self.kappa_a_r == self.kappa_a_t

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return SystemParams(**fields)


@dataclass(frozen=True)
class Pulse:
    """Square-normalized Gaussian single-photon envelope.

    ``eta`` is the width parameter of the amplitude; ``detuning`` optionally
    adds a carrier exp(-i detuning (t - t0)) relative to the cavity resonance.
    """

    t0: float = 0.0
    eta: float = 100.0 / FWHM_FACTOR
    detuning: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ParameterError(f"pulse width eta must be > 0, got {self.eta!r}")
        if not (math.isfinite(self.t0) and math.isfinite(self.detuning)):
            raise ParameterError("pulse t0 and detuning must be finite")

    @classmethod
    def from_duration(cls, tau_p, t0=0.0, detuning=0.0):
        if tau_p <= 0:
            raise ParameterError(f"pulse duration must be > 0, got {tau_p!r}")
        return cls(t0=t0, eta=tau_p / FWHM_FACTOR, detuning=detuning)

    @property
    def tau_p(self):
        """Full width at half maximum of the amplitude."""
        return FWHM_FACTOR * self.eta

    @property
    def peak(self):
        return (self.eta * math.sqrt(math.pi)) ** -0.5

    def envelope(self, t):
        return gaussian_amplitude(self, t)

    def drive(self, t):
        """Complex drive including the optional carrier."""
        t = np.asarray(t, dtype=float)
        env = gaussian_amplitude(self, t)
        if self.detuning == 0.0:
            return env.astype(complex)
        return env * np.exp(-1j * self.detuning * (t - self.t0))


def gaussian_amplitude(pulse, t):
    """(eta sqrt(pi))^(-1/2) exp(-(t - t0)^2 / (2 eta^2)); accepts scalars or arrays."""
    s = (np.asarray(t, dtype=float) - pulse.t0) / pulse.eta
    return pulse.peak * np.exp(-0.5 * s * s)


def collective_amplitudes(mu_a, mu_b):
    """Map port amplitudes to bright/dark amplitudes (mu_a +- mu_b)/sqrt(2)."""
    norm = abs(mu_a) ** 2 + abs(mu_b) ** 2
    if abs(norm - 1.0) > ALGEBRAIC_TOL:
        raise ParameterError(f"input not normalized: |mu_a|^2 + |mu_b|^2 = {norm!r}")
    mu_a, mu_b = complex(mu_a), complex(mu_b)
    return (mu_a + mu_b) / SQRT2, (mu_a - mu_b) / SQRT2


def port_amplitudes(mu_plus, mu_minus):
    """Inverse of :func:`collective_amplitudes`."""
    mu_plus, mu_minus = complex(mu_plus), complex(mu_minus)
    return (mu_plus + mu_minus) / SQRT2, (mu_plus - mu_minus) / SQRT2


@dataclass(frozen=True)
class InputSuperposition:
    """Initial atom-ground-state and single-photon port amplitudes.

    The atom starts in lambda_1|g1> + lambda_2|g2>; the photon arrives in
    port a with amplitude mu_a and in port b with mu_b.
    """

    lambda_1: complex = 1.0
    lambda_2: complex = 0.0
    mu_a: complex = 1.0
    mu_b: complex = 0.0

    def __post_init__(self):
        for name in ("lambda_1", "lambda_2", "mu_a", "mu_b"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        lam = abs(self.lambda_1) ** 2 + abs(self.lambda_2) ** 2
        if abs(lam - 1.0) > ALGEBRAIC_TOL:
            raise ParameterError(f"atomic state not normalized: |lambda_1|^2 + |lambda_2|^2 = {lam!r}")
        mu = abs(self.mu_a) ** 2 + abs(self.mu_b) ** 2
        if abs(mu - 1.0) > ALGEBRAIC_TOL:
            raise ParameterError(f"input not normalized: |mu_a|^2 + |mu_b|^2 = {mu!r}")

    @classmethod
    def from_collective(cls, mu_plus, mu_minus, lambda_1=1.0, lambda_2=0.0):
        mu_a, mu_b = port_amplitudes(mu_plus, mu_minus)
        return cls(lambda_1, lambda_2, mu_a, mu_b)

    @property
    def mu_plus(self):
        return (self.mu_a + self.mu_b) / SQRT2

    @property
    def mu_minus(self):
        return (self.mu_a - self.mu_b) / SQRT2

    def lambdas(self):
        return (self.lambda_1, self.lambda_2)


def cooperativity(params):
    """C = 2 g^2 / (kappa Gamma) for identical symmetric cavities."""
    if not params.symmetric_identical():
        raise ParameterError("cooperativity requires identical symmetric cavities")
    if params.gamma <= 0:
        raise ParameterError("cooperativity is undefined for gamma = 0")
    return 2.0 * params.g_a**2 / (params.kappa_a * params.gamma)


def effective_coupling(g, n_atoms):
    """Collective coupling g sqrt(N) of N identical atoms."""
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ParameterError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    return g * math.sqrt(n_atoms)


def system_matrix(params):
    """Generator of the single-excitation amplitudes (c_e, c_a1, c_b1, c_a2, c_b2).

    The k = 2 amplitudes carry the atom in |g2> and see only the empty cavities.
    """
    ga, gb = params.g_a, params.g_b
    ka, kb = params.kappa_a, params.kappa_b
    m = np.zeros((5, 5), dtype=complex)
    m[0, 0] = -params.gamma
    m[0, 1] = -1j * ga
    m[0, 2] = -1j * gb
    m[1, 0] = -1j * np.conj(ga)
    m[1, 1] = -ka
    m[2, 0] = -1j * np.conj(gb)
    m[2, 2] = -kb
    m[3, 3] = -ka
    m[4, 4] = -kb
    return m


def drive_vector(params, state):
    """Coefficients multiplying the pulse envelope in each amplitude equation."""
    sa = math.sqrt(2.0 * params.kappa_a_r)
    sb = math.sqrt(2.0 * params.kappa_b_r)
    l1, l2 = state.lambda_1, state.lambda_2
    return np.array(
        [0.0, sa * l1 * state.mu_a, sb * l1 * state.mu_b, sa * l2 * state.mu_a, sb * l2 * state.mu_b],
        dtype=complex,
    )


def _rate_bounds(params):
    """(fastest rate, slowest relevant decay rate) of the amplitude equations."""
    m = system_matrix(params)
    eig = np.linalg.eigvals(m[:3, :3]) if (params.g_a or params.g_b) else np.array([-params.kappa_a, -params.kappa_b])
    fastest = max(np.max(np.abs(np.linalg.eigvals(m))), params.kappa_a, params.kappa_b)
    slowest = min(np.min(-eig.real), params.kappa_a, params.kappa_b)
    return float(fastest), float(slowest)


MAX_RINGDOWN = 5000.0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid ``t_start + n dt`` for n = 0..n_steps."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > self.t_start):
            raise ParameterError("time grid needs dt > 0 and t_end > t_start")

    @property
    def n_steps(self):
        return int(round((self.t_end - self.t_start) / self.dt))

    def times(self):
        return self.t_start + self.dt * np.arange(self.n_steps + 1)

    def halved(self):
        return TimeGrid(self.t_start, self.t_start + self.n_steps * self.dt, self.dt / 2.0)

    @classmethod
    def for_run(cls, params, pulse, window=6.0, ringdown=10.0, dt_factor=50.0):
        """Grid covering the pulse plus a ring-down tail.

        The window starts ``window`` widths before the pulse peak.  The tail
        lasts ``ringdown`` e-folds of the slowest decaying mode, and never less
        than ``ringdown / kappa_min``.  The step resolves the fastest rate of the
        amplitude equations and the pulse width by ``dt_factor`` points.
        """
        fastest, slowest = _rate_bounds(params)
        kappa_min = min(params.kappa_a, params.kappa_b)
        tail = min(max(ringdown / kappa_min, ringdown / slowest), MAX_RINGDOWN / kappa_min)
        t_start = pulse.t0 - window * pulse.eta
        t_stop = pulse.t0 + window * pulse.eta + tail
        dt = min(1.0 / fastest, pulse.eta) / dt_factor
        n = int(math.ceil((t_stop - t_start) / dt))
        return cls(t_start, t_start + n * dt, dt)

    def check(self, params, pulse):
        """Raise ParameterError when the grid cannot host the run."""
        if not self.t_start < pulse.t0 - 5.0 * pulse.eta:
            raise ParameterError("time grid starts after the pulse has arrived")
        kappa_min = min(params.kappa_a, params.kappa_b)
        if not self.t_end > pulse.t0 + 5.0 * pulse.eta + 10.0 / kappa_min:
            raise ParameterError("time grid leaves no ring-down margin")
        kappa_max = max(params.kappa_a, params.kappa_b)
        if self.dt > min(1.0 / kappa_max, pulse.eta) / 50.0 * (1 + 1e-12):
            raise ParameterError("time step too coarse for the cavity decay or pulse width")
