"""Target-state probabilities, cooperativity sweeps and W-state port statistics."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import _integral, integrate, norm_budget
from .errors import ParameterError
from .model import ALGEBRAIC_TOL, InputSuperposition, Pulse, SystemParams, collective_amplitudes

SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class SweepRow:
    C: float
    p_hp: float
    p_exact: float
    abs_diff: float
    atomic_loss: float


@dataclass(frozen=True)
class PortStatistics:
    n_ar: float
    n_br: float
    n_at: float
    n_bt: float

    @property
    def total(self):
        return self.n_ar + self.n_br + self.n_at + self.n_bt

    def as_tuple(self):
        return (self.n_ar, self.n_br, self.n_at, self.n_bt)


def p_target_hp(mu_plus, mu_minus, C):
    """Probability of the ideal bright-reflected / dark-transmitted output in the linearized model."""
    if C < 0:
        raise ParameterError("cooperativity must be >= 0")
    wp, wm = abs(mu_plus) ** 2, abs(mu_minus) ** 2
    if abs(wp + wm - 1.0) > ALGEBRAIC_TOL:
        raise ParameterError("collective amplitudes not normalized")
    if math.isinf(C):
        return (wm + wp) ** 2
    return (wm + wp * C / (1.0 + C)) ** 2


def target_waveform(traj, mu_plus=None, mu_minus=None):
    """Time-resolved overlap amplitude with the target output state.

    The target sends the dark part out through the transmission mirrors as
    (a - b)/sqrt(2) and the bright part back through the input mirrors as
    -(a + b)/sqrt(2).
    """
    if mu_plus is None or mu_minus is None:
        mu_plus, mu_minus = traj.state.mu_plus, traj.state.mu_minus
    ar, br, at, bt = traj.outputs(1)
    return SQRT_HALF * (np.conj(mu_minus) * (at - bt) - np.conj(mu_plus) * (ar + br))


def p_target_exact(traj, mu_plus=None, mu_minus=None, *, budget_tol=1e-4):
    """Probability that the outgoing photon is in the target state, from an exact trajectory.

    The trajectory must start with the atom in |g1> and carry the same
    collective amplitudes as the ones requested.
    """
    state = traj.state
    if abs(abs(state.lambda_1) - 1.0) > ALGEBRAIC_TOL:
        raise ParameterError("p_target_exact needs a trajectory with |lambda_1| = 1")
    if mu_plus is None or mu_minus is None:
        mu_plus, mu_minus = state.mu_plus, state.mu_minus
    elif abs(mu_plus - state.mu_plus) > 1e-12 or abs(mu_minus - state.mu_minus) > 1e-12:
        raise ParameterError("requested amplitudes do not match the trajectory input")
    # rejects trajectories whose probability does not add up to one
    norm_budget(traj, tol=budget_tol)
    w = target_waveform(traj, mu_plus, mu_minus)
    return _integral(np.abs(w) ** 2, traj.dt)


def _sweep_point(args):
    C, template, state, pulse, grid_kwargs, backend = args
    kappa = template.kappa_a
    g = math.sqrt(C * kappa * template.gamma / 2.0)
    params = template.replace(g_a=g, g_b=g)
    traj = integrate(params, state, pulse, _grid(params, pulse, grid_kwargs), backend=backend)
    budget = norm_budget(traj)
    p_exact = p_target_exact(traj)
    p_hp = p_target_hp(state.mu_plus, state.mu_minus, C)
    return SweepRow(float(C), p_hp, p_exact, abs(p_hp - p_exact), budget.atomic_loss)


def _grid(params, pulse, grid_kwargs):
    from .model import TimeGrid

    return TimeGrid.for_run(params, pulse, **(grid_kwargs or {}))


def sweep_cooperativity(
    params_template=None,
    mu_a=1.0,
    mu_b=0.0,
    C_values=(0.1, 1.0, 5.0, 20.0, 100.0),
    pulse=None,
    grid=None,
    *,
    workers=1,
    backend=None,
):
    """One SweepRow per cooperativity, with g solved from C at fixed kappa and Gamma.

    ``grid`` is a dict of :meth:`TimeGrid.for_run` keyword overrides, since
    every point needs its own step and ring-down.
    """
    template = SystemParams.symmetric() if params_template is None else params_template
    if not template.symmetric_identical():
        raise ParameterError("cooperativity sweeps require identical symmetric cavities")
    if template.gamma <= 0:
        raise ParameterError("cooperativity sweeps need gamma > 0")
    C_values = [float(c) for c in C_values]
    if any(c <= 0 for c in C_values):
        raise ParameterError("cooperativities must be positive")
    if any(b < a for a, b in zip(C_values, C_values[1:])):
        raise ParameterError("cooperativities must be sorted")
    collective_amplitudes(mu_a, mu_b)
    state = InputSuperposition(1.0, 0.0, mu_a, mu_b)
    pulse = Pulse() if pulse is None else pulse
    jobs = [(c, template, state, pulse, grid, backend) for c in C_values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]


def w_state_port_statistics(traj):
    """Integrated norm leaving each of the four ports, summed over atomic branches."""
    dt = traj.dt

    def norm(arr):
        return _integral(np.sum(np.abs(arr) ** 2, axis=0), dt)

    return PortStatistics(norm(traj.alpha_r), norm(traj.beta_r), norm(traj.alpha_t), norm(traj.beta_t))


def w_state_probability(traj):
    """Probability of the four-port W state (|at> - |bt> - |ar> - |br>)/2.

    Equal to :func:`p_target_exact` for a photon entering port a alone.
    """
    ar, br, at, bt = traj.outputs(1)
    w = 0.5 * (at - bt - ar - br)
    return _integral(np.abs(w) ** 2, traj.dt)
