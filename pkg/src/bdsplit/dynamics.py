"""Exact single-excitation dynamics driven by a Gaussian single-photon pulse.

The atom is removed from the coherent dynamics when it decays, which is
accounted for by the non-Hermitian damping of c_e.  With at most one
excitation the state is fully described by five amplitudes

    c_e          atom excited, cavities empty
    c_a^k, c_b^k photon in cavity a / b, atom in |g_k>   (k = 1, 2)

and the output waveforms follow from the mirror boundary conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetError, IntegrationAccuracyError, RingDownError
from .model import InputSuperposition, Pulse, SystemParams, TimeGrid, drive_vector, system_matrix
from .transfer import AtomBranch, output_collective_state, resonant_coefficients

HALVING_TOL = 1e-7
RINGDOWN_TOL = 1e-4
BUDGET_TOL = 1e-4


@dataclass
class Trajectory:
    """Amplitudes and output waveforms on a common time grid.

    Arrays indexed ``[k - 1, n]`` hold the atomic branch k = 1, 2.  ``alpha_*``
    are the waveforms leaving cavity a, ``beta_*`` those leaving cavity b;
    the suffix ``r`` marks the input-side mirror and ``t`` the opposite one.
    """

    params: SystemParams
    state: InputSuperposition
    pulse: Pulse
    grid: TimeGrid
    t: np.ndarray
    c_e: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    alpha_in: np.ndarray
    alpha_r: np.ndarray
    alpha_t: np.ndarray
    beta_r: np.ndarray
    beta_t: np.ndarray

    def __len__(self):
        return len(self.t)

    @property
    def dt(self):
        return self.grid.dt

    def amplitudes(self):
        """All five amplitudes stacked as (5, n)."""
        return np.vstack([self.c_e, self.c_a[0], self.c_b[0], self.c_a[1], self.c_b[1]])

    def outputs(self, k=1):
        """(alpha_r, beta_r, alpha_t, beta_t) for atomic branch k."""
        i = k - 1
        return self.alpha_r[i], self.beta_r[i], self.alpha_t[i], self.beta_t[i]

    def final_norm(self):
        return float(np.sum(np.abs(self.amplitudes()[:, -1]) ** 2))


@dataclass(frozen=True)
class NormBudget:
    reflected: float
    transmitted: float
    atomic_loss: float
    residual: float

    @property
    def total(self):
        return self.reflected + self.transmitted + self.atomic_loss + self.residual

    def as_tuple(self):
        return (self.reflected, self.transmitted, self.atomic_loss, self.residual)


def _solve(params, state, pulse, grid, backend):
    a_mat = system_matrix(params)
    b_vec = drive_vector(params, state)
    y = kernels.rk4_drive(
        a_mat, b_vec, grid.t_start, grid.dt, grid.n_steps, pulse.t0, pulse.eta, pulse.detuning, backend=backend
    )
    return y.T


def integrate(params, state, pulse=None, grid=None, *, verify=True, check_ringdown=True, backend=None):
    """Solve the five amplitude equations and assemble the output waveforms.

    With ``verify`` the run is repeated at half the step; a disagreement above
    1e-7 in any amplitude raises IntegrationAccuracyError.  A residual
    intracavity/atomic norm above 1e-4 at the end raises RingDownError.
    """
    pulse = Pulse() if pulse is None else pulse
    grid = TimeGrid.for_run(params, pulse) if grid is None else grid
    grid.check(params, pulse)

    amps = _solve(params, state, pulse, grid, backend)
    if verify:
        fine = _solve(params, state, pulse, grid.halved(), backend)
        err = float(np.max(np.abs(fine[:, ::2] - amps)))
        if not err <= HALVING_TOL:
            raise IntegrationAccuracyError(
                f"step-halving disagreement {err:.3g} exceeds {HALVING_TOL:g}; reduce dt"
            )

    t = grid.times()
    env = pulse.drive(t)
    c_e = amps[0]
    c_a = amps[[1, 3]]
    c_b = amps[[2, 4]]
    lam = np.array(state.lambdas())[:, None]
    in_a = lam * state.mu_a * env
    in_b = lam * state.mu_b * env
    traj = Trajectory(
        params=params,
        state=state,
        pulse=pulse,
        grid=grid,
        t=t,
        c_e=c_e,
        c_a=c_a,
        c_b=c_b,
        alpha_in=env,
        alpha_r=math.sqrt(2 * params.kappa_a_r) * c_a - in_a,
        alpha_t=math.sqrt(2 * params.kappa_a_t) * c_a,
        beta_r=math.sqrt(2 * params.kappa_b_r) * c_b - in_b,
        beta_t=math.sqrt(2 * params.kappa_b_t) * c_b,
    )
    if check_ringdown:
        residual = traj.final_norm()
        if not residual <= RINGDOWN_TOL:
            raise RingDownError(f"residual norm {residual:.3g} at t_end; extend the ring-down window")
    return traj


def _integral(values, dt):
    # trapezoid; integrands vanish at both ends of the window
    return float(dt * (np.sum(values) - 0.5 * (values[0] + values[-1])))


def norm_budget(traj, params=None, *, tol=BUDGET_TOL):
    """Split the unit input probability into its fates.

    reflected/transmitted are the integrated output fluxes summed over both
    atomic branches and both cavities, atomic_loss = 2 Gamma int |c_e|^2 dt,
    residual is the norm still inside the system at the last grid point.
    """
    params = traj.params if params is None else params
    dt = traj.dt
    refl = _integral(np.sum(np.abs(traj.alpha_r) ** 2 + np.abs(traj.beta_r) ** 2, axis=0), dt)
    trans = _integral(np.sum(np.abs(traj.alpha_t) ** 2 + np.abs(traj.beta_t) ** 2, axis=0), dt)
    loss = 2.0 * params.gamma * _integral(np.abs(traj.c_e) ** 2, dt)
    budget = NormBudget(refl, trans, loss, traj.final_norm())
    if not abs(budget.total - 1.0) <= tol:
        raise BudgetError(f"norm budget closes to {budget.total!r}; check the grid and integrator")
    return budget


def steady_envelope_check(traj, coeffs=None, state=None):
    """Largest deviation of any output waveform from coefficient x input envelope.

    Only meaningful for lambda_1 = 0 or 1, where a single branch carries the
    photon.  ``coeffs`` defaults to the resonant coefficients of that branch.
    """
    state = traj.state if state is None else state
    if not (abs(state.lambda_1) < 1e-12 or abs(abs(state.lambda_1) - 1.0) < 1e-12):
        raise ValueError("steady_envelope_check needs lambda_1 = 0 or |lambda_1| = 1")
    branch = AtomBranch.G1 if abs(state.lambda_1) > 0.5 else AtomBranch.G2
    lam = state.lambda_1 if branch is AtomBranch.G1 else state.lambda_2
    if coeffs is None:
        coeffs = resonant_coefficients(traj.params, branch)
    expected = output_collective_state(coeffs, state.mu_plus, state.mu_minus).as_tuple()
    k = 1 if branch is AtomBranch.G1 else 2
    err = 0.0
    for wave, amp in zip(traj.outputs(k), expected):
        err = max(err, float(np.max(np.abs(wave - lam * amp * traj.alpha_in))))
    return err
