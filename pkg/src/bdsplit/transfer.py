"""Frequency-domain reflection and transmission of the bright and dark channels.

Linearizing the atom (sigma_z ~ -1) makes the symmetric mode (a + b)/sqrt(2)
the only one that couples to the atom.  Each collective channel then has its
own reflection amplitude x and transmission amplitude y.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .model import SQRT2


class AtomBranch(enum.Enum):
    G1 = "g1"
    G2 = "g2"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown atomic branch {value!r}; use g1 or g2") from None


@dataclass(frozen=True)
class TransferCoefficients:
    x_plus: complex
    x_minus: complex
    y_plus: complex
    y_minus: complex
    delta: float = 0.0

    def as_tuple(self):
        return (self.x_plus, self.x_minus, self.y_plus, self.y_minus)

    def bright_flux(self):
        return abs(self.x_plus) ** 2 + abs(self.y_plus) ** 2

    def dark_flux(self):
        return abs(self.x_minus) ** 2 + abs(self.y_minus) ** 2


@dataclass(frozen=True)
class PortAmplitudes:
    reflected_a: complex
    reflected_b: complex
    transmitted_a: complex
    transmitted_b: complex

    def as_tuple(self):
        return (self.reflected_a, self.reflected_b, self.transmitted_a, self.transmitted_b)

    def norm(self):
        return sum(abs(z) ** 2 for z in self.as_tuple())


def _require_identical(params):
    if not params.identical_cavities():
        raise ParameterError(
            "collective modes decouple only for identical cavities "
            "(g_a == g_b and kappa_a == kappa_b per mirror)"
        )


def coefficients_at(params, branch, delta):
    """Bright/dark coefficients at detuning ``delta`` from the cavity resonance.

    The time dependence of a component at detuning delta is exp(-i delta t),
    which makes these amplitudes directly comparable with the time-domain
    output of :mod:`bdsplit.dynamics`.
    """
    _require_identical(params)
    branch = AtomBranch.parse(branch)
    kr, kt = params.kappa_a_r, params.kappa_a_t
    kappa = kr + kt
    kbar = kr - kt
    gamma = params.gamma
    g = params.g_a if branch is AtomBranch.G1 else 0.0
    d = float(delta)

    cavity = kappa - 1j * d
    x_minus = (kbar + 1j * d) / cavity
    y_minus = 2.0 * math.sqrt(kr * kt) / cavity
    if g == 0.0:
        # atom invisible: the bright channel is the empty cavity
        return TransferCoefficients(x_minus, x_minus, y_minus, y_minus, d)

    atom = gamma - 1j * d
    coupling = 2.0 * g * g
    den = cavity * atom + coupling
    x_plus = ((kbar + 1j * d) * atom - coupling) / den
    y_plus = 2.0 * math.sqrt(kr * kt) * atom / den
    return TransferCoefficients(x_plus, x_minus, y_plus, y_minus, d)


def resonant_coefficients(params, branch):
    return coefficients_at(params, branch, 0.0)


def coefficient_grid(params, branch, deltas):
    """Vectorized :func:`coefficients_at`; returns a (4, n) complex array."""
    out = np.empty((4, len(deltas)), dtype=complex)
    for i, d in enumerate(deltas):
        out[:, i] = coefficients_at(params, branch, d).as_tuple()
    return out


def output_collective_state(coeffs, mu_plus, mu_minus):
    """Outgoing port amplitudes for a photon with bright/dark amplitudes mu+/mu-.

    Reflected collective amplitudes are x+ mu+ and x- mu-, transmitted ones
    y+ mu+ and y- mu-; both pairs are rotated back to the a/b port basis.
    """
    rp = coeffs.x_plus * mu_plus
    rm = coeffs.x_minus * mu_minus
    tp = coeffs.y_plus * mu_plus
    tm = coeffs.y_minus * mu_minus
    return PortAmplitudes(
        (rp + rm) / SQRT2,
        (rp - rm) / SQRT2,
        (tp + tm) / SQRT2,
        (tp - tm) / SQRT2,
    )
