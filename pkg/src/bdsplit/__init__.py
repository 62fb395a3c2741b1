"""Simulator for a cavity-QED beam splitter that separates two-mode light
into its bright (reflected) and dark (transmitted) collective components."""

__version__ = "0.1.0"

from .errors import (
    BudgetError,
    IntegrationAccuracyError,
    NumericalError,
    ParameterError,
    RingDownError,
    TruncationError,
)
from .model import (
    InputSuperposition,
    Pulse,
    SystemParams,
    TimeGrid,
    collective_amplitudes,
    cooperativity,
    effective_coupling,
    gaussian_amplitude,
)
from .transfer import AtomBranch, TransferCoefficients, coefficients_at, output_collective_state, resonant_coefficients
from .dynamics import NormBudget, Trajectory, integrate, norm_budget, steady_envelope_check
from .analysis import SweepRow, PortStatistics, p_target_exact, p_target_hp, sweep_cooperativity, w_state_port_statistics
