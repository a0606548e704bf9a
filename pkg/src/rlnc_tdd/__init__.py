"""Energy and completion-time analysis of random linear network coding over TDD erasure links."""

from .analysis import (
    PerformanceReport,
    erasures_from_ber,
    evaluate,
    expected_energy,
    expected_time,
    full_duplex_energy,
    full_duplex_time,
)
from .errors import DomainError, PolicyInfeasibleError, ShapeError, UnboundedSearchError
from .lambertw import lambert_w_minus1
from .markov import (
    CodingParameters,
    DerivedTiming,
    LinkParameters,
    Policy,
    log_binomial,
    transition_prob,
    transition_row,
)
from .optimizer import OptimizationResult, n1_closed_form, optimize_energy, optimize_time
from .simulator import SimulationConfig, SimulationResult, run_trials

__version__ = "0.1.0"
