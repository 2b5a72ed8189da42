"""(s, S) policies for non-stationary stochastic lot sizing."""

from ._core import (
    CostParameters,
    Error,
    HeuristicResult,
    Instance,
    ParseError,
    Policy,
    SdpSolution,
    SimulationResult,
    SolverError,
    ValidationError,
    approximation_error,
    complementary_loss,
    demand_means,
    loss,
    make_instance,
    parse_instance,
    read_instance,
    simulate,
    solve_heuristic,
    solve_sdp,
    worked_example,
)

__version__ = "0.1.0"
