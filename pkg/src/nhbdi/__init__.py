"""Time-nonhomogeneous birth-death-immigration model of an infection process.

Expected trajectories, the exact transient distribution of the birth-death
case, a forward-equation oracle and an exact thinning simulator.
"""
from .calculus import IntegralTable, build_table, interp
from .deterministic import (
    DeterministicSeries,
    approx_expected_infected,
    daily_counts,
    deterministic_series,
    expected_cumulatives,
    expected_infected,
)
from .exceptions import (
    ApproximationError,
    ConfigError,
    DomainError,
    NHBDIError,
    RangeError,
    SimulationError,
    TruncationError,
    UndefinedReproductionError,
)
from .oracle import TruncatedDistribution, branching_solve, extinction_probability, forward_solve
from .pmf import AlphaBeta, MeshGrid, Moments, PmfSlice, alpha_beta, mesh, moments, pgf_eval, pmf
from .rates import Constant, RaisedCosine, RateFunction, Segment
from .scenario import (
    Scenario,
    dump_scenario,
    effective_reproduction,
    homogeneous,
    load_scenario,
    mean_infectious_period,
    running_example,
)
from .simulator import EmpiricalSummary, EventKind, EventLog, empirical_pmf_distance, run_ensemble, simulate_path

__version__ = "0.1.0"
