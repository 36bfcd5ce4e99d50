"""Ground states of the focusing NLS on metric graphs with interacting vertices.

The package is organized as a numpy/scipy library:

* :mod:`graphnls.graphs` -- metric graphs, vertex couplings, validation;
* :mod:`graphnls.config` -- line-oriented text problem descriptions;
* :mod:`graphnls.discretization` -- grids, graph functions, discrete
  energy/action/Nehari functionals and gradients;
* :mod:`graphnls.oracle` -- closed-form solitons, secular equations and
  threshold constants (analytic ground truth);
* :mod:`graphnls.solver` -- mass-constrained and Nehari-constrained descent,
  unboundedness detection, residual diagnostics;
* :mod:`graphnls.stability` -- action curves d(omega) and the d''-sign
  stability surrogate;
* :mod:`graphnls.experiments`, :mod:`graphnls.cli` -- parameter scans,
  threshold bracketing, presets, and the command-line front end.
"""

__version__ = "0.1.0"

from .graphs import (
    ConfigError,
    Delta,
    DeltaPrime,
    Dipole,
    Edge,
    FulopTsutsui,
    Kirchhoff,
    MetricGraph,
    NonlinearDelta,
    ProblemSpec,
    line_graph,
    star_graph,
    validate,
)
from .config import load_problem, parse_problem
from .discretization import (
    Discretization,
    FunctionalValue,
    GraphFunction,
    Grid,
    action,
    energy,
    gradient,
    inner,
    mass,
    nehari,
)
from .oracle import (
    CRITICAL_MASS_P6,
    CRITICAL_MASS_Q4,
    MU_STAR_DOUBLY_CRITICAL,
    SecularSolution,
    Soliton,
    delta_prime_branches,
    delta_shift,
    omega_at_mass,
    omega_min_delta,
    omega_min_ft,
    omega_star_delta_prime,
    soliton_energy,
    soliton_energy_at_mass,
    soliton_mass,
    thresholds,
)
from .solver import (
    DegenerateQuadraticFormError,
    DivergenceWitness,
    GroundStateReport,
    InvalidRegimeError,
    SolverOptions,
    ThresholdError,
    detect_unboundedness,
    frequency_threshold,
    minimize_action_nehari,
    minimize_energy_mass,
    stationary_residual,
    vertex_condition_residuals,
)
from .stability import BranchCurve, action_curve, classify, mass_curve_slope

__all__ = [name for name in dir() if not name.startswith("_")]
