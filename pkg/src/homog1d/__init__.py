"""Exact and stochastic solvers for -(a(x/eps) u')' = f on (0, 1).

Capabilities: closed-form function specs and periodic coefficients
(funcspec), eps-aligned Gauss quadrature (quadrature), explicit oscillatory
and homogenized solutions plus a finite-difference oracle (homsolver),
moving averages and the affine corrector (averaging), rate-fit sweeps
(convergence), Feynman-Kac Monte Carlo with a spectral Dirichlet heat
propagator (fk), and a reproducible CLI (cli).
"""

from .averaging import (
    ErrorProbe,
    ErrorVariant,
    corrector,
    corrector_coefficients,
    corrector_vanishes,
    moving_average,
    sup_error,
)
from .convergence import (
    DEFAULT_EPS_LADDER,
    ConvergenceReport,
    RateFit,
    VariantResult,
    calibrate_sign,
    fit_rate,
    sweep,
)
from .errors import (
    ConfigError,
    DegenerateFitError,
    DomainError,
    EpsilonError,
    Homog1dError,
    HypothesisViolationError,
    NonDifferentiableProfileError,
    NonPositiveBoundError,
    NumericalError,
    TimestepError,
)
from .fk import (
    BootstrapResult,
    CellMassReport,
    DeltaEstimate,
    EnsembleResult,
    MCEstimate,
    PathParams,
    bootstrap_bound,
    cell_mass_check,
    contraction_constant,
    delta_estimate,
    dirichlet_interval_mass,
    fk_estimate_u_eps,
    heat_propagate,
    simulate_path,
    simulate_paths,
)
from .funcspec import (
    Constant,
    FunctionSpec,
    PeriodicCoefficient,
    PiecewiseConstant,
    Polynomial,
    TrigSeries,
    certified_minimum,
    definite_integral,
    spec_from_dict,
    spec_to_dict,
)
from .homsolver import (
    ExactSolution,
    HomogenizedSolution,
    ProblemInstance,
    SolutionField,
    c_eps,
    c_eps_asymptotic,
    fd_oracle,
    harmonic_mean,
    make_field,
    moment_m1,
    moment_m2,
    solution_fields,
    u_eps,
    u_hom,
)
from .quadrature import (
    PrefixIntegral,
    QuadratureRule,
    eps_cell_edges,
    gauss_legendre,
    integrate,
    integrate_eps_aligned,
)
from .runtime import worker_count

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
