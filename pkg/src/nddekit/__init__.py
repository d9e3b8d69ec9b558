"""Numerical toolkit for the critical scalar neutral delay differential equation

    y'(t) + c*y'(t-1) + f(y(t)) + g(y(t-1)) = s(t),     |c| = 1.

Subpackages cover the problem model and hypothesis validation, delay-aligned
time integration, energy-balance diagnostics, the characteristic-root
stability diagram, small-divisor analysis of periodic forcing, and
periodic-solution construction.
"""

from .errors import (
    BlowUpError,
    ConfigError,
    ContourThroughRootError,
    ContractionFailedError,
    DegenerateIntervalError,
    DivisorBelowFloorError,
    EmptyIntervalError,
    HypothesisViolatedError,
    IoFailureError,
    NddeError,
    NewtonDivergenceError,
    NewtonStallWarning,
    NotBracketedError,
    NotCoprimeError,
    NotLinearError,
    OutOfDomainError,
    OutOfRangeError,
    ShootingDivergenceError,
    SourceNotZeroError,
    VerificationMismatchError,
)
from .nonlinearity import (
    Linear,
    LinearPlusCubic,
    Nonlinearity,
    ScaledTanh,
    Tabulated,
    inverse,
    potential,
)
from .problem import (
    EquilibriumClassification,
    History,
    NddeProblem,
    ValidationReport,
    compatibility_defect,
    equilibrium_solve,
    validate_problem,
)
from .sources import (
    ConstantSource,
    FourierSource,
    MonochromaticSource,
    SourceSpec,
    ZeroSource,
)
from .stepper import Trajectory, integrate, mean_over_period, ndde_residual

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
