"""Exception hierarchy shared by all nddekit modules.

Each failure mode that callers are expected to branch on gets its own
class; everything derives from NddeError so `except NddeError` catches
all toolkit-level failures without masking programming errors.
"""


class NddeError(Exception):
    """Base class for all toolkit errors."""


class DegenerateIntervalError(NddeError):
    """Validity interval has zero length."""


class OutOfDomainError(NddeError):
    """Argument outside a nonlinearity's validity interval."""


class OutOfRangeError(NddeError):
    """Requested value is not attained (inverse) or lies off the grid."""


class NotBracketedError(NddeError):
    """Equilibrium target cannot be bracketed on a tabulated domain."""


class NewtonDivergenceError(NddeError):
    """A Newton stage solve failed to converge."""


class BlowUpError(NddeError):
    """Trajectory magnitude exceeded the blow-up threshold.

    Carries the exit time and the partial trajectory computed so far.
    """

    def __init__(self, time, trajectory=None):
        super().__init__(f"solution magnitude exceeded blow-up threshold at t = {time}")
        self.time = time
        self.trajectory = trajectory


class SourceNotZeroError(NddeError):
    """Energy-balance diagnostics require a homogeneous problem."""


class NotLinearError(NddeError):
    """Operation requires a problem with purely linear nonlinearities."""


class EmptyIntervalError(NddeError):
    """Stability-condition interval is empty."""


class ContourThroughRootError(NddeError):
    """Root-counting contour passes through a root even after nudging."""


class VerificationMismatchError(NddeError):
    """Analytic stability label contradicts the computed root signs.

    Carries both answers so the sweep harness can report the defect.
    """

    def __init__(self, analytic, computed):
        super().__init__(
            f"analytic classification {analytic!r} disagrees with computed root signs {computed!r}"
        )
        self.analytic = analytic
        self.computed = computed


class NewtonStallWarning(UserWarning):
    """A seeded root refinement did not converge; reported, never fatal."""


class HypothesisViolatedError(NddeError):
    """A required structural hypothesis (e.g. a > |b|) does not hold."""


class NotCoprimeError(NddeError):
    """Rational period p/q must be given in lowest terms."""


class DivisorBelowFloorError(NddeError):
    """A Fourier-multiplier divisor fell below the resonance floor."""

    def __init__(self, k, value, floor=1e-12):
        super().__init__(
            f"|H(i k omega)| = {value:.3e} below floor {floor:.1e} at mode k = {k}"
        )
        self.k = k
        self.value = value
        self.floor = floor


class ShootingDivergenceError(NddeError):
    """Periodic shooting Newton failed; carries the iteration trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class ContractionFailedError(NddeError):
    """Fixed-point iteration did not contract within the iteration budget."""


class ConfigError(NddeError):
    """Run configuration is malformed; message names the offending field."""


class IoFailureError(NddeError):
    """Output file could not be written."""
