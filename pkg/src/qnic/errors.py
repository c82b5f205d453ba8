"""Exception types shared across the package."""


class QnicError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QnicError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TruncationError(QnicError):
    """Fock-space truncation loses more probability mass than tolerated."""


class QuadratureFailure(QnicError):
    """A numerical integral failed to reach the requested tolerance."""


class InsecureChannel(QnicError):
    """The security gap p_e - p_err is not positive; no finite signature length."""


class InsufficientData(QnicError):
    """Too few samples for a statistically meaningful estimate."""


class InsufficientAccepted(QnicError):
    """Postselection left too few signature elements to run the protocol."""


class RateNonPositive(QnicError):
    """The estimated secret-key rate is zero or negative; the protocol aborts."""


class DegenerateFrame(QnicError):
    """A frame carries no phase-reference symbols."""


class UnsupportedTask(QnicError):
    """No registered protocol matches the requested task/direction pair."""


class UnsupportedAttack(QnicError):
    """The requested attack model is not implemented for this quantity."""
