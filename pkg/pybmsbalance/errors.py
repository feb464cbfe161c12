"""Custom exceptions for pybmsbalance."""


class BmsError(Exception):
    """Base exception for pybmsbalance."""


class HermiticityError(BmsError):
    """Raised when an operator that must be hermitian is not."""


class CommutationError(BmsError):
    """Raised when the Hamiltonian and the number operator do not commute."""

    def __init__(self, violation: float, bound: float):
        self.violation = violation
        self.bound = bound
        super().__init__(
            f"[H_S, N_S] has max-norm {violation:.3e}, above the bound {bound:.3e}"
        )


class NumberQuantizationError(BmsError):
    """Raised when a number-operator eigenvalue is not an integer."""


class ModelValidationError(BmsError):
    """Raised when a system model is structurally invalid."""


class StatisticsMismatchError(BmsError):
    """Raised when a bath has the wrong (or mixed) particle statistics."""


class ChemicalPotentialDomainError(BmsError):
    """Raised when a Bose occupation is evaluated at or below the chemical potential."""

    def __init__(self, omega: float, mu: float):
        self.omega = omega
        self.mu = mu
        super().__init__(
            f"Bose occupation undefined at omega={omega:.6g} <= mu={mu:.6g}"
        )


class UndefinedAverageError(BmsError):
    """Raised when all tunneling rates vanish at a frequency."""

    def __init__(self, omega: float):
        self.omega = omega
        super().__init__(f"All bath rates vanish at omega={omega:.6g}")


class PreconditionError(BmsError):
    """Raised when an operation is called outside its domain of validity."""


class DimensionMismatchError(BmsError):
    """Raised when operators, spectral matrices or coefficients do not fit together."""


class LadderStructureError(BmsError):
    """Raised when the population dynamics is not a nearest-neighbour ladder."""

    def __init__(self, message: str, transition: tuple[int, int] | None = None):
        self.transition = transition
        self.message = message
        super().__init__(message)


class SecularStructureError(BmsError):
    """Raised when populations couple to coherences."""


class DivergentRatioError(BmsError):
    """Raised when a stationary ratio has a vanishing denominator."""

    def __init__(self, message: str, link: int | None = None):
        self.link = link
        super().__init__(message)


class DisconnectedLadderError(BmsError):
    """Raised when a ladder link has neither up nor down rate."""

    def __init__(self, link: int):
        self.link = link
        super().__init__(
            f"Ladder link {link} carries no rates; the stationary state is not unique"
        )


class PositivityError(BmsError):
    """Raised when a stationary density matrix is significantly non-positive."""


class StepSizeError(BmsError):
    """Raised when fixed-step integration loses the trace or diverges."""


class LogDomainError(BmsError):
    """Raised when a ratio that must be logged is not finite and positive."""


class ConfigError(BmsError):
    """Raised when a scenario configuration is invalid."""


class VerificationFailed(BmsError):
    """Raised when a balance relation fails during the verify pipeline."""
