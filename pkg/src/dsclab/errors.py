"""Exception and warning types shared across the package."""


class DscError(Exception):
    """Base class for all errors raised by this package."""


class ZeroColumn(DscError):
    """A dictionary column has (numerically) zero norm and cannot be normalized."""

    def __init__(self, index, norm=None):
        self.index = index
        self.norm = norm
        msg = "column %d has norm below 1e-12" % index
        if norm is not None:
            msg += " (%.3e)" % norm
        super().__init__(msg)


class IndexOutOfRange(DscError):
    """A layer index fell outside 1..J."""


class InfeasibleBudget(DscError):
    """The requested sparsity budgets cannot be realized by the generator."""


class TooFewColumns(DscError):
    """Coherence needs at least two columns."""


class LpInfeasible(DscError):
    """The linear program has no feasible point."""


class LpUnbounded(DscError):
    """The linear program is unbounded below."""


class LpNumericalFailure(DscError):
    """The simplex iteration limit was hit or the tableau degenerated."""


class DivergingStep(DscError):
    """ISTA objective increased for three consecutive iterations."""


class Infeasible(DscError):
    """No feasible solution exists (e.g. y outside the range of D)."""


class BudgetExceeded(DscError):
    """The combinatorial enumeration budget would be exceeded."""


class NoSolution(DscError):
    """Exhaustive search found no support meeting the residual tolerance."""


class InconsistentSupports(DscError):
    """Back-substituted codes violate the supports they were solved under."""


class SparsityTooHigh(DscError):
    """The signal class sparsity violates s < (1 + 1/mu_tilde)/2."""


class ShapeMismatch(DscError):
    """Operand shapes do not chain."""


class RateNotContractive(DscError):
    """The error-envelope rate alpha is >= 1, so no geometric bound exists."""


class UndefinedForL(DscError):
    """The activation's L^m is >= 1, so the sparsity bound is undefined."""


class MissingCodes(DscError):
    """The instance carries neither truth nor candidate codes."""


class MissingTruth(DscError):
    """Ground-truth codes are required for this error metric."""


class TooFewPoints(DscError):
    """Rate fitting needs at least three usable error values."""


class ConfigError(DscError):
    """A suite configuration failed to validate."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = "%s: %s" % (field, message)
        super().__init__(message)


class MissingArtifact(DscError):
    """An expected on-disk artifact is absent."""


class CarryClipped(UserWarning):
    """The network's carried signal hit the ReLU shift; input is out of class."""


class NotContractiveWarning(UserWarning):
    """2*mu_tilde*s >= 1: thresholds are valid but geometric decay is not guaranteed."""
