"""Exception hierarchy shared by all modules."""


class PVModelsError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(PVModelsError, ValueError):
    pass


class SignatureMismatch(PVModelsError, ValueError):
    pass


class Degenerate(PVModelsError, ValueError):
    """A form, plane or metric is (numerically) degenerate."""


class ClusterAmbiguity(PVModelsError, ValueError):
    """Eigenvalue clusters are too close to be separated reliably."""


class SamplerExhausted(PVModelsError, RuntimeError):
    pass


class SymmetryConflict(PVModelsError, ValueError):
    pass


class BianchiViolation(PVModelsError, ValueError):
    pass


class NotDecomposable(PVModelsError):
    """Cross-block curvature entries survive the Ricci eigenspace split.

    Attributes
    ----------
    witness : tuple of int
        0-based indices (in the block basis) of the first offending entry.
    value : float
        The offending entry.
    cross_term_max : float
        Largest cross-block entry.
    pv_verdict : bool or None
        Verdict of the deterministic commutativity check on the same model.
    """

    def __init__(self, message, witness, value, cross_term_max, pv_verdict=None, decomposition=None):
        super().__init__(message)
        self.witness = witness
        self.value = value
        self.cross_term_max = cross_term_max
        self.pv_verdict = pv_verdict
        self.decomposition = decomposition


class ExpressionError(PVModelsError, ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifier(ExpressionError):
    pass


class VariableOutOfRange(ExpressionError):
    pass


class DomainError(ExpressionError):
    """Evaluation left the real domain of a function (ln, division, power)."""

    def __init__(self, message, subtree=None):
        super().__init__(message if subtree is None else f"{message}: {subtree}")
        self.subtree = subtree


class BadParameter(PVModelsError, ValueError):
    pass


class InsufficientSamples(PVModelsError, ValueError):
    pass


class ZeroCurvature(PVModelsError, ValueError):
    pass
