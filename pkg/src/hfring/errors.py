"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for all package errors."""


class NumericRangeError(EngineError):
    """A float-mode computation overflowed or produced a non-finite value."""


class DomainError(EngineError):
    """A point lies outside the open domain of a function or grid."""


class ExprSyntaxError(EngineError):
    """Expression text failed to parse.  Carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprEvalError(EngineError):
    """An expression could not be evaluated at a point (pole, bad argument,
    or transcendental evaluation requested in rational mode)."""


class PieceError(EngineError):
    """A piece expression is unusable on its assigned subinterval."""


class EnvelopeError(EngineError):
    """Declared envelope data is inconsistent (liminf above limsup, or a
    completion produced an inverted interval)."""


class NotHausdorffContinuous(EngineError):
    """An operand required to be Hausdorff continuous is not."""


class NotPiecewiseLinear(EngineError):
    """An operand lies outside the piecewise-linear subclass."""


class ConvergenceError(EngineError):
    """A sequence did not stabilize within the depth/tolerance budget."""


class UnboundOperandError(EngineError):
    """An expression leaf has no bound function."""


class RepresentationError(EngineError):
    """A result is not representable in the piecewise closed-form model."""


class InternalConsistencyError(EngineError):
    """Two routes that must agree by uniqueness produced different results."""
