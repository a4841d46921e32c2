"""Exception hierarchy.

Every error raised on a violated mathematical precondition derives from
:class:`MathError`; malformed input documents raise :class:`SchemaError`.
The CLI maps the two families to different exit codes.
"""


class PeriodEngineError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PeriodEngineError, ValueError):
    """An interchange document does not match its expected shape."""


class MathError(PeriodEngineError, ArithmeticError):
    """A mathematical precondition of an operation is violated."""


# series
class DivisionByZeroSeries(MathError, ZeroDivisionError):
    pass


class CompositionDomain(MathError):
    pass


class NotReversible(MathError):
    pass


class ElementaryDomain(MathError):
    pass


class PoleInParameters(MathError):
    pass


# operators
class UnsupportedSubstitution(MathError):
    pass


class WrongOrder(MathError):
    pass


class NonRationalGauge(MathError):
    pass


# frobenius
class IrregularSingular(MathError):
    pass


class IrrationalRoots(MathError):
    pass


class ResonantIntegerGap(MathError):
    pass


class NoLogStructure(MathError):
    pass


# mirror
class NonClosedForm(MathError):
    pass


class NonzeroConstantMismatch(MathError):
    pass


class DivergentTail(MathError):
    pass


class DegeneratePotential(MathError):
    pass


# continuation
class PathTooCloseToSingularity(MathError):
    pass


class PrecisionExhausted(MathError):
    pass


class NoOrbifoldPoint(MathError):
    pass


# toric
class InvalidPolytope(MathError):
    pass


class NotReflexive(MathError):
    pass


class RaysMismatch(MathError):
    pass


class ExponentMismatch(MathError):
    """Two series whose leading exponents differ by a non-integer were combined."""
