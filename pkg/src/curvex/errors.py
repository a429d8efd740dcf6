"""Exceptions shared across the package."""


class CurvexError(ValueError):
    pass


class ComplexityTooLow(CurvexError):
    """Surface signature below the supported complexity range."""


class UnflippableEdge(CurvexError):
    """Edge whose two sides lie in the same triangle."""


class IncompatibleTriangulations(CurvexError):
    """Operation mixing curves that live on different triangulations."""


class InessentialCurve(CurvexError):
    """Curve that is null-homotopic or puncture-parallel."""


class DuplicateCurve(CurvexError):
    """Curve system containing the same weight vector twice."""


class NotAChain(CurvexError):
    """Ordered curve list failing the chain intersection pattern."""


class NotAnOuterCurve(CurvexError):
    """Half-twist requested along a curve that does not cut off a twice-punctured disk."""


class WrongModel(CurvexError):
    """Mapping class requested on a model that does not support it."""


class MalformedTrace(CurvexError):
    """Expansion trace violating its structural invariants."""


class DeterminationFailed(CurvexError):
    """A defining set that should determine a unique curve failed to do so."""
