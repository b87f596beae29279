"""Exception hierarchy shared by every layer of the engine."""


class WPBaileyError(Exception):
    """Base class for all engine errors."""


class DivisionByZeroSeries(WPBaileyError, ZeroDivisionError):
    """Divisor vanishes modulo its truncation order (degenerate point)."""


class PoleAtZeroNome(WPBaileyError):
    """A p -> 0 limit was requested for a series with negative valuation."""


class InsufficientTruncation(WPBaileyError):
    """Too few significant nome orders survive to make a meaningful claim."""


class IndexRangeError(WPBaileyError, ValueError):
    """A factorial rewriting needed a negative-length product."""


class ConstraintViolation(WPBaileyError, ValueError):
    """Parameters do not satisfy the monomial constraint an identity requires."""


class MissingRoot(WPBaileyError, ValueError):
    """A square root was needed but is not rational (or not declared)."""


class SamplingExhausted(WPBaileyError):
    """The point sampler hit its rejection limit."""
