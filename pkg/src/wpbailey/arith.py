"""Exact rationals and truncated Laurent series in the half-nome ``w``.

Every elliptic quantity lives in ``Q((w))`` with the nome ``p = w**2``, so
``p**(1/2)`` and ``1/p`` are plain integer powers of ``w``.  A series is known
modulo ``w**order``; ``order=None`` marks an exact Laurent polynomial.

Precision follows the pessimistic min-rule: a product or quotient keeps the
smaller relative precision of its operands, a sum keeps the smaller absolute
order.  Nothing ever claims more digits than its inputs justify.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpq

from .errors import (
    DivisionByZeroSeries,
    InsufficientTruncation,
    MissingRoot,
    PoleAtZeroNome,
)

Rat = type(mpq(0))

DEFAULT_ORDER = 16
# Products/quotients left with fewer significant orders than this raise.
MIN_SIGNIFICANT = 4

RatLike = Union[int, str, Fraction, "mpq"]


def rat(x: RatLike, den: int | None = None) -> mpq:
    """Coerce ``x`` (int, ``"p/q"`` string, Fraction, mpq) to an exact Rat."""
    if den is not None:
        return mpq(x, den)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return mpq(x)


def rat_sqrt(x: RatLike) -> mpq:
    """Exact nonnegative square root of a rational square."""
    x = rat(x)
    if x < 0:
        raise MissingRoot(f"{x} has no rational square root")
    num, den = x.numerator, x.denominator
    if not (gmpy2.is_square(num) and gmpy2.is_square(den)):
        raise MissingRoot(f"{x} is not a rational square")
    return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))


def is_rat_square(x: RatLike) -> bool:
    try:
        rat_sqrt(x)
    except MissingRoot:
        return False
    return True


def _inf(o):
    return float("inf") if o is None else o


def _fin(o):
    return None if o == float("inf") else int(o)


class Monomial:
    """``coeff * w**exp`` with an exact coefficient; hashable and immutable."""

    __slots__ = ("coeff", "exp")

    def __init__(self, coeff: RatLike = 1, exp: int = 0):
        object.__setattr__(self, "coeff", rat(coeff))
        object.__setattr__(self, "exp", int(exp) if coeff != 0 else 0)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @staticmethod
    def coerce(x) -> "Monomial":
        if isinstance(x, Monomial):
            return x
        return Monomial(x, 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __mul__(self, other):
        if isinstance(other, NomeSeries):
            return NotImplemented
        o = Monomial.coerce(other)
        return Monomial(self.coeff * o.coeff, self.exp + o.exp)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, NomeSeries):
            return NotImplemented
        o = Monomial.coerce(other)
        if o.coeff == 0:
            raise ZeroDivisionError("division by the zero monomial")
        return Monomial(self.coeff / o.coeff, self.exp - o.exp)

    def __rtruediv__(self, other):
        return Monomial.coerce(other) / self

    def __neg__(self):
        return Monomial(-self.coeff, self.exp)

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return Monomial(1) / (self ** (-n))
        return Monomial(self.coeff**n, self.exp * n)

    def __eq__(self, other):
        if isinstance(other, NomeSeries):
            return NotImplemented
        try:
            o = Monomial.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coeff == o.coeff and self.exp == o.exp

    def __hash__(self):
        return hash((self.coeff, self.exp))

    def sqrt(self) -> "Monomial":
        if self.exp % 2:
            raise MissingRoot(f"{self} has an odd power of w")
        return Monomial(rat_sqrt(self.coeff), self.exp // 2)

    def series(self) -> "NomeSeries":
        return NomeSeries.monomial(self.coeff, self.exp)

    def __repr__(self):
        if self.exp == 0:
            return f"Monomial({self.coeff})"
        return f"Monomial({self.coeff}, w^{self.exp})"

    def __str__(self):
        if self.exp == 0:
            return str(self.coeff)
        return f"{self.coeff}*w^{self.exp}"


class NomeSeries:
    """Truncated Laurent series in ``w`` with exact rational coefficients.

    ``valuation`` is the exponent of ``coeffs[0]`` (which is nonzero unless the
    series is zero).  ``order`` is the exclusive truncation bound, or ``None``
    when the series is an exact Laurent polynomial.  Canonical zero has empty
    ``coeffs`` and ``valuation == order`` (0 for the exact zero).
    """

    __slots__ = ("valuation", "coeffs", "order")

    def __init__(self, coeffs: Iterable = (), valuation: int = 0, order: int | None = None):
        cs = [rat(c) for c in coeffs]
        self._set(*_normalize(int(valuation), cs, order))

    def _set(self, valuation, coeffs, order):
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "order", order)

    def __setattr__(self, name, value):
        raise AttributeError("NomeSeries is immutable")

    @classmethod
    def _raw(cls, valuation, coeffs, order) -> "NomeSeries":
        obj = object.__new__(cls)
        obj._set(*_normalize(valuation, coeffs, order))
        return obj

    @classmethod
    def monomial(cls, coeff: RatLike = 1, exp: int = 0, order: int | None = None):
        return cls._raw(int(exp), [rat(coeff)], order)

    @classmethod
    def zero(cls, order: int | None = None) -> "NomeSeries":
        return cls._raw(0 if order is None else order, [], order)

    @classmethod
    def one(cls) -> "NomeSeries":
        return cls.monomial(1)

    @classmethod
    def from_dict(cls, terms: dict, order: int | None = None) -> "NomeSeries":
        """Build from ``{exponent: coefficient}``."""
        terms = {int(e): rat(c) for e, c in terms.items() if c != 0}
        if not terms:
            return cls.zero(order)
        lo = min(terms)
        hi = max(terms)
        return cls._raw(lo, [terms.get(e, mpq(0)) for e in range(lo, hi + 1)], order)

    # ---------------------------------------------------------------- queries
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.order is None

    @property
    def significant(self) -> float:
        """Number of known orders beyond the valuation (inf if exact)."""
        return _inf(self.order) - self.valuation

    def coefficient(self, e: int):
        if self.order is not None and e >= self.order:
            raise InsufficientTruncation(f"coefficient of w^{e} is beyond w^{self.order}")
        i = e - self.valuation
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return mpq(0)

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.valuation + i, c

    def constant_term(self):
        return series_constant_term(self)

    # ------------------------------------------------------------- arithmetic
    def __neg__(self):
        return NomeSeries._raw(self.valuation, [-c for c in self.coeffs], self.order)

    def __add__(self, other):
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return series_add(self, -_coerce(other))

    def __rsub__(self, other):
        return series_add(_coerce(other), -self)

    def __mul__(self, other):
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return series_div(self, other)

    def __rtruediv__(self, other):
        return series_div(_coerce(other), self)

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return series_div(NomeSeries.one(), self**(-n))
        result = NomeSeries.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        try:
            o = _coerce(other)
        except TypeError:
            return NotImplemented
        return series_eq(self, o)

    __hash__ = None

    def substitute_nome_power(self, m: int) -> "NomeSeries":
        return series_substitute_nome_power(self, m)

    def render(self) -> str:
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for e, c in self.terms():
                parts.append(str(c) if e == 0 else f"{c}*w^{e}")
            body = " + ".join(parts)
        if self.order is None:
            return body
        return f"{body} (mod w^{self.order})"

    __str__ = render

    def __repr__(self):
        return f"NomeSeries({self.render()})"


def _normalize(val, coeffs, order):
    if order is not None:
        keep = order - val
        if keep <= 0:
            coeffs = []
        elif len(coeffs) > keep:
            coeffs = coeffs[:keep]
    start = 0
    n = len(coeffs)
    while start < n and coeffs[start] == 0:
        start += 1
    end = n
    while end > start and coeffs[end - 1] == 0:
        end -= 1
    if start == end:
        return (0 if order is None else order), (), order
    return val + start, tuple(coeffs[start:end]), order


def _coerce(x) -> NomeSeries:
    if isinstance(x, NomeSeries):
        return x
    if isinstance(x, Monomial):
        return x.series()
    if isinstance(x, (int, Rat, Fraction, str)):
        return NomeSeries.monomial(rat(x), 0)
    raise TypeError(f"cannot interpret {type(x).__name__} as a NomeSeries")


def _check_significant(s: NomeSeries) -> NomeSeries:
    if s.order is not None and s.coeffs and s.order - s.valuation < MIN_SIGNIFICANT:
        raise InsufficientTruncation(
            f"only {s.order - s.valuation} significant orders left (need {MIN_SIGNIFICANT})"
        )
    return s


def series_add(x, y) -> NomeSeries:
    x, y = _coerce(x), _coerce(y)
    order = _fin(min(_inf(x.order), _inf(y.order)))
    if not y.coeffs:
        return NomeSeries._raw(x.valuation, list(x.coeffs), order)
    if not x.coeffs:
        return NomeSeries._raw(y.valuation, list(y.coeffs), order)
    lo = min(x.valuation, y.valuation)
    hi = max(x.valuation + len(x.coeffs), y.valuation + len(y.coeffs))
    if order is not None:
        hi = min(hi, order)
    if hi <= lo:
        return NomeSeries.zero(order)
    out = [mpq(0)] * (hi - lo)
    for s in (x, y):
        off = s.valuation - lo
        for i, c in enumerate(s.coeffs):
            if off + i < len(out):
                out[off + i] += c
    return NomeSeries._raw(lo, out, order)


def series_mul(x, y) -> NomeSeries:
    x, y = _coerce(x), _coerce(y)
    if not x.coeffs or not y.coeffs:
        if (not x.coeffs and x.order is None) or (not y.coeffs and y.order is None):
            return NomeSeries.zero()
        bound = min(
            _inf(x.order) + (y.valuation if y.coeffs else _inf(y.order)),
            _inf(y.order) + (x.valuation if x.coeffs else _inf(x.order)),
        )
        return NomeSeries.zero(_fin(bound))
    val = x.valuation + y.valuation
    order = _fin(min(_inf(x.order) + y.valuation, _inf(y.order) + x.valuation))
    xc, yc = x.coeffs, y.coeffs
    limit = len(xc) + len(yc) - 1
    if order is not None:
        limit = min(limit, order - val)
    out = [mpq(0)] * limit
    ny = len(yc)
    for i, a in enumerate(xc):
        if i >= limit:
            break
        if not a:
            continue
        top = min(ny, limit - i)
        for j in range(top):
            b = yc[j]
            if b:
                out[i + j] += a * b
    return _check_significant(NomeSeries._raw(val, out, order))


def series_inverse(y, precision: int | None = None) -> NomeSeries:
    """``1/y``; exact when ``y`` is an exact monomial."""
    y = _coerce(y)
    if not y.coeffs:
        raise DivisionByZeroSeries("division by a series that is zero to its order")
    c0 = y.coeffs[0]
    if len(y.coeffs) == 1 and y.order is None:
        return NomeSeries._raw(-y.valuation, [1 / c0], None)
    rel = _inf(y.order) - y.valuation
    if precision is not None:
        rel = min(rel, precision)
    if rel == float("inf"):
        rel = DEFAULT_ORDER
    rel = int(rel)
    u = [c / c0 for c in y.coeffs[:rel]]
    inv = [mpq(0)] * rel
    inv[0] = mpq(1)
    for j in range(1, rel):
        acc = mpq(0)
        for i in range(1, min(j, len(u) - 1) + 1):
            if u[i]:
                acc += u[i] * inv[j - i]
        inv[j] = -acc
    inv = [c / c0 for c in inv]
    return _check_significant(NomeSeries._raw(-y.valuation, inv, -y.valuation + rel))


def series_div(x, y) -> NomeSeries:
    x, y = _coerce(x), _coerce(y)
    if not y.coeffs:
        raise DivisionByZeroSeries("division by a series that is zero to its order")
    if len(y.coeffs) == 1 and y.order is None:
        c = y.coeffs[0]
        shift = y.valuation
        order = None if x.order is None else x.order - shift
        if not x.coeffs:
            return NomeSeries.zero(order)
        return NomeSeries._raw(x.valuation - shift, [a / c for a in x.coeffs], order)
    if not x.coeffs:
        if x.order is None:
            return NomeSeries.zero()
        return NomeSeries.zero(x.order - y.valuation)
    rel_x = _inf(x.order) - x.valuation
    inv = series_inverse(y, None if rel_x == float("inf") else int(rel_x))
    return series_mul(x, inv)


def series_substitute_nome_power(x, m: int) -> NomeSeries:
    """Replace ``w`` by ``w**m``."""
    x = _coerce(x)
    m = int(m)
    if m < 1:
        raise ValueError("nome power must be a positive integer")
    if m == 1:
        return x
    order = None if x.order is None else x.order * m
    if not x.coeffs:
        return NomeSeries.zero(order)
    out = [mpq(0)] * ((len(x.coeffs) - 1) * m + 1)
    for i, c in enumerate(x.coeffs):
        out[i * m] = c
    return NomeSeries._raw(x.valuation * m, out, order)


def series_constant_term(x) -> mpq:
    """Coefficient of ``w**0``: the ``p -> 0`` value of a pole-free series."""
    x = _coerce(x)
    if x.coeffs and x.valuation < 0:
        raise PoleAtZeroNome(f"series has a pole of order {-x.valuation} at w = 0")
    if x.order is not None and x.order <= 0:
        raise InsufficientTruncation("constant term lies beyond the truncation order")
    return x.coefficient(0)


def comparison_order(x, y):
    """Order modulo which ``x`` and ``y`` are compared (None if both exact)."""
    x, y = _coerce(x), _coerce(y)
    return _fin(min(_inf(x.order), _inf(y.order)))


def series_eq(x, y) -> bool:
    """True iff ``x - y`` vanishes modulo ``min(x.order, y.order)``."""
    return series_add(_coerce(x), -_coerce(y)).is_zero()


def as_series(x) -> NomeSeries:
    return _coerce(x)


def product(items: Sequence) -> NomeSeries:
    result = NomeSeries.one()
    for it in items:
        result = result * it
    return result
