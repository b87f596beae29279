"""Terminating basic and elliptic hypergeometric series, plus closed-form sums.

All evaluators sum term-recursively: ``term_{k+1} = term_k * ratio_k``, so the
cost is linear in the number of terms.  A series is cut off at the first
numerator parameter of the form ``base**(-N)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from gmpy2 import mpq

from .arith import Monomial, NomeSeries
from .errors import ConstraintViolation, DivisionByZeroSeries
from .qobjects import FactorialSpec, qratio, theta, theta_shift_quotient

PHI, W, V = "phi", "W", "V"

_MAX_TERMS = 400


def _m(x) -> Monomial:
    return Monomial.coerce(x)


@dataclass(frozen=True)
class SeriesSpec:
    """A terminating series.

    For ``kind == PHI`` the parameters are given in full.  For ``W`` and ``V``
    only ``a1`` and the trailing parameters are supplied; the pair
    ``a2 = -a3 = a1**(1/2) q`` is implied by the weight
    ``theta(a1 q^2k)/theta(a1)`` and never has to be computed.
    """

    kind: str
    spec: FactorialSpec
    numerator_params: tuple = ()
    denominator_params: tuple = ()
    argument: Monomial = Monomial(1)
    a1: Optional[Monomial] = None
    trailing: tuple = ()
    a1_root: Optional[Monomial] = field(default=None, compare=False)

    @classmethod
    def phi(cls, num: Sequence, den: Sequence, z, spec: FactorialSpec) -> "SeriesSpec":
        return cls(PHI, spec, tuple(map(_m, num)), tuple(map(_m, den)), _m(z))

    @classmethod
    def w(cls, a1, params: Sequence, z, spec: FactorialSpec, a1_root=None) -> "SeriesSpec":
        a1 = _m(a1)
        params = tuple(map(_m, params))
        q = spec.q
        return cls(
            W, spec,
            (a1,) + params,
            tuple(a1 * q / x for x in params),
            _m(z), a1, params,
            None if a1_root is None else _m(a1_root),
        )

    @classmethod
    def v(cls, a1, params: Sequence, spec: FactorialSpec) -> "SeriesSpec":
        s = cls.w(a1, params, Monomial(spec.q), spec)
        return cls(V, spec, s.numerator_params, s.denominator_params, s.argument, s.a1, s.trailing)

    @property
    def terminating_index(self) -> int:
        return terminating_index(self.numerator_params, self.spec.q)

    def full_parameters(self):
        """Numerator/denominator lists of the phi form (needs ``a1_root`` for W/V)."""
        if self.kind == PHI:
            return self.numerator_params, self.denominator_params
        if self.a1_root is None:
            raise ValueError("full parameter list needs a declared root of a1")
        q = self.spec.q
        r = self.a1_root
        num = (self.a1, r * q, -r * q) + self.trailing
        den = (r, -r) + tuple(self.a1 * q / x for x in self.trailing)
        return num, den


def terminating_index(numerator_params: Sequence, q) -> int:
    return min(terminating_indices(numerator_params, q))


def terminating_indices(numerator_params: Sequence, q) -> list[int]:
    """Every ``N`` with some numerator parameter equal to ``q^-N``."""
    found = []
    for x in numerator_params:
        x = _m(x)
        if x.exp != 0 or x.coeff == 0:
            continue
        target = x.coeff
        power = mpq(1)
        for n in range(_MAX_TERMS):
            if power == target:
                found.append(n)
                break
            power /= q
    if not found:
        raise ValueError("series does not terminate (no numerator parameter q^-N)")
    return found


def _sum_terms(num, den, z, spec, weight=None, n_terms=None) -> NomeSeries:
    q = spec.q
    if n_terms is None:
        stops = terminating_indices(num, q)
        n_terms = min(stops) + 1
        _check_no_later_pole(den, q, min(stops), max(stops) + 1, spec)
    z = _m(z)
    total = NomeSeries.zero()
    term = NomeSeries.one()
    for k in range(n_terms):
        w = term if weight is None else term * weight(k)
        total = total + w
        if k == n_terms - 1:
            break
        top = z.series()
        for x in num:
            top = top * theta(x * q**k, spec)
        if top.is_zero() and top.is_exact():
            _check_no_later_pole(den, q, k + 1, n_terms, spec)
            break
        bottom = theta(Monomial(q ** (k + 1)), spec)
        for y in den:
            bottom = bottom * theta(y * q**k, spec)
        term = term * (top / bottom)
    return total


def _check_no_later_pole(den, q, start, n_terms, spec):
    # an early zero in the numerator only terminates the sum if no later
    # denominator vanishes too; otherwise the terms are 0/0
    for j in range(start, n_terms - 1):
        for y in [Monomial(q ** (j + 1))] + list(den):
            t = theta(y * q**j, spec)
            if t.is_zero() and t.is_exact():
                raise DivisionByZeroSeries(f"0/0 term: numerator vanishes before denominator factor {y} at k={j}")


def eval_phi(s: SeriesSpec) -> NomeSeries:
    """Terminating ``r+1 phi r`` (theta-deformed when the nome is nonzero)."""
    if s.kind != PHI:
        raise ValueError("eval_phi expects a phi SeriesSpec")
    return _sum_terms(s.numerator_params, s.denominator_params, s.argument, s.spec)


def eval_w(s: SeriesSpec) -> NomeSeries:
    """Terminating very-well-poised ``r+1 W r(a1; a4,...; q, z)``."""
    if s.kind not in (W, V):
        raise ValueError("eval_w expects a W or V SeriesSpec")
    if s.a1_root is not None and s.a1_root**2 != s.a1:
        raise ConstraintViolation("declared root does not square to a1")
    a1, spec = s.a1, s.spec
    return _sum_terms(
        s.numerator_params, s.denominator_params, s.argument, spec,
        weight=lambda k: theta_shift_quotient(a1, k, spec),
    )


def eval_v(s: SeriesSpec) -> NomeSeries:
    """Terminating elliptic ``r+1 V r(a1; a6,...; q, p)``."""
    if s.kind != V:
        raise ValueError("eval_v expects a V SeriesSpec")
    return eval_w(s)


# convenience wrappers -------------------------------------------------------

def phi(num, den, z, spec) -> NomeSeries:
    return eval_phi(SeriesSpec.phi(num, den, z, spec))


def wsum(a1, params, z, spec) -> NomeSeries:
    return eval_w(SeriesSpec.w(a1, params, z, spec))


def vsum(a1, params, spec) -> NomeSeries:
    return eval_v(SeriesSpec.v(a1, params, spec))


class Classification(NamedTuple):
    well_poised: bool
    very_well_poised: bool
    balanced: bool


def _balanced_vwp(a1: Monomial, trailing: Sequence[Monomial], q) -> bool:
    # a6...a_{r+1} q = (a1 q)^((r-5)/2); r - 5 = len(trailing) - 1
    prod = Monomial(q)
    for x in trailing:
        prod = prod * x
    return prod**2 == (a1 * q) ** (len(trailing) - 1)


def classify(s: SeriesSpec) -> Classification:
    q = s.spec.q
    if s.kind in (W, V):
        balanced = _balanced_vwp(s.a1, s.trailing, q)
        if s.kind == W:
            balanced = balanced and s.argument == Monomial(q)
        return Classification(True, True, balanced)
    num, den = s.numerator_params, s.denominator_params
    wp = len(num) == len(den) + 1 and all(num[i + 1] * den[i] == num[0] * q for i in range(len(den)))
    vwp = wp and len(num) >= 3 and num[1] ** 2 == num[0] * q**2 and num[2] == -num[1]
    prod_num = Monomial(q)
    for x in num:
        prod_num = prod_num * x
    prod_den = Monomial(1)
    for y in den:
        prod_den = prod_den * y
    balanced = s.argument == Monomial(q) and prod_num == prod_den
    return Classification(wp, vwp, balanced)


# closed-form summations -------------------------------------------------------

def _scalar(x: NomeSeries):
    if x.is_exact() and (x.is_zero() or (len(x.coeffs) == 1 and x.valuation == 0)):
        return x.coefficient(0)
    return x


def lemma1_lhs(a, b, c, n: int, q) -> NomeSeries:
    a, b, c = _m(a), _m(b), _m(c)
    spec = FactorialSpec(q)
    num = [a * q, a * a, b, Monomial(q ** (-n))]
    den = [a, c, a * a * b * q ** (2 - n) / c]
    return phi(num, den, Monomial(q), spec)


def sum_lemma1(a, b, c, n: int, q):
    """Closed form of the 4phi3 sum valid when ``c = -abq`` or ``c = a^2 q/b``."""
    a, b, c = _m(a), _m(b), _m(c)
    if c != -a * b * q and c != a * a * q / b:
        raise ConstraintViolation("lemma 1 needs c = -abq or c = a^2 q/b")
    return _scalar(lemma1_rhs(a, b, c, n, q))


def lemma1_rhs(a, b, c, n: int, q) -> NomeSeries:
    """The lemma 1 product, without checking the constraint on ``c``."""
    a, b, c = _m(a), _m(b), _m(c)
    spec = FactorialSpec(q)
    pre = (NomeSeries.one() + (a * q**n / b).series()) / (NomeSeries.one() + (a / b).series())
    return pre * qratio([c / (a * a * q), c / (b * q)], [c, c / (a * a * b * q)], n, spec)


def lemma2_lhs(a, b_root, n: int, q) -> NomeSeries:
    a, r = _m(a), _m(b_root)
    b = r * r
    spec = FactorialSpec(q)
    params = [b, a * q**n / r, -a * q**n / r, Monomial(q ** (-n)), Monomial(-(q ** (-n)))]
    return wsum(a, params, Monomial(q**2), spec)


def sum_lemma2(a, b, n: int, q, b_root=None):
    """Closed form of the 8W7 sum with argument ``q^2``.

    The right-hand side is free of ``b^(1/2)``; a declared root is only
    validated when supplied.
    """
    a, b = _m(a), _m(b)
    if b_root is not None and _m(b_root) ** 2 != b:
        raise ConstraintViolation("declared root does not square to b")
    spec = FactorialSpec(q)
    spec2 = spec.with_base(q**2)
    r = (
        qratio([-a / b], [-a * q], 2 * n, spec)
        * qratio([a * a * q**2, b], [1 / b, a * a * q**2 / (b * b)], n, spec2)
        * ((Monomial(q) / b) ** n).series()
    )
    return _scalar(r)


def elliptic_jackson_lhs(a, b, c, d, e, n: int, spec: FactorialSpec) -> NomeSeries:
    return vsum(a, [b, c, d, e, Monomial(spec.q ** (-n))], spec)


def sum_elliptic_jackson(a, b, c, d, e, n: int, spec: FactorialSpec) -> NomeSeries:
    """Frenkel-Turaev closed form of the terminating, balanced 10V9."""
    a, b, c, d, e = map(_m, (a, b, c, d, e))
    q = spec.q
    if b * c * d * e != a * a * q ** (n + 1):
        raise ConstraintViolation("10V9 sum needs bcde = a^2 q^(n+1)")
    return jackson_rhs(a, b, c, d, n, spec)


def jackson_rhs(a, b, c, d, n: int, spec: FactorialSpec) -> NomeSeries:
    a, b, c, d = map(_m, (a, b, c, d))
    aq = a * spec.q
    return qratio(
        [aq, aq / (b * c), aq / (b * d), aq / (c * d)],
        [aq / b, aq / c, aq / d, aq / (b * c * d)],
        n, spec,
    )


def new_bibasic_lhs(a, b, n: int, spec: FactorialSpec) -> NomeSeries:
    a, b = _m(a), _m(b)
    q = spec.q
    sq = spec.squared()
    a2 = a * a
    total = NomeSeries.zero()
    for k in range(n + 1):
        t = (
            theta_shift_quotient(a2, k, sq)
            * qratio([a2, b], [Monomial(q**2), a2 * q**2 / b], k, sq)
            * qratio([a * q ** (n - 1) / b, Monomial(q ** (-n))], [b * q ** (2 - n), a * q ** (n + 1)], k, spec)
            * NomeSeries.monomial(q ** (2 * k))
        )
        total = total + t
    return total


def sum_new_bibasic(a, b, n: int, spec: FactorialSpec) -> NomeSeries:
    """Right side of the elliptic bibasic sum mixing nomes ``p`` and ``p^2``."""
    a, b = _m(a), _m(b)
    q = spec.q
    sq = spec.squared()
    return (
        theta(-a * q ** (2 * n - 1) / b, spec) / theta(-a / (b * q), spec)
        * qratio([a * q, -a / (b * q)], [Monomial(-q), 1 / (b * q)], n, spec)
        * qratio([1 / (b * q**2)], [a * a * q**2 / b], n, sq)
        * NomeSeries.monomial(q**n)
    )


def jackson_basic(a, b, c, d, e, n: int, q) -> NomeSeries:
    """Jackson's terminating 8phi7 closed form (basic mode)."""
    return sum_elliptic_jackson(a, b, c, d, e, n, FactorialSpec(q))


__all__ = [
    "SeriesSpec", "Classification", "classify", "eval_phi", "eval_w", "eval_v",
    "phi", "wsum", "vsum", "terminating_index",
    "lemma1_lhs", "sum_lemma1", "lemma1_rhs", "jackson_rhs", "lemma2_lhs", "sum_lemma2",
    "elliptic_jackson_lhs", "sum_elliptic_jackson",
    "new_bibasic_lhs", "sum_new_bibasic", "jackson_basic",
]
