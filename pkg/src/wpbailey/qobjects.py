"""Theta functions and (elliptic) q-shifted factorials.

One code path serves both worlds: ``FactorialSpec.nome == 0`` is the basic
(p = 0) mode, where ``theta(z) = 1 - z`` and every factorial is an exact
rational; a positive ``nome`` is the exponent ``m`` in ``nome = w**m``
(``m = 2`` is ``p``, ``m = 4`` is ``p**2``).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .arith import DEFAULT_ORDER, Monomial, NomeSeries, Rat, rat
from .errors import IndexRangeError


@dataclass(frozen=True)
class FactorialSpec:
    """Base ``q``, nome exponent and theta truncation (relative, in ``w``)."""

    q: Rat
    nome: int = 0
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        q = rat(self.q)
        object.__setattr__(self, "q", q)
        if q in (0, 1, -1):
            raise ValueError(f"base q = {q} is degenerate")
        if self.nome < 0 or self.nome % 2:
            raise ValueError(f"nome exponent must be a nonnegative even integer, got {self.nome}")

    @property
    def basic(self) -> bool:
        return self.nome == 0

    def with_base(self, q) -> "FactorialSpec":
        return replace(self, q=rat(q))

    def with_nome(self, nome: int) -> "FactorialSpec":
        return replace(self, nome=nome)

    def squared(self) -> "FactorialSpec":
        """``(q, p) -> (q**2, p**2)``."""
        return replace(self, q=self.q**2, nome=2 * self.nome)

    def basic_limit(self) -> "FactorialSpec":
        return replace(self, nome=0)

    def qm(self, e: int = 1) -> Monomial:
        return Monomial(self.q**e)


def _as_mono(z) -> Monomial:
    return Monomial.coerce(z)


@lru_cache(maxsize=200_000)
def _theta(c: Rat, e: int, t: int, rel: int) -> NomeSeries:
    if t == 0:
        if e == 0:
            return NomeSeries.monomial(1 - c)
        return NomeSeries.from_dict({0: 1, e: -c})
    # factors (1 - coeff * w**s): z p^j and p^(j+1)/z for j >= 0
    factors = []
    j = 0
    while e + t * j < rel:
        factors.append((c, e + t * j))
        j += 1
    j = 0
    inv = 1 / c
    while t * (j + 1) - e < rel:
        factors.append((inv, t * (j + 1) - e))
        j += 1
    if any(s == 0 and a == 1 for a, s in factors):
        return NomeSeries.zero()
    val = sum(s for _, s in factors if s < 0)
    top = val + rel  # exclusive absolute bound
    suffix_neg = [0] * (len(factors) + 1)
    for i in range(len(factors) - 1, -1, -1):
        suffix_neg[i] = suffix_neg[i + 1] + min(factors[i][1], 0)
    poly = {0: mpq(1)}
    for i, (a, s) in enumerate(factors):
        new = dict(poly)
        for ex, co in poly.items():
            new[ex + s] = new.get(ex + s, 0) - co * a
        # later factors can only lower exponents by suffix_neg[i + 1]
        poly = {ex: co for ex, co in new.items() if co and ex + suffix_neg[i + 1] < top}
    return NomeSeries.from_dict(poly, order=top)


def theta(z, spec: FactorialSpec) -> NomeSeries:
    """Modified Jacobi theta ``prod_j (1 - z p^j)(1 - p^(j+1)/z)`` at nome ``w**spec.nome``."""
    z = _as_mono(z)
    if z.is_zero():
        raise ValueError("theta is undefined at z = 0")
    return _theta(z.coeff, z.exp, spec.nome, spec.order)


@lru_cache(maxsize=200_000)
def _qfact(a: Monomial, n: int, spec: FactorialSpec) -> NomeSeries:
    if n == 0:
        return NomeSeries.one()
    if n < 0:
        return 1 / _qfact(a * spec.q**n, -n, spec)
    return _qfact(a, n - 1, spec) * theta(a * spec.q ** (n - 1), spec)


def qfact(a, n: int, spec: FactorialSpec) -> NomeSeries:
    """``(a;q,p)_n``; negative ``n`` means ``1/(a q^n;q,p)_{-n}``."""
    return _qfact(_as_mono(a), int(n), spec)


def qfact_multi(args: Sequence, n: int, spec: FactorialSpec) -> NomeSeries:
    """``(a_1,...,a_k;q,p)_n``."""
    result = NomeSeries.one()
    for a in args:
        result = result * qfact(a, n, spec)
    return result


def qratio(num: Sequence, den: Sequence, n: int, spec: FactorialSpec) -> NomeSeries:
    """``(num;q,p)_n / (den;q,p)_n``."""
    return qfact_multi(num, n, spec) / qfact_multi(den, n, spec)


def theta_shift_quotient(a, k: int, spec: FactorialSpec) -> NomeSeries:
    """``theta(a q^(2k); p) / theta(a; p)``, the very-well-poised weight."""
    a = _as_mono(a)
    if k == 0:
        return NomeSeries.one()
    return theta(a * spec.q ** (2 * k), spec) / theta(a, spec)


def theta_weight(a, step: int, spec: FactorialSpec) -> NomeSeries:
    """``theta(a q^step; p) / theta(a; p)`` for arbitrary ``step``."""
    a = _as_mono(a)
    if step == 0:
        return NomeSeries.one()
    return theta(a * spec.q**step, spec) / theta(a, spec)


def qfact_shift(a, n: int, k: int, spec: FactorialSpec, direction: str = "add") -> NomeSeries:
    """``(a;q,p)_{n+k}`` or ``(a;q,p)_{n-k}`` computed through the shift rules.

    add:       (a)_n (a q^n)_k
    subtract:  (a)_n (-q^(1-n)/a)^k q^C(k,2) / (q^(1-n)/a)_k
    """
    a = _as_mono(a)
    q = spec.q
    if n < 0 or k < 0:
        raise IndexRangeError("shift rewriting needs n, k >= 0")
    if direction == "add":
        return qfact(a, n, spec) * qfact(a * q**n, k, spec)
    if direction == "subtract":
        if k > n:
            raise IndexRangeError(f"(a)_(n-k) with n={n} < k={k}")
        base = Monomial(q ** (1 - n)) / a
        sign = (-base) ** k * Monomial(q ** (k * (k - 1) // 2))
        return qfact(a, n, spec) * sign.series() / qfact(base, k, spec)
    raise ValueError(f"unknown direction {direction!r}")


def clear_caches():
    _theta.cache_clear()
    _qfact.cache_clear()
