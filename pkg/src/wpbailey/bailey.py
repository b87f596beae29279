"""WP Bailey pairs, the Bailey transform and the tree transformations.

A pair is a pair of memoized evaluators ``n -> NomeSeries`` at a fixed point
``(a, k; q, p)``.  Every tree transformation has the shape

    alpha'_{j(r)}(a, k) = L_r * alpha_r(a_in, m)
    beta'_n(a, k)       = sum_s N_{n,s} * beta_s(a_in, m)

and is keyed by the *output* ``(a, k; q, p)``: the input point is derived from
the theorem's formula for ``m``.  Writing transforms this way means the
proof-level identity ``sum_s N_{n,s} M_{s,r}(in) = M_{n,j(r)}(out) L_r`` can be
checked for every tag with the same code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

from .arith import Monomial, NomeSeries
from .errors import ConstraintViolation, MissingRoot, WPBaileyError
from .qobjects import FactorialSpec, qfact, qratio, theta, theta_weight
from .report import DEGENERATE, FAIL, PASS, IdentityReport, compare_sides, digest, failure_data

ZERO = NomeSeries.zero()
ONE = NomeSeries.one()


def _m(x) -> Monomial:
    return Monomial.coerce(x)


def _pow(x: Monomial, n: int) -> NomeSeries:
    return (x**n).series()


# ---------------------------------------------------------------- kernels

def kernel_M(n: int, r: int, a, k, spec: FactorialSpec) -> NomeSeries:
    """``(k/a)_{n-r}/(q)_{n-r} * (k)_{n+r}/(aq)_{n+r}``."""
    if not 0 <= r <= n:
        raise ValueError("kernel needs 0 <= r <= n")
    a, k = _m(a), _m(k)
    q = Monomial(spec.q)
    return (qfact(k / a, n - r, spec) / qfact(q, n - r, spec)) * (
        qfact(k, n + r, spec) / qfact(a * q, n + r, spec)
    )


def kernel_Mtilde(n: int, r: int, a, k, spec: FactorialSpec) -> NomeSeries:
    """Inverse kernel, including both theta weights and ``(k/a)^{n-r}``."""
    if not 0 <= r <= n:
        raise ValueError("kernel needs 0 <= r <= n")
    a, k = _m(a), _m(k)
    q = Monomial(spec.q)
    return (
        theta_weight(a, 2 * n, spec)
        * theta_weight(k, 2 * r, spec)
        * (qfact(a / k, n - r, spec) / qfact(q, n - r, spec))
        * (qfact(a, n + r, spec) / qfact(k * q, n + r, spec))
        * _pow(k / a, n - r)
    )


def kernel_M_wellpoised(n: int, r: int, a, k, spec: FactorialSpec) -> NomeSeries:
    """The same kernel rewritten with ``(k q^n, q^-n)_r`` parameters."""
    a, k = _m(a), _m(k)
    q = spec.q
    Q = Monomial(q)
    return (
        qratio([k, k / a], [Q, a * q], n, spec)
        * qratio([k * q**n, Monomial(q ** (-n))], [a * q ** (1 - n) / k, a * q ** (n + 1)], r, spec)
        * _pow(a * q / k, r)
    )


def kernel_bibasic(i: int, n: int, r: int, a, k, spec: FactorialSpec) -> NomeSeries:
    """``(k/a;q,p)_{n-ir}/(q^i;q^i,p)_{n-r} * (k;q,p)_{n+ir}/(aq^i;q^i,p)_{n+r}``."""
    a, k = _m(a), _m(k)
    q = spec.q
    si = spec.with_base(q**i)
    return (qfact(k / a, n - i * r, spec) / qfact(Monomial(q**i), n - r, si)) * (
        qfact(k, n + i * r, spec) / qfact(a * q**i, n + r, si)
    )


# ---------------------------------------------------------------- pairs

@dataclass(frozen=True)
class TransformStep:
    """One edge of the Bailey tree.

    ``params`` carries the free data of the theorem (``b``, ``c`` for T1,
    ``sigma`` for T2b, explicit roots when the default positive root is not
    wanted).  ``derived_m`` is filled in when the step is applied.
    """

    tag: str
    params: tuple = ()
    derived_m: Optional[Monomial] = None

    def param(self, name, default=None):
        return dict(self.params).get(name, default)

    def with_params(self, **kw) -> "TransformStep":
        d = dict(self.params)
        d.update(kw)
        return replace(self, params=tuple(sorted(d.items())))

    def describe(self) -> dict:
        d = {"tag": self.tag}
        for key, val in self.params:
            d[key] = str(val)
        if self.derived_m is not None:
            d["m"] = str(self.derived_m)
        return d


class WPPair:
    """Memoized ``(alpha_n, beta_n)`` evaluators at ``(a, k; q, p)``."""

    def __init__(self, a, k, spec: FactorialSpec, alpha: Callable[[int], NomeSeries],
                 beta: Callable[[int], NomeSeries], provenance: tuple = (), name: str = "pair"):
        self.a = _m(a)
        self.k = _m(k)
        self.spec = spec
        self._alpha_fn = alpha
        self._beta_fn = beta
        self._alpha: dict[int, NomeSeries] = {}
        self._beta: dict[int, NomeSeries] = {}
        self.provenance = tuple(provenance)
        self.name = name

    @property
    def q(self):
        return self.spec.q

    def alpha(self, n: int) -> NomeSeries:
        if n < 0:
            return ZERO
        v = self._alpha.get(n)
        if v is None:
            v = self._alpha_fn(n)
            self._alpha[n] = v
        return v

    def beta(self, n: int) -> NomeSeries:
        if n < 0:
            return ZERO
        v = self._beta.get(n)
        if v is None:
            v = self._beta_fn(n)
            self._beta[n] = v
        return v

    def base(self):
        return (self.a, self.k, self.spec.q, self.spec.nome)

    def path(self) -> str:
        return ",".join(s.tag for s in self.provenance) or "unit"

    def __repr__(self):
        return f"WPPair({self.name}; a={self.a}, k={self.k}, q={self.q}, nome=w^{self.spec.nome}, path={self.path()})"


class BibasicPair:
    """``(A^(i)_n, B^(i)_n)`` at ``(a, k; q, p)``."""

    def __init__(self, i: int, a, k, spec: FactorialSpec, A, B, name="bibasic"):
        if i < 1:
            raise ValueError("bibasic index i must be positive")
        self.i = i
        self.a, self.k, self.spec = _m(a), _m(k), spec
        self._A, self._B = A, B
        self._memo_a: dict[int, NomeSeries] = {}
        self._memo_b: dict[int, NomeSeries] = {}
        self.name = name

    def A(self, n: int) -> NomeSeries:
        if n not in self._memo_a:
            self._memo_a[n] = self._A(n)
        return self._memo_a[n]

    def B(self, n: int) -> NomeSeries:
        if n not in self._memo_b:
            self._memo_b[n] = self._B(n)
        return self._memo_b[n]


def forward(pair: WPPair, n_max: int) -> list[NomeSeries]:
    """``beta_n = sum_r M_{n,r} alpha_r`` for ``n <= n_max``."""
    out = []
    for n in range(n_max + 1):
        total = ZERO
        for r in range(n + 1):
            al = pair.alpha(r)
            if al.is_zero() and al.is_exact():
                continue
            total = total + kernel_M(n, r, pair.a, pair.k, pair.spec) * al
        out.append(total)
    return out


def backward(pair: WPPair, n_max: int) -> list[NomeSeries]:
    """``alpha_n = sum_r Mtilde_{n,r} beta_r`` for ``n <= n_max``."""
    out = []
    for n in range(n_max + 1):
        total = ZERO
        for r in range(n + 1):
            be = pair.beta(r)
            if be.is_zero() and be.is_exact():
                continue
            total = total + kernel_Mtilde(n, r, pair.a, pair.k, pair.spec) * be
        out.append(total)
    return out


def pair_from_alpha(a, k, spec, alpha, name="from-alpha") -> WPPair:
    """Complete ``alpha`` to a pair by the forward transform."""
    a, k = _m(a), _m(k)

    def beta(n):
        total = ZERO
        for r in range(n + 1):
            total = total + kernel_M(n, r, a, k, spec) * alpha(r)
        return total

    return WPPair(a, k, spec, alpha, beta, name=name)


def pair_from_beta(a, k, spec, beta, name="from-beta") -> WPPair:
    a, k = _m(a), _m(k)

    def alpha(n):
        total = ZERO
        for r in range(n + 1):
            total = total + kernel_Mtilde(n, r, a, k, spec) * beta(r)
        return total

    return WPPair(a, k, spec, alpha, beta, name=name)


def unit_alpha(n: int, a, k, spec: FactorialSpec) -> NomeSeries:
    a, k = _m(a), _m(k)
    q = spec.q
    return (
        theta_weight(a, 2 * n, spec)
        * qratio([a, a / k], [Monomial(q), k * q], n, spec)
        * _pow(k / a, n)
    )


def unit_pair(a, k, spec: FactorialSpec) -> WPPair:
    """The pair with ``beta_n = delta_{n,0}``."""
    a, k = _m(a), _m(k)
    return WPPair(
        a, k, spec,
        lambda n: unit_alpha(n, a, k, spec),
        lambda n: ONE if n == 0 else ZERO,
        name="unit-elliptic" if spec.nome else "unit",
    )


# ---------------------------------------------------------------- transforms

@dataclass
class TransformData:
    """Everything a transform needs at a fixed output point."""

    tag: str
    a_out: Monomial
    k_out: Monomial
    spec_out: FactorialSpec
    a_in: Monomial
    m: Monomial
    spec_in: FactorialSpec
    lift: Callable[[int], tuple]                      # r -> (j(r), L_r)
    source: Callable[[int], Optional[int]]           # n -> r with j(r) = n
    beta_terms: Callable[[int], Iterable[tuple]]     # n -> [(s, N_{n,s})]
    input_kernel: Optional[Callable] = None          # (s, r) -> M_in
    notes: dict = field(default_factory=dict)

    def output_kernel(self, n, r):
        return kernel_M(n, r, self.a_out, self.k_out, self.spec_out)

    def in_kernel(self, s, r):
        if self.input_kernel is not None:
            return self.input_kernel(s, r)
        return kernel_M(s, r, self.a_in, self.m, self.spec_in)


BASIC_ONLY = {"T2", "T2b", "T4"}
ELLIPTIC_TAGS = ("T1e", "T3e", "T5e", "Tnew1", "Tnew2")
BASIC_TAGS = ("T1", "T2", "T2b", "T3", "T4", "T5", "Tnew1", "Tnew2")
ALL_TAGS = ("T1", "T2", "T2b", "T3", "T4", "T5", "T1e", "T3e", "T5e", "Tnew1", "Tnew2")

# m as a function of the output data, for bookkeeping and error messages
M_FORMULA = {
    "T1": "bck/aq", "T1e": "bck/aq", "T2": "a^2q/k", "T2b": "a^2/k",
    "T3": "k/aq", "T3e": "k/aq", "T4": "k/a", "T5": "k^2/a", "T5e": "k^2/a",
    "Tnew1": "a^2/k", "Tnew2": "a/kq",
}


def _root(x, given=None, what="value") -> Monomial:
    x = _m(x)
    if given is not None:
        g = _m(given)
        if g * g != x:
            raise ConstraintViolation(f"declared root {g} of {what} does not square to {x}")
        return g
    try:
        return x.sqrt()
    except MissingRoot as exc:
        raise MissingRoot(f"{what} = {x} needs a rational square root") from exc


def _check_mode(tag: str, spec: FactorialSpec):
    if tag in BASIC_ONLY and not spec.basic:
        raise ConstraintViolation(f"{tag} holds only in the basic (p = 0) mode")
    if tag in ("T1", "T3", "T5") and not spec.basic:
        raise ConstraintViolation(f"{tag} is the basic tag; use {tag}e for nome p")


def _identity_lift(factor):
    return lambda r: (r, factor(r))


def transform_data(step: TransformStep, a, k, spec: FactorialSpec) -> TransformData:
    """Assemble the transform ``step`` for the output point ``(a, k; spec)``."""
    tag = step.tag
    if tag not in ALL_TAGS:
        raise ValueError(f"unknown transform tag {tag!r}")
    _check_mode(tag, spec)
    a, k = _m(a), _m(k)
    q = spec.q
    Q = Monomial(q)
    P = step.param

    if tag in ("T1", "T1e"):
        b, c = _m(P("b")), _m(P("c"))
        m = b * c * k / (a * q)
        aqb, aqc, mqb, mqc = a * q / b, a * q / c, m * q / b, m * q / c

        def lift(r):
            return r, qratio([b, c], [aqb, aqc], r, spec) * _pow(k / m, r)

        def beta_terms(n):
            pre = qratio([mqb, mqc], [aqb, aqc], n, spec)
            for r in range(n + 1):
                yield r, (
                    pre * theta_weight(m, 2 * r, spec)
                    * qratio([b, c], [mqb, mqc], r, spec)
                    * (qfact(k / m, n - r, spec) / qfact(Q, n - r, spec))
                    * (qfact(k, n + r, spec) / qfact(m * q, n + r, spec))
                    * _pow(k / m, r)
                )

        return TransformData(tag, a, k, spec, a, m, spec, lift, lambda n: n, beta_terms)

    if tag == "T2":
        m = a * a * q / k

        def lift(r):
            return r, qratio([m], [k], 2 * r, spec) * _pow(k / m, r)

        def beta_terms(n):
            for r in range(n + 1):
                yield r, (qfact(k / m, n - r, spec) / qfact(Q, n - r, spec)) * _pow(k / m, r)

        return TransformData(tag, a, k, spec, a, m, spec, lift, lambda n: n, beta_terms)

    if tag == "T2b":
        sigma = int(P("sigma", 1))
        if sigma not in (1, -1):
            raise ConstraintViolation("sigma must be +1 or -1")
        m = a * a / k
        s = _root(k, P("k_root"), "k")
        t = _m(P("m_root")) if P("m_root") is not None else a / s
        if t * t != m:
            raise ConstraintViolation("declared root of m does not square to m")
        one = ONE

        def lin(x: Monomial) -> NomeSeries:
            return one - x.series()

        def pre(n):
            return lin(s * sigma) / lin(s * sigma * q**n)

        def lift(r):
            return r, (
                pre(r) * (one + (t * sigma * q**r).series()) / (one + (t * sigma).series())
                * qratio([m], [k], 2 * r, spec) * _pow(k / m, r)
            )

        def beta_terms(n):
            p_n = pre(n)
            for r in range(n + 1):
                yield r, (
                    p_n * (one + (t * sigma * q**r).series()) / (one + (t * sigma).series())
                    * (qfact(k / m, n - r, spec) / qfact(Q, n - r, spec)) * _pow(k / m, r)
                )

        data = TransformData(tag, a, k, spec, a, m, spec, lift, lambda n: n, beta_terms)
        data.notes.update(k_root=str(s), m_root=str(t), sigma=sigma)
        return data

    if tag in ("T3", "T3e", "T4"):
        if spec.nome % 4:
            raise ConstraintViolation(f"{tag} output must live at nome p^2 (w-exponent divisible by 4)")
        ar = _root(a, P("a_root"), "a")
        qr = _root(Q, P("q_root"), "q")
        s_in = FactorialSpec(qr.coeff, spec.nome // 2, spec.order)
        qi = qr.coeff
        m = k / (ar * qi) if tag != "T4" else k / ar
        m2 = m * m

        def kernel_part(n, r):
            return (
                (qfact(k / m2, n - r, spec) / qfact(Q, n - r, spec))
                * (qfact(k, n + r, spec) / qfact(m2 * q, n + r, spec))
                * _pow(m / ar, n - r)
            )

        if tag == "T4":
            def lift(r):
                return r, (ONE + (ar * qi ** (2 * r)).series()) / (ONE + ar.series()) * NomeSeries.monomial(qi ** (-r))

            def beta_terms(n):
                pre = qratio([-m * qi], [-ar], 2 * n, s_in) * NomeSeries.monomial(qi ** (-n))
                for r in range(n + 1):
                    yield r, pre * theta_weight(m, 2 * r, s_in) * kernel_part(n, r)
        else:
            def lift(r):
                return r, ONE

            def beta_terms(n):
                pre = qratio([-m * qi], [-ar * qi], 2 * n, s_in)
                for r in range(n + 1):
                    yield r, pre * theta_weight(m, 2 * r, s_in) * kernel_part(n, r)

        data = TransformData(tag, a, k, spec, ar, m, s_in, lift, lambda n: n, beta_terms)
        data.notes.update(a_root=str(ar), q_root=str(qr))
        return data

    if tag in ("T5", "T5e"):
        m = k * k / a
        s_in = spec.with_base(q**2)

        def lift(r):
            return 2 * r, ONE

        def source(n):
            return n // 2 if n % 2 == 0 else None

        def beta_terms(n):
            pre = qratio([m * q], [a * q], n, s_in)
            for r in range(n // 2 + 1):
                yield r, (
                    pre * theta_weight(m, 4 * r, spec)
                    * (qfact(k / m, n - 2 * r, spec) / qfact(Q, n - 2 * r, spec))
                    * (qfact(k, n + 2 * r, spec) / qfact(m * q, n + 2 * r, spec))
                    * _pow(-k / a, n - 2 * r)
                )

        return TransformData(tag, a, k, spec, a, m, s_in, lift, source, beta_terms)

    if tag == "Tnew1":
        m = a * a / k
        s2 = spec.with_base(q**2)

        def lift(r):
            return r, qratio([m * q], [k * q], r, s2) * _pow(-a / m, r)

        def beta_terms(n):
            for r in range(n % 2, n + 1, 2):
                h, g = (n - r) // 2, (n + r) // 2
                yield r, (
                    theta_weight(m, 2 * r, spec)
                    * (qfact(k / m, h, s2) / qfact(Monomial(q**2), h, s2))
                    * (qfact(k, g, s2) / qfact(m * q**2, g, s2))
                    * _pow(-a / m, r)
                )

        return TransformData(tag, a, k, spec, a, m, spec, lift, lambda n: n, beta_terms)

    if tag == "Tnew2":
        if spec.nome % 4:
            raise ConstraintViolation("Tnew2 output must live at nome p^2 (w-exponent divisible by 4)")
        kr = _root(k, P("k_root"), "k")
        qr = _root(Q, P("q_root"), "q")
        qi = qr.coeff
        half = FactorialSpec(qi, spec.nome // 2, spec.order)
        m = a / (kr * qi)
        M = m * m
        Qh = Monomial(qi)

        def lift(r):
            return r, qratio([-m * qi], [-kr * qi], 2 * r, half) * _pow(a / (M * qi), r)

        def beta_terms(n):
            pre = theta(-kr, half) / theta(-kr * qi ** (2 * n), half) * NomeSeries.monomial(qi ** (-n))
            for r in range(n + 1):
                yield r, (
                    pre * theta_weight(M, 2 * r, spec)
                    * (qfact(kr / m, n - r, half) / qfact(Qh, n - r, half))
                    * (qfact(kr, n + r, half) / qfact(m * qi, n + r, half))
                    * _pow(a / M, r)
                )

        data = TransformData(tag, a, k, spec, a, M, spec, lift, lambda n: n, beta_terms)
        data.notes.update(k_root=str(kr), q_root=str(qr), m=str(m))
        return data

    raise AssertionError(tag)


def transformed_pair(data: TransformData, inner) -> WPPair:
    """Build the output pair of ``data`` from an input pair (or bibasic pair)."""
    get_alpha = inner.alpha if isinstance(inner, WPPair) else inner.A
    get_beta = inner.beta if isinstance(inner, WPPair) else inner.B

    def alpha(n):
        r = data.source(n)
        if r is None:
            return ZERO
        j, L = data.lift(r)
        assert j == n
        return L * get_alpha(r)

    def beta(n):
        total = ZERO
        for s, N in data.beta_terms(n):
            total = total + N * get_beta(s)
        return total

    prov = getattr(inner, "provenance", ())
    step = TransformStep(data.tag, derived_m=data.m)
    return WPPair(data.a_out, data.k_out, data.spec_out, alpha, beta,
                  provenance=prov + (step,), name=data.tag)


def _check_input(data: TransformData, inner: WPPair):
    if inner.a != data.a_in or inner.k != data.m or inner.spec.q != data.spec_in.q \
            or inner.spec.nome != data.spec_in.nome:
        raise ConstraintViolation(
            f"{data.tag} needs an input pair at (a={data.a_in}, m={data.m}, q={data.spec_in.q}, "
            f"nome=w^{data.spec_in.nome}) with m = {M_FORMULA[data.tag]}; got "
            f"(a={inner.a}, k={inner.k}, q={inner.spec.q}, nome=w^{inner.spec.nome})"
        )


def forward_output(step: TransformStep, inner: WPPair):
    """Output point ``(a, k, spec)`` and completed step for applying ``step`` to ``inner``."""
    tag = step.tag
    a, m, spec = inner.a, inner.k, inner.spec
    q = spec.q
    P = step.param
    if tag in ("T1", "T1e"):
        b, c = _m(P("b")), _m(P("c"))
        return a, a * q * m / (b * c), spec, step
    if tag == "T2":
        return a, a * a * q / m, spec, step
    if tag in ("T2b", "Tnew1"):
        return a, a * a / m, spec, step
    if tag in ("T3", "T3e", "T4"):
        k = m * a * q if tag != "T4" else m * a
        out = FactorialSpec(q * q, 2 * spec.nome, spec.order)
        return a * a, k, out, step.with_params(a_root=a, q_root=Monomial(q))
    if tag in ("T5", "T5e"):
        k = _m(P("k")) if P("k") is not None else _root(m * a, None, "m*a")
        if k * k != m * a:
            raise ConstraintViolation("T5 needs k^2 = m a")
        qr = _m(P("q_root")) if P("q_root") is not None else _root(Monomial(q), None, "q")
        if qr * qr != Monomial(q) or qr.exp:
            raise ConstraintViolation("declared root of the input base is wrong")
        return a, k, spec.with_base(qr.coeff), step
    if tag == "Tnew2":
        mr = _root(m, P("m_root"), "m")
        qr = _root(Monomial(q), P("q_root"), "q")
        kr = a / (mr * qr.coeff)
        return a, kr * kr, spec, step.with_params(k_root=kr, q_root=qr)
    raise ValueError(f"unknown transform tag {tag!r}")


def apply_transform(step: TransformStep, inner: WPPair, k=None) -> WPPair:
    """Apply a tree transformation to a concrete pair.

    With ``k`` given, the output parameter is fixed and the input must sit
    at the theorem's ``m``; otherwise the output point is solved from the
    input pair (taking declared or positive roots where needed).
    """
    if k is None:
        a_out, k_out, spec_out, step = forward_output(step, inner)
    else:
        if step.tag in ("T3", "T3e", "T4"):
            a_out = inner.a * inner.a
            spec_out = FactorialSpec(inner.q**2, 2 * inner.spec.nome, inner.spec.order)
            step = step.with_params(a_root=inner.a, q_root=Monomial(inner.q))
        elif step.tag in ("T5", "T5e"):
            qr = _m(step.param("q_root")) if step.param("q_root") is not None else _root(Monomial(inner.q), None, "q")
            a_out, spec_out = inner.a, inner.spec.with_base(qr.coeff)
        else:
            a_out, spec_out = inner.a, inner.spec
        k_out = _m(k)
    data = transform_data(step, a_out, k_out, spec_out)
    _check_input(data, inner)
    out = transformed_pair(data, inner)
    out.provenance = inner.provenance + (replace(step, derived_m=data.m),)
    return out


def build_path(steps, a, k, spec: FactorialSpec, root=None) -> WPPair:
    """Compose ``steps`` (outermost first) down to ``root`` (default: unit pair).

    Each step derives its input point from its output point, so the whole
    chain is fixed by the final ``(a, k; spec)``.
    """
    steps = list(steps)
    if not steps:
        return (root or unit_pair)(a, k, spec)
    step = steps[0]
    data = transform_data(step, a, k, spec)
    inner = build_path(steps[1:], data.a_in, data.m, data.spec_in, root)
    out = transformed_pair(data, inner)
    out.provenance = inner.provenance + (replace(step, derived_m=data.m),)
    return out


def kernel_identity_residuals(data: TransformData, n_max: int):
    """Yield ``(n, r, lhs, rhs)`` of ``sum_s N_{n,s} M_in_{s,r} = M_out_{n,j(r)} L_r``."""
    for n in range(n_max + 1):
        terms = list(data.beta_terms(n))
        r = 0
        while True:
            j, L = data.lift(r)
            if j > n:
                break
            lhs = ZERO
            for s, N in terms:
                if s >= r:
                    lhs = lhs + N * data.in_kernel(s, r)
            yield n, r, lhs, data.output_kernel(n, j) * L
            r += 1


# ---------------------------------------------------------------- verification

def verify_pair(pair: WPPair, n_max: int, name: Optional[str] = None, point=None) -> IdentityReport:
    """Recompute beta from alpha through the kernel and compare."""
    t0 = time.perf_counter()
    label = name or f"pair:{pair.path()}"
    pt = digest(point if point is not None else [str(x) for x in pair.base()])
    rep = IdentityReport(label, pt, pair.spec.order if pair.spec.nome else None, n_max, PASS)
    mods = []
    try:
        for n in range(n_max + 1):
            lhs = pair.beta(n)
            rhs = ZERO
            for r in range(n + 1):
                rhs = rhs + kernel_M(n, r, pair.a, pair.k, pair.spec) * pair.alpha(r)
            ok, mod = compare_sides(lhs, rhs)
            rep.checks += 1
            mods.append(mod)
            if not ok:
                rep.status = FAIL
                rep.first_failure = failure_data(f"n={n}", lhs, rhs, mod)
                rep.first_failure["n"] = n
                break
    except WPBaileyError as exc:
        rep.status = DEGENERATE
        rep.first_failure = {"error": type(exc).__name__, "message": str(exc)}
    finite = [m for m in mods if m is not None]
    rep.compared_mod = min(finite) if finite else None
    rep.ms = (time.perf_counter() - t0) * 1000
    return rep


def verify_bibasic(pair: BibasicPair, n_max: int):
    """Yield ``(n, B_n, sum_r M^(i)_{n,r} A_r)``."""
    for n in range(n_max + 1):
        rhs = ZERO
        for r in range(n + 1):
            rhs = rhs + kernel_bibasic(pair.i, n, r, pair.a, pair.k, pair.spec) * pair.A(r)
        yield n, pair.B(n), rhs


# ---------------------------------------------------------------- bibasic layer

def bibasic_closed_form(i: int, a, k, b, spec: FactorialSpec) -> BibasicPair:
    a, k, b = _m(a), _m(k), _m(b)
    q = spec.q
    si = spec.with_base(q**i)
    Qi = Monomial(q**i)

    def A(n):
        return (
            theta_weight(a, 2 * i * n, spec)
            * qratio([a, b, a / b], [Qi, a * q**i / b, b * q**i], n, si)
            * (qfact(a * q / k, i * n, spec) / qfact(k, i * n, spec))
            * NomeSeries.monomial((-1) ** n * q ** (-(i * (i - 1) // 2) * n * n))
            * _pow(-k / a, i * n)
        )

    def B(n):
        return qratio([b * k / a, k / b], [], n, spec) / qratio([a * q**i / b, b * q**i], [], n, si)

    return BibasicPair(i, a, k, spec, A, B, name=f"closed-form-i{i}")


def lift2_data(bp: BibasicPair, k) -> TransformData:
    """Bibasic ``i = 2`` pair at ``(a, m; q, p)`` -> WP pair at ``(a, k; q^2, p)``."""
    if bp.i != 2:
        raise ConstraintViolation("Lift2 needs a bibasic pair with i = 2")
    a, m, spec = bp.a, bp.k, bp.spec
    k = _m(k)
    q = spec.q
    s2 = spec.with_base(q**2)

    def lift(r):
        return r, (
            qratio([m * m * q / k], [a * k * q / (m * m)], r, s2)
            * NomeSeries.monomial(q ** (r * r)) * _pow(-a * k / (m * m), r)
        )

    def beta_terms(n):
        pre = qratio([m * m * q / a], [a * k * q / (m * m)], n, s2)
        for r in range(n + 1):
            yield r, (
                pre * theta_weight(m, 3 * r, spec)
                * (qfact(a * q / m, r, spec) / qfact(m * m * q / a, r, s2))
                * (qfact(m * m * q / k, r, s2) / qfact(k / m, r, spec))
                * (qfact(k / m, 2 * n - r, spec) / qfact(Monomial(q**2), n - r, s2))
                * (qfact(k, n + r, s2) / qfact(m * q, 2 * n + r, spec))
                * NomeSeries.monomial(q ** (r * (r - 1) // 2)) * _pow(k / m, r)
            )

    return TransformData(
        "Lift2", a, k, s2, a, m, spec, lift, lambda n: n, beta_terms,
        input_kernel=lambda s, r: kernel_bibasic(2, s, r, a, m, spec),
    )


def lift3_data(bp: BibasicPair, exponent_law: Callable[[int], Monomial]) -> TransformData:
    """Bibasic ``i = 3`` pair at ``(a, m; q, p)`` -> WP pair at ``(a, k; q^3, p)``, ``m^3 = ak``.

    ``exponent_law(n)`` supplies the monomial factor printed ambiguously next
    to ``q^{3n^2}`` in the alpha formula.
    """
    if bp.i != 3:
        raise ConstraintViolation("Lift3 needs a bibasic pair with i = 3")
    a, m, spec = bp.a, bp.k, bp.spec
    k = m**3 / a
    q = spec.q
    s3 = spec.with_base(q**3)

    def lift(r):
        return r, NomeSeries.monomial(q ** (3 * r * r)) * exponent_law(r).series()

    def beta_terms(n):
        for r in range(n + 1):
            yield r, (
                theta_weight(m, 4 * r, spec)
                * qratio([a * q / m], [m * m / a], 2 * r, spec)
                * (qfact(k / m, 3 * n - r, spec) / qfact(Monomial(q**3), n - r, s3))
                * (qfact(k, n + r, s3) / qfact(m * q, 3 * n + r, spec))
                * NomeSeries.monomial(q ** (2 * (r * (r - 1) // 2))) * _pow(k / m, r)
            )

    return TransformData(
        "Lift3", a, k, s3, a, m, spec, lift, lambda n: n, beta_terms,
        input_kernel=lambda s, r: kernel_bibasic(3, s, r, a, m, spec),
    )


def lift_bibasic(step: str, bp: BibasicPair, k=None, exponent_law=None) -> WPPair:
    if step in ("Lift2", "lift2"):
        if k is None:
            raise ConstraintViolation("Lift2 needs the output parameter k")
        data = lift2_data(bp, k)
    elif step in ("Lift3", "lift3"):
        if exponent_law is None:
            raise ConstraintViolation("Lift3 needs an exponent law (see exponent_probe)")
        data = lift3_data(bp, exponent_law)
    else:
        raise ValueError(f"unknown lift {step!r}")
    out = transformed_pair(data, bp)
    out.name = data.tag
    return out
