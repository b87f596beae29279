import random
from fractions import Fraction

import pytest

from wpbailey.arith import Monomial, NomeSeries, rat
from wpbailey.errors import ConstraintViolation, DivisionByZeroSeries
from wpbailey.qobjects import FactorialSpec, qratio
from wpbailey.series import (
    SeriesSpec, classify, eval_phi, eval_w, jackson_basic, lemma1_lhs, phi, sum_elliptic_jackson,
    sum_lemma1, terminating_index, vsum, wsum,
)


def naive_phi(num, den, z, q):
    def poch(x, k):
        out = Fraction(1)
        for j in range(k):
            out *= 1 - x * q**j
        return out

    n = next(k for k in range(50) for x in num if x == q**-k)
    total = Fraction(0)
    for k in range(n + 1):
        t = z**k
        for x in num:
            t *= poch(x, k)
        t /= poch(q, k)
        for y in den:
            t /= poch(y, k)
        total += t
    return total


def test_phi_against_naive_sum():
    rng = random.Random(3)
    for _ in range(15):
        q = Fraction(rng.randint(2, 7), rng.randint(1, 7))
        if q == 1:
            continue
        n = rng.randint(0, 5)
        num = [Fraction(rng.randint(-9, 9) or 2, rng.randint(1, 9)) for _ in range(2)] + [q**-n]
        den = [Fraction(rng.randint(-9, 9) or 3, rng.randint(1, 9)) * q**7 for _ in range(2)]
        z = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        got = phi([rat(x) for x in num], [rat(y) for y in den], rat(z), FactorialSpec(rat(q)))
        assert got == NomeSeries.monomial(rat(naive_phi(num, den, z, q)))


def test_q_chu_vandermonde():
    q, a, c = rat(2, 5), rat(3, 7), rat(5, 4)
    spec = FactorialSpec(q)
    for n in range(6):
        lhs = phi([a, Monomial(q**-n)], [c], q, spec)
        rhs = qratio([c / a], [Monomial(c)], n, spec) * NomeSeries.monomial(a**n)
        assert lhs == rhs


def test_w_matches_full_phi_form():
    q = rat(3, 5)
    spec = FactorialSpec(q)
    r = rat(2, 3)
    a = r * r
    params = [rat(5, 7), rat(-4, 3), Monomial(q**-3)]
    s = SeriesSpec.w(a, params, rat(1, 2), spec, a1_root=r)
    num, den = s.full_parameters()
    assert eval_w(s) == phi(num, den, rat(1, 2), spec)


def test_jackson_8phi7_at_random_balanced_points():
    rng = random.Random(4)
    q = rat(2, 7)
    for n in range(5):
        a, b, c, d = (rat(rng.randint(2, 9), rng.randint(1, 9)) for _ in range(4))
        e = a * a * q ** (n + 1) / (b * c * d)
        lhs = wsum(a, [b, c, d, e, Monomial(q**-n)], q, FactorialSpec(q))
        assert lhs == jackson_basic(a, b, c, d, e, n, q)


def test_elliptic_jackson_and_constraint():
    spec = FactorialSpec(rat(2, 3), 2, 12)
    a, b, c, d = rat(3, 5), rat(7, 2), rat(-2, 9), rat(5, 4)
    n = 2
    e = a * a * spec.q ** (n + 1) / (b * c * d)
    assert vsum(a, [b, c, d, e, Monomial(spec.q**-n)], spec) == sum_elliptic_jackson(a, b, c, d, e, n, spec)
    with pytest.raises(ConstraintViolation):
        sum_elliptic_jackson(a, b, c, d, 2 * e, n, spec)


def test_v_at_zero_nome_is_w_with_argument_q():
    spec = FactorialSpec(rat(2, 3), 2, 12)
    params = [rat(3, 7), rat(5, 2), Monomial(spec.q**-3)]
    v = vsum(rat(4, 5), params, spec)
    w = wsum(rat(4, 5), params, spec.q, FactorialSpec(spec.q))
    assert NomeSeries.monomial(v.constant_term()) == w


def test_classify_balanced_vwp():
    q = rat(2, 7)
    spec = FactorialSpec(q, 2, 12)
    a, b, c, d = rat(3), rat(5), rat(7), rat(11)
    n = 2
    e = a * a * q ** (n + 1) / (b * c * d)
    s = SeriesSpec.v(a, [b, c, d, e, Monomial(q**-n)], spec)
    assert classify(s).balanced and classify(s).very_well_poised
    s2 = SeriesSpec.v(a, [b, c, d, 2 * e, Monomial(q**-n)], spec)
    assert not classify(s2).balanced


def test_terminating_index():
    q = rat(1, 3)
    assert terminating_index([rat(5), Monomial(q**-4)], q) == 4
    with pytest.raises(ValueError):
        terminating_index([rat(5), rat(7)], q)


def test_zero_over_zero_term_is_degenerate():
    # a q = 1 makes (aq;q)_k and (a;q)_k vanish together
    with pytest.raises(DivisionByZeroSeries):
        lemma1_lhs(rat(3), rat(-7, 5), rat(7, 5), 2, rat(1, 3))


def test_lemma1_needs_its_constraint():
    with pytest.raises(ConstraintViolation):
        sum_lemma1(rat(2), rat(3), rat(5), 2, rat(1, 3))
    a, b, q = rat(2, 3), rat(5, 7), rat(3, 4)
    for n in range(5):
        for c in (-a * b * q, a * a * q / b):
            assert lemma1_lhs(a, b, c, n, q) == NomeSeries.monomial(sum_lemma1(a, b, c, n, q))


def test_phi_spec_roundtrip():
    s = SeriesSpec.phi([rat(2), Monomial(rat(9))], [rat(5)], rat(1, 3), FactorialSpec(rat(1, 3)))
    assert s.terminating_index == 2
    assert eval_phi(s) == phi([rat(2), Monomial(rat(9))], [rat(5)], rat(1, 3), FactorialSpec(rat(1, 3)))
