import random
from fractions import Fraction

import pytest

from wpbailey.arith import Monomial, NomeSeries, rat
from wpbailey.qobjects import (
    FactorialSpec, qfact, qfact_shift, qratio, theta, theta_shift_quotient, theta_weight,
)


def naive_theta(c: Fraction, e: int, order: int) -> dict:
    """prod_j (1 - c w^(e+2j)) (1 - w^(2j+2-e)/c) modulo w^order, for e in {0, 1}."""
    poly = {0: Fraction(1)}

    def times(coeff, exp):
        out = dict(poly)
        for k, v in poly.items():
            if k + exp < order:
                out[k + exp] = out.get(k + exp, 0) - coeff * v
        return out

    for j in range(order):
        if e + 2 * j < order:
            if e + 2 * j == 0:
                poly = {k: v * (1 - c) for k, v in poly.items()}
            else:
                poly = times(c, e + 2 * j)
        if 2 * j + 2 - e < order:
            poly = times(1 / c, 2 * j + 2 - e)
    return {k: v for k, v in poly.items() if v}


def as_dict(s):
    return {e: Fraction(int(c.numerator), int(c.denominator)) for e, c in s.terms()}


def test_theta_of_two_mod_w4():
    s = theta(2, FactorialSpec(3, 2, 4))
    assert s == NomeSeries.from_dict({0: -1, 2: rat(5, 2)}, 4)


def test_theta_of_one_vanishes():
    assert theta(1, FactorialSpec(3, 2, 12)).is_zero()


@pytest.mark.parametrize("e", [0, 1])
def test_theta_against_naive_product(e):
    rng = random.Random(e)
    for _ in range(10):
        c = Fraction(rng.choice([-1, 1]) * rng.randint(2, 9), rng.randint(1, 9))
        if abs(c) == 1:
            continue
        s = theta(Monomial(rat(c), e), FactorialSpec(rat(1, 3), 2, 12))
        assert s.order == 12
        assert as_dict(s) == naive_theta(c, e, 12)


def test_theta_inversion():
    rng = random.Random(1)
    spec = FactorialSpec(rat(2, 5), 2, 12)
    for _ in range(20):
        z = Monomial(rat(rng.randint(2, 9), rng.randint(1, 9)) * rng.choice([-1, 1]), rng.randint(-2, 2))
        assert theta(z, spec) == (-z).series() * theta(1 / z, spec)


def test_theta_basic_mode_is_linear():
    assert theta(rat(2, 3), FactorialSpec(5)) == NomeSeries.monomial(rat(1, 3))


def test_basic_factorial_example():
    assert qfact(2, 2, FactorialSpec(3)) == NomeSeries.monomial(5)


def test_basic_factorial_against_product_oracle():
    rng = random.Random(2)
    for _ in range(30):
        a = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9))
        q = Fraction(rng.randint(2, 9), rng.randint(1, 9))
        if q == 1:
            continue
        n = rng.randint(-4, 6)
        if n >= 0:
            want = Fraction(1)
            for j in range(n):
                want *= 1 - a * q**j
        else:
            den = Fraction(1)
            for j in range(-n):
                den *= 1 - a * q ** (n + j)
            if den == 0:
                continue
            want = 1 / den
        got = qfact(Monomial(rat(a)), n, FactorialSpec(rat(q)))
        assert got == NomeSeries.monomial(rat(want))


def test_negative_index_convention():
    spec = FactorialSpec(rat(2, 7), 2, 12)
    a = Monomial(rat(3, 5))
    for n in range(1, 4):
        assert qfact(a, -n, spec) * qfact(a * spec.q ** (-n), n, spec) == NomeSeries.one()


def test_squared_nome_split():
    spec = FactorialSpec(rat(3, 4), 2, 12)
    a = Monomial(rat(2, 5))
    for n in range(4):
        assert qfact(a * a, n, spec.squared()) == qfact(a, n, spec) * qfact(-a, n, spec)


def test_theta_weight_matches_shift_quotient():
    spec = FactorialSpec(rat(3, 4), 2, 12)
    a = Monomial(rat(2, 5))
    for k in range(4):
        assert theta_weight(a, 2 * k, spec) == theta_shift_quotient(a, k, spec)


def test_shift_rules():
    spec = FactorialSpec(rat(3, 4), 2, 12)
    a = Monomial(rat(-2, 5))
    for n in range(4):
        for k in range(4):
            assert qfact_shift(a, n, k, spec, "add") == qfact(a, n + k, spec)
            if k <= n:
                assert qfact_shift(a, n, k, spec, "subtract") == qfact(a, n - k, spec)


def test_qratio_is_quotient():
    spec = FactorialSpec(rat(3, 4), 2, 12)
    x, y = Monomial(rat(2, 5)), Monomial(rat(7, 3), 1)
    assert qratio([x], [y], 3, spec) == qfact(x, 3, spec) / qfact(y, 3, spec)


def test_spec_validation():
    for bad in (0, 1, -1):
        with pytest.raises(ValueError):
            FactorialSpec(bad)
    with pytest.raises(ValueError):
        FactorialSpec(2, 3)
