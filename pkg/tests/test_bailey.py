import random
from fractions import Fraction

import pytest

from wpbailey.arith import Monomial, NomeSeries, rat
from wpbailey.bailey import (
    TransformStep, WPPair, apply_transform, backward, bibasic_closed_form, build_path, forward,
    kernel_bibasic, kernel_identity_residuals, kernel_M, kernel_Mtilde, lift_bibasic, pair_from_alpha,
    transform_data, unit_pair, verify_pair, verify_bibasic,
)
from wpbailey.errors import ConstraintViolation
from wpbailey.qobjects import FactorialSpec

BASIC = FactorialSpec(rat(4, 9))
ELL = FactorialSpec(rat(4, 9), 2, 12)
A, K = Monomial(rat(9, 25)), Monomial(rat(49, 16))


def poch(x, k, q):
    out = Fraction(1)
    for j in range(k):
        out *= 1 - x * q**j
    return out


def test_kernel_example_against_product_oracle():
    a, k, q = Fraction(4), Fraction(2), Fraction(3)
    want = poch(k / a, 1, q) / poch(q, 1, q) * poch(k, 1, q) / poch(a * q, 1, q)
    assert want == Fraction(-1, 44)
    assert kernel_M(1, 0, 4, 2, FactorialSpec(3)) == NomeSeries.monomial(rat(-1, 44))
    assert kernel_M(0, 0, 4, 2, FactorialSpec(3)) == NomeSeries.one()


def test_unit_alpha_example():
    a, k, q = Fraction(4), Fraction(2), Fraction(3)
    want = (1 - a * q * q) * (1 - a / k) * k / ((1 - q) * (1 - k * q) * a)
    assert want == Fraction(7, 4)
    pair = unit_pair(4, 2, FactorialSpec(3))
    assert pair.alpha(1) == NomeSeries.monomial(rat(7, 4))
    assert backward(WPPair(4, 2, FactorialSpec(3), pair.alpha, lambda n: NomeSeries.one() if n == 0
                           else NomeSeries.zero()), 1)[1] == pair.alpha(1)


@pytest.mark.parametrize("spec", [BASIC, ELL], ids=["basic", "elliptic"])
def test_unit_pair_forward_is_delta(spec):
    pair = unit_pair(A, K, spec)
    betas = forward(pair, 5 if spec.nome else 6)
    assert betas[0] == NomeSeries.one()
    assert all(b.is_zero() for b in betas[1:])


@pytest.mark.parametrize("spec", [BASIC, ELL], ids=["basic", "elliptic"])
def test_backward_inverts_forward_on_random_alpha(spec):
    rng = random.Random(5)
    vals = [NomeSeries.monomial(rat(rng.randint(-9, 9), rng.randint(1, 9))) for _ in range(6)]
    pair = pair_from_alpha(A, K, spec, lambda n: vals[n])
    recovered = backward(WPPair(A, K, spec, lambda n: vals[n], pair.beta), 5)
    assert recovered == vals


def test_forward_is_linear_and_kills_zero():
    rng = random.Random(6)
    x = [NomeSeries.monomial(rat(rng.randint(1, 9), rng.randint(1, 9))) for _ in range(5)]
    y = [NomeSeries.monomial(rat(rng.randint(1, 9), rng.randint(1, 9))) for _ in range(5)]
    fx = forward(WPPair(A, K, BASIC, lambda n: x[n], None), 4)
    fy = forward(WPPair(A, K, BASIC, lambda n: y[n], None), 4)
    fs = forward(WPPair(A, K, BASIC, lambda n: x[n] + y[n], None), 4)
    assert fs == [u + v for u, v in zip(fx, fy)]
    assert all(b.is_zero() for b in forward(WPPair(A, K, BASIC, lambda n: NomeSeries.zero(), None), 4))


def test_mtilde_inverts_m():
    for n in range(5):
        for r in range(n + 1):
            tot = NomeSeries.zero()
            for s in range(r, n + 1):
                tot = tot + kernel_Mtilde(n, s, A, K, ELL) * kernel_M(s, r, A, K, ELL)
            assert tot == (NomeSeries.one() if n == r else NomeSeries.zero())


def test_corrupted_beta_fails_at_index_two():
    pair = build_path([TransformStep("T1").with_params(b=rat(5, 7), c=rat(2, 3))], A, K, BASIC)
    assert not pair.beta(2).is_zero()
    bad = WPPair(A, K, BASIC, pair.alpha, lambda n: pair.beta(n) * BASIC.q if n == 2 else pair.beta(n))
    rep = verify_pair(bad, 4)
    assert rep.status == "fail" and rep.first_failure["n"] == 2


def test_verify_pair_passes_for_unit_pair():
    assert verify_pair(unit_pair(A, K, BASIC), 6).status == "pass"
    assert verify_pair(unit_pair(A, K, ELL), 4).status == "pass"


def _t2b(sigma, kr, mr):
    step = TransformStep("T2b").with_params(sigma=sigma, k_root=kr, m_root=mr)
    return build_path([step], A, K, BASIC)


def test_t2b_sigma_negation_invariance():
    kr = Monomial(rat(7, 4))
    mr = A / kr
    p1, p2 = _t2b(1, kr, mr), _t2b(-1, -kr, -mr)
    for n in range(5):
        assert p1.alpha(n) == p2.alpha(n)
        assert p1.beta(n) == p2.beta(n)
    assert verify_pair(p1, 5).status == "pass"


def test_t2b_needs_matched_roots():
    kr = Monomial(rat(7, 4))
    assert verify_pair(_t2b(1, kr, -A / kr), 4).status == "fail"


def test_t3e_base_bookkeeping():
    inner = unit_pair(Monomial(rat(2, 7)), Monomial(rat(7, 3)), FactorialSpec(rat(3, 5), 2, 12))
    out = apply_transform(TransformStep("T3e"), inner)
    assert out.base() == (Monomial(rat(4, 49)), Monomial(rat(2, 5)), rat(9, 25), 4)
    assert out.provenance[-1].derived_m == inner.k
    assert verify_pair(out, 4).status == "pass"


@pytest.mark.parametrize("tag,spec", [("T5", FactorialSpec(rat(4, 9))), ("T5e", FactorialSpec(rat(4, 9), 2, 12))])
def test_t5_odd_alpha_vanishes(tag, spec):
    pair = build_path([TransformStep(tag)], A, K, spec)
    for n in (1, 3, 5):
        assert pair.alpha(n) == NomeSeries.zero()
    assert verify_pair(pair, 5).status == "pass"


@pytest.mark.parametrize("tag", ["T1", "T3", "T5"])
def test_elliptic_transforms_reduce_to_basic_at_zero_nome(tag):
    etag = tag + "e"
    b, c = Monomial(rat(5, 7)), Monomial(rat(-3, 2))
    nome = 4 if tag == "T3" else 2
    a = A * A if tag == "T3" else A

    def make(t, spec):
        step = TransformStep(t)
        if t.startswith("T1"):
            step = step.with_params(b=b, c=c)
        return build_path([step], a, K, spec)

    ell = make(etag, FactorialSpec(rat(16, 81), nome, 12))
    bas = make(tag, FactorialSpec(rat(16, 81)))
    for n in range(4):
        assert NomeSeries.monomial(ell.alpha(n).constant_term()) == bas.alpha(n)
        assert NomeSeries.monomial(ell.beta(n).constant_term()) == bas.beta(n)


def test_apply_transform_rejects_wrong_input():
    inner = unit_pair(A, K, BASIC)
    with pytest.raises(ConstraintViolation):
        apply_transform(TransformStep("T2"), inner, k=Monomial(rat(3)))
    with pytest.raises(ConstraintViolation):
        transform_data(TransformStep("T2"), A, K, ELL)


def test_kernel_identity_for_every_basic_tag():
    for tag in ("T1", "T2", "T2b", "Tnew1"):
        step = TransformStep(tag).with_params(b=rat(5, 7), c=rat(2, 3)) if tag == "T1" else TransformStep(tag)
        data = transform_data(step, A, K, BASIC)
        for n, r, lhs, rhs in kernel_identity_residuals(data, 4):
            assert lhs == rhs, (tag, n, r)


def test_depth_three_elliptic_path():
    b, c = Monomial(rat(5, 7)), Monomial(rat(2, 3))
    steps = [TransformStep("T1e").with_params(b=b, c=c), TransformStep("T3e"),
             TransformStep("T1e").with_params(b=c, c=b)]
    pair = build_path(steps, A * A, K, FactorialSpec(rat(16, 81), 4, 12))
    assert pair.path() == "T1e,T3e,T1e"
    assert verify_pair(pair, 4).status == "pass"


def test_bibasic_closed_form():
    b = Monomial(rat(2, 3))
    one = bibasic_closed_form(1, A, K, b, ELL)
    assert verify_pair(WPPair(A, K, ELL, one.A, one.B), 5).status == "pass"
    two = bibasic_closed_form(2, A, K, b, ELL)
    assert two.A(0) == NomeSeries.one() and two.B(0) == NomeSeries.one()
    for i in (2, 3):
        for n, lhs, rhs in verify_bibasic(bibasic_closed_form(i, A, K, b, ELL), 4):
            assert lhs == rhs, (i, n)
    assert kernel_bibasic(1, 3, 1, A, K, ELL) == kernel_M(3, 1, A, K, ELL)


def test_lifts():
    m, b = Monomial(rat(7, 5)), Monomial(rat(2, 3))
    two = bibasic_closed_form(2, A, m, b, ELL)
    assert verify_pair(lift_bibasic("Lift2", two, k=K), 4).status == "pass"
    three = bibasic_closed_form(3, A, m, b, ELL)
    law = lambda n: A ** n  # noqa: E731 -- survivor of the exponent probe
    assert verify_pair(lift_bibasic("Lift3", three, exponent_law=law), 3).status == "pass"
    with pytest.raises(ConstraintViolation):
        lift_bibasic("Lift3", three)
    with pytest.raises(ConstraintViolation):
        lift_bibasic("Lift2", three, k=K)
