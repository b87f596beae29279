import pytest

from wpbailey.arith import Monomial
from wpbailey.harness import negative_control, run_case
from wpbailey.identities import REGISTRY, elliptic, kernel_suite, mono, qratio, W
from wpbailey.report import compare_sides


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_identity_passes(name):
    reports = run_case(REGISTRY[name], seed=0)
    assert reports
    for rep in reports:
        assert rep.status == "pass", rep.to_dict()


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_negative_control_fails(name):
    rep = negative_control(REGISTRY[name], seed=0)
    assert rep.status == "fail", rep.to_dict()


@pytest.mark.parametrize("name", ["thm-1413c", "elliptic-jackson", "lemma2"])
def test_second_seed(name):
    assert all(r.status == "pass" for r in run_case(REGISTRY[name], seed=1))


def test_registry_covers_every_key():
    expected = {
        "wp-inverse", "wp-inverse-elliptic", "rogers-delta", "lemma1-minus", "lemma1-square", "lemma2",
        "elliptic-jackson", "theta-quotient", "theta-square", "fact-ratio-squares", "sm-shifts", "v-to-w",
        "unit-pair", "unit-pair-elliptic", "spiridonov-pair", "thm-1413b", "thm-1413b-limit", "thm-1413c",
        "thm-1413c-limit", "w12-nearly-poised", "w12-bailey-109", "new-bibasic-sum", "nr-limit",
        "v14-lambda", "exotic-pair", "v12-transformation", "bibasic-def-i2", "bibasic-def-i3",
        "bibasic-closed-form", "lift2", "lift3-probe",
    }
    assert expected <= set(REGISTRY)
    assert all(case.control for case in REGISTRY.values())


def test_thm1413c_checks_both_signs_of_d():
    case = REGISTRY["thm-1413c"]
    labels = [lab for lab, _, _ in case.sides(case.sample(0, 0), 2, 16)]
    assert "d=+m(q/a)^1/2" in labels and "d=-m(q/a)^1/2" in labels


def test_d_substitution_needs_base_q_denominators():
    case = REGISTRY["thm-1413c"]
    pt = case.sample(0, 0)
    q = pt.q
    s1 = elliptic(pt, 16)
    s2 = s1.with_base(q * q)
    a, m, d = pt["a"], pt["m"], pt["d"]
    n = 2
    lhs = qratio([m * m * q / a], [a * q], n, s2) * mono(-m / a, n)
    num = [d, -d, d * W, -d / W]
    den = [m * q / d, -m * q / d, m * q / (d * W), -m * q * W / d]
    assert compare_sides(lhs, qratio(num, den, n, s1))[0]
    assert not compare_sides(lhs, qratio(num, den, n, s2))[0]


def test_kernel_suite():
    reports = kernel_suite(3)
    names = {r.identity for r in reports}
    assert {"NMML", "NMML2", "NMMe", "NMM2e", "wp-inverse", "wp-inverse-elliptic"} <= names
    assert all(r.status == "pass" for r in reports)
    assert isinstance(Monomial(1), Monomial)
