import pytest

from wpbailey.arith import Monomial, NomeSeries, rat
from wpbailey.errors import ConstraintViolation, DivisionByZeroSeries, MissingRoot, SamplingExhausted
from wpbailey.harness import (
    MAX_RESAMPLES, Constraint, IdentityCase, ParamPoint, aggregate, default_laws, enumerate_paths,
    exponent_probe, parse_step, path_mode, run_case, run_identity, run_tree, sample_point,
)
from wpbailey.report import IdentityReport

PRODUCT = Constraint("c", lambda v: v["a"] * v["b"], "c = ab")


def test_param_point_validation():
    with pytest.raises(ConstraintViolation):
        ParamPoint({"a": Monomial(2)}, 1)
    with pytest.raises(ConstraintViolation):
        ParamPoint({"a": Monomial(0)}, 2)
    with pytest.raises(ConstraintViolation):
        ParamPoint({"a": Monomial(4)}, 2, {"a": rat(3)})
    pt = ParamPoint({"a": Monomial(4)}, rat(1, 2), {"a": rat(-2)})
    assert pt.root("a") == Monomial(-2)
    with pytest.raises(MissingRoot):
        pt.root("b")
    assert pt["q"] == Monomial(rat(1, 2))


def test_replace_drops_stale_roots():
    pt = ParamPoint({"a": Monomial(4)}, rat(1, 2), {"a": rat(2)})
    new = pt.replace(a=rat(5))
    assert new["a"] == Monomial(5) and "a" not in new.declared_roots


def test_sampling_is_seeded_and_satisfies_constraints():
    p1 = sample_point(3, [PRODUCT], ["a"], ("a", "b"), key="x")
    p2 = sample_point(3, [PRODUCT], ["a"], ("a", "b"), key="x")
    assert p1.describe() == p2.describe()
    assert p1["c"] == p1["a"] * p1["b"]
    assert p1.root("a") ** 2 == p1["a"]
    assert p1.describe() != sample_point(4, [PRODUCT], ["a"], ("a", "b"), key="x").describe()


def test_derived_roots_and_exhaustion():
    neg = Constraint("a", lambda v: -v["s"] ** 2, "a = -s^2")
    with pytest.raises(SamplingExhausted):
        sample_point(0, [neg], ["a"], ("s",), key="neg")
    sq = Constraint("a", lambda v: v["s"] ** 2, "a = s^2")
    pt = sample_point(0, [sq], ["a"], ("s",), key="sq")
    assert pt.root("a") ** 2 == pt["a"]


def _case(sides, **kw):
    return IdentityCase("toy", "toy", sides, ("a", "b"), (PRODUCT,), **kw)


def test_run_identity_pass_fail_and_control():
    def sides(pt, n, order, perturbed=False):
        lhs = pt["a"] * pt["b"]
        rhs = pt["c"] * (2 if perturbed else 1)
        return [("c", lhs.series(), rhs.series())]

    case = _case(sides, n_max=2)
    pt = case.sample(0, 0)
    assert run_identity(case, pt).status == "pass"
    assert run_identity(case, pt, perturbed=True).status == "fail"
    with pytest.raises(ConstraintViolation):
        run_identity(case, pt.replace(c=rat(7)))


def test_degenerate_points_are_redrawn():
    calls = []

    def sides(pt, n, order, perturbed=False):
        calls.append(pt.attempt)
        if pt.attempt < 2:
            raise DivisionByZeroSeries("synthetic pole")
        return [("one", NomeSeries.one(), NomeSeries.one())]

    rep = run_case(_case(sides, n_max=0), points=1)[0]
    assert rep.status == "pass" and rep.notes["resampled"] == 2


def test_always_degenerate_case_reports_degenerate():
    def sides(pt, n, order, perturbed=False):
        raise ZeroDivisionError("always")

    rep = run_case(_case(sides, n_max=0), points=1)[0]
    assert rep.status == "degenerate"
    assert rep.notes["resampled"] == MAX_RESAMPLES - 1


def test_vacuous_truncation_is_a_failure():
    def sides(pt, n, order, perturbed=False):
        s = NomeSeries([1], 0, order=2)
        return [("short", s, s)]

    case = _case(sides, n_max=0, elliptic=True)
    assert run_identity(case, case.sample(0, 0)).status == "fail"


def test_paths_and_modes():
    assert len(enumerate_paths(1, "basic")) == 9
    assert len(enumerate_paths(1, "elliptic")) == 5
    assert len(enumerate_paths(2, "elliptic")) == 25
    assert parse_step("T2b-").param("sigma") == -1
    assert path_mode(["Tnew1"]) == "basic"
    assert path_mode(["T3e", "Tnew2"]) == "elliptic"
    with pytest.raises(ConstraintViolation):
        path_mode(["T1", "T3e"])
    with pytest.raises(ValueError):
        parse_step("T9")


def test_run_tree_records_every_node():
    rep = run_tree(["T1e", "T3e", "T1e"], n_max=4, order=12)
    assert rep.status == "pass"
    assert [n["path"] for n in rep.notes["nodes"]] == ["unit", "T1e", "T1e,T3e", "T1e,T3e,T1e"]
    assert run_tree(["T1", "T5e"]).status == "fail"


def test_tree_is_deterministic():
    a = run_tree(["Tnew2", "T2b-"], seed=9).to_dict(timing=False)
    b = run_tree(["Tnew2", "T2b-"], seed=9).to_dict(timing=False)
    assert a == b


def test_exponent_probe_finds_a_unique_law():
    res = exponent_probe()
    assert res["unique"] == "a^n"
    literal = next(r for r in res["results"] if r["law"].startswith("a^r"))
    assert literal["status"] == "ill-formed"
    assert len(default_laws()) == res["candidates"]


def test_aggregate_is_order_independent():
    reps = [IdentityReport(n, p, None, 1, "pass") for n, p in [("b", "2"), ("a", "9"), ("b", "1")]]
    assert [(r.identity, r.point) for r in aggregate(reps)] == [("a", "9"), ("b", "1"), ("b", "2")]
    assert aggregate(reps) == aggregate(reversed(reps))
