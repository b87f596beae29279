"""Point sampling, identity runs, limit checks, tree runs and the Lift3 probe.

Every identity is tested at exact rational points.  A point is drawn from a
string-seeded ``random.Random`` so runs are reproducible; equality
constraints are solved by elimination and square roots are realized by
sampling the root and squaring it.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from .arith import Monomial, NomeSeries, Rat, rat, series_constant_term
from .bailey import (
    ALL_TAGS, BASIC_TAGS, ELLIPTIC_TAGS, TransformStep, apply_transform,
    bibasic_closed_form, lift3_data, transformed_pair, unit_pair, verify_pair,
)
from .errors import (
    ConstraintViolation, DivisionByZeroSeries, InsufficientTruncation, MissingRoot,
    PoleAtZeroNome, SamplingExhausted,
)
from .qobjects import FactorialSpec
from .report import DEGENERATE, FAIL, PASS, IdentityReport, compare_sides, digest, failure_data

MAX_RESAMPLES = 20
SAMPLE_HEIGHT = 7


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class ParamPoint:
    """An exact specialization of the free symbols of an identity.

    ``declared_roots[x]`` is a square root of ``assignments[x]`` (or of ``q``
    when ``x == "q"``), checked at construction.
    """

    assignments: Mapping[str, Monomial]
    q: Rat
    declared_roots: Mapping[str, Rat] = field(default_factory=dict)
    seed: int = 0
    attempt: int = 0

    def __post_init__(self):
        q = rat(self.q)
        object.__setattr__(self, "q", q)
        if q in (0, 1, -1):
            raise ConstraintViolation(f"q = {q} is degenerate")
        for name, val in self.assignments.items():
            if Monomial.coerce(val).is_zero():
                raise ConstraintViolation(f"{name} = 0")
        for name, r in self.declared_roots.items():
            target = self[name]
            if Monomial.coerce(r) ** 2 != target:
                raise ConstraintViolation(f"declared root {r} of {name} does not square to {target}")

    def __getitem__(self, name: str) -> Monomial:
        if name == "q":
            return Monomial(self.q)
        return Monomial.coerce(self.assignments[name])

    def __contains__(self, name):
        return name == "q" or name in self.assignments

    def root(self, name: str) -> Monomial:
        try:
            return Monomial.coerce(self.declared_roots[name])
        except KeyError:
            raise MissingRoot(f"no declared root for {name}") from None

    def replace(self, **values) -> "ParamPoint":
        """Copy with some symbols overwritten; constraints are not re-solved."""
        new = dict(self.assignments)
        for k, v in values.items():
            new[k] = Monomial.coerce(v)
        roots = {k: r for k, r in self.declared_roots.items() if k not in values}
        return ParamPoint(new, self.q, roots, self.seed, self.attempt)

    def describe(self) -> dict:
        d = {"q": str(self.q)}
        for k in sorted(self.assignments):
            d[k] = str(self.assignments[k])
        for k in sorted(self.declared_roots):
            d[f"sqrt({k})"] = str(self.declared_roots[k])
        return d

    def digest(self) -> str:
        return digest(self.describe())


@dataclass(frozen=True)
class Constraint:
    """``symbol = formula(point)``, solved by elimination."""

    symbol: str
    formula: Callable[[Mapping[str, Monomial]], Monomial]
    text: str = ""


class _View(dict):
    def __missing__(self, key):
        raise KeyError(f"constraint refers to unknown symbol {key!r}")


def _sample_rat(rng: random.Random, positive=False) -> Rat:
    while True:
        x = rat(rng.randint(1, SAMPLE_HEIGHT), rng.randint(1, SAMPLE_HEIGHT))
        if not positive and rng.random() < 0.5:
            x = -x
        if x not in (1, -1):
            return x


def sample_point(seed: int, constraints: Sequence[Constraint] = (), required_roots: Sequence[str] = (),
                 free: Sequence[str] = (), key: str = "", attempt: int = 0,
                 check: Optional[Callable[[ParamPoint], Any]] = None,
                 positive: Sequence[str] = (), max_tries: int = MAX_RESAMPLES) -> ParamPoint:
    """Draw a point satisfying ``constraints`` with the required roots declared.

    Free symbols listed in ``required_roots`` (and ``q``) are sampled as
    squares of a sampled root.  A derived symbol listed there must come out
    as a square; otherwise the draw is rejected.  ``check`` may raise a
    degeneracy error to force a redraw.
    """
    roots_needed = set(required_roots)
    last = None
    for t in range(attempt, attempt + max_tries):
        rng = random.Random(f"{seed}:{key}:{t}")
        vals: dict[str, Monomial] = {}
        roots: dict[str, Rat] = {}
        if "q" in roots_needed:
            s = _sample_rat(rng)
            roots["q"] = s
            qv = s * s
        else:
            qv = _sample_rat(rng)
        for name in free:
            if name in roots_needed:
                r = _sample_rat(rng, positive=name in positive)
                roots[name] = r
                vals[name] = Monomial(r * r)
            else:
                vals[name] = Monomial(_sample_rat(rng, positive=name in positive))
        try:
            view = _View(vals)
            view["q"] = Monomial(qv)
            for c in constraints:
                v = Monomial.coerce(c.formula(view))
                vals[c.symbol] = v
                view[c.symbol] = v
                if c.symbol in roots_needed:
                    roots[c.symbol] = v.sqrt().coeff
            pt = ParamPoint(vals, qv, roots, seed, t)
            if check is not None:
                check(pt)
            return pt
        except (MissingRoot, ConstraintViolation, ZeroDivisionError, DivisionByZeroSeries) as exc:
            last = exc
            continue
    raise SamplingExhausted(f"no admissible point for {key!r} after {max_tries} draws ({last})")


def check_constraints(point: ParamPoint, constraints: Sequence[Constraint]):
    view = _View({k: point[k] for k in point.assignments})
    view["q"] = point["q"]
    for c in constraints:
        if point[c.symbol] != Monomial.coerce(c.formula(view)):
            raise ConstraintViolation(f"point violates {c.text or c.symbol}")


# ---------------------------------------------------------------- identity cases

Comparison = tuple  # (label, lhs, rhs)


@dataclass
class IdentityCase:
    """A registered identity.

    ``sides(point, item, order, perturbed)`` returns a list of
    ``(label, lhs, rhs)`` comparisons for one size ``item``.  With
    ``perturbed=True`` it must return the negative-control variant, which is
    expected to fail.
    """

    name: str
    summary: str
    sides: Callable[..., list]
    free: tuple = ()
    constraints: tuple = ()
    roots: tuple = ()
    positive: tuple = ()
    items: Optional[Callable[[int], Iterable]] = None
    elliptic: bool = False
    n_max: int = 4
    order: Optional[int] = None
    points: int = 3
    control: str = ""

    def iter_items(self, n_max: int):
        if self.items is None:
            return range(n_max + 1)
        return self.items(n_max)

    def default_order(self):
        if not self.elliptic:
            return None
        return self.order or 16

    def sample(self, seed: int, index: int, attempt: int = 0, max_tries: int = MAX_RESAMPLES) -> ParamPoint:
        return sample_point(seed, self.constraints, self.roots, self.free,
                            key=f"{self.name}:{index}", attempt=attempt, positive=self.positive,
                            max_tries=max(1, max_tries))


def _evaluate(case: IdentityCase, point: ParamPoint, order, n_max, perturbed, rep: IdentityReport):
    mods = []
    for item in case.iter_items(n_max):
        for label, lhs, rhs in case.sides(point, item, order, perturbed):
            ok, mod = compare_sides(lhs, rhs)
            rep.checks += 1
            mods.append(mod)
            if not ok:
                rep.status = FAIL
                rep.first_failure = failure_data(label, lhs, rhs, mod)
                rep.first_failure["item"] = str(item)
                return mods
    return mods


def run_identity(case: IdentityCase, point: ParamPoint, order: Optional[int] = None,
                 n_max: Optional[int] = None, perturbed: bool = False) -> IdentityReport:
    """Evaluate every comparison of ``case`` at ``point``; errors land in the report."""
    t0 = time.perf_counter()
    n_max = case.n_max if n_max is None else n_max
    order = case.default_order() if order is None else order
    name = case.name + (":control" if perturbed else "")
    rep = IdentityReport(name, point.digest(), order if case.elliptic else None, n_max, PASS)
    mods = []
    try:
        if not perturbed:
            check_constraints(point, case.constraints)
        mods = _evaluate(case, point, order, n_max, perturbed, rep)
    except (DivisionByZeroSeries, ZeroDivisionError) as exc:
        rep.status = DEGENERATE
        rep.first_failure = {"error": type(exc).__name__, "message": str(exc)}
    except (PoleAtZeroNome, InsufficientTruncation) as exc:
        rep.status = FAIL
        rep.first_failure = {"error": type(exc).__name__, "message": str(exc)}
    finite = [m for m in mods if m is not None]
    rep.compared_mod = min(finite) if finite else None
    rep.ms = (time.perf_counter() - t0) * 1000
    return rep


def run_case(case: IdentityCase, seed: int = 0, points: Optional[int] = None,
             order: Optional[int] = None, n_max: Optional[int] = None,
             perturbed: bool = False) -> list[IdentityReport]:
    """Run ``case`` at several independent points, redrawing degenerate ones."""
    points = case.points if points is None else points
    reports = []
    for i in range(points):
        attempt = 0
        while True:
            try:
                pt = case.sample(seed, i, attempt, MAX_RESAMPLES - attempt)
            except SamplingExhausted as exc:
                rep = IdentityReport(case.name, "-", order, n_max or case.n_max, DEGENERATE,
                                     {"error": "SamplingExhausted", "message": str(exc)})
                break
            rep = run_identity(case, pt, order, n_max, perturbed)
            rep.notes["resampled"] = pt.attempt
            attempt = pt.attempt + 1
            if rep.status != DEGENERATE or attempt >= MAX_RESAMPLES:
                break
        reports.append(rep)
    return reports


def negative_control(case: IdentityCase, seed: int = 0, order=None, n_max=None) -> IdentityReport:
    """Run the perturbed variant at one point; the returned report should FAIL."""
    return run_case(case, seed, 1, order, n_max, perturbed=True)[0]


# ---------------------------------------------------------------- limits

def constant_term(x):
    if isinstance(x, NomeSeries):
        return series_constant_term(x)
    return rat(x) if not isinstance(x, Monomial) else series_constant_term(x.series())


def limit_sides(elliptic: Callable, basic: Callable) -> Callable:
    """Sides function comparing constant terms of elliptic sides with basic ones.

    ``elliptic`` and ``basic`` are sides functions with matching labels.
    """

    def sides(point, item, order, perturbed=False):
        ell = elliptic(point, item, order, False)
        bas = basic(point, item, None, perturbed)
        out = []
        for (label, el, er), (_, bl, br) in zip(ell, bas):
            out.append((f"{label}:lhs@p=0", NomeSeries.monomial(constant_term(el)), bl))
            out.append((f"{label}:rhs@p=0", NomeSeries.monomial(constant_term(er)), br))
        return out

    return sides


def run_limit_check(elliptic_case: IdentityCase, basic_case: IdentityCase, point: ParamPoint,
                    n_max: Optional[int] = None, order: Optional[int] = None) -> IdentityReport:
    """Constant term of each elliptic side against its basic-mode counterpart."""
    case = IdentityCase(
        f"{elliptic_case.name}->p=0", "limit", limit_sides(elliptic_case.sides, basic_case.sides),
        elliptic_case.free, elliptic_case.constraints, elliptic_case.roots,
        items=elliptic_case.items, elliptic=True,
        n_max=elliptic_case.n_max if n_max is None else n_max,
        order=elliptic_case.default_order() if order is None else order,
    )
    return run_identity(case, point, case.order, case.n_max)


# ---------------------------------------------------------------- tree

SQRT_TAGS = {"T2b", "T5", "T5e", "Tnew2"}


def parse_step(text: str) -> TransformStep:
    """``"T2b-"`` is T2b with sigma = -1; ``"T2b"``/``"T2b+"`` take sigma = +1."""
    t = text.strip()
    if t in ("T2b+", "T2b-"):
        return TransformStep("T2b").with_params(sigma=1 if t.endswith("+") else -1)
    if t == "T2b":
        return TransformStep("T2b").with_params(sigma=1)
    if t not in ALL_TAGS:
        raise ValueError(f"unknown transform tag {t!r}")
    return TransformStep(t)


def path_mode(tags: Sequence[str], mode: Optional[str] = None) -> str:
    elliptic = any(t in ("T1e", "T3e", "T5e") for t in tags)
    basic = any(t.rstrip("+-") in ("T1", "T2", "T2b", "T3", "T4", "T5") for t in tags)
    if elliptic and basic:
        raise ConstraintViolation("path mixes basic-only and elliptic tags")
    if mode is None:
        return "elliptic" if elliptic else "basic"
    if (mode == "basic" and elliptic) or (mode == "elliptic" and basic):
        raise ConstraintViolation(f"path {list(tags)} is not valid in {mode} mode")
    return mode


def _start_nome(steps: Sequence[TransformStep]) -> int:
    for nome in (2, 4, 8, 16):
        cur, ok = nome, True
        for st in reversed(steps):
            if st.tag == "Tnew2" and cur % 4:
                ok = False
                break
            if st.tag in ("T3e",):
                cur *= 2
        if ok:
            return nome
    raise ConstraintViolation("no admissible starting nome")


def plan_tree(path: Sequence[str], seed: int = 0, attempt: int = 0, order: int = 12,
              mode: Optional[str] = None):
    """Pick a unit-pair point from which every step of ``path`` is realizable.

    ``path`` is outermost first (``["T1e", "T3e"]`` means T1e after T3e).
    All sampled atoms are positive and raised to ``2**s`` where ``s`` counts
    the steps that take a square root, so every root along the way is a
    positive rational.
    """
    steps = [parse_step(t) for t in path]
    mode = path_mode([s.tag for s in steps], mode)
    s = sum(1 for st in steps if st.tag in SQRT_TAGS)
    power = 2**s
    rng = random.Random(f"{seed}:tree:{','.join(path)}:{attempt}")

    def atom():
        return Monomial(_sample_rat(rng, positive=True) ** power)

    a0, k0, q0 = atom(), atom(), atom()
    filled = []
    for st in steps:
        if st.tag in ("T1", "T1e"):
            st = st.with_params(b=atom(), c=atom())
        filled.append(st)
    nome = 0 if mode == "basic" else _start_nome(filled)
    spec = FactorialSpec(q0.coeff, nome, order)
    return filled, unit_pair(a0, k0, spec)


def build_tree(path: Sequence[str], seed=0, attempt=0, order=12, mode=None):
    """Return the list of pairs from the unit pair outward."""
    steps, pair = plan_tree(path, seed, attempt, order, mode)
    nodes = [pair]
    for st in reversed(steps):
        pair = apply_transform(st, pair)
        nodes.append(pair)
    return nodes


def run_tree(path: Sequence[str], seed: int = 0, n_max: int = 4, order: int = 12,
             mode: Optional[str] = None) -> IdentityReport:
    """Compose ``path`` from the unit pair and run verify_pair at every node."""
    t0 = time.perf_counter()
    label = "tree:" + (",".join(path) or "unit")
    rep = None
    for attempt in range(MAX_RESAMPLES):
        try:
            nodes = build_tree(path, seed, attempt, order, mode)
        except (DivisionByZeroSeries, ZeroDivisionError):
            continue
        except (ConstraintViolation, MissingRoot, ValueError) as exc:
            return IdentityReport(label, "-", order, n_max, FAIL,
                                  {"error": type(exc).__name__, "message": str(exc)})
        root = nodes[0]
        pt = digest({"path": list(path), "a": str(root.a), "k": str(root.k), "q": str(root.q),
                     "nome": root.spec.nome})
        rep = IdentityReport(label, pt, order if root.spec.nome else None, n_max, PASS)
        statuses = []
        for node in nodes:
            r = verify_pair(node, n_max)
            statuses.append({"path": node.path(), "status": r.status})
            rep.checks += r.checks
            if r.compared_mod is not None:
                rep.compared_mod = r.compared_mod if rep.compared_mod is None else min(rep.compared_mod, r.compared_mod)
            if r.status != PASS:
                rep.status = r.status
                rep.first_failure = dict(r.first_failure or {}, node=node.path())
                break
        rep.notes = {"nodes": statuses, "resampled": attempt, "start_nome": root.spec.nome}
        if rep.status != DEGENERATE:
            break
    if rep is None:
        rep = IdentityReport(label, "-", order, n_max, DEGENERATE,
                             {"error": "SamplingExhausted", "message": "every draw was degenerate"})
    rep.ms = (time.perf_counter() - t0) * 1000
    return rep


def enumerate_paths(depth: int, mode: str) -> list[list[str]]:
    tags = list(BASIC_TAGS) if mode == "basic" else list(ELLIPTIC_TAGS)
    if mode == "basic":
        tags = [t if t != "T2b" else "T2b+" for t in tags] + ["T2b-"]
    return [list(p) for p in itertools.product(tags, repeat=depth)]


# ---------------------------------------------------------------- Lift3 probe

@dataclass(frozen=True)
class ExponentLaw:
    """Candidate for the monomial factor next to ``q^{3n^2}``.

    ``fn(a, m, q, n)`` returns a Monomial; ``fn is None`` marks a reading
    that cannot be evaluated (an unbound index).
    """

    name: str
    fn: Optional[Callable[[Monomial, Monomial, Rat, int], Monomial]]

    def __call__(self, a, m, q, n):
        if self.fn is None:
            raise ValueError(f"law {self.name} is ill-formed")
        return self.fn(a, m, q, n)


def default_laws() -> list[ExponentLaw]:
    laws = [ExponentLaw("a^r (literal, r unbound)", None)]
    for sign, j, l, c in itertools.product((1, -1), range(0, 4), (-1, 0, 1), (-1, 0, 1)):
        parts = []
        if sign < 0:
            parts.append("(-1)^n")
        if j:
            parts.append(f"a^{j}n" if j > 1 else "a^n")
        if l:
            parts.append(f"m^{l}n" if l != 1 else "m^n")
        if c:
            parts.append(f"q^{c}n" if c != 1 else "q^n")
        name = "*".join(parts) or "1"
        laws.append(ExponentLaw(
            name,
            lambda a, m, q, n, sign=sign, j=j, l=l, c=c: (a**j * m**l * Monomial(sign * q**c)) ** n,
        ))
    for j in (1, 2, 3):
        laws.append(ExponentLaw(f"a^{j}n^2" if j > 1 else "a^n^2", lambda a, m, q, n, j=j: a ** (j * n * n)))
    return laws


def _probe_point(seed, index, order):
    for attempt in range(MAX_RESAMPLES):
        rng = random.Random(f"{seed}:lift3:{index}:{attempt}")
        a, m, b = (Monomial(_sample_rat(rng)) for _ in range(3))
        q = _sample_rat(rng)
        spec = FactorialSpec(q, 2, order)
        try:
            bp = bibasic_closed_form(3, a, m, b, spec)
            for n in range(2):
                bp.A(n), bp.B(n)
            return bp, {"a": str(a), "m": str(m), "b": str(b), "q": str(q), "attempt": attempt}
        except (DivisionByZeroSeries, ZeroDivisionError):
            continue
    raise SamplingExhausted("no admissible probe point")


def exponent_probe(candidates: Optional[Sequence[ExponentLaw]] = None, points: int = 2, n_max: int = 3,
                   seed: int = 0, order: int = 12, pairs=None) -> dict:
    """Test each candidate law through verify_pair on the Lift3 output.

    A candidate failing at index n is dropped at once (verify_pair stops at
    the first failing index), so larger n are only tried for survivors.
    ``pairs`` overrides the sampled points with ``[(bibasic_pair, description)]``.
    """
    t0 = time.perf_counter()
    laws = list(default_laws() if candidates is None else candidates)
    if pairs is None:
        pts = [_probe_point(seed, i, order) for i in range(points)]
    else:
        pts = list(pairs)
    results = []
    for law in laws:
        entry = {"law": law.name, "status": PASS, "points": []}
        if law.fn is None:
            entry["status"] = "ill-formed"
            entry["reason"] = "index r is not bound outside the beta sum"
            results.append(entry)
            continue
        for bp, desc in pts:
            data = lift3_data(bp, lambda n, bp=bp, law=law: law(bp.a, bp.k, bp.spec.q, n))
            pair = transformed_pair(data, bp)
            rep = verify_pair(pair, n_max, name=f"lift3[{law.name}]", point=desc)
            entry["points"].append({"point": digest(desc), "status": rep.status,
                                    "first_failure": rep.first_failure, "compared_mod": rep.compared_mod})
            if rep.status != PASS:
                entry["status"] = rep.status
                break
        results.append(entry)
    survivors = [r["law"] for r in results if r["status"] == PASS]
    return {
        "probe": "lift3",
        "candidates": len(laws),
        "points": [d for _, d in pts],
        "n_max": n_max,
        "order": order,
        "survivors": survivors,
        "unique": survivors[0] if len(survivors) == 1 else None,
        "results": results,
        "ms": round((time.perf_counter() - t0) * 1000, 1),
    }


def aggregate(reports: Iterable[IdentityReport]) -> list[IdentityReport]:
    """Order-independent report ordering: by identity key, then point digest."""
    return sorted(reports, key=lambda r: (r.identity, r.point))
