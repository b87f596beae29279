import json

from wpbailey import cli
from wpbailey.harness import IdentityCase
from wpbailey.arith import NomeSeries


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_verify_json_lines(capsys):
    code, out = run(capsys, "verify", "lemma2", "rogers-delta", "--json", "--points", "2")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 4
    for row in rows:
        assert {"identity", "point", "order", "max_n", "status", "ms"} <= set(row)
        assert row["status"] == "pass"
    assert [r["identity"] for r in rows] == sorted(r["identity"] for r in rows)


def test_no_timing_is_byte_stable(capsys):
    _, first = run(capsys, "verify", "theta-square", "--json", "--no-timing", "--seed", "3")
    _, second = run(capsys, "verify", "theta-square", "--json", "--no-timing", "--seed", "3")
    assert first == second
    assert '"ms"' not in first


def test_overrides(capsys):
    code, out = run(capsys, "verify", "elliptic-jackson", "--json", "--order", "12", "--max-n", "2", "--points", "1")
    row = json.loads(out)
    assert code == 0 and row["order"] == 12 and row["max_n"] == 2


def test_failing_identity_sets_exit_code(capsys, monkeypatch):
    def sides(pt, n, order, perturbed=False):
        return [("wrong", NomeSeries.one(), NomeSeries.zero())]

    monkeypatch.setitem(cli.REGISTRY, "always-wrong", IdentityCase("always-wrong", "x", sides, ("a",), n_max=0))
    code, out = run(capsys, "verify", "always-wrong", "--json", "--points", "1")
    assert code == 1
    assert json.loads(out)["first_failure"]["check"] == "wrong"


def test_unknown_identity(capsys):
    assert cli.main(["verify", "no-such-thing"]) == 2


def test_tree_and_kernels(capsys):
    code, out = run(capsys, "tree", "--path", "T1e,T3e", "--json")
    assert code == 0 and json.loads(out)["identity"] == "tree:T1e,T3e"
    code, out = run(capsys, "tree", "--depth-all", "1", "--mode", "elliptic", "--json")
    assert code == 0 and len(out.splitlines()) == 5
    code, out = run(capsys, "kernels", "--max-n", "2", "--json")
    assert code == 0 and "NMM2e" in out


def test_probe_and_list(capsys):
    code, out = run(capsys, "probe-lift3", "--json", "--no-timing")
    res = json.loads(out)
    assert code == 0 and res["unique"] == "a^n" and "ms" not in res
    code, out = run(capsys, "list")
    assert code == 0 and "thm-1413c" in out
