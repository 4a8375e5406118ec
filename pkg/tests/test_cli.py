import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from pospres import serialize as js
from pospres.cli import run
from pospres.constgroup import ConstOperator
from pospres.levy import LevyTriplet
from pospres.operator import DiffOperator
from pospres.poly import Polynomial

x = Polynomial.variable(1)


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write


def poly(payload):
    return js.poly_from_json(payload)


def test_apply(files):
    T = files("t.json", js.operator_to_json(DiffOperator(1, 2, {(1,): x, (2,): 1})))
    f = files("f.json", js.poly_to_json(x**2))
    verdict, code = run(["apply", "--operator", T, "--poly", f])
    assert code == 0 and verdict["status"] == "ok"
    assert poly(verdict["payload"]) == 2 * x**2 + 2


def test_canon(files):
    images = [{"alpha": [k], "image": js.poly_to_json((x + 1) ** k)} for k in range(4)]
    action = files("a.json", {"n": 1, "D": 3, "images": images})
    verdict, code = run(["canon", "--action", action])
    assert code == 0
    T = js.operator_from_json(verdict["payload"])
    assert T == DiffOperator(1, 3, {(k,): F(1, [1, 1, 2, 6][k]) for k in range(4)})


def test_diag(files):
    seq = files("s.json", {"n": 1, "D": 4, "kind": "t", "values": [{"alpha": [k], "v": 2**k} for k in range(5)]})
    verdict, code = run(["diag", "--sequence", seq])
    assert code == 0 and verdict["payload"]["kind"] == "c"
    assert all(e["v"] == "1" for e in verdict["payload"]["values"])
    verdict, _ = run(["diag", "--sequence", seq, "--to", "canonical"])
    T = js.operator_from_json(verdict["payload"])
    assert T[(2,)] == x**2 / 2


def test_exp_log(files):
    A = files("a.json", js.const_to_json(ConstOperator.derivative(1, 4, (2,))))
    verdict, code = run(["exp", "--algebra", A])
    assert code == 0
    E = js.operator_from_json(verdict["payload"])
    assert E == ConstOperator(1, 4, {(0,): 1, (2,): 1, (4,): F(1, 2)})
    G = files("g.json", verdict["payload"])
    verdict, code = run(["log", "--group", G])
    assert code == 0 and js.operator_from_json(verdict["payload"]) == ConstOperator.derivative(1, 4, (2,))
    verdict, code = run(["exp", "--algebra", G])
    assert code == 1 and verdict["payload"]["error"] == "NotAlgebraElement"


def test_member(files):
    ok = files("d.json", js.operator_to_json(DiffOperator(1, 12, {(1,): 1})))
    f = files("f.json", js.poly_to_json(x**4))
    verdict, code = run(["member", "--operator", ok, "--limit", f, "--k", "2,8"])
    assert code == 0 and verdict["payload"]["tag"] == "member"
    assert [r["k"] for r in verdict["payload"]["limit"]["rows"]] == [2, 8]
    bad = files("b.json", js.operator_to_json(DiffOperator(1, 12, {(1,): x**2})))
    verdict, code = run(["member", "--operator", bad])
    assert code == 2 and verdict["status"] == "budget-exceeded"
    assert verdict["payload"]["trace"]["steps"][-1]["degree"] == 13


def test_check_and_verify(files):
    anti = files("anti.json", js.const_to_json(ConstOperator(1, 2, {(0,): 1, (2,): -1})))
    verdict, code = run(["check", "--operator", anti, "--order", "1", "--grid", files("g.json", [[0]])])
    assert code == 3 and verdict["status"] == "violation"
    assert poly(verdict["payload"]["witness"]) == x**2
    cert = files("cert.json", verdict)
    verdict, code = run(["--seed", "3", "verify", "--certificate", cert, "--operator", anti])
    assert code == 0 and verdict["payload"]["verified"] is True
    assert verdict["payload"]["sampled_min"] >= 0 and verdict["payload"]["samples"] == 1000
    ident = files("id.json", js.const_to_json(ConstOperator.identity(1, 2)))
    verdict, code = run(["verify", "--certificate", cert, "--operator", ident])
    assert code == 1 and verdict["payload"]["verified"] is False


def test_check_no_violation(files):
    heat = files("h.json", js.const_to_json(ConstOperator(1, 4, {(0,): 1, (2,): 1, (4,): F(1, 2)})))
    verdict, code = run(["check", "--operator", heat, "--K", "R"])
    assert code == 0 and len(verdict["payload"]["grid"]) == 5


def test_synth_evolve(files):
    trip = files("p.json", js.triplet_to_json(LevyTriplet.poisson()))
    verdict, code = run(["synth", "--triplet", trip, "--order", "3"])
    assert code == 0
    assert js.operator_from_json(verdict["payload"]) == ConstOperator(1, 3, {(1,): 1, (2,): F(1, 2), (3,): F(1, 6)})
    f = files("f.json", js.poly_to_json(x**2))
    verdict, code = run(["evolve", "--triplet", trip, "--t", "1/2", "--poly", f])
    assert poly(verdict["payload"]) == x**2 + x + F(3, 4)
    verdict, code = run(["evolve", "--triplet", trip, "--t", "1/4,1", "--poly", f])
    assert [e["t"] for e in verdict["payload"]["trajectory"]] == ["1/4", "1"]
    verdict, code = run(["evolve", "--triplet", trip, "--t", "1", "--poly", f, "--csv"])
    lines = verdict["payload"]["csv"].splitlines()
    assert lines == ["t,alpha,coeff", "1,0,2", "1,1,2", "1,2,1"]
    verdict, code = run(["evolve", "--triplet", trip, "--t", "-1", "--poly", f])
    assert code == 1 and verdict["payload"]["error"] == "NegativeTime"


def test_sweep(files):
    anti = files("a.json", js.const_to_json(ConstOperator.derivative(1, 4, (2,), -1)))
    verdict, code = run(["sweep", "--gen", anti])
    assert code == 3 and verdict["payload"]["t"] == "1/4"
    euler = files("e.json", js.operator_to_json(DiffOperator(1, 4, {(1,): x})))
    verdict, code = run(["sweep", "--gen", euler, "--tgrid", "1/4,1"])
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["apply", "--operator", "/nonexistent.json", "--poly", "/nonexistent.json"],
        ["frobnicate"],
        ["exp"],
        ["check", "--operator", "BAD", "--K", "interval:2,1"],
    ],
)
def test_errors_exit_one(argv, files):
    argv = [files("bad.json", "{not json") if a == "BAD" else a for a in argv]
    verdict, code = run(argv)
    assert code == 1 and verdict["status"] == "error"


def test_malformed_operator(files):
    T = files("t.json", {"n": 1, "D": 2, "table": [{"alpha": [1, 1], "q": "1"}]})
    verdict, code = run(["apply", "--operator", T, "--poly", files("f.json", js.poly_to_json(x))])
    assert code == 1 and verdict["payload"]["error"] == "MalformedInput"


def test_console_output_is_deterministic(files):
    anti = files("a.json", js.const_to_json(ConstOperator.derivative(1, 4, (2,), -1)))
    argv = [sys.executable, "-m", "pospres.cli", "sweep", "--gen", anti]
    first = subprocess.run(argv, capture_output=True)
    second = subprocess.run(argv, capture_output=True)
    assert first.returncode == 3
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["status"] == "violation"


def test_verdicts_chain_between_commands(files):
    anti = files("a.json", js.const_to_json(ConstOperator.derivative(1, 4, (2,), -1)))
    verdict, _ = run(["exp", "--algebra", anti])
    group = files("g.json", verdict)
    verdict, code = run(["check", "--operator", group, "--order", "1"])
    assert code == 3
    verdict, code = run(["verify", "--certificate", files("c.json", verdict), "--operator", group])
    assert code == 0 and verdict["payload"]["verified"] is True
    verdict, _ = run(["exp", "--algebra", group])
    verdict, code = run(["log", "--group", files("err.json", verdict)])
    assert code == 1 and verdict["payload"]["error"] == "MalformedInput"
