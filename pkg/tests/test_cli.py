import json
import random
import subprocess
import sys

import pytest

from admtl.cli import run
from admtl.derivations import barcan_script, script_to_json
from admtl.grammar import parse_formula, print_formula
from admtl.semantics import TimeFlow, model_to_json, standard_model

from generators import SIG, rand_formula


@pytest.fixture
def model_file(tmp_path):
    flow = TimeFlow(("t0", "t1", "t2"))
    M = standard_model(flow, ("a", "b"), constants={"c": "a"},
                       predicates={"p": {(): flow.mask(["t2"])},
                                   "r": {("a",): flow.full, ("b",): flow.mask(["t1"])}})
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_json(M)))
    return str(path)


def out(capsys):
    return capsys.readouterr().out.strip()


class TestParse:
    def test_print(self, capsys):
        assert run(["parse", "G p() ->  G G p()", "--print"]) == 0
        assert out(capsys) == "G p() -> G G p()"

    def test_expand(self, capsys):
        assert run(["parse", "F p()", "--expand"]) == 0
        assert out(capsys) == "~G ~p()"

    def test_json(self, capsys):
        run(["parse", "forall x. r(x, y)", "--json"])
        data = json.loads(out(capsys))
        assert data["free_vars"] == ["y"] and data["signature"]["predicates"] == {"r": 2}

    def test_error(self, capsys):
        assert run(["parse", "p(x) & & q(x)"]) == 2
        assert "admtl parse" in capsys.readouterr().err

    def test_round_trip(self, capsys):
        rng = random.Random(5)
        for _ in range(200):
            phi = rand_formula(rng, 5)
            run(["parse", print_formula(phi), "--print"])
            assert parse_formula(out(capsys), SIG) == phi


class TestCheckProof:
    @pytest.mark.parametrize("name", ["barcan_g", "barcan_h"])
    def test_shipped(self, name, capsys):
        assert run(["check-proof", "--shipped", name]) == 0
        assert out(capsys).startswith("accepted")

    def test_file(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(script_to_json(barcan_script())))
        assert run(["check-proof", str(path), "--json"]) == 0
        assert json.loads(out(capsys))["tiers"] == ["L"]

    def test_rejected(self, tmp_path, capsys):
        data = script_to_json(barcan_script())
        data["lines"][-1]["formula"] = "p(c)"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        assert run(["check-proof", str(path)]) == 1
        assert out(capsys).startswith("rejected at line")

    def test_missing_file(self, capsys):
        assert run(["check-proof", "/nonexistent/script.json"]) == 2

    def test_needs_a_script(self, capsys):
        assert run(["check-proof"]) == 2


class TestEval:
    def test_true_and_false(self, model_file, capsys):
        assert run(["eval", "--model", model_file, "--formula", "G p()", "--at", "t1"]) == 0
        assert out(capsys) == "true"
        assert run(["eval", "--model", model_file, "--formula", "G p()", "--at", "t0"]) == 1
        assert out(capsys) == "false"

    def test_assignment(self, model_file, capsys):
        args = ["eval", "--model", model_file, "--formula", "r(x)", "--at", "t0"]
        assert run(args + ["--assign", "x=a"]) == 0
        assert run(args + ["--assign", "x=b"]) == 1
        assert run(args) == 2

    def test_unknown_time(self, model_file, capsys):
        assert run(["eval", "--model", model_file, "--formula", "p()", "--at", "t9"]) == 2

    def test_valid(self, model_file, capsys):
        assert run(["valid", "--model", model_file, "--formula", "p() | ~p()"]) == 0
        out(capsys)
        assert run(["valid", "--model", model_file, "--formula", "forall x. r(x)", "--json"]) == 1
        data = json.loads(out(capsys))
        assert data == {"valid": False, "t": "t0", "assignment": {}}


class TestCountermodel:
    def test_found(self, capsys):
        assert run(["countermodel", "--formula", "G G p() -> G p()", "--tmax", "3", "--json"]) == 1
        data = json.loads(out(capsys))
        assert data["found"] and data["model"]["prop"] == "powerset"
        assert len(data["model"]["flow"]) <= 3

    def test_three_points(self, capsys):
        assert run(["countermodel", "--formula", "G G p() -> G p()", "--tmin", "3", "--tmax", "3"]) == 1
        text = out(capsys)
        assert json.loads(text[:text.rindex("}") + 1])["flow"] == ["0", "1", "2"]
        assert "falsified at" in text

    def test_none(self, capsys):
        assert run(["countermodel", "--formula", "p() -> p()"]) == 0
        assert out(capsys) == "none found"

    def test_random(self, capsys):
        assert run(["countermodel", "--formula", "G p() -> p()", "--mode", "random", "--seed", "3"]) == 1

    def test_budget(self, capsys):
        args = ["countermodel", "--formula", "(forall x. G p(x)) -> G forall x. p(x)",
                "--tmax", "4", "--umax", "3", "--budget", "5"]
        assert run(args) == 2
        assert "budget" in capsys.readouterr().err


class TestOthers:
    def test_closure(self, capsys):
        assert run(["closure", "--size", "3", "--json"]) == 0
        data = json.loads(out(capsys))
        assert data["size"] == 8 and data["powerset"]

    def test_closure_bad_point(self, capsys):
        assert run(["closure", "--size", "2", "--set", "0,5"]) == 2

    def test_mu(self, capsys):
        assert run(["mu", "--bounded"]) == 0
        assert len(out(capsys).splitlines()) == 11
        assert run(["mu", "--json"]) == 0
        assert len(json.loads(out(capsys))["conjuncts"]) == 11

    def test_window_model(self, tmp_path, capsys):
        assert run(["window-model", "2"]) == 0
        data = json.loads(out(capsys))
        assert data["flow"] == ["-2", "-1", "0", "1", "2"]
        path = tmp_path / "w.json"
        path.write_text(json.dumps(data))
        assert run(["check-translation", "--formula", "forall x. x * 0 = 0", "--model", str(path)]) == 0

    def test_window_model_bad_size(self, capsys):
        assert run(["window-model", "0"]) == 2

    def test_check_translation(self, capsys):
        assert run(["check-translation", "--formula", "forall x. x * 0 = 0", "--window", "4"]) == 0
        assert out(capsys) == "9/9 agree"

    def test_check_translation_rejects_order_symbol(self, capsys):
        assert run(["check-translation", "--formula", "exists y. prec(0, y)"]) == 2

    def test_embed(self, capsys):
        assert run(["embed", "--theta", "5", "--theta", "0:0", "--interval", "L", "--json"]) == 0
        data = json.loads(out(capsys))
        assert data["theta"] == {"5": "5/6", "0:0": "5/2"}
        assert data["interval"]["interval"] == ["19/9", "20/9"]

    def test_embed_dump(self, capsys):
        assert run(["embed", "--steps", "3"]) == 0
        assert out(capsys).splitlines()[0] == "0 -> root"

    def test_embed_needs_a_query(self, capsys):
        assert run(["embed"]) == 2

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "admtl", "check-proof", "--shipped", "barcan_h"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("accepted")
