import json
import random

import pytest

from admtl.derivations import (
    ProofBuilder, barcan_script, load_script, script_from_json, script_to_json, shipped_script,
)
from admtl.grammar import parse_formula as pf
from admtl.kernel import (
    MP, SCHEMES, TAUT_ATOM_LIMIT, Axiom, EntailmentError, GenG, Premise, ProofLine,
    ProofScript, SideConditionError, TautologyLimitError, check_proof, entails, instantiate,
    is_tautology_instance, match_axiom, mirror_proof, tiers_used,
)
from admtl.semantics import valid_in
from admtl.syntax import And, Const, Implies, Pred, Var, conj, mirror

from generators import SIG, mutate, rand_instance, rand_standard_model

p_, q_ = Pred("p", ()), Pred("q", ())


class TestTautology:
    def test_identity(self):
        assert is_tautology_instance(pf("G p() -> G p()"))

    def test_excluded_middle(self):
        assert is_tautology_instance(pf("G p() | ~G p()"))

    def test_modal_formula_is_an_atom(self):
        assert not is_tautology_instance(pf("G (p() -> p())"))

    def test_quantified_atom(self):
        assert is_tautology_instance(pf("(forall x. p(x)) -> (forall x. p(x)) | q()"))

    def test_atom_cap(self):
        atoms = [Pred(f"a{i}", ()) for i in range(TAUT_ATOM_LIMIT + 1)]
        phi = Implies(conj(*atoms), atoms[0])
        with pytest.raises(TautologyLimitError):
            is_tautology_instance(phi)

    def test_at_cap(self):
        atoms = [Pred(f"a{i}", ()) for i in range(TAUT_ATOM_LIMIT)]
        assert is_tautology_instance(Implies(conj(*atoms), atoms[-1]))


class TestMatchAxiom:
    def test_k_g(self):
        assert match_axiom("K_G", {"phi": p_, "psi": q_}, pf("G (p() -> q()) -> G p() -> G q()"))

    def test_vacuous_quantification_side_condition(self):
        inst = {"phi": pf("p(x)"), "x": "x"}
        assert not match_axiom("VacQuant", inst, pf("p(x) -> forall x. p(x)"))
        with pytest.raises(SideConditionError):
            instantiate("VacQuant", inst)

    def test_rigid_identity(self):
        c, d = Const("c"), Const("d")
        assert match_axiom("RigidId", {"tau": c, "tau2": d},
                           pf("c = d -> box c = d", constants=["c", "d"]))

    def test_universal_instantiation_capture(self):
        inst = {"phi": pf("forall y. r(x, y)"), "x": "x", "tau": Var("y")}
        with pytest.raises(SideConditionError):
            instantiate("UnivInst", inst)

    def test_subst_id_needs_atomic(self):
        c, d = Const("c"), Const("d")
        with pytest.raises(SideConditionError):
            instantiate("SubstId", {"tau": c, "tau2": d, "phi": pf("G p(c)", constants=["c"]),
                                    "mask": (0,)})

    def test_mismatch(self):
        assert not match_axiom("K_G", {"phi": p_, "psi": q_}, pf("G (p() -> q()) -> G q() -> G p()"))

    def test_every_g_scheme_has_its_mirror(self):
        for s in SCHEMES.values():
            assert SCHEMES[s.mirror].mirror == s.name
        assert SCHEMES["DedekindCty"].tier == "L_R"


def _taut_line():
    return ProofScript("L", (ProofLine(1, pf("p() -> p()"), Axiom("Taut", {})),), pf("p() -> p()"))


class TestCheckProof:
    def test_barcan_accepted(self):
        script = barcan_script()
        assert check_proof(script)
        assert tiers_used(script) == {"L"}

    def test_shipped_scripts(self):
        g, h = shipped_script("barcan_g"), shipped_script("barcan_h")
        assert check_proof(g) and check_proof(h)
        assert g.goal == pf("(forall x. G p(x)) -> G (forall x. p(x))")
        assert h.goal == pf("(forall x. H p(x)) -> H (forall x. p(x))")

    def test_corrupted_mp_operand(self):
        script = barcan_script()
        k = next(i for i, l in enumerate(script.lines) if isinstance(l.just, MP))
        line = script.lines[k]
        bad = ProofLine(line.id, line.formula, MP(line.just.minor, line.just.minor))
        lines = script.lines[:k] + (bad,) + script.lines[k + 1:]
        verdict = check_proof(ProofScript("L", lines, script.goal))
        assert not verdict and verdict.line == line.id

    def test_single_tautology(self):
        assert check_proof(_taut_line())

    def test_forward_citation(self):
        lines = (ProofLine(1, p_, MP(2, 3)),)
        verdict = check_proof(ProofScript("L", lines, p_))
        assert not verdict and "earlier" in verdict.reason

    def test_tier_enforced(self):
        inst = {"phi": p_}
        line = ProofLine(1, instantiate("Trans_G", inst), Axiom("Trans_G", inst))
        assert not check_proof(ProofScript("L", (line,), line.formula))
        assert check_proof(ProofScript("L_Q", (line,), line.formula))
        ded = ProofLine(1, instantiate("DedekindCty", inst), Axiom("DedekindCty", inst))
        assert not check_proof(ProofScript("L_Q", (ded,), ded.formula))
        assert check_proof(ProofScript("L_R", (ded,), ded.formula))

    def test_goal_must_be_last_line(self):
        verdict = check_proof(ProofScript("L", _taut_line().lines, pf("q() -> q()")))
        assert not verdict and verdict.line == 1

    def test_premise_mode(self):
        lines = (ProofLine(1, p_, Premise(0)),
                 ProofLine(2, pf("p() -> p() | q()"), Axiom("Taut", {})),
                 ProofLine(3, pf("p() | q()"), MP(1, 2)))
        assert check_proof(ProofScript("L", lines, pf("p() | q()"), (p_,)))

    def test_no_generalisation_of_premises(self):
        lines = (ProofLine(1, p_, Premise(0)), ProofLine(2, pf("G p()"), GenG(1)))
        verdict = check_proof(ProofScript("L", lines, pf("G p()"), (p_,)))
        assert not verdict and verdict.line == 2

    def test_generalisation_rules(self):
        b = ProofBuilder()
        t = b.taut(pf("p(x) -> p(x)"))
        b.gen_h(b.gen_g(t))
        b.gen_forall(t, "x")
        assert check_proof(b.script(pf("forall x. p(x) -> p(x)")))

    def test_wrong_generalisation(self):
        lines = (_taut_line().lines[0], ProofLine(2, pf("H (p() -> p())"), GenG(1)))
        assert not check_proof(ProofScript("L", lines, pf("H (p() -> p())")))


class TestEntails:
    def _script(self, goal):
        return ProofScript("L", (ProofLine(1, goal, Axiom("Taut", {})),), goal)

    def test_single_premise(self):
        assert entails([p_], p_, self._script(pf("p() -> p()")))

    def test_conjunction(self):
        assert entails([p_, q_], And(p_, q_), self._script(pf("p() & q() -> p() & q()")))

    def test_goal_does_not_prove_target(self):
        assert not entails([p_], q_, self._script(pf("p() -> p()")))

    def test_conjunct_outside_delta(self):
        with pytest.raises(EntailmentError):
            entails([p_], p_, self._script(pf("p() & q() -> p()")))

    def test_premise_lines_forbidden(self):
        script = ProofScript("L", (ProofLine(1, pf("p() -> p()"), Axiom("Taut", {})),),
                             pf("p() -> p()"), premises=(p_,))
        with pytest.raises(EntailmentError):
            entails([p_], p_, script)

    def test_recorded_association(self):
        goal = pf("(p() & q()) & p() -> q()")
        script = ProofScript("L", (ProofLine(1, goal, Axiom("Taut", {})),), goal,
                             conjuncts=(And(p_, q_), p_))
        assert entails([And(p_, q_), p_], q_, script)


class TestMirrorProof:
    def test_barcan_h(self):
        h = mirror_proof(barcan_script())
        assert check_proof(h)
        assert h.goal == pf("(forall x. H p(x)) -> H (forall x. p(x))")

    def test_taut_line(self):
        m = mirror_proof(ProofScript("L", (ProofLine(1, pf("G p() -> G p()"), Axiom("Taut", {})),),
                                     pf("G p() -> G p()")))
        assert m.lines[0].just == Axiom("Taut", {})
        assert m.lines[0].formula == pf("H p() -> H p()")

    def test_involution(self):
        script = barcan_script()
        assert mirror_proof(mirror_proof(script)) == script

    def test_expanded_box_survives_mirroring(self):
        # a RigidId line written with the box spelled out
        c, d = Const("c"), Const("d")
        inst = {"tau": c, "tau2": d}
        text = "c = d -> (H c = d & c = d) & G c = d"
        line = ProofLine(1, pf(text, constants=["c", "d"]), Axiom("RigidId", inst))
        script = ProofScript("L", (line,), line.formula)
        assert check_proof(script) and check_proof(mirror_proof(script))

    @pytest.mark.parametrize("name", sorted(SCHEMES))
    def test_mirror_of_instances(self, name):
        if name == "Taut":
            return
        rng = random.Random(name)
        scheme = SCHEMES[name]
        for _ in range(1000):
            inst = rand_instance(rng, name)
            built = instantiate(name, inst)
            minst = {k: mirror(v) if k in ("phi", "psi") else v for k, v in inst.items()}
            assert match_axiom(scheme.mirror, minst, mirror(built))


class TestJson:
    def test_round_trip(self, tmp_path):
        script = barcan_script()
        path = tmp_path / "b.json"
        path.write_text(json.dumps(script_to_json(script)))
        assert load_script(path) == script

    def test_inferred_signature(self):
        data = script_to_json(_taut_line())
        del data["signature"]
        assert check_proof(script_from_json(data))


# --- mutation fuzzing ------------------------------------------------------------------

def test_mutations_are_rejected():
    rng = random.Random(7)
    for base in (barcan_script(), mirror_proof(barcan_script())):
        for _ in range(500):
            mutant = mutate(base, rng)
            assert not check_proof(mutant), "mutation went undetected"


# --- soundness on small random proofs ---------------------------------------------------

FINITE_LINEAR = [n for n, s in SCHEMES.items() if s.frame == "all-finite-linear" and n != "Taut"]


def random_proof(rng: random.Random, logic="L_R", steps=4) -> ProofScript:
    b = ProofBuilder(logic)
    ids = []
    for _ in range(2):
        name = rng.choice(FINITE_LINEAR)
        ids.append(b.axiom(name, **rand_instance(rng, name, depth=2)))
    for _ in range(steps):
        r = rng.random()
        src = rng.choice(ids)
        if r < 0.25:
            ids.append(b.gen_g(src))
        elif r < 0.5:
            ids.append(b.gen_h(src))
        elif r < 0.7:
            ids.append(b.gen_forall(src, rng.choice("xyz")))
        else:
            other = rng.choice(ids)
            a, c = b.formula(src), b.formula(other)
            ids.append(b.via(Implies(a, Implies(c, And(a, c))), src, other))
    return b.script()


def test_random_proofs_are_sound():
    rng = random.Random(11)
    models = [rand_standard_model(rng, SIG, tmax=5, umax=3) for _ in range(100)]
    for _ in range(30):
        script = random_proof(rng)
        assert check_proof(script)
        for M in models:
            assert valid_in(M, script.goal), script.goal
