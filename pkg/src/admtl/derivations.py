"""Building proof scripts by hand, the Barcan derivations, and script JSON files.

JSON layout::

    {"logic": "L",
     "signature": {"constants": [...], "functions": {...}, "predicates": {...}},
     "premises": ["..."],
     "conjuncts": ["..."],            # optional, for entailment
     "lines": [{"id": 1, "formula": "...", "rule": "axiom",
                "args": {"name": "K_G", "inst": {"phi": "...", "psi": "..."}}},
               {"id": 2, "formula": "...", "rule": "mp", "args": {"minor": 1, "major": 2}},
               {"id": 3, "formula": "...", "rule": "gen_g", "args": {"from": 2}},
               {"id": 4, "formula": "...", "rule": "gen_forall", "args": {"from": 3, "var": "x"}},
               {"id": 5, "formula": "...", "rule": "premise", "args": {"index": 0}}],
     "goal": "..."}

Rules are ``axiom``, ``premise``, ``mp``, ``gen_g``, ``gen_h`` and
``gen_forall``; the Taut scheme takes an empty ``inst``.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Mapping

from .grammar import parse_formula, parse_term, print_formula, print_term
from .kernel import (
    MP, SCHEMES, Axiom, GenForall, GenG, GenH, KernelError, Premise, ProofLine,
    ProofScript, instantiate,
)
from .syntax import (
    F, Forall, Formula, G, H, Implies, Not, P, Pred, Signature, Term, Var, normalize,
    symbols,
)


class ProofBuilder:
    """Accumulates proof lines, returning line ids; identical formulas are reused."""

    def __init__(self, logic: str = "L"):
        self.logic = logic
        self.lines = []
        self._by_formula = {}

    def formula(self, i: int) -> Formula:
        return self.lines[i - 1].formula

    def add(self, phi: Formula, just) -> int:
        key = normalize(phi)
        if key in self._by_formula:
            return self._by_formula[key]
        lid = len(self.lines) + 1
        self.lines.append(ProofLine(lid, phi, just))
        self._by_formula[key] = lid
        return lid

    def axiom(self, name: str, **inst) -> int:
        return self.add(instantiate(name, inst), Axiom(name, inst))

    def taut(self, phi: Formula) -> int:
        return self.add(phi, Axiom("Taut", {}))

    def mp(self, minor: int, major: int) -> int:
        imp = self.formula(major)
        if not isinstance(imp, Implies):
            raise KernelError(f"line {major} is not an implication")
        return self.add(imp.right, MP(minor, major))

    def gen_g(self, i: int) -> int:
        return self.add(G(self.formula(i)), GenG(i))

    def gen_h(self, i: int) -> int:
        return self.add(H(self.formula(i)), GenH(i))

    def gen_forall(self, i: int, x: str) -> int:
        return self.add(Forall(x, self.formula(i)), GenForall(i, x))

    def via(self, taut: Formula, *minors: int) -> int:
        """Detach ``minors`` one after another from the tautology ``taut``."""
        cur = self.taut(taut)
        for m in minors:
            cur = self.mp(m, cur)
        return cur

    def syllogism(self, i: int, j: int) -> int:
        a, b = self.formula(i).left, self.formula(i).right
        c = self.formula(j).right
        return self.via(Implies(Implies(a, b), Implies(Implies(b, c), Implies(a, c))), i, j)

    def contrapose(self, i: int, left=None, right=None) -> int:
        """From ``a -> b`` get ``~b -> ~a``; ``left``/``right`` may restate the result with sugar."""
        a, b = self.formula(i).left, self.formula(i).right
        out = Implies(left if left is not None else Not(b), right if right is not None else Not(a))
        return self.via(Implies(Implies(a, b), out), i)

    def script(self, goal: Formula | None = None, premises=(), signature=None) -> ProofScript:
        goal = self.lines[-1].formula if goal is None else goal
        return ProofScript(self.logic, tuple(self.lines), goal, tuple(premises),
                           signature=signature)


def barcan_script(phi: Formula | None = None, x: str = "x") -> ProofScript:
    """Derivation of ``(forall x. G phi) -> G (forall x. phi)`` using tier-L axioms only.

    Route: instantiate, push the past modality through, cancel ``P G`` with the
    mirrored converse scheme, generalise over ``x``, then move ``G`` outside.
    """
    if phi is None:
        phi = Pred("p", (Var(x),))
    b = ProofBuilder("L")
    A = Forall(x, G(phi))
    # A -> G phi, then P A -> P G phi
    inst = b.axiom("UnivInst", phi=G(phi), x=x, tau=Var(x))
    c = b.contrapose(inst)
    k = b.axiom("K_H", phi=Not(G(phi)), psi=Not(A))
    m = b.mp(b.gen_h(c), k)
    pa_pg = b.contrapose(m, P(A), P(G(phi)))
    # P G phi -> phi, from the HF instance at ~phi
    dn = b.taut(Implies(phi, Not(Not(phi))))
    m1 = b.mp(b.gen_g(dn), b.axiom("K_G", phi=phi, psi=Not(Not(phi))))
    c3 = b.contrapose(m1, F(Not(phi)), Not(G(phi)))
    m3 = b.mp(b.gen_h(c3), b.axiom("K_H", phi=F(Not(phi)), psi=Not(G(phi))))
    s = b.syllogism(b.axiom("HF", phi=Not(phi)), m3)
    pg_phi = b.via(Implies(Implies(Not(phi), H(Not(G(phi)))), Implies(P(G(phi)), phi)), s)
    # P A -> forall x. phi
    pa_phi = b.syllogism(pa_pg, pg_phi)
    dist = b.mp(b.gen_forall(pa_phi, x), b.axiom("UnivDist", phi=P(A), psi=phi, x=x))
    pa_all = b.syllogism(b.axiom("VacQuant", phi=P(A), x=x), dist)
    # A -> G P A -> G forall x. phi
    gk = b.mp(b.gen_g(pa_all), b.axiom("K_G", phi=P(A), psi=Forall(x, phi)))
    b.syllogism(b.axiom("GP", phi=A), gk)
    goal = Implies(A, G(Forall(x, phi)))
    return b.script(goal, signature=symbols(goal))


# --- JSON -----------------------------------------------------------------------

def _value_to_json(v):
    if isinstance(v, Formula):
        return print_formula(v)
    if isinstance(v, Term):
        return print_term(v)
    if isinstance(v, (list, tuple, set, frozenset)):
        return sorted(v)
    return v


def _just_to_json(just):
    if isinstance(just, Axiom):
        return "axiom", {"name": just.name,
                         "inst": {k: _value_to_json(v) for k, v in just.inst.items()}}
    if isinstance(just, Premise):
        return "premise", {"index": just.index}
    if isinstance(just, MP):
        return "mp", {"minor": just.minor, "major": just.major}
    if isinstance(just, GenG):
        return "gen_g", {"from": just.source}
    if isinstance(just, GenH):
        return "gen_h", {"from": just.source}
    if isinstance(just, GenForall):
        return "gen_forall", {"from": just.source, "var": just.var}
    raise TypeError(f"unknown justification {just!r}")


def script_to_json(script: ProofScript) -> dict:
    sig = script.signature
    if sig is None:
        sig = Signature()
        for l in script.lines:
            sig = sig.union(symbols(l.formula))
    out = {"logic": script.logic, "signature": sig.to_json(),
           "premises": [print_formula(p) for p in script.premises]}
    if script.conjuncts is not None:
        out["conjuncts"] = [print_formula(c) for c in script.conjuncts]
    lines = []
    for l in script.lines:
        rule, args = _just_to_json(l.just)
        lines.append({"id": l.id, "formula": print_formula(l.formula), "rule": rule, "args": args})
    out["lines"] = lines
    out["goal"] = print_formula(script.goal)
    return out


class ScriptFormatError(ValueError):
    pass


def _inst_from_json(name, inst, sig):
    scheme = SCHEMES.get(name)
    kinds = dict(scheme.params) if scheme is not None else {}
    out = {}
    for key, v in inst.items():
        kind = kinds.get(key)
        if kind == "formula":
            out[key] = parse_formula(v, sig)
        elif kind == "term":
            out[key] = parse_term(v, sig)
        elif kind == "mask":
            out[key] = tuple(v)
        else:
            out[key] = v
    return out


def script_from_json(data: Mapping) -> ProofScript:
    try:
        sig = Signature.from_json(data["signature"]) if "signature" in data else None
        if sig is None:
            sig = Signature()
            texts = [l["formula"] for l in data["lines"]] + [data["goal"]] + list(data.get("premises", []))
            for t in texts:
                sig = sig.union(symbols(parse_formula(t)))
        lines = []
        for raw in data["lines"]:
            rule, args = raw["rule"], raw.get("args", {})
            if rule == "axiom":
                just = Axiom(args["name"], _inst_from_json(args["name"], args.get("inst", {}), sig))
            elif rule == "premise":
                just = Premise(int(args["index"]))
            elif rule == "mp":
                just = MP(int(args["minor"]), int(args["major"]))
            elif rule == "gen_g":
                just = GenG(int(args["from"]))
            elif rule == "gen_h":
                just = GenH(int(args["from"]))
            elif rule == "gen_forall":
                just = GenForall(int(args["from"]), str(args["var"]))
            else:
                raise ScriptFormatError(f"unknown rule {rule!r}")
            lines.append(ProofLine(int(raw["id"]), parse_formula(raw["formula"], sig), just))
        conjuncts = data.get("conjuncts")
        return ProofScript(
            data.get("logic", "L"), tuple(lines), parse_formula(data["goal"], sig),
            tuple(parse_formula(p, sig) for p in data.get("premises", [])),
            None if conjuncts is None else tuple(parse_formula(c, sig) for c in conjuncts),
            sig,
        )
    except KeyError as exc:
        raise ScriptFormatError(f"proof script lacks field {exc.args[0]!r}") from None


def load_script(path) -> ProofScript:
    with open(path) as fh:
        return script_from_json(json.load(fh))


def shipped_script(name: str) -> ProofScript:
    """Load one of the bundled scripts, e.g. ``"barcan_g"``."""
    text = resources.files("admtl").joinpath("scripts", f"{name}.json").read_text()
    return script_from_json(json.loads(text))
