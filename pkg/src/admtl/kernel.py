"""Hilbert-style proof checking for the logics L, L_Q and L_R.

Every proof line names its justification explicitly: an axiom scheme with
a full instantiation of its metavariables, a premise, Modus Ponens, or one
of the generalisation rules. The checker never searches or unifies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .syntax import (
    ATOMIC, And, Box, Eq, F, Forall, Formula, G, H, Implies, Not, Or, P, Term,
    free_for, free_vars, mirror, normalize, canonical, partial_replace, substitute,
)

LOGICS = ("L", "L_Q", "L_R")
TAUT_ATOM_LIMIT = 20


class KernelError(ValueError):
    pass


class SideConditionError(KernelError):
    """The instantiation violates a side condition of the scheme."""


class InstantiationError(KernelError):
    """The instantiation is missing a metavariable or gives one the wrong kind."""


class TautologyLimitError(KernelError):
    pass


class EntailmentError(KernelError):
    pass


# --- tautologies -------------------------------------------------------------

def _skeleton_atoms(phi, atoms):
    if isinstance(phi, Not):
        _skeleton_atoms(phi.body, atoms)
    elif isinstance(phi, And):
        _skeleton_atoms(phi.left, atoms)
        _skeleton_atoms(phi.right, atoms)
    elif phi not in atoms:
        atoms[phi] = len(atoms)


def is_tautology_instance(phi: Formula) -> bool:
    """Truth-table check of the Boolean skeleton of ``phi``.

    Maximal subformulas not headed by a Boolean connective act as atoms; the
    table is evaluated column-wise with one bit per row.
    """
    core = normalize(phi)
    atoms = {}
    _skeleton_atoms(core, atoms)
    n = len(atoms)
    if n > TAUT_ATOM_LIMIT:
        raise TautologyLimitError(f"{n} propositional atoms exceed the limit of {TAUT_ATOM_LIMIT}")
    rows = 1 << n
    full = (1 << rows) - 1
    columns = {}
    for atom, k in atoms.items():
        block = (1 << (1 << k)) - 1          # 2^k ones
        period = block << (1 << k)           # pattern repeats every 2^(k+1) rows
        col, length = period, 1 << (k + 1)
        while length < rows:
            col |= col << length
            length <<= 1
        columns[atom] = col & full

    def ev(f):
        if isinstance(f, Not):
            return full ^ ev(f.body)
        if isinstance(f, And):
            return ev(f.left) & ev(f.right)
        return columns[f]

    return ev(core) == full


# --- axiom schemes -------------------------------------------------------------

@dataclass(frozen=True)
class Scheme:
    name: str
    tier: str
    frame: str
    mirror: str
    params: tuple
    build: Callable = field(repr=False)


def _univ_inst(i):
    phi, x, tau = i["phi"], i["x"], i["tau"]
    if not free_for(tau, x, phi):
        raise SideConditionError(f"{tau} is not free for {x} in {phi}")
    return Implies(Forall(x, phi), substitute(phi, x, tau))


def _vac_quant(i):
    phi, x = i["phi"], i["x"]
    if x in free_vars(phi):
        raise SideConditionError(f"{x} is free in {phi}")
    return Implies(phi, Forall(x, phi))


def _subst_id(i):
    phi = i["phi"]
    if not isinstance(phi, ATOMIC):
        raise SideConditionError(f"{phi} is not atomic")
    try:
        replaced = partial_replace(phi, i["tau"], i["tau2"], i["mask"])
    except ValueError as exc:
        raise SideConditionError(str(exc)) from None
    return Implies(Eq(i["tau"], i["tau2"]), Implies(phi, replaced))


def _lin(M):
    def build(i):
        a, b = i["phi"], i["psi"]
        return Implies(And(M(a), M(b)),
                       Or(Or(M(And(a, b)), M(And(a, M(b)))), M(And(M(a), b))))
    return build


_F, _T, _V, _MASK = "formula", "term", "var", "mask"

_SCHEMES = [
    Scheme("Taut", "L", "all-finite-linear", "Taut", (), lambda i: None),
    Scheme("UnivInst", "L", "all-finite-linear", "UnivInst",
           (("phi", _F), ("x", _V), ("tau", _T)), _univ_inst),
    Scheme("UnivDist", "L", "all-finite-linear", "UnivDist",
           (("phi", _F), ("psi", _F), ("x", _V)),
           lambda i: Implies(Forall(i["x"], Implies(i["phi"], i["psi"])),
                             Implies(Forall(i["x"], i["phi"]), Forall(i["x"], i["psi"])))),
    Scheme("VacQuant", "L", "all-finite-linear", "VacQuant", (("phi", _F), ("x", _V)), _vac_quant),
    Scheme("SelfId", "L", "all-finite-linear", "SelfId", (("tau", _T),),
           lambda i: Eq(i["tau"], i["tau"])),
    Scheme("SubstId", "L", "all-finite-linear", "SubstId",
           (("tau", _T), ("tau2", _T), ("phi", _F), ("mask", _MASK)), _subst_id),
    Scheme("RigidId", "L", "all-finite-linear", "RigidId", (("tau", _T), ("tau2", _T)),
           lambda i: Implies(Eq(i["tau"], i["tau2"]), Box(Eq(i["tau"], i["tau2"])))),
    Scheme("K_G", "L", "all-finite-linear", "K_H", (("phi", _F), ("psi", _F)),
           lambda i: Implies(G(Implies(i["phi"], i["psi"])), Implies(G(i["phi"]), G(i["psi"])))),
    Scheme("K_H", "L", "all-finite-linear", "K_G", (("phi", _F), ("psi", _F)),
           lambda i: Implies(H(Implies(i["phi"], i["psi"])), Implies(H(i["phi"]), H(i["psi"])))),
    Scheme("GP", "L", "all-finite-linear", "HF", (("phi", _F),),
           lambda i: Implies(i["phi"], G(P(i["phi"])))),
    Scheme("HF", "L", "all-finite-linear", "GP", (("phi", _F),),
           lambda i: Implies(i["phi"], H(F(i["phi"])))),
    Scheme("Trans_G", "L_Q", "all-finite-linear", "Trans_H", (("phi", _F),),
           lambda i: Implies(G(i["phi"]), G(G(i["phi"])))),
    Scheme("Trans_H", "L_Q", "all-finite-linear", "Trans_G", (("phi", _F),),
           lambda i: Implies(H(i["phi"]), H(H(i["phi"])))),
    Scheme("LinFut", "L_Q", "all-finite-linear", "LinPast", (("phi", _F), ("psi", _F)), _lin(F)),
    Scheme("LinPast", "L_Q", "all-finite-linear", "LinFut", (("phi", _F), ("psi", _F)), _lin(P)),
    Scheme("Endless_G", "L_Q", "endless-only", "Endless_H", (("phi", _F),),
           lambda i: Implies(G(i["phi"]), F(i["phi"]))),
    Scheme("Endless_H", "L_Q", "endless-only", "Endless_G", (("phi", _F),),
           lambda i: Implies(H(i["phi"]), P(i["phi"]))),
    Scheme("Dense_G", "L_Q", "dense-only", "Dense_H", (("phi", _F),),
           lambda i: Implies(G(G(i["phi"])), G(i["phi"]))),
    Scheme("Dense_H", "L_Q", "dense-only", "Dense_G", (("phi", _F),),
           lambda i: Implies(H(H(i["phi"])), H(i["phi"]))),
    Scheme("DedekindCty", "L_R", "all-finite-linear", "DedekindCtyMirror", (("phi", _F),),
           lambda i: Implies(Box(Implies(G(i["phi"]), P(G(i["phi"])))),
                             Implies(G(i["phi"]), H(i["phi"])))),
    # the mirror image is an L_R theorem; listing it keeps mirror_proof closed
    Scheme("DedekindCtyMirror", "L_R", "all-finite-linear", "DedekindCty", (("phi", _F),),
           lambda i: Implies(Box(Implies(H(i["phi"]), F(H(i["phi"])))),
                             Implies(H(i["phi"]), G(i["phi"])))),
]

SCHEMES: dict = {s.name: s for s in _SCHEMES}


def tier_rank(logic: str) -> int:
    try:
        return LOGICS.index(logic)
    except ValueError:
        raise KernelError(f"unknown logic {logic!r}") from None


def _check_inst(scheme: Scheme, inst: Mapping):
    for key, kind in scheme.params:
        if key not in inst:
            raise InstantiationError(f"{scheme.name} needs a value for {key}")
        v = inst[key]
        ok = {"formula": isinstance(v, Formula), "term": isinstance(v, Term),
              "var": isinstance(v, str), "mask": isinstance(v, (list, tuple, frozenset, set))
              and all(isinstance(k, int) for k in v)}[kind]
        if not ok:
            raise InstantiationError(f"{scheme.name}: {key} must be a {kind}")


def instantiate(name: str, inst: Mapping) -> Formula:
    """Build the instance of scheme ``name``; raises on side-condition violations."""
    scheme = SCHEMES.get(name)
    if scheme is None:
        raise InstantiationError(f"unknown axiom scheme {name!r}")
    if name == "Taut":
        raise InstantiationError("Taut has no schematic form")
    _check_inst(scheme, inst)
    return scheme.build(inst)


def match_axiom(name: str, inst: Mapping, candidate: Formula) -> bool:
    """True iff ``candidate`` is the instance of ``name`` under ``inst``.

    Side-condition failures return False here; :func:`instantiate` raises
    :class:`SideConditionError` for callers that need the reason.
    """
    if name == "Taut":
        try:
            return is_tautology_instance(candidate)
        except TautologyLimitError:
            return False
    try:
        built = instantiate(name, inst)
    except KernelError:
        return False
    return canonical(built) == canonical(candidate)


# --- proofs --------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str
    inst: Mapping = field(default_factory=dict)

    def __hash__(self):
        return hash((self.name, tuple(sorted((k, _hashable(v)) for k, v in self.inst.items()))))


def _hashable(v):
    return tuple(v) if isinstance(v, (list, set, frozenset)) else v


@dataclass(frozen=True)
class Premise:
    index: int


@dataclass(frozen=True)
class MP:
    minor: int
    major: int


@dataclass(frozen=True)
class GenG:
    source: int


@dataclass(frozen=True)
class GenH:
    source: int


@dataclass(frozen=True)
class GenForall:
    source: int
    var: str


@dataclass(frozen=True)
class ProofLine:
    id: int
    formula: Formula
    just: object


@dataclass(frozen=True)
class ProofScript:
    logic: str
    lines: tuple
    goal: Formula
    premises: tuple = ()
    conjuncts: tuple | None = None   # members of delta for entails, right-nested
    signature: object = None

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.conjuncts is not None:
            object.__setattr__(self, "conjuncts", tuple(self.conjuncts))


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.accepted


def _reject(line, reason):
    return Verdict(False, line, reason)


def check_proof(script: ProofScript) -> Verdict:
    try:
        rank = tier_rank(script.logic)
    except KernelError as exc:
        return _reject(None, str(exc))
    if not script.lines:
        return _reject(None, "empty proof")
    formulas, tainted = {}, {}
    last_id = None
    for line in script.lines:
        lid, phi, just = line.id, line.formula, line.just
        if last_id is not None and lid <= last_id:
            return _reject(lid, "line ids must increase")
        last_id = lid

        def cited(k):
            if k not in formulas:
                raise KernelError(f"cites line {k}, which is not an earlier line")
            return formulas[k]

        try:
            if isinstance(just, Axiom):
                scheme = SCHEMES.get(just.name)
                if scheme is None:
                    return _reject(lid, f"unknown axiom scheme {just.name!r}")
                if tier_rank(scheme.tier) > rank:
                    return _reject(lid, f"{just.name} belongs to {scheme.tier}, not {script.logic}")
                if just.name == "Taut":
                    if not is_tautology_instance(phi):
                        return _reject(lid, "not a tautology instance")
                else:
                    built = instantiate(just.name, just.inst)
                    if canonical(built) != canonical(phi):
                        return _reject(lid, f"formula does not match {just.name} under the given instantiation")
                taint = False
            elif isinstance(just, Premise):
                if not 0 <= just.index < len(script.premises):
                    return _reject(lid, f"no premise {just.index}")
                if canonical(script.premises[just.index]) != canonical(phi):
                    return _reject(lid, "formula differs from the cited premise")
                taint = True
            elif isinstance(just, MP):
                minor, major = cited(just.minor), cited(just.major)
                if canonical(major) != canonical(Implies(minor, phi)):
                    return _reject(lid, f"line {just.major} is not line {just.minor} -> this line")
                taint = tainted[just.minor] or tainted[just.major]
            elif isinstance(just, (GenG, GenH, GenForall)):
                src = cited(just.source)
                if tainted[just.source]:
                    return _reject(lid, "generalisation applied to a line depending on premises")
                if isinstance(just, GenG):
                    expected = G(src)
                elif isinstance(just, GenH):
                    expected = H(src)
                else:
                    expected = Forall(just.var, src)
                if canonical(expected) != canonical(phi):
                    return _reject(lid, "formula is not the generalisation of the cited line")
                taint = False
            else:
                return _reject(lid, f"unknown justification {just!r}")
        except SideConditionError as exc:
            return _reject(lid, f"side condition violated: {exc}")
        except KernelError as exc:
            return _reject(lid, str(exc))
        formulas[lid], tainted[lid] = phi, taint
    last = script.lines[-1]
    if canonical(last.formula) != canonical(script.goal):
        return _reject(last.id, "last line is not the goal")
    return Verdict(True)


def _split_conjunction(delta_formula, members):
    """Right-nested decomposition of ``delta_formula`` into members of ``members``."""
    norm = [canonical(m) for m in members]
    out, cur = [], canonical(delta_formula)
    while True:
        if cur in norm:
            out.append(cur)
            return out
        if isinstance(cur, And) and cur.left in norm:
            out.append(cur.left)
            cur = cur.right
            continue
        raise EntailmentError(f"conjunct {cur} is not a member of the premise set")


def entails(delta: Sequence[Formula], phi: Formula, script: ProofScript) -> bool:
    """Decide ``delta |- phi`` from a theorem ``conj -> phi`` proved by ``script``."""
    if script.premises:
        raise EntailmentError("entailment scripts must prove a theorem, without premises")
    goal = script.goal
    if not isinstance(goal, Implies):
        core = canonical(goal)
        if not (isinstance(core, Not) and isinstance(core.body, And)
                and isinstance(core.body.right, Not)):
            return False
        antecedent, consequent = core.body.left, core.body.right.body
    else:
        antecedent, consequent = goal.left, goal.right
    if canonical(consequent) != canonical(phi):
        return False
    if script.conjuncts is not None:
        from .syntax import conj
        if canonical(conj(*script.conjuncts)) != canonical(antecedent):
            raise EntailmentError("recorded conjuncts do not form the antecedent")
        norm_delta = [canonical(d) for d in delta]
        for c in script.conjuncts:
            if canonical(c) not in norm_delta:
                raise EntailmentError(f"conjunct {c} is not a member of the premise set")
    else:
        _split_conjunction(antecedent, delta)
    return check_proof(script).accepted


# --- mirror images -------------------------------------------------------------

def _mirror_value(v):
    return mirror(v) if isinstance(v, Formula) else v


def mirror_justification(just):
    if isinstance(just, Axiom):
        return Axiom(SCHEMES[just.name].mirror if just.name in SCHEMES else just.name,
                     {k: _mirror_value(v) for k, v in just.inst.items()})
    if isinstance(just, GenG):
        return GenH(just.source)
    if isinstance(just, GenH):
        return GenG(just.source)
    return just


def mirror_proof(script: ProofScript) -> ProofScript:
    return ProofScript(
        script.logic,
        tuple(ProofLine(l.id, mirror(l.formula), mirror_justification(l.just)) for l in script.lines),
        mirror(script.goal),
        tuple(mirror(p) for p in script.premises),
        None if script.conjuncts is None else tuple(mirror(c) for c in script.conjuncts),
        script.signature,
    )


def tiers_used(script: ProofScript) -> set:
    return {SCHEMES[l.just.name].tier for l in script.lines
            if isinstance(l.just, Axiom) and l.just.name in SCHEMES}
