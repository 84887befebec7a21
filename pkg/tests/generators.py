"""Random terms, formulas and models shared by the test modules."""

from __future__ import annotations

import itertools
import random

from admtl.kernel import MP, Axiom, GenForall, GenG, GenH, ProofLine, ProofScript
from admtl.semantics import Model, PropFamily, TimeFlow, standard_model
from admtl.syntax import (
    And, App, Box, Const, Dia, Eq, Exists, F, Forall, G, H, Iff, Implies, Not, Or, P, Pred,
    Signature, Var,
)

SIG = Signature(frozenset({"c", "d"}), {"f": 1, "g": 2}, {"p": 1, "r": 2, "s": 0})
VARS = ("x", "y", "z")

_UNARY_SUGAR = (Not, G, H, F, P, Box, Dia)
_UNARY_CORE = (Not, G, H)
_BINARY_SUGAR = (And, Or, Implies, Iff)


def rand_term(rng: random.Random, sig=SIG, variables=VARS, depth=2):
    leaves = [Var(v) for v in variables] + [Const(c) for c in sorted(sig.constants)]
    if depth <= 1 or not sig.functions or rng.random() < 0.5:
        return rng.choice(leaves)
    fn = rng.choice(sorted(sig.functions))
    return App(fn, tuple(rand_term(rng, sig, variables, depth - 1)
                         for _ in range(sig.functions[fn])))


def rand_atom(rng, sig=SIG, variables=VARS, term_depth=2):
    if rng.random() < 0.25:
        return Eq(rand_term(rng, sig, variables, term_depth), rand_term(rng, sig, variables, term_depth))
    name = rng.choice(sorted(sig.predicates))
    return Pred(name, tuple(rand_term(rng, sig, variables, term_depth)
                            for _ in range(sig.predicates[name])))


def rand_formula(rng: random.Random, depth=4, sig=SIG, variables=VARS, *, sugar=True,
                 quantifiers=True, temporal=True, term_depth=2):
    """Random formula of height at most ``depth``."""
    if depth <= 1 or rng.random() < 0.2:
        return rand_atom(rng, sig, variables, term_depth)
    unary = _UNARY_SUGAR if sugar else _UNARY_CORE
    if not temporal:
        unary = (Not,)
    binary = _BINARY_SUGAR if sugar else (And,)
    quants = ((Forall, Exists) if sugar else (Forall,)) if quantifiers else ()
    kind = rng.random()
    sub = lambda: rand_formula(rng, depth - 1, sig, variables, sugar=sugar,
                               quantifiers=quantifiers, temporal=temporal, term_depth=term_depth)
    if kind < 0.35:
        return rng.choice(unary)(sub())
    if kind < 0.75 or not quants:
        return rng.choice(binary)(sub(), sub())
    return rng.choice(quants)(rng.choice(variables), sub())


def _tables(rng, sig, universe, value):
    functions = {name: {args: rng.choice(universe) for args in itertools.product(universe, repeat=k)}
                 for name, k in sig.functions.items()}
    predicates = {name: {args: value() for args in itertools.product(universe, repeat=k)}
                  for name, k in sig.predicates.items()}
    constants = {c: rng.choice(universe) for c in sig.constants}
    return constants, functions, predicates


def rand_standard_model(rng: random.Random, sig=SIG, tmax=4, umax=3, tsize=None, usize=None) -> Model:
    n = tsize or rng.randint(1, tmax)
    u = usize or rng.randint(1, umax)
    flow = TimeFlow.of_size(n)
    universe = tuple(range(u))
    constants, functions, predicates = _tables(rng, sig, universe, lambda: rng.randrange(flow.full + 1))
    return standard_model(flow, universe, constants, functions, predicates)


def partition_family(rng: random.Random, flow: TimeFlow) -> PropFamily:
    """Boolean algebra generated by a random partition of ``T``: all unions of blocks."""
    blocks = {}
    for i in range(len(flow)):
        label = rng.randrange(len(flow))
        blocks[label] = blocks.get(label, 0) | 1 << i
    atoms = list(blocks.values())
    members = set()
    for pick in itertools.product((0, 1), repeat=len(atoms)):
        X = 0
        for bit, a in zip(pick, atoms):
            if bit:
                X |= a
        members.add(X)
    return PropFamily.of(flow, members)


def rand_premodel(rng: random.Random, sig=SIG, tmax=5, umax=3) -> Model:
    """A model over a Boolean (not necessarily temporally closed) family; atoms are admissible."""
    flow = TimeFlow.of_size(rng.randint(1, tmax))
    prop = partition_family(rng, flow)
    members = list(prop)
    universe = tuple(range(rng.randint(1, umax)))
    constants, functions, predicates = _tables(rng, sig, universe, lambda: rng.choice(members))
    return Model(flow, prop, universe, constants, functions, predicates, check=False)


def rand_assignment(rng, M, variables=VARS):
    return {v: rng.choice(M.universe) for v in variables}


# --- axiom instances ---------------------------------------------------------------

def _subterms(t):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _subterms(a)


def rand_instance(rng: random.Random, name: str, depth=3, sig=SIG, tries=200):
    """Random instantiation map for scheme ``name`` satisfying its side conditions."""
    from admtl.kernel import SCHEMES, KernelError, instantiate
    from admtl.syntax import atom_terms, occurrences

    scheme = SCHEMES[name]
    for _ in range(tries):
        inst = {}
        for key, kind in scheme.params:
            if kind == "formula":
                inst[key] = rand_formula(rng, depth, sig)
            elif kind == "term":
                inst[key] = rand_term(rng, sig)
            elif kind == "var":
                inst[key] = rng.choice(VARS)
        if name == "SubstId":
            atom = rand_atom(rng, sig)
            subs = [s for t in atom_terms(atom) for s in _subterms(t)]
            if not subs:
                continue
            inst["phi"] = atom
            inst["tau"] = rng.choice(subs)
            n = len(occurrences(atom, inst["tau"]))
            inst["mask"] = tuple(k for k in range(n) if rng.random() < 0.5)
        try:
            instantiate(name, inst)
        except KernelError:
            continue
        return inst
    raise RuntimeError(f"no instance of {name} found")


# --- proof mutations --------------------------------------------------------------

def mutate(script: ProofScript, rng: random.Random) -> ProofScript:
    """Change one line's formula or justification."""
    lines = list(script.lines)
    k = rng.randrange(len(lines))
    line = lines[k]
    ids = [l.id for l in lines]
    choice = rng.randrange(4)
    if choice == 0:
        new = ProofLine(line.id, Not(line.formula), line.just)
    elif choice == 1:
        other = rng.choice([l for l in lines if l.formula != line.formula])
        new = ProofLine(line.id, other.formula, line.just)
    elif choice == 2:
        new = ProofLine(line.id, rand_formula(rng, 4), line.just)
    else:
        just = line.just
        if isinstance(just, MP):
            a, b = rng.choice(ids), rng.choice(ids)
            if (a, b) == (just.minor, just.major):
                a, b = b, a
            just = MP(a, b)
        elif isinstance(just, (GenG, GenH)):
            just = GenH(just.source) if isinstance(just, GenG) else GenG(just.source)
        elif isinstance(just, GenForall):
            just = GenForall(just.source, "zz")
        elif just.name == "Taut":
            just = Axiom("K_G", {"phi": Pred("p", ()), "psi": Pred("p", ())})
        else:
            just = Axiom("Taut", {})
        new = ProofLine(line.id, line.formula, just)
    lines[k] = new
    return ProofScript(script.logic, tuple(lines), script.goal, script.premises,
                       script.conjuncts, script.signature)
