"""The arithmetic encoding: the sentence mu, window models, U_q and the
relativization check.

Over the extended signature ``{0, succ, +, *, e, q, prec}``, ``prec`` plays
the role of the order symbol and ``succ`` the successor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .grammar import parse_formula
from .semantics import Model, ModelError, PropFamily, TimeFlow, truth_set
from .syntax import (
    ARITH, ARITH_EXT, App, Const, Eq, Exists, Forall, Formula, Not, TranslationError, Var,
    conj, free_vars, is_temporal_free, normalize, relativize, subformulas, symbols,
)

MU_TEXT = (
    "forall x. dia (e(x) & G ~e(x) & H ~e(x))",
    "box (forall x. forall y. e(x) & e(y) -> x = y)",
    "box (forall x. forall y. prec(x, y) <-> dia (e(x) & F e(y)))",
    "box (forall x. q(x) -> box q(x))",
    "box (q(0) & (forall y. prec(y, 0) -> ~q(y)))",
    "box (forall x. q(x) -> prec(x, succ(x)) & q(succ(x))"
    " & (forall z. prec(x, z) & prec(z, succ(x)) -> ~q(z)))",
    "box (forall x. forall y. q(x) & q(y) -> q(x + y) & q(x * y))",
    "box (forall x. q(x) -> x + 0 = x)",
    "box (forall x. forall y. q(x) & q(y) -> x + succ(y) = succ(x + y))",
    "box (forall x. q(x) -> x * 0 = 0)",
    "box (forall x. forall y. q(x) & q(y) -> x * succ(y) = x * y + x)",
)

# the sixth conjunct with the antecedent restricted to q-elements that have a q-element above them
MU_BOUNDED_VI = (
    "box (forall x. q(x) & (exists z. prec(x, z) & q(z)) -> prec(x, succ(x)) & q(succ(x))"
    " & (forall z. prec(x, z) & prec(z, succ(x)) -> ~q(z)))"
)


def mu_conjuncts() -> tuple:
    return tuple(parse_formula(s, ARITH_EXT) for s in MU_TEXT)


def mu_bounded_conjuncts() -> tuple:
    texts = MU_TEXT[:5] + (MU_BOUNDED_VI,) + MU_TEXT[6:]
    return tuple(parse_formula(s, ARITH_EXT) for s in texts)


def mu() -> Formula:
    return conj(*mu_conjuncts())


def mu_bounded() -> Formula:
    return conj(*mu_bounded_conjuncts())


# --- window models ---------------------------------------------------------------

def build_window_model(N: int) -> Model:
    """Standard model with ``T = U = [-N, N]`` and arithmetic clamped into the window."""
    if N < 1:
        raise ValueError("window size must be at least 1")
    pts = tuple(range(-N, N + 1))
    flow = TimeFlow(pts)

    def clamp(v):
        return max(-N, min(N, v))

    full = flow.full
    pairs = list(itertools.product(pts, repeat=2))
    return Model(
        flow, PropFamily.powerset(flow), pts,
        constants={"0": 0},
        functions={"succ": {(a,): clamp(a + 1) for a in pts},
                   "+": {(a, b): clamp(a + b) for a, b in pairs},
                   "*": {(a, b): clamp(a * b) for a, b in pairs}},
        predicates={"e": {(a,): flow.mask([a]) for a in pts},
                    "q": {(a,): full if a >= 0 else 0 for a in pts},
                    "prec": {(a, b): full if a < b else 0 for a, b in pairs}},
    )


# --- U_q ---------------------------------------------------------------------------

class PreconditionError(ModelError):
    pass


class NonRigidError(PreconditionError):
    pass


class NotClosedError(PreconditionError):
    pass


@dataclass(frozen=True)
class QSubstructure:
    """The elements satisfying ``q`` somewhere, with the arithmetic restricted to them."""

    carrier: tuple
    zero: object
    succ: Mapping = field(default_factory=dict)
    plus: Mapping = field(default_factory=dict)
    times: Mapping = field(default_factory=dict)

    def apply(self, fn: str, args: tuple):
        if fn == "succ":
            return self.succ[args[0]]
        return (self.plus if fn == "+" else self.times)[args]


def rigid(M: Model, pred: str) -> bool:
    return all(X in (0, M.flow.full) for X in M.predicates[pred].values())


def extract_Uq(M: Model) -> QSubstructure:
    if "q" not in M.predicates:
        raise PreconditionError("the model does not interpret q")
    if not rigid(M, "q"):
        raise NonRigidError("q is not interpreted rigidly")
    carrier = tuple(a for a in M.universe if M.predicates["q"][(a,)])
    members = set(carrier)
    zero = M.constants.get("0")
    if zero not in members:
        raise NotClosedError("U_q does not contain 0")
    try:
        succ_t = {a: M.functions["succ"][(a,)] for a in carrier}
        plus_t = {(a, b): M.functions["+"][(a, b)] for a in carrier for b in carrier}
        times_t = {(a, b): M.functions["*"][(a, b)] for a in carrier for b in carrier}
    except KeyError as exc:
        raise PreconditionError(f"the model does not interpret {exc.args[0]}") from None
    for name, table in (("succ", succ_t), ("+", plus_t), ("*", times_t)):
        for args, v in table.items():
            if v not in members:
                raise NotClosedError(f"U_q is not closed under {name}: {args!r} -> {v!r}")
    return QSubstructure(carrier, zero, succ_t, plus_t, times_t)


def is_initial_segment(Q: QSubstructure) -> bool:
    """Carrier is ``0, 1, ..., n`` along successor, with successor fixing only the top."""
    seen, a = [], Q.zero
    while a not in seen:
        seen.append(a)
        a = Q.succ[a]
    return len(seen) == len(Q.carrier) and Q.succ[seen[-1]] == seen[-1]


# --- classical evaluation over U_q -------------------------------------------------

def check_arith(phi: Formula) -> None:
    """Raise :class:`TranslationError` unless ``phi`` is a formula of pure arithmetic."""
    if not is_temporal_free(phi):
        raise TranslationError("temporal operators are outside the arithmetic language")
    sig = symbols(phi)
    if sig.predicates:
        raise TranslationError(f"predicates {sorted(sig.predicates)} are outside the arithmetic language")
    if not (sig.constants <= ARITH.constants and set(sig.functions) <= set(ARITH.functions)):
        raise TranslationError("symbols outside 0, succ, +, *")


def _term(t, Q, f):
    if isinstance(t, Var):
        return f[t.name]
    if isinstance(t, Const):
        return Q.zero
    return Q.apply(t.fn, tuple(_term(a, Q, f) for a in t.args))


def _classical(phi, Q, f):
    if isinstance(phi, Eq):
        return _term(phi.left, Q, f) == _term(phi.right, Q, f)
    if isinstance(phi, Not):
        return not _classical(phi.body, Q, f)
    if isinstance(phi, Forall):
        g = dict(f)
        for a in Q.carrier:
            g[phi.var] = a
            if not _classical(phi.body, Q, g):
                return False
        return True
    return _classical(phi.left, Q, f) and _classical(phi.right, Q, f)


def eval_arith(phi: Formula, Q: QSubstructure, f: Mapping | None = None) -> bool:
    """Tarskian truth of ``phi`` in ``Q`` with quantifiers over the carrier."""
    check_arith(phi)
    f = dict(f or {})
    missing = free_vars(phi) - set(f)
    if missing:
        raise ModelError(f"variables {sorted(missing)} are unassigned")
    return _classical(normalize(phi), Q, f)


@dataclass
class TranslationReport:
    checked: int = 0
    agreed: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked == self.agreed


def check_translation(phi: Formula, M: Model, samples: Iterable | None = None) -> TranslationReport:
    """Compare ``eval_arith(phi)`` in ``U_q`` with ``phi``'s relativization in ``M``.

    ``samples`` is an iterable of ``(t, f)`` pairs with ``f`` into ``U_q``;
    by default every time and every assignment of the free variables is used.
    """
    check_arith(phi)
    Q = extract_Uq(M)
    phi_q = relativize(phi)
    report = TranslationReport()
    if samples is None:
        vs = sorted(free_vars(phi))
        assignments = [dict(zip(vs, vals)) for vals in itertools.product(Q.carrier, repeat=len(vs))]
        samples = ((t, f) for f in assignments for t in M.flow.points)
    cache = {}
    for t, f in samples:
        if any(v not in Q.carrier for v in f.values()):
            raise PreconditionError("assignments must map into U_q")
        key = tuple(sorted(f.items()))
        if key not in cache:
            cache[key] = (eval_arith(phi, Q, f), truth_set(phi_q, f, M))
        classical, X = cache[key]
        modal = bool(X >> M.flow.index(t) & 1)
        report.checked += 1
        if classical == modal:
            report.agreed += 1
        else:
            report.disagreements.append((t, dict(f)))
    return report


# --- the sentences of quantifier depth <= 2 used for the bounded check ---------------

def arith_terms(variables: Iterable[str], max_depth: int = 2) -> list:
    """All terms over ``0``, the variables, ``succ``, ``+`` and ``*`` up to ``max_depth``."""
    layer = [Const("0")] + [Var(v) for v in sorted(variables)]
    terms = list(layer)
    for _ in range(max_depth - 1):
        new = [App("succ", (a,)) for a in terms]
        new += [App(fn, (a, b)) for fn in ("+", "*") for a in terms for b in terms]
        terms = terms + [t for t in new if t not in terms]
    return terms


def arith_sentences(max_term_depth: int = 2):
    """Prenex sentences with at most two quantifiers over an atom or negated atom.

    Prefixes are the empty one, ``Qx`` and ``Qx Qy`` for ``Q`` in forall/exists;
    the matrix ranges over equations between terms of the given depth that
    only use the bound variables.
    """
    prefixes = [()] + [((q, "x"),) for q in (Forall, Exists)]
    prefixes += [((q1, "x"), (q2, "y")) for q1 in (Forall, Exists) for q2 in (Forall, Exists)]
    for prefix in prefixes:
        terms = arith_terms([v for _, v in prefix], max_term_depth)
        for a in terms:
            for b in terms:
                for matrix in (Eq(a, b), Not(Eq(a, b))):
                    phi = matrix
                    for q, v in reversed(prefix):
                        phi = q(v, phi)
                    yield phi


# --- the embedding of U into time given by e ---------------------------------------

def theta_map(M: Model) -> dict:
    """Each element's unique ``e``-time; raises if some element has none or several."""
    out = {}
    for a in M.universe:
        pts = M.flow.members(M.predicates["e"][(a,)])
        if len(pts) != 1:
            raise PreconditionError(f"{a!r} satisfies e at {len(pts)} times")
        out[a] = pts[0]
    return out


def prec_matches_theta(M: Model) -> bool:
    """``a prec b`` holds (rigidly) exactly when ``theta(a) < theta(b)``."""
    theta = theta_map(M)
    full = M.flow.full
    for (a, b), X in M.predicates["prec"].items():
        want = full if M.flow.less(theta[a], theta[b]) else 0
        if X != want:
            return False
    return True


def holds_somewhere(M: Model, phi: Formula) -> bool:
    return truth_set(phi, {}, M) != 0


def holds_everywhere(M: Model, phi: Formula) -> bool:
    return truth_set(phi, {}, M) == M.flow.full


def quantifier_count(phi: Formula) -> int:
    return sum(isinstance(s, (Forall, Exists)) for s in subformulas(phi))
