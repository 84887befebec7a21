"""Terms, formulas and the syntactic operations on them.

Formulas are immutable trees. The core connectives are ``Not``, ``And``,
``G``, ``H``, ``Forall``, ``Eq`` and ``Pred``; everything else (``Or``,
``Implies``, ``Iff``, ``Exists``, ``F``, ``P``, ``Box``, ``Dia``) is sugar that
:func:`normalize` expands into the core.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping


class SyntaxError_(ValueError):
    """Base class for malformed syntax (named to avoid shadowing the builtin)."""


class SignatureError(SyntaxError_):
    pass


class CaptureError(SyntaxError_):
    """A substitution would capture a variable of the substituted term."""


class NotAtomicError(SyntaxError_):
    pass


class MaskError(SyntaxError_):
    pass


class UncoveredVariableError(SyntaxError_):
    pass


class TranslationError(SyntaxError_):
    pass


@dataclass(frozen=True)
class Signature:
    constants: frozenset = frozenset()
    functions: Mapping[str, int] = field(default_factory=dict)
    predicates: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constants", frozenset(self.constants))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))
        kinds = [set(self.constants), set(self.functions), set(self.predicates)]
        for i in range(3):
            for j in range(i + 1, 3):
                clash = kinds[i] & kinds[j]
                if clash:
                    raise SignatureError(f"symbol used with two kinds: {sorted(clash)}")
        for name, n in self.functions.items():
            if n < 1:
                raise SignatureError(f"function {name} needs arity >= 1")
        for name, n in self.predicates.items():
            if n < 0:
                raise SignatureError(f"predicate {name} has negative arity")

    def __hash__(self):
        return hash((self.constants, tuple(sorted(self.functions.items())),
                     tuple(sorted(self.predicates.items()))))

    def union(self, other: "Signature") -> "Signature":
        return Signature(self.constants | other.constants,
                         {**self.functions, **other.functions},
                         {**self.predicates, **other.predicates})

    def to_json(self) -> dict:
        return {"constants": sorted(self.constants),
                "functions": dict(sorted(self.functions.items())),
                "predicates": dict(sorted(self.predicates.items()))}

    @classmethod
    def from_json(cls, data: Mapping) -> "Signature":
        return cls(frozenset(data.get("constants", ())),
                   dict(data.get("functions", {})),
                   dict(data.get("predicates", {})))


# --- terms -----------------------------------------------------------------

class Term:
    __slots__ = ()

    def __str__(self):
        from .grammar import print_term
        return print_term(self)


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(Term):
    name: str

    def __repr__(self):
        return f"Const({self.name!r})"


@dataclass(frozen=True, repr=False)
class App(Term):
    fn: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self):
        return f"App({self.fn!r}, {self.args!r})"


# --- formulas --------------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self):
        from .grammar import print_formula
        return print_formula(self)


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class G(Formula):
    body: Formula


@dataclass(frozen=True)
class H(Formula):
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


# sugar

@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class F(Formula):
    body: Formula


@dataclass(frozen=True)
class P(Formula):
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula


ATOMIC = (Pred, Eq)
UNARY = (Not, G, H, F, P, Box, Dia)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)
TEMPORAL = (G, H, F, P, Box, Dia)
CORE = (Pred, Eq, Not, And, G, H, Forall)


def conj(*parts: Formula) -> Formula:
    """Right-nested conjunction of one or more formulas."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


# --- traversal helpers -----------------------------------------------------

def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    out = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_depth(t: Term) -> int:
    """Height of the term tree; variables and constants have depth 1."""
    if isinstance(t, App):
        return 1 + max(term_depth(a) for a in t.args)
    return 1


def children(phi: Formula) -> tuple:
    if isinstance(phi, ATOMIC):
        return ()
    if isinstance(phi, (Not, G, H, F, P, Box, Dia, Forall, Exists)):
        return (phi.body,)
    return (phi.left, phi.right)


def rebuild(phi: Formula, kids: tuple) -> Formula:
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, kids[0])
    if isinstance(phi, UNARY):
        return type(phi)(kids[0])
    return type(phi)(kids[0], kids[1])


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over all subformulas including ``phi`` itself."""
    stack = [phi]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(children(cur)))


def atom_terms(phi: Formula) -> tuple:
    if isinstance(phi, Pred):
        return phi.args
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    return ()


def symbols(phi: Formula) -> Signature:
    """The smallest signature ``phi`` is written over."""
    consts, funcs, preds = set(), {}, {}

    def walk_term(t):
        if isinstance(t, Const):
            consts.add(t.name)
        elif isinstance(t, App):
            funcs[t.fn] = len(t.args)
            for a in t.args:
                walk_term(a)

    for sub in subformulas(phi):
        if isinstance(sub, Pred):
            preds[sub.name] = len(sub.args)
        for t in atom_terms(sub):
            walk_term(t)
    return Signature(frozenset(consts), funcs, preds)


def check_signature(phi: Formula, sig: Signature) -> None:
    """Raise :class:`SignatureError` unless every symbol of ``phi`` is declared with the right arity."""
    used = symbols(phi)
    for c in used.constants:
        if c not in sig.constants:
            raise SignatureError(f"unknown constant {c}")
    for name, n in used.functions.items():
        if name not in sig.functions:
            raise SignatureError(f"unknown function {name}")
        if sig.functions[name] != n:
            raise SignatureError(f"function {name} expects {sig.functions[name]} arguments, got {n}")
    for name, n in used.predicates.items():
        if name not in sig.predicates:
            raise SignatureError(f"unknown predicate {name}")
        if sig.predicates[name] != n:
            raise SignatureError(f"predicate {name} expects {sig.predicates[name]} arguments, got {n}")


def is_temporal_free(phi: Formula) -> bool:
    return not any(isinstance(s, TEMPORAL) for s in subformulas(phi))


def quantifier_depth(phi: Formula) -> int:
    if isinstance(phi, ATOMIC):
        return 0
    inner = max(quantifier_depth(c) for c in children(phi))
    return inner + 1 if isinstance(phi, QUANTIFIERS) else inner


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, ATOMIC):
        return 0
    inner = max(modal_depth(c) for c in children(phi))
    return inner + 1 if isinstance(phi, TEMPORAL) else inner


# --- normalization ---------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def normalize(phi: Formula) -> Formula:
    """Expand every sugar node into the core connectives.

    ``a -> b`` becomes ``~(a & ~b)``, ``a | b`` becomes ``~(~a & ~b)``,
    ``a <-> b`` becomes ``(a -> b) & (b -> a)``, ``box a`` becomes
    ``(H a & a) & G a`` and ``dia a`` becomes ``(P a | a) | F a``.
    """
    if isinstance(phi, ATOMIC):
        return phi
    if isinstance(phi, Not):
        return Not(normalize(phi.body))
    if isinstance(phi, And):
        return And(normalize(phi.left), normalize(phi.right))
    if isinstance(phi, G):
        return G(normalize(phi.body))
    if isinstance(phi, H):
        return H(normalize(phi.body))
    if isinstance(phi, Forall):
        return Forall(phi.var, normalize(phi.body))
    if isinstance(phi, Or):
        return Not(And(Not(normalize(phi.left)), Not(normalize(phi.right))))
    if isinstance(phi, Implies):
        return Not(And(normalize(phi.left), Not(normalize(phi.right))))
    if isinstance(phi, Iff):
        return normalize(And(Implies(phi.left, phi.right), Implies(phi.right, phi.left)))
    if isinstance(phi, Exists):
        return Not(Forall(phi.var, Not(normalize(phi.body))))
    if isinstance(phi, F):
        return Not(G(Not(normalize(phi.body))))
    if isinstance(phi, P):
        return Not(H(Not(normalize(phi.body))))
    if isinstance(phi, Box):
        b = normalize(phi.body)
        return And(And(H(b), b), G(b))
    if isinstance(phi, Dia):
        return normalize(Or(Or(P(phi.body), phi.body), F(phi.body)))
    raise TypeError(f"not a formula: {phi!r}")


def _box_core(a: Formula, first, last) -> Formula:
    return And(And(first(a), a), last(a))


def _dia_core(a: Formula, first, last) -> Formula:
    inner = Not(And(Not(Not(first(Not(a)))), Not(a)))
    return Not(And(Not(inner), Not(Not(last(Not(a))))))


def _unmirrored(phi: Formula):
    """The standard expansion if ``phi`` is a box or dia expansion with G and H swapped."""
    if isinstance(phi, And) and isinstance(phi.right, H) and isinstance(phi.left, And) \
            and isinstance(phi.left.left, G):
        a = phi.right.body
        if phi == _box_core(a, G, H):
            return _box_core(a, H, G)
    if isinstance(phi, Not) and isinstance(phi.body, And):
        tail = phi.body.right
        if isinstance(tail, Not) and isinstance(tail.body, Not) and isinstance(tail.body.body, H) \
                and isinstance(tail.body.body.body, Not):
            a = tail.body.body.body.body
            if phi == _dia_core(a, G, H):
                return _dia_core(a, H, G)
    return None


@lru_cache(maxsize=1 << 16)
def _fold(phi: Formula) -> Formula:
    if isinstance(phi, ATOMIC):
        return phi
    out = rebuild(phi, tuple(_fold(c) for c in children(phi)))
    std = _unmirrored(out)
    return out if std is None else std


def canonical(phi: Formula) -> Formula:
    """Core form in which every box or dia expansion lists its H part first.

    The plain mirror of ``(H a & a) & G a`` is ``(G a & a) & H a``; reading
    both as the same formula makes ``canonical`` commute with :func:`mirror`.
    """
    return _fold(normalize(phi))


def same_formula(a: Formula, b: Formula) -> bool:
    """Syntactic identity modulo sugar."""
    return a == b or canonical(a) == canonical(b)


# --- variables and substitution --------------------------------------------

@lru_cache(maxsize=1 << 16)
def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, ATOMIC):
        out = frozenset()
        for t in atom_terms(phi):
            out |= term_vars(t)
        return out
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    out = frozenset()
    for c in children(phi):
        out |= free_vars(c)
    return out


def is_sentence(phi: Formula) -> bool:
    return not free_vars(phi)


def free_for(tau: Term, x: str, phi: Formula) -> bool:
    """True iff no free occurrence of ``x`` in ``phi`` sits under a binder of a variable of ``tau``."""
    danger = term_vars(tau) - {x}
    if not danger:
        return True

    def ok(f, bound):
        if isinstance(f, ATOMIC):
            if x in bound:
                return True
            hit = any(x in term_vars(t) for t in atom_terms(f))
            return not (hit and bound & danger)
        if isinstance(f, QUANTIFIERS):
            return ok(f.body, bound | {f.var})
        return all(ok(c, bound) for c in children(f))

    return ok(phi, frozenset())


def subst_term(t: Term, x: str, tau: Term) -> Term:
    if isinstance(t, Var):
        return tau if t.name == x else t
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(subst_term(a, x, tau) for a in t.args))


def _subst(phi: Formula, x: str, tau: Term) -> Formula:
    if isinstance(phi, Pred):
        return Pred(phi.name, tuple(subst_term(a, x, tau) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, x, tau), subst_term(phi.right, x, tau))
    if isinstance(phi, QUANTIFIERS):
        if phi.var == x:
            return phi
        return type(phi)(phi.var, _subst(phi.body, x, tau))
    return rebuild(phi, tuple(_subst(c, x, tau) for c in children(phi)))


def substitute(phi: Formula, x: str, tau: Term) -> Formula:
    """``phi(tau/x)``: replace every free occurrence of ``x`` by ``tau``.

    No renaming is done; a capturing substitution raises :class:`CaptureError`.
    """
    if not free_for(tau, x, phi):
        raise CaptureError(f"{tau} is not free for {x} in {phi}")
    return _subst(phi, x, tau)


def _occurrences(t: Term, target: Term, path=()):
    if t == target:
        yield path
        return
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from _occurrences(a, target, path + (i,))


def _replace_at(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    args = list(t.args)
    args[i] = _replace_at(args[i], rest, new)
    return App(t.fn, tuple(args))


def occurrences(phi: Formula, tau: Term) -> list:
    """Positions of ``tau`` in an atomic formula, left to right.

    A position is ``(argument index, path inside that argument)``.
    """
    if not isinstance(phi, ATOMIC):
        raise NotAtomicError(f"{phi} is not atomic")
    out = []
    for i, t in enumerate(atom_terms(phi)):
        out.extend((i, p) for p in _occurrences(t, tau))
    return out


def partial_replace(phi: Formula, tau: Term, tau2: Term, mask) -> Formula:
    """Replace the selected occurrences of ``tau`` in atomic ``phi`` by ``tau2``.

    ``mask`` is a collection of occurrence indices, counted left to right from 0.
    """
    occ = occurrences(phi, tau)
    chosen = sorted(set(mask))
    for k in chosen:
        if not 0 <= k < len(occ):
            raise MaskError(f"occurrence {k} of {tau} does not exist in {phi}")
    args = list(atom_terms(phi))
    for k in chosen:
        i, path = occ[k]
        args[i] = _replace_at(args[i], path, tau2)
    if isinstance(phi, Pred):
        return Pred(phi.name, tuple(args))
    return Eq(args[0], args[1])


# --- mirror image, assignments, relativization -----------------------------

_MIRROR = {G: H, H: G, F: P, P: F}


def mirror(phi: Formula) -> Formula:
    if isinstance(phi, ATOMIC):
        return phi
    kids = tuple(mirror(c) for c in children(phi))
    cls = _MIRROR.get(type(phi))
    if cls is not None:
        return cls(kids[0])
    return rebuild(phi, kids)


def apply_assignment(phi: Formula, f: Mapping[str, str]) -> Formula:
    """Turn ``phi`` into a sentence by replacing each free variable ``x`` with the constant ``f[x]``."""
    missing = free_vars(phi) - set(f)
    if missing:
        raise UncoveredVariableError(f"no constant assigned to {sorted(missing)}")
    out = phi
    for x in sorted(free_vars(phi)):
        out = _subst(out, x, Const(f[x]))
    return out


def relativize(phi: Formula, guard: str = "q") -> Formula:
    """Relativize every quantifier of an arithmetic formula to ``guard``.

    ``forall x. a`` becomes ``forall x. (q(x) -> a')``; Boolean connectives and
    atoms are left alone. An existential is first read as ``~forall x. ~a``.
    """
    if isinstance(phi, Eq):
        return phi
    if isinstance(phi, Pred):
        raise TranslationError(f"predicate {phi.name} is outside the arithmetic signature")
    if isinstance(phi, TEMPORAL):
        raise TranslationError("temporal operators have no relativized form")
    if isinstance(phi, Forall):
        return Forall(phi.var, Implies(Pred(guard, (Var(phi.var),)), relativize(phi.body, guard)))
    if isinstance(phi, Exists):
        return Not(relativize(Forall(phi.var, Not(phi.body)), guard))
    return rebuild(phi, tuple(relativize(c, guard) for c in children(phi)))


ARITH = Signature(frozenset({"0"}), {"succ": 1, "+": 2, "*": 2}, {})
ARITH_EXT = ARITH.union(Signature(frozenset(), {}, {"e": 1, "q": 1, "prec": 2}))
ZERO = Const("0")


def succ(t: Term) -> Term:
    return App("succ", (t,))


def plus(a: Term, b: Term) -> Term:
    return App("+", (a, b))


def times(a: Term, b: Term) -> Term:
    return App("*", (a, b))
