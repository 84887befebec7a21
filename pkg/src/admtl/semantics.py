"""Admissible semantics over finite linear time flows.

Subsets of ``T`` are int bitmasks indexed by position in the flow, so
``1 << i`` is the singleton of the i-th point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (
    And, Const, Eq, Forall, Formula, G, H, Not, Pred, Signature, Term, Var,
    free_vars, normalize, subformulas,
)


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class TimeFlow:
    """Finite strict linear order; ``points`` are listed earliest first."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(set(self.points)) != len(self.points):
            raise ModelError("time points must be distinct")

    @classmethod
    def of_size(cls, n: int) -> "TimeFlow":
        return cls(tuple(range(n)))

    def __len__(self):
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, t) -> int:
        try:
            return self.points.index(t)
        except ValueError:
            raise ModelError(f"{t!r} is not a time point") from None

    def mask(self, pts: Iterable) -> int:
        out = 0
        for t in pts:
            out |= 1 << self.index(t)
        return out

    def members(self, X: int) -> list:
        return [t for i, t in enumerate(self.points) if X >> i & 1]

    def less(self, s, t) -> bool:
        return self.index(s) < self.index(t)

    def box_lt(self, X: int) -> int:
        """``[<]X``: points all of whose successors lie in ``X``."""
        res, ok = 0, True
        for i in reversed(range(len(self.points))):
            if ok:
                res |= 1 << i
            if not X >> i & 1:
                ok = False
        return res

    def box_gt(self, X: int) -> int:
        """``[>]X``: points all of whose predecessors lie in ``X``."""
        res, ok = 0, True
        for i in range(len(self.points)):
            if ok:
                res |= 1 << i
            if not X >> i & 1:
                ok = False
        return res


def box_lt(X: int, flow: TimeFlow) -> int:
    return flow.box_lt(X)


def box_gt(X: int, flow: TimeFlow) -> int:
    return flow.box_gt(X)


def _meet(Z, full):
    out = full
    for X in Z:
        out &= X
    return out


def _join(Z):
    out = 0
    for X in Z:
        out |= X
    return out


@dataclass(frozen=True)
class PropFamily:
    """A family of admissible subsets of ``T``.

    ``members=None`` stands for the full powerset without listing it.
    """

    full: int
    members: frozenset | None = None

    @classmethod
    def powerset(cls, flow: TimeFlow) -> "PropFamily":
        return cls(flow.full, None)

    @classmethod
    def of(cls, flow: TimeFlow, sets: Iterable[int]) -> "PropFamily":
        fam = frozenset(sets)
        if not fam:
            raise ModelError("an admissible family must be nonempty")
        if len(fam) == 1 << bin(flow.full).count("1"):
            return cls(flow.full, None)
        return cls(flow.full, fam)

    @property
    def is_powerset(self) -> bool:
        return self.members is None

    def __contains__(self, X: int) -> bool:
        return self.members is None or X in self.members

    def __iter__(self):
        if self.members is None:
            return iter(range(self.full + 1))
        return iter(sorted(self.members))

    def __len__(self):
        return self.full + 1 if self.members is None else len(self.members)

    def glb(self, Z: Iterable[int]) -> int:
        """Union of the admissible sets included in the intersection of ``Z`` (``T`` for empty ``Z``)."""
        bound = _meet(Z, self.full)
        if self.members is None:
            return bound
        return _join(Y for Y in self.members if Y & ~bound == 0)

    def lub(self, Z: Iterable[int]) -> int:
        """Intersection of the admissible sets including the union of ``Z`` (``T`` if there are none)."""
        cover = _join(Z)
        if self.members is None:
            return cover
        return _meet((Y for Y in self.members if cover & ~Y == 0), self.full)

    def boolean_closed(self) -> bool:
        if self.members is None:
            return True
        fam = self.members
        return (all(self.full ^ X in fam for X in fam)
                and all(X & Y in fam for X in fam for Y in fam))

    def is_closed(self, flow: TimeFlow) -> bool:
        if self.members is None:
            return True
        return self.boolean_closed() and all(
            flow.box_lt(X) in self.members and flow.box_gt(X) in self.members
            for X in self.members)


def glb(Z: Iterable[int], prop: PropFamily) -> int:
    return prop.glb(list(Z))


def lub(Z: Iterable[int], prop: PropFamily) -> int:
    return prop.lub(list(Z))


def close_family(seed: Iterable[int], flow: TimeFlow) -> PropFamily:
    """Least family containing ``seed`` and the empty set that is closed under
    complement, intersection, ``[<]`` and ``[>]``."""
    full = flow.full
    fam = {X & full for X in seed} | {0}
    while True:
        new = set()
        for X in fam:
            new.update((full ^ X, flow.box_lt(X), flow.box_gt(X)))
            new.update(X & Y for Y in fam)
        if new <= fam:
            break
        fam |= new
    return PropFamily.of(flow, fam)


@dataclass(frozen=True)
class Model:
    """A premodel: flow, admissible family, universe and interpretation.

    Function tables map argument tuples to universe elements; predicate
    tables map argument tuples to truth-set bitmasks. With ``check=True``
    the prop family must be closed and every atomic truth set admissible.
    """

    flow: TimeFlow
    prop: PropFamily
    universe: tuple
    constants: Mapping = field(default_factory=dict)
    functions: Mapping = field(default_factory=dict)
    predicates: Mapping = field(default_factory=dict)
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        object.__setattr__(self, "constants", dict(self.constants))
        object.__setattr__(self, "functions", {k: dict(v) for k, v in self.functions.items()})
        object.__setattr__(self, "predicates", {k: dict(v) for k, v in self.predicates.items()})
        if not self.universe:
            raise ModelError("the universe must be nonempty")
        uset = set(self.universe)
        for c, a in self.constants.items():
            if a not in uset:
                raise ModelError(f"constant {c} denotes {a!r}, not in the universe")
        for name, table in self.functions.items():
            n = _arity(table, name)
            if n < 1:
                raise ModelError(f"function {name} needs arity >= 1")
            for args in itertools.product(self.universe, repeat=n):
                if table.get(args, _MISSING) not in uset:
                    raise ModelError(f"function {name} undefined or out of range at {args!r}")
        for name, table in self.predicates.items():
            n = _arity(table, name)
            for args in itertools.product(self.universe, repeat=n):
                X = table.get(args)
                if X is None or X & ~self.flow.full:
                    raise ModelError(f"predicate {name} undefined or out of range at {args!r}")
                if self.check and X not in self.prop:
                    raise ModelError(f"truth set of {name}{args!r} is not admissible")
        if self.check and not self.prop.is_closed(self.flow):
            raise ModelError("admissible family is not closed under Boolean operations, [<] and [>]")

    @property
    def signature(self) -> Signature:
        return Signature(frozenset(self.constants),
                         {k: _arity(v, k) for k, v in self.functions.items()},
                         {k: _arity(v, k) for k, v in self.predicates.items()})

    @property
    def is_standard(self) -> bool:
        return self.prop.is_powerset


_MISSING = object()


def _arity(table, name) -> int:
    arities = {len(k) for k in table}
    if len(arities) > 1:
        raise ModelError(f"{name} is used with several arities")
    return arities.pop() if arities else 0


def standard_model(flow: TimeFlow, universe, constants=None, functions=None,
                   predicates=None) -> Model:
    return Model(flow, PropFamily.powerset(flow), tuple(universe), constants or {},
                 functions or {}, predicates or {})


# --- evaluation ------------------------------------------------------------

def eval_term(tau: Term, f: Mapping, M: Model):
    if isinstance(tau, Var):
        try:
            return f[tau.name]
        except KeyError:
            raise ModelError(f"variable {tau.name} is unassigned") from None
    if isinstance(tau, Const):
        try:
            return M.constants[tau.name]
        except KeyError:
            raise ModelError(f"constant {tau.name} is not interpreted") from None
    try:
        table = M.functions[tau.fn]
    except KeyError:
        raise ModelError(f"function {tau.fn} is not interpreted") from None
    return table[tuple(eval_term(a, f, M) for a in tau.args)]


def _ts(phi, f, M):
    if isinstance(phi, Pred):
        try:
            table = M.predicates[phi.name]
        except KeyError:
            raise ModelError(f"predicate {phi.name} is not interpreted") from None
        return table[tuple(eval_term(a, f, M) for a in phi.args)]
    if isinstance(phi, Eq):
        return M.flow.full if eval_term(phi.left, f, M) == eval_term(phi.right, f, M) else 0
    if isinstance(phi, Not):
        return M.flow.full ^ _ts(phi.body, f, M)
    if isinstance(phi, And):
        return _ts(phi.left, f, M) & _ts(phi.right, f, M)
    if isinstance(phi, G):
        return M.flow.box_lt(_ts(phi.body, f, M))
    if isinstance(phi, H):
        return M.flow.box_gt(_ts(phi.body, f, M))
    if isinstance(phi, Forall):
        g = dict(f)
        instances = []
        for a in M.universe:
            g[phi.var] = a
            instances.append(_ts(phi.body, g, M))
        return M.prop.glb(instances)
    raise TypeError(f"not a core formula: {phi!r}")


def truth_set(phi: Formula, f: Mapping, M: Model) -> int:
    """Bitmask of the times at which ``phi`` holds under assignment ``f``."""
    return _ts(normalize(phi), f, M)


def satisfies(M: Model, t, f: Mapping, phi: Formula) -> bool:
    return bool(truth_set(phi, f, M) >> M.flow.index(t) & 1)


def assignments(M: Model, variables) -> Iterable[dict]:
    """Every assignment of universe elements to ``variables``, in lexicographic order."""
    vs = sorted(variables)
    for values in itertools.product(M.universe, repeat=len(vs)):
        yield dict(zip(vs, values))


def falsifier(M: Model, phi: Formula):
    """First ``(t, f)`` at which ``phi`` fails, or ``None`` if it is valid in ``M``."""
    core = normalize(phi)
    for f in assignments(M, free_vars(core)):
        X = _ts(core, f, M)
        if X != M.flow.full:
            missing = M.flow.full ^ X
            return M.flow.members(missing)[0], f
    return None


def valid_in(M: Model, phi: Formula) -> bool:
    return falsifier(M, phi) is None


def _corpus_subformulas(corpus):
    seen = []
    for phi in corpus:
        for sub in subformulas(normalize(phi)):
            if sub not in seen:
                seen.append(sub)
    return seen


def is_model(M: Model, corpus: Iterable[Formula]) -> bool:
    """True iff every subformula of the corpus is admissible under every assignment."""
    for sub in _corpus_subformulas(corpus):
        for f in assignments(M, free_vars(sub)):
            if _ts(sub, f, M) not in M.prop:
                return False
    return True


def is_kripkean(M: Model, corpus: Iterable[Formula]) -> bool:
    """True iff each universal subformula denotes the plain intersection of its instances."""
    for sub in _corpus_subformulas(corpus):
        if not isinstance(sub, Forall):
            continue
        for f in assignments(M, free_vars(sub)):
            g = dict(f)
            meet = M.flow.full
            for a in M.universe:
                g[sub.var] = a
                meet &= _ts(sub.body, g, M)
            if _ts(sub, f, M) != meet:
                return False
    return True


# --- JSON model files --------------------------------------------------------

def _key(args) -> str:
    return ",".join(str(a) for a in args)


def model_to_json(M: Model) -> dict:
    flow = M.flow
    out = {
        "flow": [str(t) for t in flow.points],
        "prop": "powerset" if M.prop.is_powerset else
                [[str(t) for t in flow.members(X)] for X in M.prop],
        "universe": [str(a) for a in M.universe],
        "constants": {c: str(a) for c, a in sorted(M.constants.items())},
        "functions": {name: {_key(args): str(v) for args, v in table.items()}
                      for name, table in sorted(M.functions.items())},
        "predicates": {name: {_key(args): [str(t) for t in flow.members(X)]
                              for args, X in table.items()}
                       for name, table in sorted(M.predicates.items())},
    }
    return out


def model_from_json(data: Mapping, check: bool = True) -> Model:
    """Inverse of :func:`model_to_json`; all names come back as strings."""
    try:
        flow = TimeFlow(tuple(str(t) for t in data["flow"]))
        universe = tuple(str(a) for a in data["universe"])
    except KeyError as exc:
        raise ModelError(f"model file lacks {exc.args[0]!r}") from None
    prop_spec = data.get("prop", "powerset")
    if prop_spec == "powerset":
        prop = PropFamily.powerset(flow)
    else:
        prop = PropFamily.of(flow, [flow.mask(str(t) for t in X) for X in prop_spec])

    def split(key):
        return tuple(key.split(",")) if key != "" else ()

    functions = {name: {split(k): str(v) for k, v in table.items()}
                 for name, table in data.get("functions", {}).items()}
    predicates = {name: {split(k): flow.mask(str(t) for t in pts) for k, pts in table.items()}
                  for name, table in data.get("predicates", {}).items()}
    constants = {c: str(a) for c, a in data.get("constants", {}).items()}
    return Model(flow, prop, universe, constants, functions, predicates, check=check)
