"""Bounded search for finite standard models.

The search fills interpretation tables one entry at a time and evaluates
the target under a three-valued reading: a truth set is a pair
``(must, may)`` of bitmasks, and an unknown table entry contributes
``(0, T)``. A branch is cut as soon as the target's ``may`` set is empty,
so the search stays exhaustive while skipping whole blocks of tables.

Candidates are visited by increasing ``|T|``, then ``|U|``, then
lexicographically in the interpretation: predicates first, then constants,
then functions, each kind sorted by arity and name, argument tuples in
lexicographic order, values in increasing order. The first hit is the
enumeration-least witness.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .semantics import Model, TimeFlow, falsifier, standard_model, truth_set
from .syntax import (
    And, Const, Eq, Forall, Formula, G, H, Not, Pred, Var, free_vars, normalize, symbols,
)

DEFAULT_BUDGET = 1_000_000


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Countermodel:
    model: Model
    t: object
    f: dict


_UNKNOWN = object()


class _Partial:
    """Partially filled interpretation over ``T = range(n)``, ``U = range(u)``."""

    def __init__(self, flow, u, sig):
        self.flow = flow
        self.universe = tuple(range(u))
        self.full = flow.full
        self.constants = {}
        self.functions = {k: {} for k in sig.functions}
        self.predicates = {k: {} for k in sig.predicates}

    def term(self, t, f):
        if isinstance(t, Var):
            return f[t.name]
        if isinstance(t, Const):
            return self.constants.get(t.name, _UNKNOWN)
        args = []
        for a in t.args:
            v = self.term(a, f)
            if v is _UNKNOWN:
                return _UNKNOWN
            args.append(v)
        return self.functions[t.fn].get(tuple(args), _UNKNOWN)

    def ts(self, phi, f):
        full = self.full
        if isinstance(phi, Pred):
            args = []
            for a in phi.args:
                v = self.term(a, f)
                if v is _UNKNOWN:
                    return 0, full
                args.append(v)
            X = self.predicates[phi.name].get(tuple(args))
            return (0, full) if X is None else (X, X)
        if isinstance(phi, Eq):
            if phi.left == phi.right:
                return full, full
            a, b = self.term(phi.left, f), self.term(phi.right, f)
            if a is _UNKNOWN or b is _UNKNOWN:
                return 0, full
            return (full, full) if a == b else (0, 0)
        if isinstance(phi, Not):
            lo, hi = self.ts(phi.body, f)
            return full ^ hi, full ^ lo
        if isinstance(phi, And):
            lo1, hi1 = self.ts(phi.left, f)
            if hi1 == 0:
                return 0, 0
            lo2, hi2 = self.ts(phi.right, f)
            return lo1 & lo2, hi1 & hi2
        if isinstance(phi, G):
            lo, hi = self.ts(phi.body, f)
            return self.flow.box_lt(lo), self.flow.box_lt(hi)
        if isinstance(phi, H):
            lo, hi = self.ts(phi.body, f)
            return self.flow.box_gt(lo), self.flow.box_gt(hi)
        if isinstance(phi, Forall):
            g = dict(f)
            lo = hi = full
            for a in self.universe:
                g[phi.var] = a
                l, h = self.ts(phi.body, g)
                lo &= l
                hi &= h
                if hi == 0:
                    break
            return lo, hi
        raise TypeError(f"not a core formula: {phi!r}")


def _slots(sig, n, u):
    """Table entries in enumeration order, each with its value range."""
    universe = range(u)
    full = (1 << n) - 1
    out = []
    for name, k in sorted(sig.predicates.items(), key=lambda kv: (kv[1], kv[0])):
        for args in itertools.product(universe, repeat=k):
            out.append(("pred", name, args, range(full + 1)))
    for c in sorted(sig.constants):
        out.append(("const", c, (), universe))
    for name, k in sorted(sig.functions.items(), key=lambda kv: (kv[1], kv[0])):
        for args in itertools.product(universe, repeat=k):
            out.append(("fn", name, args, universe))
    return out


def _store(partial, slot, value):
    kind, name, args, _ = slot
    if kind == "pred":
        partial.predicates[name][args] = value
    elif kind == "const":
        partial.constants[name] = value
    else:
        partial.functions[name][args] = value


def _erase(partial, slot):
    kind, name, args, _ = slot
    if kind == "pred":
        del partial.predicates[name][args]
    elif kind == "const":
        del partial.constants[name]
    else:
        del partial.functions[name][args]


def _freeze(partial) -> Model:
    return standard_model(partial.flow, partial.universe, dict(partial.constants),
                          {k: dict(v) for k, v in partial.functions.items()},
                          {k: dict(v) for k, v in partial.predicates.items()})


def _closure(phi: Formula) -> Formula:
    for x in sorted(free_vars(phi), reverse=True):
        phi = Forall(x, phi)
    return phi


def _sizes(tmax, umax, tmin=1, umin=1):
    for n in range(tmin, tmax + 1):
        for u in range(umin, umax + 1):
            yield n, u


def _dfs(target, flow, u, sig, counter, budget):
    partial = _Partial(flow, u, sig)
    slots = _slots(sig, len(flow), u)

    def go(i):
        counter[0] += 1
        if counter[0] > budget:
            raise SearchBudgetExceeded(f"search budget exceeded: more than {budget} partial interpretations")
        lo, hi = partial.ts(target, {})
        if hi == 0:
            return None
        if i == len(slots):
            return _freeze(partial)
        slot = slots[i]
        for v in slot[3]:
            _store(partial, slot, v)
            found = go(i + 1)
            if found is not None:
                return found
        _erase(partial, slot)
        return None

    return go(0)


def find_model(phi: Formula, tmax: int = 3, umax: int = 2, *, tmin: int = 1, umin: int = 1,
               signature=None, budget: int = DEFAULT_BUDGET):
    """Least finite standard model in which the sentence ``phi`` holds at some time.

    Returns ``(model, t)`` or ``None`` when no model within the bounds exists.
    """
    core = normalize(_closure(phi))
    sig = symbols(core) if signature is None else signature.union(symbols(core))
    counter = [0]
    for n, u in _sizes(tmax, umax, tmin, umin):
        flow = TimeFlow.of_size(n)
        M = _dfs(core, flow, u, sig, counter, budget)
        if M is not None:
            X = truth_set(core, {}, M)
            return M, flow.members(X)[0]
    return None


def countermodel_search(phi: Formula, tmax: int = 3, umax: int = 2, mode: str = "exhaustive", *,
                        seed: int = 0, n: int = 1000, tmin: int = 1, umin: int = 1,
                        budget: int = DEFAULT_BUDGET):
    """Finite standard model falsifying ``phi``, as a :class:`Countermodel`, or ``None``.

    ``mode="exhaustive"`` is complete for the bounded space. ``mode="random"``
    draws ``n`` full interpretations from ``random.Random(seed)``.
    """
    if tmin < 1 or umin < 1 or tmax < tmin or umax < umin:
        raise ValueError("bounds must satisfy 1 <= tmin <= tmax and 1 <= umin <= umax")
    if mode == "exhaustive":
        hit = find_model(Not(_closure(phi)), tmax, umax, tmin=tmin, umin=umin, budget=budget)
        if hit is None:
            return None
        M = hit[0]
    elif mode == "random":
        M = _random_falsifier(phi, tmax, umax, tmin, umin, seed, n)
        if M is None:
            return None
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    t, f = falsifier(M, phi)
    return Countermodel(M, t, f)


def random_standard_model(rng: random.Random, sig, tsize: int, usize: int) -> Model:
    """A standard model of the given sizes with uniformly drawn tables."""
    flow = TimeFlow.of_size(tsize)
    universe = tuple(range(usize))
    constants = {c: rng.choice(universe) for c in sorted(sig.constants)}
    functions = {name: {args: rng.choice(universe)
                        for args in itertools.product(universe, repeat=k)}
                 for name, k in sorted(sig.functions.items())}
    predicates = {name: {args: rng.randrange(flow.full + 1)
                         for args in itertools.product(universe, repeat=k)}
                  for name, k in sorted(sig.predicates.items())}
    return standard_model(flow, universe, constants, functions, predicates)


def _random_falsifier(phi, tmax, umax, tmin, umin, seed, n):
    rng = random.Random(seed)
    sig = symbols(phi)
    for _ in range(n):
        M = random_standard_model(rng, sig, rng.randint(tmin, tmax), rng.randint(umin, umax))
        if falsifier(M, phi) is not None:
            return M
    return None
