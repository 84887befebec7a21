"""Order embedding of a countable nonstandard model of arithmetic into the rationals.

The order type is a standard part ``0 < 1 < 2 < ...`` followed by galaxies,
copies of the integers indexed by the rationals. Galaxy indices are matched
by a back-and-forth construction with a tree of pairwise disjoint open
intervals in ``(2, 3)``; each galaxy is then squeezed into its interval.
All arithmetic is exact.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from typing import Callable


# --- the nonstandard order -------------------------------------------------------

class NsElement:
    __slots__ = ()

    def key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()

    def __gt__(self, other):
        return self.key() > other.key()

    def __ge__(self, other):
        return self.key() >= other.key()


@dataclass(frozen=True, eq=True)
class Std(NsElement):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("standard elements are natural numbers")

    def key(self):
        return (0, self.n, 0)


@dataclass(frozen=True, eq=True)
class Gal(NsElement):
    g: Fraction
    j: int

    def __post_init__(self):
        object.__setattr__(self, "g", Fraction(self.g))

    def key(self):
        return (1, self.g, self.j)


def ns_cmp(a: NsElement, b: NsElement) -> int:
    """-1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    ka, kb = a.key(), b.key()
    return (ka > kb) - (ka < kb)


# --- rationals in height order -----------------------------------------------------

def _rationals():
    yield Fraction(0)
    h = 2
    while True:
        for q in range(1, h):
            p = h - q
            if gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)
        h += 1


def height(r: Fraction) -> int:
    return abs(r.numerator) + r.denominator


def _simplest_in(lo: Fraction, hi: Fraction) -> Fraction:
    """Least-denominator rational strictly between ``0 <= lo < hi`` (Stern-Brocot descent)."""
    n = floor(lo) + 1
    if n < hi:
        return Fraction(n)
    # lo and hi share the integer part k, and hi may itself be k + 1
    k = floor(lo)
    lo_f, hi_f = lo - k, hi - k
    if lo_f == 0:
        # need a fraction in (0, hi_f); 1/m with the least such m
        m = floor(1 / hi_f) + 1
        return k + Fraction(1, m)
    inner = _simplest_in(1 / hi_f, 1 / lo_f)
    return k + 1 / inner


def simplest_between(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    """The first rational of the height enumeration strictly between ``lo`` and ``hi``.

    ``None`` stands for an open end. The least-height rational in an interval
    is unique, which is why the enumeration order is never consulted.
    """
    if lo is not None and hi is not None and not lo < hi:
        raise ValueError("empty interval")
    if (lo is None or lo < 0) and (hi is None or hi > 0):
        return Fraction(0)
    if lo is None:
        # whole interval negative: mirror
        return -simplest_between(-hi, None)
    if hi is None:
        return Fraction(floor(lo) + 1)
    if hi <= 0:
        return -_simplest_in(-hi, -lo)
    return _simplest_in(lo, hi)


# --- the interval tree -------------------------------------------------------------

ROOT_GAP = (Fraction(2), Fraction(3))


def _path(path) -> str:
    text = "".join(path)
    if set(text) - {"L", "R"}:
        raise ValueError(f"paths are strings over L and R, got {path!r}")
    return text


@dataclass(frozen=True)
class IntervalNode:
    """Open interval ``(lo, hi)`` chosen as the middle third of the gap ``(gap_lo, gap_hi)``."""

    path: str
    lo: Fraction
    hi: Fraction
    gap_lo: Fraction
    gap_hi: Fraction

    @property
    def depth(self) -> int:
        return len(self.path)

    def before(self, other: "IntervalNode") -> bool:
        """The interval order: every point of ``self`` is below every point of ``other``."""
        return self.hi <= other.lo

    def to_json(self) -> dict:
        return {"path": self.path, "interval": [str(self.lo), str(self.hi)]}


def _middle_third(a: Fraction, b: Fraction) -> tuple:
    third = (b - a) / 3
    return a + third, b - third


def interval_at(path="") -> IntervalNode:
    """Node at ``path``; ``L`` moves into the gap left of the parent's interval, ``R`` right of it."""
    path = _path(path)
    a, b = ROOT_GAP
    lo, hi = _middle_third(a, b)
    for step in path:
        a, b = (a, lo) if step == "L" else (hi, b)
        lo, hi = _middle_third(a, b)
    return IntervalNode(path, lo, hi, a, b)


def path_at(k: int) -> str:
    """The ``k``-th path in breadth-first order: '', 'L', 'R', 'LL', 'LR', ..."""
    if k < 0:
        raise ValueError("index must be nonnegative")
    d = (k + 1).bit_length() - 1
    pos = k + 1 - (1 << d)
    return format(pos, f"0{d}b").replace("0", "L").replace("1", "R") if d else ""


def paths_to_depth(depth: int):
    for k in range((1 << (depth + 1)) - 1):
        yield path_at(k)


def first_node_between(lo: IntervalNode | None, hi: IntervalNode | None) -> IntervalNode:
    """Breadth-first least node strictly between ``lo`` and ``hi`` (``None`` = open end).

    Descends from the root: the shallowest node in the range is unique, since
    two nodes of equal depth always have a shallower node between them.
    """
    if lo is not None and hi is not None and not lo.before(hi):
        raise ValueError("empty range of nodes")
    path = ""
    while True:
        node = interval_at(path)
        if lo is not None and not lo.before(node):
            path += "R"
        elif hi is not None and not node.before(hi):
            path += "L"
        else:
            return node


# --- back and forth ------------------------------------------------------------------

class Enumeration:
    """A countable dense order without endpoints, given by an enumeration and a sort key."""

    def __init__(self, source, key: Callable, first_between: Callable | None = None):
        self._source = iter(source)
        self._items = []
        self.key = key
        self._between = first_between

    def at(self, k: int):
        while len(self._items) <= k:
            self._items.append(next(self._source))
        return self._items[k]

    def scan_between(self, lo, hi):
        """First enumerated element strictly between ``lo`` and ``hi``, by linear scan."""
        k = 0
        while True:
            x = self.at(k)
            if (lo is None or self.key(lo) < self.key(x)) and (hi is None or self.key(x) < self.key(hi)):
                return x
            k += 1

    def first_between(self, lo, hi):
        if self._between is not None:
            return self._between(lo, hi)
        return self.scan_between(lo, hi)


def rational_order() -> Enumeration:
    return Enumeration(_rationals(), lambda r: r, simplest_between)


def interval_order() -> Enumeration:
    def nodes():
        k = 0
        while True:
            yield interval_at(path_at(k))
            k += 1
    return Enumeration(nodes(), lambda n: n.lo, first_node_between)


class PartialIso:
    """Finite order isomorphism between two enumerations, grown by alternating steps.

    A forth step takes the least unmatched element of ``A`` and pairs it with
    the first element of ``B`` lying in the matching gap; a back step does the
    same with the roles swapped. Committed pairs never change.
    """

    def __init__(self, A: Enumeration, B: Enumeration):
        self.A, self.B = A, B
        self.forward, self.backward = {}, {}
        self.pairs = []  # in commit order
        self._a_sorted, self._b_sorted = [], []  # (key, element)
        self._next_a = self._next_b = 0
        self._forth_next = True

    def __len__(self):
        return len(self.pairs)

    def _commit(self, a, b):
        self.forward[a] = b
        self.backward[b] = a
        self.pairs.append((a, b))
        bisect.insort(self._a_sorted, (self.A.key(a), a), key=lambda p: p[0])
        bisect.insort(self._b_sorted, (self.B.key(b), b), key=lambda p: p[0])

    def forth(self):
        while self.A.at(self._next_a) in self.forward:
            self._next_a += 1
        a = self.A.at(self._next_a)
        lo, hi = self._gap(a, self.A, self._a_sorted, self.forward)
        self._commit(a, self.B.first_between(lo, hi))

    def back(self):
        while self.B.at(self._next_b) in self.backward:
            self._next_b += 1
        b = self.B.at(self._next_b)
        lo, hi = self._gap(b, self.B, self._b_sorted, self.backward)
        self._commit(self.A.first_between(lo, hi), b)

    def _gap(self, x, order, sorted_pairs, mapping):
        keys = [k for k, _ in sorted_pairs]
        i = bisect.bisect_left(keys, order.key(x))
        below = mapping[sorted_pairs[i - 1][1]] if i > 0 else None
        above = mapping[sorted_pairs[i][1]] if i < len(sorted_pairs) else None
        return below, above

    def step(self):
        if self._forth_next:
            self.forth()
        else:
            self.back()
        self._forth_next = not self._forth_next

    def image(self, a):
        while a not in self.forward:
            self.step()
        return self.forward[a]

    def preimage(self, b):
        while b not in self.backward:
            self.step()
        return self.backward[b]

    def is_order_preserving(self) -> bool:
        ka, kb = self.A.key, self.B.key
        ordered = sorted(self.pairs, key=lambda p: ka(p[0]))
        return all(kb(x[1]) < kb(y[1]) for x, y in zip(ordered, ordered[1:]))


def back_and_forth(A: Enumeration, B: Enumeration, query, iso: PartialIso | None = None):
    """Image of ``query`` under the back-and-forth isomorphism from ``A`` onto ``B``.

    Pass the same ``iso`` to extend one memoized construction across queries.
    """
    if iso is None:
        iso = PartialIso(A, B)
    return iso.image(query)


class Embedding:
    """Owns the galaxy-to-interval isomorphism and computes theta from it."""

    def __init__(self):
        self.iso = PartialIso(rational_order(), interval_order())

    def eta(self, g) -> IntervalNode:
        return self.iso.image(Fraction(g))

    def theta(self, a: NsElement) -> Fraction:
        if isinstance(a, Std):
            return Fraction(a.n, a.n + 1)
        node = self.eta(a.g)
        mid = (node.lo + node.hi) / 2
        half = (node.hi - node.lo) / 2
        return mid + half * squeeze(a.j) / 2

    def pairs_json(self) -> list:
        return [{"galaxy": str(g), **node.to_json()} for g, node in self.iso.pairs]


def squeeze(j: int) -> Fraction:
    """Strictly increasing map of the integers into ``(-1, 1)``."""
    return Fraction(j, abs(j) + 1)


_DEFAULT = None


def default_embedding() -> Embedding:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Embedding()
    return _DEFAULT


def theta(a: NsElement, embedding: Embedding | None = None) -> Fraction:
    return (embedding or default_embedding()).theta(a)


def parse_element(text: str) -> NsElement:
    """``"7"`` is a standard element, ``"1/2:-3"`` is offset -3 in galaxy 1/2."""
    text = text.strip()
    if ":" in text:
        g, j = text.split(":", 1)
        return Gal(Fraction(g), int(j))
    return Std(int(text))
