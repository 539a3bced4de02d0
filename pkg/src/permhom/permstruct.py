"""Finite permutation structures, their 2- and 3-types, and diagram completion.

A 2-type for ``k`` orders is an int bitmask: bit ``i`` is set iff
``x <_i y``.  A type ``t`` at the pair ``(x, y)`` is the same thing as
``opposite(t)`` at ``(y, x)``; every table in this package uses that single
convention.

For three orders the four types at pairwise Hamming distance 2 that do not
contain the all-``<`` type get the short names ``0, 1, 2, 3``::

    0 = (>, >, >)   1 = (>, <, <)   2 = (<, >, <)   3 = (<, <, >)

and their opposites are written ``0', 1', 2', 3'``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

TwoType = int
# canonical (tp(x,y), tp(y,z), tp(x,z)) of a three-point structure
Triangle = tuple[int, int, int]

NAMED = {"0": 0b000, "1": 0b110, "2": 0b101, "3": 0b011}
BASE_TYPES = (NAMED["0"], NAMED["1"], NAMED["2"], NAMED["3"])


class InconsistentDiagram(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


def full(k: int) -> int:
    return (1 << k) - 1


def opposite(t: TwoType, k: int = 3) -> TwoType:
    return t ^ full(k)


def hamming(a: TwoType, b: TwoType) -> int:
    return bin(a ^ b).count("1")


def signs(t: TwoType, k: int) -> tuple[bool, ...]:
    return tuple(bool(t >> i & 1) for i in range(k))


def from_signs(bits: Sequence[bool]) -> TwoType:
    return sum(1 << i for i, b in enumerate(bits) if b)


def enumerate_two_types(k: int) -> list[TwoType]:
    if k < 1:
        raise ValueError("need at least one order")
    return list(range(1 << k))


def type_name(t: TwoType, k: int = 3) -> str:
    if k == 3:
        for name, v in NAMED.items():
            if v == t:
                return name
            if opposite(v) == t:
                return name + "'"
    return "(" + ",".join("+" if b else "-" for b in signs(t, k)) + ")"


def parse_type(s: str | int, k: int = 3) -> TwoType:
    """Parse ``"1"``, ``"2'"``, ``"2^opp"``, ``"(+,-,+)"`` or ``"+-+"``."""
    if isinstance(s, int):
        return s
    s = s.strip()
    if k == 3:
        base = s.replace("^opp", "'").replace("opp", "'")
        if base.rstrip("'") in NAMED:
            t = NAMED[base.rstrip("'")]
            return opposite(t) if base.endswith("'") else t
    body = s.strip("()⟨⟩<>").replace(",", "").replace(" ", "")
    if len(body) == k and set(body) <= {"+", "-"}:
        return from_signs([c == "+" for c in body])
    raise ValueError(f"cannot parse 2-type {s!r} for k={k}")


def majority_solve(p: TwoType, q: TwoType, r: TwoType) -> TwoType:
    """Coordinatewise majority of three sign vectors."""
    return (p & q) | (q & r) | (p & r)


# ---------------------------------------------------------------- triangles

def consistent_triple(t01: int, t12: int, t02: int, k: int) -> bool:
    # an order is cyclic on the triple iff x<y, y<z agree and x<z disagrees
    return (~(t01 ^ t12) & (t01 ^ t02) & full(k)) == 0


def _relabelings(t01: int, t12: int, t02: int, k: int) -> Iterator[Triangle]:
    m = full(k)
    T = {(0, 1): t01, (1, 2): t12, (0, 2): t02}
    T.update({(b, a): v ^ m for (a, b), v in list(T.items())})
    for pi in itertools.permutations(range(3)):
        yield (T[pi[0], pi[1]], T[pi[1], pi[2]], T[pi[0], pi[2]])


@lru_cache(maxsize=None)
def canonical_triangle(t01: int, t12: int, t02: int, k: int = 3) -> Triangle:
    if not consistent_triple(t01, t12, t02, k):
        raise InconsistentDiagram(f"triple {(t01, t12, t02)} is cyclic in some order")
    return min(_relabelings(t01, t12, t02, k))


def enumerate_triangle_types(k: int) -> list[Triangle]:
    if k > 4:
        raise ValueError("triangle enumeration is budgeted for k <= 4")
    out = set()
    for t in itertools.product(range(1 << k), repeat=3):
        if consistent_triple(*t, k):
            out.add(canonical_triangle(*t, k))
    return sorted(out)


def imp(p: TwoType, q: TwoType, k: int = 3) -> Triangle:
    """``p => q``: ``c ->p a``, ``c ->p b``, ``a ->q b``."""
    a, b, c = 0, 1, 2
    return triangle_from_edges({(c, a): p, (c, b): p, (a, b): q}, k)


def rimp(p: TwoType, q: TwoType, k: int = 3) -> Triangle:
    """``p <= q``: ``a ->p c``, ``b ->p c``, ``a ->q b``."""
    a, b, c = 0, 1, 2
    return triangle_from_edges({(a, c): p, (b, c): p, (a, b): q}, k)


def cyc(p: TwoType, q: TwoType, r: TwoType, k: int = 3) -> Triangle:
    """``C3(p, q, r)``: the cycle ``a ->q b ->r c ->p a``."""
    a, b, c = 0, 1, 2
    return triangle_from_edges({(a, b): q, (b, c): r, (c, a): p}, k)


def triangle_from_edges(edges: Mapping[tuple[int, int], int], k: int = 3) -> Triangle:
    T = {}
    for (x, y), t in edges.items():
        T[x, y] = t
        T[y, x] = opposite(t, k)
    return canonical_triangle(T[0, 1], T[1, 2], T[0, 2], k)


def triangle_types_used(tri: Triangle, k: int = 3) -> frozenset[int]:
    """The unordered 2-type classes on the sides, as their smaller member."""
    return frozenset(min(t, opposite(t, k)) for t in tri)


def triangle_name(tri: Triangle, k: int = 3) -> str:
    """A readable name; uses the ``=>``, ``<=`` and ``C3`` families when they apply."""
    if k == 3:
        for name, fam in _named_families().items():
            if fam == tri:
                return name
    return "[" + ", ".join(type_name(t, k) for t in tri) + "]"


@lru_cache(maxsize=None)
def _named_families() -> dict[str, Triangle]:
    names = ["0", "1", "2", "3"]
    out: dict[str, Triangle] = {}
    for a in names:
        for b in names:
            if a != b:
                out.setdefault(f"{a}=>{b}", imp(NAMED[a], NAMED[b]))
                out.setdefault(f"{a}<={b}", rimp(NAMED[a], NAMED[b]))
    for a, b, c in itertools.permutations(names, 3):
        out.setdefault(f"C3({a},{b},{c})", cyc(NAMED[a], NAMED[b], NAMED[c]))
    return out


def parse_triangle(s: str) -> Triangle:
    """Parse ``"0=>1"``, ``"2<=0"`` or ``"C3(0,1,2)"`` (types may carry primes)."""
    s = s.replace(" ", "").replace("⇒", "=>").replace("⇐", "<=")
    if s.startswith("C3(") and s.endswith(")"):
        p, q, r = (parse_type(x) for x in s[3:-1].split(","))
        return cyc(p, q, r)
    if "=>" in s:
        p, q = s.split("=>")
        return imp(parse_type(p), parse_type(q))
    if "<=" in s:
        p, q = s.split("<=")
        return rimp(parse_type(p), parse_type(q))
    raise ValueError(f"cannot parse triangle {s!r}")


# ---------------------------------------------------------------- structures

@dataclass(frozen=True)
class PermStructure:
    """``n`` points with ``k`` strict linear orders, row ``i`` giving ranks."""

    ranks: tuple[tuple[int, ...], ...]
    n: int = field(default=-1)

    def __post_init__(self) -> None:
        if self.n < 0:
            n = len(self.ranks[0]) if self.ranks else 0
            object.__setattr__(self, "n", n)
        for row in self.ranks:
            if sorted(row) != list(range(self.n)):
                raise ValueError(f"rank row {row} is not a permutation of 0..{self.n - 1}")

    @property
    def k(self) -> int:
        return len(self.ranks)

    def tp(self, x: int, y: int) -> TwoType:
        return sum(1 << i for i, row in enumerate(self.ranks) if row[x] < row[y])

    def type_matrix(self) -> list[list[int]]:
        return [[self.tp(x, y) if x != y else -1 for y in range(self.n)] for x in range(self.n)]

    def restrict(self, points: Sequence[int]) -> "PermStructure":
        rows = []
        for row in self.ranks:
            order = sorted(range(len(points)), key=lambda j: row[points[j]])
            new = [0] * len(points)
            for r, j in enumerate(order):
                new[j] = r
            rows.append(tuple(new))
        return PermStructure(tuple(rows), len(points))

    def canonical(self) -> tuple:
        """Complete isomorphism invariant.

        Any automorphism preserves the first order and so is trivial; listing
        the points along that order is therefore a canonical labeling.
        """
        if self.k == 0:
            return (self.n, 0, ())
        first = sorted(range(self.n), key=lambda x: self.ranks[0][x])
        return (self.n, self.k, tuple(tuple(row[p] for p in first) for row in self.ranks[1:]))

    def reorder_by_first(self) -> "PermStructure":
        first = sorted(range(self.n), key=lambda x: self.ranks[0][x])
        return self.restrict(first)

    def two_types(self) -> set[int]:
        return {self.tp(x, y) for x in range(self.n) for y in range(self.n) if x != y}

    def triangles(self) -> set[Triangle]:
        return {
            canonical_triangle(self.tp(a, b), self.tp(b, c), self.tp(a, c), self.k)
            for a, b, c in itertools.combinations(range(self.n), 3)
        }

    def order(self, i: int) -> list[int]:
        return sorted(range(self.n), key=lambda x: self.ranks[i][x])

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "ranks": [list(r) for r in self.ranks]}


def structure_from_types(n: int, k: int, T: Sequence[Sequence[int]]) -> PermStructure:
    """Build ranks from a full pair-type matrix (``T[x][y]`` for ``x != y``)."""
    rows = []
    for i in range(k):
        rows.append(tuple(sum(1 for y in range(n) if y != x and not T[x][y] >> i & 1) for x in range(n)))
    return PermStructure(tuple(rows), n)


def from_orders(orders: Sequence[Sequence[int]]) -> PermStructure:
    """Build a structure from each order listed from least to greatest."""
    rows = []
    for seq in orders:
        row = [0] * len(seq)
        for r, x in enumerate(seq):
            row[x] = r
        rows.append(tuple(row))
    return PermStructure(tuple(rows), len(orders[0]) if orders else 0)


def enumerate_structures(n: int, k: int) -> Iterator[PermStructure]:
    """One structure per isomorphism class: the first order is the identity."""
    ident = tuple(range(n))
    if k == 0:
        yield PermStructure((), n)
        return
    for rest in itertools.product(itertools.permutations(range(n)), repeat=k - 1):
        yield PermStructure((ident,) + tuple(rest), n)


def count_classes(n: int, k: int) -> int:
    f = 1
    for i in range(2, n + 1):
        f *= i
    return f ** (k - 1) if k else 1


def isomorphic_bruteforce(A: PermStructure, B: PermStructure) -> bool:
    if (A.n, A.k) != (B.n, B.k):
        return False
    for perm in itertools.permutations(range(A.n)):
        if all(A.tp(x, y) == B.tp(perm[x], perm[y]) for x in range(A.n) for y in range(A.n) if x != y):
            return True
    return False


def compose_structures(A: PermStructure, B: PermStructure) -> tuple[PermStructure, tuple[int, ...]]:
    """Lexicographic composition ``A[B]``; returns the structure and block labels."""
    if A.k != B.k:
        raise ArityMismatch(f"cannot compose {A.k} orders with {B.k}")
    nb = B.n
    rows = tuple(
        tuple(ra[a] * nb + rb[b] for a in range(A.n) for b in range(nb))
        for ra, rb in zip(A.ranks, B.ranks)
    )
    blocks = tuple(a for a in range(A.n) for _ in range(nb))
    return PermStructure(rows, A.n * nb), blocks


def is_convex(S: PermStructure, blocks: Sequence[int], i: int) -> bool:
    seq = [blocks[x] for x in S.order(i)]
    seen: set = set()
    for j, b in enumerate(seq):
        if b in seen and seq[j - 1] != b:
            return False
        seen.add(b)
    return True


# ---------------------------------------------------------------- diagrams

@dataclass
class PartialDiagram:
    """Points ``0..n-1`` with some pairs typed.  ``typed[(x, y)]`` with ``x < y``."""

    n: int
    k: int = 3
    typed: dict[tuple[int, int], int] = field(default_factory=dict)

    def set(self, x: int, y: int, t: int) -> "PartialDiagram":
        if x == y:
            raise ValueError("a pair needs two distinct points")
        if x > y:
            x, y, t = y, x, opposite(t, self.k)
        self.typed[x, y] = t
        return self

    def get(self, x: int, y: int) -> int | None:
        if x < y:
            return self.typed.get((x, y))
        t = self.typed.get((y, x))
        return None if t is None else opposite(t, self.k)

    def untyped(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.n) for y in range(x + 1, self.n) if (x, y) not in self.typed]

    def copy(self) -> "PartialDiagram":
        return PartialDiagram(self.n, self.k, dict(self.typed))

    def completed(self, assignment: Mapping[tuple[int, int], int]) -> PermStructure:
        D = self.copy()
        for (x, y), t in assignment.items():
            D.set(x, y, t)
        T = [[(D.get(x, y) if x != y else -1) for y in range(self.n)] for x in range(self.n)]
        return structure_from_types(self.n, self.k, T)

    @classmethod
    def of(cls, S: PermStructure) -> "PartialDiagram":
        D = cls(S.n, S.k)
        for x in range(S.n):
            for y in range(x + 1, S.n):
                D.typed[x, y] = S.tp(x, y)
        return D

    def to_dict(self) -> dict:
        return {
            "points": list(range(self.n)),
            "k": self.k,
            "typed": [[x, y, [bool(t >> i & 1) for i in range(self.k)]] for (x, y), t in sorted(self.typed.items())],
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "PartialDiagram":
        pts = list(obj["points"])
        index = {p: i for i, p in enumerate(pts)}
        typed = obj.get("typed", [])
        k = int(obj.get("k", len(typed[0][2]) if typed else 3))
        D = cls(len(pts), k)
        for x, y, sg in typed:
            t = parse_type(sg, k) if isinstance(sg, str) else from_signs(sg)
            D.set(index[x], index[y], t)
        return D


class _Closure:
    """Per-order reachability as bitmasks: ``up[i][x]`` = points above ``x``."""

    __slots__ = ("up",)

    def __init__(self, up):
        self.up = up

    @classmethod
    def empty(cls, n: int, k: int) -> "_Closure":
        return cls([[0] * n for _ in range(k)])

    def copy(self) -> "_Closure":
        return _Closure([row[:] for row in self.up])

    def forced(self, i: int, x: int, y: int) -> int | None:
        """1 if ``x <_i y`` is forced, 0 if ``y <_i x`` is, else None."""
        if self.up[i][x] >> y & 1:
            return 1
        if self.up[i][y] >> x & 1:
            return 0
        return None

    def add(self, i: int, lo: int, hi: int) -> bool:
        up = self.up[i]
        if up[hi] >> lo & 1:
            return False
        if up[lo] >> hi & 1:
            return True
        gain = (1 << hi) | up[hi]
        bit = 1 << lo
        for a in range(len(up)):
            if a == lo or up[a] & bit:
                up[a] |= gain
        return True

    def add_type(self, x: int, y: int, t: int, k: int) -> bool:
        for i in range(k):
            ok = self.add(i, x, y) if t >> i & 1 else self.add(i, y, x)
            if not ok:
                return False
        return True


def complete_diagram(
    D: PartialDiagram,
    allowed: Iterable[Triangle] | None = None,
    limit: int | None = None,
    rng: random.Random | None = None,
) -> list[dict[tuple[int, int], int]]:
    """All ways to type the untyped pairs so every order is linear.

    With ``allowed`` given, every three-point substructure must also be an
    allowed triangle (this includes triples already fully typed in ``D``).
    Transitive closure of the typed pairs is computed first and only
    closure-consistent types are tried for each pair.  ``rng`` shuffles the
    candidate order, ``limit`` stops early.
    """
    n, k = D.n, D.k
    allow = None if allowed is None else (allowed if isinstance(allowed, (set, frozenset)) else set(allowed))
    T = [[-1] * n for _ in range(n)]
    cl = _Closure.empty(n, k)
    for (x, y), t in D.typed.items():
        T[x][y] = t
        T[y][x] = opposite(t, k)
        if not cl.add_type(x, y, t, k):
            raise InconsistentDiagram(f"typed pairs are cyclic in some order (at {x},{y})")
    if allow is not None:
        for a, b, c in itertools.combinations(range(n), 3):
            if T[a][b] >= 0 and T[b][c] >= 0 and T[a][c] >= 0:
                if canonical_triangle(T[a][b], T[b][c], T[a][c], k) not in allow:
                    return []
    pairs = D.untyped()
    out: list[dict[tuple[int, int], int]] = []
    all_types = list(range(1 << k))

    def tri_ok(x: int, y: int) -> bool:
        for w in range(n):
            if w == x or w == y:
                continue
            txw, tyw = T[x][w], T[y][w]
            if txw < 0 or tyw < 0:
                continue
            if canonical_triangle(T[x][y], T[y][w], txw, k) not in allow:
                return False
        return True

    def go(idx: int, cl: _Closure, assign: dict) -> bool:
        if idx == len(pairs):
            out.append(dict(assign))
            return limit is not None and len(out) >= limit
        x, y = pairs[idx]
        fixed_mask = 0
        fixed_val = 0
        for i in range(k):
            f = cl.forced(i, x, y)
            if f is not None:
                fixed_mask |= 1 << i
                fixed_val |= f << i
        cands = [t for t in all_types if t & fixed_mask == fixed_val]
        if rng is not None:
            rng.shuffle(cands)
        for t in cands:
            T[x][y] = t
            T[y][x] = opposite(t, k)
            if allow is None or tri_ok(x, y):
                ncl = cl.copy()
                if ncl.add_type(x, y, t, k):
                    assign[x, y] = t
                    if go(idx + 1, ncl, assign):
                        return True
                    del assign[x, y]
            T[x][y] = T[y][x] = -1
        return False

    go(0, cl, {})
    return out


def majority_diagram(p: TwoType, q: TwoType, r: TwoType, k: int = 3) -> PartialDiagram:
    """Base ``x1 ->q x2 ->q x3``; first factor adds ``a1`` with
    ``a1 ->p x1, a1 ->p x2, a1 ->q x3``; second adds ``a2`` with
    ``x1 ->q a2, x2 ->r a2, x3 ->r a2``.  Points: x1, x2, x3, a1, a2."""
    x1, x2, x3, a1, a2 = range(5)
    D = PartialDiagram(5, k)
    D.set(x1, x2, q).set(x2, x3, q).set(x1, x3, q)
    D.set(a1, x1, p).set(a1, x2, p).set(a1, x3, q)
    D.set(x1, a2, q).set(x2, a2, r).set(x3, a2, r)
    return D


def majority_completions(p: TwoType, q: TwoType, r: TwoType, k: int = 3) -> list[TwoType]:
    D = majority_diagram(p, q, r, k)
    return [c[3, 4] for c in complete_diagram(D)]


def all_triangles(k: int = 3) -> frozenset[Triangle]:
    return frozenset(enumerate_triangle_types(k))


# ---------------------------------------------------------------- definable orders

@dataclass
class DefinableOrderCheck:
    candidate: frozenset[int]
    trivial: bool
    witness: PermStructure | None
    proof_witness: PermStructure | None

    @property
    def passed(self) -> bool:
        if self.trivial:
            return self.witness is None
        return self.witness is not None and self.proof_witness is not None


def _transitivity_failure(S: PermStructure, C: frozenset[int]) -> tuple[int, int, int] | None:
    for a, b, c in itertools.permutations(range(S.n), 3):
        if S.tp(a, b) in C and S.tp(b, c) in C and S.tp(a, c) not in C:
            return (a, b, c)
    return None


def _recipe_witness(C: frozenset[int], k: int) -> PermStructure | None:
    """Chain of types reversing each order in turn, closed off by the all-< type."""
    q0 = full(k)
    if q0 not in C:
        C = frozenset(opposite(t, k) for t in C)
    chain_types = []
    for i in range(k):
        ps = sorted(t for t in C if not t >> i & 1)
        if not ps:
            return None
        chain_types.append(ps[0])
    D = PartialDiagram(k + 1, k)
    for i, t in enumerate(chain_types):
        D.set(i, i + 1, t)
    D.set(k, 0, q0)
    sols = complete_diagram(D, limit=1)
    if not sols:
        return None
    return D.completed(sols[0])


def check_definable_orders(k: int = 3) -> list[DefinableOrderCheck]:
    """Every union of 2-types picking one of each opposite pair, tested for transitivity."""
    reps = [t for t in range(1 << k) if t < opposite(t, k)]
    trivial = set()
    for i in range(k):
        trivial.add(frozenset(t for t in range(1 << k) if t >> i & 1))
        trivial.add(frozenset(t for t in range(1 << k) if not t >> i & 1))
    small = [S for n in (3, 4) for S in enumerate_structures(n, k)]
    out = []
    for choice in itertools.product((False, True), repeat=len(reps)):
        C = frozenset(opposite(t, k) if flip else t for t, flip in zip(reps, choice))
        witness = next((S for S in small if _transitivity_failure(S, C)), None)
        pw = None
        if C not in trivial:
            pw = _recipe_witness(C, k)
            if pw is not None and _transitivity_failure(pw, C) is None:
                pw = None
        out.append(DefinableOrderCheck(C, C in trivial, witness, pw))
    return out
