"""Classes of permutation structures given by allowed 2- and 3-types.

Includes amalgamation-closure checking over small bases, deterministic
saturation toward a generic structure, and mechanical replays of the two
genericity arguments: "all configurations on n-1 points force everything"
and "all triangles force all 4-point configurations" for three orders.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

from .permstruct import (
    PartialDiagram,
    PermStructure,
    Triangle,
    canonical_triangle,
    complete_diagram,
    enumerate_structures,
    enumerate_triangle_types,
    opposite,
    structure_from_types,
)


class NotClosed(RuntimeError):
    """Some amalgamation diagram has no allowed completion."""


@dataclass(frozen=True)
class ClassSpec:
    k: int
    allowed2: frozenset[int]
    allowed3: frozenset[Triangle]

    def __post_init__(self) -> None:
        m = (1 << self.k) - 1
        if any(opposite(t, self.k) not in self.allowed2 for t in self.allowed2):
            raise ValueError("allowed 2-types must be closed under opposites")
        for tri in self.allowed3:
            if any(t not in self.allowed2 for t in tri):
                raise ValueError(f"triangle {tri} uses a forbidden 2-type")
        if any(not 0 <= t <= m for t in self.allowed2):
            raise ValueError("2-type out of range")

    @classmethod
    def generic(cls, k: int) -> "ClassSpec":
        return cls(k, frozenset(range(1 << k)), frozenset(enumerate_triangle_types(k)))

    @classmethod
    def from_triangles(cls, k: int, triangles: Iterable[Triangle], allowed2: Iterable[int] | None = None) -> "ClassSpec":
        a2 = frozenset(range(1 << k)) if allowed2 is None else frozenset(allowed2)
        return cls(k, a2, frozenset(t for t in triangles if all(s in a2 for s in t)))

    @classmethod
    def forbidding(cls, k: int, forbidden: Iterable[Triangle], forbidden2: Iterable[int] = ()) -> "ClassSpec":
        bad2 = set(forbidden2)
        bad2 |= {opposite(t, k) for t in bad2}
        bad3 = set(forbidden)
        return cls.from_triangles(k, (t for t in enumerate_triangle_types(k) if t not in bad3),
                                  (t for t in range(1 << k) if t not in bad2))

    @classmethod
    def identified(cls, k: int, agreements: Sequence[tuple[int, int, bool]]) -> "ClassSpec":
        """Orders ``i`` and ``j`` agree (``reversed`` False) or are mutually
        reverse; every triangle consistent with that is allowed."""
        def ok(t: int) -> bool:
            return all(((t >> i & 1) != (t >> j & 1)) == rev for i, j, rev in agreements)
        return cls.from_triangles(k, enumerate_triangle_types(k), (t for t in range(1 << k) if ok(t)))

    def allows(self, S: PermStructure) -> bool:
        if S.k != self.k:
            return False
        if S.n == 2 and S.tp(0, 1) not in self.allowed2:
            return False
        if any(S.tp(x, y) not in self.allowed2 for x in range(S.n) for y in range(S.n) if x != y):
            return False
        return S.triangles() <= self.allowed3

    def to_dict(self) -> dict:
        return {"k": self.k, "allowed2": sorted(self.allowed2), "allowedTriangles": [list(t) for t in sorted(self.allowed3)]}

    @classmethod
    def from_dict(cls, obj: dict) -> "ClassSpec":
        k = int(obj["k"])
        tris = [canonical_triangle(*t, k) for t in obj.get("allowedTriangles", [])]
        return cls(k, frozenset(obj.get("allowed2", range(1 << k))), frozenset(tris))


# ---------------------------------------------------------------- pairings

def pairing_count(n: int, l: int) -> int:
    if 2 * l > n:
        raise ValueError("need 2l <= n")
    return factorial(n) // (2 ** l * factorial(l) * factorial(n - 2 * l))


def unseparated_bound(n: int, l: int, k: int) -> int:
    if 2 * l > n:
        raise ValueError("need 2l <= n")
    return k * comb(n - l, l)


def genericity_threshold(k: int) -> int:
    """Least ``n`` with ``n!/(n-l)! > 2^l k`` where ``l = n // 2``."""
    if k < 1:
        raise ValueError("need k >= 1")
    n = 1
    while True:
        l = n // 2
        if factorial(n) // factorial(n - l) > 2 ** l * k:
            return n
        n += 1


Pairing = tuple[tuple[int, int], ...]


def enumerate_pairings(n: int, l: int) -> Iterator[Pairing]:
    def go(rest: list[int], need: int) -> Iterator[list[tuple[int, int]]]:
        if need == 0:
            yield []
            return
        if len(rest) < 2 * need:
            return
        first, others = rest[0], rest[1:]
        for j, y in enumerate(others):
            for tail in go(others[:j] + others[j + 1:], need - 1):
                yield [(first, y)] + tail
        yield from go(others, need)

    for p in go(list(range(n)), l):
        yield tuple(p)


def adjacent(S: PermStructure, i: int, x: int, y: int) -> bool:
    return abs(S.ranks[i][x] - S.ranks[i][y]) == 1


def is_separated(S: PermStructure, P: Pairing) -> bool:
    return all(any(not adjacent(S, i, x, y) for x, y in P) for i in range(S.k))


def separated_pairings(S: PermStructure) -> list[Pairing]:
    return [P for P in enumerate_pairings(S.n, S.n // 2) if is_separated(S, P)]


def find_separated_pairing(S: PermStructure) -> Pairing | None:
    return next((P for P in enumerate_pairings(S.n, S.n // 2) if is_separated(S, P)), None)


# ---------------------------------------------------------------- unique amalgams

def _insert(S: PermStructure, positions: Sequence[int]) -> PermStructure:
    """Add a point whose rank in order ``i`` is ``positions[i]`` (shifting the rest)."""
    rows = []
    for row, pos in zip(S.ranks, positions):
        rows.append(tuple(r + 1 if r >= pos else r for r in row) + (pos,))
    return PermStructure(tuple(rows), S.n + 1)


def has_between(S: PermStructure, x: int, y: int) -> bool:
    """Every order puts some third point strictly between ``x`` and ``y``."""
    return all(not adjacent(S, i, x, y) for i in range(S.k))


def unique_amalgam(S: PermStructure, x: int, y: int, allowed: frozenset[Triangle] | None = None) -> bool:
    """``S`` is the only completion of ``S - x`` and ``S - y`` over ``S - {x, y}``."""
    D = PartialDiagram.of(S)
    a, b = min(x, y), max(x, y)
    t = D.typed.pop((a, b))
    sols = complete_diagram(D, allowed)
    return len(sols) == 1 and sols[0][a, b] == t


@dataclass
class SplitStats:
    pairing_splits: int = 0
    fallback_splits: int = 0
    uniqueness_checks: int = 0


def _certify(S: PermStructure, pairs: Sequence[tuple[int, int]], floor: int, memo: dict, stats: SplitStats) -> bool:
    """Split ``S`` along forced pairs until every factor has at most ``floor`` points."""
    if S.n <= floor:
        return True
    key = (S.ranks, frozenset(frozenset(p) for p in pairs))
    if key in memo:
        return memo[key]
    memo[key] = False
    preferred = [p for p in pairs if has_between(S, *p)]
    others = [p for p in itertools.combinations(range(S.n), 2) if p not in preferred and has_between(S, *p)]
    for x, y in preferred + others:
        stats.uniqueness_checks += 1
        if not unique_amalgam(S, x, y):
            continue
        ok = True
        for gone in (x, y):
            keep = [z for z in range(S.n) if z != gone]
            idx = {z: j for j, z in enumerate(keep)}
            rest = [(idx[a], idx[b]) for a, b in pairs if gone not in (a, b) and (a, b) != (x, y)]
            if not _certify(S.restrict(keep), rest, floor, memo, stats):
                ok = False
                break
        if ok:
            if (x, y) in preferred:
                stats.pairing_splits += 1
            else:
                stats.fallback_splits += 1
            memo[key] = True
            return True
    return False


def auxiliary_positions(S: PermStructure, P: Pairing) -> list[list[int]]:
    """Rank positions for ``l - 1`` new points; point ``j`` splits the
    ``j``-th pair still adjacent in each order (inserted just above its lower end)."""
    l = len(P)
    per_order = []
    for i in range(S.k):
        adj = [p for p in P if adjacent(S, i, *p)]
        per_order.append(adj)
    out = []
    for j in range(max(0, l - 1)):
        if not any(j < len(adj) for adj in per_order):
            break
        out.append([
            (max(S.ranks[i][per_order[i][j][0]], S.ranks[i][per_order[i][j][1]]) if j < len(per_order[i]) else S.n + j)
            for i in range(S.k)
        ])
    return out


def extend_for_pairing(S: PermStructure, P: Pairing) -> PermStructure:
    A = S
    positions = auxiliary_positions(S, P)
    # earlier insertions shift later targets, so recompute from the growing structure
    for _ in positions:
        adj = [[p for p in P if adjacent(A, i, *p)] for i in range(A.k)]
        pos = [max(A.ranks[i][adj[i][0][0]], A.ranks[i][adj[i][0][1]]) if adj[i] else A.n for i in range(A.k)]
        A = _insert(A, pos)
    return A


@dataclass
class GenReport:
    k: int
    n: int
    classes: int = 0
    certified: int = 0
    no_pairing: list[tuple] = field(default_factory=list)
    failures: list[tuple] = field(default_factory=list)
    max_aux: int = 0
    used_other_pairing: int = 0
    searched_placement: int = 0
    stats: SplitStats = field(default_factory=SplitStats)

    @property
    def passed(self) -> bool:
        return self.certified == self.classes and not self.failures and not self.no_pairing

    def summary(self) -> str:
        return (f"k={self.k} n={self.n}: {self.certified}/{self.classes} certified, "
                f"{len(self.no_pairing)} without separated pairing, "
                f"at most {self.max_aux} auxiliary points, "
                f"{self.searched_placement} needing a searched placement, "
                f"{self.stats.pairing_splits} pairing splits, {self.stats.fallback_splits} fallback splits")


def _placements(S: PermStructure, m: int) -> Iterator[PermStructure]:
    """Every way to add ``m`` points to ``S`` (with repetition across orders of insertion)."""
    if m == 0:
        yield S
        return
    for pos in itertools.product(range(S.n + 1), repeat=S.k):
        yield from _placements(_insert(S, pos), m - 1)


def certify_by_pairing(S: PermStructure, floor: int, memo: dict, rep: GenReport) -> bool:
    """Add at most ``l - 1`` points so each pair of a separated pairing is
    split in every order, then split recursively.

    The direct placement puts each new point inside one still-adjacent pair
    per order.  Removing a point can make another pair adjacent again, so
    when the direct placement does not split all the way down every
    placement of the same number of points is tried.
    """
    pairings = separated_pairings(S)
    if not pairings:
        rep.no_pairing.append(S.canonical())
        return False
    for j, P in enumerate(pairings):
        A = extend_for_pairing(S, P)
        if all(has_between(A, *p) for p in P) and _certify(A, list(P), floor, memo, rep.stats):
            rep.max_aux = max(rep.max_aux, A.n - S.n)
            rep.used_other_pairing += j > 0
            return True
    for j, P in enumerate(pairings):
        for m in range(len(P)):
            for A in _placements(S, m):
                if all(has_between(A, *p) for p in P) and _certify(A, list(P), floor, memo, rep.stats):
                    rep.max_aux = max(rep.max_aux, m)
                    rep.used_other_pairing += j > 0
                    rep.searched_placement += 1
                    return True
    return False


def verify_4gen(k: int, n: int) -> GenReport:
    """Every ``n``-point class sits in a chain of forced amalgams of
    ``(n-1)``-point configurations."""
    if count_budget(n, k) > 20000:
        raise ValueError("class count out of budget")
    rep = GenReport(k, n)
    memo: dict = {}
    for S in enumerate_structures(n, k):
        rep.classes += 1
        if certify_by_pairing(S, n - 1, memo, rep):
            rep.certified += 1
        elif S.canonical() not in rep.no_pairing:
            rep.failures.append(S.canonical())
    return rep


def count_budget(n: int, k: int) -> int:
    return factorial(n) ** max(k - 1, 0)


@dataclass
class TriangleReduceReport:
    classes: int = 0
    step1: int = 0
    step2: int = 0
    step1_searched: int = 0
    step2_searched: int = 0
    failures: list[tuple] = field(default_factory=list)

    @property
    def certified(self) -> int:
        return self.step1 + self.step2

    @property
    def passed(self) -> bool:
        return self.certified == self.classes and not self.failures

    def summary(self) -> str:
        return (f"{self.certified}/{self.classes} four-point classes forced by triangles: "
                f"{self.step1} via separated pairings ({self.step1_searched} with a searched placement), "
                f"{self.step2} via an extra point ({self.step2_searched} with a searched placement)")


def _order_permuted(S: PermStructure, sigma: Sequence[int]) -> PermStructure:
    return PermStructure(tuple(S.ranks[s] for s in sigma), S.n)


def verify_trianglereduce() -> TriangleReduceReport:
    """For three orders: every 4-point configuration is forced by triangles.

    Classes with a separated pairing go through the pairing recursion down to
    3-point factors.  For the rest, relabel so that the first order reads
    ``a b c d`` and the pairings ``ac|bd``, ``ad|bc`` are unseparated in the
    second and third orders; a new point ``e`` then makes ``a b`` the only
    open pair of an amalgam over ``{e, c, d}`` whose factors both have
    separated pairings.
    """
    rep = TriangleReduceReport()
    memo: dict = {}
    scratch = GenReport(3, 4)
    step1: set[tuple] = set()
    pending = []
    for S in enumerate_structures(4, 3):
        rep.classes += 1
        before = scratch.searched_placement
        if find_separated_pairing(S) is not None and certify_by_pairing(S, 3, memo, scratch):
            step1.add(S.canonical())
            rep.step1 += 1
            rep.step1_searched += scratch.searched_placement > before
        else:
            pending.append(S)
    certified = set(step1)
    left = []
    for S in pending:
        if _step2(S, step1):
            rep.step2 += 1
            certified.add(S.canonical())
        else:
            left.append(S)
    # the direct placement can leave a-b adjacent in a later order; search
    # for any extra point and any forced pair whose factors are already certified
    changed = True
    while left and changed:
        changed = False
        for S in list(left):
            if _searched_split(S, certified):
                rep.step2 += 1
                rep.step2_searched += 1
                certified.add(S.canonical())
                left.remove(S)
                changed = True
    rep.failures = [S.canonical() for S in left]
    return rep


def _searched_split(S: PermStructure, certified: set[tuple]) -> bool:
    for pos in itertools.product(range(S.n + 1), repeat=S.k):
        A = _insert(S, pos)
        for x, y in itertools.combinations(range(S.n), 2):
            if not unique_amalgam(A, x, y):
                continue
            F = A.restrict([z for z in range(A.n) if z != x])
            G = A.restrict([z for z in range(A.n) if z != y])
            if F.canonical() in certified and G.canonical() in certified:
                return True
    return False


def _abcd_pattern(S: PermStructure) -> Iterator[PermStructure]:
    for sigma in itertools.permutations(range(3)):
        A = _order_permuted(S, sigma).reorder_by_first()
        if adjacent(A, 1, 0, 2) and adjacent(A, 1, 1, 3) and adjacent(A, 2, 0, 3) and adjacent(A, 2, 1, 2):
            yield A


def _step2_ok(Astar: PermStructure, step1: set[tuple]) -> bool:
    a, b, c, d, e = 0, 1, 2, 3, 4
    if not unique_amalgam(Astar, a, b):
        return False
    F = Astar.restrict([e, c, d, a])
    F2 = Astar.restrict([e, c, d, b])
    return F.canonical() in step1 and F2.canonical() in step1


def _step2(S: PermStructure, step1: set[tuple]) -> bool:
    a, b, c = 0, 1, 2
    for A in _abcd_pattern(S):
        # e just above a in the first order, inside a-c in the second, inside b-c in the third
        pos = [A.ranks[0][a] + 1, min(A.ranks[1][a], A.ranks[1][c]) + 1, min(A.ranks[2][b], A.ranks[2][c]) + 1]
        if _step2_ok(_insert(A, pos), step1):
            return True
    return False


# ---------------------------------------------------------------- closure and saturation

@dataclass
class ClosureReport:
    spec: ClassSpec
    base_bound: int
    diagrams: int = 0
    witness: PartialDiagram | None = None

    @property
    def passed(self) -> bool:
        return self.witness is None

    def summary(self) -> str:
        if self.witness is None:
            return f"closed over bases of size <= {self.base_bound} ({self.diagrams} diagrams)"
        return f"not closed: diagram {self.witness.to_dict()} has no allowed completion"


def allowed_structures(spec: ClassSpec, n: int) -> list[PermStructure]:
    return [S for S in enumerate_structures(n, spec.k) if spec.allows(S)]


def one_point_extensions(spec: ClassSpec, B: PermStructure) -> list[PermStructure]:
    out = []
    for pos in itertools.product(range(B.n + 1), repeat=spec.k):
        F = _insert(B, pos)
        if spec.allows(F):
            out.append(F)
    return out


def is_amalgamation_closed(spec: ClassSpec, base_bound: int = 2) -> ClosureReport:
    if base_bound > 3:
        raise ValueError("closure checking is budgeted for bases of at most 3 points")
    rep = ClosureReport(spec, base_bound)
    for r in range(base_bound + 1):
        for B in allowed_structures(spec, r):
            exts = one_point_extensions(spec, B)
            for i, F1 in enumerate(exts):
                for F2 in exts[i:]:
                    rep.diagrams += 1
                    D = PartialDiagram.of(F1)
                    D.n += 1
                    for j in range(r):
                        D.set(j, r + 1, F2.tp(j, r))
                    sols = complete_diagram(D, spec.allowed3, limit=None if r == 0 else 1)
                    if not any(s[r, r + 1] in spec.allowed2 for s in sols):
                        rep.witness = D
                        return rep
    return rep


def _extension_rows(spec: ClassSpec, pattern: tuple[int, ...], size: int, cache: dict) -> list[tuple[int, ...]]:
    """Allowed rows ``(tp(new, s_0), ...)`` over a subset whose internal
    types (pairs in lexicographic order) are ``pattern``."""
    key = (size, pattern)
    if key not in cache:
        T = [[-1] * size for _ in range(size)]
        for (a, b), t in zip(itertools.combinations(range(size), 2), pattern):
            T[a][b] = t
            T[b][a] = opposite(t, spec.k)
        sub = structure_from_types(size, spec.k, T)
        cache[key] = [tuple(F.tp(size, j) for j in range(size)) for F in one_point_extensions(spec, sub)]
    return cache[key]


def saturate(spec: ClassSpec, target_size: int, depth: int = 2, seed: int = 0) -> PermStructure:
    """Grow a structure with exactly ``target_size`` points.

    Sweeps go breadth-first over subsets of size ``<= depth``; every allowed
    one-point extension of a subset that has no witness yet gets a new point,
    placed by a seeded randomized completion.  Once a sweep finds nothing
    missing, further points are added at random positions.
    """
    if depth > 3:
        raise ValueError("depth is budgeted at 3")
    if target_size < 1:
        raise ValueError("need at least one point")
    rng = random.Random(seed)
    k = spec.k
    T: list[list[int]] = [[-1]]
    cache: dict = {}

    def add_point(constraints: dict[int, int]) -> None:
        n = len(T)
        D = PartialDiagram(n + 1, k)
        for x in range(n):
            for y in range(x + 1, n):
                D.typed[x, y] = T[x][y]
        for s, t in constraints.items():
            D.set(n, s, t)
        sols = complete_diagram(D, spec.allowed3, limit=1 if n > 1 else None, rng=rng)
        sols = [s for s in sols if all(t in spec.allowed2 for t in s.values())]
        if not sols:
            raise NotClosed(f"no allowed placement for a point with types {constraints}")
        for row in T:
            row.append(-1)
        T.append([-1] * (n + 1))
        for (x, y), t in list(sols[0].items()) + [((n, s), t) for s, t in constraints.items()]:
            T[x][y] = t
            T[y][x] = opposite(t, k)

    while len(T) < target_size:
        added = False
        n0 = len(T)
        for size in range(1, depth + 1):
            for subset in itertools.combinations(range(n0), size):
                pattern = tuple(T[a][b] for a, b in itertools.combinations(subset, 2))
                for row in _extension_rows(spec, pattern, size, cache):
                    if len(T) >= target_size:
                        break
                    if any(tuple(T[m][s] for s in subset) == row for m in range(len(T)) if m not in subset):
                        continue
                    add_point(dict(zip(subset, row)))
                    added = True
        if not added:
            add_point({})
    return structure_from_types(len(T), k, T)


def missing_extensions(spec: ClassSpec, S: PermStructure, depth: int) -> int:
    """How many (subset, allowed extension) pairs have no witness in ``S``."""
    count = 0
    for size in range(1, depth + 1):
        for subset in itertools.combinations(range(S.n), size):
            sub = S.restrict(list(subset))
            seen = {tuple(S.tp(m, s) for s in subset) for m in range(S.n) if m not in subset}
            for F in one_point_extensions(spec, sub):
                if tuple(F.tp(size, j) for j in range(size)) not in seen:
                    count += 1
    return count


def substructure_classes(S: PermStructure, size: int) -> set[tuple]:
    return {S.restrict(list(c)).canonical() for c in itertools.combinations(range(S.n), size)}
