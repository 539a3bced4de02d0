"""Lattice-valued ultrametric spaces and their amalgamation.

A space over a finite lattice ``L`` assigns every pair of points an element
of ``L``; the triangle inequality uses join.  Such a space is the same thing
as a meet-preserving family of equivalence relations indexed by ``L``
(:func:`space_to_system` / :func:`system_to_space`).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .lattice import Lattice


class InvalidSpace(ValueError):
    pass


class TriangleViolation(Exception):
    """The completed distance matrix breaks ``d(x,z) <= d(x,y) v d(y,z)``."""

    def __init__(self, triple: tuple[int, int, int], message: str = ""):
        self.triple = triple
        super().__init__(message or f"triangle inequality fails on {triple}")


@dataclass(frozen=True)
class UltrametricSpace:
    lattice: Lattice
    dist: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.dist)

    def d(self, x: int, y: int) -> int:
        return self.dist[x][y]

    def violations(self) -> list[str]:
        L, D, n = self.lattice, self.dist, self.n
        out = []
        for x in range(n):
            if D[x][x] != L.bottom:
                out.append(f"d({x},{x}) is not bottom")
            for y in range(n):
                if D[x][y] != D[y][x]:
                    out.append(f"d({x},{y}) != d({y},{x})")
                if x != y and D[x][y] == L.bottom:
                    out.append(f"distinct points {x},{y} at distance bottom")
        t = triangle_failure(L, D)
        if t is not None:
            out.append(f"triangle inequality fails on {t}")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def restrict(self, points: Sequence[int]) -> "UltrametricSpace":
        return UltrametricSpace(self.lattice, tuple(tuple(self.dist[a][b] for b in points) for a in points))

    def to_dict(self) -> dict:
        return {"lattice": self.lattice.to_dict(), "n": self.n, "dist": [list(r) for r in self.dist]}


def triangle_failure(L: Lattice, D: Sequence[Sequence[int]]) -> tuple[int, int, int] | None:
    n = len(D)
    for x, y, z in itertools.product(range(n), repeat=3):
        if not L.leq[D[x][z]][L.join[D[x][y]][D[y][z]]]:
            return (x, y, z)
    return None


def make_space(L: Lattice, dist: Sequence[Sequence[int]]) -> UltrametricSpace:
    S = UltrametricSpace(L, tuple(tuple(int(v) for v in row) for row in dist))
    bad = S.violations()
    if bad:
        raise InvalidSpace("; ".join(bad))
    return S


@dataclass(frozen=True)
class EquivalenceSystem:
    """One partition of the points per lattice element.

    A partition is stored as a tuple of class labels, the label of a point
    being the least point in its class.
    """

    lattice: Lattice
    n: int
    partitions: tuple[tuple[int, ...], ...]

    def related(self, lam: int, x: int, y: int) -> bool:
        return self.partitions[lam][x] == self.partitions[lam][y]

    def violations(self) -> list[str]:
        L, n, P = self.lattice, self.n, self.partitions
        out = []
        if P[L.bottom] != tuple(range(n)):
            out.append("bottom partition is not equality")
        if P[L.top] != tuple([0] * n):
            out.append("top partition is not the one-class partition")
        for lam, mu in itertools.product(L.elements(), repeat=2):
            if L.le(lam, mu) and not _refines(P[lam], P[mu]):
                out.append(f"partition at {lam} does not refine partition at {mu}")
            common = _labels([(P[lam][x], P[mu][x]) for x in range(n)])
            if P[L.meet[lam][mu]] != common:
                out.append(f"partition at meet({lam},{mu}) is not the common refinement")
        return out


def _labels(keys: Sequence) -> tuple[int, ...]:
    first: dict = {}
    return tuple(first.setdefault(k, i) for i, k in enumerate(keys))


def _refines(p: Sequence[int], q: Sequence[int]) -> bool:
    return all(q[x] == q[y] for x in range(len(p)) for y in range(len(p)) if p[x] == p[y])


def space_to_system(S: UltrametricSpace) -> EquivalenceSystem:
    L = S.lattice
    parts = []
    for lam in L.elements():
        label = []
        for x in range(S.n):
            label.append(next(y for y in range(x + 1) if L.leq[S.dist[x][y]][lam]))
        parts.append(tuple(label))
    return EquivalenceSystem(L, S.n, tuple(parts))


def system_to_space(Y: EquivalenceSystem) -> UltrametricSpace:
    L = Y.lattice
    dist = [
        [L.meet_all(lam for lam in L.elements() if Y.related(lam, x, y)) for y in range(Y.n)]
        for x in range(Y.n)
    ]
    return UltrametricSpace(L, tuple(map(tuple, dist)))


def random_space(L: Lattice, n: int, rng: random.Random) -> UltrametricSpace:
    """Add points one at a time, drawing each distance uniformly among the
    values that keep the partial matrix valid.  An all-top row always fits,
    so the backtracking never fails."""
    if L.size == 1 and n > 1:
        raise InvalidSpace("a one-element lattice admits at most one point")
    dist: list[list[int]] = []
    values = [v for v in L.elements() if v != L.bottom]
    for new in range(n):
        row = _random_row(L, dist, values, rng)
        for i, v in enumerate(row):
            dist[i].append(v)
        dist.append(list(row) + [L.bottom])
    return UltrametricSpace(L, tuple(map(tuple, dist)))


def _random_row(L, dist, values, rng):
    m = len(dist)
    row: list[int] = []

    def ok(i: int, v: int) -> bool:
        for j in range(i):
            dij, w = dist[i][j], row[j]
            if not (L.leq[v][L.join[dij][w]] and L.leq[w][L.join[dij][v]] and L.leq[dij][L.join[v][w]]):
                return False
        return True

    def go(i: int) -> bool:
        if i == m:
            return True
        for v in rng.sample(values, len(values)):
            if ok(i, v):
                row.append(v)
                if go(i + 1):
                    return True
                row.pop()
        return False

    if not go(0):
        raise InvalidSpace("no valid extension row")
    return row


def extension_rows(S: UltrametricSpace) -> Iterator[tuple[int, ...]]:
    """Every distance row that extends ``S`` by one new point (never bottom)."""
    L = S.lattice
    values = [v for v in L.elements() if v != L.bottom]
    for row in itertools.product(values, repeat=S.n):
        if _row_ok(S, row):
            yield row


def _row_ok(S: UltrametricSpace, row: Sequence[int]) -> bool:
    L, D = S.lattice, S.dist
    for i in range(S.n):
        for j in range(S.n):
            if not L.leq[row[i]][L.join[D[i][j]][row[j]]]:
                return False
            if not L.leq[D[i][j]][L.join[row[i]][row[j]]]:
                return False
    return True


def enumerate_spaces(L: Lattice, n: int) -> Iterator[UltrametricSpace]:
    """All valid spaces on points ``0..n-1`` (labeled, not up to isomorphism)."""
    if n == 0:
        yield UltrametricSpace(L, ())
        return
    for S in enumerate_spaces(L, n - 1):
        for row in extension_rows(S):
            yield extend(S, row)


def extend(S: UltrametricSpace, row: Sequence[int]) -> UltrametricSpace:
    L = S.lattice
    dist = [list(r) + [row[i]] for i, r in enumerate(S.dist)]
    dist.append(list(row) + [L.bottom])
    return UltrametricSpace(L, tuple(map(tuple, dist)))


@dataclass(frozen=True)
class AmalgamProblem:
    """Two one-point extensions of ``base``; ``row1[i] = d(a1, b_i)``."""

    base: UltrametricSpace
    row1: tuple[int, ...]
    row2: tuple[int, ...]

    def validate(self) -> None:
        for row in (self.row1, self.row2):
            if len(row) != self.base.n:
                raise InvalidSpace("row length differs from base size")
            bad = extend(self.base, row).violations()
            if bad:
                raise InvalidSpace("; ".join(bad))


@dataclass(frozen=True)
class AmalgamResult:
    space: UltrametricSpace
    # new index of each base point, then of a1 and a2
    mapping: tuple[int, ...]

    @property
    def identified(self) -> bool:
        return self.mapping[-1] == self.mapping[-2]


def precanonical_distance(P: AmalgamProblem) -> int:
    L = P.base.lattice
    return L.meet_all(L.join[e][f] for e, f in zip(P.row1, P.row2))


def canonical_amalgam(P: AmalgamProblem) -> AmalgamResult:
    """Free amalgam with ``d(a1, a2)`` the meet over the base of ``e_i v e'_i``.

    When that value is bottom the two new points are merged.  Over a
    non-distributive lattice the result can break the triangle inequality;
    this raises :class:`TriangleViolation` carrying the offending triple.
    """
    L, base = P.base.lattice, P.base
    r = base.n
    d12 = precanonical_distance(P)
    if d12 == L.bottom:
        for i, (e, f) in enumerate(zip(P.row1, P.row2)):
            # d(a1,b_i) <= d(a1,a2) v d(a2,b_i) = f, and symmetrically
            if not L.leq[e][f]:
                raise TriangleViolation((r, r + 1, i), "merged points disagree on a base distance")
            if not L.leq[f][e]:
                raise TriangleViolation((r + 1, r, i), "merged points disagree on a base distance")
        return AmalgamResult(extend(base, P.row1), tuple(range(r)) + (r, r))
    dist = [list(row) + [P.row1[i], P.row2[i]] for i, row in enumerate(base.dist)]
    dist.append(list(P.row1) + [L.bottom, d12])
    dist.append(list(P.row2) + [d12, L.bottom])
    t = triangle_failure(L, dist)
    if t is not None:
        raise TriangleViolation(t)
    return AmalgamResult(UltrametricSpace(L, tuple(map(tuple, dist))), tuple(range(r + 2)))


@dataclass
class ClosureReport:
    lattice: Lattice
    base_bound: int
    problems: int = 0
    violation: tuple[AmalgamProblem, tuple[int, int, int]] | None = None

    @property
    def passed(self) -> bool:
        return self.violation is None

    def summary(self) -> str:
        if self.violation is None:
            return f"no violation at this bound ({self.problems} problems)"
        P, t = self.violation
        return f"violation on triple {t} for base {P.base.dist} rows {P.row1} {P.row2}"


def amalgam_problems(L: Lattice, base_bound: int) -> Iterator[AmalgamProblem]:
    for r in range(base_bound + 1):
        for base in enumerate_spaces(L, r):
            rows = list(extension_rows(base))
            for r1 in rows:
                for r2 in rows:
                    yield AmalgamProblem(base, r1, r2)


def verify_closure(L: Lattice, base_bound: int, stop_at_first: bool = True) -> ClosureReport:
    if base_bound > 3:
        raise ValueError("closure checking is budgeted for bases of at most 3 points")
    rep = ClosureReport(L, base_bound)
    for P in amalgam_problems(L, base_bound):
        rep.problems += 1
        try:
            res = canonical_amalgam(P)
        except TriangleViolation as exc:
            if rep.violation is None:
                rep.violation = (P, exc.triple)
            if stop_at_first:
                break
            continue
        assert embeds(P, res), "factor does not embed isometrically"
    return rep


def embeds(P: AmalgamProblem, res: AmalgamResult) -> bool:
    """Both factors sit isometrically inside the amalgam."""
    r = P.base.n
    for row, ext in ((P.row1, r), (P.row2, r + 1)):
        F = extend(P.base, row)
        idx = list(res.mapping[:r]) + [res.mapping[ext]]
        if res.space.restrict(idx).dist != F.dist:
            return False
    return True
