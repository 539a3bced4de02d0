"""Subquotient orders on lattice-valued ultrametric spaces.

A subquotient order from ``E`` to ``F`` linearly orders the ``E``-classes
inside each ``F``-class and compares nothing else.  Here ``x`` and ``y`` are
``E``-related when ``d(x, y) <= E``.  Orders are stored on points (pulled
back from the classes); the ``E``-congruence is checked as an invariant.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .lattice import Lattice, boolean_square, chain, meet_irreducibles
from .permstruct import PermStructure, from_orders
from .umetric import UltrametricSpace, enumerate_spaces, extend, extension_rows, make_space, precanonical_distance, AmalgamProblem

Pair = tuple[int, int]


class MismatchedRelations(ValueError):
    pass


class ElementOutOfInterval(ValueError):
    pass


class NonMeetIrreducibleBottom(ValueError):
    pass


class InvalidFactor(ValueError):
    pass


class InvalidOrder(ValueError):
    pass


@dataclass(frozen=True)
class SubquotientOrder:
    bottom: int
    top: int
    rel: frozenset[Pair] = frozenset()

    def lt(self, x: int, y: int) -> bool:
        return (x, y) in self.rel

    def to_dict(self) -> dict:
        return {"bottom": self.bottom, "top": self.top, "rel": [list(p) for p in sorted(self.rel)]}


def sqo_violations(S: UltrametricSpace, o: SubquotientOrder) -> list[str]:
    L, n = S.lattice, S.n
    E, F = o.bottom, o.top
    out = []
    if not L.le(E, F):
        return [f"bottom {E} is not below top {F}"]

    def inner(x: int, y: int) -> bool:
        return L.le(S.d(x, y), F) and not L.le(S.d(x, y), E)

    for x, y in o.rel:
        if not (0 <= x < n and 0 <= y < n):
            out.append(f"pair ({x},{y}) out of range")
        elif not inner(x, y):
            out.append(f"({x},{y}) compared but not in the same {F}-class and distinct {E}-classes")
    if out:
        return out
    for x, y in itertools.combinations(range(n), 2):
        if inner(x, y) and o.lt(x, y) == o.lt(y, x):
            out.append(f"({x},{y}) not compared exactly once")
    for x, y in o.rel:
        for x2 in range(n):
            if not L.le(S.d(x, x2), E):
                continue
            for y2 in range(n):
                if L.le(S.d(y, y2), E) and not o.lt(x2, y2):
                    out.append(f"congruence fails: ({x},{y}) vs ({x2},{y2})")
                    return out
    for x, y, z in itertools.permutations(range(n), 3):
        if o.lt(x, y) and o.lt(y, z) and inner(x, z) and not o.lt(x, z):
            out.append(f"transitivity fails on ({x},{y},{z})")
            return out
    return out


def validate_sqo(S: UltrametricSpace, o: SubquotientOrder) -> None:
    bad = sqo_violations(S, o)
    if bad:
        raise InvalidOrder("; ".join(bad))


@dataclass(frozen=True)
class OrderedSpace:
    space: UltrametricSpace
    orders: tuple[SubquotientOrder, ...] = ()

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def lattice(self) -> Lattice:
        return self.space.lattice

    def violations(self) -> list[str]:
        out = self.space.violations()
        for i, o in enumerate(self.orders):
            out += [f"order {i}: {m}" for m in sqo_violations(self.space, o)]
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def restrict(self, points: Sequence[int]) -> "OrderedSpace":
        idx = {p: i for i, p in enumerate(points)}
        orders = tuple(
            SubquotientOrder(o.bottom, o.top, frozenset((idx[x], idx[y]) for x, y in o.rel if x in idx and y in idx))
            for o in self.orders
        )
        return OrderedSpace(self.space.restrict(points), orders)

    def two_type(self, x: int, y: int) -> tuple:
        return (self.space.d(x, y),) + tuple((o.lt(x, y), o.lt(y, x)) for o in self.orders)

    def two_types(self) -> set[tuple]:
        return {self.two_type(x, y) for x in range(self.n) for y in range(self.n) if x != y}

    def to_dict(self) -> dict:
        out = self.space.to_dict()
        out["orders"] = [o.to_dict() for o in self.orders]
        return out


def load_ordered_space(obj: dict, L: Lattice) -> OrderedSpace:
    S = make_space(L, obj["dist"])
    orders = tuple(
        SubquotientOrder(L.index(o["bottom"]), L.index(o["top"]), frozenset(tuple(p) for p in o.get("rel", [])))
        for o in obj.get("orders", [])
    )
    X = OrderedSpace(S, orders)
    bad = X.violations()
    if bad:
        raise InvalidOrder("; ".join(bad))
    return X


def compose_sqo(S: UltrametricSpace, hi: SubquotientOrder, lo: SubquotientOrder) -> SubquotientOrder:
    """``hi[lo]``: inside an ``F``-class use ``lo``, across ``F``-classes use ``hi``.

    The result runs from ``lo.bottom`` to ``hi.top``.  A definition reading
    top ``F`` would make it compare nothing across ``F``-classes, which
    contradicts its own second clause.
    """
    if lo.top != hi.bottom:
        raise MismatchedRelations(f"lower order tops at {lo.top}, upper order bottoms at {hi.bottom}")
    L, F = S.lattice, lo.top
    rel = set()
    for x, y in itertools.permutations(range(S.n), 2):
        if L.le(S.d(x, y), F):
            if lo.lt(x, y):
                rel.add((x, y))
        elif hi.lt(x, y):
            rel.add((x, y))
    return SubquotientOrder(lo.bottom, hi.top, frozenset(rel))


def restrict_sqo(S: UltrametricSpace, o: SubquotientOrder, G: int) -> SubquotientOrder:
    L = S.lattice
    if not (L.le(o.bottom, G) and L.le(G, o.top)):
        raise ElementOutOfInterval(f"{G} is not between {o.bottom} and {o.top}")
    return SubquotientOrder(o.bottom, G, frozenset(p for p in o.rel if L.le(S.d(*p), G)))


def is_well_equipped(L: Lattice, language: Iterable[tuple[int, int]]) -> bool:
    language = list(language)
    for b, t in language:
        if not L.le(b, t):
            raise ElementOutOfInterval(f"bottom {b} is not below top {t}")
    return {b for b, t in language if b != t} == set(meet_irreducibles(L))


def classes(S: UltrametricSpace, E: int) -> list[list[int]]:
    """The ``E``-classes, each sorted, listed by least element."""
    L = S.lattice
    out: list[list[int]] = []
    for x in range(S.n):
        for c in out:
            if L.le(S.d(x, c[0]), E):
                c.append(x)
                break
        else:
            out.append([x])
    return out


def sqo_from_class_order(S: UltrametricSpace, E: int, F: int, ranked: Sequence[Sequence[int]]) -> SubquotientOrder:
    """Pull back orders of ``E``-classes: ``ranked`` lists classes least first;
    only classes in a common ``F``-class get compared."""
    L = S.lattice
    rank = {}
    for r, cls in enumerate(ranked):
        for x in cls:
            rank[x] = r
    rel = frozenset(
        (x, y) for x, y in itertools.permutations(range(S.n), 2)
        if L.le(S.d(x, y), F) and not L.le(S.d(x, y), E) and rank[x] < rank[y]
    )
    return SubquotientOrder(E, F, rel)


def enumerate_sqos(S: UltrametricSpace, E: int, F: int) -> Iterator[SubquotientOrder]:
    """Every subquotient order from ``E`` to ``F`` on ``S``."""
    ecl = classes(S, E)
    fcl = classes(S, F)
    groups = [[c for c in ecl if c[0] in set(f)] for f in fcl]
    seen = set()
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        ranked = [c for g in choice for c in g]
        o = sqo_from_class_order(S, E, F, ranked)
        if o.rel not in seen:
            seen.add(o.rel)
            yield o


def random_sqo(S: UltrametricSpace, E: int, F: int, rng: random.Random) -> SubquotientOrder:
    ecl = classes(S, E)
    rng.shuffle(ecl)
    return sqo_from_class_order(S, E, F, ecl)


# ---------------------------------------------------------------- ordered amalgamation

def preceq(X: OrderedSpace, o: SubquotientOrder, a: int, b: int) -> bool:
    return X.lattice.le(X.space.d(a, b), o.bottom) or o.lt(a, b)


def arrow(X: OrderedSpace, o: SubquotientOrder, a: int, b: int, through: Iterable[int]) -> bool:
    """``a ->E b``: some ``x`` with ``a <=E x <=E b`` while ``a, b`` are not ``E``-related."""
    if X.lattice.le(X.space.d(a, b), o.bottom):
        return False
    return any(preceq(X, o, a, x) and preceq(X, o, x, b) for x in through)


def preceq_violations(X: OrderedSpace) -> list[str]:
    """Scan the four closure properties of the weak order ``<=E`` for every order."""
    L, n = X.lattice, X.n
    out = []
    for i, o in enumerate(X.orders):
        P = [[preceq(X, o, a, b) for b in range(n)] for a in range(n)]
        for a, b, c in itertools.product(range(n), repeat=3):
            if (P[a][b] and o.lt(b, c) or o.lt(a, b) and P[b][c]) and not o.lt(a, c):
                out.append(f"order {i}: strictness fails on ({a},{b},{c})")
            if P[a][b] and P[b][c] and not P[a][c]:
                out.append(f"order {i}: transitivity fails on ({a},{b},{c})")
            if P[a][b] and P[b][c] and L.le(X.space.d(a, c), o.bottom) and not L.le(X.space.d(a, b), o.bottom):
                out.append(f"order {i}: betweenness fails on ({a},{b},{c})")
        for a, b in itertools.permutations(range(n), 2):
            if P[a][b] and P[b][a] and not L.le(X.space.d(a, b), o.bottom):
                out.append(f"order {i}: antisymmetry fails on ({a},{b})")
        if out:
            return out
    return out


@dataclass(frozen=True)
class OrderedAmalgamProblem:
    """Two one-point extensions of ``base``: each factor has the base on
    points ``0..n-1`` and its new point at ``n``."""

    base: OrderedSpace
    factor1: OrderedSpace
    factor2: OrderedSpace

    def validate(self) -> None:
        n = self.base.n
        L = self.base.lattice
        mi = meet_irreducibles(L)
        for o in self.base.orders:
            if o.bottom not in mi:
                raise NonMeetIrreducibleBottom(f"bottom {L.name(o.bottom)} is meet-reducible")
        for F in (self.factor1, self.factor2):
            if F.n != n + 1 or len(F.orders) != len(self.base.orders):
                raise InvalidFactor("factor must add exactly one point and keep the orders")
            bad = F.violations()
            if bad:
                raise InvalidFactor("; ".join(bad))
            if F.restrict(list(range(n))) != self.base:
                raise InvalidFactor("factor does not restrict to the base")
            if any(F.space.d(n, i) == L.bottom for i in range(n)):
                raise InvalidFactor("new point at distance bottom from a base point")


@dataclass(frozen=True)
class OrderedAmalgam:
    result: OrderedSpace
    # new index of each base point, then of a1 and a2
    mapping: tuple[int, ...]

    @property
    def identified(self) -> bool:
        return self.mapping[-1] == self.mapping[-2]


class ArrowConflict(AssertionError):
    """Both ``a1 ->E a2`` and ``a2 ->E a1`` held."""


def amalgamate_ordered(P: OrderedAmalgamProblem, check: bool = True) -> OrderedAmalgam:
    """Canonical amalgam of distances, then each order extended independently.

    For an order from ``E`` to ``F``: nothing is added when ``d(a1,a2) <= E``
    (the order is already congruent) or ``d(a1,a2)`` is not below ``F``.
    Otherwise the new pair follows ``->E`` through base points; if neither
    direction is forced, ``a1`` goes first.
    """
    P.validate()
    base = P.base
    L, n = base.lattice, base.n
    row1 = tuple(P.factor1.space.d(n, i) for i in range(n))
    row2 = tuple(P.factor2.space.d(n, i) for i in range(n))
    d12 = precanonical_distance(AmalgamProblem(base.space, row1, row2))
    a1, a2 = n, n + 1
    if d12 == L.bottom:
        if P.factor1 != P.factor2:
            raise InvalidFactor("factors at distance bottom are not identical")
        return OrderedAmalgam(P.factor1, tuple(range(n)) + (n, n))
    dist = [list(r) + [row1[i], row2[i]] for i, r in enumerate(base.space.dist)]
    dist.append(list(row1) + [L.bottom, d12])
    dist.append(list(row2) + [d12, L.bottom])
    space = UltrametricSpace(L, tuple(map(tuple, dist)))
    orders = []
    for o, o1, o2 in zip(base.orders, P.factor1.orders, P.factor2.orders):
        rel = set(o.rel)
        rel |= {(x, y) for x, y in o1.rel}
        rel |= {(a2 if x == n else x, a2 if y == n else y) for x, y in o2.rel}
        ext = SubquotientOrder(o.bottom, o.top, frozenset(rel))
        if L.le(d12, o.top) and not L.le(d12, o.bottom):
            X = OrderedSpace(space, (ext,))
            fwd = arrow(X, ext, a1, a2, range(n))
            back = arrow(X, ext, a2, a1, range(n))
            if fwd and back:
                raise ArrowConflict(f"both directions forced for order ({o.bottom},{o.top})")
            rel.add((a2, a1) if back else (a1, a2))
            ext = SubquotientOrder(o.bottom, o.top, frozenset(rel))
        orders.append(ext)
    out = OrderedSpace(space, tuple(orders))
    if check:
        bad = out.violations() + preceq_violations(out)
        if bad:
            raise InvalidOrder("; ".join(bad))
    return OrderedAmalgam(out, tuple(range(n + 2)))


def ordered_extensions(base: OrderedSpace) -> Iterator[OrderedSpace]:
    """Every one-point ordered extension of ``base``."""
    n = base.n
    keep = list(range(n))
    for row in extension_rows(base.space):
        S = extend(base.space, row)
        per_order = []
        for o in base.orders:
            per_order.append([q for q in enumerate_sqos(S, o.bottom, o.top)
                              if frozenset(p for p in q.rel if n not in p) == o.rel])
        for combo in itertools.product(*per_order):
            X = OrderedSpace(S, tuple(combo))
            assert X.restrict(keep) == base
            yield X


def ordered_problems(L: Lattice, language: Sequence[tuple[int, int]], base_bound: int) -> Iterator[OrderedAmalgamProblem]:
    for r in range(base_bound + 1):
        for S in enumerate_spaces(L, r):
            for combo in itertools.product(*(list(enumerate_sqos(S, b, t)) for b, t in language)):
                base = OrderedSpace(S, tuple(combo))
                exts = list(ordered_extensions(base))
                for f1 in exts:
                    for f2 in exts:
                        yield OrderedAmalgamProblem(base, f1, f2)


def default_languages(L: Lattice) -> list[list[tuple[int, int]]]:
    """One order per meet-irreducible, with every choice of top strictly above it."""
    mi = sorted(meet_irreducibles(L))
    tops = [[t for t in L.elements() if L.lt(e, t)] for e in mi]
    return [list(zip(mi, ts)) for ts in itertools.product(*tops)]


@dataclass
class OrderedClosureReport:
    lattice: Lattice
    problems: int = 0
    identified: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_ordered_amalgamation(L: Lattice, base_bound: int = 2) -> OrderedClosureReport:
    if base_bound > 2:
        raise ValueError("ordered amalgamation checking is budgeted for bases of at most 2 points")
    rep = OrderedClosureReport(L)
    for lang in default_languages(L):
        for P in ordered_problems(L, lang, base_bound):
            rep.problems += 1
            try:
                res = amalgamate_ordered(P)
            except (ArrowConflict, InvalidOrder, InvalidFactor) as exc:
                rep.failures.append(f"{lang}: {exc}")
                continue
            rep.identified += res.identified
            n = P.base.n
            for ext, F in ((n, P.factor1), (n + 1, P.factor2)):
                idx = list(res.mapping[:n]) + [res.mapping[ext]]
                if res.result.restrict(idx) != F:
                    rep.failures.append(f"{lang}: factor does not embed")
    return rep


# ---------------------------------------------------------------- worked examples

def lex_order(X: OrderedSpace, outer: SubquotientOrder, inner: SubquotientOrder) -> frozenset[Pair]:
    """``outer`` first, ties inside an ``outer.bottom``-class broken by ``inner``."""
    L = X.lattice
    rel = set()
    for x, y in itertools.permutations(range(X.n), 2):
        if outer.lt(x, y) or (L.le(X.space.d(x, y), outer.bottom) and inner.lt(x, y)):
            rel.add((x, y))
    return frozenset(rel)


def is_linear(n: int, rel: frozenset[Pair]) -> bool:
    for x, y in itertools.combinations(range(n), 2):
        if ((x, y) in rel) == ((y, x) in rel):
            return False
    return all((x, z) in rel for x, y in rel for y2, z in rel if y == y2 and x != z)


def is_convex_for(X: OrderedSpace, rel: frozenset[Pair], E: int) -> bool:
    L = X.lattice
    for x, z in rel:
        if L.le(X.space.d(x, z), E):
            for y in range(X.n):
                if (x, y) in rel and (y, z) in rel and not L.le(X.space.d(x, y), E):
                    return False
    return True


def _rel_to_orders(n: int, rels: Sequence[frozenset[Pair]]) -> PermStructure:
    orders = []
    for rel in rels:
        below = {x: sum(1 for y in range(n) if (y, x) in rel) for x in range(n)}
        orders.append(sorted(range(n), key=below.__getitem__))
    return from_orders(orders)


@dataclass(frozen=True)
class AgreementExample:
    """A linear order together with an ``E``-convex order agreeing inside classes."""

    ordered: OrderedSpace
    linear: PermStructure

    def E(self, x: int, y: int) -> bool:
        X = self.ordered
        return X.lattice.le(X.space.d(x, y), 1)

    def translate_back(self) -> tuple[frozenset[Pair], frozenset[Pair]]:
        """Recover the two subquotient orders from the two linear orders and ``E``."""
        P, n = self.linear, self.linear.n
        o1 = frozenset((x, y) for x, y in itertools.permutations(range(n), 2) if P.ranks[0][x] < P.ranks[0][y])
        o2 = frozenset((x, y) for x, y in itertools.permutations(range(n), 2)
                       if not self.E(x, y) and P.ranks[1][x] < P.ranks[1][y])
        return o1, o2

    def round_trip_ok(self) -> bool:
        o1, o2 = self.translate_back()
        return (o1, o2) == (self.ordered.orders[0].rel, self.ordered.orders[1].rel)


def build_agreement_example(n: int, seed: int = 0) -> AgreementExample:
    """Chain ``0 < E < 1``; ``max(1, n // 2)`` classes of random sizes.

    The orders are a subquotient order from ``0`` to ``1`` and one from ``E``
    to ``1``.  The linear presentation keeps the first and composes the second
    over the first restricted to ``E``.
    """
    if n < 2:
        raise ValueError("need at least two points")
    rng = random.Random(seed)
    L = chain(3, ["0", "E", "1"])
    c = max(1, n // 2)
    label = list(range(c)) + [rng.randrange(c) for _ in range(n - c)]
    rng.shuffle(label)
    dist = [[0 if x == y else (1 if label[x] == label[y] else 2) for y in range(n)] for x in range(n)]
    S = make_space(L, dist)
    o1 = random_sqo(S, 0, 2, rng)
    o2 = random_sqo(S, 1, 2, rng)
    X = OrderedSpace(S, (o1, o2))
    lin2 = compose_sqo(S, o2, restrict_sqo(S, o1, 1))
    return AgreementExample(X, _rel_to_orders(n, [o1.rel, lin2.rel]))


def build_fullproduct(n: int) -> OrderedSpace:
    """Grid ``n x n`` over ``0 < a, b < 1``: ``a`` relates equal first
    coordinates, ``b`` equal second ones.  Orders compare by first
    coordinate (from ``a`` to ``1``) and by second (from ``b`` to ``1``)."""
    if n < 2:
        raise ValueError("need at least two points per coordinate")
    L = boolean_square()
    A, B, TOP = 1, 2, 3
    pts = [(i, j) for i in range(n) for j in range(n)]

    def dist(p, q):
        if p == q:
            return 0
        return A if p[0] == q[0] else B if p[1] == q[1] else TOP

    S = make_space(L, [[dist(p, q) for q in pts] for p in pts])
    o1 = frozenset((x, y) for x, y in itertools.permutations(range(len(pts)), 2) if pts[x][0] < pts[y][0])
    o2 = frozenset((x, y) for x, y in itertools.permutations(range(len(pts)), 2) if pts[x][1] < pts[y][1])
    return OrderedSpace(S, (SubquotientOrder(A, TOP, o1), SubquotientOrder(B, TOP, o2)))


def forbidden_configurations(X: OrderedSpace) -> list[tuple[int, int, int, int]]:
    """Rectangles ``x1 x2 / y1 y2`` where the two ``E1``-classes disagree
    under the second order, plus the same with the roles of the two
    coordinates swapped."""
    L = X.lattice
    (o1, o2) = X.orders
    e1, e2 = o1.bottom, o2.bottom
    n = X.n
    rel = lambda x, y, e: L.le(X.space.d(x, y), e)
    out = []
    for eA, eB, o in ((e1, e2, o2), (e2, e1, o1)):
        for x1, x2, y1, y2 in itertools.permutations(range(n), 4):
            if not (rel(x1, x2, eA) and rel(y1, y2, eA) and not rel(x1, y1, eA)):
                continue
            if not (rel(x1, y1, eB) and rel(x2, y2, eB) and not rel(x1, x2, eB)):
                continue
            if o.lt(x1, x2) and o.lt(y2, y1):
                out.append((x1, x2, y1, y2))
    return out


@dataclass
class FullProductCheck:
    n: int
    two_types: int
    forbidden: int
    linear: bool
    convex: bool

    @property
    def passed(self) -> bool:
        return self.two_types == 8 and self.forbidden == 0 and self.linear and self.convex

    def to_dict(self) -> dict:
        return dict(self.__dict__, passed=self.passed)


def check_fullproduct(n: int) -> FullProductCheck:
    """Realized 2-types, forbidden rectangles, and the two lexicographic
    compositions of the grid, each convex for its own coordinate relation."""
    X = build_fullproduct(n)
    o1, o2 = X.orders
    lex1, lex2 = lex_order(X, o1, o2), lex_order(X, o2, o1)
    nontrivial = {t for t in X.two_types() if t[0] != X.lattice.bottom}
    return FullProductCheck(
        n, len(nontrivial), len(forbidden_configurations(X)),
        is_linear(X.n, lex1) and is_linear(X.n, lex2),
        is_convex_for(X, lex1, o1.bottom) and is_convex_for(X, lex2, o2.bottom))
