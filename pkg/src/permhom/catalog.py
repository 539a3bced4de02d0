"""The homogeneous structures with three orders, as executable recipes.

An entry is a composition ``F1[F2[...]]`` of factors listed outermost first.
Factors are the generic structures ``G1``, ``G2``, ``G3`` with that many
orders, ``star`` (a generic order together with an order of the classes of
an equivalence relation) and ``lexgen`` (lexicographic ``G1[G1]`` with an
extra generic order).  The lattice is the chain of congruences, level ``0``
being equality; a factor spanning the levels ``t..u`` contributes
subquotient orders between those levels.

The linear-order presentation composes each linear order from pieces, one
subquotient order (possibly reversed) per run of consecutive levels.  It is
found by a deterministic search requiring that the level of a pair can be
read off its sign vector, so the congruences stay definable.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cmp_to_key, lru_cache
from typing import Iterable, Sequence

from .fraisse import ClassSpec, saturate
from .lattice import Lattice, chain
from .permstruct import PermStructure
from .sqorder import OrderedSpace, SubquotientOrder, enumerate_sqos, is_convex_for, is_well_equipped
from .umetric import UltrametricSpace, enumerate_spaces

FACTOR_SPAN = {"G0": 1, "G1": 1, "G2": 1, "G3": 1, "star": 2, "lexgen": 2}
FACTOR_TYPES = {"G1": 2, "G2": 4, "G3": 8, "star": 6, "lexgen": 8}
TYPE_BUDGET = 8


class UnknownEntry(KeyError):
    pass


class TypeBudgetExceeded(ValueError):
    pass


class NoPresentation(RuntimeError):
    pass


# ---------------------------------------------------------------- languages

@dataclass(frozen=True)
class LangOrder:
    """A subquotient order between two chain levels, owned by one factor."""

    bottom: int
    top: int
    factor: int
    name: str


def factor_orders(kind: str, base: int, factor: int) -> list[LangOrder]:
    if kind in ("G0", "G1", "G2", "G3"):
        return [LangOrder(base, base + 1, factor, f"{kind}.{i + 1}") for i in range(int(kind[1]))]
    if kind == "star":
        return [LangOrder(base, base + 2, factor, "star.gen"), LangOrder(base + 1, base + 2, factor, "star.cls")]
    if kind == "lexgen":
        return [LangOrder(base, base + 2, factor, "lexgen.gen"), LangOrder(base, base + 1, factor, "lexgen.in"),
                LangOrder(base + 1, base + 2, factor, "lexgen.out")]
    raise ValueError(f"unknown factor {kind!r}")


def recipe_name(recipe: Sequence[str]) -> str:
    names = {"G0": "G0", "G1": "G1", "G2": "G2", "G3": "G3", "star": "G*", "lexgen": "G1[G1]+G1"}
    out = names[recipe[-1]]
    for kind in reversed(recipe[:-1]):
        out = f"{names[kind]}[{out}]"
    return out


def levels_of(recipe: Sequence[str]) -> int:
    return sum(FACTOR_SPAN[k] for k in recipe)


def language_of(recipe: Sequence[str]) -> list[LangOrder]:
    out = []
    base = 0
    for f, kind in reversed(list(enumerate(recipe))):
        out += factor_orders(kind, base, f)
        base += FACTOR_SPAN[kind]
    return out


def type_count(recipe: Sequence[str]) -> int:
    """Nontrivial 2-types of the composition: factors add up."""
    return sum(FACTOR_TYPES.get(k, 0) for k in recipe)


# ---------------------------------------------------------------- presentations

@dataclass(frozen=True)
class Piece:
    order: int  # index into the language
    reversed: bool
    lo: int
    hi: int


Path = tuple[Piece, ...]


def _paths(lang: Sequence[LangOrder], h: int) -> list[Path]:
    out: list[Path] = []

    def go(level: int, acc: list[Piece]) -> None:
        if level == h:
            out.append(tuple(acc))
            return
        for i, o in enumerate(lang):
            if o.bottom != level:
                continue
            for hi in range(level + 1, o.top + 1):
                for rev in (False, True):
                    acc.append(Piece(i, rev, level, hi))
                    go(hi, acc)
                    acc.pop()

    go(0, [])
    return out


def _piece_at(path: Path, t: int) -> Piece:
    """The piece covering the interval between levels ``t`` and ``t+1``."""
    for p in path:
        if p.lo <= t < p.hi:
            return p
    raise ValueError(t)


@dataclass(frozen=True)
class Presentation:
    paths: tuple[Path, ...]
    levels: int

    @property
    def k(self) -> int:
        return len(self.paths)

    def used_at(self, t: int) -> list[int]:
        return sorted({_piece_at(p, t).order for p in self.paths})

    def signs_at(self, t: int) -> set[tuple[bool, ...]]:
        """Sign vectors of pairs at level ``t+1``, orders varying freely."""
        used = self.used_at(t)
        out = set()
        for vals in itertools.product((False, True), repeat=len(used)):
            v = dict(zip(used, vals))
            out.add(tuple(v[_piece_at(p, t).order] != _piece_at(p, t).reversed for p in self.paths))
        return out

    def level_table(self) -> dict[tuple[bool, ...], int]:
        return {s: t for t in range(self.levels) for s in self.signs_at(t)}

    def describe(self, lang: Sequence[LangOrder]) -> list[str]:
        out = []
        for p in self.paths:
            parts = [f"{'rev ' if q.reversed else ''}{lang[q.order].name}@{q.lo}-{q.hi}" for q in reversed(p)]
            out.append(" [ ".join(parts) + " ]" * (len(parts) - 1))
        return out


def _valid(paths: Sequence[Path], lang: Sequence[LangOrder], h: int) -> bool:
    pres = Presentation(tuple(paths), h)
    seen: set = set()
    for t in range(h):
        used = set(pres.used_at(t))
        # every language order alive at t must be readable at t
        if any(o.bottom <= t < o.top and i not in used for i, o in enumerate(lang)):
            return False
        s = pres.signs_at(t)
        if s & seen:
            return False
        seen |= s
    return True


@lru_cache(maxsize=None)
def find_presentation(recipe: tuple[str, ...], max_orders: int = 3) -> Presentation:
    """The first valid presentation with the fewest linear orders.  Paths
    are tried in a fixed order; the first path is never reversed at the top."""
    lang = language_of(recipe)
    h = levels_of(recipe)
    paths = _paths(lang, h)
    for k in range(1, max_orders + 1):
        for combo in itertools.combinations(paths, k):
            if combo[0][-1].reversed:
                continue
            if _valid(combo, lang, h):
                return Presentation(tuple(combo), h)
    raise NoPresentation(f"{recipe_name(recipe)} has no presentation in {max_orders} linear orders")


# ---------------------------------------------------------------- approximations

@dataclass
class Approx:
    """Points with levels ``D[x][y]`` in ``0..h`` and one rank vector per
    language order (ties allowed where the order does not compare)."""

    h: int
    D: list[list[int]]
    ranks: list[list[int]]

    @property
    def n(self) -> int:
        return len(self.D)


def _factor_approx(kind: str, m: int, rng: random.Random) -> Approx:
    D = [[0 if x == y else 1 for y in range(m)] for x in range(m)]
    if kind == "G0":
        return Approx(1, D, [])
    if kind == "G1":
        perm = list(range(m))
        rng.shuffle(perm)
        return Approx(1, D, [perm])
    if kind in ("G2", "G3"):
        k = int(kind[1])
        S = saturate(ClassSpec.generic(k), m, depth=2, seed=rng.randrange(1 << 30))
        return Approx(1, D, [list(r) for r in S.ranks])
    if kind in ("star", "lexgen"):
        c = max(2, round(math.sqrt(m)))
        label = list(range(c)) + [rng.randrange(c) for _ in range(m - c)]
        rng.shuffle(label)
        D = [[0 if x == y else (1 if label[x] == label[y] else 2) for y in range(m)] for x in range(m)]
        gen = list(range(m))
        rng.shuffle(gen)
        cls = list(range(c))
        rng.shuffle(cls)
        out = [cls[label[x]] for x in range(m)]
        if kind == "star":
            return Approx(2, D, [gen, out])
        inner = list(range(m))
        rng.shuffle(inner)
        return Approx(2, D, [gen, inner, out])
    raise ValueError(f"unknown factor {kind!r}")


def compose_approx(outer: Approx, inner: Approx) -> Approx:
    """Blow every outer point up into a copy of ``inner``; point ``(i, j)``
    becomes ``i * inner.n + j``.  Inner orders come first."""
    a, b = outer.n, inner.n
    D = [[0] * (a * b) for _ in range(a * b)]
    for i, j, i2, j2 in itertools.product(range(a), range(b), range(a), range(b)):
        D[i * b + j][i2 * b + j2] = inner.D[j][j2] if i == i2 else outer.D[i][i2] + inner.h
    ranks = [[r[j] for i in range(a) for j in range(b)] for r in inner.ranks]
    ranks += [[r[i] for i in range(a) for j in range(b)] for r in outer.ranks]
    return Approx(outer.h + inner.h, D, ranks)


def _factor_sizes(recipe: Sequence[str], size: int) -> list[int]:
    m = len(recipe)
    s = max(2, math.ceil(size ** (1 / m)))
    while s ** m < size:
        s += 1
    return [s] * m


def build_approx(recipe: Sequence[str], size: int, seed: int) -> Approx:
    rng = random.Random(seed)
    sizes = _factor_sizes(recipe, size)
    approxes = [_factor_approx(kind, s, rng) for kind, s in zip(recipe, sizes)]
    acc = approxes[-1]
    for outer in reversed(approxes[:-1]):
        acc = compose_approx(outer, acc)
    return acc


def approx_to_space(A: Approx, lang: Sequence[LangOrder]) -> OrderedSpace:
    L = chain(A.h + 1, level_names(A.h))
    S = UltrametricSpace(L, tuple(tuple(r) for r in A.D))
    orders = []
    for o, r in zip(lang, A.ranks):
        rel = frozenset((x, y) for x, y in itertools.permutations(range(A.n), 2)
                        if o.bottom < A.D[x][y] <= o.top and r[x] < r[y])
        orders.append(SubquotientOrder(o.bottom, o.top, rel))
    return OrderedSpace(S, tuple(orders))


def level_names(h: int) -> list[str]:
    return ["0"] + [f"E{i}" for i in range(1, h)] + ["1"]


def linear_orders(X: OrderedSpace, pres: Presentation) -> PermStructure:
    """Compose the presentation's linear orders on ``X``."""
    n = X.n
    rows = []
    for path in pres.paths:
        def lt(x: int, y: int, path=path) -> bool:
            t = X.space.d(x, y) - 1
            p = _piece_at(path, t)
            return X.orders[p.order].lt(x, y) != p.reversed

        rel = frozenset((x, y) for x, y in itertools.permutations(range(n), 2) if lt(x, y))
        order = sorted(range(n), key=cmp_to_key(lambda x, y: -1 if (x, y) in rel else 1))
        row = [0] * n
        for r, x in enumerate(order):
            row[x] = r
        # a total relation agreeing with a ranking is that linear order
        if len(rel) * 2 != n * (n - 1) or any(row[x] >= row[y] for x, y in rel):
            raise AssertionError("composed order is not linear")
        rows.append(tuple(row))
    return PermStructure(tuple(rows), n)


def decode(P: PermStructure, pres: Presentation, lang: Sequence[LangOrder]) -> OrderedSpace:
    """Recover levels and subquotient orders from linear orders alone: the
    sign vector of a pair gives its level, and each order is read from the
    first linear order using it at that level."""
    table = pres.level_table()
    n = P.n
    D = [[0] * n for _ in range(n)]
    for x, y in itertools.permutations(range(n), 2):
        s = tuple(row[x] < row[y] for row in P.ranks)
        D[x][y] = table[s] + 1
    L = chain(pres.levels + 1, level_names(pres.levels))
    S = UltrametricSpace(L, tuple(map(tuple, D)))
    orders = []
    for i, o in enumerate(lang):
        rel = set()
        for x, y in itertools.permutations(range(n), 2):
            t = D[x][y] - 1
            if not (o.bottom <= t < o.top):
                continue
            for j, path in enumerate(pres.paths):
                p = _piece_at(path, t)
                if p.order == i:
                    if (P.ranks[j][x] < P.ranks[j][y]) != p.reversed:
                        rel.add((x, y))
                    break
        orders.append(SubquotientOrder(o.bottom, o.top, frozenset(rel)))
    return OrderedSpace(S, tuple(orders))


# ---------------------------------------------------------------- entries

@dataclass(frozen=True)
class CatalogEntry:
    id: str
    group: str
    recipe: tuple[str, ...]

    @property
    def name(self) -> str:
        return recipe_name(self.recipe)

    @property
    def levels(self) -> int:
        return levels_of(self.recipe)

    @property
    def lattice(self) -> Lattice:
        return chain(self.levels + 1, level_names(self.levels))

    @property
    def language(self) -> list[LangOrder]:
        return language_of(self.recipe)

    @property
    def presentation(self) -> Presentation:
        return find_presentation(self.recipe)

    @property
    def two_types(self) -> int:
        return type_count(self.recipe)

    def well_equipped(self) -> bool:
        return is_well_equipped(self.lattice, [(o.bottom, o.top) for o in self.language])

    def to_dict(self) -> dict:
        pres = self.presentation
        return {
            "id": self.id,
            "group": self.group,
            "recipe": self.name,
            "lattice": list(level_names(self.levels)),
            "language": [{"bottom": level_names(self.levels)[o.bottom], "top": level_names(self.levels)[o.top],
                          "order": o.name, "generic": True} for o in self.language],
            "two_types": self.two_types,
            "orders": pres.k,
            "presentation": pres.describe(self.language),
        }


def pure_compositions() -> list[tuple[int, ...]]:
    """Arrangements of multisets from ``{1, 2}`` with at least two members
    and ``sum 2**i <= 8``; multisets by size then content, arrangements
    outermost first in lexicographic order."""
    out = []
    for size in range(2, 5):
        for ms in itertools.combinations_with_replacement((1, 2), size):
            if sum(2 ** i for i in ms) <= TYPE_BUDGET:
                out += sorted(set(itertools.permutations(ms)))
    return out


@lru_cache(maxsize=None)
def _catalog() -> tuple[CatalogEntry, ...]:
    entries = [CatalogEntry(f"1a-{i}", "1a", (f"G{i}",)) for i in (1, 2, 3)]
    entries += [CatalogEntry("1b-0", "1b", ("star",)), CatalogEntry("1b-1", "1b", ("lexgen",))]
    for i, arr in enumerate(pure_compositions(), 1):
        entries.append(CatalogEntry(f"2a-{i}", "2a", tuple(f"G{d}" for d in arr)))
    entries += [CatalogEntry("2b-1", "2b", ("star", "G1")), CatalogEntry("2b-2", "2b", ("G1", "star"))]
    return tuple(entries)


def list_catalog() -> list[CatalogEntry]:
    return list(_catalog())


def get_entry(entry_id: str) -> CatalogEntry:
    for e in _catalog():
        if e.id == entry_id:
            return e
    raise UnknownEntry(f"unknown catalog entry {entry_id!r}")


def build_entry(entry_id: str, size: int = 50, seed: int = 0) -> OrderedSpace:
    e = get_entry(entry_id)
    return approx_to_space(build_approx(e.recipe, size, seed), e.language)


def entry_as_linear_orders(entry_id: str, size: int = 50, seed: int = 0) -> PermStructure:
    e = get_entry(entry_id)
    return linear_orders(build_entry(entry_id, size, seed), e.presentation)


def composed_entry(outer_id: str, inner_id: str) -> CatalogEntry | None:
    """The catalog entry equal to ``outer[inner]``, if any."""
    recipe = get_entry(outer_id).recipe + get_entry(inner_id).recipe
    return next((e for e in _catalog() if e.recipe == recipe), None)


def compose_entries(outer_id: str, inner_id: str, size: int = 50, seed: int = 0) -> OrderedSpace:
    outer, inner = get_entry(outer_id), get_entry(inner_id)
    recipe = outer.recipe + inner.recipe
    if type_count(recipe) > TYPE_BUDGET:
        raise TypeBudgetExceeded(
            f"{outer.name} uses {outer.two_types} 2-types and {inner.name} uses {inner.two_types}; "
            f"only {TYPE_BUDGET} exist with three orders")
    find_presentation(recipe)
    rng = random.Random(seed)
    # split the size budget between the two sides
    a = max(2, math.ceil(math.sqrt(size)))
    b = max(2, math.ceil(size / a))
    A = build_approx(outer.recipe, a, rng.randrange(1 << 30))
    B = build_approx(inner.recipe, b, rng.randrange(1 << 30))
    return approx_to_space(compose_approx(A, B), language_of(recipe))


# ---------------------------------------------------------------- checks

@dataclass
class EntryCheck:
    id: str
    size: int
    valid: bool
    orders: int
    two_types: int
    round_trip: bool
    convex: bool
    well_equipped: bool

    @property
    def passed(self) -> bool:
        return (self.valid and self.orders <= 3 and self.round_trip and self.convex and self.well_equipped
                and self.size >= 50)

    def to_dict(self) -> dict:
        return dict(self.__dict__, passed=self.passed)


def check_entry(entry_id: str, size: int = 50, seed: int = 0) -> EntryCheck:
    e = get_entry(entry_id)
    X = build_entry(entry_id, size, seed)
    P = linear_orders(X, e.presentation)
    back = decode(P, e.presentation, e.language)
    round_trip = back.space.dist == X.space.dist and all(
        a.rel == b.rel for a, b in zip(back.orders, X.orders))
    realized = {sum(1 << i for i, row in enumerate(P.ranks) if row[x] < row[y])
                for x, y in itertools.permutations(range(P.n), 2)}
    convex = True
    if e.group in ("2a", "2b"):
        # every composition congruence is convex in every linear order
        for level in _composition_levels(e.recipe):
            for row in P.ranks:
                rel = frozenset((x, y) for x, y in itertools.permutations(range(P.n), 2) if row[x] < row[y])
                convex &= is_convex_for(X, rel, level)
    return EntryCheck(entry_id, X.n, X.is_valid(), P.k, len(realized), round_trip, convex, e.well_equipped())


def _composition_levels(recipe: Sequence[str]) -> list[int]:
    out, base = [], 0
    for kind in reversed(recipe[1:]):
        base += FACTOR_SPAN[kind]
        out.append(base)
    return out


# ---------------------------------------------------------------- profiles

def _class_members(recipe: tuple[str, ...], n: int) -> Iterable[OrderedSpace]:
    """Every labeled member of the entry's class on ``n`` points."""
    lang = language_of(recipe)
    h = levels_of(recipe)
    L = chain(h + 1, level_names(h))
    for S in enumerate_spaces(L, n):
        choices = [_all_rank_vectors(S, o) for o in lang]
        for combo in itertools.product(*choices):
            orders = []
            for o, rel in zip(lang, combo):
                orders.append(SubquotientOrder(o.bottom, o.top, rel))
            yield OrderedSpace(S, tuple(orders))


def _all_rank_vectors(S: UltrametricSpace, o: LangOrder) -> list[frozenset]:
    return [q.rel for q in enumerate_sqos(S, o.bottom, o.top)]


@lru_cache(maxsize=None)
def class_profile(recipe: tuple[str, ...], max_size: int = 4) -> dict[int, frozenset]:
    """Isomorphism classes, in the linear presentation, of all members of
    the class with at most ``max_size`` points."""
    pres = find_presentation(recipe)
    out = {}
    for n in range(1, max_size + 1):
        out[n] = frozenset(linear_orders(X, pres).canonical() for X in _class_members(recipe, n))
    return out


def approx_profile(P: PermStructure, max_size: int = 4, limit: int | None = None) -> dict[int, frozenset]:
    out = {}
    for n in range(1, max_size + 1):
        combos = itertools.combinations(range(P.n), n)
        if limit is not None:
            combos = itertools.islice(combos, limit)
        out[n] = frozenset(P.restrict(list(c)).canonical() for c in combos)
    return out


@dataclass
class ProfileReport:
    ids: list[str]
    counts: dict[str, list[int]]
    equal_pairs: list[tuple[str, str]]
    approx_within_class: dict[str, bool] = field(default_factory=dict)

    @property
    def distinct(self) -> bool:
        return not self.equal_pairs

    def to_dict(self) -> dict:
        return {"distinct": self.distinct, "counts_by_size": self.counts,
                "equal_pairs": [list(p) for p in self.equal_pairs],
                "approximation_within_class": self.approx_within_class}


def profiles_distinct(size: int = 4, approx_check: bool = False, seed: int = 0) -> ProfileReport:
    """Profiles of all entries and the pairs that coincide.  With
    ``approx_check``, the 3-point substructures of a 50-point approximation
    are also confirmed to lie in the class profile."""
    entries = list_catalog()
    prof = {e.id: (e.presentation.k, class_profile(e.recipe, size)) for e in entries}
    equal = [(a.id, b.id) for a, b in itertools.combinations(entries, 2) if prof[a.id] == prof[b.id]]
    rep = ProfileReport([e.id for e in entries], {i: [len(p[1][n]) for n in sorted(p[1])] for i, p in prof.items()},
                        equal)
    if approx_check:
        for e in entries:
            P = entry_as_linear_orders(e.id, 50, seed)
            got = approx_profile(P, 3)
            rep.approx_within_class[e.id] = all(got[n] <= prof[e.id][1][n] for n in got)
    return rep
