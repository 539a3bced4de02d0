"""Finite lattices given by cover relations.

Elements are the integers ``0..m-1``.  A :class:`Lattice` stores the full
order relation and the meet/join tables, so every operation on elements is a
table lookup.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class NotALattice(ValueError):
    """Some pair of elements has no meet or no join."""


class CyclicCovers(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lattice:
    size: int
    leq: tuple[tuple[bool, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    bottom: int
    top: int
    names: tuple[str, ...] | None = None
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_key", (self.size, self.leq))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Lattice) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Lattice(size={self.size}, covers={self.covers()})"

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq[x][y]

    def name(self, x: int) -> str:
        return self.names[x] if self.names else str(x)

    def index(self, name: str | int) -> int:
        """Resolve an element given by name or index."""
        if isinstance(name, int):
            return name
        if self.names and name in self.names:
            return self.names.index(name)
        return int(name)

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.top
        for x in xs:
            out = self.meet[out][x]
        return out

    def join_all(self, xs: Iterable[int]) -> int:
        out = self.bottom
        for x in xs:
            out = self.join[out][x]
        return out

    def upper_covers(self, x: int) -> list[int]:
        above = [y for y in range(self.size) if self.lt(x, y)]
        return [y for y in above if not any(self.lt(x, z) and self.lt(z, y) for z in above)]

    def covers(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.size) for y in self.upper_covers(x)]

    def elements(self) -> range:
        return range(self.size)

    def to_dict(self) -> dict:
        out: dict = {"size": self.size, "covers": [list(c) for c in self.covers()]}
        if self.names:
            out["names"] = list(self.names)
        return out


def build_lattice(m: int, cover_pairs: Iterable[Sequence[int]],
                  names: Sequence[str] | None = None) -> Lattice:
    """Close ``cover_pairs`` reflexively and transitively and tabulate meet/join.

    Raises :class:`CyclicCovers` if the covers contain a cycle and
    :class:`NotALattice` if some pair lacks a greatest lower or least upper
    bound.
    """
    if m < 1:
        raise NotALattice("a lattice needs at least one element")
    leq = [[i == j for j in range(m)] for i in range(m)]
    for a, b in cover_pairs:
        if not (0 <= a < m and 0 <= b < m):
            raise ValueError(f"cover ({a}, {b}) out of range for size {m}")
        if a == b:
            raise CyclicCovers(f"self-loop at {a}")
        leq[a][b] = True
    for k in range(m):
        for i in range(m):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(m):
                    if row_k[j]:
                        row_i[j] = True
    for i in range(m):
        for j in range(i + 1, m):
            if leq[i][j] and leq[j][i]:
                raise CyclicCovers(f"elements {i} and {j} lie on a cycle")
    return _from_leq(m, leq, names)


def _from_leq(m: int, leq: list[list[bool]], names: Sequence[str] | None = None) -> Lattice:
    meet = [[0] * m for _ in range(m)]
    join = [[0] * m for _ in range(m)]
    for x in range(m):
        for y in range(x, m):
            lower = [z for z in range(m) if leq[z][x] and leq[z][y]]
            glb = [z for z in lower if all(leq[w][z] for w in lower)]
            upper = [z for z in range(m) if leq[x][z] and leq[y][z]]
            lub = [z for z in upper if all(leq[z][w] for w in upper)]
            if not glb:
                raise NotALattice(f"{x} and {y} have no meet")
            if not lub:
                raise NotALattice(f"{x} and {y} have no join")
            meet[x][y] = meet[y][x] = glb[0]
            join[x][y] = join[y][x] = lub[0]
    bottom = next(x for x in range(m) if all(leq[x]))
    top = next(x for x in range(m) if all(leq[y][x] for y in range(m)))
    return Lattice(
        size=m,
        leq=tuple(tuple(r) for r in leq),
        meet=tuple(tuple(r) for r in meet),
        join=tuple(tuple(r) for r in join),
        bottom=bottom,
        top=top,
        names=tuple(names) if names else None,
    )


def chain(m: int, names: Sequence[str] | None = None) -> Lattice:
    return build_lattice(m, [(i, i + 1) for i in range(m - 1)], names)


def boolean_square() -> Lattice:
    """The four-element Boolean lattice ``0 < a, b < 1``."""
    return build_lattice(4, [(0, 1), (0, 2), (1, 3), (2, 3)], ["0", "a", "b", "1"])


def diamond() -> Lattice:
    """M3: three pairwise incomparable atoms."""
    return build_lattice(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])


def pentagon() -> Lattice:
    """N5: ``0 < a < b < 1`` and ``0 < c < 1``."""
    return build_lattice(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])


def is_distributive(L: Lattice) -> bool:
    m, j = L.meet, L.join
    r = range(L.size)
    return all(m[x][j[y][z]] == j[m[x][y]][m[x][z]] for x in r for y in r for z in r)


def meet_irreducibles(L: Lattice) -> frozenset[int]:
    """Elements other than top with a unique upper cover."""
    return frozenset(x for x in L.elements() if x != L.top and len(L.upper_covers(x)) == 1)


def canonical_key(L: Lattice) -> tuple:
    """Lexicographically least order matrix over all relabelings."""
    m = L.size
    best = None
    for perm in itertools.permutations(range(m)):
        key = tuple(L.leq[perm[i]][perm[j]] for i in range(m) for j in range(m))
        if best is None or key < best:
            best = key
    return (m, best)


def _natural_posets(inner: int) -> Iterator[list[list[bool]]]:
    # strict orders on 0..inner-1 where i < j as integers whenever i < j in the order
    pairs = [(i, j) for i in range(inner) for j in range(i + 1, inner)]
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = [[False] * inner for _ in range(inner)]
        for (i, j), b in zip(pairs, bits):
            rel[i][j] = b
        ok = all(
            not (rel[i][j] and rel[j][k]) or rel[i][k]
            for i in range(inner) for j in range(i + 1, inner) for k in range(j + 1, inner)
        )
        if ok:
            yield rel


def enumerate_lattices(max_size: int, distributive_only: bool = False) -> Iterator[Lattice]:
    """One lattice per isomorphism class, by size and then canonical key.

    Every finite lattice is a bounded poset, and every finite poset has a
    linear extension, so it suffices to adjoin a bottom and a top to the
    naturally labeled posets on the remaining elements.
    """
    if max_size > 6:
        raise ValueError("lattice enumeration is budgeted for sizes up to 6")
    for m in range(1, max_size + 1):
        found: dict[tuple, Lattice] = {}
        if m <= 2:
            candidates = [chain(m)]
        else:
            candidates = []
            inner = m - 2
            for rel in _natural_posets(inner):
                leq = [[False] * m for _ in range(m)]
                for i in range(m):
                    leq[0][i] = True
                    leq[i][m - 1] = True
                    leq[i][i] = True
                for i in range(inner):
                    for j in range(inner):
                        if rel[i][j]:
                            leq[i + 1][j + 1] = True
                try:
                    candidates.append(_from_leq(m, leq))
                except NotALattice:
                    continue
        for L in candidates:
            if distributive_only and not is_distributive(L):
                continue
            key = canonical_key(L)
            if key not in found:
                found[key] = L
        for key in sorted(found):
            yield _relabel_canonical(found[key])


def _relabel_canonical(L: Lattice) -> Lattice:
    # relabel along a linear extension that sorts by height, so bottom=0 and top=m-1
    height = {}
    for x in sorted(L.elements(), key=lambda e: sum(L.leq[y][e] for y in L.elements())):
        height[x] = 1 + max((height[y] for y in height if L.lt(y, x)), default=-1)
    order = sorted(L.elements(), key=lambda e: (height[e], e))
    pos = {x: i for i, x in enumerate(order)}
    covers = [(pos[a], pos[b]) for a, b in L.covers()]
    return build_lattice(L.size, covers)


def load_lattice(obj: dict) -> Lattice:
    names = obj.get("names")
    return build_lattice(int(obj["size"]), [tuple(c) for c in obj.get("covers", [])], names)
