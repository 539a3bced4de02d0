import itertools

import pytest

from permhom.lattice import (
    CyclicCovers,
    NotALattice,
    boolean_square,
    build_lattice,
    canonical_key,
    chain,
    diamond,
    enumerate_lattices,
    is_distributive,
    load_lattice,
    meet_irreducibles,
    pentagon,
)

from oracles import brute_distributive, brute_lattices, brute_meet_irreducible

ALL6 = list(enumerate_lattices(6))


def test_two_chain_is_min_max():
    L = chain(2)
    assert L.meet[0][1] == 0 and L.join[0][1] == 1
    assert L.bottom == 0 and L.top == 1


def test_boolean_square_tables():
    L = boolean_square()
    a, b = L.index("a"), L.index("b")
    assert L.meet[a][b] == L.bottom
    assert L.join[a][b] == L.top


def test_missing_join_is_rejected():
    # two minimal and two maximal elements, each minimal below both maximal
    with pytest.raises(NotALattice):
        build_lattice(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


def test_cyclic_covers_rejected():
    with pytest.raises(CyclicCovers):
        build_lattice(3, [(0, 1), (1, 2), (2, 0)])
    with pytest.raises(CyclicCovers):
        build_lattice(2, [(0, 0)])


def test_distributivity_of_standard_examples():
    assert is_distributive(boolean_square())
    assert not is_distributive(diamond())
    assert not is_distributive(pentagon())


@pytest.mark.parametrize("L, names", [
    (chain(3, ["0", "E", "1"]), {"0", "E"}),
    (boolean_square(), {"a", "b"}),
    (chain(2, ["0", "1"]), {"0"}),
])
def test_meet_irreducibles_examples(L, names):
    assert {L.name(x) for x in meet_irreducibles(L)} == names


def test_small_enumeration_counts():
    sizes = [L.size for L in enumerate_lattices(2)]
    assert sizes == [1, 2]
    dist4 = [L for L in enumerate_lattices(4, distributive_only=True)]
    assert [L.size for L in dist4] == [1, 2, 3, 4, 4]
    keys4 = {canonical_key(L) for L in dist4 if L.size == 4}
    assert keys4 == {canonical_key(chain(4)), canonical_key(boolean_square())}


@pytest.mark.parametrize("m", range(1, 7))
def test_enumeration_matches_brute_force(m):
    got = sorted(canonical_key(L)[1] for L in ALL6 if L.size == m)
    assert got == brute_lattices(m)


def test_enumeration_is_deterministic():
    assert [canonical_key(L) for L in enumerate_lattices(5)] == [canonical_key(L) for L in enumerate_lattices(5)]


@pytest.mark.parametrize("L", ALL6, ids=lambda L: f"{L.size}:{L.covers()}")
def test_lattice_axioms(L):
    r = L.elements()
    m, j = L.meet, L.join
    for x, y in itertools.product(r, repeat=2):
        assert m[x][y] == m[y][x] and j[x][y] == j[y][x]
        assert m[x][j[x][y]] == x and j[x][m[x][y]] == x
        assert L.le(L.bottom, x) and L.le(x, L.top)
    for x, y, z in itertools.product(r, repeat=3):
        assert m[x][m[y][z]] == m[m[x][y]][z]
        assert j[x][j[y][z]] == j[j[x][y]][z]


@pytest.mark.parametrize("L", ALL6, ids=lambda L: f"{L.size}:{L.covers()}")
def test_meet_irreducibles_match_both_definitions(L):
    mi = meet_irreducibles(L)
    for x in L.elements():
        unique_cover = x != L.top and len(L.upper_covers(x)) == 1
        assert (x in mi) == unique_cover == brute_meet_irreducible(L.leq, L.size, x)


@pytest.mark.parametrize("L", ALL6, ids=lambda L: f"{L.size}:{L.covers()}")
def test_distributive_iff_no_m3_or_n5(L):
    assert is_distributive(L) == brute_distributive(L.leq, L.size)


def test_load_round_trip():
    L = boolean_square()
    assert load_lattice(L.to_dict()) == L
    assert load_lattice({"size": 3, "covers": [[0, 1], [1, 2]]}) == chain(3)


def test_enumeration_budget():
    with pytest.raises(ValueError):
        next(enumerate_lattices(7))
