import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permhom.lattice import boolean_square, chain, diamond, enumerate_lattices, is_distributive
from permhom.umetric import (
    AmalgamProblem,
    EquivalenceSystem,
    InvalidSpace,
    TriangleViolation,
    canonical_amalgam,
    embeds,
    enumerate_spaces,
    extension_rows,
    make_space,
    precanonical_distance,
    random_space,
    space_to_system,
    system_to_space,
    verify_closure,
)

from oracles import direct_distance, triangle_ok

C3 = chain(3, ["0", "E", "1"])
B2 = boolean_square()
LATTICES5 = list(enumerate_lattices(5))


def test_single_point_system_is_trivial():
    for L in (C3, B2):
        Y = space_to_system(make_space(L, [[0]]))
        assert all(p == (0,) for p in Y.partitions)


def test_two_points_at_top():
    L = chain(2)
    Y = space_to_system(make_space(L, [[0, 1], [1, 0]]))
    assert Y.partitions[0] == (0, 1)
    assert Y.partitions[1] == (0, 0)
    assert system_to_space(Y).dist == ((0, 1), (1, 0))


def test_grid_system_gives_row_and_column_distances():
    a, b, top = 1, 2, 3
    # points (i, j) -> 2i + j; a relates equal rows, b equal columns
    parts = [(0, 1, 2, 3), (0, 0, 2, 2), (0, 1, 0, 1), (0, 0, 0, 0)]
    Y = EquivalenceSystem(B2, 4, tuple(parts))
    assert not Y.violations()
    S = system_to_space(Y)
    assert S.d(0, 1) == a and S.d(2, 3) == a
    assert S.d(0, 2) == b and S.d(1, 3) == b
    assert S.d(0, 3) == top and S.d(1, 2) == top
    for x in range(4):
        for y in range(4):
            assert S.d(x, y) == direct_distance(B2, parts, x, y)


@pytest.mark.parametrize("L", LATTICES5, ids=lambda L: str(L.covers()))
def test_round_trips_on_random_spaces(L):
    rng = random.Random(7)
    for _ in range(40):
        S = random_space(L, rng.randrange(1, 7) if L.size > 1 else 1, rng)
        assert S.is_valid() and triangle_ok(L, S.dist)
        Y = space_to_system(S)
        assert not Y.violations()
        assert system_to_space(Y) == S
        assert space_to_system(system_to_space(Y)) == Y
        for x in range(S.n):
            for y in range(S.n):
                assert S.d(x, y) == direct_distance(L, Y.partitions, x, y)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, len(LATTICES5) - 1), st.integers(1, 6), st.integers(0, 10**6))
def test_round_trip_property(i, n, seed):
    L = LATTICES5[i]
    S = random_space(L, n if L.size > 1 else 1, random.Random(seed))
    assert system_to_space(space_to_system(S)) == S


def test_trivial_lattice_holds_one_point():
    L = LATTICES5[0]
    assert random_space(L, 1, random.Random(0)).n == 1
    with pytest.raises(InvalidSpace):
        random_space(L, 2, random.Random(0))


def test_make_space_rejects_invalid():
    with pytest.raises(InvalidSpace):
        make_space(C3, [[0, 0], [0, 0]])
    with pytest.raises(InvalidSpace):
        make_space(C3, [[0, 1, 1], [1, 0, 2], [1, 2, 0]])


def test_enumerate_spaces_all_valid_and_complete():
    spaces = list(enumerate_spaces(C3, 3))
    assert all(triangle_ok(C3, S.dist) for S in spaces)
    # brute force over all symmetric matrices with nonzero off-diagonal entries
    count = 0
    for d01 in (1, 2):
        for d02 in (1, 2):
            for d12 in (1, 2):
                D = [[0, d01, d02], [d01, 0, d12], [d02, d12, 0]]
                count += triangle_ok(C3, D)
    assert len(spaces) == count


def test_precanonical_examples():
    base = make_space(C3, [[0]])
    assert precanonical_distance(AmalgamProblem(base, (1,), (1,))) == 1
    assert precanonical_distance(AmalgamProblem(base, (1,), (2,))) == 2
    a, b = B2.index("a"), B2.index("b")
    base2 = make_space(B2, [[0, 3], [3, 0]])
    P = AmalgamProblem(base2, (a, b), (a, b))
    assert precanonical_distance(P) == B2.bottom


def test_identification_in_boolean_square():
    a, b = B2.index("a"), B2.index("b")
    base2 = make_space(B2, [[0, 3], [3, 0]])
    res = canonical_amalgam(AmalgamProblem(base2, (a, b), (a, b)))
    assert res.identified and res.space.n == 3
    assert res.mapping == (0, 1, 2, 2)


def test_chain_amalgam_at_top():
    base = make_space(C3, [[0]])
    P = AmalgamProblem(base, (2,), (2,))
    res = canonical_amalgam(P)
    assert res.space.n == 3 and res.space.d(1, 2) == 2 and res.space.is_valid()
    assert embeds(P, res)


def test_precanonical_is_monotone():
    rng = random.Random(3)
    for L in LATTICES5[1:]:
        for _ in range(20):
            S = random_space(L, 2, rng)
            rows = list(extension_rows(S))
            r1, r2 = rng.choice(rows), rng.choice(rows)
            bigger = tuple(L.join[e][rng.choice(list(L.elements()))] for e in r1)
            v = precanonical_distance(AmalgamProblem(S, r1, r2))
            w = precanonical_distance(AmalgamProblem(S, bigger, r2))
            assert L.le(v, w)


@pytest.mark.parametrize("L", [L for L in LATTICES5 if L.size >= 3], ids=lambda L: str(L.covers()))
def test_closure_small_lattices(L):
    rep = verify_closure(L, 2)
    if is_distributive(L):
        assert rep.passed, rep.summary()
    assert rep.problems > 0


def test_diamond_reports_violation_as_value():
    rep = verify_closure(diamond(), 2)
    assert "violation" in rep.summary()
    if rep.violation is not None:
        P, triple = rep.violation
        with pytest.raises(TriangleViolation):
            canonical_amalgam(P)
        assert len(triple) == 3


def test_closure_budget():
    with pytest.raises(ValueError):
        verify_closure(C3, 4)
