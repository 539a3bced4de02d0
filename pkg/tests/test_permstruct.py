import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permhom.permstruct import (
    BASE_TYPES,
    ArityMismatch,
    InconsistentDiagram,
    PartialDiagram,
    PermStructure,
    all_triangles,
    canonical_triangle,
    check_definable_orders,
    complete_diagram,
    compose_structures,
    count_classes,
    cyc,
    enumerate_structures,
    enumerate_triangle_types,
    enumerate_two_types,
    from_orders,
    hamming,
    imp,
    is_convex,
    isomorphic_bruteforce,
    majority_completions,
    majority_diagram,
    majority_solve,
    opposite,
    parse_triangle,
    parse_type,
    rimp,
    triangle_name,
    type_name,
)

from oracles import brute_class_count, brute_completions, brute_two_types


def random_structure(n, k, rng):
    orders = []
    for _ in range(k):
        p = list(range(n))
        rng.shuffle(p)
        orders.append(p)
    return from_orders(orders)


def test_two_type_counts_and_base_labels():
    assert len(enumerate_two_types(1)) == 2
    assert len(enumerate_two_types(3)) == 8
    for k in (1, 2, 3):
        assert {tuple(bool(t >> i & 1) for i in range(k)) for t in enumerate_two_types(k)} == brute_two_types(k)
    for a, b in itertools.combinations(BASE_TYPES, 2):
        assert hamming(a, b) == 2
    assert set(BASE_TYPES) | {opposite(t) for t in BASE_TYPES} == set(range(8))


def test_opposite_is_fixed_point_free_involution():
    for k in (1, 2, 3, 4):
        for t in enumerate_two_types(k):
            assert opposite(opposite(t, k), k) == t and opposite(t, k) != t


def test_type_names_round_trip():
    for t in range(8):
        assert parse_type(type_name(t)) == t
    assert parse_type("(+,+,+)") == 7
    assert parse_type("2^opp") == opposite(BASE_TYPES[2])
    with pytest.raises(ValueError):
        parse_type("5")


@pytest.mark.parametrize("k, count", [(1, 1), (2, 6), (3, 36)])
def test_triangle_counts(k, count):
    tris = enumerate_triangle_types(k)
    assert len(tris) == count == brute_class_count(3, k)
    assert tris == sorted(set(tris))


def test_four_point_classes():
    assert count_classes(4, 3) == 576 == len({S.canonical() for S in enumerate_structures(4, 3)})


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 5) for k in range(1, 4) if (n, k) != (4, 3)])
def test_class_counts_match_oracle(n, k):
    assert len({S.canonical() for S in enumerate_structures(n, k)}) == brute_class_count(n, k)


def test_canonical_form_is_complete_invariant():
    rng = random.Random(0)
    structs = [random_structure(rng.randrange(1, 5), rng.randrange(1, 4), rng) for _ in range(120)]
    for A, B in itertools.combinations(structs, 2):
        if (A.n, A.k) == (B.n, B.k):
            assert (A.canonical() == B.canonical()) == isomorphic_bruteforce(A, B)


def test_triangle_families_are_consistent_and_named():
    p, q, r = BASE_TYPES[:3]
    tris = all_triangles()
    for t in (imp(p, q), rimp(p, q), cyc(p, q, r)):
        assert t in tris
        assert parse_triangle(triangle_name(t)) == t
    assert parse_triangle("0=>1") == imp(BASE_TYPES[0], BASE_TYPES[1])
    assert parse_triangle("C3(0,1,2)") == cyc(*BASE_TYPES[:3])


def test_implication_triangle_edges():
    # p=>q: c ->p a, c ->p b, a ->q b with points a, b, c = 0, 1, 2
    p, q = BASE_TYPES[1], BASE_TYPES[2]
    want = canonical_triangle(q, opposite(p), opposite(p))
    assert imp(p, q) == want


def test_two_point_diagram_has_all_completions():
    for k in (1, 2, 3):
        comps = complete_diagram(PartialDiagram(2, k))
        assert sorted(c[0, 1] for c in comps) == list(range(1 << k))


def test_inconsistent_diagram_rejected():
    D = PartialDiagram(3, 1)
    D.set(0, 1, 1).set(1, 2, 1).set(2, 0, 1)
    with pytest.raises(InconsistentDiagram):
        complete_diagram(D)


def _random_diagram(rng, n, k, density):
    S = random_structure(n, k, rng)
    D = PartialDiagram(n, k)
    for x, y in itertools.combinations(range(n), 2):
        if rng.random() < density:
            D.set(x, y, S.tp(x, y))
    return D


def test_completion_matches_brute_force():
    rng = random.Random(11)
    for _ in range(40):
        n, k = rng.choice([(3, 2), (3, 3), (4, 2), (4, 3)])
        D = _random_diagram(rng, n, k, 0.5)
        got = sorted(tuple(sorted(c.items())) for c in complete_diagram(D))
        want = sorted(tuple(sorted(c.items())) for c in brute_completions(n, k, dict(D.typed)))
        assert got == want


def test_completion_respects_allowed_triangles():
    rng = random.Random(12)
    allowed = set(rng.sample(sorted(all_triangles()), 20))
    for _ in range(20):
        D = _random_diagram(rng, 4, 3, 0.4)
        for c in complete_diagram(D, allowed):
            S = D.completed(c)
            assert S.triangles() <= allowed
        everything = [D.completed(c) for c in complete_diagram(D)]
        assert sum(S.triangles() <= allowed for S in everything) == len(complete_diagram(D, allowed))


def test_fan_out_survivor():
    # x ->p base, y ->q base with p=>q forbidden: the survivor is q'
    p, q = BASE_TYPES[0], BASE_TYPES[1]
    D = PartialDiagram(3, 3)
    D.set(0, 2, p).set(1, 2, q)
    allowed = all_triangles() - {imp(p, q)}
    got = {c[0, 1] for c in complete_diagram(D, allowed)}
    assert opposite(q) in got


@pytest.mark.parametrize("p, q, r", list(itertools.permutations(range(4), 3)))
def test_majority_diagram_unique(p, q, r):
    tp, tq, tr = (BASE_TYPES[i] for i in (p, q, r))
    assert majority_completions(tp, tq, tr) == [majority_solve(tp, tq, tr)]
    # brute force over the one free pair
    D = majority_diagram(tp, tq, tr)
    assert [c[3, 4] for c in brute_completions(5, 3, dict(D.typed))] == [majority_solve(tp, tq, tr)]


def test_majority_examples():
    t = [BASE_TYPES[i] for i in (3, 2, 1)]
    assert majority_solve(*t) == 0b111
    assert majority_solve(BASE_TYPES[1], BASE_TYPES[1], BASE_TYPES[1]) == BASE_TYPES[1]
    assert majority_solve(BASE_TYPES[0], BASE_TYPES[1], BASE_TYPES[0]) == BASE_TYPES[0]


@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
def test_majority_symmetric_and_idempotent(p, q, r):
    m = majority_solve(p, q, r)
    assert all(majority_solve(*perm) == m for perm in itertools.permutations((p, q, r)))
    assert majority_solve(p, p, q) == p


def test_compose_with_single_points():
    rng = random.Random(3)
    B = random_structure(4, 3, rng)
    one = PermStructure(((0,), (0,), (0,)), 1)
    S, blocks = compose_structures(one, B)
    assert S == B and set(blocks) == {0}
    S, blocks = compose_structures(B, one)
    assert S == B and len(set(blocks)) == 4


def test_compose_blocks_are_convex_congruences():
    rng = random.Random(4)
    for _ in range(10):
        A, B = random_structure(3, 3, rng), random_structure(3, 3, rng)
        S, blocks = compose_structures(A, B)
        assert all(is_convex(S, blocks, i) for i in range(3))
        # quotient is A and each block is B
        for x, y in itertools.permutations(range(S.n), 2):
            if blocks[x] != blocks[y]:
                assert S.tp(x, y) == A.tp(blocks[x], blocks[y])
        for b in range(A.n):
            pts = [x for x in range(S.n) if blocks[x] == b]
            assert S.restrict(pts).canonical() == B.canonical()
    with pytest.raises(ArityMismatch):
        compose_structures(random_structure(2, 2, rng), random_structure(2, 3, rng))


def test_definable_orders():
    checks = check_definable_orders(3)
    assert len(checks) == 16
    assert sum(c.trivial for c in checks) == 6
    assert all(c.passed for c in checks)
    for c in checks:
        if not c.trivial:
            assert c.witness.n <= 4 and c.proof_witness.n <= 4


def test_diagram_file_round_trip():
    D = majority_diagram(*BASE_TYPES[:3])
    assert PartialDiagram.from_dict(D.to_dict()).typed == D.typed
