import itertools
import math
import random

import pytest

from permhom.lattice import boolean_square, chain
from permhom.sqorder import (
    ElementOutOfInterval,
    InvalidOrder,
    MismatchedRelations,
    OrderedAmalgamProblem,
    OrderedSpace,
    SubquotientOrder,
    amalgamate_ordered,
    arrow,
    build_agreement_example,
    build_fullproduct,
    check_fullproduct,
    classes,
    compose_sqo,
    enumerate_sqos,
    forbidden_configurations,
    is_convex_for,
    is_linear,
    is_well_equipped,
    lex_order,
    load_ordered_space,
    preceq_violations,
    random_sqo,
    restrict_sqo,
    sqo_from_class_order,
    sqo_violations,
    validate_sqo,
    verify_ordered_amalgamation,
)
from permhom.umetric import enumerate_spaces, make_space, random_space

C3 = chain(3, ["0", "E", "1"])
B2 = boolean_square()
# two E-classes {0,1} and {2,3}
TWO_CLASSES = make_space(C3, [[0, 1, 2, 2], [1, 0, 2, 2], [2, 2, 0, 1], [2, 2, 1, 0]])


def oracle_valid(S, E, F, rel) -> bool:
    """Some ranking of the E-classes induces ``rel`` on same-F pairs."""
    L = S.lattice
    ecl = classes(S, E)
    for perm in itertools.permutations(range(len(ecl))):
        rank = {x: perm[i] for i, c in enumerate(ecl) for x in c}
        want = {(x, y) for x, y in itertools.permutations(range(S.n), 2)
                if L.le(S.d(x, y), F) and not L.le(S.d(x, y), E) and rank[x] < rank[y]}
        if want == set(rel):
            return True
    return False


def test_validator_matches_oracle_on_all_small_relations():
    S = TWO_CLASSES
    pairs = list(itertools.permutations(range(4), 2))
    for E, F in ((0, 1), (1, 2), (0, 2)):
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            rel = frozenset(p for p, b in zip(pairs, bits) if b)
            got = not sqo_violations(S, SubquotientOrder(E, F, rel))
            assert got == oracle_valid(S, E, F, rel)


def test_enumeration_count_is_product_of_factorials():
    rng = random.Random(1)
    for _ in range(20):
        S = random_space(C3, rng.randrange(1, 6), rng)
        for E, F in ((0, 1), (0, 2), (1, 2)):
            want = 1
            for f in classes(S, F):
                want *= math.factorial(len([c for c in classes(S, E) if c[0] in f]))
            got = list(enumerate_sqos(S, E, F))
            assert len(got) == want
            assert all(not sqo_violations(S, o) for o in got)


def test_compose_with_trivial_width_is_identity():
    rng = random.Random(2)
    S = random_space(C3, 5, rng)
    lo = random_sqo(S, 0, 2, rng)
    hi = SubquotientOrder(2, 2, frozenset())
    assert compose_sqo(S, hi, lo) == lo


def test_compose_gives_lexicographic_order():
    S = TWO_CLASSES
    hi = sqo_from_class_order(S, 1, 2, [[2, 3], [0, 1]])
    lo = sqo_from_class_order(S, 0, 1, [[1], [0], [3], [2]])
    c = compose_sqo(S, hi, lo)
    assert (c.bottom, c.top) == (0, 2)
    # class {2,3} first with 3 < 2, then {0,1} with 1 < 0
    order = sorted(range(4), key=lambda x: sum(c.lt(y, x) for y in range(4)))
    assert order == [3, 2, 1, 0]
    validate_sqo(S, c)


def test_compose_requires_matching_levels():
    S = TWO_CLASSES
    with pytest.raises(MismatchedRelations):
        compose_sqo(S, SubquotientOrder(0, 2), SubquotientOrder(0, 2))


def test_restrict_examples():
    rng = random.Random(4)
    S = random_space(C3, 6, rng)
    o = random_sqo(S, 0, 2, rng)
    assert restrict_sqo(S, o, 2) == o
    assert restrict_sqo(S, o, 0).rel == frozenset()
    with pytest.raises(ElementOutOfInterval):
        restrict_sqo(S, random_sqo(S, 1, 2, rng), 0)


def test_compose_restrict_coherence_exhaustive():
    for n in range(1, 5):
        for S in enumerate_spaces(C3, n):
            for lo in enumerate_sqos(S, 0, 1):
                for hi in enumerate_sqos(S, 1, 2):
                    c = compose_sqo(S, hi, lo)
                    assert not sqo_violations(S, c)
                    assert restrict_sqo(S, c, 1) == lo


def test_agreement_restriction_keeps_within_class_pairs():
    ex = build_agreement_example(4, seed=5)
    X = ex.ordered
    o1 = X.orders[0]
    r = restrict_sqo(X.space, o1, 1)
    assert r.rel == {(x, y) for x, y in o1.rel if ex.E(x, y)}


def test_well_equipped_examples():
    assert is_well_equipped(C3, [(0, 1), (1, 2)])
    assert not is_well_equipped(C3, [(0, 2)])
    a, b, top = 1, 2, 3
    assert is_well_equipped(B2, [(a, top), (b, top)])
    with pytest.raises(ElementOutOfInterval):
        is_well_equipped(C3, [(2, 0)])


def _ordered_ext(base_dist, new_row, orders):
    D = [list(r) + [new_row[i]] for i, r in enumerate(base_dist)] + [list(new_row) + [0]]
    S = make_space(C3, D)
    return OrderedSpace(S, tuple(SubquotientOrder(b, t, frozenset(rel)) for b, t, rel in orders))


def test_forced_direction_through_base_point():
    base = OrderedSpace(make_space(C3, [[0]]), (SubquotientOrder(1, 2),))
    f1 = _ordered_ext([[0]], [2], [(1, 2, {(1, 0)})])
    f2 = _ordered_ext([[0]], [2], [(1, 2, {(0, 1)})])
    res = amalgamate_ordered(OrderedAmalgamProblem(base, f1, f2))
    X = res.result
    assert X.space.d(1, 2) == 2
    assert X.orders[0].lt(1, 2)
    assert arrow(X, X.orders[0], 1, 2, [0])


def test_congruent_points_compare_alike():
    # both new points E-related to the base point
    base = OrderedSpace(make_space(C3, [[0]]), (SubquotientOrder(1, 2),))
    f = _ordered_ext([[0]], [1], [(1, 2, set())])
    res = amalgamate_ordered(OrderedAmalgamProblem(base, f, f))
    X = res.result
    assert X.space.d(1, 2) == 1
    assert not X.orders[0].rel


def test_tie_break_puts_first_factor_first():
    base = OrderedSpace(make_space(C3, [[0]]), (SubquotientOrder(0, 2),))
    f = _ordered_ext([[0]], [1], [(0, 2, {(1, 0)})])
    res = amalgamate_ordered(OrderedAmalgamProblem(base, f, f))
    assert res.result.orders[0].lt(1, 2)


@pytest.mark.parametrize("L", [C3, B2], ids=["chain3", "boolean"])
def test_ordered_amalgamation_exhaustive(L):
    rep = verify_ordered_amalgamation(L, 2)
    assert rep.passed, rep.failures[:3]
    assert rep.problems > 0


def test_preceq_properties_on_random_spaces():
    rng = random.Random(9)
    for _ in range(10):
        S = random_space(C3, 6, rng)
        X = OrderedSpace(S, (random_sqo(S, 0, 2, rng), random_sqo(S, 1, 2, rng)))
        assert not preceq_violations(X)


def test_agreement_examples():
    ex = build_agreement_example(2, seed=0)
    assert ex.round_trip_ok()
    for seed in range(20):
        ex = build_agreement_example(4, seed)
        assert ex.round_trip_ok()
        X = ex.ordered
        assert X.is_valid()
        rel = {(x, y) for x, y in itertools.permutations(range(4), 2) if ex.linear.ranks[1][x] < ex.linear.ranks[1][y]}
        assert is_convex_for(X, frozenset(rel), 1)
        # inside a class the second linear order agrees with the first
        for x, y in rel:
            if ex.E(x, y):
                assert ex.linear.ranks[0][x] < ex.linear.ranks[0][y]


def test_agreement_rebuild_matches_composition():
    ex = build_agreement_example(4, seed=3)
    X = ex.ordered
    o1, o2 = X.orders
    lin2 = compose_sqo(X.space, o2, restrict_sqo(X.space, o1, 1))
    rel = {(x, y) for x, y in itertools.permutations(range(4), 2) if ex.linear.ranks[1][x] < ex.linear.ranks[1][y]}
    assert lin2.rel == rel


@pytest.mark.parametrize("n", [2, 3])
def test_full_product(n):
    X = build_fullproduct(n)
    assert X.n == n * n and X.is_valid()
    nontrivial = {t for t in X.two_types() if t[0] != 0}
    assert len(nontrivial) == 8
    assert forbidden_configurations(X) == []
    o1, o2 = X.orders
    for outer, inner in ((o1, o2), (o2, o1)):
        rel = lex_order(X, outer, inner)
        assert is_linear(X.n, rel)
        assert is_convex_for(X, rel, outer.bottom)
    assert check_fullproduct(n).passed


def test_forbidden_configuration_detected():
    X = build_fullproduct(2)
    o1, o2 = X.orders
    # reverse the second order inside one first-coordinate class only (points 2, 3)
    flipped = {(y, x) if {x, y} == {2, 3} else (x, y) for x, y in o2.rel}
    Y = OrderedSpace(X.space, (o1, SubquotientOrder(o2.bottom, o2.top, frozenset(flipped))))
    assert forbidden_configurations(Y)


def test_load_ordered_space_round_trip():
    ex = build_agreement_example(5, seed=1)
    X = ex.ordered
    assert load_ordered_space(X.to_dict(), C3) == X
    bad = X.to_dict()
    bad["orders"][0]["rel"] = [[0, 1], [1, 0]]
    with pytest.raises(InvalidOrder):
        load_ordered_space(bad, C3)
