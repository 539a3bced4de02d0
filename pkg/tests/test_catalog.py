import pytest

from permhom.catalog import (
    TypeBudgetExceeded,
    UnknownEntry,
    build_entry,
    check_entry,
    class_profile,
    compose_entries,
    composed_entry,
    decode,
    entry_as_linear_orders,
    get_entry,
    list_catalog,
    profiles_distinct,
    pure_compositions,
    type_count,
)
from permhom.permstruct import count_classes

from oracles import brute_class_count

# class members on 1..4 points, up to isomorphism, in the linear presentation
PROFILE_COUNTS = {
    "1a-1": [1, 1, 1, 1], "1a-2": [1, 2, 6, 24], "1a-3": [1, 4, 36, 576],
    "1b-0": [1, 3, 13, 75], "1b-1": [1, 4, 24, 192],
    "2a-1": [1, 2, 4, 8], "2a-2": [1, 3, 11, 47], "2a-3": [1, 3, 11, 49],
    "2a-4": [1, 4, 20, 116], "2a-5": [1, 3, 9, 27], "2a-6": [1, 4, 18, 88],
    "2a-7": [1, 4, 18, 90], "2a-8": [1, 4, 18, 92], "2a-9": [1, 4, 16, 64],
    "2b-1": [1, 4, 20, 124], "2b-2": [1, 4, 20, 120],
}


def test_catalog_shape():
    entries = list_catalog()
    assert len(entries) == 16
    groups = [e.group for e in entries]
    assert [groups.count(g) for g in ("1a", "1b", "2a", "2b")] == [3, 2, 9, 2]
    assert len({e.id for e in entries}) == 16


def test_pure_compositions_fit_the_budget():
    comps = pure_compositions()
    assert len(comps) == 9
    for arr in comps:
        assert len(arr) >= 2 and sum(2 ** d for d in arr) <= 8


def test_two_type_counts():
    want = {"1a-1": 2, "1a-2": 4, "1a-3": 8, "1b-0": 6, "1b-1": 8, "2b-1": 8, "2b-2": 8}
    for e in list_catalog():
        if e.id in want:
            assert e.two_types == want[e.id]
        else:
            assert e.two_types == sum(2 ** int(f[1]) for f in e.recipe)
        assert e.two_types <= 8


def test_presentations_use_at_most_three_orders():
    for e in list_catalog():
        assert e.presentation.k <= 3
        assert e.well_equipped()
    assert get_entry("1a-1").presentation.k == 1


@pytest.mark.parametrize("eid", ["1a-1", "1a-3", "1b-0", "1b-1", "2a-1", "2a-9", "2b-1", "2b-2"])
def test_entry_builds_and_round_trips(eid):
    chk = check_entry(eid, 50, seed=0)
    assert chk.passed, chk.to_dict()
    assert chk.two_types == get_entry(eid).two_types


def test_decode_inverts_linear_presentation():
    e = get_entry("2b-1")
    X = build_entry("2b-1", 50, seed=2)
    P = entry_as_linear_orders("2b-1", 50, seed=2)
    assert decode(P, e.presentation, e.language) == X


def test_triangles_of_approximations():
    full = entry_as_linear_orders("1a-3", 50, seed=0).triangles()
    assert len(full) == 36
    for e in list_catalog():
        if e.id != "1a-3" and e.presentation.k == 3:
            assert len(entry_as_linear_orders(e.id, 50, seed=0).triangles()) < 36


def test_build_is_deterministic():
    assert build_entry("2a-4", 50, seed=3) == build_entry("2a-4", 50, seed=3)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_generic_profiles_match_class_counts(k):
    prof = class_profile(get_entry(f"1a-{k}").recipe, 4)
    for n in range(1, 5):
        assert len(prof[n]) == count_classes(n, k)
        if n <= 3:
            assert len(prof[n]) == brute_class_count(n, k)


def test_profiles_are_distinct():
    rep = profiles_distinct(4, approx_check=True)
    assert rep.distinct, rep.equal_pairs
    assert rep.counts == PROFILE_COUNTS
    assert all(rep.approx_within_class.values())


def test_compose_entries():
    assert composed_entry("1a-1", "1a-1").id == "2a-1"
    assert composed_entry("1b-0", "1a-1").id == "2b-1"
    assert composed_entry("1a-2", "1a-2").id == "2a-4"
    X = compose_entries("1a-1", "1a-1", 50, seed=0)
    assert X.is_valid() and X.n >= 50
    assert type_count(("G2", "G2")) == 8
    assert compose_entries("1a-2", "1a-2", 50, seed=0).is_valid()
    with pytest.raises(TypeBudgetExceeded):
        compose_entries("1a-3", "1a-1")
    with pytest.raises(TypeBudgetExceeded):
        compose_entries("1b-0", "1a-2")


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        get_entry("3z-1")
    with pytest.raises(KeyError):
        build_entry("nope")
