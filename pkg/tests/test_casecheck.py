import pytest

from permhom.casecheck import (
    CASE_IDS,
    LEMMAS,
    UncertifiedClause,
    UnknownCase,
    build_clause_set,
    case_variants,
    certify_lemma,
    congruence_clauses,
    get_script,
    refute_case,
    replay_certificate,
    replay_table,
    search,
    verify_case_division,
)
from permhom.casecheck.lemmas import bridging_triangles, congruence_candidates
from permhom.casecheck.logic import clause, pair_forbidden, pair_realized
from permhom.permstruct import BASE_TYPES, opposite

# lines checked in the main run of each case
LINES = {"1.1": 4, "1.2": 14, "1.3.1": 18, "1.3.2": 8, "1.3.3": 5,
         "2.1.1": 17, "2.1.2.1": 16, "2.1.2.2": 18, "2.2": 12}


def test_every_lemma_instance_certifies_and_replays():
    cs = build_clause_set()
    assert cs.instances == len(LEMMAS) * 2 * 24 == 192
    assert len(cs.lemma) == 240
    assert all(c.entailed and replay_certificate(c) for c in cs.certificates)


def test_fan_survivors():
    out = certify_lemma("fan_out", (0, 1, 2, 3))
    assert [r.survivors for r in out.runs] == [[1]]
    assert "survivor 1'" in out.notes[0]
    inn = certify_lemma("fan_in", (0, 1, 2, 3))
    assert "survivor 1" in inn.notes[0] and "survivor 1'" not in inn.notes[0]


def test_certify_rejects_bad_input():
    with pytest.raises(ValueError):
        certify_lemma("nonsense", (0, 1, 2, 3))
    with pytest.raises(ValueError):
        certify_lemma("fan_in", (0, 1, 1, 3))


def test_congruence_candidates():
    cands = congruence_candidates()
    assert len(cands) == 14
    assert len(congruence_clauses()) == sum(len(c) * (4 - len(c)) for c in cands)
    # closing a set under opposites, a bridging triangle leaves it
    for S in cands:
        full = set(S) | {opposite(t) for t in S}
        for tri in bridging_triangles(S):
            assert any(t not in full for t in tri)


@pytest.mark.parametrize("cid", CASE_IDS)
def test_replay_table(cid):
    rep = replay_table(cid, strict=True)
    assert rep.passed
    assert rep.lines_verified == LINES[cid]
    assert len(rep.runs) == len(case_variants(cid))


def test_case_terminals():
    assert replay_table("1.1").runs[0].terminal == "congruence {0}"
    assert replay_table("1.2").runs[0].terminal.startswith("contradiction from lines [12, 13, 14]")
    # the symmetric branch is replayed too
    assert "mirror branch" in replay_table("1.3.1").runs[0].terminal


def test_fan_out_line_in_second_case():
    lines = replay_table("2.1.1").runs[0].lines
    assert (lines[2].number, lines[2].reason, lines[2].status) == (3, "fan_out", "justified")


def test_errata_reported():
    assert replay_table("1.2").errata == ["line 10: printed citation [5, 9] does not justify the fact; "
                                          "replayed with [3, 9]"]
    assert "replayed with [1, 7]" in replay_table("1.3.1").errata[0]
    assert all(not replay_table(c).errata for c in CASE_IDS if c not in ("1.2", "1.3.1"))


@pytest.mark.parametrize("cid", CASE_IDS)
def test_refutation(cid):
    for v in case_variants(cid):
        r = refute_case(cid, v)
        assert r.refuted and r.model is None


@pytest.mark.parametrize("cid, drop", [("1.1", "majority_split"), ("1.1", "primitivity"),
                                       ("1.2", "edge_split"), ("2.2", "edge_split")])
def test_ablation_is_satisfiable(cid, drop):
    r = refute_case(cid, drop=[drop])
    assert not r.unsat and not r.budget_exceeded
    assert r.model


def test_case_division():
    rep = verify_case_division()
    assert rep.passed
    assert rep.digraphs == 64 and rep.unclassified == 0


def test_uncertified_clause_refused():
    t = BASE_TYPES[0]
    bad = [clause([pair_realized(t)], "unit", certified=False), clause([pair_forbidden(t)], "unit")]
    with pytest.raises(UncertifiedClause):
        search(bad)
    assert search(bad, require_certified=False).unsat


def test_unknown_case():
    with pytest.raises(UnknownCase):
        get_script("9.9")
    with pytest.raises(KeyError):
        replay_table("3")
