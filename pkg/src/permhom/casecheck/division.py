"""Checks that the case scripts cover every way the target can fail."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..permstruct import (
    BASE_TYPES,
    complete_diagram,
    cyc,
    imp,
    majority_diagram,
    majority_solve,
    opposite,
    canonical_triangle,
    triangle_name,
)
from .lemmas import certify_lemma, permute_orders_triangle, permute_orders_type
from .logic import forbidden, pair_var, realized
from .replay import verify_splits
from .tables import ARCS, DGRAPHS

VERTICES = (1, 2, 3)


def arrangement_ok(edges: frozenset) -> bool:
    """For every arrangement ``(p,q,r)``, ``(p,q)`` or ``(q,r)`` is an edge."""
    return all((p, q) in edges or (q, r) in edges for p, q, r in itertools.permutations(VERTICES))


def _iso(edges: frozenset, g: dict) -> frozenset:
    return frozenset((g[a], g[b]) for a, b in edges)


def dgraph_class(edges: frozenset) -> list[str]:
    """Scripts whose digraph is isomorphic to ``edges`` (relabeling 1,2,3)."""
    out = []
    for cid, ref in DGRAPHS.items():
        ref = frozenset(ref)
        if any(_iso(ref, dict(zip(VERTICES, perm))) == edges for perm in itertools.permutations(VERTICES)):
            out.append(cid)
    return out


def arrangement_entailed() -> bool:
    """Each arrangement clause is an edge_split statement clause once
    ``0=>p`` is known forbidden."""
    for p, q, r in itertools.permutations(VERTICES):
        cert = certify_lemma("edge_split", (0, p, q, r), False)
        want = {realized(imp(BASE_TYPES[0], BASE_TYPES[p])),
                forbidden(cyc(BASE_TYPES[0], BASE_TYPES[q], BASE_TYPES[r])),
                forbidden(cyc(BASE_TYPES[0], BASE_TYPES[p], BASE_TYPES[q]))}
        if not any(set(c.facts) == want for c in cert.statement):
            return False
    return True


def cycle_classes() -> set:
    return {cyc(*(BASE_TYPES[i] for i in c)) for c in itertools.permutations(range(4), 3)}


def _factor_triangles(D) -> set:
    return {canonical_triangle(D.typed[a, b], D.typed[b, c], D.typed[a, c])
            for a, b, c in itertools.combinations(range(D.n), 3)
            if {(a, b), (b, c), (a, c)} <= set(D.typed)}


def _cycles_in_solution(p: int, q: int, r: int) -> set | None:
    """Cycles in the unique solution of a majority diagram whose factors
    contain no cycle; None when the factors already contain one."""
    D = majority_diagram(p, q, r)
    if _factor_triangles(D) & cycle_classes():
        return None
    comps = complete_diagram(D)
    assert len(comps) == 1
    return _triangles_of(D, comps[0]) & cycle_classes()


def _triangles_of(D, completion) -> set:
    full = dict(D.typed)
    full.update(completion)
    return {canonical_triangle(full[a, b], full[b, c], full[a, c])
            for a, b, c in itertools.combinations(range(D.n), 3)}


@dataclass
class DivisionReport:
    digraphs: int = 0
    satisfying: int = 0
    all_have_two_cycle: bool = True
    all_have_four_edges: bool = True
    classified: dict[str, int] = field(default_factory=dict)
    unclassified: int = 0
    arrangement_from_lemma: bool = False
    majority_cycle: bool = False
    majority_cycle_literal: bool = False
    cycles_one_orbit: bool = False
    majority_cycles_found: list[str] = field(default_factory=list)
    every_cycle_forced: bool = False
    majority_third_type: bool = False
    splits: list[dict] = field(default_factory=list)
    coverage: dict = field(default_factory=dict)

    @property
    def digraph_check(self) -> bool:
        return (self.all_have_two_cycle and self.all_have_four_edges and self.unclassified == 0
                and self.arrangement_from_lemma)

    @property
    def majority_check(self) -> bool:
        return self.majority_cycle and self.every_cycle_forced and self.majority_third_type

    @property
    def passed(self) -> bool:
        return (self.digraph_check and self.majority_check and all(s["covered"] for s in self.splits)
                and self.coverage.get("passed", False))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "digraphs": self.digraphs,
            "satisfying_arrangement_condition": self.satisfying,
            "all_have_two_cycle": self.all_have_two_cycle,
            "all_have_at_least_four_edges": self.all_have_four_edges,
            "classified": self.classified,
            "unclassified": self.unclassified,
            "arrangement_condition_from_edge_split": self.arrangement_from_lemma,
            "majority_solution_contains_cycle": self.majority_cycle,
            "majority_solution_contains_C3(0,1,2)_verbatim": self.majority_cycle_literal,
            "majority_solution_cycles": self.majority_cycles_found,
            "cycles_form_one_orbit": self.cycles_one_orbit,
            "every_cycle_forced_by_some_majority_diagram": self.every_cycle_forced,
            "standard_majority_realizes_third_type": self.majority_third_type,
            "splits": self.splits,
            "coverage": self.coverage,
        }


def verify_case_division(with_coverage: bool = True) -> DivisionReport:
    rep = DivisionReport()
    for mask in range(1 << len(ARCS)):
        edges = frozenset(e for i, e in enumerate(ARCS) if mask >> i & 1)
        rep.digraphs += 1
        if not arrangement_ok(edges):
            continue
        rep.satisfying += 1
        rep.all_have_two_cycle &= any((b, a) in edges for a, b in edges)
        rep.all_have_four_edges &= len(edges) >= 4
        cls = dgraph_class(edges)
        if len(cls) == 1:
            rep.classified[cls[0]] = rep.classified.get(cls[0], 0) + 1
        else:
            rep.unclassified += 1
    rep.arrangement_from_lemma = arrangement_entailed()

    t0, t1, t2, t3 = BASE_TYPES
    found = _cycles_in_solution(opposite(t1), opposite(t0), opposite(t2))
    rep.majority_cycles_found = sorted(triangle_name(c) for c in found or ())
    # any cycle stands for C3(0,1,2) once the cycles form one relabeling orbit
    rep.cycles_one_orbit = cycle_orbit(cyc(t0, t1, t2)) == cycle_classes()
    rep.majority_cycle = bool(found) and rep.cycles_one_orbit
    rep.majority_cycle_literal = bool(found) and cyc(t0, t1, t2) in found
    hit: set = set()
    for a in itertools.product(BASE_TYPES + tuple(opposite(t) for t in BASE_TYPES), repeat=3):
        if len({pair_var(x) for x in a}) == 3:
            hit |= _cycles_in_solution(*a) or set()
    rep.every_cycle_forced = hit == cycle_classes()
    D = majority_diagram(t0, t1, t2)
    comps = complete_diagram(D)
    rep.majority_third_type = (len(comps) == 1 and comps[0][3, 4] in (t3, opposite(t3))
                               and majority_solve(t0, t1, t2) == opposite(t3))
    rep.splits = verify_splits()
    if with_coverage:
        rep.coverage = coverage()
    return rep


# ---------------------------------------------------------------- coverage

def _symmetries() -> list[tuple[tuple[int, int, int], int]]:
    """Order permutations with even flip masks: these permute the base
    labels and preserve the triangle families."""
    return [(perm, mask) for perm in itertools.permutations(range(3)) for mask in (0, 3, 5, 6)]


def _act_type(t: int, perm, mask: int) -> int:
    return permute_orders_type(t, perm) ^ mask


def cycle_orbit(tri) -> set:
    return {canonical_triangle(*(_act_type(t, perm, mask) for t in tri)) for perm, mask in _symmetries()}


def _label_map(perm, mask) -> dict[int, int]:
    return {i: BASE_TYPES.index(_act_type(BASE_TYPES[i], perm, mask)) for i in range(4)}


def classify_pattern(forb: frozenset) -> str:
    """``forb`` is a set of label pairs ``(p,q)`` with ``p=>q`` forbidden."""
    outs = [sum((p, q) in forb for q in range(4) if q != p) for p in range(4)]
    if max(outs) == 3:
        return "1"
    if max(outs) == 2:
        return "2.1"
    return "2.2"


CASE_PATTERNS = {"1": {(0, 1), (0, 2), (0, 3)}, "2.1": {(0, 1), (0, 2)}, "2.2": {(0, 1)}}


def coverage() -> dict:
    """Every nonempty pattern of forbidden ``p=>q`` is the image of a script
    hypothesis under a label symmetry, for exactly the case it falls in."""
    pairs = [(p, q) for p in range(4) for q in range(4) if p != q]
    maps = [_label_map(perm, mask) for perm, mask in _symmetries()]
    # the label maps act on p=>q as the corresponding triangle map does
    faithful = all(
        permute_orders_triangle(imp(BASE_TYPES[p], BASE_TYPES[q]), perm) == imp(
            BASE_TYPES[_label_map(perm, 0)[p]], BASE_TYPES[_label_map(perm, 0)[q]])
        for perm in itertools.permutations(range(3)) for p, q in pairs)
    counts = {"1": 0, "2.1": 0, "2.2": 0}
    missing = 0
    for mask in range(1, 1 << len(pairs)):
        forb = frozenset(e for i, e in enumerate(pairs) if mask >> i & 1)
        case = classify_pattern(forb)
        counts[case] += 1
        hyp = CASE_PATTERNS[case]
        if not any({(g[p], g[q]) for p, q in hyp} <= forb for g in maps):
            missing += 1
    group = len({tuple(sorted(g.items())) for g in maps})
    return {"patterns": (1 << len(pairs)) - 1, "by_case": counts, "uncovered": missing,
            "label_group_order": group, "order_permutations_faithful": faithful,
            "passed": missing == 0 and group == 24 and faithful}
