"""The case scripts: hypotheses, proof lines and expected conclusions.

A fact string is a disjunction (``|``) of conjunctions (``&``) of literals
``R name`` / ``F name`` with ``name`` a triangle such as ``0=>1``, ``2<=0`` or
``C3(0,1,2)``.  Lemma assignments are written as ``(p,q,r,s)`` tuples of
base-type labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..permstruct import parse_triangle
from .logic import DNF, Fact, forbidden, realized

CASE_IDS = ("1.1", "1.2", "1.3.1", "1.3.2", "1.3.3", "2.1.1", "2.1.2.1", "2.1.2.2", "2.2")


class UnknownCase(KeyError):
    pass


def parse_literal(s: str) -> Fact:
    s = s.strip()
    status, name = s[0], s[1:].strip()
    tri = parse_triangle(name)
    if status == "R":
        return realized(tri)
    if status == "F":
        return forbidden(tri)
    raise ValueError(f"literal must start with R or F: {s!r}")


def parse_fact(s: str) -> DNF:
    return tuple(tuple(parse_literal(lit) for lit in conj.split("&")) for conj in s.split("|"))


def format_fact(d: DNF) -> str:
    from ..permstruct import triangle_name

    def lit(f: Fact) -> str:
        return f"{'R' if f.realized else 'F'} {triangle_name(f.var[1])}"

    return " | ".join(" & ".join(lit(f) for f in conj) for conj in d)


@dataclass(frozen=True)
class Line:
    number: int
    fact: str
    reason: str  # hyp | lemma | prim | case2 | wlog
    lemma: str = ""
    reversed: bool = False
    assignments: tuple[tuple[int, int, int, int], ...] = ()
    used: tuple[int, ...] = ()
    printed_used: tuple[int, ...] | None = None  # the citation as printed, when it differs

    @property
    def dnf(self) -> DNF:
        return parse_fact(self.fact)

    @property
    def reason_label(self) -> str:
        if self.reason != "lemma":
            return self.reason
        return self.lemma + ("R" if self.reversed else "")


def hyp(n: int, fact: str, used: tuple[int, ...] = ()) -> Line:
    return Line(n, fact, "hyp", used=used)


def lem(n: int, fact: str, name: str, assignments, used, rev: bool = False, printed=None) -> Line:
    if assignments and isinstance(assignments[0], int):
        assignments = (assignments,)
    return Line(n, fact, "lemma", name, rev, tuple(tuple(a) for a in assignments), tuple(used),
                None if printed is None else tuple(printed))


def other(n: int, fact: str, reason: str, used=()) -> Line:
    return Line(n, fact, reason, used=tuple(used))


@dataclass(frozen=True)
class Terminal:
    kind: str  # contradiction | congruence
    lines: tuple[int, ...] = ()
    congruence: tuple[int, ...] = ()  # base-type labels
    extra: tuple[str, ...] = ()  # extra rule families, e.g. "case2"


@dataclass(frozen=True)
class Variant:
    """A remark variant: the listed 2-type classes are forbidden."""

    forbidden_classes: tuple[int, ...]
    terminal: Terminal | None = None
    note: str = ""


@dataclass(frozen=True)
class WlogBranch:
    """A w.l.o.g. line: the other branch is the image of the listed lines
    under swapping two orders."""

    line: int
    swap_orders: tuple[int, int]
    lines: tuple[int, ...]


@dataclass(frozen=True)
class CaseScript:
    case_id: str
    family: str  # "1" or "2"
    hypothesis: tuple[str, ...]
    rules: tuple[str, ...]
    lines: tuple[Line, ...]
    terminal: Terminal
    variants: tuple[Variant, ...] = ()
    wlog: WlogBranch | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def line(self, n: int) -> Line:
        for ln in self.lines:
            if ln.number == n:
                return ln
        raise KeyError(n)

    def hypothesis_facts(self) -> list[Fact]:
        out = []
        for h in self.hypothesis:
            d = parse_fact(h)
            assert len(d) == 1, "hypotheses are conjunctions"
            out += d[0]
        return out


# ---------------------------------------------------------------- case 1

ALL_OUT = "F 0=>1 & F 0=>2 & F 0=>3"
ARCS = ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2))


def dgraph_hypothesis(edges) -> str:
    """Edge ``(p,q)``: ``C3(0,p,q)`` forbidden; non-edges are realized."""
    edges = set(edges)
    return " & ".join(f"{'F' if e in edges else 'R'} C3(0,{e[0]},{e[1]})" for e in ARCS)


DGRAPHS = {
    "1.1": ARCS,
    "1.2": tuple(e for e in ARCS if e != (3, 2)),
    "1.3.1": ((1, 2), (2, 1), (1, 3), (3, 1)),
    "1.3.2": ((1, 2), (2, 1), (1, 3), (2, 3)),
    "1.3.3": ((1, 2), (2, 1), (3, 1), (3, 2)),
}


def _case1(cid: str, lines, terminal, variants=(), wlog=None, notes=()) -> CaseScript:
    return CaseScript(cid, "1", (ALL_OUT, dgraph_hypothesis(DGRAPHS[cid])), (), tuple(lines), terminal,
                      tuple(variants), wlog, tuple(notes))


def _build() -> dict[str, CaseScript]:
    S: dict[str, CaseScript] = {}
    S["1.1"] = _case1("1.1", [
        hyp(1, ALL_OUT),
        hyp(2, "F C3(0,1,2) & F C3(0,1,3) & F C3(0,2,1) & F C3(0,2,3) & F C3(0,3,1) & F C3(0,3,2)"),
        lem(3, "R 1<=0 & R 2<=0 & R 3<=0", "fan_in", (), (1, 2)),
        lem(4, "F 0<=1 & F 0<=2 & F 0<=3", "majority_split", (), (1, 3)),
    ], Terminal("congruence", congruence=(0,)),
        [Variant((1,)), Variant((2,)), Variant((3,))])

    S["1.2"] = _case1("1.2", [
        hyp(1, ALL_OUT),
        hyp(2, "F C3(0,1,2) & F C3(0,1,3) & F C3(0,2,1) & F C3(0,2,3) & F C3(0,3,1)"),
        hyp(3, "R C3(0,3,2)"),
        lem(4, "R 1<=0", "fan_in", (0, 1, 2, 3), (1, 2)),
        lem(5, "R 2<=0", "fan_in", (0, 2, 1, 3), (1, 2)),
        lem(6, "F 0<=1", "majority_split", (0, 1, 2, 3), (1, 4)),
        lem(7, "F 0<=2", "majority_split", (0, 2, 1, 3), (1, 5)),
        other(8, "R 0<=3", "prim", (1, 6, 7)),
        lem(9, "F 3<=0", "majority_split", (0, 3, 1, 2), (1, 8)),
        lem(10, "F 3<=2", "edge_split", (3, 0, 2, 1), (3, 9), rev=True, printed=(5, 9)),
        lem(11, "F 3=>2 | F 2=>3", "majority_split", (3, 2, 0, 1), (10,), rev=True),
        lem(12, "R 2=>0", "fan_out", (0, 2, 1, 3), (1,)),
        lem(13, "R 3=>0", "fan_out", (0, 3, 1, 2), (1,)),
        lem(14, "F 3=>0 | F 2=>0", "edge_split", ((3, 2, 0, 1), (2, 3, 0, 1)), (3, 8, 11)),
    ], Terminal("contradiction", lines=(12, 13, 14)), [Variant((1,))])

    S["1.3.1"] = _case1("1.3.1", [
        hyp(1, ALL_OUT),
        hyp(2, "F C3(0,1,2) & F C3(0,2,1) & F C3(0,1,3) & F C3(0,3,1)"),
        hyp(3, "R C3(0,3,2) & R C3(0,2,3)"),
        lem(4, "R 1<=0", "fan_in", (0, 1, 2, 3), (1, 2)),
        lem(5, "F 0<=1", "majority_split", (0, 1, 2, 3), (1, 4)),
        other(6, "R 0<=2 | R 0<=3", "prim", (1, 5)),
        other(7, "R 0<=3", "wlog", (6,)),
        lem(8, "F 3<=0", "majority_split", (0, 3, 1, 2), (1, 7), printed=(1, 8)),
        lem(9, "F 3<=2", "edge_split", (3, 0, 2, 1), (3, 8), rev=True),
        lem(10, "F 3=>2 | F 2=>3", "majority_split", (3, 2, 0, 1), (9,), rev=True),
        lem(11, "R 2=>0", "fan_out", (0, 2, 1, 3), (1,)),
        lem(12, "R 3=>0", "fan_out", (0, 3, 1, 2), (1,)),
        lem(13, "F 3=>0 | F 2=>0", "edge_split", ((3, 2, 0, 1), (2, 3, 0, 1)), (3, 10)),
    ], Terminal("contradiction", lines=(11, 12, 13)), [Variant((1,))],
        WlogBranch(7, (1, 2), (7, 8, 9, 10, 11, 12, 13)))

    S["1.3.2"] = _case1("1.3.2", [
        hyp(1, ALL_OUT),
        hyp(2, "F C3(0,1,2) & F C3(0,1,3) & F C3(0,2,1) & F C3(0,2,3)"),
        hyp(3, "R C3(0,3,1) & R C3(0,3,2)"),
        lem(4, "R 1<=0", "fan_in", (0, 1, 2, 3), (1, 2)),
        lem(5, "R 2<=0", "fan_in", (0, 2, 1, 3), (1, 2)),
        lem(6, "F 0<=1", "majority_split", (0, 1, 2, 3), (1, 4)),
        lem(7, "F 0<=2", "majority_split", (0, 2, 1, 3), (1, 5)),
        lem(8, "F 0<=3", "edge_split", (0, 1, 3, 2), (3, 6), rev=True),
    ], Terminal("congruence", congruence=(0,)))

    S["1.3.3"] = _case1("1.3.3", [
        hyp(1, ALL_OUT),
        hyp(2, "R C3(0,1,3) & R C3(0,2,3)"),
        lem(3, "F 2<=1", "edge_split", (0, 1, 2, 3), (1, 2)),
        lem(4, "F 1<=2", "edge_split", (0, 2, 1, 3), (1, 2)),
        lem(5, "R 1<=2", "fan_out", (2, 1, 0, 3), (3,), rev=True),
    ], Terminal("contradiction", lines=(4, 5)))

    # ------------------------------------------------------------ case 2
    pre21 = [
        hyp(1, "F 0=>1 & F 0=>2"),
        other(2, "R 0=>3", "case2"),
        lem(3, "R 1=>0", "fan_out", (0, 1, 2, 3), (1,)),
        lem(4, "R 2=>0", "fan_out", (0, 2, 1, 3), (1,)),
        lem(5, "F 3<=1 & F C3(0,1,3)", "edge_split", (0, 1, 3, 2), (1, 2)),
        lem(6, "F 3<=2 & F C3(0,2,3)", "edge_split", (0, 2, 3, 1), (1, 2)),
        other(7, "R 3<=0", "case2", (5, 6)),
        lem(8, "R 1<=3", "fan_out", (3, 1, 0, 2), (5,), rev=True),
        lem(9, "R 2<=3", "fan_out", (3, 2, 0, 1), (6,), rev=True),
        lem(10, "F 1<=0 | F 0<=1", "majority_split", (0, 1, 2, 3), (1,)),
    ]
    hyp21 = ("F 0=>1 & F 0=>2",)
    S["2.1.1"] = CaseScript("2.1.1", "2", hyp21 + ("F 1<=0",), ("case2",), tuple(pre21 + [
        hyp(11, "F 1<=0", (10,)),
        lem(12, "F 1<=2 & F C3(1,3,2)", "edge_split", (1, 0, 2, 3), (4, 11), rev=True),
        lem(13, "R 1=>3", "fan_in", (3, 1, 0, 2), (5, 12), rev=True),
        lem(14, "F 3=>1", "majority_split", (3, 1, 0, 2), (5, 13), rev=True),
        lem(15, "F 3=>0", "edge_split", (1, 0, 3, 2), (8, 11), rev=True),
        other(16, "R 3=>2", "case2", (14, 15)),
        lem(17, "F 1<=3 | F 3=>2", "edge_split", (1, 2, 3, 0), (12,), rev=True),
    ]), Terminal("contradiction", lines=(8, 16, 17)),
        (Variant((2,), Terminal("contradiction", lines=(14, 15), extra=("case2",)),
                 "ends at line 15: every 3=>q is forbidden"),))

    pre212 = pre21 + [
        hyp(11, "F 0<=1", (10,)),
        lem(12, "F 0<=2 | F 2=>1 & F C3(0,2,1)", "edge_split", (0, 1, 2, 3), (11,), rev=True),
    ]
    S["2.1.2.1"] = CaseScript("2.1.2.1", "2", hyp21 + ("F 0<=1", "F 0<=2"), ("case2",), tuple(pre212 + [
        hyp(13, "F 0<=2", (12,)),
        other(14, "R 0<=3", "case2", (11, 13)),
        lem(15, "F 3=>1 & F C3(0,3,1)", "edge_split", (0, 1, 3, 2), (11, 14), rev=True),
        lem(16, "F 3=>2 & F C3(0,3,2)", "edge_split", (0, 2, 3, 1), (13, 14), rev=True),
    ]), Terminal("congruence", congruence=(0, 3)), (Variant((2,)),))

    S["2.1.2.2"] = CaseScript("2.1.2.2", "2", hyp21 + ("F 0<=1", "F 2=>1 & F C3(0,2,1)"), ("case2",),
                              tuple(pre212 + [
        hyp(13, "F 2=>1 & F C3(0,2,1)", (12,)),
        lem(14, "R 2<=0", "fan_in", (0, 2, 1, 3), (1, 6, 13)),
        lem(15, "F 0<=2", "majority_split", (0, 2, 1, 3), (1, 14)),
        other(16, "R 0<=3", "case2", (11, 15)),
        lem(17, "F 3=>1 & F C3(0,3,1)", "edge_split", (0, 1, 3, 2), (11, 16), rev=True),
        lem(18, "F 3=>2 & F C3(0,3,2)", "edge_split", (0, 2, 3, 1), (15, 16), rev=True),
    ]), Terminal("congruence", congruence=(0, 3)), (Variant((2,), note="not needed by the remark; replayed anyway"),))

    S["2.2"] = CaseScript("2.2", "2", ("F 0=>1",), ("case2", "case22"), (
        hyp(1, "F 0=>1"),
        other(2, "R 0=>2 & R 0=>3", "case22"),
        lem(3, "F 2<=1 & F C3(0,1,2)", "edge_split", (0, 1, 2, 3), (1, 2)),
        lem(4, "F 3<=1 & F C3(0,1,3)", "edge_split", (0, 1, 3, 2), (1, 2)),
        other(5, "R 2<=0 & R 2<=3", "case22", (3,)),
        other(6, "R 3<=0 & R 3<=2", "case22", (4,)),
        lem(7, "F 3=>1 & F C3(2,3,1)", "edge_split", (2, 1, 3, 0), (3, 5), rev=True),
        lem(8, "F 2=>1 & F C3(3,2,1)", "edge_split", (3, 1, 2, 0), (4, 6), rev=True),
        other(9, "R 3=>0 & R 3=>2", "case22", (7,)),
        other(10, "R 2=>0 & R 2=>3", "case22", (8,)),
        lem(11, "F 0<=1 & F C3(3,1,0)", "edge_split", (3, 1, 0, 2), (7, 9)),
        lem(12, "F C3(2,1,0)", "edge_split", (2, 1, 0, 3), (8, 10)),
    ), Terminal("congruence", congruence=(0, 2, 3)))
    return S


SCRIPTS = _build()

# Case splits: the parent disjunction and the leaves taking each branch.
SPLITS = (
    ("2.1", "F 1<=0 | F 0<=1", ("2.1.1", "2.1.2.1")),
    ("2.1.2", "F 0<=2 | F 2=>1 & F C3(0,2,1)", ("2.1.2.1", "2.1.2.2")),
)


def get_script(case_id: str) -> CaseScript:
    try:
        return SCRIPTS[case_id]
    except KeyError:
        raise UnknownCase(f"unknown case {case_id!r}; known: {', '.join(CASE_IDS)}") from None
