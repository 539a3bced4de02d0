"""Facts about realized/forbidden types, clauses over them, and a small DPLL.

A variable is either ``("T", triangle)`` (that 3-type is realized) or
``("P", t)`` with ``t`` the base type among a 2-type and its opposite
(that pair class is realized).  A :class:`Fact` is a literal over one variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..permstruct import BASE_TYPES, Triangle, opposite, triangle_name, type_name

Var = tuple


def tri_var(tri: Triangle) -> Var:
    return ("T", tuple(tri))


def pair_var(t: int, k: int = 3) -> Var:
    return ("P", t if t in BASE_TYPES else opposite(t, k))


@dataclass(frozen=True, order=True)
class Fact:
    var: Var
    realized: bool = True

    def negate(self) -> "Fact":
        return Fact(self.var, not self.realized)

    def __str__(self) -> str:
        kind, obj = self.var
        what = triangle_name(obj) if kind == "T" else "2-type " + type_name(obj)
        return f"{what} {'realized' if self.realized else 'forbidden'}"

    def to_dict(self) -> dict:
        kind, obj = self.var
        return {"kind": "triangle" if kind == "T" else "2-type",
                "object": list(obj) if kind == "T" else obj,
                "name": triangle_name(obj) if kind == "T" else type_name(obj),
                "status": "realized" if self.realized else "forbidden"}


def realized(tri: Triangle) -> Fact:
    return Fact(tri_var(tri), True)


def forbidden(tri: Triangle) -> Fact:
    return Fact(tri_var(tri), False)


def pair_realized(t: int) -> Fact:
    return Fact(pair_var(t), True)


def pair_forbidden(t: int) -> Fact:
    return Fact(pair_var(t), False)


@dataclass(frozen=True)
class Clause:
    facts: frozenset[Fact]
    provenance: str = ""
    certified: bool = False

    def __post_init__(self) -> None:
        if not self.facts:
            raise ValueError("empty clause")

    def sorted_facts(self) -> list[Fact]:
        return sorted(self.facts)

    def __str__(self) -> str:
        return " or ".join(str(f) for f in self.sorted_facts())

    def to_dict(self) -> dict:
        return {"facts": [f.to_dict() for f in self.sorted_facts()], "provenance": self.provenance}


def clause(facts: Iterable[Fact], provenance: str, certified: bool = True) -> Clause:
    return Clause(frozenset(facts), provenance, certified)


class UncertifiedClause(RuntimeError):
    pass


# A statement in disjunctive normal form: any one of the conjunctions holds.
DNF = tuple[tuple[Fact, ...], ...]


def dnf_to_cnf(d: DNF) -> list[frozenset[Fact]]:
    out: list[frozenset[Fact]] = [frozenset()]
    for conj in d:
        out = [c | {f} for c in out for f in conj]
    return [c for c in out if not any(f.negate() in c for f in c)]


def negate_dnf(d: DNF) -> list[frozenset[Fact]]:
    """Empty conjunctions (already true) are the caller's business."""
    return [frozenset(f.negate() for f in conj) for conj in d]


# ---------------------------------------------------------------- search

@dataclass
class Node:
    """One branching point: the clause split on and the child per choice."""

    depth: int
    assumed: tuple[Fact, ...] = ()
    split_on: str = ""
    conflict: str = ""
    children: list["Node"] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {"depth": self.depth, "assumed": [str(f) for f in self.assumed]}
        if self.conflict:
            out["conflict"] = self.conflict
        if self.split_on:
            out["split_on"] = self.split_on
            out["children"] = [c.to_dict() for c in self.children]
        return out

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


@dataclass
class SearchResult:
    unsat: bool
    budget_exceeded: bool
    tree: Node
    model: dict[Var, bool] | None = None

    @property
    def refuted(self) -> bool:
        return self.unsat and not self.budget_exceeded


def _lit(f: Fact) -> tuple[Var, bool]:
    return (f.var, f.realized)


def _propagate(clauses: Sequence[tuple[tuple[tuple[Var, bool], ...], Clause]], assign: dict[Var, bool]) -> Clause | None:
    """Unit propagation in place; returns a falsified clause or None."""
    changed = True
    while changed:
        changed = False
        for lits, src in clauses:
            open_lit = None
            n_open = 0
            sat = False
            for v, b in lits:
                cur = assign.get(v)
                if cur is None:
                    n_open += 1
                    open_lit = (v, b)
                elif cur == b:
                    sat = True
                    break
            if sat:
                continue
            if n_open == 0:
                return src
            if n_open == 1:
                assign[open_lit[0]] = open_lit[1]
                changed = True
    return None


def search(clauses: Sequence[Clause], assumptions: Iterable[Fact] = (), depth_budget: int = 32,
           require_certified: bool = True) -> SearchResult:
    """DPLL: unit propagation, then split the shortest open clause.

    Splitting a clause ``l1 or ... or lm`` gives branch ``i`` with ``li``
    true and ``l1..l(i-1)`` false, so the branches are disjoint.  Ties on
    length are broken by the clause's sorted literals.
    """
    if require_certified:
        bad = [c for c in clauses if not c.certified]
        if bad:
            raise UncertifiedClause(f"refusing to search with uncertified clause: {bad[0].provenance}")
    cl = [(tuple(sorted(_lit(f) for f in c.facts)), c) for c in clauses]
    start: dict[Var, bool] = {}
    root = Node(0, tuple(assumptions))
    for f in assumptions:
        if start.get(f.var, f.realized) != f.realized:
            root.conflict = f"assumptions contradict on {f}"
            return SearchResult(True, False, root)
        start[f.var] = f.realized
    state = {"exceeded": False}

    def go(node: Node, assign: dict[Var, bool]) -> dict[Var, bool] | None:
        bad = _propagate(cl, assign)
        if bad is not None:
            node.conflict = bad.provenance or str(bad)
            return None
        best = None
        for lits, src in cl:
            if any(assign.get(v) == b for v, b in lits):
                continue
            open_lits = tuple((v, b) for v, b in lits if v not in assign)
            key = (len(open_lits), open_lits)
            if best is None or key < best[0]:
                best = (key, open_lits, src)
        if best is None:
            return assign
        if node.depth >= depth_budget:
            state["exceeded"] = True
            node.conflict = "depth budget exceeded"
            return None
        _, open_lits, src = best
        node.split_on = src.provenance or str(src)
        for i, (v, b) in enumerate(open_lits):
            child_assign = dict(assign)
            child_assign[v] = b
            assumed = [Fact(v, b)]
            for w, c in open_lits[:i]:
                child_assign[w] = not c
                assumed.append(Fact(w, not c))
            child = Node(node.depth + 1, tuple(assumed))
            node.children.append(child)
            model = go(child, child_assign)
            if model is not None:
                return model
        return None

    model = go(root, start)
    return SearchResult(model is None, state["exceeded"], root, model)


def entails(premises: Sequence[Clause], conclusion: DNF, assumptions: Iterable[Fact] = ()) -> SearchResult:
    """Whether premises (plus unit assumptions) force the DNF conclusion."""
    neg = [Clause(c, "negated goal", True) for c in negate_dnf(conclusion)]
    return search(list(premises) + neg, assumptions, depth_budget=10_000, require_certified=False)
