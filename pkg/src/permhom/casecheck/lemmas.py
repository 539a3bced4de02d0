"""Amalgamation lemmas for three orders, certified by diagram completion.

Each lemma is stated for ``(p, q, r, s)`` a permutation of the four base
types ``0, 1, 2, 3``.  Its *statement* is a small set of clauses; its
*certificate* runs :func:`complete_diagram` on the amalgamation diagrams
behind it and checks, by propositional search, that the clauses read off
those diagrams entail the statement.

``edge_split``
    With ``p=>q`` forbidden: for ``X`` in ``{p=>r, C3(p,r,s)}`` and ``Y`` in
    ``{r<=q, C3(p,q,r)}``, ``X`` or ``Y`` is forbidden.  Both are glued over
    an edge of type ``r``; every completion contains ``p=>q``.
``majority_split``
    With ``p=>q`` forbidden, ``p<=q`` or ``q<=p`` is forbidden.  Uses the
    ``(p', q, p)``-majority diagram together with ``fan_out``.
``fan_in``
    With ``p=>q``, ``C3(p,q,r)``, ``C3(p,q,s)`` forbidden and ``p, q``
    realized, ``q<=p`` is realized (diagram ``x ->p b ->q y``).
``fan_out``
    With ``p=>q`` forbidden and ``p, q`` realized, ``q=>p`` is realized
    (diagram ``x ->p b <-q y``).

The reversed variant of a lemma reverses every order, which turns
``p=>q`` into ``p<=q`` and ``C3(p,q,r)`` into ``C3(q,p,r)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from ..permstruct import (
    BASE_TYPES,
    PartialDiagram,
    Triangle,
    canonical_triangle,
    complete_diagram,
    cyc,
    enumerate_triangle_types,
    imp,
    majority_diagram,
    opposite,
    rimp,
    triangle_name,
    type_name,
)
from .logic import DNF, Clause, Fact, clause, entails, forbidden, pair_forbidden, pair_realized, realized, tri_var

LEMMAS = ("edge_split", "majority_split", "fan_in", "fan_out")
K = 3


class CertificationFailed(AssertionError):
    pass


class UncertifiedInstance(CertificationFailed):
    """A lemma instance could not be certified while building clauses."""


def label(i: int) -> int:
    """Base type with short name ``i`` (0..3)."""
    return BASE_TYPES[i]


def reverse_triangle(tri: Triangle) -> Triangle:
    return canonical_triangle(*(opposite(t, K) for t in tri), K)


def permute_orders_type(t: int, perm: Sequence[int]) -> int:
    """Order ``i`` of the image is order ``perm[i]`` of the source."""
    return sum(1 << i for i in range(K) if t >> perm[i] & 1)


def permute_orders_triangle(tri: Triangle, perm: Sequence[int]) -> Triangle:
    return canonical_triangle(*(permute_orders_type(t, perm) for t in tri), K)


def assignment_str(a: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in a) + ")"


def _rev_fact(f: Fact) -> Fact:
    kind, obj = f.var
    return Fact(tri_var(reverse_triangle(obj)), f.realized) if kind == "T" else f


def _rev_diagram(D: PartialDiagram) -> PartialDiagram:
    return PartialDiagram(D.n, D.k, {e: opposite(t, K) for e, t in D.typed.items()})


# ---------------------------------------------------------------- diagram clauses

@dataclass
class DiagramRun:
    """One amalgamation diagram, its completions and the ones that survive
    the forbidden hypotheses."""

    diagram: PartialDiagram
    factor_facts: tuple[Fact, ...]
    completions: list[dict]
    new_triangles: list[tuple[Triangle, ...]]
    survivors: list[int]

    def to_dict(self) -> dict:
        return {
            "diagram": self.diagram.to_dict(),
            "factors": [str(f) for f in self.factor_facts],
            "completions": [
                {"types": {f"{a},{b}": type_name(t) for (a, b), t in c.items()},
                 "new_triangles": [triangle_name(x) for x in nt]}
                for c, nt in zip(self.completions, self.new_triangles)
            ],
            "survivors": self.survivors,
        }


def run_diagram(D: PartialDiagram, hypothesis: Iterable[Triangle]) -> DiagramRun:
    hyp = set(hypothesis)
    typed = set(D.typed)
    factor_tris = set()
    covered = set()
    for a, b, c in itertools.combinations(range(D.n), 3):
        if {(a, b), (b, c), (a, c)} <= typed:
            factor_tris.add(canonical_triangle(D.typed[a, b], D.typed[b, c], D.typed[a, c], K))
            covered |= {(a, b), (b, c), (a, c)}
    factor_facts = [realized(t) for t in sorted(factor_tris)]
    factor_facts += sorted({pair_realized(D.typed[e]) for e in typed - covered})
    comps = complete_diagram(D)
    news = []
    for c in comps:
        full = dict(D.typed)
        full.update(c)
        nt = set()
        for a, b, d in itertools.combinations(range(D.n), 3):
            if {(a, b), (b, d), (a, d)} & set(c):
                nt.add(canonical_triangle(full[a, b], full[b, d], full[a, d], K))
        news.append(tuple(sorted(nt)))
    survivors = [i for i, nt in enumerate(news) if not hyp & set(nt)]
    return DiagramRun(D, tuple(factor_facts), comps, news, survivors)


def diagram_clauses(run: DiagramRun, hypothesis: Iterable[Triangle], provenance: str) -> list[Clause]:
    """Some completion is realized whenever the factors are.  Completions
    that contain a hypothesis triangle are replaced by that triangle."""
    base = [realized(h) for h in sorted(set(hypothesis))] + [f.negate() for f in run.factor_facts]
    out: list[frozenset[Fact]] = [frozenset(base)]
    for i in run.survivors:
        out = [c | {realized(t)} for c in out for t in run.new_triangles[i]]
    return [clause(c, provenance) for c in out]


def background_clauses() -> list[Clause]:
    """A realized triangle realizes its 2-types; a realized 2-type ``q``
    realizes the chain ``q=>q`` (forced by transitivity)."""
    out = []
    for tri in enumerate_triangle_types(K):
        for t in set(tri):
            out.append(clause([forbidden(tri), pair_realized(t)], f"link {triangle_name(tri)} -> {type_name(t)}"))
    for q in BASE_TYPES:
        out.append(clause([pair_forbidden(q), realized(imp(q, q))], f"chain {type_name(q)}=>{type_name(q)}"))
    return out


def chain_certificate(q: int) -> DiagramRun:
    D = PartialDiagram(3, K).set(0, 1, q).set(1, 2, q)
    run = run_diagram(D, ())
    if [c[0, 2] for c in run.completions] != [q] or run.new_triangles[0] != (imp(q, q),):
        raise CertificationFailed(f"chain for {type_name(q)} is not forced")
    return run


# ---------------------------------------------------------------- lemma instances

@dataclass
class Certificate:
    lemma: str
    assignment: tuple[int, int, int, int]
    reversed: bool
    hypothesis: tuple[Triangle, ...]
    runs: list[DiagramRun]
    statement: list[Clause]
    mechanical: list[Clause]
    entailed: bool
    notes: list[str] = field(default_factory=list)

    @property
    def name(self) -> str:
        return f"{self.lemma}{'R' if self.reversed else ''}{assignment_str(self.assignment)}"

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "assignment": list(self.assignment),
            "reversed": self.reversed,
            "hypothesis_forbidden": [triangle_name(t) for t in self.hypothesis],
            "diagrams": [r.to_dict() for r in self.runs],
            "statement": [str(c) for c in self.statement],
            "entailed": self.entailed,
            "notes": self.notes,
        }


def _statement(name: str, p: int, q: int, r: int, s: int) -> tuple[list[Triangle], list[list[Fact]], list[str]]:
    """Forbidden hypotheses, statement clauses (unreversed) and notes."""
    if name == "fan_out":
        return [imp(p, q)], [[realized(imp(p, q)), pair_forbidden(p), pair_forbidden(q), realized(imp(q, p))]], []
    if name == "fan_in":
        hyp = [imp(p, q), cyc(p, q, r), cyc(p, q, s)]
        return hyp, [[realized(h) for h in hyp] + [pair_forbidden(p), pair_forbidden(q), realized(rimp(q, p))]], []
    if name == "majority_split":
        return [imp(p, q)], [[realized(imp(p, q)), forbidden(rimp(p, q)), forbidden(rimp(q, p))]], []
    if name == "edge_split":
        cls = []
        for X in (imp(p, r), cyc(p, r, s)):
            for Y in (rimp(r, q), cyc(p, q, r)):
                cls.append([realized(imp(p, q)), forbidden(X), forbidden(Y)])
        return [imp(p, q)], cls, []
    raise ValueError(f"unknown lemma {name!r}")


def _embeddings(tri: Triangle, r: int) -> list[tuple[int, int]]:
    """Ways to hang a triangle on an edge ``u ->r v``: types ``(x->u, x->v)``."""
    a, b, c = tri  # tp(0,1), tp(1,2), tp(0,2)
    T = {(0, 1): a, (1, 2): b, (0, 2): c}
    T.update({(j, i): opposite(t, K) for (i, j), t in list(T.items())})
    out = []
    for u, v in itertools.permutations(range(3), 2):
        if T[u, v] == r:
            x = 3 - u - v
            out.append((T[x, u], T[x, v]))
    return sorted(set(out))


def _edge_split_run(p: int, q: int, r: int, X: Triangle, Y: Triangle) -> DiagramRun:
    u, v, x, y = range(4)
    for ex in _embeddings(X, r):
        for ey in _embeddings(Y, r):
            D = PartialDiagram(4, K).set(u, v, r)
            D.set(x, u, ex[0]).set(x, v, ex[1]).set(y, u, ey[0]).set(y, v, ey[1])
            run = run_diagram(D, [imp(p, q)])
            if not run.survivors:
                return run
    raise CertificationFailed(f"no edge diagram for {triangle_name(X)} / {triangle_name(Y)}")


def _mechanical(name: str, p: int, q: int, r: int, s: int) -> tuple[list[DiagramRun], list[Clause], list[str]]:
    notes: list[str] = []
    prov = f"{name}{assignment_str((p, q, r, s))} diagram"
    if name == "fan_out":
        D = PartialDiagram(3, K).set(0, 2, p).set(1, 2, q)
        run = run_diagram(D, [imp(p, q)])
        got = sorted(run.completions[i][0, 1] for i in run.survivors)
        if got != [opposite(q)]:
            raise CertificationFailed(f"fan_out survivors {got}")
        notes.append(f"completions {sorted(type_name(c[0, 1]) for c in run.completions)}; survivor {type_name(opposite(q))}")
        return [run], diagram_clauses(run, [imp(p, q)], prov), notes
    if name == "fan_in":
        hyp = [imp(p, q), cyc(p, q, r), cyc(p, q, s)]
        D = PartialDiagram(3, K).set(0, 2, p).set(2, 1, q)
        run = run_diagram(D, hyp)
        got = sorted(run.completions[i][0, 1] for i in run.survivors)
        if got != [q]:
            raise CertificationFailed(f"fan_in survivors {got}")
        notes.append(f"completions {sorted(type_name(c[0, 1]) for c in run.completions)}; survivor {type_name(q)}")
        return [run], diagram_clauses(run, hyp, prov), notes
    if name == "majority_split":
        D = majority_diagram(opposite(p), q, p)
        run = run_diagram(D, [imp(p, q)])
        if len(run.completions) != 1 or run.survivors:
            raise CertificationFailed("majority diagram not uniquely completed into the hypothesis")
        notes.append(f"unique completion {type_name(run.completions[0][3, 4])}; factors {', '.join(str(f) for f in run.factor_facts)}")
        # the companion fan_out instance supplies q=>p
        runs2, cl2, _ = _mechanical("fan_out", p, q, r, s)
        return [run] + runs2, diagram_clauses(run, [imp(p, q)], prov) + cl2, notes
    if name == "edge_split":
        runs, cls = [], []
        for X in (imp(p, r), cyc(p, r, s)):
            for Y in (rimp(r, q), cyc(p, q, r)):
                run = _edge_split_run(p, q, r, X, Y)
                runs.append(run)
                cls += diagram_clauses(run, [imp(p, q)], prov)
        return runs, cls, notes
    raise ValueError(f"unknown lemma {name!r}")


@lru_cache(maxsize=None)
def certify_lemma(name: str, assignment: tuple[int, int, int, int], reversed: bool = False) -> Certificate:
    if name not in LEMMAS:
        raise ValueError(f"unknown lemma {name!r}")
    if sorted(assignment) != [0, 1, 2, 3]:
        raise ValueError(f"assignment {assignment} is not a permutation of 0..3")
    p, q, r, s = (label(i) for i in assignment)
    hyp, stmt, notes = _statement(name, p, q, r, s)
    runs, mech, more = _mechanical(name, p, q, r, s)
    notes += more
    if reversed:
        hyp = [reverse_triangle(h) for h in hyp]
        stmt = [[_rev_fact(f) for f in c] for c in stmt]
        # rerun every diagram with all orders reversed
        runs = [run_diagram(_rev_diagram(rn.diagram), hyp) for rn in runs]
        mech = [Clause(frozenset(_rev_fact(f) for f in c.facts), c.provenance, True) for c in mech]
    tag = f"{name}{'R' if reversed else ''}{assignment_str(assignment)}"
    statement = [clause(c, tag) for c in stmt]
    bg = background_clauses()
    ok = True
    for c in statement:
        goal: DNF = tuple((f,) for f in c.facts)
        if not entails(mech + bg, goal).unsat:
            ok = False
    if not ok:
        raise CertificationFailed(f"{tag}: diagram clauses do not entail the statement")
    return Certificate(name, tuple(assignment), reversed, tuple(hyp), runs, statement, mech, ok, notes)


def replay_certificate(cert: Certificate) -> bool:
    """Re-run every stored diagram and compare completions and survivors."""
    for run in cert.runs:
        again = run_diagram(run.diagram, cert.hypothesis)
        if again.completions != run.completions or again.survivors != run.survivors:
            return False
    return True


def all_assignments() -> list[tuple[int, int, int, int]]:
    return [tuple(a) for a in itertools.permutations(range(4))]


@dataclass
class ClauseSet:
    lemma: list[Clause]
    certificates: list[Certificate]
    instances: int

    def by_lemma(self, name: str, reversed: bool, assignment: tuple[int, ...] | None = None) -> list[Clause]:
        out = []
        for cert in self.certificates:
            if cert.lemma == name and cert.reversed == reversed and (assignment is None or cert.assignment == tuple(assignment)):
                out += cert.statement
        return out


@lru_cache(maxsize=None)
def build_clause_set() -> ClauseSet:
    """Every lemma, reversed or not, over all 24 assignments; clauses deduplicated."""
    certs = []
    seen: dict[frozenset, Clause] = {}
    for name in LEMMAS:
        for rev in (False, True):
            for a in all_assignments():
                try:
                    cert = certify_lemma(name, a, rev)
                except CertificationFailed as exc:
                    raise UncertifiedInstance(f"{name}{'R' if rev else ''}{assignment_str(a)}: {exc}") from exc
                certs.append(cert)
                for c in cert.statement:
                    seen.setdefault(c.facts, c)
    return ClauseSet(list(seen.values()), certs, len(certs))


# ---------------------------------------------------------------- primitivity

def pair_classes() -> list[int]:
    return list(BASE_TYPES)


def bridging_triangles(S: Iterable[int]) -> list[Triangle]:
    """Triangles with ``tp(x,y), tp(y,z)`` in ``S`` and ``tp(x,z)`` outside,
    ``S`` given by pair-class representatives."""
    full = set()
    for t in S:
        full |= {t, opposite(t, K)}
    out = set()
    for tri in enumerate_triangle_types(K):
        a, b, c = tri
        T = {(0, 1): a, (1, 2): b, (0, 2): c}
        T.update({(j, i): opposite(t, K) for (i, j), t in list(T.items())})
        for x, y, z in itertools.permutations(range(3)):
            if T[x, y] in full and T[y, z] in full and T[x, z] not in full:
                out.add(tri)
                break
    return sorted(out)


def congruence_candidates() -> list[frozenset[int]]:
    reps = pair_classes()
    out = []
    for mask in range(1, 15):
        out.append(frozenset(reps[i] for i in range(4) if mask >> i & 1))
    return out


def congruence_name(S: Iterable[int]) -> str:
    return "{" + ",".join(sorted(type_name(t) for t in S)) + "}"


def congruence_clauses(S: Iterable[int] | None = None) -> list[Clause]:
    """For each candidate ``S``: a bridging triangle is realized, or ``S`` is
    unrealized, or its complement is."""
    cands = congruence_candidates() if S is None else [frozenset(S)]
    out = []
    for cand in cands:
        bridge = [realized(t) for t in bridging_triangles(cand)]
        outside = [t for t in pair_classes() if t not in cand]
        for s in sorted(cand):
            for u in outside:
                out.append(clause(bridge + [pair_forbidden(s), pair_forbidden(u)],
                                  f"primitivity {congruence_name(cand)}"))
    return out
