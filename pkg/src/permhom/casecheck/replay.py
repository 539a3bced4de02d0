"""Line-by-line replay of the case scripts, and independent refutation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from ..permstruct import BASE_TYPES, imp, rimp, triangle_name, type_name
from .lemmas import (
    all_assignments,
    background_clauses,
    build_clause_set,
    certify_lemma,
    congruence_clauses,
    congruence_name,
    permute_orders_triangle,
    permute_orders_type,
)
from .logic import (
    DNF,
    Clause,
    Fact,
    UncertifiedClause,
    clause,
    dnf_to_cnf,
    entails,
    pair_forbidden,
    pair_realized,
    pair_var,
    realized,
    search,
    tri_var,
)
from .tables import SPLITS, CaseScript, Line, Terminal, format_fact, get_script, parse_fact

DEPTH_BUDGET = 32


class LineUnjustified(AssertionError):
    def __init__(self, case_id: str, line: int, why: str):
        self.case_id, self.line = case_id, line
        super().__init__(f"case {case_id} line {line}: {why}")


# ---------------------------------------------------------------- case rules

def case_rule_clauses(rules: Iterable[str]) -> list[Clause]:
    """``case2``: every realized ``p`` keeps some ``p=>q`` and some ``p<=q``.
    ``case22``: every realized ``p`` keeps one of any two ``p=>q`` (and ``<=``)."""
    out = []
    for rule in rules:
        for p in BASE_TYPES:
            others = [q for q in BASE_TYPES if q != p]
            for fam, sym in ((imp, "=>"), (rimp, "<=")):
                if rule == "case2":
                    out.append(clause([pair_forbidden(p)] + [realized(fam(p, q)) for q in others],
                                      f"case 2 hypothesis ({type_name(p)}{sym}q)"))
                elif rule == "case22":
                    for q, r in itertools.combinations(others, 2):
                        out.append(clause([pair_forbidden(p), realized(fam(p, q)), realized(fam(p, r))],
                                          f"case 2.2 hypothesis ({type_name(p)}{sym}q)"))
                else:
                    raise ValueError(f"unknown case rule {rule!r}")
    return out


# ---------------------------------------------------------------- variants

TRIVIAL = "trivial"
DROPPED = "dropped"


def _sides(f: Fact) -> set:
    kind, obj = f.var
    if kind == "P":
        return {f.var}
    return {pair_var(t) for t in obj}


def _lit_value(f: Fact, off: set) -> bool | None:
    """Value forced by forbidding the 2-type classes in ``off``."""
    if f.var[0] == "P":
        return (not f.realized) if f.var in off else None
    if _sides(f) & off:
        return not f.realized
    return None


def simplify(d: DNF, off: set) -> DNF | str:
    """Evaluate a fact with the classes in ``off`` forbidden.  A lone
    conjunction loses only its false conjuncts (each conjunct is a separate
    claim); inside a disjunction a false literal kills its conjunction."""
    if not off:
        return d
    if len(d) == 1:
        kept = tuple(f for f in d[0] if _lit_value(f, off) is None)
        if kept:
            return (kept,)
        return TRIVIAL if all(_lit_value(f, off) for f in d[0]) else DROPPED
    out = []
    for conj in d:
        vals = [_lit_value(f, off) for f in conj]
        if False in vals:
            continue
        kept = tuple(f for f, v in zip(conj, vals) if v is None)
        if not kept:
            return TRIVIAL
        out.append(kept)
    return tuple(out) if out else DROPPED


def _units(facts: Iterable[Fact], tag: str) -> list[Clause]:
    return [clause([f], tag) for f in facts]


def status_units(off: Iterable[int]) -> list[Clause]:
    off_vars = {pair_var(t) for t in off}
    return [clause([pair_forbidden(t) if pair_var(t) in off_vars else pair_realized(t)], "2-type status")
            for t in BASE_TYPES]


def _cnf(d: DNF, tag: str) -> list[Clause]:
    return [clause(c, tag) for c in dnf_to_cnf(d)]


# ---------------------------------------------------------------- reports

@dataclass
class LineCheck:
    number: int
    fact: str
    reason: str
    used: tuple[int, ...]
    status: str  # justified | unjustified | trivial | dropped | assumed
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"line": self.number, "fact": self.fact, "reason": self.reason, "used": list(self.used),
               "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class ScriptRun:
    label: str
    forbidden_classes: tuple[int, ...]
    lines: list[LineCheck] = field(default_factory=list)
    terminal: str = ""
    terminal_ok: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.terminal_ok and all(lc.status != "unjustified" for lc in self.lines)

    def to_dict(self) -> dict:
        return {"label": self.label,
                "forbidden_2types": [type_name(BASE_TYPES[c]) for c in self.forbidden_classes],
                "passed": self.passed, "terminal": self.terminal, "terminal_ok": self.terminal_ok,
                "lines": [lc.to_dict() for lc in self.lines], "notes": self.notes}


@dataclass
class ReplayReport:
    case_id: str
    runs: list[ScriptRun]
    errata: list[str]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.runs)

    @property
    def lines_verified(self) -> int:
        return sum(lc.status == "justified" for lc in self.runs[0].lines)

    def to_dict(self) -> dict:
        return {"case": self.case_id, "passed": self.passed, "runs": [r.to_dict() for r in self.runs],
                "errata": self.errata}


# ---------------------------------------------------------------- replay

@lru_cache(maxsize=None)
def _lemma_clauses(name: str, rev: bool, assignments: tuple) -> tuple[Clause, ...]:
    out: list[Clause] = []
    for a in assignments or all_assignments():
        cert = certify_lemma(name, tuple(a), rev)
        out += cert.statement
    return tuple(out)


class _Replayer:
    def __init__(self, script: CaseScript, off: Sequence[int], label: str):
        self.s = script
        self.off_classes = tuple(off)
        self.off = {pair_var(BASE_TYPES[c]) for c in off}
        self.run = ScriptRun(label, self.off_classes)
        self.facts: dict[int, DNF | str] = {}
        self.base = background_clauses() + status_units(BASE_TYPES[c] for c in off)
        hyp = []
        for f in script.hypothesis_facts():
            v = _lit_value(f, self.off)
            if v is False:
                self.run.notes.append(f"hypothesis {format_fact(((f,),))} is impossible here; variant is vacuous")
            elif v is None:
                hyp.append(f)
        self.hyp_units = _units(hyp, f"case {script.case_id} hypothesis")

    def cited(self, used: Iterable[int]) -> tuple[list[Clause], list[int]]:
        out, omitted = [], []
        for u in used:
            d = self.facts.get(u)
            if d is None:
                raise KeyError(f"line {u} cited before it is established")
            if d == DROPPED:
                omitted.append(u)
            elif d != TRIVIAL:
                out += _cnf(d, f"line {u}")
        return out, omitted

    def reason_clauses(self, ln: Line) -> list[Clause]:
        if ln.reason == "hyp":
            return self.hyp_units
        if ln.reason == "lemma":
            return list(_lemma_clauses(ln.lemma, ln.reversed, ln.assignments))
        if ln.reason == "prim":
            return congruence_clauses()
        if ln.reason in ("case2", "case22"):
            return case_rule_clauses(self.s.rules) + self.hyp_units
        raise ValueError(f"unknown reason {ln.reason!r}")

    def justify(self, goal: DNF, premises: list[Clause]) -> bool:
        return entails(self.base + premises, goal).refuted

    def check_line(self, ln: Line, fact: DNF | None = None, reason_override: list[Clause] | None = None) -> LineCheck:
        if any(u >= ln.number for u in ln.used):
            raise LineUnjustified(self.s.case_id, ln.number, "cites itself or a later line")
        d = simplify(fact if fact is not None else ln.dnf, self.off)
        self.facts[ln.number] = d
        lc = LineCheck(ln.number, ln.fact if fact is None else format_fact(fact), ln.reason_label, ln.used, "")
        if d in (TRIVIAL, DROPPED):
            lc.status = d
            return lc
        lc.fact = format_fact(d)
        premises, omitted = self.cited(ln.used)
        if omitted:
            lc.detail = f"citations to dropped lines omitted: {omitted}"
        reasons = self.reason_clauses(ln) if reason_override is None else reason_override
        lc.status = "justified" if self.justify(d, premises + reasons) else "unjustified"
        return lc

    def terminal(self, t: Terminal) -> bool:
        if t.kind == "contradiction":
            premises, omitted = self.cited(t.lines)
            extra = case_rule_clauses(t.extra) + self.hyp_units if t.extra else []
            self.run.terminal = f"contradiction from lines {list(t.lines)}" + (
                f" and the {', '.join(t.extra)} hypothesis" if t.extra else "")
            return search(self.base + premises + extra, depth_budget=10_000, require_certified=False).refuted
        S = [BASE_TYPES[c] for c in t.congruence]
        premises, _ = self.cited(self.facts)
        self.run.terminal = f"congruence {congruence_name(S)}"
        return search(self.base + premises + congruence_clauses(S), depth_budget=10_000,
                      require_certified=False).refuted


def _check_certified(clauses: Iterable[Clause]) -> None:
    for c in clauses:
        if not c.certified:
            raise UncertifiedClause(c.provenance)


def _relabel(perm: tuple[int, int, int]) -> dict[int, int]:
    """Action of an order permutation on the base-type labels."""
    return {i: BASE_TYPES.index(permute_orders_type(BASE_TYPES[i], perm)) for i in range(4)}


def _map_dnf(d: DNF, perm) -> DNF:
    return tuple(tuple(Fact(tri_var(permute_orders_triangle(f.var[1], perm)), f.realized) for f in conj)
                 for conj in d)


def _same(a: DNF, b: DNF) -> bool:
    return {frozenset(c) for c in a} == {frozenset(c) for c in b}


def _replay_once(script: CaseScript, off: Sequence[int], terminal: Terminal, label: str,
                 errata: list[str] | None) -> ScriptRun:
    rp = _Replayer(script, off, label)
    _check_certified(build_clause_set().lemma + background_clauses() + congruence_clauses())
    for ln in script.lines:
        if ln.reason == "wlog":
            rp.facts[ln.number] = simplify(ln.dnf, rp.off)
            src = rp.facts[ln.used[0]]
            ok = src not in (TRIVIAL, DROPPED) and any(_same((c,), ln.dnf) for c in src)
            rp.run.lines.append(LineCheck(ln.number, ln.fact, "wlog", ln.used, "assumed" if ok else "unjustified",
                                          "one branch; the other is replayed under the order swap"))
            continue
        lc = rp.check_line(ln)
        rp.run.lines.append(lc)
        if errata is not None and ln.printed_used is not None and lc.status == "justified":
            if max(ln.printed_used) >= ln.number:
                verdict = "cites the line itself or a later one"
            else:
                premises, _ = rp.cited(ln.printed_used)
                ok = rp.justify(rp.facts[ln.number], premises + rp.reason_clauses(ln))
                verdict = "also suffices" if ok else "does not justify the fact"
            errata.append(f"line {ln.number}: printed citation {list(ln.printed_used)} {verdict}; "
                          f"replayed with {list(ln.used)}")
    rp.run.terminal_ok = rp.terminal(terminal)
    if script.wlog is not None:
        _replay_wlog(script, rp, terminal)
    return rp.run


def _replay_wlog(script: CaseScript, rp: _Replayer, terminal: Terminal) -> None:
    w = script.wlog
    perm = [0, 1, 2]
    i, j = w.swap_orders
    perm[i], perm[j] = perm[j], perm[i]
    perm = tuple(perm)
    lab = _relabel(perm)
    run = rp.run
    # the swap must fix the hypotheses and every line before the branch
    hyp = script.hypothesis_facts()
    fixed = _same(_map_dnf((tuple(hyp),), perm), (tuple(hyp),))
    for ln in script.lines:
        if ln.number < w.line:
            fixed &= _same(_map_dnf(ln.dnf, perm), ln.dnf)
    split = script.line(script.line(w.line).used[0]).dnf
    a = script.line(w.line).dnf
    b = _map_dnf(a, perm)
    covers = _same(a + b, split)
    run.notes.append(f"w.l.o.g. at line {w.line}: order swap {w.swap_orders} relabels "
                     f"{', '.join(f'{k}->{v}' for k, v in lab.items() if k != v)}; "
                     f"fixes hypotheses and earlier lines: {fixed}; branches cover line "
                     f"{script.line(w.line).used[0]}: {covers}")
    mirror = _Replayer(script, rp.off_classes, run.label + " (mirror branch)")
    mirror.facts = {n: d for n, d in rp.facts.items() if n < w.line or n not in w.lines}
    for ln in script.lines:
        if ln.number < w.line:
            mirror.facts[ln.number] = rp.facts[ln.number]
    ok = fixed and covers
    for ln in script.lines:
        if ln.number not in w.lines:
            continue
        fact = _map_dnf(ln.dnf, perm)
        if ln.reason == "wlog":
            mirror.facts[ln.number] = simplify(fact, mirror.off)
            lc = LineCheck(ln.number, format_fact(fact), "wlog", ln.used, "assumed", "mirror branch")
        else:
            assigns = tuple(tuple(lab[x] for x in asg) for asg in ln.assignments)
            mapped = Line(ln.number, format_fact(fact), ln.reason, ln.lemma, ln.reversed, assigns, ln.used)
            lc = mirror.check_line(mapped, fact)
            if assigns:
                lc.detail = f"assignments {[list(a) for a in assigns]}"
        lc.number = ln.number
        lc.reason = f"{lc.reason} (mirror)"
        run.lines.append(lc)
        ok &= lc.status != "unjustified"
    t_ok = mirror.terminal(terminal)
    run.terminal += f"; mirror branch: {mirror.run.terminal} ({'ok' if t_ok else 'fails'})"
    run.terminal_ok = run.terminal_ok and t_ok and ok


def replay_table(case_id: str, strict: bool = False) -> ReplayReport:
    script = get_script(case_id)
    errata: list[str] = []
    runs = [_replay_once(script, (), script.terminal, "all 2-types realized", errata)]
    for v in script.variants:
        label = "2-type " + ", ".join(str(c) for c in v.forbidden_classes) + " forbidden"
        run = _replay_once(script, v.forbidden_classes, v.terminal or script.terminal, label, None)
        if v.note:
            run.notes.append(v.note)
        runs.append(run)
    rep = ReplayReport(case_id, runs, errata)
    if strict:
        for run in runs:
            for lc in run.lines:
                if lc.status == "unjustified":
                    raise LineUnjustified(case_id, lc.number, f"not derived ({run.label})")
            if not run.terminal_ok:
                raise LineUnjustified(case_id, 0, f"terminal step fails ({run.label})")
    return rep


def verify_splits() -> list[dict]:
    """Sibling leaves take exactly the disjuncts of the line they split on."""
    out = []
    for parent, fact, leaves in SPLITS:
        want = {frozenset(c) for c in parse_fact(fact)}
        got = set()
        for leaf in leaves:
            s = get_script(leaf)
            for ln in s.lines:
                if ln.reason == "hyp" and ln.used and _same(s.line(ln.used[0]).dnf, parse_fact(fact)):
                    got.add(frozenset(ln.dnf[0]))
        out.append({"split": parent, "disjunction": fact, "leaves": list(leaves), "covered": got == want})
    return out


# ---------------------------------------------------------------- refutation

@dataclass
class Refutation:
    case_id: str
    forbidden_classes: tuple[int, ...]
    dropped: tuple[str, ...]
    unsat: bool
    budget_exceeded: bool
    tree_size: int
    tree: dict
    model: list[str] | None

    @property
    def refuted(self) -> bool:
        return self.unsat and not self.budget_exceeded

    def to_dict(self, with_tree: bool = True) -> dict:
        out = {"case": self.case_id,
               "forbidden_2types": [type_name(BASE_TYPES[c]) for c in self.forbidden_classes],
               "dropped": list(self.dropped), "refuted": self.refuted,
               "budget_exceeded": self.budget_exceeded, "tree_size": self.tree_size}
        if with_tree:
            out["tree"] = self.tree
        if self.model is not None:
            out["satisfying_triangles"] = self.model
        return out


def refutation_clauses(script: CaseScript, off: Sequence[int] = (), drop: Iterable[str] = ()) -> list[Clause]:
    drop = set(drop)
    seen: dict = {}
    for cert in build_clause_set().certificates:
        if cert.lemma in drop:
            continue
        for c in cert.statement:
            seen.setdefault(c.facts, c)
    cls = list(seen.values()) + background_clauses()
    if "primitivity" not in drop:
        cls += congruence_clauses()
    cls += case_rule_clauses(script.rules)
    off_vars = {pair_var(BASE_TYPES[c]) for c in off}
    cls += status_units(BASE_TYPES[c] for c in off)
    hyp = [f for f in script.hypothesis_facts() if _lit_value(f, off_vars) is None]
    cls += _units(hyp, f"case {script.case_id} hypothesis")
    return cls


def refute_case(case_id: str, forbidden_classes: Sequence[int] = (), drop: Iterable[str] = (),
                depth_budget: int = DEPTH_BUDGET) -> Refutation:
    script = get_script(case_id)
    drop = tuple(sorted(drop))
    res = search(refutation_clauses(script, forbidden_classes, drop), depth_budget=depth_budget)
    model = None
    if res.model is not None:
        model = sorted(triangle_name(v[1]) for v, b in res.model.items() if v[0] == "T" and b)
    return Refutation(case_id, tuple(forbidden_classes), drop, res.unsat, res.budget_exceeded,
                      res.tree.size(), res.tree.to_dict(), model)


def case_variants(case_id: str) -> list[tuple[int, ...]]:
    return [()] + [v.forbidden_classes for v in get_script(case_id).variants]
