"""Command-line entry point.

Every subcommand builds a :class:`Report`; ``--json`` prints it in the
versioned machine form.  Exit codes: 0 pass, 1 verification failure,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

from . import catalog, casecheck
from .fraisse import ClassSpec, genericity_threshold, missing_extensions, pairing_count, saturate
from .fraisse import verify_4gen, verify_trianglereduce
from .lattice import CyclicCovers, Lattice, NotALattice, is_distributive, load_lattice, meet_irreducibles
from .permstruct import (
    complete_diagram,
    count_classes,
    enumerate_structures,
    majority_diagram,
    majority_solve,
    parse_type,
    signs,
    type_name,
)
from .report import Report, read_json, write_json
from .sqorder import (
    InvalidFactor,
    InvalidOrder,
    NonMeetIrreducibleBottom,
    OrderedAmalgamProblem,
    amalgamate_ordered,
    build_fullproduct,
    check_fullproduct,
    load_ordered_space,
)
from .umetric import AmalgamProblem, InvalidSpace, TriangleViolation, canonical_amalgam, make_space


class InputError(Exception):
    """Bad input file or argument value; exits with code 2."""


def _pmap(fn: Callable, args: Iterable, threads: int) -> list:
    """Map in order, in worker processes when ``threads > 1``."""
    args = list(args)
    if threads <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, args))


def _sign_str(t: int, k: int = 3) -> str:
    return "(" + ",".join("+" if b else "-" for b in signs(t, k)) + ")"


def _load_lattice_ref(ref) -> Lattice:
    obj = read_json(ref) if isinstance(ref, str) else ref
    return load_lattice(obj)


# ---------------------------------------------------------------- handlers

def cmd_lattice_check(args, rep: Report) -> None:
    try:
        L = load_lattice(read_json(args.file))
    except (NotALattice, CyclicCovers) as exc:
        rep.add("lattice", False, f"{type(exc).__name__}: {exc}")
        return
    mi = sorted(meet_irreducibles(L))
    rep.add("lattice", True, {"size": L.size, "bottom": L.name(L.bottom), "top": L.name(L.top),
                              "meet_irreducibles": [L.name(x) for x in mi]})
    if args.distributive:
        rep.add("distributive", is_distributive(L))


def cmd_amalgamate(args, rep: Report) -> None:
    obj = read_json(args.problem)
    L = _load_lattice_ref(obj["lattice"])
    if args.ordered:
        P = OrderedAmalgamProblem(*(load_ordered_space(obj[key], L) for key in ("base", "factor1", "factor2")))
        try:
            res = amalgamate_ordered(P)
        except (InvalidOrder, InvalidFactor, NonMeetIrreducibleBottom) as exc:
            raise InputError(str(exc)) from exc
        rep.add("ordered-amalgam", True, {"identified": res.identified, "points": res.result.n})
        rep.data["amalgam"] = res.result.to_dict()
        return
    P = AmalgamProblem(make_space(L, obj["base"]["dist"]), tuple(obj["row1"]), tuple(obj["row2"]))
    P.validate()
    try:
        res = canonical_amalgam(P)
    except TriangleViolation as exc:
        rep.add("amalgam", False, {"violation": list(exc.triple)})
        return
    rep.add("amalgam", True, {"identified": res.identified, "points": res.space.n})
    rep.data["amalgam"] = res.space.to_dict()
    rep.data["mapping"] = list(res.mapping)


def cmd_types(args, rep: Report) -> None:
    if args.k < 1 or args.points < 0:
        raise InputError("need --k >= 1 and --points >= 0")
    expected = count_classes(args.points, args.k)
    if args.count:
        # the enumeration is one structure per class; its canonical forms must all differ
        seen = {S.canonical() for S in enumerate_structures(args.points, args.k)}
        rep.add("count", len(seen) == expected, {"classes": len(seen)})
        rep.data["count"] = len(seen)
        return
    structs = [S.to_dict() for S in enumerate_structures(args.points, args.k)]
    rep.add("count", len(structs) == expected, {"classes": len(structs)})
    rep.data["structures"] = structs


def cmd_majority(args, rep: Report) -> None:
    try:
        p, q, r = (parse_type(s) for s in (args.p, args.q, args.r))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    m = majority_solve(p, q, r)
    comps = complete_diagram(majority_diagram(p, q, r))
    got = sorted({c[3, 4] for c in comps})
    rep.add("majority", got == [m], {"type": _sign_str(m), "label": type_name(m), "completions": len(comps)})
    rep.data["type"] = _sign_str(m)


def cmd_generic(args, rep: Report) -> None:
    spec = ClassSpec.from_dict(read_json(args.spec))
    S = saturate(spec, args.size, depth=args.depth, seed=args.seed)
    miss = missing_extensions(spec, S, min(args.depth, 2))
    rep.add("in-class", spec.allows(S), {"points": S.n})
    # finite approximations cannot be saturated in general; report the shortfall
    rep.data["missing_extensions"] = miss
    if args.out:
        write_json(args.out, S.to_dict())


def cmd_triangle_reduce(args, rep: Report) -> None:
    r = verify_trianglereduce()
    rep.add("trianglereduce", r.passed, r.summary())


def cmd_gen4(args, rep: Report) -> None:
    if not 1 <= args.k <= 3 or args.n < 2:
        raise InputError("need 1 <= --k <= 3 and --n >= 2")
    r = verify_4gen(args.k, args.n)
    rep.add(f"gen4 k={args.k} n={args.n}", r.passed, r.summary())
    rep.data["pairing_count(4,2)"] = pairing_count(4, 2)
    rep.data["genericity_threshold(k)"] = genericity_threshold(args.k)


def _verify_case(job: tuple[str, str]) -> dict:
    cid, mode = job
    out: dict = {"case": cid}
    ok = True
    if mode in ("replay", "both"):
        rr = casecheck.replay_table(cid)
        ok &= rr.passed
        out["replay"] = {"passed": rr.passed, "lines_verified": rr.lines_verified,
                         "runs": len(rr.runs), "errata": rr.errata}
    if mode in ("refute", "both"):
        refs = [casecheck.refute_case(cid, v) for v in casecheck.case_variants(cid)]
        ok &= all(r.refuted for r in refs)
        out["refute"] = [r.to_dict(with_tree=False) for r in refs]
    out["passed"] = ok
    return out


def cmd_cases_verify(args, rep: Report) -> None:
    if args.case is not None and args.case not in casecheck.CASE_IDS:
        raise InputError(f"unknown case {args.case!r}; known: {', '.join(casecheck.CASE_IDS)}")
    cs = casecheck.build_clause_set()
    rep.data["certified_instances"] = len(cs.certificates)
    ids = [args.case] if args.case else list(casecheck.CASE_IDS)
    for res in _pmap(_verify_case, [(c, args.mode) for c in ids], args.threads):
        rep.add(f"case {res.pop('case')}", res.pop("passed"), res)


def cmd_cases_division(args, rep: Report) -> None:
    r = casecheck.verify_case_division()
    rep.add("division", r.passed, r.to_dict())


def cmd_catalog_list(args, rep: Report) -> None:
    rows, entries = [], []
    for e in catalog.list_catalog():
        d = e.to_dict()
        rep.add(e.id, e.well_equipped() and d["orders"] <= 3)
        entries.append(d)
        rows.append(f"{e.id:5} {e.name:18} levels={e.levels + 1} 2-types={e.two_types} orders={d['orders']}")
    rep.data["table"] = rows
    rep.data["entries"] = entries


def cmd_catalog_build(args, rep: Report) -> None:
    try:
        e = catalog.get_entry(args.id)
    except catalog.UnknownEntry as exc:
        raise InputError(str(exc.args[0])) from exc
    X = catalog.build_entry(e.id, args.size, args.seed)
    P = catalog.linear_orders(X, e.presentation)
    rep.add(e.id, X.is_valid(), {"points": X.n, "orders": P.k})
    if args.out:
        out = X.to_dict()
        out["linear"] = P.to_dict()
        write_json(args.out, out)


def _check_entry(job: tuple[str, int, int]) -> dict:
    return catalog.check_entry(*job).to_dict()


def cmd_catalog_verify(args, rep: Report) -> None:
    ids = [e.id for e in catalog.list_catalog()]
    for res in _pmap(_check_entry, [(i, args.size, args.seed) for i in ids], args.threads):
        rep.add(res["id"], res["passed"], res)
    prof = catalog.profiles_distinct(4, approx_check=True, seed=args.seed)
    ok = prof.distinct and all(prof.approx_within_class.values())
    rep.add("profiles", ok, prof.to_dict())


def cmd_qsquare(args, rep: Report) -> None:
    if args.n < 2:
        raise InputError("need --n >= 2")
    c = check_fullproduct(args.n)
    rep.add(f"full product n={args.n}", c.passed, c.to_dict())
    if args.out:
        write_json(args.out, build_fullproduct(args.n).to_dict())


# ---------------------------------------------------------------- parser

def _global_flags(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--json", action="store_true", default=default(False), help="print the JSON report")
    p.add_argument("--seed", type=int, default=default(0), help="random seed")
    p.add_argument("--threads", type=int, default=default(1), help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permhom", description="Verifiers and builders for homogeneous "
                                     "structures with three linear orders.")
    _global_flags(parser, lambda v: v)
    # the same flags after the subcommand, without clobbering values given before it
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, lambda v: argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, helptext, parent=sub):
        p = parent.add_parser(name, parents=[common], help=helptext)
        p.set_defaults(handler=handler)
        return p

    lat = sub.add_parser("lattice", help="check a lattice file").add_subparsers(dest="action", required=True)
    p = add("check", cmd_lattice_check, "validate a lattice file", lat)
    p.add_argument("file")
    p.add_argument("--distributive", action="store_true")

    p = add("amalgamate", cmd_amalgamate, "amalgamate two one-point extensions")
    p.add_argument("--problem", required=True)
    p.add_argument("--ordered", action="store_true")

    p = add("types", cmd_types, "enumerate isomorphism classes of structures")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--count", action="store_true")

    p = add("majority", cmd_majority, "solve a majority diagram")
    for name in ("p", "q", "r"):
        p.add_argument(name)

    p = add("generic", cmd_generic, "saturate a finite approximation of a class")
    p.add_argument("--spec", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--out")

    tr = sub.add_parser("triangle-reduce", help="force 4-point classes from triangles").add_subparsers(dest="action", required=True)
    add("verify", cmd_triangle_reduce, "four-point classes forced by triangles", tr)

    g4 = sub.add_parser("gen4", help="check the 4-point genericity criterion").add_subparsers(dest="action", required=True)
    p = add("verify", cmd_gen4, "one-point extension property from small subsets", g4)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    cs = sub.add_parser("cases", help="verify the primitive case analysis").add_subparsers(dest="action", required=True)
    p = add("verify", cmd_cases_verify, "replay and refute the case scripts", cs)
    p.add_argument("--case")
    p.add_argument("--mode", choices=("replay", "refute", "both"), default="both")
    add("division", cmd_cases_division, "check that the cases cover every failure", cs)

    cat = sub.add_parser("catalog", help="list, build and verify catalog entries").add_subparsers(dest="action", required=True)
    add("list", cmd_catalog_list, "list the catalog", cat)
    p = add("build", cmd_catalog_build, "build a finite approximation of an entry", cat)
    p.add_argument("--id", required=True)
    p.add_argument("--size", type=int, default=50)
    p.add_argument("--out")
    p = add("verify", cmd_catalog_verify, "run every per-entry check", cat)
    p.add_argument("--size", type=int, default=50)

    qs = sub.add_parser("qsquare", help="build the full product example").add_subparsers(dest="action", required=True)
    p = add("build", cmd_qsquare, "build and check the full product grid", qs)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.threads < 1:
        print("permhom: --threads must be at least 1", file=sys.stderr)
        return 2
    rep = Report(argv)
    try:
        args.handler(args, rep)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, InputError,
            InvalidSpace, NotALattice, CyclicCovers) as exc:
        print(f"permhom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(rep.to_json() if args.json else rep.to_text())
    return 0 if rep.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
