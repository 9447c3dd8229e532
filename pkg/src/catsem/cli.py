"""Batch driver: ``python -m catsem <command> ...``.

Exit codes: 0 pass, 1 fail (witnesses emitted), 2 input or parse error,
3 budget exceeded. ``--json`` prints a key-sorted report whose bytes depend
only on the inputs; wall-clock timing is printed in human mode and added
to JSON only with ``--timing``.
"""
from __future__ import annotations

import argparse
import json
import multiprocessing
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Sequence

from . import bicat as bc
from . import coherence as co
from . import fincat as fc
from . import finset as fs
from . import logic as lg
from . import strictify as sf
from . import uprop as up
from .config import Budget
from .errors import BudgetError, CatsemError, ParseError
from .report import ERROR, FAIL, PASS, Report

EXIT = {PASS: 0, FAIL: 1}
EXIT_INPUT, EXIT_BUDGET = 2, 3


# ---------------------------------------------------------------- inputs

def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CatsemError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.pos) from None


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CatsemError(f"cannot read {path}: {exc.strerror}") from None


def category_from_file(data: dict, budget: Budget) -> fc.FinCategory:
    """A category table, or ``{"finsets": [...]}`` for the full subcategory of FinSet on those sets."""
    if "finsets" in data:
        sets = [fs.set_from_json(s) for s in data["finsets"]]
        return fc.finset_as_category(sets, budget, data.get("name", "FinSet"))
    return fc.category_from_json(data)


def _categories(data: dict) -> dict[str, fc.FinCategory]:
    cats = {}
    for c in data.get("categories", []):
        cat = fc.category_from_json(c)
        cats[cat.name] = cat
    return cats


def _functors(data: dict, cats) -> dict[str, fc.Functor]:
    out = {}
    for F in data.get("functors", []):
        fun = fc.functor_from_json(F, cats)
        out[fun.name] = fun
    return out


def _cat_ref(x, cats):
    if isinstance(x, str):
        if x not in cats:
            raise CatsemError(f"unknown category {x!r}")
        return cats[x]
    return fc.category_from_json(x)


def bifunctor_from_json(data: dict) -> fc.Functor:
    cats = _categories(data)
    body = data["bifunctor"]
    left, right = _cat_ref(body["left"], cats), _cat_ref(body["right"], cats)
    target = _cat_ref(body["target"], cats)
    return fc.Functor(fc.product_category(left, right), target, dict(body["objects"]),
                      dict(body["morphisms"]), body.get("name", "F"))


def _resolve_one_cell(inst: bc.BicatInstance, label: str):
    for f in inst.all_one_cells():
        if inst.one_cell_label(f) == label:
            return f
    raise CatsemError(f"instance has no 1-cell labelled {label!r}")


# ---------------------------------------------------------------- commands

def cmd_check_category(args) -> Report:
    return fc.check_category_axioms(category_from_file(load_json(args.file), args.budget))


def cmd_check_functor(args) -> Report:
    data = load_json(args.file)
    F = fc.functor_from_json(data, _categories(data))
    return fc.check_functor(F)


def cmd_check_nattrans(args) -> Report:
    data = load_json(args.file)
    cats = _categories(data)
    eta = fc.nattrans_from_json(data, cats, _functors(data, cats))
    rep = fc.check_nattrans(eta)
    rep.details["iso"] = rep.passed and fc.is_nat_iso(eta)
    return rep


def cmd_check_bifunctor(args) -> Report:
    return fc.check_bifunctor(bifunctor_from_json(load_json(args.file)))


def cmd_find(args) -> Report:
    c = category_from_file(load_json(args.file), args.budget)
    kind = args.kind
    need = {"terminal": 0, "product": 2, "coproduct": 2, "exponential": 2, "negation": 1}[kind]
    if len(args.objects) != need:
        raise CatsemError(f"find {kind} takes {need} object(s), got {len(args.objects)}")
    for x in args.objects:
        if x not in c.object_set:
            raise CatsemError(f"unknown object {x!r}")
    if kind == "terminal":
        found = up.find_terminal(c, args.budget)
    elif kind == "product":
        found = up.find_products(c, *args.objects, budget=args.budget)
    elif kind == "coproduct":
        found = up.find_coproducts(c, *args.objects, budget=args.budget)
    elif kind == "exponential":
        found = up.find_exponential(c, *args.objects, budget=args.budget)
    else:
        if args.dualizing is None:
            raise CatsemError("find negation needs --dualizing")
        found = up.find_negation(c, args.dualizing, args.objects[0], eta=args.eta, budget=args.budget)
    rep = Report(f"find_{kind}", details={"category": c.name, "objects": list(args.objects),
                                          "found": [w.to_dict() for w in found]})
    if not found:
        rep.fail(reason="no object satisfies the universal property", objects=list(args.objects))
    for w in found:
        if not w.is_certified():
            rep.fail(reason="mediator count is not 1", carrier=w.carrier)
    if len(found) > 1:
        rep.details["comparisons"] = [
            {"from": found[0].carrier, "to": w.carrier, "comparison_maps": len(up.comparison(c, found[0], w))}
            for w in found[1:]
        ]
    return rep


def cmd_check_bicat(args) -> Report:
    inst = bc.instance_from_json(load_json(args.instance), args.budget)
    with _mapper(args.parallel) as map_fn:
        rep = bc.exhaustive(inst, args.law, map_fn, identity_only=not args.exhaustive)
    rep.details["instance"] = inst.name
    if inst.strict and rep.passed:
        rep.details["strict_identities"] = bc.strict_cells_are_identities(inst).status
    return rep


def cmd_coherence_paths(args) -> Report:
    ef = co.parse_expression_file(read_text(args.file))
    paths = co.enumerate_paths(ef.source, ef.target, args.steps, not args.no_units)
    listing = [str(p) for p in paths]
    if args.instance is None:
        rep = Report("coherence_paths", details={"source": str(ef.source), "target": str(ef.target),
                                                 "paths": listing, "count": len(paths)})
        if not paths:
            rep.fail(reason=f"no rewrite path within {args.steps} steps")
        return rep
    inst = bc.instance_from_json(load_json(args.instance), args.budget)
    env = {name: _resolve_one_cell(inst, label) for name, label in ef.bindings.items()}
    rep = co.check_all_paths_equal(ef.source, ef.target, inst, env, args.steps, not args.no_units, paths)
    rep.details["listing"] = listing
    rep.details["canonical"] = str(co.canonical_path(ef.source, ef.target))
    return rep


def cmd_strictify(args) -> Report:
    inst = bc.instance_from_json(load_json(args.instance), args.budget)
    names = [x for x in args.generators.split(",") if x]
    if not names:
        raise CatsemError("--generators needs at least one label")
    gens = {x: _resolve_one_cell(inst, x) for x in names}
    strict, witness = sf.strictify_instance(inst, gens, args.bound)
    rep = Report("strictify", details={"instance": inst.name, "bound": args.bound,
                                       "generators": names, "metadata": dict(witness.metadata)})
    bieq = sf.check_biequivalence(witness)
    rep.absorb(bieq)
    quotient = sf.check_quotient(strict, min(args.bound, 3))
    rep.absorb(quotient)
    rep.details["biequivalence"] = {k: bieq.details[k] for k in ("expressions", "naturality_squares", "strings")}
    rep.details["quotient"] = {"pairs": quotient.details.get("pairs"), "paths": quotient.details.get("paths")}
    table = [{"string": list(s.labels), "src": s.src, "tgt": s.tgt,
              "eval": inst.one_cell_label(strict.eval(s))} for s in strict.strings]
    units = [{"expression": str(e), "F": list(witness.F(e).labels),
              "unit": inst.describe(witness.unit_iso(e))} for e in sf.expressions_within(strict, min(args.bound, 3))]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "strings.json", table)
        _write_json(out / "witness.json", {"metadata": dict(witness.metadata), "unit": units,
                                           "counit": "identity"})
        _write_json(out / "report.json", rep.to_dict())
        rep.details["written"] = ["report.json", "strings.json", "witness.json"]
    rep.details["strings"] = len(table)
    return rep


def cmd_logic_check(args) -> Report:
    theorems = lg.parse_proof_file(read_text(args.file))
    v = lg.valuation_from_json(load_json(args.valuation))
    dual = fs.set_from_json(load_json(args.dualizing)) if args.dualizing else fs.EMPTY
    rep = Report("logic_check", details={"dualizing": list(dual.elements), "theorems": []})
    for th in theorems:
        d = lg.type_check([], th.proof, th.formula)
        m = lg.interpret_term(d, v, dual)
        lam = lg.verify_all_lambdas(d, v, dual)
        rep.absorb(lam, theorem=th.name)
        rep.details["theorems"].append({
            "name": th.name, "formula": lg.show_formula(th.formula), "proof": lg.show_term(th.proof),
            "rules": [n.rule for n in d.nodes()], "domain": list(m.dom.elements),
            "codomain_size": len(m.cod), "table": list(m.table),
            "lambda_nodes": lam.details.get("lambda_nodes", 0),
        })
    return rep


def cmd_pseudolimit(args) -> Report:
    diagram = fc.diagram_from_json(load_json(args.file))
    pl = fc.pseudo_limit(diagram, args.budget, args.coherence_length)
    rep = Report("pseudolimit")
    rep.absorb(fc.check_category_axioms(pl))
    for j in diagram.vertices:
        rep.absorb(fc.check_functor(fc.projection(pl, j)), vertex=j)
    rep.details.update(objects=list(pl.objects), morphisms=len(pl.morphisms))
    if args.emit_table:
        rep.details["category"] = fc.category_to_json(pl)["category"]
    return rep


# ---------------------------------------------------------------- plumbing

def _write_json(path: Path, obj) -> None:
    path.write_text(dumps(obj) + "\n", encoding="utf-8")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2, default=str)


@contextmanager
def _mapper(n: int):
    """An order-preserving map, parallel when n > 1."""
    if n <= 1:
        yield map
        return
    with multiprocessing.get_context("fork").Pool(n) as pool:
        yield lambda fn, items: pool.imap(fn, items, chunksize=16)


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable report")
    p.add_argument("--timing", action="store_true", default=d(False), help="include wall time in JSON")
    p.add_argument("--budget-objects", type=int, default=d(6), metavar="N")
    p.add_argument("--budget-morphisms", type=int, default=d(200), metavar="N")
    p.add_argument("--budget-cells", type=int, default=d(4096), metavar="N",
                   help="2-cells per hom-set pair")
    p.add_argument("--parallel", type=int, default=d(1), metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catsem", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    top = parser.add_subparsers(dest="command", required=True)

    check = top.add_parser("check").add_subparsers(dest="what", required=True)
    for name, fn in (("category", cmd_check_category), ("functor", cmd_check_functor),
                     ("nattrans", cmd_check_nattrans), ("bifunctor", cmd_check_bifunctor)):
        p = check.add_parser(name, parents=[common])
        p.add_argument("file")
        p.set_defaults(fn=fn)
    p = check.add_parser("bicat", parents=[common])
    p.add_argument("law", choices=["pentagon", "triangle", "interchange", "naturality", "unitors"])
    p.add_argument("--instance", required=True)
    p.add_argument("--exhaustive", action="store_true",
                   help="quantify over every 2-cell (default: identity 2-cells only)")
    p.set_defaults(fn=cmd_check_bicat)

    p = top.add_parser("find", parents=[common])
    p.add_argument("kind", choices=["terminal", "product", "coproduct", "exponential", "negation"])
    p.add_argument("file")
    p.add_argument("objects", nargs="*")
    p.add_argument("--dualizing", metavar="D")
    p.add_argument("--eta", help="a morphism A → D to transpose")
    p.set_defaults(fn=cmd_find)

    coh = top.add_parser("coherence").add_subparsers(dest="what", required=True)
    p = coh.add_parser("paths", parents=[common])
    p.add_argument("file", help="s-expression file with (gen ...), (source ...), (target ...)")
    p.add_argument("--instance")
    p.add_argument("--steps", type=int, default=5, help="rewrite budget (default 5)")
    p.add_argument("--no-units", action="store_true", help="forbid unit-insertion steps")
    p.set_defaults(fn=cmd_coherence_paths)

    p = top.add_parser("strictify", parents=[common])
    p.add_argument("--instance", required=True)
    p.add_argument("--generators", required=True, help="comma-separated 1-cell labels")
    p.add_argument("--bound", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_strictify)

    logic = top.add_parser("logic").add_subparsers(dest="what", required=True)
    p = logic.add_parser("check", parents=[common])
    p.add_argument("file")
    p.add_argument("--valuation", required=True)
    p.add_argument("--dualizing", help="JSON set file for D (default ∅)")
    p.set_defaults(fn=cmd_logic_check)

    p = top.add_parser("pseudolimit", parents=[common])
    p.add_argument("file")
    p.add_argument("--coherence-length", type=int, default=3)
    p.add_argument("--emit-table", action="store_true")
    p.set_defaults(fn=cmd_pseudolimit)
    return parser


def _human(rep: Report, elapsed: float) -> str:
    lines = [str(rep)]
    if rep.check == "logic_check":
        for th in rep.details["theorems"]:
            lines.append(f"{th['name']} : {th['formula']}")
            lines.append(f"  {' '.join(th['rules'])}")
            lines.append(f"  table {th['table']}")
    elif rep.check.startswith("find_"):
        for w in rep.details["found"]:
            lines.append(f"  {w['carrier']} {w['structure']}")
    else:
        for k, v in sorted(rep.details.items()):
            if isinstance(v, (int, str, float, bool)) or v is None:
                lines.append(f"  {k}: {v}")
    lines.append(f"  time: {elapsed:.2f}s")
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, out: Callable[[str], None] = print) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    args.budget = Budget(max_objects=args.budget_objects, max_morphisms=args.budget_morphisms,
                         max_two_cells=args.budget_cells)
    start = time.perf_counter()
    try:
        rep = args.fn(args)
        code = EXIT[rep.status]
    except BudgetError as exc:
        rep, code = Report("budget", ERROR, [{"error": type(exc).__name__, "message": str(exc)}]), EXIT_BUDGET
    except (CatsemError, KeyError, TypeError) as exc:
        # KeyError/TypeError come from structurally malformed input files
        rep = Report("input", ERROR, [{"error": type(exc).__name__, "message": str(exc)}])
        code = EXIT_INPUT
    elapsed = time.perf_counter() - start
    if args.json:
        doc = {"command": argv, "status": rep.status, "check": rep.check, "witnesses": rep.witnesses,
               "details": rep.details, "exit_code": code,
               "budget": {"objects": args.budget_objects, "morphisms": args.budget_morphisms,
                          "cells": args.budget_cells, "parallel": args.parallel}}
        if args.timing:
            doc["timing"] = {"seconds": round(elapsed, 3)}
        out(dumps(doc))
    else:
        out(_human(rep, elapsed))
    return code


def main() -> None:
    sys.exit(run())
