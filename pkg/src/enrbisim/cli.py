"""Command-line surface: document loading, checks and reports.

One command per invocation; exit code 0 means yes/valid, 1 means
no/invalid, 2 means an error.  Reports are emitted as JSON (the default,
byte-stable for a fixed seed unless timing is requested) or as plain
text.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from . import bisim, documents
from .cob import TwoSidedEnrichment, apply_cob, local_right_adjoints, right_adjoint_cob
from .cts import CatFunctor, FiniteCategory, cts_to_vcat, refine
from .errors import EnrbisimError
from .generators import AXIOMS, run_axiom_suite
from .lattice import DEFAULT_ENUM_CAP
from .quantaloid import Quantaloid, validate_quantaloid
from .vcat import VCategory, VFunctor, validate_vcategory, validate_vfunctor

FIXTURE_ENV = "ENRBISIM_FIXTURES"


@dataclass
class Report:
    """Outcome of one command: verdict, evidence, timing."""

    command: str
    verdict: str  # yes | no | valid | invalid | error
    details: dict[str, Any] = field(default_factory=dict)
    timing: float | None = None

    @property
    def exit_code(self) -> int:
        if self.verdict in ("yes", "valid"):
            return 0
        if self.verdict in ("no", "invalid"):
            return 1
        return 2

    def to_json(self, include_timing: bool = False) -> str:
        body = {
            "schema": documents.SCHEMA,
            "command": self.command,
            "verdict": self.verdict,
            "details": self.details,
        }
        if include_timing and self.timing is not None:
            body["timing_seconds"] = round(self.timing, 6)
        return json.dumps(body, sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.verdict}"]
        for key in sorted(self.details):
            lines.append(f"  {key}: {json.dumps(self.details[key], sort_keys=True)}")
        if self.timing is not None:
            lines.append(f"  elapsed: {self.timing:.3f}s")
        return "\n".join(lines)


def default_fixture_paths() -> list[str]:
    import os

    root = os.environ.get(FIXTURE_ENV)
    if root:
        return [root]
    return [str(resources.files("enrbisim").joinpath("data"))]


def _relation_details(rel: bisim.SimRelation) -> dict:
    return {
        "pairs": [list(p) for p in rel.pairs_named()],
        "trace": [list(entry) for entry in rel.refinement_trace],
    }


def _counterexample(check: bisim.SimulationCheck) -> dict:
    if check.counterexample is None:
        return {}
    a, b, ap = check.counterexample
    return {
        "counterexample": {
            "pair": [a, b],
            "probe": ap,
            "direction": check.direction,
        }
    }


def run(command: str, bundle: documents.Bundle, flags: argparse.Namespace) -> Report:
    """Dispatch one command against a loaded bundle."""
    start = time.perf_counter()
    try:
        report = _dispatch(command, bundle, flags)
    except EnrbisimError as err:
        report = Report(command, "error", {"error": f"{type(err).__name__}: {err}"})
    report.timing = time.perf_counter() - start
    return report


def _dispatch(command, bundle, flags) -> Report:
    if command == "validate":
        return _cmd_validate(bundle, flags)
    if command in ("bisim-largest", "bisim-check", "simulates", "bisimilar"):
        return _cmd_relations(command, bundle, flags)
    if command == "od-check":
        f = bundle.get(flags.functor, VFunctor)
        ok = bisim.is_od(f)
        return Report(command, "yes" if ok else "no", {"functor": flags.functor})
    if command == "quotient":
        return _cmd_quotient(bundle, flags)
    if command == "cospan":
        return _cmd_cospan(bundle, flags)
    if command == "span":
        return _cmd_span(bundle, flags)
    if command == "cob-apply":
        tse = bundle.get(flags.tse, TwoSidedEnrichment)
        a = bundle.get(flags.a, VCategory)
        out = apply_cob(tse, a)
        bundle.objects[flags.out] = out
        bundle.kinds[flags.out] = "vcategory"
        return Report(
            command,
            "valid",
            {"result": documents.vcategory_to_doc(bundle, flags.out, out)},
        )
    if command == "cob-radjoint":
        tse = bundle.get(flags.tse, TwoSidedEnrichment)
        b = bundle.get(flags.b, VCategory)
        report = local_right_adjoints(tse, enum_cap=flags.enum_cap)
        out = right_adjoint_cob(tse, b, report)
        bundle.objects[flags.out] = out
        bundle.kinds[flags.out] = "vcategory"
        return Report(
            command,
            "valid",
            {
                "coherent": report.coherent,
                "result": documents.vcategory_to_doc(bundle, flags.out, out),
            },
        )
    if command == "axioms":
        return _cmd_axioms(bundle, flags)
    if command == "cts-build":
        return _cmd_cts_build(bundle, flags)
    if command == "cts-refine":
        return _cmd_cts_refine(bundle, flags)
    raise EnrbisimError(f"unknown command {command!r}")


def _cmd_validate(bundle, flags) -> Report:
    names = flags.names or bundle.names()
    problems: dict[str, list[str]] = {}
    for name in names:
        obj = bundle.get(name)
        kind = bundle.kinds[name]
        if kind == "quantaloid":
            report = validate_quantaloid(obj, enum_cap=flags.enum_cap)
            found = list(report.violations)
        elif kind == "vcategory":
            found = validate_vcategory(obj)
        elif kind == "vfunctor":
            found = validate_vfunctor(obj)
        elif kind == "fincat":
            from .cts import validate_fincat

            found = validate_fincat(obj)
        elif kind == "relation":
            found = []  # construction already enforces the extent invariant
        else:
            found = []
        if found:
            problems[name] = found
    verdict = "valid" if not problems else "invalid"
    return Report("validate", verdict, {"checked": names, "violations": problems})


def _cmd_relations(command, bundle, flags) -> Report:
    if command == "bisim-check":
        rel = bundle.get(flags.rel, bisim.SimRelation)
        check = (
            bisim.is_simulation(rel) if flags.sim else bisim.is_bisimulation(rel)
        )
        return Report(command, "yes" if check.ok else "no", _counterexample(check))
    a = bundle.get(flags.a, VCategory)
    b = bundle.get(flags.b, VCategory)
    if command == "bisim-largest":
        rel = (
            bisim.largest_simulation(a, b)
            if flags.sim
            else bisim.largest_bisimulation(a, b)
        )
        return Report(command, "valid", _relation_details(rel))
    if command == "simulates":
        rel = bisim.largest_simulation(a, b)
        verdict = "yes" if rel.total_on_left() else "no"
        return Report(command, verdict, _relation_details(rel))
    rel = bisim.largest_bisimulation(a, b)
    ok = rel.total_on_left() and rel.total_on_right()
    return Report(command, "yes" if ok else "no", _relation_details(rel))


def _cmd_quotient(bundle, flags) -> Report:
    a = bundle.get(flags.a, VCategory)
    rel = bundle.get(flags.rel, bisim.SimRelation)
    equivalence = bisim.equivalence_closure(rel)
    quo, qmap = bisim.quotient(a, equivalence)
    bundle.objects[flags.out] = quo
    bundle.kinds[flags.out] = "vcategory"
    return Report(
        "quotient",
        "valid",
        {
            "blocks": [[a.objects[i] for i in block] for block in equivalence.blocks],
            "map_in_class": bisim.is_od(qmap),
            "result": documents.vcategory_to_doc(bundle, flags.out, quo),
        },
    )


def _cmd_cospan(bundle, flags) -> Report:
    a = bundle.get(flags.a, VCategory)
    b = bundle.get(flags.b, VCategory)
    if flags.rel:
        rel = bundle.get(flags.rel, bisim.SimRelation)
    else:
        rel = bisim.largest_bisimulation(a, b)
    f, g = bisim.cospan_witness(a, b, rel)
    return Report(
        "cospan",
        "yes",
        {
            "target_objects": list(f.target.objects),
            "left_in_class": bisim.is_od(f),
            "right_in_class": bisim.is_od(g),
        },
    )


def _cmd_span(bundle, flags) -> Report:
    a = bundle.get(flags.a, VCategory)
    b = bundle.get(flags.b, VCategory)
    to_a, to_b = bisim.span_witness(a, b)
    return Report(
        "span",
        "yes",
        {
            "apex_objects": list(to_a.source.objects),
            "left_in_class": bisim.is_od(to_a),
            "right_in_class": bisim.is_od(to_b),
        },
    )


def _parse_suite(spec: str) -> list[str]:
    names = sorted(AXIOMS)
    if ".." in spec:
        lo, hi = spec.split("..")
        lo_i, hi_i = names.index(lo.strip()), names.index(hi.strip())
        return names[lo_i : hi_i + 1]
    return [part.strip() for part in spec.split(",") if part.strip()]


def _cmd_axioms(bundle, flags) -> Report:
    base = bundle.get(flags.base, Quantaloid)
    suite = _parse_suite(flags.suite)
    outcome = run_axiom_suite(suite, base, flags.seed, flags.cases)
    failures = {name: msgs for name, msgs in outcome.items() if msgs}
    return Report(
        "axioms",
        "yes" if not failures else "no",
        {
            "base": flags.base,
            "cases_per_axiom": flags.cases,
            "seed": flags.seed,
            "passed": {name: flags.cases - len(msgs) for name, msgs in outcome.items()},
            "failures": failures,
        },
    )


def _cmd_cts_build(bundle, flags) -> Report:
    cat_name = bundle.docs[flags.spec]["category"]
    sieves = bundle.sieve_base(str(cat_name))
    base_report = validate_quantaloid(sieves)
    _, spec = bundle.get(flags.spec)
    out = cts_to_vcat(sieves, spec)
    sieve_name = f"S({cat_name})"
    bundle.objects.setdefault(sieve_name, sieves)
    bundle.kinds.setdefault(sieve_name, "quantaloid")
    bundle.objects[flags.out] = out
    bundle.kinds[flags.out] = "vcategory"
    return Report(
        "cts-build",
        "valid" if base_report.ok else "invalid",
        {
            "sieve_base_violations": base_report.violations,
            "result": documents.vcategory_to_doc(bundle, flags.out, out),
        },
    )


def _cmd_cts_refine(bundle, flags) -> Report:
    fun = bundle.get(flags.functor, CatFunctor)
    cat_name = bundle.docs[flags.spec]["category"]
    source_sq = bundle.sieve_base(str(cat_name))
    _, spec = bundle.get(flags.spec)
    a = cts_to_vcat(source_sq, spec)
    target_name = _fincat_name_of(bundle, fun.target)
    target_sq = bundle.sieve_base(target_name)
    out = refine(fun, a, source_sq, target_sq)
    sieve_name = f"S({target_name})"
    bundle.objects.setdefault(sieve_name, target_sq)
    bundle.kinds.setdefault(sieve_name, "quantaloid")
    bundle.objects[flags.out] = out
    bundle.kinds[flags.out] = "vcategory"
    return Report(
        "cts-refine",
        "valid",
        {"result": documents.vcategory_to_doc(bundle, flags.out, out)},
    )


def _fincat_name_of(bundle, cat: FiniteCategory) -> str:
    for name, obj in bundle.objects.items():
        if obj is cat:
            return name
    raise EnrbisimError("the functor's target category is not in the bundle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enrbisim",
        description="Simulation and bisimulation checks for enrichments "
        "over finite quantaloids.",
        allow_abbrev=False,
    )
    parser.add_argument(
        "--format", choices=["json", "text"], default="json", help="report format"
    )
    parser.add_argument(
        "--timing", action="store_true", help="include timing in JSON reports"
    )
    parser.add_argument(
        "--paths",
        action="append",
        default=None,
        metavar="PATH",
        help="a document file or directory; repeatable "
        "(defaults to the shipped fixtures)",
    )
    parser.add_argument("--aut-alphabet", default=None, help="comma-separated labels")
    parser.add_argument("--aut-k", type=int, default=None, help="word length cutoff")
    parser.add_argument(
        "--enum-cap",
        type=int,
        default=DEFAULT_ENUM_CAP,
        help="largest hom lattice that exhaustive checks will enumerate",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate named objects (default: all)")
    p.add_argument("names", nargs="*")

    for name in ("bisim-largest", "simulates", "bisimilar"):
        p = sub.add_parser(name)
        p.add_argument("--a", required=True)
        p.add_argument("--b", required=True)
        if name == "bisim-largest":
            p.add_argument("--sim", action="store_true", help="one direction only")

    p = sub.add_parser("bisim-check")
    p.add_argument("--rel", required=True)
    p.add_argument("--sim", action="store_true")

    p = sub.add_parser("od-check")
    p.add_argument("--functor", required=True)

    p = sub.add_parser("quotient")
    p.add_argument("--a", required=True)
    p.add_argument("--rel", required=True)
    p.add_argument("--out", default="quotient")

    p = sub.add_parser("cospan")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--rel", default=None)

    p = sub.add_parser("span")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("cob-apply")
    p.add_argument("--tse", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--out", default="changed")

    p = sub.add_parser("cob-radjoint")
    p.add_argument("--tse", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", default="lifted")

    p = sub.add_parser("axioms")
    p.add_argument("--suite", default="A1..A6")
    p.add_argument("--base", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--cases", type=int, default=200)

    p = sub.add_parser("cts-build")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default="built")

    p = sub.add_parser("cts-refine")
    p.add_argument("--spec", required=True)
    p.add_argument("--functor", required=True)
    p.add_argument("--out", default="refined")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    alphabet = args.aut_alphabet.split(",") if args.aut_alphabet else None
    paths = args.paths if args.paths is not None else default_fixture_paths()
    try:
        bundle = documents.load_bundle(paths, alphabet, args.aut_k)
    except EnrbisimError as err:
        report = Report(args.command, "error", {"error": f"{type(err).__name__}: {err}"})
        print(report.to_json() if args.format == "json" else report.to_text())
        return 2
    report = run(args.command, bundle, args)
    if args.format == "json":
        print(report.to_json(include_timing=args.timing))
    else:
        print(report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
