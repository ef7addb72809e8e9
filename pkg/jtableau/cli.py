#!/usr/bin/env python3
"""
Command-line front end.

    python -m jtableau prove --logic J --cs data/ex.cs --calculus jlt "x:A -> c*x:(B -> A)"
    python -m jtableau check proof.json
    python -m jtableau pipeline --logic J --cs data/ex.cs data/weakening.hil

Exit codes: 0 proved / ok, 1 open / defect, 2 unknown, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Final

from . import config
from .config import Budget, setup_logging
from .cutelim import cut_count
from .errors import (
    CutEliminationError,
    InadmissibleOperation,
    InvalidConstantSpec,
    JTableauError,
    OutOfUniverse,
    ParseError,
)
from .hilbert import check_hilbert, load_hilbert, translate_to_tableau
from .logics import EMPTY_CS, ConstantSpec, LogicId, load_cs, parse_logic
from .prover_analytic import weak_subformula_scan
from .reports import (
    disagreements,
    eliminate_with_trace,
    load_formulas,
    log_result,
    prove_batch,
    summarise,
    summarise_verdict,
)
from .search import EXIT_CODES, Open, Proved, Unknown, Verdict, prove
from .semantics import check_conditions, load_model, model_to_json, validate_countermodel
from .subformulas import ClosureRequest, oracle, subformulas_up_to, weak_subformulas_up_to
from .syntax import Formula, Neg, parse_formula, print_formula, size
from .tableau import (
    Calculus,
    check_proof,
    load_tableau,
    render_text,
    rules_used,
    save_tableau,
    tableau_from_json,
    tableau_to_json,
)

LOGGER: Final = logging.getLogger(__name__)

EX_OK: Final = 0
EX_DEFECT: Final = 1
EX_USAGE: Final = 64

_USAGE_ERRORS: Final = (ParseError, InadmissibleOperation, InvalidConstantSpec, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    logic: LogicId
    cs_path: Path | None = None
    calculus: str = "jl"
    allow_cut: bool = False
    size_factor: int = config.SIZE_FACTOR
    max_nodes: int = config.MAX_NODES
    max_depth: int = config.MAX_DEPTH
    instantiation_bound: int = config.INSTANTIATION_BOUND
    output: str = "text"
    deterministic: bool = False
    close_cs: bool = False
    variables: frozenset[str] = frozenset()
    constants: frozenset[str] = frozenset()

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        return cls(
            logic=parse_logic(args.logic),
            cs_path=Path(args.cs) if args.cs else None,
            calculus=getattr(args, "calculus", "jl"),
            allow_cut=getattr(args, "allow_cut", False),
            size_factor=args.size_factor,
            max_nodes=args.max_nodes,
            max_depth=args.max_depth,
            instantiation_bound=args.instantiation_bound,
            output=args.output,
            deterministic=args.deterministic,
            close_cs=args.close_cs,
            variables=frozenset(args.var),
            constants=frozenset(args.const),
        )

    @property
    def budget(self) -> Budget:
        try:
            return Budget(self.max_nodes, self.max_depth, self.instantiation_bound, self.size_factor)
        except ValueError as e:
            raise UsageError(str(e)) from None

    @property
    def tableau_calculus(self) -> Calculus:
        if self.calculus == "jl":
            if self.allow_cut:
                raise UsageError("--allow-cut needs --calculus jlt")
            return Calculus.JL
        return Calculus.JLT_PLUS_CUT if self.allow_cut else Calculus.JLT

    def load_cs(self) -> ConstantSpec:
        if self.cs_path is None:
            return EMPTY_CS
        return load_cs(self.cs_path, self.logic, close=self.close_cs)

    def formula(self, text: str) -> Formula:
        return parse_formula(text, self.variables, self.constants)


def _emit(data: dict) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))


def _print_model(model_json: dict) -> None:
    print("\n🧩 COUNTERMODEL:")
    valuation = ", ".join(f"{p}={v}" for p, v in model_json["valuation"].items()) or "(all atoms false)"
    print(f"   Valuation: {valuation}")
    for item in model_json["evidence"]:
        print(f"   E({item['term']}) = {{{', '.join(item['formulas'])}}}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _run_prover(cfg: RunConfig, goal: Formula, cs: ConstantSpec) -> Verdict:
    calculus = cfg.tableau_calculus
    if calculus is Calculus.JLT_PLUS_CUT:
        from .prover_analytic import prove_analytic
        return prove_analytic(goal, cfg.logic, cs, cfg.budget, allow_cut=True)
    return prove(goal, cfg.logic, cs, calculus, cfg.budget)


def cmd_prove(cfg: RunConfig, text: str, save: str | None = None, log: str | None = None) -> int:
    goal = cfg.formula(text)
    cs = cfg.load_cs()
    try:
        verdict = _run_prover(cfg, goal, cs)
    except _USAGE_ERRORS:
        raise
    except JTableauError as e:
        verdict = Unknown(str(e))

    if log:
        log_result(summarise_verdict(goal, cfg.logic, cfg.tableau_calculus, verdict), log)
    if save and verdict.tableau is not None:
        save_tableau(verdict.tableau, save)

    if cfg.output == "json":
        data = {
            "formula": print_formula(goal),
            "logic": cfg.logic.name,
            "calculus": str(cfg.tableau_calculus),
            "verdict": verdict.status,
        }
        match verdict:
            case Proved(tableau=t):
                data["proof"] = tableau_to_json(t)
            case Open(model=m, leaf=leaf):
                data["open_leaf"] = leaf
                data["model"] = model_to_json(m)
            case Unknown(reason=reason):
                data["reason"] = reason
        if not cfg.deterministic:
            data["stats"] = {"nodes": verdict.stats.nodes, "applications": verdict.stats.applications,
                             "repairs": verdict.stats.repairs, "elapsed": round(verdict.stats.elapsed, 4)}
        _emit(data)
        return EXIT_CODES[verdict.status]

    icons = {"Proved": "🟢", "Open": "🔴", "Unknown": "🟡"}
    print("=" * 60)
    print(f"⚖️  {print_formula(goal, unicode=True)}")
    print(f"   Logic: {cfg.logic.name}   Calculus: {cfg.tableau_calculus}   CS entries: {len(cs)}")
    print("=" * 60)
    print(f"{icons[verdict.status]} {verdict.status}")
    match verdict:
        case Proved(tableau=t):
            print()
            print(render_text(t))
            used = rules_used(t)
            print(f"\n📊 Rules: {', '.join(f'{r} x{n}' for r, n in sorted(used.items()))}")
        case Open(model=m, leaf=leaf):
            print(f"   Open branch ends at node {leaf}")
            _print_model(model_to_json(m))
        case Unknown(reason=reason):
            print(f"   Reason: {reason}")
    if not cfg.deterministic:
        print(f"\n⏱️  {verdict.stats.nodes} nodes, {verdict.stats.elapsed:.3f}s")
    print("=" * 60)
    return EXIT_CODES[verdict.status]


def cmd_check(path: str) -> int:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: not JSON ({e.msg})", e.lineno, e.colno) from None
    try:
        t = tableau_from_json(data)
    except ParseError as e:
        print(f"❌ {path}: {e}", file=sys.stderr)
        return EX_DEFECT
    report = check_proof(t)
    if not report.ok:
        for defect in report.defects:
            print(f"❌ {defect}", file=sys.stderr)
        return EX_DEFECT
    print(f"✅ {path}: valid closed {t.calculus} proof of {print_formula(t.root_formula, unicode=True)} "
          f"({t.size} nodes)")
    return EX_OK


def cmd_validate_model(cfg: RunConfig, model_path: str, text: str) -> int:
    root = cfg.formula(text)
    cs = cfg.load_cs()
    m = load_model(model_path, cfg.variables, cfg.constants)
    try:
        valid = validate_countermodel(m, root, cfg.logic, cs)
    except OutOfUniverse as e:
        print(f"❌ {e}", file=sys.stderr)
        return EX_DEFECT
    report = check_conditions(m, cfg.logic, cs)
    print(f"Conditions checked: {', '.join(report.checked)}")
    for witness in report.failures:
        print(f"   ❌ {witness}")
    if valid:
        print(f"✅ model refutes {print_formula(root, unicode=True)} in {cfg.logic.name}")
        return EX_OK
    print(f"❌ model is not a countermodel for {print_formula(root, unicode=True)}", file=sys.stderr)
    return EX_DEFECT


def _derivation(o, f, weak: bool) -> list[str]:
    steps = o.explain(f)
    if not steps and weak and isinstance(f, Neg):
        inner = o.explain(f.inner)
        if inner:
            steps = [*inner, f"weak: {print_formula(f)} is the negation of {print_formula(f.inner)}"]
    return steps


def cmd_subformulas(cfg: RunConfig, text: str, bound: int | None, weak: bool, explain: str | None) -> int:
    root = cfg.formula(text)
    cs = cfg.load_cs()
    o = oracle(root, cs)
    if explain:
        candidate = cfg.formula(explain)
        steps = _derivation(o, candidate, weak=True)
        if not steps:
            print(f"❌ {print_formula(candidate, unicode=True)} is not a subformula of "
                  f"{print_formula(root, unicode=True)}")
            return EX_DEFECT
        for step in steps:
            print(f"   {step}")
        return EX_OK
    if bound is None:
        bound = size(root) + config.LISTING_SLACK
    try:
        req = ClosureRequest(root, cs, cfg.logic, bound)
    except ValueError as e:
        raise UsageError(str(e)) from None
    members = weak_subformulas_up_to(req) if weak else subformulas_up_to(req)
    traced = explain is not None
    if cfg.output == "json":
        data = {"root": print_formula(root), "bound": bound, "weak": weak,
                "members": [print_formula(f) for f in members]}
        if traced:
            data["derivations"] = {print_formula(f): _derivation(o, f, weak) for f in members}
        _emit(data)
    else:
        for f in members:
            print(print_formula(f, unicode=True))
            if traced:
                for step in _derivation(o, f, weak):
                    print(f"   {step}")
        print(f"\n📊 {len(members)} formulas up to size {bound}")
    return EX_OK


def cmd_translate(cfg: RunConfig, path: str, out: str | None) -> int:
    proof = load_hilbert(path)
    cs = cfg.load_cs()
    report = check_hilbert(proof, cfg.logic, cs)
    if not report.ok:
        for defect in report.defects:
            print(f"❌ {defect}", file=sys.stderr)
        return EX_DEFECT
    t = translate_to_tableau(proof, cfg.logic, cs)
    if out:
        save_tableau(t, out)
    if cfg.output == "json":
        _emit(tableau_to_json(t))
    else:
        print(render_text(t))
        print(f"\n📊 {proof.mp_count()} MP lines, {cut_count(t)} cuts, {t.size} nodes")
    return EX_OK


def cmd_cutelim(cfg: RunConfig, path: str, out: str | None, trace_csv: str | None, plot: str | None) -> int:
    t = load_tableau(path)
    if t.calculus is Calculus.JL:
        raise UsageError("cut elimination needs a JLT or JLT_plus_cut proof")
    try:
        result, trace = eliminate_with_trace(t)
    except CutEliminationError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EX_DEFECT
    if trace_csv:
        trace.to_csv(trace_csv, index=False)
        print(f"📄 Trace saved to: {trace_csv}")
    if plot:
        from .graphs import plot_elimination_trace
        plot_elimination_trace(trace, plot)
    if out:
        save_tableau(result, out)
    if cfg.output == "json":
        _emit(tableau_to_json(result))
    else:
        print(render_text(result))
        if not trace.empty:
            print("\n✂️  REWRITE STEPS:")
            print(trace[['Step', 'Case', 'Sub_Case', 'Rank', 'Weight', 'Cuts_Left']].to_string(index=False))
        print(f"\n📊 {len(trace)} steps, {result.size} nodes")
    return EX_OK


def cmd_pipeline(cfg: RunConfig, path: str, out: str | None) -> int:
    """Hilbert proof → tableau with cuts → cut-free JLT proof → subformula scan."""
    proof = load_hilbert(path)
    cs = cfg.load_cs()
    print("=" * 60)
    print(f"🔗 PIPELINE: {path}")
    print(f"   Conclusion: {print_formula(proof.conclusion, unicode=True)}")
    print("=" * 60)

    report = check_hilbert(proof, cfg.logic, cs)
    if not report.ok:
        print(f"❌ Hilbert check: {report.first}")
        return EX_DEFECT
    print(f"✅ Hilbert check: {len(proof.lines)} lines, {proof.mp_count()} MP")

    try:
        t = translate_to_tableau(proof, cfg.logic, cs)
        print(f"✅ Translation: {t.size} nodes, {cut_count(t)} cuts")
        result, trace = eliminate_with_trace(t)
        print(f"✅ Cut elimination: {len(trace)} steps, {result.size} nodes")
    except JTableauError as e:
        print(f"❌ {e}")
        return EX_DEFECT

    checked = check_proof(result)
    if not checked.ok or result.calculus is not Calculus.JLT:
        print(f"❌ JLT check: {checked.defects[0] if checked.defects else result.calculus}")
        return EX_DEFECT
    print("✅ JLT check")

    violations = weak_subformula_scan(result)
    if violations:
        node_id, f = violations[0]
        print(f"❌ Subformula property: node {node_id} holds {print_formula(f, unicode=True)}")
        return EX_DEFECT
    print("✅ Subformula property")

    if out:
        save_tableau(result, out)
        print(f"💾 Cut-free proof saved to: {out}")
    print("=" * 60)
    return EX_OK


def cmd_batch(cfg: RunConfig, path: str, workers: int, log: str, summary: str, plot: str | None) -> int:
    formulas = load_formulas(path)
    cs = cfg.load_cs()
    print("⚖️  JUSTIFICATION LOGIC - BATCH PROVING")
    print("=" * 60)
    results = prove_batch(formulas, cfg.logic, cs, cfg.budget, workers=1 if cfg.deterministic else workers,
                          log_file=log)
    df = summarise(results, summary)
    if df is None:
        return EX_OK
    if plot:
        from .graphs import plot_verdicts
        plot_verdicts(summary, plot)
    return EX_DEFECT if not disagreements(df).empty else EX_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--logic", default="J", help="Logic by axiom list, e.g. J, JT4, JD45, LP (default J)")
    p.add_argument("--cs", help="Constant specification file")
    p.add_argument("--close-cs", action="store_true", help="Add missing entries to make the CS downward closed")
    p.add_argument("--var", action="append", default=[], help="Declare a justification variable name")
    p.add_argument("--const", action="append", default=[], help="Declare a justification constant name")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--deterministic", action="store_true",
                   help="One batch worker and output without timings")
    p.add_argument("--size-factor", type=int, default=config.SIZE_FACTOR)
    p.add_argument("--max-nodes", type=int, default=config.MAX_NODES)
    p.add_argument("--max-depth", type=int, default=config.MAX_DEPTH)
    p.add_argument("--instantiation-bound", type=int, default=config.INSTANTIATION_BOUND)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jtableau", description="Tableau provers and cut elimination for justification logics")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level (default from JTAB_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prove", help="Search for a proof or a countermodel")
    _common(p)
    p.add_argument("formula")
    p.add_argument("--calculus", choices=("jl", "jlt"), default="jl")
    p.add_argument("--allow-cut", action="store_true", help="JLT search that may fall back to CUT")
    p.add_argument("--save", help="Write the final tableau as JSON")
    p.add_argument("--log", help="Append the result to a CSV log")

    p = sub.add_parser("check", help="Verify a proof JSON file")
    p.add_argument("proof")

    p = sub.add_parser("validate-model", help="Check that a model JSON file refutes a formula")
    _common(p)
    p.add_argument("model")
    p.add_argument("formula")

    p = sub.add_parser("subformulas", help="List or explain JL_CS-subformulas of a root")
    _common(p)
    p.add_argument("formula")
    p.add_argument("--bound", type=int, help=f"Size bound (default: root size + {config.LISTING_SLACK})")
    p.add_argument("--weak", action="store_true", help="Include negations")
    p.add_argument("--explain", metavar="FORMULA", nargs="?", const="",
                   help="Show the derivation of one candidate; without FORMULA (given last) trace every member")

    p = sub.add_parser("translate", help="Translate a Hilbert proof into a tableau with cuts")
    _common(p)
    p.add_argument("hilbert")
    p.add_argument("--out", help="Write the tableau as JSON")

    p = sub.add_parser("cutelim", help="Eliminate the cuts of a proof JSON file")
    _common(p)
    p.add_argument("proof")
    p.add_argument("--out", help="Write the cut-free proof as JSON")
    p.add_argument("--trace", help="Write the rewrite steps as CSV")
    p.add_argument("--plot", help="Save a plot of the measures per step")

    p = sub.add_parser("pipeline", help="Hilbert proof to cut-free analytic tableau, checked at every stage")
    _common(p)
    p.add_argument("hilbert")
    p.add_argument("--out", help="Write the cut-free proof as JSON")

    p = sub.add_parser("batch", help="Prove a list of formulas with both calculi")
    _common(p)
    p.add_argument("formulas")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--log", default=config.RESULTS_LOG)
    p.add_argument("--summary", default=config.SUMMARY_FILE)
    p.add_argument("--plot", help="Save a verdict breakdown plot")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        if args.command == "check":
            return cmd_check(args.proof)
        cfg = RunConfig.from_args(args)
        match args.command:
            case "prove":
                return cmd_prove(cfg, args.formula, args.save, args.log)
            case "validate-model":
                return cmd_validate_model(cfg, args.model, args.formula)
            case "subformulas":
                return cmd_subformulas(cfg, args.formula, args.bound, args.weak, args.explain)
            case "translate":
                return cmd_translate(cfg, args.hilbert, args.out)
            case "cutelim":
                return cmd_cutelim(cfg, args.proof, args.out, args.trace, args.plot)
            case "pipeline":
                return cmd_pipeline(cfg, args.hilbert, args.out)
            case "batch":
                return cmd_batch(cfg, args.formulas, args.workers, args.log, args.summary, args.plot)
    except (UsageError, *_USAGE_ERRORS) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EX_USAGE
    except JTableauError as e:
        LOGGER.debug("command failed", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EX_DEFECT
    return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
