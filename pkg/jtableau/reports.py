"""
Batch proving and CSV reports.

Proves every formula of a list file with both calculi, appends one row per
attempt to a CSV log and prints a summary with verdict breakdowns.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Final, Iterable, Sequence

import pandas as pd

from . import config
from .config import Budget
from .cutelim import ElimStep, cut_count, eliminate_all
from .errors import JTableauError, ParseError
from .logics import ConstantSpec, LogicId
from .search import Open, Unknown, Verdict, prove
from .syntax import Formula, parse_formula, print_formula, read_source
from .tableau import Calculus, Rule, Tableau, rules_used

LOGGER: Final = logging.getLogger(__name__)

STATUS_ICONS: Final = {"Proved": "🟢", "Unknown": "🟡", "Open": "🔴"}
BATCH_CALCULI: Final = (Calculus.JL, Calculus.JLT)


def load_formulas(path: str | Path) -> list[Formula]:
    """One formula per line; `#` comments and var/const declarations allowed."""
    lines, variables, constants = read_source(Path(path).read_text(encoding="utf-8"))
    formulas = []
    for line_no, text in lines:
        try:
            formulas.append(parse_formula(text, variables, constants))
        except ParseError as e:
            raise ParseError(f"{path}: {e}", line_no, e.column, text) from None
    return formulas


@dataclass(frozen=True)
class BatchResult:
    formula: Formula
    logic: LogicId
    calculus: Calculus
    verdict: str
    nodes: int = 0
    rules: str = ""
    pb_count: int = 0
    elapsed: float = 0.0
    countermodel: str = ""
    error: str = ""

    def row(self) -> dict:
        return {
            'Timestamp': datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
            'Formula': print_formula(self.formula),
            'Logic': self.logic.name,
            'Calculus': str(self.calculus),
            'Verdict': self.verdict,
            'Nodes': self.nodes,
            'Rules': self.rules,
            'PB_Count': self.pb_count,
            'Elapsed_s': round(self.elapsed, 4),
            'Countermodel': self.countermodel,
            'Error': self.error,
        }


def _describe_rules(t: Tableau | None) -> tuple[str, int]:
    if t is None:
        return "", 0
    used = rules_used(t)
    return " ".join(f"{rule}x{n}" for rule, n in sorted(used.items())), used.get(Rule.PB, 0)


def summarise_verdict(formula: Formula, logic: LogicId, calculus: Calculus, verdict: Verdict) -> BatchResult:
    rules, pb_count = _describe_rules(verdict.tableau)
    match verdict:
        case Open():
            countermodel = "validated"
        case Unknown(reason=reason):
            countermodel = reason
        case _:
            countermodel = ""
    return BatchResult(formula, logic, calculus, verdict.status, verdict.stats.nodes, rules, pb_count,
                       verdict.stats.elapsed, countermodel)


def _prove_item(item: tuple[Formula, LogicId, ConstantSpec, Calculus, Budget]) -> BatchResult:
    formula, logic, cs, calculus, budget = item
    try:
        verdict = prove(formula, logic, cs, calculus, budget)
    except JTableauError as e:
        return BatchResult(formula, logic, calculus, "Error", error=str(e))
    return summarise_verdict(formula, logic, calculus, verdict)


def log_result(result: BatchResult, log_file: str | Path = config.RESULTS_LOG) -> str | Path:
    """Append one result row to the CSV log, writing the header for a new file."""
    log_df = pd.DataFrame([result.row()])
    file_exists = os.path.exists(log_file)
    log_df.to_csv(log_file, mode='a', index=False, header=not file_exists)
    return log_file


def prove_batch(formulas: Sequence[Formula], logic: LogicId, cs: ConstantSpec, budget: Budget | None = None,
                calculi: Iterable[Calculus] = BATCH_CALCULI, workers: int = 1,
                log_file: str | Path | None = config.RESULTS_LOG) -> list[BatchResult]:
    """Prove each formula with each calculus; workers > 1 spreads the attempts over processes."""
    budget = budget or Budget.from_env()
    items = [(f, logic, cs, c, budget) for f in formulas for c in calculi]
    if not items:
        print("No formulas to prove")
        return []

    print(f"Proving {len(formulas)} formulas in {logic.name} ({len(items)} attempts)...")
    print("=" * 60)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_prove_item, items))
    else:
        outcomes = map(_prove_item, items)

    results = []
    for i, result in enumerate(outcomes, 1):
        print(f"{i}/{len(items)} [{result.calculus}] {print_formula(result.formula, unicode=True)}")
        if result.verdict == "Error":
            print(f"   ❌ Error: {result.error}")
        else:
            icon = STATUS_ICONS[result.verdict]
            print(f"   {icon} {result.verdict} ({result.nodes} nodes, {result.elapsed:.3f}s)")
        results.append(result)
        if log_file is not None:
            log_result(result, log_file)

    print("=" * 60)
    print(f"✅ Finished {len(results)} attempts")
    if log_file is not None:
        print(f"📊 Results saved to: {log_file}")
    return results


def disagreements(df: pd.DataFrame) -> pd.DataFrame:
    """Formulas proved by one calculus and refuted with a countermodel by the other."""
    verdicts = df.pivot_table(index=['Logic', 'Formula'], columns='Calculus', values='Verdict',
                              aggfunc='first')
    flagged = verdicts.apply(lambda row: {'Proved', 'Open'} <= set(row.dropna()), axis=1)
    return verdicts[flagged].reset_index()


def summarise(results: Sequence[BatchResult], output_file: str | Path = config.SUMMARY_FILE) -> pd.DataFrame | None:
    """Write the summary CSV and print verdict breakdowns."""
    if not results:
        print("No results to summarize")
        return None

    df = pd.DataFrame([r.row() for r in results]).drop(columns=['Timestamp'])
    df = df.sort_values(['Logic', 'Formula', 'Calculus'])
    df.to_csv(output_file, index=False)

    print("\n📋 SUMMARY STATISTICS:")
    print("=" * 40)

    print("Verdict Breakdown:")
    for verdict, count in df['Verdict'].value_counts().items():
        print(f"  {STATUS_ICONS.get(verdict, '❌')} {verdict}: {count}")

    print("\nBy Logic and Calculus:")
    table = df.groupby(['Logic', 'Calculus'])['Verdict'].value_counts().unstack(fill_value=0)
    print(table.to_string())

    proved = df[df['Verdict'] == 'Proved']
    if not proved.empty:
        print(f"\nProof Sizes ({len(proved)} proofs):")
        print(f"  Nodes: {proved['Nodes'].min()} - {proved['Nodes'].max()} "
              f"(average {proved['Nodes'].mean():.1f})")
        print(f"  PB applications: {proved['PB_Count'].sum()}")
        print(f"  Total time: {df['Elapsed_s'].sum():.3f}s")

    conflicts = disagreements(df)
    if not conflicts.empty:
        print(f"\n⚠️  DISAGREEMENTS ({len(conflicts)} formulas):")
        for _, row in conflicts.iterrows():
            print(f"  {row['Logic']}: {row['Formula']}")
        LOGGER.error("%d formulas received conflicting verdicts", len(conflicts))

    print(f"\n📄 Summary saved to: {output_file}")
    return df


def load_results(log_file: str | Path = config.RESULTS_LOG) -> pd.DataFrame | None:
    if not os.path.exists(log_file):
        print(f"❌ Log file not found: {log_file}")
        return None
    df = pd.read_csv(log_file)
    df['Timestamp'] = pd.to_datetime(df['Timestamp'])
    return df


# ---------------------------------------------------------------------------
# Cut-elimination traces
# ---------------------------------------------------------------------------

def trace_frame(steps: Sequence[ElimStep], cuts_left: Sequence[int] = (), nodes: Sequence[int] = ()) -> pd.DataFrame:
    """One row per rewrite step with the measures of the eliminated cut."""
    rows = []
    for i, step in enumerate(steps, 1):
        rows.append({
            'Step': i,
            'Case': step.case,
            'Sub_Case': step.sub_case,
            'Node': step.site.node_id,
            'Cut_Formula': print_formula(step.site.cut_formula),
            'Rank': step.site.rank,
            'Weight': step.site.weight,
            'Claims': "; ".join(c.relation for c in step.claims),
            'Cuts_Left': cuts_left[i - 1] if i <= len(cuts_left) else pd.NA,
            'Nodes': nodes[i - 1] if i <= len(nodes) else pd.NA,
        })
    columns = ['Step', 'Case', 'Sub_Case', 'Node', 'Cut_Formula', 'Rank', 'Weight', 'Claims', 'Cuts_Left', 'Nodes']
    return pd.DataFrame(rows, columns=columns)


def eliminate_with_trace(t: Tableau) -> tuple[Tableau, pd.DataFrame]:
    """Run cut elimination and record the live cut count and size after every step."""
    steps: list[ElimStep] = []
    cuts_left: list[int] = []
    nodes: list[int] = []

    def record(current: Tableau, _step: ElimStep) -> None:
        cuts_left.append(cut_count(current))
        nodes.append(current.size)

    result = eliminate_all(t, trace=steps, on_step=record)
    return result, trace_frame(steps, cuts_left, nodes)
