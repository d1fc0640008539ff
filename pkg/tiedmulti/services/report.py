"""Run-level report assembled from the JSON artefacts under a run directory.

Quality figures (BLEU, oracle histograms, sizes, losses) go to `report.*`;
wall-clock figures go to `timing.*`, so the quality report of a seeded
run is byte-identical across reruns.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from tiedmulti.adapters.reports.tables import ReportTable, render_csv, write_text
from tiedmulti.core.models import (
    CostBenefitReport,
    DistillationReport,
    OracleReport,
    SelectionReport,
    SizeReport,
)
from tiedmulti.services import cost_benefit, distillation, oracle, selection
from tiedmulti.services.sizes import SIZES_JSON, size_table
from tiedmulti.services.training import find_summaries, training_time_report
from tiedmulti.utils.exceptions import CorpusError

REPORT_TEXT = "report.txt"
REPORT_CSV = "report.csv"
TIMING_TEXT = "timing.txt"
TIMING_CSV = "timing.csv"

_ReportT = TypeVar("_ReportT", bound=BaseModel)


@dataclass
class RunReport:
    quality: list[ReportTable] = field(default_factory=list)
    timing: list[ReportTable] = field(default_factory=list)


def _load(path: Path, model: type[_ReportT]) -> _ReportT:
    try:
        return model.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise CorpusError(f"cannot read {model.__name__} from {path}: {e}") from e


def _each(root: Path, name: str, model: type[_ReportT]) -> list[tuple[str, _ReportT]]:
    return [(str(p.relative_to(root).parent), _load(p, model)) for p in sorted(root.rglob(name))]


def _cost_benefit(where: str, r: CostBenefitReport, out: RunReport) -> None:
    quality = ReportTable(
        title=f"{where}: BLEU by combination ({r.model_kind}, {r.mode})",
        headers=["n", "m", "bleu", "vanilla_bleu", "failures"],
    )
    timing = ReportTable(
        title=f"{where}: decoding seconds ({r.model_kind}, {r.mode})",
        headers=["n", "m", "total_s", "mean_s", "vanilla_total_s"],
    )
    for row in r.rows:
        quality.add_row(
            row.n,
            row.m,
            f"{row.bleu:.2f}",
            "" if row.vanilla_bleu is None else f"{row.vanilla_bleu:.2f}",
            row.failures,
        )
        timing.add_row(
            row.n,
            row.m,
            f"{row.total_seconds:.3f}",
            f"{row.mean_seconds:.6f}",
            "" if row.vanilla_seconds is None else f"{row.vanilla_seconds:.3f}",
        )
    out.quality.append(quality)
    out.timing.append(timing)


def _oracle(where: str, r: OracleReport, out: RunReport) -> None:
    histogram = oracle.histogram_table(r)
    histogram.title = f"{where}: {histogram.title}"
    full = f"{r.enc_layers},{r.dec_layers}"
    quality = ReportTable(
        title=f"{where}: oracle BLEU ({r.family})", headers=["selection", "bleu"]
    )
    quality.add_row("oracle", f"{r.oracle_bleu:.2f}")
    quality.add_row(full, f"{r.baseline_bleu:.2f}")
    timing = ReportTable(
        title=f"{where}: oracle seconds ({r.family})", headers=["selection", "total_s"]
    )
    timing.add_row("oracle", f"{r.oracle_seconds:.3f}")
    timing.add_row(full, f"{r.baseline_seconds:.3f}")
    out.quality += [histogram, quality]
    out.timing.append(timing)


def _selection(where: str, r: SelectionReport, out: RunReport) -> None:
    quality = ReportTable(title=f"{where}: selector BLEU", headers=["selection", "bleu"])
    quality.add_row("selector", f"{r.selected_bleu:.2f}")
    quality.add_row("baseline", f"{r.baseline_bleu:.2f}")
    if r.oracle_bleu is not None:
        quality.add_row("oracle", f"{r.oracle_bleu:.2f}")
    quality.add_row("back-offs", r.backoffs)
    timing = ReportTable(title=f"{where}: selector seconds", headers=["selection", "total_s"])
    timing.add_row("selector", f"{r.selected_seconds + r.selector_seconds:.3f}")
    timing.add_row("classifier only", f"{r.selector_seconds:.3f}")
    timing.add_row("baseline", f"{r.baseline_seconds:.3f}")
    if r.oracle_seconds is not None:
        timing.add_row("oracle", f"{r.oracle_seconds:.3f}")
    out.quality.append(quality)
    out.timing.append(timing)


def _distillation(where: str, r: DistillationReport, out: RunReport) -> None:
    table = distillation.distillation_table(r)
    table.title = f"{where}: {table.title}"
    out.quality.append(table)


def _sizes(where: str, r: SizeReport, out: RunReport) -> None:
    table = size_table(r)
    table.title = f"{where}: {table.title}"
    out.quality.append(table)


def _training(root: Path, out: RunReport) -> None:
    summaries = find_summaries(root)
    if not summaries:
        return
    losses = ReportTable(title="Training runs", headers=["run", "kind", "steps", "final_loss"])
    seconds = ReportTable(title="Training seconds", headers=["run", "kind", "seconds"])
    for path, s in summaries:
        where = str(path.relative_to(root).parent)
        losses.add_row(where, s.kind, s.steps, f"{s.final_loss:.6f}")
        seconds.add_row(where, s.kind, f"{s.seconds:.3f}")
    out.quality.append(losses)
    out.timing.append(seconds)
    ratio = training_time_report(summaries)
    if ratio is not None:
        table = ReportTable(
            title="Training time relative to the deepest vanilla model",
            headers=["models", "seconds", "ratio"],
        )
        table.add_row("vanilla (N,M)", f"{ratio.reference_seconds:.3f}", "1.00")
        table.add_row(
            f"{ratio.vanilla_grid_models} vanilla",
            f"{ratio.vanilla_grid_seconds:.3f}",
            f"{ratio.vanilla_grid_ratio:.2f}",
        )
        if ratio.tied_seconds is not None and ratio.tied_ratio is not None:
            table.add_row("tied-multi", f"{ratio.tied_seconds:.3f}", f"{ratio.tied_ratio:.2f}")
        out.timing.append(table)


def collect_report(run_dir: Path) -> RunReport:
    """Every known artefact under `run_dir`, in sorted path order."""
    if not run_dir.is_dir():
        raise CorpusError(f"run directory not found: {run_dir}")
    out = RunReport()
    for where, cb in _each(run_dir, cost_benefit.REPORT_JSON, CostBenefitReport):
        _cost_benefit(where, cb, out)
    for where, orc in _each(run_dir, oracle.REPORT_JSON, OracleReport):
        _oracle(where, orc, out)
    for where, sel in _each(run_dir, selection.REPORT_JSON, SelectionReport):
        _selection(where, sel, out)
    for where, dist in _each(run_dir, distillation.REPORT_JSON, DistillationReport):
        _distillation(where, dist, out)
    for where, sizes in _each(run_dir, SIZES_JSON, SizeReport):
        _sizes(where, sizes, out)
    _training(run_dir, out)
    return out


def long_csv(tables: Sequence[ReportTable]) -> str:
    """All tables in one CSV: table, row, column, value."""
    flat = ReportTable(title="", headers=["table", "row", "column", "value"])
    for table in tables:
        for i, row in enumerate(table.rows):
            for header, value in zip(table.headers, row, strict=True):
                flat.add_row(table.title, i, header, value)
    return render_csv(flat)


def write_report(run_dir: Path, out_dir: Path) -> list[Path]:
    report = collect_report(run_dir)
    if not report.quality and not report.timing:
        raise CorpusError(f"no reports found under {run_dir}")
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [write_text(out_dir / REPORT_TEXT, report.quality)]
    (out_dir / REPORT_CSV).write_text(long_csv(report.quality), encoding="utf-8")
    written.append(out_dir / REPORT_CSV)
    if report.timing:
        written.append(write_text(out_dir / TIMING_TEXT, report.timing))
        (out_dir / TIMING_CSV).write_text(long_csv(report.timing), encoding="utf-8")
        written.append(out_dir / TIMING_CSV)
    return written
