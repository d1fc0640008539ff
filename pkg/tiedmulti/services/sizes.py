"""Parameter-count comparison of tied, recurrently stacked and per-combination models."""

from collections.abc import Sequence

from tiedmulti.adapters.reports.tables import ReportTable
from tiedmulti.config.experiment import ModelConfig
from tiedmulti.core.models import SizeReport, SizeRow, all_combinations
from tiedmulti.model.transformer import checkpoint_variable_count, param_count

TIED = "tied-multi"
TIED_RS = "tied-multi RS"
SIZES_JSON = "sizes.json"


def size_rows(
    entries: Sequence[tuple[str, Sequence[ModelConfig]]], reference: ModelConfig
) -> list[SizeRow]:
    """One row per labelled group of configurations, their counts summed."""
    base = param_count(reference)
    rows = []
    for label, configs in entries:
        learnable = sum(param_count(c) for c in configs)
        rows.append(
            SizeRow(
                model=label,
                members=len(configs),
                learnable=learnable,
                checkpoint_variables=sum(checkpoint_variable_count(c) for c in configs),
                relative=learnable / base,
            )
        )
    return rows


def report_model_sizes(config: ModelConfig) -> SizeReport:
    """
    Sizes relative to the tied-multi (N, M) model.

    Rows: the tied-multi model, its recurrently stacked variant, the sum
    of the K separately trained vanilla models and the sum of K
    recurrently stacked vanilla models.
    """
    tied = config.model_copy(update={"recurrent_stacking": False})
    tied_rs = config.model_copy(update={"recurrent_stacking": True})
    combos = list(all_combinations(config.enc_layers, config.dec_layers))
    vanilla = [tied.with_depth(c.n, c.m) for c in combos]
    vanilla_rs = [tied_rs.with_depth(c.n, c.m) for c in combos]
    K = len(combos)
    rows = size_rows(
        [
            (TIED, [tied]),
            (TIED_RS, [tied_rs]),
            (f"{K} vanilla", vanilla),
            (f"{K} vanilla RS", vanilla_rs),
        ],
        tied,
    )
    rs_count = param_count(tied_rs)
    return SizeReport(
        reference=TIED,
        rows=rows,
        rs_fewer_than_vanilla_sum=rows[2].learnable / rs_count,
        rs_fewer_than_rs_sum=rows[3].learnable / rs_count,
    )


def size_table(report: SizeReport) -> ReportTable:
    table = ReportTable(
        title=f"Model sizes relative to {report.reference}",
        headers=["model", "members", "learnable", "checkpoint_variables", "relative"],
    )
    for r in report.rows:
        table.add_row(r.model, r.members, r.learnable, r.checkpoint_variables, f"{r.relative:.2f}")
    return table
