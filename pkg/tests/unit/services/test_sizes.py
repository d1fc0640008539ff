"""Tests for the model size comparison."""

import pytest

from tiedmulti.config.experiment import ModelConfig
from tiedmulti.model.transformer import CHECKPOINT_SLOTS, param_count
from tiedmulti.services.sizes import TIED, TIED_RS, report_model_sizes, size_table


def test_base_configuration() -> None:
    report = report_model_sizes(ModelConfig.transformer_base())
    tied, tied_rs = report.row(TIED), report.row(TIED_RS)
    assert tied.learnable == 60_524_544
    assert tied.checkpoint_variables == CHECKPOINT_SLOTS * tied.learnable
    assert tied.relative == 1.0
    assert tied_rs.relative == pytest.approx(0.40, rel=0.05)
    assert report.rs_fewer_than_vanilla_sum == pytest.approx(25.16, rel=0.03)
    assert report.rs_fewer_than_rs_sum == pytest.approx(14.33, rel=0.03)


def test_rows_sum_their_members(tiny_config: ModelConfig) -> None:
    report = report_model_sizes(tiny_config)
    vanilla = report.rows[2]
    assert vanilla.members == 9
    assert vanilla.learnable == sum(
        param_count(tiny_config.with_depth(n, m)) for n in (1, 2, 3) for m in (1, 2, 3)
    )
    assert report.rows[1].learnable < report.rows[0].learnable
    assert report.rows[3].learnable < vanilla.learnable


def test_recurrent_flag_of_input_is_ignored(tiny_config: ModelConfig) -> None:
    rs_input = tiny_config.model_copy(update={"recurrent_stacking": True})
    assert report_model_sizes(rs_input) == report_model_sizes(tiny_config)


def test_table_has_a_row_per_group(tiny_config: ModelConfig) -> None:
    table = size_table(report_model_sizes(tiny_config))
    assert [row[0] for row in table.rows] == [TIED, TIED_RS, "9 vanilla", "9 vanilla RS"]
