"""Tests for core domain models and typed configurations."""

import pytest
from pydantic import ValidationError

from tiedmulti.config.experiment import BeamConfig, ModelConfig, ToyTaskSpec, TrainingConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import (
    CostBenefitReport,
    CostBenefitRow,
    LayerCombination,
    MultiLabelExample,
    all_combinations,
)
from tiedmulti.utils.exceptions import CombinationError


def test_combinations_are_row_major() -> None:
    combos = list(all_combinations(2, 3))
    assert [str(c) for c in combos] == ["1,1", "1,2", "1,3", "2,1", "2,2", "2,3"]
    for k, combo in enumerate(combos):
        assert combo.index(3) == k
        assert LayerCombination.from_index(k, 3) == combo


@pytest.mark.parametrize(("text", "expected"), [("3,2", (3, 2)), (" 1 , 6 ", (1, 6))])
def test_parse_combination(text: str, expected: tuple[int, int]) -> None:
    combo = LayerCombination.parse(text)
    assert (combo.n, combo.m) == expected


@pytest.mark.parametrize("text", ["3", "3,2,1", "a,b", "-1,2", ""])
def test_parse_rejects_malformed_text(text: str) -> None:
    with pytest.raises(CombinationError):
        LayerCombination.parse(text)


def test_check_bounds() -> None:
    assert LayerCombination(2, 3).check(3, 3) == LayerCombination(2, 3)
    for bad in (LayerCombination(0, 1), LayerCombination(4, 1), LayerCombination(1, 4)):
        with pytest.raises(CombinationError):
            bad.check(3, 3)


def test_combinations_are_hashable() -> None:
    assert len({LayerCombination(1, 2), LayerCombination(1, 2), LayerCombination(2, 1)}) == 2


def test_example_needs_a_positive_label() -> None:
    with pytest.raises(ValueError):
        MultiLabelExample(tokens=[4], labels=[0, 0, 0])
    assert MultiLabelExample(tokens=[4], labels=[0, 1]).sample_weight == 1.0


def test_model_config_validation() -> None:
    config = ModelConfig(enc_layers=2, dec_layers=5)
    assert config.combinations == 10
    assert config.with_depth(1, 1).d_model == config.d_model
    with pytest.raises(ValidationError):
        ModelConfig(d_model=30, heads=4)
    with pytest.raises(ValidationError):
        ModelConfig(enc_layers=0)
    with pytest.raises(ValidationError):
        config.enc_layers = 4  # type: ignore[misc]


def test_base_configuration() -> None:
    base = ModelConfig.transformer_base()
    assert (base.enc_layers, base.dec_layers, base.d_model, base.heads) == (6, 6, 512, 8)
    assert (base.d_ff, base.vocab) == (2048, 32_000)
    assert ModelConfig.transformer_base(recurrent_stacking=True).recurrent_stacking


def test_training_and_beam_bounds() -> None:
    with pytest.raises(ValidationError):
        TrainingConfig(steps=10, warmup_steps=20)
    with pytest.raises(ValidationError):
        TrainingConfig(label_smoothing=1.0)
    with pytest.raises(ValidationError):
        BeamConfig(beam=0)
    assert BeamConfig() == BeamConfig(beam=4, alpha=0.6, max_len=30)


def test_toy_spec_lengths() -> None:
    with pytest.raises(ValidationError):
        ToyTaskSpec(min_len=5, max_len=4)


def test_report_round_trip() -> None:
    report = CostBenefitReport(
        model_kind="tied-multi",
        checkpoint="x.ckpt",
        mode=DecodeMode.BEAM,
        enc_layers=1,
        dec_layers=1,
        rows=[
            CostBenefitRow(n=1, m=1, bleu=12.5, total_seconds=1.0, mean_seconds=0.5, sentences=2)
        ],
    )
    assert CostBenefitReport.model_validate_json(report.model_dump_json()) == report
    with pytest.raises(ValidationError):
        CostBenefitRow(n=1, m=1, bleu=120.0, total_seconds=1.0, mean_seconds=0.5, sentences=2)
