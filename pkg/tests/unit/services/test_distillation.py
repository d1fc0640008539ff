"""Tests for the distillation pipeline."""

import json
from pathlib import Path

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig, ModelConfig, TrainingConfig
from tiedmulti.core.kinds import ChildKind
from tiedmulti.core.models import SentencePair
from tiedmulti.model.transformer import init_parameters
from tiedmulti.services.distillation import (
    PSEUDO_CORPUS,
    REPORT_JSON,
    run_distillation_pipeline,
    variant_name,
)

PAIRS = [([4, 5, 6], [6, 5, 4]), ([7, 8], [8, 7]), ([9, 10], [10, 9]), ([11], [11])]
TEST = [SentencePair("a b c", "c b a"), SentencePair("d e", "e d")]


def test_four_way_comparison(
    tiny_config: ModelConfig,
    quick_training: TrainingConfig,
    short_beam: BeamConfig,
    tmp_path: Path,
) -> None:
    parent = init_parameters(tiny_config.with_depth(2, 2), seed=4)
    report = run_distillation_pipeline(
        parent,
        PAIRS,
        TEST,
        Vocabulary.for_symbols(8),
        [ChildKind.TIED, ChildKind.TIED_RS],
        quick_training,
        short_beam,
        tmp_path,
    )
    assert report.pseudo_pairs == len(PAIRS)
    assert report.skipped == 0
    assert [v.variant for v in report.variants] == [
        "tied",
        "tied+distill",
        "tied-rs",
        "tied-rs+distill",
    ]
    for v in report.variants:
        assert len(v.greedy_bleu) == len(v.beam_bleu) == len(v.gap) == 4
        assert v.gap == [g - b for g, b in zip(v.greedy_bleu, v.beam_bleu, strict=True)]
    assert len((tmp_path / PSEUDO_CORPUS).read_text(encoding="utf-8").splitlines()) == 4
    saved = json.loads((tmp_path / REPORT_JSON).read_text(encoding="utf-8"))
    assert len(saved["variants"]) == 4
    assert (tmp_path / "tied-rs+distill" / "averaged.ckpt").exists()


def test_without_distillation_trains_plain_children(
    tiny_config: ModelConfig,
    quick_training: TrainingConfig,
    short_beam: BeamConfig,
    tmp_path: Path,
) -> None:
    parent = init_parameters(tiny_config.with_depth(1, 2), seed=4)
    report = run_distillation_pipeline(
        parent,
        PAIRS,
        TEST,
        Vocabulary.for_symbols(8),
        [ChildKind.TIED_RS],
        quick_training,
        short_beam,
        tmp_path,
        distill=False,
    )
    assert report.pseudo_pairs == 0
    assert [v.variant for v in report.variants] == [variant_name(ChildKind.TIED_RS, False)]
    assert not (tmp_path / PSEUDO_CORPUS).exists()
