"""Tests for decoding with the classifier's choice."""

import json
from pathlib import Path

import pytest

from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import BeamConfig, SelectorConfig
from tiedmulti.core.kinds import DecodeMode
from tiedmulti.core.models import LayerCombination, SentencePair
from tiedmulti.decoding.timed import read_decode_log
from tiedmulti.model.transformer import Parameters, init_parameters
from tiedmulti.selector.model import SelectorParameters, selector_for_model
from tiedmulti.services.cost_benefit import DECODE_DIR, run_cost_benefit
from tiedmulti.services.selection import REPORT_JSON, SELECTED_LOG, choose, run_select_decode
from tiedmulti.utils.exceptions import CombinationError

VOCAB = Vocabulary.for_symbols(8)
TEST = [SentencePair("a b c", "c b a"), SentencePair("d e", "e d"), SentencePair("f", "f")]
CFG = BeamConfig(beam=2, alpha=0.6, max_len=5)
SMALL = SelectorConfig(layers=1, heads=2, d_ff=16)


def _constant_selector(model: Parameters, favourite: LayerCombination | None) -> SelectorParameters:
    """A classifier whose output ignores the input: 0.5 everywhere, or near 1 on `favourite`."""
    selector = selector_for_model(SMALL, model)
    selector.output.weight.data[...] = 0.0
    selector.output.bias.data[...] = 0.0
    if favourite is not None:
        selector.output.bias.data[favourite.index(model.config.dec_layers)] = 6.0
    return selector


def test_choose_reports_backoff(tiny_params: Parameters) -> None:
    selector = _constant_selector(tiny_params, None)
    assert choose(selector, [4, 5], 0.6) == (LayerCombination(3, 3), True)
    assert choose(selector, [4, 5], 0.5) == (LayerCombination(1, 1), False)


def test_every_sentence_uses_the_predicted_combination(
    tiny_params: Parameters, tmp_path: Path
) -> None:
    favourite = LayerCombination(1, 2)
    selector = _constant_selector(tiny_params, favourite)
    report = run_select_decode(
        tiny_params, selector, TEST, VOCAB, DecodeMode.GREEDY, CFG, 0.5, tmp_path
    )
    assert report.choices[favourite.index(3)] == len(TEST)
    assert report.backoffs == 0
    assert report.oracle_bleu is None
    records = read_decode_log(tmp_path / SELECTED_LOG)
    assert {r.combination for r in records} == {favourite}
    assert json.loads((tmp_path / REPORT_JSON).read_text())["sentences"] == len(TEST)


def test_backoff_matches_baseline(tiny_params: Parameters, tmp_path: Path) -> None:
    selector = _constant_selector(tiny_params, None)
    report = run_select_decode(
        tiny_params, selector, TEST, VOCAB, DecodeMode.GREEDY, CFG, 0.9, tmp_path
    )
    assert report.backoffs == len(TEST)
    assert report.choices[-1] == len(TEST)
    assert report.selected_bleu == pytest.approx(report.baseline_bleu)


def test_oracle_from_cost_benefit_logs(tiny_params: Parameters, tmp_path: Path) -> None:
    costs = run_cost_benefit(tiny_params, TEST, VOCAB, DecodeMode.GREEDY, CFG, tmp_path / "cb")
    report = run_select_decode(
        tiny_params,
        _constant_selector(tiny_params, None),
        TEST,
        VOCAB,
        DecodeMode.GREEDY,
        CFG,
        0.5,
        tmp_path / "sel",
        decode_dir=tmp_path / "cb" / DECODE_DIR,
    )
    assert report.oracle_bleu is not None and report.oracle_seconds is not None
    assert report.baseline_bleu == pytest.approx(costs.rows[-1].bleu)


def test_selector_must_match_model(tiny_params: Parameters, tmp_path: Path) -> None:
    other = init_parameters(tiny_params.config.with_depth(2, 2))
    with pytest.raises(CombinationError):
        run_select_decode(
            tiny_params,
            selector_for_model(SMALL, other),
            TEST,
            VOCAB,
            DecodeMode.GREEDY,
            CFG,
            0.5,
            tmp_path,
        )
