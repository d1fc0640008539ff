"""Synthetic corpus generation and loading of encoded corpora."""

from dataclasses import dataclass
from pathlib import Path

from tiedmulti.adapters.data.corpus import encode_pairs, read_corpus, write_corpus
from tiedmulti.adapters.data.toy import generate_toy_corpus
from tiedmulti.adapters.text.vocabulary import Vocabulary
from tiedmulti.config.experiment import ToyTaskSpec
from tiedmulti.core.models import SentencePair
from tiedmulti.training.batching import EncodedPair
from tiedmulti.utils.logger import logger

TRAIN_FILE = "train.tsv"
TEST_FILE = "test.tsv"
VOCAB_FILE = "vocab.txt"


@dataclass
class DataFiles:
    train: Path
    test: Path
    vocab: Path

    @classmethod
    def in_dir(cls, data_dir: Path) -> "DataFiles":
        return cls(
            train=data_dir / TRAIN_FILE, test=data_dir / TEST_FILE, vocab=data_dir / VOCAB_FILE
        )


def write_toy_data(spec: ToyTaskSpec, out_dir: Path) -> DataFiles:
    """Generate a toy task and write its train/test split and vocabulary."""
    corpus = generate_toy_corpus(spec)
    files = DataFiles.in_dir(out_dir)
    write_corpus(files.train, corpus.train)
    write_corpus(files.test, corpus.test)
    corpus.vocabulary.save(files.vocab)
    logger.info(
        f"Wrote {spec.task} task: {len(corpus.train)} train and {len(corpus.test)} test pairs "
        f"to {out_dir}"
    )
    return files


def find_vocabulary(corpus_path: Path, explicit: Path | None = None) -> Vocabulary:
    """The given vocabulary, or the one written next to the corpus by `write_toy_data`."""
    return Vocabulary.load(explicit or corpus_path.parent / VOCAB_FILE)


def load_encoded(
    corpus_path: Path, vocab: Vocabulary
) -> tuple[list[SentencePair], list[EncodedPair]]:
    pairs = read_corpus(corpus_path)
    return pairs, encode_pairs(pairs, vocab)
