"""Greedy/beam decoding at any layer combination."""

from tiedmulti.decoding.search import beam_decode, beam_search, greedy_decode, length_penalty
from tiedmulti.decoding.timed import decode_corpus_timed, read_decode_log, write_decode_log

__all__ = [
    "beam_decode",
    "beam_search",
    "decode_corpus_timed",
    "greedy_decode",
    "length_penalty",
    "read_decode_log",
    "write_decode_log",
]
