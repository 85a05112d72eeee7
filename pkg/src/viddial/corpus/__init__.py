"""Corpus construction from chat logs and frame features."""
from viddial.corpus.bleu import compute_bleu4
from viddial.corpus.chatlog import USER_TAG, anonymize, parse_chat_log, refers_outside
from viddial.corpus.features import FrameStore, read_features, write_features
from viddial.corpus.pipeline import (
    build_dataset,
    build_triples,
    check_no_overlap,
    dumps_triples,
    read_triples,
    segment_windows,
    select_response,
    top_frequent_utterances,
    write_triples,
)
from viddial.corpus.stats import StatsReport, corpus_stats
from viddial.corpus.tokenize import tokenize
from viddial.corpus.types import (
    BLEU_MATCH,
    FALLBACK_FIRST,
    DialogueTriple,
    PipelineConfig,
    Utterance,
    VideoSegment,
)

__all__ = [
    "BLEU_MATCH", "FALLBACK_FIRST", "DialogueTriple", "FrameStore", "PipelineConfig", "StatsReport",
    "USER_TAG", "Utterance", "VideoSegment", "anonymize", "build_dataset", "build_triples",
    "check_no_overlap", "compute_bleu4", "corpus_stats", "dumps_triples", "parse_chat_log",
    "read_features", "read_triples", "refers_outside", "segment_windows", "select_response",
    "tokenize", "top_frequent_utterances", "write_features", "write_triples",
]
