import io
import json
import logging
import os

import numpy as np
import pytest

from oracles import bleu_oracle
from conftest import write_chat
from viddial.corpus import (
    BLEU_MATCH,
    FALLBACK_FIRST,
    DialogueTriple,
    PipelineConfig,
    Utterance,
    VideoSegment,
    anonymize,
    build_dataset,
    build_triples,
    check_no_overlap,
    compute_bleu4,
    corpus_stats,
    dumps_triples,
    parse_chat_log,
    read_features,
    read_triples,
    segment_windows,
    select_response,
    tokenize,
    top_frequent_utterances,
    write_features,
    write_triples,
)
from viddial.corpus.chatlog import refers_outside
from viddial.corpus.features import frame_rows, read_header
from viddial.corpus.stats import stopwords
from viddial.errors import ConfigError, ContractError, DataError, ParseError


def U(speaker, time, text):
    return Utterance(speaker, time, tuple(text.split()))


# -- tokenizer and parsing -----------------------------------------------------
def test_tokenizer_golden(fixture_dir):
    with open(os.path.join(fixture_dir, "tokenizer_golden.json"), encoding="utf-8") as fh:
        cases = json.load(fh)
    for text, expected in cases:
        assert tokenize(text) == expected, text


def test_parse_basic_line():
    out = parse_chat_log(io.StringIO('{"time":1.0,"user":"a","text":"GOAL!!"}\n'))
    assert out == [Utterance("a", 1.0, ("goal", "!", "!"))]


def test_parse_drops_urls_and_empty_stream():
    lines = ['{"time":1,"user":"a","text":"see http://x.y now"}', '{"time":2,"user":"b","text":"ok"}']
    out = parse_chat_log(io.StringIO("\n".join(lines)))
    assert [u.speaker for u in out] == ["b"]
    assert parse_chat_log(io.StringIO("")) == []


def test_parse_error_names_line():
    text = '{"time":1,"user":"a","text":"x"}\n{not json}\n'
    with pytest.raises(ParseError) as err:
        parse_chat_log(io.StringIO(text))
    assert err.value.line_number == 2
    assert "line 2" in str(err.value)


def test_parse_sorts_out_of_order_with_warning(caplog):
    lines = [{"time": 5, "user": "a", "text": "b"}, {"time": 1, "user": "b", "text": "a"},
             {"time": 3, "user": "c", "text": "c"}]
    with caplog.at_level(logging.WARNING):
        out = parse_chat_log(io.StringIO("\n".join(json.dumps(x) for x in lines)))
    assert [u.time for u in out] == [1, 3, 5]
    assert any("1 out-of-order" in r.getMessage() for r in caplog.records)


@pytest.mark.parametrize("line", ['{"user":"a","text":"x"}', '[1,2]', '{"time":-1,"user":"a","text":"x"}',
                                  '{"time":1,"user":"a","text":5}'])
def test_parse_rejects_bad_records(line):
    with pytest.raises(ParseError):
        parse_chat_log(io.StringIO(line))


# -- anonymization ----------------------------------------------------------
def test_anonymize_cases():
    assert anonymize(U("x", 0, "nice @bob"), {"bob"}).tokens == ("nice", "<USER>")
    same = U("x", 0, "no mentions here")
    assert anonymize(same, {"bob"}) == same
    assert anonymize(U("x", 0, "bob bob"), {"bob"}).tokens == ("<USER>", "<USER>")
    assert anonymize(U("x", 0, "hi @stranger"), set()).tokens == ("hi", "<USER>")


def test_refers_outside():
    assert refers_outside(U("a", 0, "hey carl"), {"a", "b"}, {"a", "b", "carl"})
    assert refers_outside(U("a", 0, "@carl lol"), {"a"}, {"a", "carl"})
    assert not refers_outside(U("a", 0, "hey b"), {"a", "b"}, {"a", "b", "carl"})


# -- windows ------------------------------------------------------------------
def test_segment_windows_boundaries():
    assert segment_windows(60) == [((0, 20), (20, 30)), ((30, 50), (50, 60))]
    assert len(segment_windows(59.9)) == 1
    assert segment_windows(29) == []


def test_pipeline_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(context_secs=5, response_secs=10)
    with pytest.raises(ConfigError):
        PipelineConfig(bleu_threshold=0)
    with pytest.raises(ConfigError):
        PipelineConfig(bleu_smoothing="laplace")


# -- BLEU ------------------------------------------------------------------------
def test_bleu_against_frozen_oracle(fixture_dir):
    with open(os.path.join(fixture_dir, "bleu_cases.json"), encoding="utf-8") as fh:
        cases = json.load(fh)
    assert len(cases) == 50
    for c in cases:
        assert compute_bleu4(c["hyp"], c["ref"]) == pytest.approx(c["add_one"], abs=1e-12)
        assert compute_bleu4(c["hyp"], c["ref"], "none") == pytest.approx(c["none"], abs=1e-12)


def test_bleu_identical_sentences():
    s = "what a goal by messi".split()
    assert compute_bleu4(s, s, "none") == 1.0
    assert compute_bleu4(s, s) == pytest.approx(bleu_oracle(s, s))
    assert compute_bleu4(s, s) == pytest.approx(1.0)


def test_bleu_disjoint_is_small():
    # add-one smoothing floors a disjoint pair at prod(1/(L-n+2))^(1/4); below 0.05 needs L >= 21
    hyp = [f"h{i}" for i in range(22)]
    ref = [f"r{i}" for i in range(22)]
    value = compute_bleu4(hyp, ref)
    assert value == pytest.approx(bleu_oracle(hyp, ref))
    assert value < 0.05
    assert compute_bleu4(hyp, ref, "none") == 0.0


def test_bleu_brevity_penalty():
    ref = "what a goal by messi".split()
    assert compute_bleu4(ref[:3], ref) < compute_bleu4(ref, ref)


def test_bleu_empty_is_contract_error():
    with pytest.raises(ContractError):
        compute_bleu4([], ["a"])


# -- frequent utterances ---------------------------------------------------------
def test_top_frequent():
    assert top_frequent_utterances([U("a", 0, "lol")] * 5) == {"lol"}
    few = [U("a", i, f"w{i}") for i in range(5)]
    assert top_frequent_utterances(few) == {f"w{i}" for i in range(5)}
    tie = [U("a", 0, "b")] * 2 + [U("a", 0, "a")] * 2 + [U("a", 0, "c")] * 3
    assert top_frequent_utterances(tie, n=2) == {"c", "a"}


# -- response selection ---------------------------------------------------------
def test_select_echo():
    window = [U("x", 20, "goal goal goal"), U("y", 21, "nice"), U("z", 22, "goal goal goal")]
    assert select_response(window, set()) == (("goal", "goal", "goal"), BLEU_MATCH)


def test_select_fallback_and_empty():
    window = [U("x", 20, "first thing"), U("y", 21, "entirely unrelated words here")]
    assert select_response(window, set()) == (("first", "thing"), FALLBACK_FIRST)
    assert select_response([], set()) is None


def test_select_prefers_non_frequent():
    window = [U("a", 20, "lol lol lol"), U("b", 21, "lol lol lol"), U("c", 22, "great save by him"),
              U("d", 23, "great save by him")]
    assert select_response(window, {"lol lol lol"})[0] == ("great", "save", "by", "him")


def test_select_frequent_only_in_second_pass():
    window = [U("a", 20, "something new"), U("b", 21, "lol lol lol"), U("c", 22, "lol lol lol")]
    assert select_response(window, {"lol lol lol"}) == (("lol", "lol", "lol"), BLEU_MATCH)


# -- 60-second fixture -----------------------------------------------------------
def sixty_second_log(context_counts=(4, 4)):
    utts = []
    for k, n in enumerate(context_counts):
        base = 30 * k
        for i in range(n):
            utts.append(U(["ann", "ben", "cat"][i % 3], base + 1 + i, f"chat {k} line {i}"))
        utts.append(U("ann", base + 21, "what a goal"))
        utts.append(U("ben", base + 22, "what a goal"))
    return sorted(utts, key=lambda u: u.time)


def frames_for(seconds, dim=4, fps=3):
    return np.arange(seconds * fps * dim, dtype=np.float64).reshape(seconds * fps, dim)


def test_sixty_second_fixture_gives_two_triples():
    triples = build_triples(sixty_second_log(), frames_for(60), video_id="v")
    assert len(triples) == 2
    assert [t.context_interval for t in triples] == [(0, 20), (30, 50)]
    assert [t.response_interval for t in triples] == [(20, 30), (50, 60)]
    for t in triples:
        assert t.response == ("what", "a", "goal")
        assert t.selection_reason == BLEU_MATCH
        assert t.video.frames.shape == (60, 4)
        assert t.video.end - t.video.start == 20
    assert triples[1].video.rows == (90, 150)
    check_no_overlap(triples)


def test_three_utterance_context_excluded():
    triples = build_triples(sixty_second_log((3, 4)), frames_for(60), video_id="v")
    assert [t.window_index for t in triples] == [1]


def test_empty_response_window_excluded():
    utts = [u for u in sixty_second_log() if not (20 <= u.time < 30)]
    assert [t.window_index for t in build_triples(utts, frames_for(60))] == [1]


def test_missing_features_names_interval():
    with pytest.raises(DataError, match=r"\[30,50\)"):
        build_triples(sixty_second_log(), frames_for(40), duration=60, video_id="v")


def test_outside_speaker_response_dropped_and_anonymized():
    utts = sixty_second_log((4, 0))
    utts = [u for u in utts if u.time < 30] + [U("ann", 20.5, "hey zed"), U("zed", 25, "ben is right")]
    utts = sorted(utts, key=lambda u: u.time)
    (t,) = build_triples(utts, frames_for(30))
    assert ("hey", "zed") not in t.response_window
    assert ("<USER>", "is", "right") in t.response_window


def test_triple_invariants():
    for t in build_triples(sixty_second_log((4, 6)), frames_for(60)):
        assert len(t.chat) >= 4
        assert t.response_interval[0] == t.context_interval[1]
        assert all(t.context_interval[0] <= u.time < t.context_interval[1] for u in t.chat)


def test_check_no_overlap_detects_violation():
    seg = VideoSegment(np.zeros((1, 1)), 0, 20)
    a = DialogueTriple(seg, [], ("x",), BLEU_MATCH, 0, "v", (0, 20), (20, 35))
    b = DialogueTriple(seg, [], ("x",), BLEU_MATCH, 1, "v", (30, 50), (50, 60))
    with pytest.raises(DataError):
        check_no_overlap([a, b])


# -- features and serialization ----------------------------------------------------
def test_vfea_round_trip(tmp_path):
    frames = np.random.default_rng(0).normal(size=(7, 3)).astype(np.float32)
    path = tmp_path / "x.vfea"
    write_features(path, frames)
    raw = path.read_bytes()
    assert raw[:4] == b"VFEA" and len(raw) == 12 + 7 * 3 * 4
    assert read_header(path) == (7, 3)
    assert np.array_equal(read_features(path), frames.astype(np.float64))


def test_vfea_bad_magic(tmp_path):
    path = tmp_path / "bad.vfea"
    path.write_bytes(b"NOPE" + b"\0" * 8)
    with pytest.raises(DataError):
        read_features(path)


def test_frame_rows():
    assert frame_rows(0, 20, 3) == (0, 60)
    assert frame_rows(30, 50, 3) == (90, 150)
    assert frame_rows(0.5, 1.0, 3) == (2, 3)


def _corpus(tmp_path, logs, seconds=60, dim=4):
    chat, feats = tmp_path / "chat", tmp_path / "features"
    chat.mkdir()
    feats.mkdir()
    for vid, utts in logs.items():
        write_chat(chat / f"{vid}.jsonl", [{"time": u.time, "user": u.speaker, "text": " ".join(u.tokens)}
                                           for u in utts])
        write_features(feats / f"{vid}.vfea", frames_for(seconds, dim))
    return chat, feats


def test_build_dataset_round_trip_and_determinism(tmp_path):
    chat, feats = _corpus(tmp_path, {"b": sixty_second_log(), "a": sixty_second_log((5, 4))})
    triples, frequent = build_dataset(chat, feats, relative_to=tmp_path)
    assert [t.instance_id for t in triples] == ["a:0", "a:1", "b:0", "b:1"]
    out1, out2 = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
    write_triples(out1, triples)
    write_triples(out2, build_dataset(chat, feats, relative_to=tmp_path)[0])
    assert out1.read_bytes() == out2.read_bytes()
    back = read_triples(out1)
    assert dumps_triples(back) == out1.read_text()
    assert np.array_equal(back[3].video.frames, triples[3].video.frames)


def test_build_dataset_frequent_set_from_given_split(tmp_path):
    chat, feats = _corpus(tmp_path, {"a": sixty_second_log()})
    _, frequent = build_dataset(chat, feats)
    assert "what a goal" in frequent
    _, given = build_dataset(chat, feats, frequent_set={"x"})
    assert given == {"x"}


# -- statistics ---------------------------------------------------------------------
def _triple(chat, response):
    seg = VideoSegment(np.zeros((1, 1)), 0, 20)
    return DialogueTriple(seg, chat, tuple(response.split()), BLEU_MATCH, 0, "v", (0, 20), (20, 30))


def test_stats_single_triple():
    t = _triple([U("a", 1, "one two three four five"), U("b", 2, "six seven eight nine ten")],
                "a b c d e")
    s = corpus_stats([t])
    assert (s.instances, s.avg_context_words, s.avg_response_words) == (1, 10.0, 5.0)


def test_stats_empty_and_histogram():
    empty = corpus_stats([])
    assert empty.instances == 0 and empty.utterance_histogram == {} and empty.top_words == []
    ts = [
        _triple([U("a", 1, "goal")] * 4, "goal"),
        _triple([U("a", 1, "save")] * 5, "nice save"),
        _triple([U("a", 1, "the goal")] * 4, "the"),
    ]
    s = corpus_stats(ts)
    assert s.utterance_histogram == {4: 2, 5: 1}
    # goal: 4 + 1 + 4 = 9, save: 5 + 1 = 6, nice: 1; "the" is a stopword
    assert s.top_words == [("goal", 9), ("save", 6), ("nice", 1)]
    assert "the" in stopwords()
