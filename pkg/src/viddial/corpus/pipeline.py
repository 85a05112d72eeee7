"""Turn timestamped chat logs and frame features into dialogue triples."""
import json
import logging
import math
import os
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from viddial.corpus.bleu import compute_bleu4
from viddial.corpus.chatlog import anonymize, parse_chat_log, refers_outside
from viddial.corpus.features import FrameStore, frame_rows, load_rows
from viddial.corpus.types import (
    BLEU_MATCH,
    FALLBACK_FIRST,
    DialogueTriple,
    PipelineConfig,
    Utterance,
    VideoSegment,
)
from viddial.errors import DataError

logger = logging.getLogger(__name__)


def segment_windows(duration, cfg: PipelineConfig = PipelineConfig()):
    """Non-overlapping (context, response) interval pairs anchored at t=0.

    Instance ``k`` gets context ``[k*s, k*s + C)`` and response
    ``[k*s + C, k*s + C + R)`` with stride ``s = C + R``; a trailing window
    that does not fit entirely is dropped.
    """
    c, r = cfg.context_secs, cfg.response_secs
    stride = c + r
    windows = []
    k = 0
    while k * stride + stride <= duration + 1e-9:
        start = k * stride
        windows.append(((start, start + c), (start + c, start + stride)))
        k += 1
    return windows


def normalize_utterance(tokens):
    return " ".join(tokens).lower()


def top_frequent_utterances(training_utts: Iterable, n=20):
    """The ``n`` most frequent normalized utterances; ties go to the smaller string."""
    counts = Counter(
        normalize_utterance(u.tokens if isinstance(u, Utterance) else u) for u in training_utts
    )
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {text for text, _ in ranked[:n]}


def _echoed(idx, utts, cfg):
    hyp = utts[idx].tokens
    for j, other in enumerate(utts):
        if j != idx and compute_bleu4(hyp, other.tokens, cfg.bleu_smoothing) >= cfg.bleu_threshold:
            return True
    return False


def select_response(window_utts: Sequence[Utterance], frequent_set, cfg: PipelineConfig = PipelineConfig()):
    """Choose the response utterance of one response window.

    Returns ``(tokens, reason)`` or ``None`` for an empty window. The earliest
    non-frequent utterance that BLEU-matches some other utterance in the
    window wins; frequent utterances are considered only if no non-frequent
    one matches; otherwise the first utterance is used.
    """
    if not window_utts:
        return None
    utts = list(window_utts)
    frequent = [normalize_utterance(u.tokens) in frequent_set for u in utts]
    for idx, u in enumerate(utts):
        if not frequent[idx] and _echoed(idx, utts, cfg):
            return u.tokens, BLEU_MATCH
    for idx, u in enumerate(utts):
        if frequent[idx] and _echoed(idx, utts, cfg):
            return u.tokens, BLEU_MATCH
    return utts[0].tokens, FALLBACK_FIRST


def _in_interval(t, interval):
    return interval[0] <= t < interval[1]


def build_triples(
    utterances: Sequence[Utterance],
    frames,
    cfg: PipelineConfig = PipelineConfig(),
    frequent_set=frozenset(),
    *,
    video_id="",
    features_path=None,
    duration=None,
):
    """Triples for one video.

    Args:
        utterances: time-sorted chat of the video.
        frames: (rows, dim) frame features at ``cfg.fps``, or ``None`` when the
            feature file is missing (an error is raised on the first retained
            window).
        duration: video length in seconds; defaults to ``rows / fps`` (or the
            last utterance time when there are no frames).
    """
    if duration is None:
        if frames is not None:
            duration = frames.shape[0] / cfg.fps
        else:
            duration = max((u.time for u in utterances), default=0.0)
    all_speakers = {u.speaker for u in utterances}
    triples = []
    for k, (ctx, resp) in enumerate(segment_windows(duration, cfg)):
        context = [u for u in utterances if _in_interval(u.time, ctx)]
        if len(context) < cfg.min_context_utts:
            continue
        speakers = {u.speaker for u in context}
        window = [
            u for u in utterances
            if _in_interval(u.time, resp) and not refers_outside(u, speakers, all_speakers)
        ]
        chosen = select_response(window, frequent_set, cfg)
        if chosen is None:
            continue
        tokens, reason = chosen
        a, b = frame_rows(ctx[0], ctx[1], cfg.fps)
        if frames is None or frames.shape[0] < b:
            have = 0 if frames is None else frames.shape[0]
            raise DataError(
                f"missing features for video {video_id!r} interval [{ctx[0]:g},{ctx[1]:g}) "
                f"(need rows {a}..{b}, have {have})"
            )
        a = max(a, b - cfg.max_video_steps)
        segment = VideoSegment(frames[a:b], ctx[0], ctx[1], features_path, (a, b))
        response = anonymize(Utterance("", resp[0], tokens), speakers).tokens
        triples.append(
            DialogueTriple(
                video=segment,
                chat=[anonymize(u, speakers) for u in context],
                response=response,
                selection_reason=reason,
                window_index=k,
                video_id=video_id,
                context_interval=ctx,
                response_interval=resp,
                response_window=[anonymize(u, speakers).tokens for u in window],
            )
        )
    return triples


# -- JSON Lines I/O ---------------------------------------------------------
def triple_to_record(t: DialogueTriple):
    return {
        "video_id": t.video_id,
        "window_index": t.window_index,
        "context_interval": list(t.context_interval),
        "response_interval": list(t.response_interval),
        "chat": [{"speaker": u.speaker, "time": u.time, "tokens": list(u.tokens)} for u in t.chat],
        "response_tokens": list(t.response),
        "selection_reason": t.selection_reason,
        "features_path": t.video.features_path,
        "feature_rows": list(t.video.rows),
        "response_window": [list(x) for x in t.response_window],
    }


def record_to_triple(rec, base_dir=None, frames=None):
    path = rec.get("features_path")
    rows = tuple(rec.get("feature_rows", (0, 0)))
    if frames is None:
        if path is None:
            raise DataError(f"triple {rec.get('video_id')}:{rec.get('window_index')} has no features_path")
        full = path if os.path.isabs(path) or base_dir is None else os.path.join(base_dir, path)
        frames = load_rows(full, rows)
    ctx = tuple(rec["context_interval"])
    return DialogueTriple(
        video=VideoSegment(np.asarray(frames, dtype=np.float64), ctx[0], ctx[1], path, rows),
        chat=[Utterance(c["speaker"], float(c["time"]), c["tokens"]) for c in rec["chat"]],
        response=tuple(rec["response_tokens"]),
        selection_reason=rec["selection_reason"],
        window_index=int(rec["window_index"]),
        video_id=rec["video_id"],
        context_interval=ctx,
        response_interval=tuple(rec["response_interval"]),
        response_window=[tuple(x) for x in rec.get("response_window", [])],
    )


def dumps_triples(triples: Iterable[DialogueTriple]):
    return "".join(json.dumps(triple_to_record(t), sort_keys=True) + "\n" for t in triples)


def write_triples(path, triples):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_triples(triples))


def read_triples(path) -> List[DialogueTriple]:
    """Load triples, resolving relative ``features_path`` against the file's directory."""
    base = os.path.dirname(os.path.abspath(path))
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: {exc.msg}") from None
            out.append(record_to_triple(rec, base_dir=base))
    return out


# -- directory-level driver ------------------------------------------------
def list_videos(chat_dir):
    return sorted(f[:-6] for f in os.listdir(chat_dir) if f.endswith(".jsonl"))


def load_chat_dir(chat_dir) -> Dict[str, List[Utterance]]:
    logs = {}
    for vid in list_videos(chat_dir):
        with open(os.path.join(chat_dir, f"{vid}.jsonl"), encoding="utf-8") as fh:
            try:
                logs[vid] = parse_chat_log(fh)
            except DataError as exc:
                raise type(exc)(f"{vid}.jsonl: {exc}") from None
    return logs


def build_dataset(
    chat_dir,
    features_dir,
    cfg: PipelineConfig = PipelineConfig(),
    frequent_set: Optional[set] = None,
    relative_to=None,
):
    """Build triples for every ``<video>.jsonl`` in ``chat_dir``.

    When ``frequent_set`` is ``None`` it is computed from these logs, which is
    only correct for the training split. Videos are processed in sorted id
    order. ``relative_to`` makes stored feature paths relative to a directory.
    """
    logs = load_chat_dir(chat_dir)
    if frequent_set is None:
        frequent_set = top_frequent_utterances(
            (u for vid in sorted(logs) for u in logs[vid]), cfg.n_frequent
        )
    store = FrameStore(features_dir)
    triples = []
    for vid in sorted(logs):
        frames = store.load(vid) if store.has(vid) else None
        path = store.path(vid)
        if relative_to is not None:
            path = os.path.relpath(os.path.abspath(path), os.path.abspath(relative_to))
        triples.extend(
            build_triples(logs[vid], frames, cfg, frequent_set, video_id=vid, features_path=path)
        )
    return triples, frequent_set


def check_no_overlap(triples: Sequence[DialogueTriple]):
    """Assert no response interval reaches into a later context of the same video."""
    by_video: Dict[str, list] = {}
    for t in triples:
        by_video.setdefault(t.video_id, []).append(t)
    for items in by_video.values():
        items.sort(key=lambda t: t.window_index)
        for a, b in zip(items, items[1:]):
            if a.response_interval[1] > b.context_interval[0] + 1e-9:
                raise DataError(f"response of {a.instance_id} overlaps context of {b.instance_id}")
    return True


def triple_context_words(t: DialogueTriple):
    return sum(len(u.tokens) for u in t.chat)


def segment_frame_count(cfg: PipelineConfig):
    return min(cfg.max_video_steps, int(math.ceil(cfg.context_secs * cfg.fps)))
