"""JSON Lines chat log parsing and speaker anonymization."""
import json
import logging

from viddial.corpus.tokenize import has_url, tokenize
from viddial.corpus.types import Utterance
from viddial.errors import ParseError

logger = logging.getLogger(__name__)

USER_TAG = "<USER>"


def parse_chat_log(stream):
    """Read utterances from JSON Lines with keys ``time``, ``user``, ``text``.

    Utterances with hyperlinks or no tokens are dropped. Out-of-order times
    are sorted (stable) and counted in a warning.
    """
    utterances = []
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", lineno)
        try:
            time = float(obj["time"])
            user = str(obj["user"])
            text = obj["text"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad or missing field: {exc}", lineno) from None
        if not isinstance(text, str):
            raise ParseError("text must be a string", lineno)
        if time < 0 or time != time:
            raise ParseError(f"invalid time {obj['time']!r}", lineno)
        if has_url(text):
            continue
        tokens = tokenize(text)
        if tokens:
            utterances.append(Utterance(user, time, tokens))
    disorder = sum(1 for a, b in zip(utterances, utterances[1:]) if b.time < a.time)
    if disorder:
        logger.warning("chat log had %d out-of-order timestamps; sorted", disorder)
        utterances.sort(key=lambda u: u.time)
    return utterances


def _mention_target(token):
    return token[1:] if token.startswith("@") and len(token) > 1 else None


def anonymize(utt, known_speakers):
    """Replace speaker mentions with ``<USER>``.

    A token is a mention when it is ``@``-prefixed, or when it equals one of
    ``known_speakers`` (case-insensitive).
    """
    known = {s.lower() for s in known_speakers}
    tokens = tuple(
        USER_TAG if (_mention_target(t) is not None or t in known) else t
        for t in utt.tokens
    )
    if tokens == utt.tokens:
        return utt
    return Utterance(utt.speaker, utt.time, tokens)


def refers_outside(utt, context_speakers, all_speakers):
    """True if ``utt`` names a known user who is not a context speaker."""
    outside = {s.lower() for s in all_speakers} - {s.lower() for s in context_speakers}
    if not outside:
        return False
    for t in utt.tokens:
        target = _mention_target(t)
        if t in outside or (target is not None and target in outside):
            return True
    return False
