"""Chat tokenizer: lowercase words, split punctuation, keep emoticons intact."""
import re

URL_RE = re.compile(r"(?:https?://|www\.)\S+|\b\S+\.(?:com|net|org|tv|io|gg|ly)(?:/\S*)?\b", re.IGNORECASE)

_EMOTICON = r"(?:<3|[<>]?[:;=][\-o\*']?[\)\]\(\[dDpPoO/\\|\}\{@3])"
_TOKEN_RE = re.compile(
    rf"(?P<emo>{_EMOTICON})|(?P<word>@?\w+(?:['’]\w+)*)|(?P<punct>\S)",
    re.UNICODE,
)


def has_url(text):
    return URL_RE.search(text) is not None


def tokenize(text):
    """Split ``text`` into tokens.

    >>> tokenize("GOAL!! :D @Bob")
    ['goal', '!', '!', ':D', '@bob']
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        if m.lastgroup == "emo":
            tokens.append(m.group())
        else:
            tokens.append(m.group().lower())
    return tokens
