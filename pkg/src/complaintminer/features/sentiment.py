"""Sentiment lexicon loading and ratio features.

Each lexicon is a TSV mapping tokens to a polarity and an optional
strength.  Four lexicons of different flavors ship with the package; the
extractor works with any of them, so a feature group per lexicon is just
the same function applied four times.
"""

import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import InputFormatError

SHIPPED_LEXICONS = ("mpqa", "nrc", "vader", "stanford_proxy")

_POLARITIES = ("positive", "negative")


@dataclass(frozen=True)
class SentimentEntry:
    polarity: str
    strength: float


# token -> entry; a token appears under exactly one polarity
SentimentLexicon = Mapping[str, SentimentEntry]


def parse_sentiment_lexicon(lines: Iterable[str], name: str = "<memory>") -> dict[str, SentimentEntry]:
    entries: dict[str, SentimentEntry] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise InputFormatError(f"{name}:{lineno}: expected 2 or 3 tab-separated fields, got {len(parts)}")
        token = parts[0].strip().lower()
        polarity = parts[1].strip().lower()
        if not token:
            raise InputFormatError(f"{name}:{lineno}: empty token")
        if polarity not in _POLARITIES:
            raise InputFormatError(f"{name}:{lineno}: polarity must be one of {_POLARITIES}, got {parts[1]!r}")
        if len(parts) == 3:
            try:
                strength = float(parts[2])
            except ValueError:
                raise InputFormatError(f"{name}:{lineno}: strength is not a number: {parts[2]!r}") from None
            if not 0.0 < strength <= 1.0:
                raise InputFormatError(f"{name}:{lineno}: strength must be in (0, 1], got {strength}")
        else:
            strength = 1.0
        if token in entries:
            raise InputFormatError(f"{name}:{lineno}: duplicate token {token!r}")
        entries[token] = SentimentEntry(polarity=polarity, strength=strength)
    if not entries:
        raise InputFormatError(f"{name}: no entries")
    return entries


def load_sentiment_lexicon(path: str | Path) -> dict[str, SentimentEntry]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_sentiment_lexicon(fh, name=str(path))


def shipped_sentiment_lexicon(name: str) -> dict[str, SentimentEntry]:
    if name not in SHIPPED_LEXICONS:
        raise ValueError(f"unknown lexicon {name!r}; shipped: {SHIPPED_LEXICONS}")
    resource = importlib.resources.files("complaintminer.features.data.sentiment") / f"{name}.tsv"
    return parse_sentiment_lexicon(resource.read_text(encoding="utf-8").splitlines(), name=f"{name}.tsv")


def extract_sentiment(tokens: Sequence[str], lexicon: SentimentLexicon) -> dict[str, float]:
    """pos/neg token shares plus their difference.

    Ratios are over all tokens, not just matched ones, so a single "bad"
    in a long post carries less weight than in a short one.
    """
    if not tokens:
        return {"pos_ratio": 0.0, "neg_ratio": 0.0, "polarity": 0.0}
    pos = 0.0
    neg = 0.0
    for token in tokens:
        entry = lexicon.get(token)
        if entry is None:
            continue
        if entry.polarity == "positive":
            pos += entry.strength
        else:
            neg += entry.strength
    n = len(tokens)
    pos_ratio = pos / n
    neg_ratio = neg / n
    return {"pos_ratio": pos_ratio, "neg_ratio": neg_ratio, "polarity": pos_ratio - neg_ratio}
