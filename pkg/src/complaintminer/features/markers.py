"""Information-specific markers: metadata counts, request cues, emphasis,
politeness, pronoun usage.

Meta and intensifier features need the raw text (casing and symbol runs
are destroyed by normalization); the rest work on normalized tokens.
The request and politeness scorers stand in for external pretrained
models: both are transparent weighted-rule scorers behind small types, so
a learned model can replace them without touching callers.
"""

import importlib.resources
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..corpus import is_content_token, tokenize
from ..errors import ConfigError, InputFormatError

_RAW_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_RAW_HASHTAG_RE = re.compile(r"#\w+")
_RAW_MENTION_RE = re.compile(r"@\w+")
_SYMBOL_RUN_RE = re.compile(r"!{2,}|\?{2,}")


def extract_meta(raw_text: str) -> dict[str, int]:
    """Symbol counts on raw text.

    URLs are removed before anything else so their punctuation is not
    double-counted; hashtags and mentions likewise count as one unit
    each.  Whatever non-alphanumeric, non-whitespace characters remain
    after also removing ! and ? land in other_special_symbols.
    """
    urls = len(_RAW_URL_RE.findall(raw_text))
    rest = _RAW_URL_RE.sub(" ", raw_text)
    hashtags = len(_RAW_HASHTAG_RE.findall(rest))
    rest = _RAW_HASHTAG_RE.sub(" ", rest)
    mentions = len(_RAW_MENTION_RE.findall(rest))
    rest = _RAW_MENTION_RE.sub(" ", rest)
    exclamations = rest.count("!")
    question_marks = rest.count("?")
    other = sum(
        1
        for ch in rest
        if not ch.isalnum() and not ch.isspace() and ch not in "!?"
    )
    return {
        "urls": urls,
        "hashtags": hashtags,
        "mentions": mentions,
        "exclamations": exclamations,
        "question_marks": question_marks,
        "other_special_symbols": other,
    }


MODAL_AUX = frozenset("can could will would shall should may might".split())

IMPERATIVE_VERBS = frozenset("""
    fix help check stop start add remove improve increase reduce provide
    send give tell make open close clean repair restore update install
    extend run announce consider ensure allow explain share post refund
    resume restart
""".split())

_SECOND_PERSON = frozenset(("you", "your", "yours", "u"))


@dataclass(frozen=True)
class RequestRuleWeights:
    modal_start: float = 0.5
    please: float = 0.6
    second_person_question: float = 0.45
    imperative_start: float = 0.35

    def __post_init__(self):
        for name in ("modal_start", "please", "second_person_question", "imperative_start"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"request weight {name} must be in [0, 1], got {value}")


def extract_request(tokens: Sequence[str], raw_text: str, weights: RequestRuleWeights | None = None) -> dict[str, float]:
    """Single request-likelihood score built from four additive cues."""
    if weights is None:
        weights = RequestRuleWeights()
    content = [t for t in tokens if is_content_token(t)]
    score = 0.0
    if content and content[0] in MODAL_AUX:
        score += weights.modal_start
    if "please" in content:
        score += weights.please
    if "?" in raw_text and any(t in _SECOND_PERSON for t in content):
        score += weights.second_person_question
    head = content[1:] if content and content[0] == "please" else content
    if head and head[0] in IMPERATIVE_VERBS:
        score += weights.imperative_start
    return {"score": min(score, 1.0)}


def extract_intensifiers(raw_text: str) -> dict[str, int]:
    """Emphasis cues from raw text: capitalization and symbol runs."""
    words = raw_text.split()
    cap_words = sum(1 for w in words if len(w) > 1 and w[0].isupper())
    all_caps_words = sum(1 for w in words if len(w) > 1 and w.isupper())
    runs = len(_SYMBOL_RUN_RE.findall(raw_text))
    return {"cap_words": cap_words, "all_caps_words": all_caps_words, "repeated_symbol_runs": runs}


def _read_marker_file(lines: Iterable[str], name: str) -> frozenset[tuple[str, ...]]:
    phrases: set[tuple[str, ...]] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip().lower()
        if not line or line.startswith("#"):
            continue
        phrase = tuple(line.split())
        if phrase in phrases:
            raise InputFormatError(f"{name}:{lineno}: duplicate marker {line!r}")
        phrases.add(phrase)
    if not phrases:
        raise InputFormatError(f"{name}: no markers")
    return frozenset(phrases)


_WH_STARTERS = frozenset("what why when where who how which".split())


@dataclass(frozen=True)
class PolitenessMarkers:
    """Phrase lists for the two sides of the politeness score."""

    polite: frozenset[tuple[str, ...]]
    impolite: frozenset[tuple[str, ...]]

    @staticmethod
    def shipped() -> "PolitenessMarkers":
        root = importlib.resources.files("complaintminer.features.data.politeness")
        return PolitenessMarkers(
            polite=_read_marker_file((root / "polite.txt").read_text(encoding="utf-8").splitlines(), "polite.txt"),
            impolite=_read_marker_file((root / "impolite.txt").read_text(encoding="utf-8").splitlines(), "impolite.txt"),
        )

    @staticmethod
    def from_paths(polite_path: str | Path, impolite_path: str | Path) -> "PolitenessMarkers":
        polite_path, impolite_path = Path(polite_path), Path(impolite_path)
        with polite_path.open("r", encoding="utf-8") as fh:
            polite = _read_marker_file(fh, str(polite_path))
        with impolite_path.open("r", encoding="utf-8") as fh:
            impolite = _read_marker_file(fh, str(impolite_path))
        return PolitenessMarkers(polite=polite, impolite=impolite)


def _count_phrase(tokens: Sequence[str], phrase: tuple[str, ...]) -> int:
    k = len(phrase)
    if k == 0 or k > len(tokens):
        return 0
    return sum(1 for i in range(len(tokens) - k + 1) if tuple(tokens[i : i + k]) == phrase)


def extract_politeness(tokens: Sequence[str], markers: PolitenessMarkers) -> dict[str, float]:
    """(polite − impolite marker count) / token count, clipped to [−1, 1].

    Starting with a bare wh-question ("why is ...") counts as one
    impolite marker: direct questions without softening read as demands.
    """
    if not tokens:
        return {"score": 0.0}
    polite = sum(_count_phrase(tokens, p) for p in markers.polite)
    impolite = sum(_count_phrase(tokens, p) for p in markers.impolite)
    content = [t for t in tokens if is_content_token(t)]
    if content and content[0] in _WH_STARTERS:
        impolite += 1
    score = (polite - impolite) / len(tokens)
    return {"score": max(-1.0, min(1.0, score))}


PRONOUN_TYPES = ("first", "second", "third", "demonstrative", "indefinite")


@dataclass(frozen=True)
class PronounDictionaries:
    first: frozenset[str]
    second: frozenset[str]
    third: frozenset[str]
    demonstrative: frozenset[str]
    indefinite: frozenset[str]

    def __post_init__(self):
        for name in PRONOUN_TYPES:
            entries = getattr(self, name)
            if not entries:
                raise InputFormatError(f"pronoun dictionary {name!r} is empty")
            bad = [e for e in entries if e != e.lower() or " " in e]
            if bad:
                raise InputFormatError(f"pronoun dictionary {name!r}: entries must be lowercase single tokens: {sorted(bad)}")

    @staticmethod
    def shipped() -> "PronounDictionaries":
        root = importlib.resources.files("complaintminer.features.data.pronouns")
        sets = {}
        for name in PRONOUN_TYPES:
            text = (root / f"{name}.txt").read_text(encoding="utf-8")
            entries = frozenset(
                line.strip().lower()
                for line in text.splitlines()
                if line.strip() and not line.lstrip().startswith("#")
            )
            sets[name] = entries
        return PronounDictionaries(**sets)


def extract_pronouns(tokens: Sequence[str], dicts: PronounDictionaries) -> dict[str, int]:
    """Occurrence count per pronoun type over normalized tokens."""
    counts = {name: 0 for name in PRONOUN_TYPES}
    for token in tokens:
        for name in PRONOUN_TYPES:
            if token in getattr(dicts, name):
                counts[name] += 1
    return counts


def normalized_tokens_of(raw_text: str) -> list[str]:
    """Convenience for callers holding only raw text."""
    return tokenize(raw_text)
