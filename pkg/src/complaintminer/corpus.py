"""Post ingestion, normalization, tokenization and n-gram streams.

Everything downstream (seed ranking, substring retrieval, feature
extraction) works on the token streams produced here, so the normalization
rules are deliberately conservative: URLs and @-mentions collapse to
placeholder tokens, hashtags lose their marker, and every other non-word
character becomes a token of its own so that phrase matching stays
token-aligned.  Raw text is kept verbatim on :class:`TokenizedPost` because
the intensifier features need the original casing and symbol runs.
"""

import csv
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .errors import InputFormatError

URL_TOKEN = "<url>"
USER_TOKEN = "<user>"
PLACEHOLDER_TOKENS = frozenset({URL_TOKEN, USER_TOKEN})

_URL_RE = re.compile(r"(?:https?://|www\.)\S+")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#(\w+)")


class Source(str, Enum):
    TWITTER = "twitter"
    FORUM = "forum"
    SYNTHETIC = "synthetic"


class InformativeLabel(str, Enum):
    INFORMATIVE = "informative"
    NON_INFORMATIVE = "non_informative"


class ComplaintLabel(str, Enum):
    COMPLAINT = "complaint"
    NON_COMPLAINT = "non_complaint"


@dataclass(frozen=True)
class Post:
    """One collected social-media message.

    ``informative_label`` and ``complaint_label`` hold gold annotations when
    the record carries them; both are optional because most of the corpus is
    unlabeled until the annotation stage.
    """

    id: str
    text: str
    source: Source = Source.TWITTER
    informative_label: InformativeLabel | None = None
    complaint_label: ComplaintLabel | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("post id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"post {self.id!r}: text is empty")


@dataclass(frozen=True)
class TokenizedPost:
    """Normalized token sequence plus the untouched raw text."""

    post_id: str
    tokens: tuple[str, ...]
    raw_text: str


class Corpus:
    """An ordered, immutable collection of posts with unique ids."""

    def __init__(self, posts: Iterable[Post], name: str = ""):
        self.name = name
        self._posts = tuple(posts)
        self._by_id: dict[str, Post] = {}
        for post in self._posts:
            if post.id in self._by_id:
                raise ValueError(f"duplicate post id {post.id!r} in corpus {name!r}")
            self._by_id[post.id] = post

    def __len__(self) -> int:
        return len(self._posts)

    def __iter__(self) -> Iterator[Post]:
        return iter(self._posts)

    def __contains__(self, post_id: str) -> bool:
        return post_id in self._by_id

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self._posts == other._posts

    def get(self, post_id: str) -> Post:
        return self._by_id[post_id]

    @property
    def posts(self) -> tuple[Post, ...]:
        return self._posts

    def subset(self, ids: Iterable[str], name: str = "") -> "Corpus":
        """New corpus containing the given posts, in this corpus's order."""
        wanted = set(ids)
        return Corpus((p for p in self._posts if p.id in wanted), name=name)

    def filter(self, pred: Callable[[Post], bool], name: str = "") -> "Corpus":
        return Corpus((p for p in self._posts if pred(p)), name=name)


def normalize(text: str) -> str:
    """Canonicalize raw post text for token-aligned substring matching.

    Lowercases, replaces URLs with ``<url>`` and @-mentions with ``<user>``,
    strips the ``#`` off hashtags, splits every remaining non-word character
    into its own token, and collapses whitespace.  Idempotent: running the
    result through again returns it unchanged.
    """
    t = text.lower()
    t = _URL_RE.sub(f" {URL_TOKEN} ", t)
    t = _MENTION_RE.sub(f" {USER_TOKEN} ", t)
    t = _HASHTAG_RE.sub(r" \1 ", t)
    parts: list[str] = []
    for chunk in t.split():
        if chunk in PLACEHOLDER_TOKENS:
            parts.append(chunk)
        else:
            parts.extend(_split_punctuation(chunk))
    return " ".join(parts)


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _split_punctuation(chunk: str) -> list[str]:
    out: list[str] = []
    word: list[str] = []
    for ch in chunk:
        if _is_word_char(ch):
            word.append(ch)
        else:
            if word:
                out.append("".join(word))
                word = []
            out.append(ch)
    if word:
        out.append("".join(word))
    return out


def tokenize(normalized_text: str) -> list[str]:
    """Split normalized text into tokens (placeholders and punctuation kept)."""
    if not normalized_text:
        return []
    return normalized_text.split(" ")


def tokenize_post(post: Post) -> TokenizedPost:
    return TokenizedPost(
        post_id=post.id,
        tokens=tuple(tokenize(normalize(post.text))),
        raw_text=post.text,
    )


def is_content_token(token: str) -> bool:
    """True for tokens that may participate in n-grams.

    Placeholders and punctuation tokens act as boundaries: phrases never
    span them, which keeps junk like ``bad ! metro`` out of the lexicon.
    """
    if token in PLACEHOLDER_TOKENS or not token:
        return False
    return all(_is_word_char(ch) for ch in token)


def ngrams(tokens: Sequence[str], n: int) -> list[str]:
    """Contiguous space-joined n-grams over runs of content tokens."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out: list[str] = []
    run: list[str] = []
    for tok in tokens:
        if is_content_token(tok):
            run.append(tok)
        else:
            _emit_ngrams(run, n, out)
            run = []
    _emit_ngrams(run, n, out)
    return out


def _emit_ngrams(run: list[str], n: int, out: list[str]) -> None:
    for i in range(len(run) - n + 1):
        out.append(" ".join(run[i : i + n]))


# --- file ingestion ---------------------------------------------------------

_CSV_HEADER = ["id", "text", "source", "informative", "complaint"]


def ingest(path: str | Path, format: str | None = None) -> Corpus:
    """Read a JSONL or CSV post file into a Corpus.

    ``format`` is "jsonl" or "csv"; when omitted it is inferred from the
    file suffix.  Raises :class:`InputFormatError` naming the offending line
    for malformed records and duplicate ids, and for empty files.
    """
    path = Path(path)
    fmt = format or _infer_format(path)
    if fmt == "jsonl":
        posts = _read_jsonl(path)
    elif fmt == "csv":
        posts = _read_csv(path)
    else:
        raise InputFormatError(f"unknown corpus format {fmt!r} (expected jsonl or csv)")
    if not posts:
        raise InputFormatError(f"{path}: no records found")
    seen: dict[str, int] = {}
    for line_no, post in posts:
        if post.id in seen:
            raise InputFormatError(
                f"{path}: duplicate id {post.id!r} on lines {seen[post.id]} and {line_no}"
            )
        seen[post.id] = line_no
    return Corpus((post for _, post in posts), name=path.stem)


def _infer_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix in (".jsonl", ".ndjson", ".json"):
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    raise InputFormatError(f"{path}: cannot infer format from suffix {suffix!r}")


def _read_jsonl(path: Path) -> list[tuple[int, Post]]:
    posts: list[tuple[int, Post]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"{path}: line {line_no}: invalid JSON: {exc}") from exc
            posts.append((line_no, _post_from_record(record, path, line_no)))
    return posts


def _post_from_record(record, path: Path, line_no: int) -> Post:
    if not isinstance(record, dict):
        raise InputFormatError(f"{path}: line {line_no}: record is not an object")
    try:
        post_id = record["id"]
        text = record["text"]
    except KeyError as exc:
        raise InputFormatError(f"{path}: line {line_no}: missing field {exc}") from exc
    if not isinstance(post_id, str) or not isinstance(text, str):
        raise InputFormatError(f"{path}: line {line_no}: id and text must be strings")
    source = record.get("source", "twitter")
    try:
        post = Post(
            id=post_id,
            text=text,
            source=Source(source),
            informative_label=_tristate(record.get("informative"), InformativeLabel, path, line_no),
            complaint_label=_tristate(record.get("complaint"), ComplaintLabel, path, line_no),
        )
    except ValueError as exc:
        raise InputFormatError(f"{path}: line {line_no}: {exc}") from exc
    return post


def _tristate(value, label_enum, path: Path, line_no: int):
    if value is None:
        return None
    if value is True:
        return list(label_enum)[0]
    if value is False:
        return list(label_enum)[1]
    raise InputFormatError(f"{path}: line {line_no}: label must be true, false or null, got {value!r}")


def _read_csv(path: Path) -> list[tuple[int, Post]]:
    posts: list[tuple[int, Post]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputFormatError(f"{path}: no records found") from None
        if header != _CSV_HEADER:
            raise InputFormatError(
                f"{path}: line 1: expected header {','.join(_CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_CSV_HEADER):
                raise InputFormatError(f"{path}: line {line_no}: expected {len(_CSV_HEADER)} fields, got {len(row)}")
            post_id, text, source, informative, complaint = row
            try:
                post = Post(
                    id=post_id,
                    text=text,
                    source=Source(source),
                    informative_label=_csv_tristate(informative, InformativeLabel, path, line_no),
                    complaint_label=_csv_tristate(complaint, ComplaintLabel, path, line_no),
                )
            except ValueError as exc:
                raise InputFormatError(f"{path}: line {line_no}: {exc}") from exc
            posts.append((line_no, post))
    return posts


def _csv_tristate(value: str, label_enum, path: Path, line_no: int):
    if value == "":
        return None
    if value == "true":
        return list(label_enum)[0]
    if value == "false":
        return list(label_enum)[1]
    raise InputFormatError(f"{path}: line {line_no}: label must be 'true', 'false' or empty, got {value!r}")


def export(corpus: Corpus, path: str | Path, format: str = "jsonl") -> None:
    """Write a corpus back to disk; ingest(export(c)) reproduces c exactly."""
    path = Path(path)
    if format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for post in corpus:
                fh.write(json.dumps(_record_from_post(post), ensure_ascii=False) + "\n")
    elif format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_HEADER)
            for post in corpus:
                writer.writerow([
                    post.id,
                    post.text,
                    post.source.value,
                    _csv_label(post.informative_label, InformativeLabel),
                    _csv_label(post.complaint_label, ComplaintLabel),
                ])
    else:
        raise InputFormatError(f"unknown corpus format {format!r} (expected jsonl or csv)")


def _record_from_post(post: Post) -> dict:
    return {
        "id": post.id,
        "text": post.text,
        "source": post.source.value,
        "informative": _json_label(post.informative_label, InformativeLabel),
        "complaint": _json_label(post.complaint_label, ComplaintLabel),
    }


def _json_label(label, label_enum):
    if label is None:
        return None
    return label == list(label_enum)[0]


def _csv_label(label, label_enum) -> str:
    if label is None:
        return ""
    return "true" if label == list(label_enum)[0] else "false"
