"""Iterative lexicon bootstrapping.

Seed phrases ranked by tf-idf over a small annotated "informative" subset
are matched against the full corpus as token-aligned substrings; n-grams
that cover many matched posts but few posts from a random background pool
(high domain relevance score) become the next round of phrase candidates,
optionally gated by human review, until an iteration approves nothing.

The blocking :func:`run` drives a :class:`BootstrapSession` to completion;
the HTTP service drives the same session one step at a time instead, so
both paths share one state machine.
"""

import dataclasses
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import Corpus, ngrams, normalize, tokenize_post
from .errors import ConfigError, InputFormatError, PipelineError
from .vectorspace import TfIdfModel, dedup, top_terms, unibigram_terms

GRAM_ORDERS = (1, 2, 3)

# review callback: (candidates, iteration) -> {phrase text: keep?}
ReviewFn = Callable[[list["SeedPhrase"], int], dict[str, bool]]


class PhraseStatus(str, Enum):
    CANDIDATE = "candidate"
    APPROVED = "approved"
    REJECTED = "rejected"


class StopReason(str, Enum):
    FIXED_POINT = "fixed_point"
    MAX_ITERATIONS = "max_iterations"
    MANUAL_STOP = "manual_stop"


@dataclass(frozen=True)
class SeedPhrase:
    """A lexicon entry: a normalized 1..3-gram with provenance and status."""

    text: str
    origin_iteration: int
    drs: float | None = None
    status: PhraseStatus = PhraseStatus.CANDIDATE

    def __post_init__(self):
        if not self.text:
            raise ValueError("seed phrase text must be non-empty")
        if normalize(self.text) != self.text:
            raise ValueError(f"seed phrase {self.text!r} is not normalized")
        order = len(self.text.split(" "))
        if order > max(GRAM_ORDERS):
            raise ValueError(f"seed phrase {self.text!r} has order {order}, max is {max(GRAM_ORDERS)}")
        if ngrams(self.text.split(" "), order) != [self.text]:
            raise ValueError(f"seed phrase {self.text!r} contains non-content tokens")
        if self.origin_iteration < 0:
            raise ValueError("origin_iteration must be >= 0")
        if self.drs is not None and self.drs < 0:
            raise ValueError("drs must be >= 0 when present")

    @property
    def order(self) -> int:
        return len(self.text.split(" "))


class Lexicon:
    """Seed phrases keyed by text; a phrase has exactly one status."""

    def __init__(self, phrases: Iterable[SeedPhrase] = ()):
        self._phrases: dict[str, SeedPhrase] = {}
        for phrase in phrases:
            self.add(phrase)

    def __len__(self) -> int:
        return len(self._phrases)

    def __contains__(self, text: str) -> bool:
        return text in self._phrases

    def __iter__(self):
        return iter(self._phrases.values())

    def add(self, phrase: SeedPhrase) -> None:
        if phrase.text in self._phrases:
            raise ValueError(f"phrase {phrase.text!r} already in lexicon")
        self._phrases[phrase.text] = phrase

    def get(self, text: str) -> SeedPhrase:
        return self._phrases[text]

    def set_status(self, text: str, status: PhraseStatus) -> None:
        self._phrases[text] = dataclasses.replace(self._phrases[text], status=status)

    def with_status(self, status: PhraseStatus) -> list[SeedPhrase]:
        return [p for p in self._phrases.values() if p.status == status]

    def approved(self) -> list[SeedPhrase]:
        return self.with_status(PhraseStatus.APPROVED)

    def candidates(self) -> list[SeedPhrase]:
        return self.with_status(PhraseStatus.CANDIDATE)


def save_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for phrase in lexicon:
            fh.write(json.dumps({
                "text": phrase.text,
                "origin_iteration": phrase.origin_iteration,
                "drs": phrase.drs,
                "status": phrase.status.value,
            }, ensure_ascii=False) + "\n")


def load_lexicon(path: str | Path) -> Lexicon:
    lexicon = Lexicon()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                lexicon.add(SeedPhrase(
                    text=rec["text"],
                    origin_iteration=int(rec["origin_iteration"]),
                    drs=None if rec.get("drs") is None else float(rec["drs"]),
                    status=PhraseStatus(rec["status"]),
                ))
            except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
                raise InputFormatError(f"{path}: line {line_no}: {exc}") from exc
    return lexicon


class BackgroundPool:
    """Random out-of-domain posts with precomputed n-gram frequency tables."""

    def __init__(self, corpus: Corpus):
        if len(corpus) == 0:
            raise ValueError("background pool must be non-empty")
        self.corpus = corpus
        self.df: dict[int, Counter] = {n: Counter() for n in GRAM_ORDERS}
        self.occurrences: dict[int, Counter] = {n: Counter() for n in GRAM_ORDERS}
        self.total_grams: dict[int, int] = {n: 0 for n in GRAM_ORDERS}
        for post in corpus:
            tokens = tokenize_post(post).tokens
            for n in GRAM_ORDERS:
                grams = ngrams(tokens, n)
                self.df[n].update(set(grams))
                self.occurrences[n].update(grams)
                self.total_grams[n] += len(grams)

    def __len__(self) -> int:
        return len(self.corpus)


@dataclass(frozen=True)
class BootstrapConfig:
    seed_count: int = 50
    drs_threshold: float = 10.0
    max_iterations: int = 10
    dedup_threshold: float = 0.9
    review_mode: str = "auto"          # auto | interactive
    drs_unit: str = "documents"        # documents | tokens
    min_relevant_posts: int = 2        # candidate floor: gram must hit this many matched posts

    def __post_init__(self):
        if self.seed_count < 1:
            raise ConfigError(f"seed_count must be >= 1, got {self.seed_count}")
        if self.drs_threshold <= 0:
            raise ConfigError(f"drs_threshold must be > 0, got {self.drs_threshold}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.dedup_threshold <= 1.0:
            raise ConfigError(f"dedup_threshold must be in (0, 1], got {self.dedup_threshold}")
        if self.review_mode not in ("auto", "interactive"):
            raise ConfigError(f"review_mode must be auto or interactive, got {self.review_mode!r}")
        if self.drs_unit not in ("documents", "tokens"):
            raise ConfigError(f"drs_unit must be documents or tokens, got {self.drs_unit!r}")
        if self.min_relevant_posts < 1:
            raise ConfigError(f"min_relevant_posts must be >= 1, got {self.min_relevant_posts}")


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    new_phrases: tuple[str, ...]
    matched_post_count: int            # matches before duplicate removal
    stop_reason: StopReason | None = None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "new_phrases": list(self.new_phrases),
            "matched_post_count": self.matched_post_count,
            "stop_reason": None if self.stop_reason is None else self.stop_reason.value,
        }


def append_report(report: IterationReport, path: str | Path) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(report.to_dict(), ensure_ascii=False) + "\n")


def initial_seeds(informative: Corpus, model: TfIdfModel | None = None, k: int = 50) -> list[SeedPhrase]:
    """Top-k tf-idf uni/bi-grams of the informative subset, as candidates."""
    if len(informative) == 0:
        raise ValueError("informative corpus must be non-empty")
    docs = [unibigram_terms(tokenize_post(p).tokens) for p in informative]
    if model is None:
        model = TfIdfModel.fit(docs, min_df=2)
    terms = top_terms(model, docs, k)
    return [SeedPhrase(text=t, origin_iteration=0, drs=None, status=PhraseStatus.CANDIDATE) for t in terms]


def match_relevant(corpus: Corpus, lexicon: Lexicon) -> Corpus:
    """Posts containing any approved phrase as a token-aligned substring."""
    approved = lexicon.approved()
    if not approved:
        raise ValueError("lexicon has no approved phrases to match with")
    by_order: dict[int, set[str]] = {}
    for phrase in approved:
        by_order.setdefault(phrase.order, set()).add(phrase.text)
    matched = []
    for post in corpus:
        tokens = tokenize_post(post).tokens
        for n, texts in by_order.items():
            if texts & set(ngrams(tokens, n)):
                matched.append(post)
                break
    return Corpus(matched, name=corpus.name)


class _GramIndex:
    """Document and occurrence counts for every 1..3-gram of a corpus."""

    def __init__(self, corpus: Corpus):
        self.n_docs = len(corpus)
        self.df: dict[int, Counter] = {n: Counter() for n in GRAM_ORDERS}
        self.occurrences: dict[int, Counter] = {n: Counter() for n in GRAM_ORDERS}
        self.total_grams: dict[int, int] = {n: 0 for n in GRAM_ORDERS}
        for post in corpus:
            tokens = tokenize_post(post).tokens
            for n in GRAM_ORDERS:
                grams = ngrams(tokens, n)
                self.df[n].update(set(grams))
                self.occurrences[n].update(grams)
                self.total_grams[n] += len(grams)


def _drs_from_counts(rel_count: int, rel_total: int, bg_count: int, bg_total: int) -> float:
    # integer cross-multiplication; the single division keeps clean ratios exact
    if rel_count == 0:
        return 0.0
    return (rel_count * (bg_total + 1)) / (rel_total * (bg_count + 1))


def drs(gram: str, relevant: Corpus, background: BackgroundPool, unit: str = "documents") -> float:
    """Domain relevance: coverage in the relevant set over smoothed coverage
    in the background pool.  0 iff the gram never occurs in the relevant set.
    """
    order = len(gram.split(" "))
    if order not in GRAM_ORDERS:
        raise ConfigError(f"gram order must be in {GRAM_ORDERS}, got {order} ({gram!r})")
    if len(relevant) == 0:
        raise ValueError("relevant corpus must be non-empty")
    index = _GramIndex(relevant)
    return _score_gram(gram, order, index, background, unit)


def _score_gram(gram: str, order: int, index: _GramIndex, background: BackgroundPool, unit: str) -> float:
    if unit == "documents":
        return _drs_from_counts(
            index.df[order][gram], index.n_docs,
            background.df[order][gram], len(background),
        )
    if unit == "tokens":
        return _drs_from_counts(
            index.occurrences[order][gram], index.total_grams[order],
            background.occurrences[order][gram], background.total_grams[order],
        )
    raise ConfigError(f"drs_unit must be documents or tokens, got {unit!r}")


def candidate_phrases(
    relevant: Corpus,
    background: BackgroundPool,
    lexicon: Lexicon,
    threshold: float,
    unit: str = "documents",
    iteration: int = 0,
    min_relevant_posts: int = 2,
) -> list[SeedPhrase]:
    """New high-relevance phrases, best first.

    A gram qualifies if it occurs in at least ``min_relevant_posts`` relevant
    posts, scores at or above ``threshold``, and is not already in the
    lexicon under any status (a rejected phrase stays rejected).
    """
    if threshold <= 0:
        raise ConfigError(f"drs threshold must be > 0, got {threshold}")
    index = _GramIndex(relevant)
    found: list[tuple[float, str]] = []
    for order in GRAM_ORDERS:
        for gram, doc_count in index.df[order].items():
            if doc_count < min_relevant_posts or gram in lexicon:
                continue
            score = _score_gram(gram, order, index, background, unit)
            if score >= threshold:
                found.append((score, gram))
    found.sort(key=lambda pair: (-pair[0], pair[1]))
    return [
        SeedPhrase(text=gram, origin_iteration=iteration, drs=score, status=PhraseStatus.CANDIDATE)
        for score, gram in found
    ]


@dataclass
class BootstrapResult:
    relevant: Corpus
    lexicon: Lexicon
    reports: list[IterationReport]


class IllegalTransition(PipelineError):
    """A session step was requested from a state that does not allow it."""


class BootstrapSession:
    """Stepwise bootstrap driver.

    States: ``idle`` → (advance) seed extraction → ``awaiting_review`` →
    decisions via :meth:`decide` → (advance, only when nothing is pending)
    next matching iteration → ... → ``done`` or ``failed``.  The blocking
    :func:`run` and the HTTP service both drive this machine.
    """

    def __init__(self, corpus: Corpus, informative: Corpus, background: BackgroundPool,
                 config: BootstrapConfig):
        self.corpus = corpus
        self.informative = informative
        self.background = background
        self.config = config
        self.status = "idle"
        self.lexicon = Lexicon()
        self.reports: list[IterationReport] = []
        self.relevant = Corpus([], name="relevant")
        self.iteration = 0
        self.pending: list[str] = []
        self.error: str | None = None
        self.decision_log: list[dict] = []
        self._approved_this_round: list[str] = []
        self._draft_matched: int | None = None

    def pending_candidates(self) -> list[SeedPhrase]:
        return [self.lexicon.get(text) for text in self.pending]

    def decide(self, text: str, keep: bool) -> None:
        if self.status != "awaiting_review":
            raise IllegalTransition(f"cannot record decisions while {self.status}")
        if text not in self.pending:
            raise KeyError(f"phrase {text!r} is not awaiting review")
        self.lexicon.set_status(text, PhraseStatus.APPROVED if keep else PhraseStatus.REJECTED)
        self.pending.remove(text)
        if keep:
            self._approved_this_round.append(text)
        self.decision_log.append({"iteration": self.iteration, "text": text, "keep": keep})

    def advance(self) -> None:
        """Run the next pipeline step; only legal when no review is pending."""
        if self.status == "idle":
            self._start()
            return
        if self.status != "awaiting_review":
            raise IllegalTransition(f"cannot advance while {self.status}")
        if self.pending:
            raise IllegalTransition(f"{len(self.pending)} candidate(s) still await review")
        try:
            self._next_iteration()
        except PipelineError:
            raise
        except Exception as exc:
            self.status = "failed"
            self.error = str(exc)
            raise

    def stop(self) -> None:
        """Manual stop from review: finalize with whatever is approved."""
        if self.status not in ("awaiting_review",):
            raise IllegalTransition(f"cannot stop while {self.status}")
        for text in list(self.pending):
            self.decide(text, keep=False)
        self._finalize(StopReason.MANUAL_STOP)

    def _start(self) -> None:
        self.status = "matching"
        try:
            seeds = initial_seeds(self.informative, k=self.config.seed_count)
        except Exception as exc:
            self.status = "failed"
            self.error = str(exc)
            raise
        for seed in seeds:
            self.lexicon.add(seed)
        self.pending = [s.text for s in seeds]
        self._approved_this_round = []
        self.status = "awaiting_review"

    def _next_iteration(self) -> None:
        approved_now = tuple(self._approved_this_round)
        self._approved_this_round = []

        if self.iteration > 0:
            # close out the report of the iteration whose review just ended
            if not approved_now:
                self._finalize(StopReason.FIXED_POINT, approved_now)
                return
            if self.iteration >= self.config.max_iterations:
                self._finalize(StopReason.MAX_ITERATIONS, approved_now)
                return
            self.reports.append(IterationReport(
                iteration=self.iteration, new_phrases=approved_now,
                matched_post_count=self._draft_matched,
            ))
        elif not approved_now:
            self.status = "failed"
            self.error = "no seed phrase was approved; nothing to match"
            raise ValueError(self.error)

        self.status = "matching"
        self.iteration += 1
        matched = match_relevant(self.corpus, self.lexicon)
        self._draft_matched = len(matched)
        self.relevant = dedup(matched, threshold=self.config.dedup_threshold)
        candidates = candidate_phrases(
            self.relevant, self.background, self.lexicon,
            threshold=self.config.drs_threshold, unit=self.config.drs_unit,
            iteration=self.iteration, min_relevant_posts=self.config.min_relevant_posts,
        )
        if not candidates:
            self._finalize(StopReason.FIXED_POINT, ())
            return
        for cand in candidates:
            self.lexicon.add(cand)
        self.pending = [c.text for c in candidates]
        self.status = "awaiting_review"

    def _finalize(self, reason: StopReason, new_phrases: tuple[str, ...] = ()) -> None:
        self.reports.append(IterationReport(
            iteration=self.iteration,
            new_phrases=tuple(new_phrases) + tuple(self._approved_this_round),
            matched_post_count=self._draft_matched or 0,
            stop_reason=reason,
        ))
        self._approved_this_round = []
        self.status = "done"


def auto_approve(candidates: Sequence[SeedPhrase], iteration: int) -> dict[str, bool]:
    return {c.text: True for c in candidates}


def replay_review(decisions: dict[str, bool]) -> ReviewFn:
    """Review function that replays a recorded decision log."""
    def review(candidates: Sequence[SeedPhrase], iteration: int) -> dict[str, bool]:
        missing = [c.text for c in candidates if c.text not in decisions]
        if missing:
            raise ValueError(f"decision log has no entry for: {', '.join(sorted(missing))}")
        return {c.text: decisions[c.text] for c in candidates}
    return review


def run(
    corpus: Corpus,
    informative: Corpus,
    background: BackgroundPool,
    config: BootstrapConfig = BootstrapConfig(),
    review: ReviewFn | None = None,
) -> BootstrapResult:
    """Drive the bootstrap loop to completion.

    In auto mode every candidate is approved; interactive mode requires a
    ``review`` callable and blocks on it once per review round.  The
    returned relevant corpus is the deduplicated matched set of the final
    iteration.
    """
    if config.review_mode == "interactive" and review is None:
        raise ConfigError("interactive review_mode needs a review decision source")
    if review is None:
        review = auto_approve
    session = BootstrapSession(corpus, informative, background, config)
    session.advance()
    while session.status == "awaiting_review":
        decisions = review(session.pending_candidates(), session.iteration)
        for text in list(session.pending):
            if text not in decisions:
                raise ValueError(f"review returned no decision for {text!r}")
            session.decide(text, decisions[text])
        if session.status == "awaiting_review":
            session.advance()
    return BootstrapResult(relevant=session.relevant, lexicon=session.lexicon, reports=session.reports)
