"""tf-idf weighting, seed ranking, cosine similarity and near-duplicate removal.

The tf-idf variant is raw term counts times smoothed idf,
``idf(t) = ln((1 + N) / (1 + df(t))) + 1``, with L2 document
normalization.  The smoothing keeps every idf strictly positive, so a
stored weight of zero can only mean "term absent" and sparse vectors may
drop zeros without losing information.
"""

import json
import math
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import Corpus, ngrams, tokenize_post
from .errors import ConfigError


class SparseVector:
    """Immutable index→weight mapping with a cached L2 norm."""

    __slots__ = ("_weights", "norm")

    def __init__(self, weights: dict[int, float]):
        self._weights = {i: w for i, w in weights.items() if w != 0.0}
        self.norm = math.sqrt(sum(w * w for w in self._weights.values()))

    def __len__(self) -> int:
        return len(self._weights)

    def __getitem__(self, index: int) -> float:
        return self._weights.get(index, 0.0)

    def items(self):
        return self._weights.items()

    def indices(self):
        return self._weights.keys()

    def scaled(self, factor: float) -> "SparseVector":
        return SparseVector({i: w * factor for i, w in self._weights.items()})


def cosine(a: SparseVector, b: SparseVector) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm.

    The dot product is accumulated in sorted index order so that
    cosine(a, b) == cosine(b, a) exactly, not just within float noise.
    """
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    common = a.indices() & b.indices()
    dot = sum(a[i] * b[i] for i in sorted(common))
    return dot / (a.norm * b.norm)


class Vocabulary:
    """Frozen term→index mapping; indices are dense and sorted by term."""

    def __init__(self, terms: Iterable[str]):
        self._index = {t: i for i, t in enumerate(sorted(set(terms)))}

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def index(self, term: str) -> int:
        return self._index[term]

    @property
    def terms(self) -> list[str]:
        return list(self._index)


class TfIdfModel:
    """Fitted idf table over a document collection."""

    def __init__(self, vocabulary: Vocabulary, idf: dict[str, float], n_docs: int, min_df: int):
        self.vocabulary = vocabulary
        self.idf = idf
        self.n_docs = n_docs
        self.min_df = min_df

    @classmethod
    def fit(cls, docs: Sequence[Sequence[str]], min_df: int = 2) -> "TfIdfModel":
        """Fit idf weights from term lists (one list per document).

        Terms occurring in fewer than ``min_df`` documents are excluded
        from the vocabulary.
        """
        if not docs:
            raise ValueError("cannot fit a tf-idf model on zero documents")
        if min_df < 1:
            raise ConfigError(f"min_df must be >= 1, got {min_df}")
        df: dict[str, int] = {}
        for doc in docs:
            for term in set(doc):
                df[term] = df.get(term, 0) + 1
        n = len(docs)
        kept = {t: c for t, c in df.items() if c >= min_df}
        idf = {t: math.log((1 + n) / (1 + c)) + 1.0 for t, c in kept.items()}
        return cls(Vocabulary(kept), idf, n_docs=n, min_df=min_df)

    def transform(self, doc: Sequence[str]) -> SparseVector:
        """tf × idf weights for one document, L2-normalized."""
        counts: dict[str, int] = {}
        for term in doc:
            if term in self.vocabulary:
                counts[term] = counts.get(term, 0) + 1
        raw = SparseVector({self.vocabulary.index(t): c * self.idf[t] for t, c in counts.items()})
        if raw.norm == 0.0:
            return raw
        return raw.scaled(1.0 / raw.norm)

    def to_dict(self) -> dict:
        return {"n_docs": self.n_docs, "min_df": self.min_df, "idf": dict(sorted(self.idf.items()))}

    @classmethod
    def from_dict(cls, data: dict) -> "TfIdfModel":
        idf = {str(t): float(w) for t, w in data["idf"].items()}
        return cls(Vocabulary(idf), idf, n_docs=int(data["n_docs"]), min_df=int(data["min_df"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TfIdfModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def unigram_terms(tokens: Sequence[str]) -> list[str]:
    return ngrams(tokens, 1)


def unibigram_terms(tokens: Sequence[str]) -> list[str]:
    return ngrams(tokens, 1) + ngrams(tokens, 2)


def top_terms(model: TfIdfModel, docs: Sequence[Sequence[str]], k: int) -> list[str]:
    """k highest-scoring terms over a document subset.

    A term's score is its summed pre-normalization tf-idf weight, which
    collapses to (total occurrences across docs) × idf.  Ties break
    lexicographically ascending.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if not docs:
        raise ValueError("top_terms needs at least one document")
    totals: dict[str, int] = {}
    for doc in docs:
        for term in doc:
            if term in model.vocabulary:
                totals[term] = totals.get(term, 0) + 1
    scored = [(count * model.idf[term], term) for term, count in totals.items()]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [term for _, term in scored[:k]]


def dedup(
    corpus: Corpus,
    model: TfIdfModel | None = None,
    threshold: float = 0.9,
    term_fn: Callable[[Sequence[str]], list[str]] = unigram_terms,
) -> Corpus:
    """Drop near-duplicate posts by greedy first-wins cosine filtering.

    Scans in corpus order and keeps a post iff its similarity to every
    already-kept post stays below ``threshold``.  When no model is given,
    one is fitted on the corpus itself with min_df=1 so that even posts
    whose terms appear nowhere else get nonzero vectors (byte-identical
    duplicates must never slip through on a zero-vector technicality).
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"dedup threshold must be in (0, 1], got {threshold}")
    if len(corpus) == 0:
        return corpus
    term_lists = [term_fn(tokenize_post(p).tokens) for p in corpus]
    if model is None:
        model = TfIdfModel.fit(term_lists, min_df=1)
    kept_posts = []
    kept_vectors: list[SparseVector] = []
    for post, terms in zip(corpus, term_lists):
        vec = model.transform(terms)
        if all(cosine(vec, seen) < threshold for seen in kept_vectors):
            kept_posts.append(post)
            kept_vectors.append(vec)
    return Corpus(kept_posts, name=corpus.name)
