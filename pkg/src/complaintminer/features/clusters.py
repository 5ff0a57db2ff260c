"""Word-embedding cluster features.

Embeddings come from a plain text file (token followed by its vector, one
per line).  Tokens are grouped with a deterministic k-means: seeded
farthest-point initialization, then Lloyd iterations with all ties broken
toward the smallest index.  The per-post feature is the share of tokens
falling in each cluster.
"""

import importlib.resources
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import ConfigError, InputFormatError

TOY_EMBEDDINGS_RESOURCE = "toy_embeddings.txt"


def parse_embeddings(lines: Iterable[str], name: str = "<memory>") -> dict[str, tuple[float, ...]]:
    vectors: dict[str, tuple[float, ...]] = {}
    dim: int | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise InputFormatError(f"{name}:{lineno}: expected a token and at least one value")
        token = parts[0].lower()
        try:
            values = tuple(float(p) for p in parts[1:])
        except ValueError:
            raise InputFormatError(f"{name}:{lineno}: non-numeric vector component") from None
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise InputFormatError(f"{name}:{lineno}: expected {dim} components, got {len(values)}")
        if token in vectors:
            raise InputFormatError(f"{name}:{lineno}: duplicate token {token!r}")
        vectors[token] = values
    if not vectors:
        raise InputFormatError(f"{name}: no vectors")
    return vectors


def load_embeddings(path: str | Path) -> dict[str, tuple[float, ...]]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_embeddings(fh, name=str(path))


def toy_embeddings() -> dict[str, tuple[float, ...]]:
    """Small synthetic embedding set shipped with the package."""
    resource = importlib.resources.files("complaintminer.features.data") / TOY_EMBEDDINGS_RESOURCE
    return parse_embeddings(resource.read_text(encoding="utf-8").splitlines(), name=TOY_EMBEDDINGS_RESOURCE)


def kmeans_assign(points: np.ndarray, k: int, seed: int) -> list[int]:
    """Cluster row vectors into k groups; returns one cluster id per row.

    Fully deterministic for a given (points, k, seed): the first center is
    drawn with random.Random(seed), the rest by farthest-point, and every
    argmin/argmax tie goes to the smallest index.  Empty clusters keep
    their previous center.  Stops when assignments repeat or after 100
    Lloyd iterations.
    """
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    centers = np.empty((k, points.shape[1]), dtype=float)
    first = random.Random(seed).randrange(n)
    centers[0] = points[first]
    # min squared distance to any chosen center, per point
    nearest = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        pick = int(np.argmax(nearest))
        centers[c] = points[pick]
        nearest = np.minimum(nearest, ((points - centers[c]) ** 2).sum(axis=1))

    assign = np.full(n, -1, dtype=int)
    for _ in range(100):
        dists = np.empty((n, k), dtype=float)
        for c in range(k):
            dists[:, c] = ((points - centers[c]) ** 2).sum(axis=1)
        new_assign = np.argmin(dists, axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = points[assign == c]
            if len(members):
                centers[c] = members.mean(axis=0)
    return [int(a) for a in assign]


@dataclass(frozen=True)
class EmbeddingClusterModel:
    """Fitted token -> cluster id mapping."""

    k: int
    seed: int
    assignments: Mapping[str, int]

    @staticmethod
    def fit(embeddings: Mapping[str, Sequence[float]], k: int, seed: int = 0) -> "EmbeddingClusterModel":
        if not embeddings:
            raise ValueError("no embeddings to cluster")
        if k < 2:
            raise ConfigError(f"cluster count must be at least 2, got {k}")
        tokens = sorted(embeddings)
        points = np.array([embeddings[t] for t in tokens], dtype=float)
        ids = kmeans_assign(points, k, seed)
        return EmbeddingClusterModel(k=k, seed=seed, assignments=dict(zip(tokens, ids)))

    def to_dict(self) -> dict:
        return {"k": self.k, "seed": self.seed, "assignments": dict(sorted(self.assignments.items()))}

    @staticmethod
    def from_dict(data: dict) -> "EmbeddingClusterModel":
        return EmbeddingClusterModel(
            k=int(data["k"]),
            seed=int(data["seed"]),
            assignments={str(t): int(c) for t, c in data["assignments"].items()},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @staticmethod
    def load(path: str | Path) -> "EmbeddingClusterModel":
        return EmbeddingClusterModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def extract_w2v_clusters(tokens: Sequence[str], model: EmbeddingClusterModel) -> dict[str, float]:
    """Share of in-vocabulary tokens per cluster, keyed "c<id>"."""
    hits = [model.assignments[t] for t in tokens if t in model.assignments]
    if not hits:
        return {}
    counts: dict[int, int] = {}
    for cid in hits:
        counts[cid] = counts.get(cid, 0) + 1
    return {f"c{cid}": count / len(hits) for cid, count in sorted(counts.items())}
