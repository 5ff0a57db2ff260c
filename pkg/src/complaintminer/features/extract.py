"""Grouped feature extraction for classification.

Twelve groups, one per marker family the classifier is evaluated on.
Each group can be computed alone (for per-group ablation reports) or all
together; extract_all is a plain union of the individual extractors, with
no cross-group interaction.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..corpus import TokenizedPost
from ..errors import ConfigError
from ..vectorspace import Vocabulary
from .clusters import EmbeddingClusterModel, extract_w2v_clusters, toy_embeddings
from .markers import (
    PolitenessMarkers,
    PronounDictionaries,
    RequestRuleWeights,
    extract_intensifiers,
    extract_meta,
    extract_politeness,
    extract_pronouns,
    extract_request,
)
from .postag import PosTagger, RulePosTagger, extract_pos_counts
from .sentiment import SHIPPED_LEXICONS, SentimentLexicon, extract_sentiment, shipped_sentiment_lexicon

ALL_GROUPS = (
    "bow",
    "pos",
    "w2v",
    "sent_mpqa",
    "sent_nrc",
    "sent_vader",
    "sent_stanford_proxy",
    "meta",
    "request",
    "intensify",
    "polite",
    "pronoun",
)


@dataclass(frozen=True)
class FeatureVector:
    """Named feature values grouped by marker family."""

    post_id: str
    groups: Mapping[str, Mapping[str, float]]

    def __post_init__(self):
        for group, values in self.groups.items():
            if not group:
                raise ValueError("empty group name")
            for name, value in values.items():
                if not name:
                    raise ValueError(f"group {group!r}: empty feature name")
                if not math.isfinite(value):
                    raise ValueError(f"group {group!r}, feature {name!r}: non-finite value {value}")

    def flatten(self) -> dict[str, float]:
        """"group.name" → value, for model input."""
        flat = {}
        for group in sorted(self.groups):
            for name in sorted(self.groups[group]):
                flat[f"{group}.{name}"] = float(self.groups[group][name])
        return flat


def extract_bow(tokens: Sequence[str], vocab: Vocabulary) -> dict[str, int]:
    """Raw in-vocabulary term counts; OOV tokens ignored."""
    counts: dict[str, int] = {}
    for token in tokens:
        if token in vocab:
            counts[token] = counts.get(token, 0) + 1
    return counts


@dataclass(frozen=True)
class FeatureResources:
    """Everything the extractors need beyond the post itself.

    bow_vocab is optional because it must be fitted on a training split;
    the other resources are corpus-independent and default to the shipped
    ones.
    """

    tagger: PosTagger
    cluster_model: EmbeddingClusterModel
    sentiment: Mapping[str, SentimentLexicon]
    pronouns: PronounDictionaries
    politeness: PolitenessMarkers
    request_weights: RequestRuleWeights = field(default_factory=RequestRuleWeights)
    bow_vocab: Vocabulary | None = None

    def __post_init__(self):
        missing = [n for n in SHIPPED_LEXICONS if n not in self.sentiment]
        if missing:
            raise ConfigError(f"sentiment lexicons missing: {missing}")


def default_resources(bow_vocab: Vocabulary | None = None, cluster_k: int = 8, cluster_seed: int = 0) -> FeatureResources:
    return FeatureResources(
        tagger=RulePosTagger(),
        cluster_model=EmbeddingClusterModel.fit(toy_embeddings(), k=cluster_k, seed=cluster_seed),
        sentiment={name: shipped_sentiment_lexicon(name) for name in SHIPPED_LEXICONS},
        pronouns=PronounDictionaries.shipped(),
        politeness=PolitenessMarkers.shipped(),
        bow_vocab=bow_vocab,
    )


def extract_all(
    post: TokenizedPost,
    resources: FeatureResources,
    groups: Sequence[str] = ALL_GROUPS,
) -> FeatureVector:
    requested = list(groups)
    unknown = [g for g in requested if g not in ALL_GROUPS]
    if unknown:
        raise ConfigError(f"unknown feature groups: {unknown}; valid: {list(ALL_GROUPS)}")
    if len(set(requested)) != len(requested):
        raise ConfigError("duplicate feature groups requested")
    if "bow" in requested and resources.bow_vocab is None:
        raise ConfigError("bow group requested but no vocabulary was fitted")

    out: dict[str, dict[str, float]] = {}
    for group in requested:
        if group == "bow":
            out[group] = extract_bow(post.tokens, resources.bow_vocab)
        elif group == "pos":
            out[group] = extract_pos_counts(post.tokens, resources.tagger)
        elif group == "w2v":
            out[group] = extract_w2v_clusters(post.tokens, resources.cluster_model)
        elif group.startswith("sent_"):
            out[group] = extract_sentiment(post.tokens, resources.sentiment[group[len("sent_"):]])
        elif group == "meta":
            out[group] = extract_meta(post.raw_text)
        elif group == "request":
            out[group] = extract_request(post.tokens, post.raw_text, resources.request_weights)
        elif group == "intensify":
            out[group] = extract_intensifiers(post.raw_text)
        elif group == "polite":
            out[group] = extract_politeness(post.tokens, resources.politeness)
        elif group == "pronoun":
            out[group] = extract_pronouns(post.tokens, resources.pronouns)
    return FeatureVector(post_id=post.post_id, groups=out)
