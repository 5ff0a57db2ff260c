from .clusters import EmbeddingClusterModel, extract_w2v_clusters, kmeans_assign, load_embeddings, parse_embeddings, toy_embeddings
from .extract import ALL_GROUPS, FeatureResources, FeatureVector, default_resources, extract_all, extract_bow
from .markers import (
    IMPERATIVE_VERBS,
    MODAL_AUX,
    PRONOUN_TYPES,
    PolitenessMarkers,
    PronounDictionaries,
    RequestRuleWeights,
    extract_intensifiers,
    extract_meta,
    extract_politeness,
    extract_pronouns,
    extract_request,
)
from .postag import COARSE_TAGS, PosTagger, RulePosTagger, extract_pos_counts
from .sentiment import (
    SHIPPED_LEXICONS,
    SentimentEntry,
    SentimentLexicon,
    extract_sentiment,
    load_sentiment_lexicon,
    parse_sentiment_lexicon,
    shipped_sentiment_lexicon,
)

__all__ = [
    "ALL_GROUPS",
    "COARSE_TAGS",
    "EmbeddingClusterModel",
    "FeatureResources",
    "FeatureVector",
    "IMPERATIVE_VERBS",
    "MODAL_AUX",
    "PRONOUN_TYPES",
    "PolitenessMarkers",
    "PosTagger",
    "PronounDictionaries",
    "RequestRuleWeights",
    "RulePosTagger",
    "SHIPPED_LEXICONS",
    "SentimentEntry",
    "SentimentLexicon",
    "default_resources",
    "extract_all",
    "extract_bow",
    "extract_intensifiers",
    "extract_meta",
    "extract_politeness",
    "extract_pos_counts",
    "extract_pronouns",
    "extract_request",
    "extract_sentiment",
    "extract_w2v_clusters",
    "kmeans_assign",
    "load_embeddings",
    "load_sentiment_lexicon",
    "parse_embeddings",
    "parse_sentiment_lexicon",
    "shipped_sentiment_lexicon",
    "toy_embeddings",
]
