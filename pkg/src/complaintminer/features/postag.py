"""Deterministic rule-based coarse POS tagging.

A small closed-class vocabulary plus suffix heuristics, tagging into the
coarse set {NOUN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, PRT, PUNCT, X}.
No context is used, so tagging is trivially deterministic and pluggable:
anything with a ``tags(tokens)`` method returning one tag per token can
replace it.
"""

from typing import Protocol, Sequence

from ..corpus import PLACEHOLDER_TOKENS, is_content_token

COARSE_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "PRT", "PUNCT", "X")


class PosTagger(Protocol):
    def tags(self, tokens: Sequence[str]) -> list[str]: ...


_DET = frozenset("""
    the a an this that these those every some any no each all both either
    neither another such
""".split())

_PRON = frozenset("""
    i me my mine myself we us our ours ourselves you your yours yourself
    yourselves he him his himself she her hers herself it its itself they
    them their theirs themselves who whom whose what which whoever whatever
    someone somebody anyone anybody everyone everybody nobody nothing
    something anything everything none
""".split())

_VERB = frozenset("""
    be am is are was were been being do does did done have has had having
    can could will would shall should may might must go goes went gone get
    gets got make makes made take takes took come comes came say says said
    see sees saw know knows knew think thinks thought want wants need needs
    run runs ran stop stops wait waits keep keeps let lets happen happens
""".split())

_ADP = frozenset("""
    in on at by for from of to with without about against between during
    before after above below under over through into onto upon near across
    along around behind beyond inside outside since until towards via per
""".split())

_ADV = frozenset("""
    not now then here there again always never often sometimes soon already
    still yet very too quite almost really just only even also well back
    away instead maybe perhaps
""".split())

_PRT = frozenset("up off out down".split())

# frequent adjectives that no suffix rule would catch
_ADJ = frozenset("""
    late early good bad big small new old long short high low hot cold busy
    free full empty fast slow hard soft easy cheap dear safe clean dirty
    wrong right fine nice poor rich open closed broken crowded same other
    next last few many much more most less least
""".split())

_ADV_SUFFIXES = ("ly",)
_VERB_SUFFIXES = ("ing", "ed", "ise", "ize")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish", "less", "est")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ship", "hood", "ism", "ist", "ance", "ence")


class RulePosTagger:
    """Closed-class lists, then suffix rules, then NOUN."""

    def tags(self, tokens: Sequence[str]) -> list[str]:
        return [self._tag(tok) for tok in tokens]

    def _tag(self, token: str) -> str:
        if token in PLACEHOLDER_TOKENS:
            return "X"
        if not is_content_token(token):
            return "PUNCT"
        if any(ch.isdigit() for ch in token):
            return "NUM"
        # "to" is particle-or-preposition; keep it a particle for simplicity
        if token == "to":
            return "PRT"
        if token in _DET:
            return "DET"
        if token in _PRON:
            return "PRON"
        if token in _VERB:
            return "VERB"
        if token in _ADP:
            return "ADP"
        if token in _ADV:
            return "ADV"
        if token in _PRT:
            return "PRT"
        if token in _ADJ:
            return "ADJ"
        for suffix in _ADV_SUFFIXES:
            if token.endswith(suffix) and len(token) > len(suffix) + 1:
                return "ADV"
        for suffix in _NOUN_SUFFIXES:
            if token.endswith(suffix) and len(token) > len(suffix) + 1:
                return "NOUN"
        for suffix in _VERB_SUFFIXES:
            if token.endswith(suffix) and len(token) > len(suffix) + 1:
                return "VERB"
        for suffix in _ADJ_SUFFIXES:
            if token.endswith(suffix) and len(token) > len(suffix) + 1:
                return "ADJ"
        return "NOUN"


def extract_pos_counts(tokens: Sequence[str], tagger: PosTagger) -> dict[str, float]:
    """Tag histogram normalized by token count; empty input → empty group."""
    if not tokens:
        return {}
    tags = tagger.tags(tokens)
    if len(tags) != len(tokens):
        raise ValueError("tagger returned a tag list of mismatched length")
    counts: dict[str, int] = {}
    for tag in tags:
        counts[tag] = counts.get(tag, 0) + 1
    return {tag: count / len(tokens) for tag, count in counts.items()}
