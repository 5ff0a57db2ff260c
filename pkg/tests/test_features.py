import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from complaintminer.corpus import Post, Source, normalize, tokenize, tokenize_post
from complaintminer.errors import ConfigError, InputFormatError
from complaintminer.features import (
    ALL_GROUPS,
    COARSE_TAGS,
    EmbeddingClusterModel,
    FeatureResources,
    FeatureVector,
    PolitenessMarkers,
    PronounDictionaries,
    RequestRuleWeights,
    RulePosTagger,
    SentimentEntry,
    default_resources,
    extract_all,
    extract_bow,
    extract_intensifiers,
    extract_meta,
    extract_politeness,
    extract_pos_counts,
    extract_pronouns,
    extract_request,
    extract_sentiment,
    extract_w2v_clusters,
    kmeans_assign,
    load_embeddings,
    parse_embeddings,
    parse_sentiment_lexicon,
    shipped_sentiment_lexicon,
    toy_embeddings,
)
from complaintminer.vectorspace import Vocabulary


def ntok(text: str) -> list[str]:
    return tokenize(normalize(text))


# ---------------------------------------------------------------- POS tags


class TestPosTagger:
    def test_spec_sentence(self):
        # hand-traced: the→DET list, bus→no list/suffix→NOUN, is→VERB list,
        # late→ADJ list
        tagger = RulePosTagger()
        assert tagger.tags(["the", "bus", "is", "late"]) == ["DET", "NOUN", "VERB", "ADJ"]
        counts = extract_pos_counts(["the", "bus", "is", "late"], tagger)
        assert counts == {"DET": 0.25, "NOUN": 0.25, "VERB": 0.25, "ADJ": 0.25}

    def test_all_punctuation(self):
        assert extract_pos_counts(["!", "!"], RulePosTagger()) == {"PUNCT": 1.0}

    def test_empty(self):
        assert extract_pos_counts([], RulePosTagger()) == {}

    def test_placeholders_and_numbers(self):
        tagger = RulePosTagger()
        assert tagger.tags(["<url>", "<user>", "42", "gate2"]) == ["X", "X", "NUM", "NUM"]

    def test_suffix_rules(self):
        tagger = RulePosTagger()
        assert tagger.tags(["quickly", "delayed", "helpful", "announcement"]) == ["ADV", "VERB", "ADJ", "NOUN"]

    @given(st.text(max_size=80))
    def test_one_tag_per_token(self, text):
        tokens = ntok(text)
        tags = RulePosTagger().tags(tokens)
        assert len(tags) == len(tokens)
        assert all(t in COARSE_TAGS for t in tags)

    def test_histogram_sums_to_one(self):
        tokens = ntok("Why is the metro late again today ?!")
        counts = extract_pos_counts(tokens, RulePosTagger())
        assert math.isclose(sum(counts.values()), 1.0)

    def test_bad_tagger_rejected(self):
        class Broken:
            def tags(self, tokens):
                return []

        with pytest.raises(ValueError):
            extract_pos_counts(["a", "b"], Broken())


# --------------------------------------------------------------- sentiment


class TestSentimentLexicon:
    def test_parse_basic(self):
        lex = parse_sentiment_lexicon(["# header", "good\tpositive", "bad\tnegative\t0.5", ""])
        assert lex["good"] == SentimentEntry("positive", 1.0)
        assert lex["bad"] == SentimentEntry("negative", 0.5)

    @pytest.mark.parametrize(
        "line",
        [
            "lonefield",
            "good\tneutral",
            "good\tpositive\tstrong",
            "good\tpositive\t0",
            "good\tpositive\t1.5",
            "\tpositive",
        ],
    )
    def test_parse_rejects(self, line):
        with pytest.raises(InputFormatError):
            parse_sentiment_lexicon([line])

    def test_duplicate_token_rejected(self):
        # also covers the both-polarities invariant: second entry for a
        # token is an error regardless of polarity
        with pytest.raises(InputFormatError, match="duplicate"):
            parse_sentiment_lexicon(["good\tpositive", "good\tnegative"])

    def test_empty_rejected(self):
        with pytest.raises(InputFormatError):
            parse_sentiment_lexicon(["# only a comment"])

    @pytest.mark.parametrize("name", ["mpqa", "nrc", "vader", "stanford_proxy"])
    def test_shipped_loads(self, name):
        lex = shipped_sentiment_lexicon(name)
        assert len(lex) >= 50
        for entry in lex.values():
            assert entry.polarity in ("positive", "negative")
            assert 0.0 < entry.strength <= 1.0

    def test_vader_has_graded_strengths(self):
        lex = shipped_sentiment_lexicon("vader")
        assert any(e.strength < 1.0 for e in lex.values())

    def test_unknown_shipped_name(self):
        with pytest.raises(ValueError):
            shipped_sentiment_lexicon("bing")


class TestExtractSentiment:
    def test_one_negative_in_five(self):
        lex = {"bad": SentimentEntry("negative", 1.0)}
        out = extract_sentiment(["service", "is", "bad", "today", "ok"], lex)
        assert out == {"pos_ratio": 0.0, "neg_ratio": 0.2, "polarity": -0.2}

    def test_no_matches(self):
        out = extract_sentiment(["service", "fine"], {"bad": SentimentEntry("negative", 1.0)})
        assert out == {"pos_ratio": 0.0, "neg_ratio": 0.0, "polarity": 0.0}

    def test_empty_tokens(self):
        out = extract_sentiment([], {"bad": SentimentEntry("negative", 1.0)})
        assert out == {"pos_ratio": 0.0, "neg_ratio": 0.0, "polarity": 0.0}

    def test_graded_recount(self):
        # by hand: pos = 0.8/8, neg = (0.9 + 0.9)/8
        lex = {
            "good": SentimentEntry("positive", 0.8),
            "great": SentimentEntry("positive", 1.0),
            "awful": SentimentEntry("negative", 0.9),
        }
        out = extract_sentiment(["the", "ride", "was", "good", "but", "staff", "awful", "awful"], lex)
        assert out["pos_ratio"] == pytest.approx(0.1, abs=1e-12)
        assert out["neg_ratio"] == pytest.approx(0.225, abs=1e-12)
        assert out["polarity"] == pytest.approx(-0.125, abs=1e-12)

    @given(st.lists(st.sampled_from(["good", "bad", "meh", "fine"]), max_size=30))
    def test_ranges(self, tokens):
        lex = {"good": SentimentEntry("positive", 1.0), "bad": SentimentEntry("negative", 1.0)}
        out = extract_sentiment(tokens, lex)
        assert 0.0 <= out["pos_ratio"] <= 1.0
        assert 0.0 <= out["neg_ratio"] <= 1.0
        assert -1.0 <= out["polarity"] <= 1.0


# ----------------------------------------------------------- w2v clusters


def kmeans_oracle(points: list[tuple[float, ...]], k: int, seed: int) -> list[int]:
    """Pure-python reimplementation with the same tie rules."""
    n = len(points)

    def d2(p, c):
        return sum((a - b) ** 2 for a, b in zip(p, c))

    centers = [list(points[random.Random(seed).randrange(n)])]
    nearest = [d2(p, centers[0]) for p in points]
    while len(centers) < k:
        best = max(range(n), key=lambda i: nearest[i])  # first max on ties
        centers.append(list(points[best]))
        nearest = [min(nearest[i], d2(points[i], centers[-1])) for i in range(n)]
    assign = [-1] * n
    for _ in range(100):
        new = []
        for p in points:
            dists = [d2(p, c) for c in centers]
            new.append(dists.index(min(dists)))  # first min on ties
        if new == assign:
            break
        assign = new
        for c in range(k):
            members = [points[i] for i in range(n) if assign[i] == c]
            if members:
                dim = len(members[0])
                centers[c] = [sum(m[j] for m in members) / len(members) for j in range(dim)]
    return assign


class TestEmbeddings:
    def test_parse(self):
        vecs = parse_embeddings(["# dim 2", "metro 1.0 2.0", "bus -1 0.5"])
        assert vecs == {"metro": (1.0, 2.0), "bus": (-1.0, 0.5)}

    @pytest.mark.parametrize(
        "lines",
        [
            ["metro"],
            ["metro 1.0", "bus 1.0 2.0"],
            ["metro one"],
            ["metro 1.0", "metro 2.0"],
            [],
        ],
    )
    def test_parse_rejects(self, lines):
        with pytest.raises(InputFormatError):
            parse_embeddings(lines)

    def test_load_reports_path_and_line(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("metro 1.0\nbus x\n", encoding="utf-8")
        with pytest.raises(InputFormatError, match=r"emb\.txt:2"):
            load_embeddings(path)

    def test_toy_embeddings_ship(self):
        vecs = toy_embeddings()
        assert len(vecs) >= 100
        dim = len(next(iter(vecs.values())))
        assert all(len(v) == dim for v in vecs.values())
        assert "metro" in vecs and "late" in vecs


class TestKmeans:
    # three tight groups far apart, plus a stray point
    FIXTURE = {
        "a1": (0.0, 0.1), "a2": (0.1, 0.0), "a3": (-0.1, 0.1),
        "b1": (10.0, 10.1), "b2": (10.1, 9.9), "b3": (9.9, 10.0),
        "c1": (-10.0, 10.0), "c2": (-10.1, 10.1),
        "stray": (0.0, 20.0),
    }

    def test_matches_oracle_on_fixture(self):
        import numpy as np

        tokens = sorted(self.FIXTURE)
        points = [self.FIXTURE[t] for t in tokens]
        for seed in (0, 1, 7, 42):
            ours = kmeans_assign(np.array(points, dtype=float), 3, seed)
            assert ours == kmeans_oracle(points, 3, seed), f"seed {seed}"

    def test_matches_oracle_on_fixture_file(self, tmp_path):
        import numpy as np

        path = tmp_path / "emb.txt"
        lines = [f"{t} {x} {y}" for t, (x, y) in sorted(self.FIXTURE.items())]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        vecs = load_embeddings(path)
        model = EmbeddingClusterModel.fit(vecs, k=4, seed=3)
        tokens = sorted(vecs)
        oracle = kmeans_oracle([vecs[t] for t in tokens], 4, 3)
        assert [model.assignments[t] for t in tokens] == oracle

    def test_matches_oracle_on_toy_embeddings(self):
        vecs = toy_embeddings()
        model = EmbeddingClusterModel.fit(vecs, k=4, seed=11)
        tokens = sorted(vecs)
        oracle = kmeans_oracle([vecs[t] for t in tokens], 4, 11)
        assert [model.assignments[t] for t in tokens] == oracle

    def test_groups_stay_together(self):
        import numpy as np

        tokens = sorted(self.FIXTURE)
        points = np.array([self.FIXTURE[t] for t in tokens], dtype=float)
        assign = dict(zip(tokens, kmeans_assign(points, 3, 0)))
        assert assign["a1"] == assign["a2"] == assign["a3"]
        assert assign["b1"] == assign["b2"] == assign["b3"]
        assert assign["c1"] == assign["c2"]
        assert assign["a1"] != assign["b1"] != assign["c1"]

    def test_deterministic(self):
        m1 = EmbeddingClusterModel.fit(toy_embeddings(), k=8, seed=0)
        m2 = EmbeddingClusterModel.fit(toy_embeddings(), k=8, seed=0)
        assert m1.assignments == m2.assignments

    def test_k_bounds(self):
        import numpy as np

        points = np.zeros((3, 2))
        with pytest.raises(ConfigError):
            kmeans_assign(points, 0, 0)
        with pytest.raises(ConfigError):
            kmeans_assign(points, 4, 0)
        with pytest.raises(ConfigError):
            EmbeddingClusterModel.fit({"a": (0.0,), "b": (1.0,)}, k=1)

    def test_model_round_trip(self, tmp_path):
        model = EmbeddingClusterModel.fit(toy_embeddings(), k=4, seed=5)
        path = tmp_path / "clusters.json"
        model.save(path)
        assert EmbeddingClusterModel.load(path) == model


class TestExtractW2v:
    MODEL = EmbeddingClusterModel(k=5, seed=0, assignments={"metro": 3, "fare": 3, "bus": 0, "late": 1})

    def test_single_cluster(self):
        assert extract_w2v_clusters(["metro", "fare"], self.MODEL) == {"c3": 1.0}

    def test_even_split(self):
        assert extract_w2v_clusters(["bus", "late"], self.MODEL) == {"c0": 0.5, "c1": 0.5}

    def test_oov_ignored(self):
        assert extract_w2v_clusters(["metro", "zzz"], self.MODEL) == {"c3": 1.0}

    def test_all_oov(self):
        assert extract_w2v_clusters(["zzz", "qqq"], self.MODEL) == {}


# ------------------------------------------------------------- meta counts


class TestExtractMeta:
    def test_tagged_text(self):
        out = extract_meta("#delhi @DMRC http://t.co/x !!")
        assert out == {
            "urls": 1, "hashtags": 1, "mentions": 1,
            "exclamations": 2, "question_marks": 0, "other_special_symbols": 0,
        }

    def test_plain_sentence(self):
        out = extract_meta("the metro was on time")
        assert out == {
            "urls": 0, "hashtags": 0, "mentions": 0,
            "exclamations": 0, "question_marks": 0, "other_special_symbols": 0,
        }

    def test_reference_tweet(self):
        # commas after "No", "???", "right" plus the apostrophe → 4 others
        text = (
            "No, metro fares will be reduced ???, but proper fare structure "
            "needs to presented right, it's bad !!!"
        )
        out = extract_meta(text)
        assert out["question_marks"] == 3
        assert out["exclamations"] == 3
        assert out["urls"] == 0
        assert out["hashtags"] == 0
        assert out["mentions"] == 0
        assert out["other_special_symbols"] == 4

    def test_url_punctuation_not_counted(self):
        out = extract_meta("see http://t.co/a?b=1! now")
        assert out["urls"] == 1
        assert out["question_marks"] == 0
        # the trailing "!" is glued to the URL, so it goes with it
        assert out["exclamations"] == 0
        assert out["other_special_symbols"] == 0

    @given(st.text(max_size=120))
    def test_counts_non_negative(self, text):
        out = extract_meta(text)
        assert set(out) == {"urls", "hashtags", "mentions", "exclamations", "question_marks", "other_special_symbols"}
        assert all(isinstance(v, int) and v >= 0 for v in out.values())


# ---------------------------------------------------------------- request


REQUESTS = [
    "Please fix the AC in coach 3.",
    "Can you add more trains in the evening?",
    "Could you please look into the smartcard issue?",
    "Would the authority consider extending the yellow line?",
    "Please increase the frequency during rush hour.",
    "Can someone tell me why gate 2 is closed?",
    "Kindly share the new timetable.",
    "Will you refund the failed recharge?",
    "Please please do something about the crowding.",
    "Could we get an announcement when trains are delayed?",
]

NON_REQUESTS = [
    "The AC is broken.",
    "Metro was late again today.",
    "I waited forty minutes at the interchange.",
    "Would have been nice if the lift worked.",
    "The fare hike is ridiculous.",
    "Smartcard recharge failed twice this week.",
    "They closed gate 2 without any notice.",
    "The display board shows the wrong time.",
    "Crowding at rush hour keeps getting worse.",
    "My train terminated early at the depot.",
]


class TestExtractRequest:
    def test_please_fires(self):
        out = extract_request(ntok("Please fix the AC"), "Please fix the AC")
        assert out["score"] > 0

    def test_statement_scores_zero(self):
        out = extract_request(ntok("The AC is broken."), "The AC is broken.")
        assert out["score"] == 0.0

    def test_clipped_at_one(self):
        text = "Could you please fix this?"
        out = extract_request(ntok(text), text)
        assert out["score"] == 1.0

    def test_fixture_accuracy(self):
        # known imperfections: "Kindly ..." fires no rule, "Would have
        # been nice ..." fires the modal rule; 18/20 clears the bar
        correct = 0
        for text in REQUESTS:
            correct += extract_request(ntok(text), text)["score"] >= 0.5
        for text in NON_REQUESTS:
            correct += extract_request(ntok(text), text)["score"] < 0.5
        assert correct / 20 >= 0.8

    @given(st.text(max_size=120))
    def test_score_in_unit_interval(self, text):
        out = extract_request(ntok(text), text)
        assert 0.0 <= out["score"] <= 1.0

    @pytest.mark.parametrize("bad", [-0.1, 1.1])
    def test_weight_validation(self, bad):
        with pytest.raises(ConfigError):
            RequestRuleWeights(please=bad)

    def test_custom_weights(self):
        weights = RequestRuleWeights(modal_start=0.0, please=0.2, second_person_question=0.0, imperative_start=0.0)
        out = extract_request(ntok("please hurry"), "please hurry", weights)
        assert out["score"] == pytest.approx(0.2)


# ----------------------------------------------------------- intensifiers


class TestExtractIntensifiers:
    def test_caps_and_run(self):
        out = extract_intensifiers("WHY is metro SO late???")
        assert out == {"cap_words": 2, "all_caps_words": 2, "repeated_symbol_runs": 1}

    def test_lowercase_short(self):
        assert extract_intensifiers("ok") == {"cap_words": 0, "all_caps_words": 0, "repeated_symbol_runs": 0}

    def test_two_runs(self):
        out = extract_intensifiers("Bad!! Really bad??")
        assert out == {"cap_words": 2, "all_caps_words": 0, "repeated_symbol_runs": 2}

    def test_alternating_symbols_not_a_run(self):
        # runs must repeat the same symbol
        assert extract_intensifiers("what!?!?")["repeated_symbol_runs"] == 0
        assert extract_intensifiers("what!!!???")["repeated_symbol_runs"] == 2

    def test_single_letter_word_ignored(self):
        # "I" and "A" are too short to count as emphasis
        assert extract_intensifiers("I saw A bus")["cap_words"] == 0

    @given(st.text(max_size=120))
    def test_counts_non_negative(self, text):
        out = extract_intensifiers(text)
        assert all(isinstance(v, int) and v >= 0 for v in out.values())


# ------------------------------------------------------------- politeness


class TestPolitenessMarkers:
    def test_shipped_disjoint(self):
        pm = PolitenessMarkers.shipped()
        assert not (pm.polite & pm.impolite)

    def test_from_paths(self, tmp_path):
        pol = tmp_path / "pol.txt"
        imp = tmp_path / "imp.txt"
        pol.write_text("thank you\nplease\n", encoding="utf-8")
        imp.write_text("stupid\n", encoding="utf-8")
        pm = PolitenessMarkers.from_paths(pol, imp)
        assert ("thank", "you") in pm.polite
        assert ("stupid",) in pm.impolite

    def test_duplicate_marker_rejected(self, tmp_path):
        pol = tmp_path / "pol.txt"
        imp = tmp_path / "imp.txt"
        pol.write_text("please\nPlease\n", encoding="utf-8")
        imp.write_text("stupid\n", encoding="utf-8")
        with pytest.raises(InputFormatError, match="duplicate"):
            PolitenessMarkers.from_paths(pol, imp)

    def test_empty_rejected(self, tmp_path):
        pol = tmp_path / "pol.txt"
        imp = tmp_path / "imp.txt"
        pol.write_text("# nothing\n", encoding="utf-8")
        imp.write_text("stupid\n", encoding="utf-8")
        with pytest.raises(InputFormatError):
            PolitenessMarkers.from_paths(pol, imp)


class TestExtractPoliteness:
    PM = PolitenessMarkers.shipped()

    def test_gratitude_positive(self):
        out = extract_politeness(ntok("thank you so much"), self.PM)
        assert out["score"] > 0

    def test_marker_free_zero(self):
        assert extract_politeness(ntok("metro reached on time"), self.PM) == {"score": 0.0}

    def test_empty(self):
        assert extract_politeness([], self.PM) == {"score": 0.0}

    def test_planted_recounts(self):
        # 1 marker over 4 tokens
        assert extract_politeness(ntok("thank you so much"), self.PM)["score"] == pytest.approx(0.25)
        # 3 markers over 3 tokens
        assert extract_politeness(ntok("please sorry thanks"), self.PM)["score"] == pytest.approx(1.0)
        # 4 impolite over 4 tokens
        assert extract_politeness(ntok("stupid useless nonsense rubbish"), self.PM)["score"] == pytest.approx(-1.0)
        # thanks (+1) and idiots (−1) cancel over 5 tokens
        assert extract_politeness(ntok("thanks for nothing you idiots"), self.PM)["score"] == pytest.approx(0.0)

    def test_direct_question_start_counts_impolite(self):
        # 7 tokens incl. "?", one impolite marker from the bare wh-start
        out = extract_politeness(ntok("Why is the metro always late?"), self.PM)
        assert out["score"] == pytest.approx(-1 / 7)

    def test_softened_question_not_penalized(self):
        out = extract_politeness(ntok("Sorry, why is the metro late?"), self.PM)
        assert out["score"] > -1 / 7  # apology offsets the direct start

    def test_clip(self):
        pm = PolitenessMarkers(polite=frozenset({("a",), ("a", "a")}), impolite=frozenset({("z",)}))
        out = extract_politeness(["a", "a"], pm)
        assert out["score"] == 1.0  # raw 3/2 clipped

    @given(st.text(max_size=120))
    def test_score_bounds(self, text):
        out = extract_politeness(ntok(text), self.PM)
        assert -1.0 <= out["score"] <= 1.0


# ---------------------------------------------------------------- pronouns


class TestPronouns:
    PD = PronounDictionaries.shipped()

    def test_shipped_disjoint(self):
        sets = [self.PD.first, self.PD.second, self.PD.third, self.PD.demonstrative, self.PD.indefinite]
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                assert not (sets[i] & sets[j])

    def test_first_and_second(self):
        out = extract_pronouns(ntok("i told you"), self.PD)
        assert out == {"first": 1, "second": 1, "third": 0, "demonstrative": 0, "indefinite": 0}

    def test_pronoun_free(self):
        out = extract_pronouns(ntok("metro reached late"), self.PD)
        assert out == {"first": 0, "second": 0, "third": 0, "demonstrative": 0, "indefinite": 0}

    def test_mixed_types(self):
        out = extract_pronouns(ntok("this is what they do to everybody"), self.PD)
        assert out == {"first": 0, "second": 0, "third": 1, "demonstrative": 1, "indefinite": 1}

    def test_repeats_counted(self):
        out = extract_pronouns(ntok("we we they"), self.PD)
        assert out["first"] == 2
        assert out["third"] == 1

    def test_rejects_bad_dictionary(self):
        with pytest.raises(InputFormatError):
            PronounDictionaries(
                first=frozenset({"I"}),  # not lowercase
                second=frozenset({"you"}),
                third=frozenset({"they"}),
                demonstrative=frozenset({"this"}),
                indefinite=frozenset({"one"}),
            )

    def test_rejects_empty_set(self):
        with pytest.raises(InputFormatError):
            PronounDictionaries(
                first=frozenset(),
                second=frozenset({"you"}),
                third=frozenset({"they"}),
                demonstrative=frozenset({"this"}),
                indefinite=frozenset({"one"}),
            )


# ------------------------------------------------------------ bag of words


class TestExtractBow:
    def test_counts(self):
        vocab = Vocabulary(["metro", "late", "fare"])
        assert extract_bow(["metro", "metro", "late"], vocab) == {"metro": 2, "late": 1}

    def test_all_oov(self):
        assert extract_bow(["zzz"], Vocabulary(["metro"])) == {}

    def test_toy_corpus_table(self):
        vocab = Vocabulary(["metro", "late", "fare", "bus"])
        docs = {
            "d1": ["metro", "late", "late"],
            "d2": ["fare", "hike", "fare"],
            "d3": ["bus"],
        }
        expected = {
            "d1": {"metro": 1, "late": 2},
            "d2": {"fare": 2},
            "d3": {"bus": 1},
        }
        for doc_id, tokens in docs.items():
            assert extract_bow(tokens, vocab) == expected[doc_id]


# ------------------------------------------------------------- extract_all


REFERENCE_TWEET = (
    "No, metro fares will be reduced ???, but proper fare structure "
    "needs to presented right, it's bad !!!"
)


@pytest.fixture(scope="module")
def resources():
    return default_resources(bow_vocab=Vocabulary(["metro", "fare", "bad", "late"]))


def make_tokenized(text: str, post_id: str = "t1"):
    return tokenize_post(Post(id=post_id, text=text, source=Source.TWITTER))


class TestExtractAll:
    def test_single_group(self, resources):
        fv = extract_all(make_tokenized("metro fare hike"), resources, groups=["bow"])
        assert set(fv.groups) == {"bow"}
        assert fv.groups["bow"] == {"metro": 1, "fare": 1}

    def test_twelve_groups(self, resources):
        fv = extract_all(make_tokenized(REFERENCE_TWEET), resources)
        assert set(fv.groups) == set(ALL_GROUPS)
        assert len(fv.groups) == 12

    def test_compositional(self, resources):
        from complaintminer.features.markers import extract_meta as meta_fn

        post = make_tokenized(REFERENCE_TWEET)
        fv = extract_all(post, resources)
        assert fv.groups["meta"] == meta_fn(post.raw_text)
        assert fv.groups["pos"] == extract_pos_counts(post.tokens, resources.tagger)
        assert fv.groups["bow"] == extract_bow(post.tokens, resources.bow_vocab)
        assert fv.groups["w2v"] == extract_w2v_clusters(post.tokens, resources.cluster_model)
        assert fv.groups["request"] == extract_request(post.tokens, post.raw_text, resources.request_weights)
        assert fv.groups["intensify"] == extract_intensifiers(post.raw_text)
        assert fv.groups["polite"] == extract_politeness(post.tokens, resources.politeness)
        assert fv.groups["pronoun"] == extract_pronouns(post.tokens, resources.pronouns)
        for name in ("mpqa", "nrc", "vader", "stanford_proxy"):
            assert fv.groups[f"sent_{name}"] == extract_sentiment(post.tokens, resources.sentiment[name])

    def test_pure(self, resources):
        post = make_tokenized(REFERENCE_TWEET)
        assert extract_all(post, resources).groups == extract_all(post, resources).groups

    def test_unknown_group(self, resources):
        with pytest.raises(ConfigError, match="unknown"):
            extract_all(make_tokenized("metro"), resources, groups=["bow", "tfidf"])

    def test_duplicate_group(self, resources):
        with pytest.raises(ConfigError, match="duplicate"):
            extract_all(make_tokenized("metro"), resources, groups=["bow", "bow"])

    def test_bow_needs_vocab(self):
        res = default_resources()
        with pytest.raises(ConfigError, match="vocabulary"):
            extract_all(make_tokenized("metro"), res, groups=["bow"])
        # without bow the same resources are fine
        fv = extract_all(make_tokenized("metro"), res, groups=["pos", "meta"])
        assert set(fv.groups) == {"pos", "meta"}

    def test_flatten(self, resources):
        fv = FeatureVector(post_id="p", groups={"b": {"y": 2, "x": 1}, "a": {"z": 3}})
        flat = fv.flatten()
        assert list(flat) == ["a.z", "b.x", "b.y"]
        assert flat == {"a.z": 3.0, "b.x": 1.0, "b.y": 2.0}

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FeatureVector(post_id="p", groups={"g": {"x": float("nan")}})
        with pytest.raises(ValueError):
            FeatureVector(post_id="p", groups={"g": {"x": float("inf")}})

    def test_rejects_empty_names(self):
        with pytest.raises(ValueError):
            FeatureVector(post_id="p", groups={"": {"x": 1.0}})
        with pytest.raises(ValueError):
            FeatureVector(post_id="p", groups={"g": {"": 1.0}})

    def test_missing_lexicon_rejected(self, resources):
        with pytest.raises(ConfigError, match="missing"):
            FeatureResources(
                tagger=resources.tagger,
                cluster_model=resources.cluster_model,
                sentiment={"mpqa": resources.sentiment["mpqa"]},
                pronouns=resources.pronouns,
                politeness=resources.politeness,
            )

    def test_value_ranges(self, resources):
        # ratio groups in [0,1], signed scores in [−1,1], counts integral
        fv = extract_all(make_tokenized(REFERENCE_TWEET), resources)
        for group in ("pos", "w2v"):
            for v in fv.groups[group].values():
                assert 0.0 <= v <= 1.0
        for group in ("sent_mpqa", "sent_nrc", "sent_vader", "sent_stanford_proxy"):
            assert -1.0 <= fv.groups[group]["polarity"] <= 1.0
        assert -1.0 <= fv.groups["polite"]["score"] <= 1.0
        assert 0.0 <= fv.groups["request"]["score"] <= 1.0
        for group in ("meta", "intensify", "pronoun", "bow"):
            for v in fv.groups[group].values():
                assert isinstance(v, int) and v >= 0
