"""Acceptance gate: one test per shipped guarantee, one printed line each.

Every test re-derives its expected values through an independent route
(brute-force scripts, Newton's method, finite differences, hand-counted
fixtures) and enforces the stated runtime budget.  Lines are printed
outside pytest's capture so the pass/fail record is always visible.
"""

import json
import math
import os
import random
import subprocess
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from complaintminer.annotation import kappa
from complaintminer.bootstrap import (
    BackgroundPool,
    BootstrapConfig,
    StopReason,
    drs,
    run,
)
from complaintminer.classifier import (
    TrainConfig,
    _smooth_value_and_grad,
    cross_validate,
    stratified_folds,
    train,
)
from complaintminer.corpus import Corpus, Post, tokenize_post
from complaintminer.vectorspace import TfIdfModel, cosine, dedup, unigram_terms
from synth import CHAIN, make_planted_corpus


def _announce(capsys, status, name, elapsed=None, budget=None):
    timing = ""
    if elapsed is not None:
        timing = f"  [{elapsed:.2f}s" + (f" / budget {budget:g}s]" if budget else "]")
    with capsys.disabled():
        print(f"\n{status:4s} {name}{timing}")


@contextmanager
def criterion(capsys, name, budget=None):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        _announce(capsys, "FAIL", name, time.perf_counter() - start, budget)
        raise
    elapsed = time.perf_counter() - start
    within = budget is None or elapsed < budget
    _announce(capsys, "PASS" if within else "FAIL", name, elapsed, budget)
    assert within, f"{name}: {elapsed:.2f}s exceeded the {budget:g}s budget"


def _corpus(texts, prefix="p"):
    return Corpus(Post(id=f"{prefix}{i}", text=t) for i, t in enumerate(texts))


def test_tfidf_against_brute_force(capsys):
    with criterion(capsys, "tf-idf weights match a brute-force recount to 1e-9", budget=1.0):
        docs = [
            ["metro", "fare", "hike", "metro"],
            ["fare", "refund", "delay"],
            ["metro", "delay", "delay", "queue"],
        ]
        model = TfIdfModel.fit(docs, min_df=1)

        n = len(docs)
        df = {}
        for doc in docs:
            for term in set(doc):
                df[term] = df.get(term, 0) + 1
        for term, count in df.items():
            expected_idf = math.log((1 + n) / (1 + count)) + 1.0
            assert abs(model.idf[term] - expected_idf) <= 1e-9

        for doc in docs:
            vec = model.transform(doc)
            raw = {t: doc.count(t) * (math.log((1 + n) / (1 + df[t])) + 1.0) for t in set(doc)}
            norm = math.sqrt(sum(w * w for w in raw.values()))
            for term, weight in raw.items():
                got = vec[model.vocabulary.index(term)]
                assert abs(got - weight / norm) <= 1e-9


def test_cosine_and_dedup_recover_cluster_representatives(capsys):
    with criterion(capsys, "cosine symmetry/self-similarity and one-per-cluster dedup", budget=1.0):
        # three paraphrase clusters built by word-order permutation, so
        # intra-cluster bags are identical and clusters share no vocabulary
        clusters = [
            ["metro fare hike makes daily travel costly",
             "daily travel costly makes metro fare hike",
             "fare hike metro costly travel daily makes",
             "costly daily fare hike makes metro travel"],
            ["station lift broken again stairs crowded",
             "broken lift station crowded stairs again",
             "stairs crowded again station lift broken"],
            ["night owl route cancelled without notice",
             "cancelled without notice night owl route",
             "notice without cancelled route owl night"],
        ]
        texts = [t for cluster in clusters for t in cluster]
        corpus = _corpus(texts)
        token_lists = [unigram_terms(tokenize_post(p).tokens) for p in corpus]

        model = TfIdfModel.fit(token_lists, min_df=1)
        vectors = [model.transform(tokens) for tokens in token_lists]
        for i, a in enumerate(vectors):
            assert abs(cosine(a, a) - 1.0) <= 1e-12
            for b in vectors[i + 1:]:
                assert cosine(a, b) == cosine(b, a)

        # independent all-pairs oracle over raw counts
        def oracle_vector(tokens):
            df = {}
            for other in token_lists:
                for term in set(other):
                    df[term] = df.get(term, 0) + 1
            raw = {t: tokens.count(t) * (math.log((1 + len(token_lists)) / (1 + df[t])) + 1.0)
                   for t in set(tokens)}
            norm = math.sqrt(sum(w * w for w in raw.values()))
            return {t: w / norm for t, w in raw.items()}

        def oracle_cosine(u, v):
            return sum(u[t] * v[t] for t in sorted(u.keys() & v.keys()))

        oracle_vecs = [oracle_vector(tokens) for tokens in token_lists]
        kept_ids, kept_vecs = [], []
        for post, vec in zip(corpus, oracle_vecs):
            if all(oracle_cosine(vec, seen) < 0.9 for seen in kept_vecs):
                kept_ids.append(post.id)
                kept_vecs.append(vec)

        first_of_each = ["p0", "p4", "p7"]
        assert kept_ids == first_of_each
        deduped = dedup(corpus, threshold=0.9)
        assert [p.id for p in deduped] == first_of_each
        assert dedup(deduped, threshold=0.9) == deduped


def test_domain_relevance_formula_cases(capsys):
    with criterion(capsys, "domain relevance score: absent=0, 10/100 vs 0/999 = 100, equal = 1", budget=1.0):
        background = BackgroundPool(_corpus(["quiet evening walk"] * 999, prefix="bg"))
        relevant = _corpus(["fare hike again"] * 10 + ["calm commute"] * 90)
        assert drs("ghost", relevant, background) == 0.0
        assert drs("fare hike", relevant, background) == 100.0

        balanced_bg = BackgroundPool(
            _corpus(["fare hike news"] * 9 + ["sunny day out"] * 90, prefix="bg"))
        balanced_rel = _corpus(["fare hike again"] * 1 + ["calm commute"] * 9)
        # coverage 1/10 vs smoothed (9+1)/(99+1): exactly equal
        assert drs("fare hike", balanced_rel, balanced_bg) == 1.0


def test_bootstrap_reaches_fixed_point_on_planted_corpus(capsys):
    with criterion(capsys, "bootstrap recovers >=9/10 planted phrases, monotone matches, "
                           "fixed point within 5 iterations", budget=10.0):
        corpus, informative, background = make_planted_corpus()
        assert len(corpus) == 500 and len(CHAIN) == 10
        result = run(corpus, informative, background,
                     BootstrapConfig(seed_count=2, drs_threshold=10.0, max_iterations=10))

        approved = {p.text for p in result.lexicon.approved()}
        assert len(approved & set(CHAIN)) >= 9
        counts = [r.matched_post_count for r in result.reports]
        assert counts == sorted(counts)
        assert result.reports[-1].stop_reason == StopReason.FIXED_POINT
        assert result.reports[-1].iteration <= 5


def test_elastic_net_guarantees(capsys):
    with criterion(capsys, "elastic net: gradients, L1 saturation, Newton agreement, "
                           "deterministic high-accuracy CV", budget=30.0):
        rng = np.random.default_rng(12)

        # (a) analytic vs central finite differences, 50 random instances
        for _ in range(50):
            n = int(rng.integers(5, 30))
            d = int(rng.integers(1, 6))
            Z = rng.normal(size=(n, d))
            y = rng.integers(0, 2, size=n).astype(float)
            w = rng.normal(size=d)
            b = float(rng.normal())
            lam2 = float(rng.uniform(0.0, 0.5))
            uniform = np.full(n, 1.0 / n)
            _, grad_w, grad_b = _smooth_value_and_grad(Z, y, w, b, lam2, uniform)

            h = 1e-6
            fd = np.empty(d + 1)
            for j in range(d):
                step = np.zeros(d)
                step[j] = h
                up, _, _ = _smooth_value_and_grad(Z, y, w + step, b, lam2, uniform)
                down, _, _ = _smooth_value_and_grad(Z, y, w - step, b, lam2, uniform)
                fd[j] = (up - down) / (2 * h)
            up, _, _ = _smooth_value_and_grad(Z, y, w, b + h, lam2, uniform)
            down, _, _ = _smooth_value_and_grad(Z, y, w, b - h, lam2, uniform)
            fd[d] = (up - down) / (2 * h)

            analytic = np.append(grad_w, grad_b)
            rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(analytic), 1e-12)
            assert rel <= 1e-5

        # (b) L1 at 1.05x the saturation bound zeroes every weight exactly
        X = rng.normal(size=(60, 4))
        z = X @ np.array([1.2, -0.8, 0.5, 0.0]) - 0.2
        y = (rng.uniform(size=60) < 1.0 / (1.0 + np.exp(-z))).astype(float)
        Z = (X - X.mean(axis=0)) / X.std(axis=0)
        bound = float(np.max(np.abs(Z.T @ (y - y.mean()))) / len(y))
        rows = [{f"f{j}": float(v) for j, v in enumerate(row)} for row in X]
        saturated = train(rows, y.astype(int).tolist(),
                          TrainConfig(lambda1=1.05 * bound, lambda2=0.0,
                                      max_epochs=5000, tolerance=1e-13))
        assert all(w == 0.0 for w in saturated.weights)

        # (c) unregularized solution matches damped Newton per coordinate
        X = np.random.default_rng(5).normal(size=(40, 3))
        z = X @ np.array([1.5, -2.0, 0.5]) + 0.3
        y = (np.random.default_rng(5).uniform(size=40) < 1.0 / (1.0 + np.exp(-z))).astype(float)
        Z = (X - X.mean(axis=0)) / X.std(axis=0)
        A = np.hstack([Z, np.ones((40, 1))])
        theta = np.zeros(4)
        for _ in range(200):
            p = 1.0 / (1.0 + np.exp(-(A @ theta)))
            H = (A.T * (p * (1 - p))) @ A / 40 + 1e-12 * np.eye(4)
            delta = np.linalg.solve(H, A.T @ (p - y) / 40)
            theta -= delta
            if np.max(np.abs(delta)) < 1e-12:
                break
        rows = [{f"f{j}": float(v) for j, v in enumerate(row)} for row in X]
        model = train(rows, y.astype(int).tolist(),
                      TrainConfig(lambda1=0.0, lambda2=0.0, max_epochs=20000, tolerance=1e-14))
        for j in range(3):
            assert abs(model.weights[model.feature_index[f"f{j}"]] - theta[j]) <= 1e-4
        assert abs(model.bias - theta[3]) <= 1e-4

        # (d) separable 200-sample set: accurate and byte-identical across reruns
        gen = np.random.default_rng(7)
        points = []
        while len(points) < 200:
            x = gen.normal(size=2)
            if abs(x[0] + x[1]) >= 0.2:
                points.append(x)
        X = np.array(points)
        y = [int(a + b > 0) for a, b in X]
        rows = [{f"f{j}": float(v) for j, v in enumerate(row)} for row in X]
        reports = [json.dumps(cross_validate(rows, y, k=10, config=TrainConfig(rng_seed=7)).to_dict(),
                              sort_keys=True).encode()
                   for _ in range(2)]
        assert reports[0] == reports[1]
        assert json.loads(reports[0])["accuracy"] >= 0.95


def test_kappa_exact_and_chance_level(capsys):
    with criterion(capsys, "kappa: perfect=1, hand-counted table=0.6 exactly, "
                           "independent labels near 0"):
        labels = {f"t{i}": ("complaint" if i % 3 else "non_complaint") for i in range(50)}
        assert kappa(labels, dict(labels)).kappa == 1.0

        # 40 agree on complaint, 40 on non-complaint, 10+10 split:
        # po=0.8, pe=0.5, kappa=0.6 with no rounding
        a, b = {}, {}
        for i in range(100):
            if i < 40:
                a[f"t{i}"] = b[f"t{i}"] = "complaint"
            elif i < 80:
                a[f"t{i}"] = b[f"t{i}"] = "non_complaint"
            elif i < 90:
                a[f"t{i}"], b[f"t{i}"] = "complaint", "non_complaint"
            else:
                a[f"t{i}"], b[f"t{i}"] = "non_complaint", "complaint"
        assert kappa(a, b).kappa == 0.6

        coin_a, coin_b = random.Random(101), random.Random(202)
        a = {f"t{i}": ("complaint" if coin_a.random() < 0.5 else "non_complaint") for i in range(1000)}
        b = {f"t{i}": ("complaint" if coin_b.random() < 0.5 else "non_complaint") for i in range(1000)}
        assert abs(kappa(a, b).kappa) < 0.05


def test_stratified_partitions_shape(capsys):
    with criterion(capsys, "10-fold partitions disjoint, exhaustive, stratified within 1"):
        for n in (100, 137, 2000):
            shuffler = random.Random(n)
            y = [1 if i < 0.37 * n else 0 for i in range(n)]
            shuffler.shuffle(y)
            folds = stratified_folds(y, 10, seed=0)

            flat = [i for fold in folds for i in fold]
            assert sorted(flat) == list(range(n))
            assert len(flat) == len(set(flat))
            for label in (0, 1):
                per_fold = [sum(1 for i in fold if y[i] == label) for fold in folds]
                assert max(per_fold) - min(per_fold) <= 1


def test_full_pipeline_indicative(capsys):
    """Non-gating sanity run against the released dataset, when present."""
    dataset = os.environ.get("COMPLAINTMINER_DATASET")
    if not dataset:
        _announce(capsys, "SKIP", "indicative full-pipeline check "
                                  "(set COMPLAINTMINER_DATASET to a labeled corpus)")
        pytest.skip("released dataset not configured")

    from complaintminer.corpus import ingest, is_content_token
    from complaintminer.features import ALL_GROUPS, default_resources, extract_all
    from complaintminer.vectorspace import Vocabulary

    corpus = ingest(dataset).filter(lambda p: p.complaint_label is not None)
    assert len(corpus) >= 20, "need a labeled corpus for the indicative check"
    vocab = Vocabulary(t for p in corpus for t in tokenize_post(p).tokens if is_content_token(t))
    resources = default_resources(bow_vocab=vocab)
    y = [1 if p.complaint_label.value == "complaint" else 0 for p in corpus]

    scores = {}
    for group in ALL_GROUPS:
        X = [extract_all(tokenize_post(p), resources, groups=[group]).flatten() for p in corpus]
        if not any(row for row in X):
            continue
        scores[group] = cross_validate(X, y, k=10).accuracy
    ranked = sorted(scores, key=lambda g: -scores[g])
    bow_rank = ranked.index("bow") + 1
    deviation = scores["bow"] - 0.753
    _announce(capsys, "PASS", f"indicative: bag-of-words accuracy {scores['bow']:.3f} "
                              f"(rank {bow_rank}/{len(ranked)}, {deviation:+.3f} vs reference; "
                              "reported, not gated)")


def test_annotator_ui_round_trip(capsys):
    """Drives the browser client's own suite, which exercises the service."""
    frontend = Path(__file__).resolve().parent.parent / "frontend"
    if not os.environ.get("COMPLAINTMINER_UI_TESTS"):
        _announce(capsys, "SKIP", "annotator UI round trip "
                                  "(set COMPLAINTMINER_UI_TESTS=1; covered by the frontend suite)")
        pytest.skip("UI suite not requested; the backend suite runs with the UI absent")
    if not (frontend / "node_modules").exists():
        _announce(capsys, "FAIL", "annotator UI round trip (frontend not installed)")
        pytest.fail("frontend/node_modules missing; run npm install first")
    with criterion(capsys, "annotator UI round trip (frontend suite)", budget=300.0):
        done = subprocess.run(["npm", "test", "--silent"], cwd=frontend,
                              capture_output=True, text=True, timeout=280)
        assert done.returncode == 0, done.stdout + done.stderr
