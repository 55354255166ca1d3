"""End-to-end smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import botune


@pytest.fixture(scope="module")
def task():
    p = botune.TaskParams()
    p.sentences = 8
    p.core_dims = 6
    p.vocab = 25
    p.depth = 4
    p.beam = 3
    p.seed = 99
    return botune.generate_task(p)


def test_bleu_identity():
    stats = botune.sentence_stats(["a", "b", "c", "d"], ["a", "b", "c", "d"])
    assert botune.corpus_bleu(stats) == 1.0
    assert list(stats.matches) == [4, 3, 2, 1]


def test_bleu_mismatch_is_zero():
    stats = botune.sentence_stats(["x", "y"], ["a", "b", "c", "d"])
    assert botune.corpus_bleu(stats) == 0.0


def test_oracle_and_viterbi(task):
    assert botune.oracle_bleu(task) == 1.0
    graphs = botune.simulated_decode(task, task.true_weights)
    assert len(graphs) == 8
    for g, ref in zip(graphs, task.dev_refs):
        d = botune.viterbi_best(g, task.true_weights)
        assert d.yield_tokens == ref


def test_union_counts(task):
    graphs = botune.simulated_decode(task, task.true_weights)
    merged = botune.union_graphs(graphs, graphs)
    for g, m in zip(graphs, merged):
        assert botune.count_derivations(m) == 2 * botune.count_derivations(g)


def test_gp_and_ei():
    rng = np.random.default_rng(5)
    xs = rng.uniform(size=(25, 2))
    ys = np.sin(3 * xs[:, 0]) + xs[:, 1]
    model = botune.gp_fit(xs, ys)
    post = botune.gp_predict(model, xs[0])
    assert abs(post.mean - ys[0]) < 0.3
    assert post.variance >= 0.0
    ei = botune.expected_improvement(botune.Posterior(0.0, 1.0), 0.0)
    assert math.isclose(ei, 1.0 / math.sqrt(2 * math.pi), rel_tol=1e-12)
    assert botune.expected_improvement(botune.Posterior(0.3, 0.0), 0.0) == 0.3


def test_embedding_box_guarantee():
    emb = botune.make_embedding(40, 6, seed=3)
    z = np.full(6, 0.1)
    w = botune.project(emb, z)
    assert np.max(np.abs(w)) <= 0.1 + 1e-12
    rows = np.abs(np.asarray(emb.reg)).sum(axis=1)
    assert np.allclose(rows, 1.0, atol=1e-12)


def test_tuning_improves_perturbed_start(task):
    rng = np.random.default_rng(7)
    w0 = np.asarray(task.true_weights) + rng.choice([-0.3, 0.3], size=task.dim)
    rec = botune.tune(task, "hg-bo", w0, inner_iters=25, outer_iters=3,
                      init_samples=6, candidate_pool=300, seed=11)
    assert rec["final_dev_bleu"] >= rec["iterations"][0]["dev_bleu"]
    assert 0.0 <= rec["final_dev_bleu"] <= 1.0
    # reproducibility of the python entry point
    rec2 = botune.tune(task, "hg-bo", w0, inner_iters=25, outer_iters=3,
                       init_samples=6, candidate_pool=300, seed=11)
    assert rec["final_dev_bleu"] == rec2["final_dev_bleu"]
    assert np.array_equal(rec["final_weights"], rec2["final_weights"])


def test_mert_runs(task):
    w0 = np.zeros(task.dim)
    rec = botune.tune_mert(task, w0, outer_iters=3, nbest_size=30, seed=2)
    assert rec["iterations"]
    assert rec["final_dev_bleu"] >= rec["iterations"][0]["dev_bleu"]


def test_line_search_two_hypotheses():
    lists = [botune.NBestList(0, [
        botune.NBestHyp(["a", "a", "b", "b"], [(0, 3.0)], 0.0),
        botune.NBestHyp(["c", "c", "d", "d"], [(1, 2.0)], 0.0),
    ])]
    refs = [["c", "c", "d", "d"]]
    gamma, bleu = botune.line_search(lists, refs, np.array([1.0, 0.0]),
                                     np.array([0.0, 1.0]))
    assert bleu == 1.0
    assert gamma == pytest.approx(2.5)
