"""Bayesian-optimisation tuning of linear translation-model weights.

Thin facade over the C++ extension: synthetic hypergraph tasks, corpus BLEU,
a Matern-5/2 GP with expected improvement, bounded BO tuning variants, the
random-embedding variant for sparse feature blocks, and an N-best MERT
baseline.
"""

from botune._core import (  # noqa: F401
    BleuStats,
    Derivation,
    Embedding,
    GpModel,
    Hypergraph,
    NBestHyp,
    NBestList,
    Posterior,
    SyntheticTask,
    TaskParams,
    beam_prune,
    corpus_bleu,
    count_derivations,
    expected_improvement,
    generate_task,
    gp_fit,
    gp_predict,
    kbest_derivations,
    line_search,
    load_task,
    make_embedding,
    matern52,
    oracle_bleu,
    project,
    read_hypergraphs,
    read_nbest,
    rescore_all,
    save_task,
    sentence_stats,
    simulated_decode,
    simulated_decode_nbest,
    smoothed_sentence_bleu,
    test_bleu,
    tune,
    tune_mert,
    tune_rembo,
    union_graphs,
    viterbi_best,
    write_hypergraphs,
    write_nbest,
)

__all__ = [name for name in dir() if not name.startswith("_")]
