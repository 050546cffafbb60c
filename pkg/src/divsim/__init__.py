"""Distributional similarity measures and nearest-neighbor smoothing.

Compares nouns by their conditional verb cooccurrence distributions under
nine measures, ranks candidate neighbors, forms distance-weighted
probability estimates for unseen pairs, and evaluates measures on a
pseudoword decision task.
"""

__version__ = "0.1.0"

from .corpus import (
    CorpusModel,
    PairCounts,
    SparseDistribution,
    Vocabulary,
    build_model,
    ingest_pairs,
    load_model,
    load_pairs,
    save_model,
    save_pairs,
    select_top_nouns,
    split_corpus,
)
from .errors import (
    DivsimError,
    EstimationError,
    ModelConsistencyError,
    PairFormatError,
    UndefinedDivergenceError,
)
from .estimator import DistanceWeightedAverager
from .evaluation import (
    EvaluationReport,
    TestTriple,
    build_test_sets,
    decide,
    default_k_grid,
    error_rate,
    evaluate_measures,
    paired_t_test,
    run_curve,
)
from .measures import (
    KINDS,
    MeasureSpec,
    SupportProfile,
    confusion,
    cosine,
    evaluate_support_form,
    jaccard,
    jensen_shannon,
    kendall_tau,
    kendall_tau_terms,
    kl,
    l1,
    l2,
    skew,
    to_similarity_weight,
)
from .smoothing import (
    Decision,
    Evidence,
    NeighborRanking,
    dwa_estimate,
    evidence,
    rank_neighbors,
    top_k,
    unigram_baseline_decide,
)
from .synthetic import make_latent_class_pairs

__all__ = [
    "__version__",
    "CorpusModel",
    "PairCounts",
    "SparseDistribution",
    "Vocabulary",
    "build_model",
    "ingest_pairs",
    "load_model",
    "load_pairs",
    "save_model",
    "save_pairs",
    "select_top_nouns",
    "split_corpus",
    "DivsimError",
    "EstimationError",
    "ModelConsistencyError",
    "PairFormatError",
    "UndefinedDivergenceError",
    "DistanceWeightedAverager",
    "EvaluationReport",
    "TestTriple",
    "build_test_sets",
    "decide",
    "default_k_grid",
    "error_rate",
    "evaluate_measures",
    "paired_t_test",
    "run_curve",
    "KINDS",
    "MeasureSpec",
    "SupportProfile",
    "confusion",
    "cosine",
    "evaluate_support_form",
    "jaccard",
    "jensen_shannon",
    "kendall_tau",
    "kendall_tau_terms",
    "kl",
    "l1",
    "l2",
    "skew",
    "to_similarity_weight",
    "Decision",
    "Evidence",
    "NeighborRanking",
    "dwa_estimate",
    "evidence",
    "rank_neighbors",
    "top_k",
    "unigram_baseline_decide",
    "make_latent_class_pairs",
]
