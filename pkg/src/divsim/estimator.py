"""Scikit-learn style estimator facade over the ranking and averaging core."""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import PairCounts, build_model, ingest_pairs, select_top_nouns
from .measures import MeasureSpec
from .smoothing import dwa_estimate, rank_neighbors

_LINE_JOIN = "\t"


class DistanceWeightedAverager(BaseEstimator):
    """Nearest-neighbor cooccurrence smoother with a fit/predict surface.

    Parameters
    ----------
    measure : str, default "skew"
        Measure kind used for neighbor ranking (l1, l2, cosine, jaccard,
        js, kl, confusion, tau, skew).
    alpha : float, default 0.99
        Mixture weight for the skew measure.
    beta : float, default 1.0
        Exponent scale for dissimilarity-to-weight conversion.
    k : int, default 10
        Neighborhood size used by predict_proba.
    top_nouns : int or None, default None
        If set, restrict the model to the most frequent nouns before
        fitting.
    """

    def __init__(self, measure="skew", alpha=0.99, beta=1.0, k=10, top_nouns=None):
        self.measure = measure
        self.alpha = alpha
        self.beta = beta
        self.k = k
        self.top_nouns = top_nouns

    def fit(self, X, y=None):
        """Build the base model from cooccurrence data.

        X may be a PairCounts table or an iterable of (noun, verb) /
        (noun, verb, count) tuples.
        """
        if isinstance(X, PairCounts):
            counts = X
        else:
            counts = ingest_pairs(_LINE_JOIN.join(str(f) for f in row) for row in X)
        if self.top_nouns is not None:
            counts = select_top_nouns(counts, self.top_nouns)
        self.spec_ = MeasureSpec(self.measure, self.alpha)
        self.model_ = build_model(counts)
        return self

    def kneighbors(self, noun, k=None):
        """Top-k (noun string, raw value) entries of the ranking for `noun`.

        The ranking includes the query noun itself (normally in first
        place); pass k = number of trained nouns to see everything.
        """
        check_is_fitted(self, "model_")
        k = self.k if k is None else k
        ranking = rank_neighbors(self.model_, self.spec_, self.model_.noun_id(noun))
        if not 1 <= k <= len(ranking):
            raise ValueError(f"k must lie in [1, {len(ranking)}], got {k}")
        names = self.model_.vocab.nouns
        return [(names.name_of(m), value) for m, value in ranking.entries[:k]]

    def predict_proba(self, noun, verb):
        """Distance-weighted average estimate of P(verb | noun)."""
        check_is_fitted(self, "model_")
        return dwa_estimate(
            self.model_,
            self.spec_,
            self.model_.noun_id(noun),
            self.model_.verb_id(verb),
            self.k,
            beta=self.beta,
        )
