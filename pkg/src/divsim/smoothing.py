"""Neighbor ranking and distance-weighted averaging over the base model.

A ranking scores every noun in the model's noun set against a target noun n,
computing f(q, r) with q = P(.|n) and r = P(.|m) for each candidate m (and
P(m) as the marginal where the measure needs it). Estimation combines the
conditional probabilities of the top-ranked neighbors, weighted by
transformed measure values.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from .errors import EstimationError, ModelConsistencyError
from .measures import kendall_tau, to_similarity_weight


class Decision(enum.Enum):
    """Outcome of a binary verb-choice comparison."""

    V1 = "v1"
    V2 = "v2"
    TIE = "tie"


@dataclass(frozen=True)
class NeighborRanking:
    """All candidate nouns ordered best-first for one target and measure.

    `noun_ids` and `values` are parallel arrays; ordering is non-worsening
    in the measure's orientation, with value ties broken by ascending
    noun id. Candidates for which an asymmetric divergence is undefined
    carry value +inf and therefore sort last.
    """

    target: int
    noun_ids: np.ndarray
    values: np.ndarray
    spec: object

    @property
    def entries(self):
        return list(zip((int(m) for m in self.noun_ids), (float(x) for x in self.values)))

    def __len__(self):
        return len(self.noun_ids)


@dataclass(frozen=True)
class Evidence:
    """Neighbor vote counts for a v1-vs-v2 comparison over a size-k set."""

    for_v1: int
    for_v2: int
    k: int

    def __post_init__(self):
        if self.for_v1 < 0 or self.for_v2 < 0 or self.for_v1 + self.for_v2 > self.k:
            raise ValueError("evidence counts must be nonnegative and sum to at most k")


def _score_all(model, spec, n):
    """Measure values f(q_n, r_m) for every candidate m, in noun_set order.

    Vectorized over the model's dense view. For kl (and skew with alpha = 1)
    candidates that violate absolute continuity score +inf rather than
    raising: a ranking must always cover the full candidate set, and +inf
    both sorts to the bottom and transforms to weight zero.
    """
    d = model.dense_view()
    t = d.matrix[d.row(n)]
    kind = spec.kind
    if kind == "l1":
        return np.abs(d.matrix - t).sum(axis=1)
    if kind == "l2":
        return np.sqrt(((d.matrix - t) ** 2).sum(axis=1))
    if kind == "cosine":
        return (d.matrix @ t) / np.sqrt(d.sq_norms * d.sq_norms[d.row(n)])
    if kind == "jaccard":
        mask = t > 0.0
        inter = (d.support_mask & mask).sum(axis=1)
        return inter / (d.support_sizes + mask.sum() - inter)
    if kind == "js":
        avg = 0.5 * (d.matrix + t)
        return 0.5 * (rel_entr(t, avg).sum(axis=1) + rel_entr(d.matrix, avg).sum(axis=1))
    if kind == "kl":
        return rel_entr(t, d.matrix).sum(axis=1)
    if kind == "skew":
        mix = spec.alpha * t + (1.0 - spec.alpha) * d.matrix
        return np.maximum(rel_entr(d.matrix, mix).sum(axis=1), 0.0)
    if kind == "confusion":
        if np.any((t > 0.0) & (d.verb_prob <= 0.0)):
            raise ModelConsistencyError(
                "verb with zero unigram probability inside a conditional support"
            )
        w = np.divide(t, d.verb_prob, out=np.zeros_like(t), where=d.verb_prob > 0.0)
        return d.marginals * (d.matrix @ w)
    # tau: per-candidate union-support enumeration (no useful dense form)
    q = model.conditional(n)
    v_size = model.verb_vocab_size
    return np.array(
        [kendall_tau(q, model.conditional(int(m)), v_size) for m in d.nouns]
    )


def rank_neighbors(model, spec, n):
    """Rank every noun in the model (including n itself) against n.

    Sorted best-first in the measure's orientation; exact value ties break
    by ascending noun id.
    """
    model.conditional(n)  # raises ValueError for unknown nouns
    d = model.dense_view()
    values = _score_all(model, spec, n)
    key = -values if spec.is_similarity else values
    order = np.lexsort((d.nouns, key))
    return NeighborRanking(
        target=int(n), noun_ids=d.nouns[order], values=values[order], spec=spec
    )


def top_k(ranking, k):
    """First k noun ids of a ranking; k must lie in [1, number of entries]."""
    if not 1 <= k <= len(ranking):
        raise ValueError(f"k must lie in [1, {len(ranking)}], got {k}")
    return [int(m) for m in ranking.noun_ids[:k]]


def evidence(model, members, v1, v2):
    """Count members with P(v1|m) > P(v2|m) and the reverse.

    Equality (including both zero) counts for neither side.
    """
    if v1 == v2:
        raise ValueError("v1 and v2 must differ")
    for_v1 = 0
    for_v2 = 0
    for m in members:
        dist = model.conditional(m)
        p1 = dist.get(v1)
        p2 = dist.get(v2)
        if p1 > p2:
            for_v1 += 1
        elif p2 > p1:
            for_v2 += 1
    return Evidence(for_v1, for_v2, len(list(members)))


def dwa_estimate(model, spec, n, v, k, beta=1.0):
    """Distance-weighted average estimate of P(v|n) from top-k neighbors.

        P_hat(v|n) = sum_m w(m) P(v|m) / sum_m w(m)

    over the k best-ranked nouns with n itself excluded; w is the measure
    value passed through to_similarity_weight. Raises EstimationError when
    no neighbor carries positive weight.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    ranking = rank_neighbors(model, spec, n)
    top_k(ranking, k)  # enforce the k range contract
    num = 0.0
    den = 0.0
    for m, value in ranking.entries[:k]:
        if m == n:
            continue
        w = to_similarity_weight(spec, value, beta)
        num += w * model.conditional(m).get(v)
        den += w
    if den == 0.0:
        raise EstimationError("no usable neighbors: all weights are zero")
    return num / den


def unigram_baseline_decide(model, v1, v2):
    """Decide between v1 and v2 from unigram probabilities alone."""
    p1 = model.verb_unigram.get(v1, 0.0)
    p2 = model.verb_unigram.get(v2, 0.0)
    if p1 > p2:
        return Decision.V1
    if p2 > p1:
        return Decision.V2
    return Decision.TIE
