"""Similarity and dissimilarity functions between sparse verb distributions.

Every binary function takes two SparseDistribution arguments. Logarithms are
natural throughout, and 0 * ln 0 counts as 0 in the entropy-style sums. The
support-set rewritten forms (evaluate_support_form) recompute a subset of the
measures from intersection statistics only and serve as independent oracles
for the definitional code paths.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr, xlogy

from .errors import DivsimError, ModelConsistencyError, UndefinedDivergenceError

LN2 = math.log(2.0)

KINDS = ("l1", "l2", "cosine", "jaccard", "js", "kl", "confusion", "tau", "skew")
SIMILARITIES = frozenset({"cosine", "jaccard", "confusion", "tau"})
SUPPORT_FORM_KINDS = frozenset({"l1", "l2", "cosine", "jaccard", "js", "confusion"})

REL_TOL = 1e-9
ABS_TOL = 1e-12


@dataclass(frozen=True)
class MeasureSpec:
    """One measure identified by its lowercase CLI name, plus parameters.

    `alpha` only matters for kind "skew". Orientation is fixed per kind:
    cosine, jaccard, confusion and tau are similarities (higher is closer),
    the rest are dissimilarities (lower is closer).
    """

    kind: str
    alpha: float = 0.99

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind: {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")

    @property
    def is_similarity(self):
        return self.kind in SIMILARITIES

    @property
    def orientation(self):
        return "similarity" if self.is_similarity else "dissimilarity"

    def label(self):
        """Stable identifier used in report rows and CLI flags."""
        return self.kind


@dataclass(frozen=True)
class SupportProfile:
    """The support sets V_q, V_r and their intersection V_qr for one pair."""

    v_q: frozenset
    v_r: frozenset
    v_qr: frozenset

    def __post_init__(self):
        if self.v_qr != self.v_q & self.v_r:
            raise ValueError("v_qr must equal v_q ∩ v_r")

    @classmethod
    def of(cls, q, r):
        v_q = frozenset(int(v) for v in q.support)
        v_r = frozenset(int(v) for v in r.support)
        return cls(v_q, v_r, v_q & v_r)


def _aligned(q, r):
    """Dense value vectors for q and r over their sorted union support."""
    union = np.union1d(q.support, r.support)
    qd = np.zeros(union.size)
    rd = np.zeros(union.size)
    qd[np.searchsorted(union, q.support)] = q.probs
    rd[np.searchsorted(union, r.support)] = r.probs
    return union, qd, rd


def _intersection(q, r):
    """Parallel q and r values on the shared support, plus its verb ids."""
    common, qi, ri = np.intersect1d(
        q.support, r.support, assume_unique=True, return_indices=True
    )
    return common, q.probs[qi], r.probs[ri]


def l1(q, r):
    """L1 (total variation style) distance: sum_v |q(v) - r(v)|, in [0, 2]."""
    _, qd, rd = _aligned(q, r)
    return float(np.abs(qd - rd).sum())


def l2(q, r):
    """Euclidean distance: sqrt(sum_v (q(v) - r(v))^2), in [0, sqrt(2)]."""
    _, qd, rd = _aligned(q, r)
    return float(np.sqrt(((qd - rd) ** 2).sum()))


def cosine(q, r):
    """cos(q, r) = sum_v q(v) r(v) / (|q| |r|), in [0, 1] for distributions."""
    _, qv, rv = _intersection(q, r)
    denom = math.sqrt(float((q.probs**2).sum()) * float((r.probs**2).sum()))
    return float((qv * rv).sum()) / denom


def jaccard(q, r):
    """|V_q ∩ V_r| / |V_q ∪ V_r|: purely combinatorial, values in [0, 1]."""
    common = np.intersect1d(q.support, r.support, assume_unique=True)
    return common.size / (len(q) + len(r) - common.size)


def kl(q, r):
    """KL divergence D(q || r) = sum_v q(v) ln(q(v) / r(v)).

    Only defined when q is absolutely continuous w.r.t. r, i.e.
    support(q) ⊆ support(r); otherwise raises UndefinedDivergenceError.
    """
    idx = np.searchsorted(r.support, q.support)
    if np.any(idx == len(r.support)) or np.any(
        r.support[np.minimum(idx, len(r.support) - 1)] != q.support
    ):
        raise UndefinedDivergenceError(
            "KL undefined: support(q) is not contained in support(r)"
        )
    return float(rel_entr(q.probs, r.probs[idx]).sum())


def jensen_shannon(q, r):
    """JS(q, r) = (D(q || avg) + D(r || avg)) / 2 with avg = (q + r) / 2.

    Always defined; symmetric; values in [0, ln 2].
    """
    _, qd, rd = _aligned(q, r)
    avg = 0.5 * (qd + rd)
    return float(0.5 * (rel_entr(qd, avg).sum() + rel_entr(rd, avg).sum()))


def confusion(q, r, p_m, model):
    """Confusion probability P(m) * sum_{v in V_qr} q(v) r(v) / P(v).

    `p_m` is the candidate noun's marginal P(m); `model` supplies the verb
    unigram P(v) and may be a CorpusModel or a plain {verb-id: P(v)} mapping.
    Zero iff the supports are disjoint (or P(m) = 0).
    """
    table = getattr(model, "verb_unigram", model)
    common, qv, rv = _intersection(q, r)
    if common.size == 0:
        return 0.0
    pv = np.array([table.get(int(v), 0.0) for v in common])
    if np.any(pv <= 0.0):
        raise ModelConsistencyError(
            "verb with zero unigram probability inside a conditional support"
        )
    return float(p_m * (qv * rv / pv).sum())


def kendall_tau_terms(q, r, v_size):
    """Exact integer numerator and denominator of tau over a v_size vocabulary.

    The numerator counts unordered verb pairs: sum over {v1, v2} of
    sign[(q(v1) - q(v2)) (r(v1) - r(v2))], ties contributing 0; the
    denominator is C(v_size, 2). Pairs with both verbs outside V_q ∪ V_r are
    all-tied and contribute nothing; pairs with exactly one verb inside
    contribute sign[q(v) r(v)], i.e. 1 per shared-support verb per outside
    verb. Only union-support pairs need explicit enumeration.
    """
    union, qd, rd = _aligned(q, r)
    u = union.size
    if v_size < 2:
        raise ValueError("v_size must be at least 2")
    if v_size < u:
        raise ValueError(f"v_size ({v_size}) smaller than the union support ({u})")
    iu, ju = np.triu_indices(u, k=1)
    signs = (np.sign(qd[iu] - qd[ju]) * np.sign(rd[iu] - rd[ju])).astype(np.int64)
    shared = int(np.count_nonzero((qd > 0.0) & (rd > 0.0)))
    num = int(signs.sum()) + shared * (v_size - u)
    den = v_size * (v_size - 1) // 2
    return num, den


def kendall_tau(q, r, v_size):
    """Kendall's tau-a rank correlation over the full verb vocabulary.

    Every unordered pair of distinct verbs counts once, ties score zero,
    and the denominator is C(v_size, 2) regardless of ties, so values lie
    in [-1, 1].
    """
    num, den = kendall_tau_terms(q, r, v_size)
    return num / den


def skew(q, r, alpha):
    """Skew divergence s_alpha(q, r) = D(r || alpha*q + (1 - alpha)*r).

    Defined for every pair when alpha < 1 (the mixture dominates r); at
    alpha = 1 it degenerates to D(r || q) and requires
    support(r) ⊆ support(q). Disjoint supports give -ln(1 - alpha).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    _, qd, rd = _aligned(q, r)
    mix = alpha * qd + (1.0 - alpha) * rd
    val = float(rel_entr(rd, mix).sum())
    if not math.isfinite(val):
        raise UndefinedDivergenceError(
            "KL undefined: alpha = 1 and support(r) is not contained in support(q)"
        )
    # mixture rounding can leave a ~1e-18 negative residue at q = r
    return max(val, 0.0)


def _h(x):
    # h(x) = -x ln x with h(0) = 0
    return -xlogy(x, x)


def evaluate_support_form(spec, q, r, p_m=None, model=None):
    """Evaluate a measure from its support-set rewritten form.

    These forms iterate only over the intersection support V_qr plus
    per-distribution totals, and must agree with the definitional functions
    to 1e-9 relative tolerance. Supported kinds: l1, l2, cosine, jaccard,
    js, confusion. The l1 form uses the sign-corrected identity
    2 + sum_{V_qr}(|q - r| - q - r); the js form uses
    ln 2 + (1/2) sum_{V_qr}(h(q + r) - h(q) - h(r)).
    """
    if spec.kind not in SUPPORT_FORM_KINDS:
        raise ValueError(f"no support form for measure kind {spec.kind!r}")
    common, qv, rv = _intersection(q, r)
    if spec.kind == "l1":
        return float(2.0 + (np.abs(qv - rv) - qv - rv).sum())
    if spec.kind == "l2":
        sq = float((q.probs**2).sum() - 2.0 * (qv * rv).sum() + (r.probs**2).sum())
        return math.sqrt(max(sq, 0.0))
    if spec.kind == "cosine":
        denom = math.sqrt(float((q.probs**2).sum()) * float((r.probs**2).sum()))
        return float((qv * rv).sum()) / denom
    if spec.kind == "jaccard":
        return common.size / (len(q) + len(r) - common.size)
    if spec.kind == "js":
        return float(LN2 + 0.5 * (_h(qv + rv) - _h(qv) - _h(rv)).sum())
    # confusion
    if common.size == 0:
        return 0.0
    table = getattr(model, "verb_unigram", model)
    pv = np.array([table.get(int(v), 0.0) for v in common])
    if np.any(pv <= 0.0):
        raise ModelConsistencyError(
            "verb with zero unigram probability inside a conditional support"
        )
    return float(p_m * (qv * rv / pv).sum())


def to_similarity_weight(spec, value, beta=1.0):
    """Map a raw measure value to the nonnegative weight used by averaging.

    Similarities pass through unchanged, except tau which is rescaled from
    [-1, 1] to [0, 1] via (tau + 1) / 2 so that tau = -1 (extreme
    dissimilarity) gets weight 0. Dissimilarities d map to exp(-beta * d).
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    if spec.is_similarity:
        w = (value + 1.0) / 2.0 if spec.kind == "tau" else value
    else:
        w = math.exp(-beta * value)
    if w < 0.0:
        raise DivsimError(f"internal error: negative similarity weight {w!r}")
    return w
