"""Seeded synthetic cooccurrence corpora with latent noun classes.

Nouns in the same class share one verb distribution; classes own disjoint
verb blocks with a Zipf-shaped profile inside each block. Useful as a
desk-scale testbed where class structure (and hence the right neighbor
set) is known by construction.
"""

import numpy as np

from .corpus import PairCounts


def make_latent_class_pairs(
    n_nouns=200,
    n_classes=10,
    n_verbs=500,
    tokens_per_noun=250,
    zipf_exponent=0.5,
    seed=1,
):
    """Sample a latent-class pair table.

    Noun i belongs to class i mod n_classes; class c emits verbs only from
    its own block of n_verbs / n_classes consecutive verb ids, with block
    profile proportional to (j + 1)^(-zipf_exponent). Each noun draws exactly
    tokens_per_noun tokens from its class profile. Names are zero-padded
    ("n007", "v042") so lexicographic order matches id order.
    """
    if n_nouns < 1 or n_verbs < 1 or tokens_per_noun < 1:
        raise ValueError("need at least one noun, one verb, and one token per noun")
    if n_classes < 1 or n_classes > n_nouns:
        raise ValueError("n_classes must lie in [1, n_nouns]")
    if n_verbs % n_classes != 0:
        raise ValueError("n_verbs must be divisible by n_classes")
    if zipf_exponent < 0.0:
        raise ValueError("zipf_exponent must be nonnegative")
    block = n_verbs // n_classes
    nw = len(str(n_nouns - 1))
    vw = len(str(n_verbs - 1))
    counts = PairCounts()
    for i in range(n_nouns):
        counts.vocab.nouns.intern(f"n{i:0{nw}d}")
    for j in range(n_verbs):
        counts.vocab.verbs.intern(f"v{j:0{vw}d}")
    profile = (np.arange(1, block + 1, dtype=np.float64)) ** (-zipf_exponent)
    profile /= profile.sum()
    rng = np.random.default_rng(seed)
    for i in range(n_nouns):
        cls = i % n_classes
        drawn = rng.multinomial(tokens_per_noun, profile)
        for j, c in enumerate(drawn):
            if c > 0:
                counts.add_ids(i, cls * block + j, int(c))
    return counts
