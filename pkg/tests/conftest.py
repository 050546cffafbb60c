import numpy as np
import pytest

from divsim import PairCounts, SparseDistribution, build_model


def sd(mapping):
    return SparseDistribution.from_mapping(mapping)


def random_distribution(rng, vocab_size, max_support):
    size = int(rng.integers(1, max_support + 1))
    support = np.sort(rng.choice(vocab_size, size=size, replace=False))
    values = rng.random(size) + 1e-3
    return SparseDistribution(support, values / values.sum())


def random_pairs(seed, n_pairs, vocab_size=200, max_support=50):
    """Seeded stream of random sparse distribution pairs."""
    rng = np.random.default_rng(seed)
    return [
        (
            random_distribution(rng, vocab_size, max_support),
            random_distribution(rng, vocab_size, max_support),
        )
        for _ in range(n_pairs)
    ]


def counts_from(pairs):
    counts = PairCounts()
    for noun, verb, c in pairs:
        counts.add(noun, verb, c)
    return counts


def model_from(pairs):
    return build_model(counts_from(pairs))


@pytest.fixture
def tiny_model():
    """Three nouns with unit-mass conditionals: n1={a:1}, n2={a:1}, n3={b:1}."""
    return model_from([("n1", "a", 1), ("n2", "a", 1), ("n3", "b", 1)])


def random_model(seed, n_nouns=12, n_verbs=30, density=0.4, max_count=9):
    """Small random count table where every noun and verb gets some mass."""
    rng = np.random.default_rng(seed)
    counts = PairCounts()
    for i in range(n_nouns):
        counts.vocab.nouns.intern(f"n{i:02d}")
    for j in range(n_verbs):
        counts.vocab.verbs.intern(f"v{j:02d}")
    for i in range(n_nouns):
        drawn = rng.random(n_verbs) < density
        if not drawn.any():
            drawn[int(rng.integers(n_verbs))] = True
        for j in np.flatnonzero(drawn):
            counts.add_ids(i, int(j), int(rng.integers(1, max_count + 1)))
    return build_model(counts)
