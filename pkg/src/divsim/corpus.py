"""Cooccurrence ingestion, filtering, splitting, and the base language model.

The base model holds unsmoothed relative frequencies: a conditional verb
distribution per noun, verb unigram probabilities, and noun marginals, all
derived from integer token counts.
"""

import json
import logging

import numpy as np

from .errors import PairFormatError

log = logging.getLogger(__name__)

PROB_SUM_TOL = 1e-12

MODEL_FORMAT = "divsim-model"
MODEL_VERSION = 1


class Interner:
    """Bidirectional string <-> integer-id table; ids follow first-seen order."""

    def __init__(self, names=()):
        self._names = list(names)
        self._ids = {name: i for i, name in enumerate(self._names)}
        if len(self._ids) != len(self._names):
            raise ValueError("duplicate names in interning table")

    def intern(self, name):
        i = self._ids.get(name)
        if i is None:
            i = len(self._names)
            self._ids[name] = i
            self._names.append(name)
        return i

    def id_of(self, name):
        return self._ids[name]

    def name_of(self, i):
        return self._names[i]

    def __contains__(self, name):
        return name in self._ids

    def __len__(self):
        return len(self._names)

    @property
    def names(self):
        return tuple(self._names)


class Vocabulary:
    """Separate interning tables for noun and verb strings."""

    def __init__(self, nouns=None, verbs=None):
        self.nouns = nouns if nouns is not None else Interner()
        self.verbs = verbs if verbs is not None else Interner()


class PairCounts:
    """Aggregated (noun, verb) -> token count table with per-word totals.

    Entries with count zero are never stored; all counts are nonnegative
    integers.
    """

    def __init__(self, vocab=None):
        self.vocab = vocab if vocab is not None else Vocabulary()
        self.entries = {}
        self.noun_totals = {}
        self.verb_totals = {}

    def add(self, noun, verb, count=1):
        self.add_ids(self.vocab.nouns.intern(noun), self.vocab.verbs.intern(verb), count)

    def add_ids(self, noun_id, verb_id, count):
        if count < 0:
            raise ValueError("counts must be nonnegative")
        if count == 0:
            return
        key = (noun_id, verb_id)
        self.entries[key] = self.entries.get(key, 0) + count
        self.noun_totals[noun_id] = self.noun_totals.get(noun_id, 0) + count
        self.verb_totals[verb_id] = self.verb_totals.get(verb_id, 0) + count

    @property
    def total(self):
        return sum(self.entries.values())

    def sorted_items(self):
        return sorted(self.entries.items())

    def as_string_dict(self):
        """Nested {noun: {verb: count}} keyed by strings (id-assignment independent)."""
        out = {}
        for (n, v), c in self.entries.items():
            out.setdefault(self.vocab.nouns.name_of(n), {})[self.vocab.verbs.name_of(v)] = c
        return out

    def __eq__(self, other):
        if not isinstance(other, PairCounts):
            return NotImplemented
        return self.as_string_dict() == other.as_string_dict()

    def __len__(self):
        return len(self.entries)

    def validate(self):
        """Check internal consistency of totals against entries."""
        noun_sums = {}
        verb_sums = {}
        for (n, v), c in self.entries.items():
            if c <= 0:
                raise ValueError(f"stored entry with nonpositive count: {(n, v, c)}")
            noun_sums[n] = noun_sums.get(n, 0) + c
            verb_sums[v] = verb_sums.get(v, 0) + c
        if noun_sums != self.noun_totals or verb_sums != self.verb_totals:
            raise ValueError("per-word totals disagree with entries")


def ingest_pairs(lines, vocab=None):
    """Aggregate a line-oriented pair stream into a PairCounts table.

    Each nonempty line is "noun<TAB>verb" (count 1) or "noun<TAB>verb<TAB>count";
    any whitespace run separates fields. Duplicate lines accumulate. Vocabulary
    is interned in first-seen order; pass an existing `vocab` to share id space
    with a previously built table.
    """
    counts = PairCounts(vocab)
    for line_no, raw in enumerate(lines, start=1):
        fields = raw.split()
        if not fields:
            continue
        if len(fields) == 2:
            noun, verb = fields
            count = 1
        elif len(fields) == 3:
            noun, verb = fields[0], fields[1]
            try:
                count = int(fields[2])
            except ValueError:
                raise PairFormatError(line_no, f"count is not an integer: {fields[2]!r}") from None
            if count < 0:
                raise PairFormatError(line_no, f"negative count: {count}")
        else:
            raise PairFormatError(line_no, f"expected 2 or 3 fields, got {len(fields)}")
        counts.add(noun, verb, count)
    return counts


def select_top_nouns(counts, top):
    """Keep only pairs whose noun ranks among the `top` most frequent.

    Frequency ties break by ascending noun string. Asking for more nouns
    than exist keeps everything. The vocabulary object is shared, so ids
    are stable across the filter.
    """
    if top < 1:
        raise ValueError("top must be >= 1")
    ranked = sorted(
        counts.noun_totals.items(),
        key=lambda item: (-item[1], counts.vocab.nouns.name_of(item[0])),
    )
    keep = {noun_id for noun_id, _ in ranked[:top]}
    out = PairCounts(counts.vocab)
    for (n, v), c in counts.sorted_items():
        if n in keep:
            out.add_ids(n, v, c)
    return out


def split_corpus(counts, train_fraction, seed):
    """Split pair tokens into a training and a held-out table.

    Every token (count unit) lands in the training side independently with
    probability `train_fraction`; the draw is a per-entry binomial from a
    seeded numpy PCG64 generator. Randomness is consumed in (noun string,
    verb string) order, so the same seed reproduces the same split even if
    the table was rebuilt with a different id assignment. The two outputs
    partition the input exactly and share the input's vocabulary.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train = PairCounts(counts.vocab)
    heldout = PairCounts(counts.vocab)
    nouns, verbs = counts.vocab.nouns, counts.vocab.verbs
    items = sorted(
        counts.entries.items(),
        key=lambda item: (nouns.name_of(item[0][0]), verbs.name_of(item[0][1])),
    )
    if items:
        totals = np.array([c for _, c in items], dtype=np.int64)
        to_train = rng.binomial(totals, train_fraction)
        for ((n, v), c), t in zip(items, to_train):
            train.add_ids(n, v, int(t))
            heldout.add_ids(n, v, c - int(t))
    return train, heldout


class SparseDistribution:
    """Probability distribution over verb ids with explicit sparse support.

    `support` is a strictly increasing int64 array; `probs` holds the
    matching strictly positive probabilities, summing to 1 within 1e-12.
    Instances are immutable (the arrays are marked read-only).
    """

    __slots__ = ("support", "probs")

    def __init__(self, support, probs, validate=True):
        support = np.asarray(support, dtype=np.int64)
        probs = np.asarray(probs, dtype=np.float64)
        if validate:
            if support.ndim != 1 or probs.ndim != 1 or len(support) != len(probs):
                raise ValueError("support and probs must be parallel 1-d arrays")
            if len(support) == 0:
                raise ValueError("a distribution needs nonempty support")
            if np.any(np.diff(support) <= 0):
                raise ValueError("support ids must be strictly increasing")
            if np.any(probs <= 0.0):
                raise ValueError("probabilities must be strictly positive on the support")
            if abs(float(probs.sum()) - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        support = support.copy()
        probs = probs.copy()
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    def __setattr__(self, name, value):
        raise AttributeError("SparseDistribution is immutable")

    @classmethod
    def from_mapping(cls, mapping):
        ids = sorted(mapping)
        return cls(ids, [mapping[i] for i in ids])

    @classmethod
    def from_counts(cls, support, counts):
        counts = np.asarray(counts, dtype=np.float64)
        return cls(support, counts / counts.sum())

    def get(self, verb_id):
        """Probability of one verb id (0.0 off support)."""
        i = np.searchsorted(self.support, verb_id)
        if i < len(self.support) and self.support[i] == verb_id:
            return float(self.probs[i])
        return 0.0

    def to_dict(self):
        return {int(v): float(p) for v, p in zip(self.support, self.probs)}

    def __len__(self):
        return len(self.support)

    def __eq__(self, other):
        if not isinstance(other, SparseDistribution):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(
            self.probs, other.probs
        )

    def __repr__(self):
        return f"SparseDistribution({len(self)} verbs)"


class CorpusModel:
    """Immutable unsmoothed relative-frequency model built from training counts.

    Holds one conditional verb distribution per retained noun, verb unigram
    probabilities, noun marginals, and the verb vocabulary size. Safe for
    unrestricted shared reads; the dense array view used by ranking is built
    lazily and cached.
    """

    def __init__(self, conditionals, verb_unigram, noun_marginal, verb_vocab_size, noun_set, vocab):
        self.conditionals = conditionals
        self.verb_unigram = verb_unigram
        self.noun_marginal = noun_marginal
        self.verb_vocab_size = verb_vocab_size
        self.noun_set = tuple(noun_set)
        self.vocab = vocab
        self._dense = None

    def conditional(self, noun_id):
        try:
            return self.conditionals[noun_id]
        except KeyError:
            raise ValueError(f"unknown noun id: {noun_id}") from None

    def noun_id(self, name):
        """Resolve a noun string to a retained noun id."""
        if name not in self.vocab.nouns:
            raise ValueError(f"unknown noun: {name!r}")
        nid = self.vocab.nouns.id_of(name)
        if nid not in self.conditionals:
            raise ValueError(f"noun has no training occurrences: {name!r}")
        return nid

    def verb_id(self, name):
        if name not in self.vocab.verbs:
            raise ValueError(f"unknown verb: {name!r}")
        return self.vocab.verbs.id_of(name)

    def dense_view(self):
        """Cached dense-array view over (noun row, verb column) used by ranking."""
        if self._dense is None:
            self._dense = _DenseView(self)
        return self._dense

    def validate(self):
        """Recheck the model invariants (used by tests)."""
        for nid, dist in self.conditionals.items():
            if abs(float(dist.probs.sum()) - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"conditional for noun {nid} does not sum to 1")
        for label, table in (("verb", self.verb_unigram), ("noun", self.noun_marginal)):
            s = float(np.sum(np.fromiter(table.values(), dtype=np.float64)))
            if abs(s - 1.0) > PROB_SUM_TOL:
                raise ValueError(f"{label} probabilities sum to {s!r}, not 1")
        covered = set()
        for dist in self.conditionals.values():
            covered.update(int(v) for v in dist.support)
        if set(self.verb_unigram) != covered:
            raise ValueError("verb unigram support disagrees with conditionals")


class _DenseView:
    """Dense matrices and per-row statistics backing vectorized scoring."""

    def __init__(self, model):
        nouns = np.array(model.noun_set, dtype=np.int64)
        width = len(model.vocab.verbs)
        matrix = np.zeros((len(nouns), width), dtype=np.float64)
        support_cols = []
        for row, nid in enumerate(nouns):
            dist = model.conditionals[int(nid)]
            matrix[row, dist.support] = dist.probs
            support_cols.append(dist.support)
        self.nouns = nouns
        self.row_of = {int(nid): row for row, nid in enumerate(nouns)}
        self.matrix = matrix
        self.support_cols = support_cols
        self.support_sizes = np.array([len(s) for s in support_cols], dtype=np.int64)
        self.support_mask = matrix > 0.0
        self.sq_norms = np.einsum("ij,ij->i", matrix, matrix)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(matrix > 0.0, np.log(np.where(matrix > 0.0, matrix, 1.0)), 0.0)
        self.entropies = -(matrix * logs).sum(axis=1)
        self.marginals = np.array(
            [model.noun_marginal[int(nid)] for nid in nouns], dtype=np.float64
        )
        verb_prob = np.zeros(width, dtype=np.float64)
        for vid, p in model.verb_unigram.items():
            verb_prob[vid] = p
        self.verb_prob = verb_prob

    def row(self, noun_id):
        return self.row_of[int(noun_id)]


def build_model(train):
    """Derive the base model from training counts.

    Conditionals, unigram probabilities, and marginals are plain relative
    frequencies; nouns without training tokens are dropped from the noun set.
    """
    if not train.entries:
        raise ValueError("cannot build a model from an empty training set")
    total = train.total
    by_noun = {}
    for (n, v), c in train.sorted_items():
        by_noun.setdefault(n, []).append((v, c))
    conditionals = {}
    for n in sorted(by_noun):
        verbs, counts = zip(*by_noun[n])
        conditionals[n] = SparseDistribution.from_counts(verbs, counts)
    verb_unigram = {v: c / total for v, c in sorted(train.verb_totals.items())}
    noun_marginal = {n: c / total for n, c in sorted(train.noun_totals.items())}
    return CorpusModel(
        conditionals=conditionals,
        verb_unigram=verb_unigram,
        noun_marginal=noun_marginal,
        verb_vocab_size=len(verb_unigram),
        noun_set=sorted(conditionals),
        vocab=train.vocab,
    )


def save_pairs(counts, path):
    """Write a pair table as canonical UTF-8 TSV (noun, verb, count).

    Rows are sorted by noun then verb string, so equal tables serialize to
    equal bytes no matter what order the pairs were ingested in.
    """
    nouns, verbs = counts.vocab.nouns, counts.vocab.verbs
    rows = sorted(
        (nouns.name_of(n), verbs.name_of(v), c) for (n, v), c in counts.entries.items()
    )
    with open(path, "w", encoding="utf-8") as fh:
        for noun, verb, c in rows:
            fh.write(f"{noun}\t{verb}\t{c}\n")


def load_pairs(path, vocab=None):
    with open(path, "r", encoding="utf-8") as fh:
        return ingest_pairs(fh, vocab)


def save_model(train_counts, path):
    """Serialize training counts plus string tables as a versioned JSON model file."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "nouns": list(train_counts.vocab.nouns.names),
        "verbs": list(train_counts.vocab.verbs.names),
        "counts": [[n, v, c] for (n, v), c in train_counts.sorted_items()],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_model_counts(path):
    """Read a model file back into a PairCounts with its original id space."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a divsim model file: {path}")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version: {doc.get('version')}")
    vocab = Vocabulary(Interner(doc["nouns"]), Interner(doc["verbs"]))
    counts = PairCounts(vocab)
    for n, v, c in doc["counts"]:
        counts.add_ids(int(n), int(v), int(c))
    return counts


def load_model(path):
    return build_model(load_model_counts(path))
