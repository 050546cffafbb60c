"""Pseudoword evaluation: test-set construction, error curves, t-tests, reports.

Held-out (noun, verb) tokens unseen in training become (n, v1, v2) triples
where v2 is a frequency-matched decoy verb also unseen with n; a measure is
scored by how often evidence from the k nearest neighbors of n picks v1.
"""

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import stdtr

from .smoothing import Decision, rank_neighbors, top_k

log = logging.getLogger(__name__)

DEFAULT_K_BASE = (1, 5, 10, 25, 50, 100, 200, 400, 700)


@dataclass(frozen=True)
class TestTriple:
    """One decision item: noun n, correct verb v1, decoy verb v2.

    Both pairs (n, v1) and (n, v2) are unseen in training; both verbs have
    positive training frequency.
    """

    n: int
    v1: int
    v2: int


@dataclass(frozen=True)
class ReportRow:
    measure: str
    k: int
    partition: int
    error_rate: float
    n_triples: int


@dataclass(frozen=True)
class RangeRow:
    measure: str
    k: int
    mean: float
    min: float
    max: float


@dataclass(frozen=True)
class TTestRow:
    measure_a: str
    measure_b: str
    k: int
    t: float
    p: float
    df: int


@dataclass
class EvaluationReport:
    rows: list = field(default_factory=list)
    ranges: list = field(default_factory=list)
    ttests: list = field(default_factory=list)


def build_test_sets(model, heldout, partitions, seed):
    """Turn held-out pair tokens into `partitions` lists of test triples.

    Tokens whose (n, v) pair occurs in training are discarded (the task
    targets unseen pairs), as are tokens whose noun has no trained
    conditional or whose verb never occurs in training (no valid triple can
    be formed; each such drop logs a warning). Every surviving (n, v1) gets
    the decoy v2 minimizing |ln freq(v2) - ln freq(v1)| over verbs with
    positive training frequency, v2 != v1 and (n, v2) unseen; ties break by
    ascending verb string. Surviving tokens, in (noun string, verb string)
    order, are shuffled with `seed` and dealt round-robin, so the result is
    independent of the tables' internal id assignment.
    """
    if partitions < 2:
        raise ValueError(f"partitions must be at least 2, got {partitions}")
    trained = np.array(sorted(model.verb_unigram), dtype=np.int64)
    log_freq = np.log(np.array([model.verb_unigram[int(v)] for v in trained]))
    names = [model.vocab.verbs.name_of(int(v)) for v in trained]
    col_of = {int(v): i for i, v in enumerate(trained)}

    decoys = {}

    def decoy_for(n, v1, seen_cols):
        key = (n, v1)
        if key not in decoys:
            diff = np.abs(log_freq - log_freq[col_of[v1]])
            diff[seen_cols] = np.inf
            diff[col_of[v1]] = np.inf
            best = diff.min()
            if not np.isfinite(best):
                decoys[key] = None
            else:
                cands = np.flatnonzero(diff == best)
                decoys[key] = int(trained[min(cands, key=lambda i: names[i])])
        return decoys[key]

    nouns, verbs = heldout.vocab.nouns, heldout.vocab.verbs
    items = sorted(
        heldout.entries.items(),
        key=lambda item: (nouns.name_of(item[0][0]), verbs.name_of(item[0][1])),
    )
    expanded = []
    for (n, v1), count in items:
        noun = nouns.name_of(n)
        verb = verbs.name_of(v1)
        if n not in model.conditionals:
            log.warning("dropping held-out pair (%s, %s): noun has no trained distribution", noun, verb)
            continue
        dist = model.conditionals[n]
        if dist.get(v1) > 0.0:
            continue  # seen in training
        if v1 not in model.verb_unigram:
            log.warning("dropping held-out pair (%s, %s): verb unseen in training", noun, verb)
            continue
        seen_cols = np.array([col_of[int(v)] for v in dist.support], dtype=np.int64)
        v2 = decoy_for(n, v1, seen_cols)
        if v2 is None:
            log.warning("dropping held-out pair (%s, %s): no eligible decoy verb", noun, verb)
            continue
        expanded.extend([TestTriple(n, v1, v2)] * count)

    if not expanded:
        raise ValueError("no test triples survived the discard rules")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(expanded))
    sets = [[] for _ in range(partitions)]
    for j, idx in enumerate(order):
        sets[j % partitions].append(expanded[idx])
    return sets


def decide(e):
    """Map evidence counts to a decision; equal counts (including 0-0) tie."""
    if e.for_v1 > e.for_v2:
        return Decision.V1
    if e.for_v2 > e.for_v1:
        return Decision.V2
    return Decision.TIE


def error_rate(decisions):
    """(#V2 + #TIE/2) / T, treating V1 as always correct."""
    if not decisions:
        raise ValueError("cannot compute an error rate over zero decisions")
    wrong = sum(1.0 if d is Decision.V2 else 0.5 if d is Decision.TIE else 0.0 for d in decisions)
    return wrong / len(decisions)


def _ranked_rows(model, spec, n, cache):
    """Row indices of the dense matrix in ranked order for target n."""
    got = cache.get(n)
    if got is None:
        d = model.dense_view()
        ranking = rank_neighbors(model, spec, n)
        got = np.array([d.row_of[int(m)] for m in ranking.noun_ids], dtype=np.int64)
        cache[n] = got
    return got


def run_curve(model, spec, test_sets, k_grid, beta=1.0):
    """Error rate per (k, partition) for one measure.

    For each triple the ranked neighbor list of its noun is scanned once;
    cumulative counts of neighbors preferring v1 (resp. v2) give the
    evidence at every k in one pass. `beta` is accepted for interface
    symmetry with estimation but the evidence rule uses no weights.
    """
    d = model.dense_view()
    n_nouns = len(d.nouns)
    ks = sorted(set(int(k) for k in k_grid))
    for k in ks:
        if not 1 <= k <= n_nouns:
            raise ValueError(f"k must lie in [1, {n_nouns}], got {k}")
    k_idx = np.array(ks, dtype=np.int64) - 1
    cache = {}
    rows = []
    for part, triples in enumerate(test_sets):
        wrong = np.zeros(len(ks))
        for triple in triples:
            ranked = _ranked_rows(model, spec, triple.n, cache)
            p1 = d.matrix[ranked, triple.v1]
            p2 = d.matrix[ranked, triple.v2]
            pos = np.cumsum(p1 > p2)[k_idx]
            neg = np.cumsum(p2 > p1)[k_idx]
            wrong += np.where(neg > pos, 1.0, np.where(neg == pos, 0.5, 0.0))
        for i, k in enumerate(ks):
            rows.append(
                ReportRow(
                    measure=spec.label(),
                    k=k,
                    partition=part,
                    error_rate=float(wrong[i] / len(triples)),
                    n_triples=len(triples),
                )
            )
    return rows


def naive_curve_point(model, spec, triples, k):
    """Reference route for one (partition, k): explicit evidence per triple."""
    from .smoothing import evidence

    decisions = []
    for triple in triples:
        members = top_k(rank_neighbors(model, spec, triple.n), k)
        decisions.append(decide(evidence(model, members, triple.v1, triple.v2)))
    return error_rate(decisions)


def summarize_ranges(rows):
    """Per-(measure, k) mean and min/max of error rates over partitions."""
    grouped = {}
    for row in rows:
        grouped.setdefault((row.measure, row.k), []).append(row.error_rate)
    out = []
    for (measure, k), errs in sorted(grouped.items()):
        out.append(
            RangeRow(measure=measure, k=k, mean=float(np.mean(errs)), min=min(errs), max=max(errs))
        )
    return out


def paired_t_test(a, b):
    """Two-sided paired t-test; returns (t, p, df) with df = n - 1.

    Zero-variance differences degenerate: nonzero mean gives t = +/-inf with
    p = 0, all-zero differences give t = 0 with p = 1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("paired samples must be equal-length 1-d arrays with n >= 2")
    diff = a - b
    n = len(diff)
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return 0.0, 1.0, df
        return math.copysign(math.inf, mean), 0.0, df
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(stdtr(df, -abs(t)))
    return float(t), p, df


def _per_partition_errors(rows, measure, k):
    errs = {r.partition: r.error_rate for r in rows if r.measure == measure and r.k == k}
    return [errs[p] for p in sorted(errs)]


def compare_measures(rows, measure_a, measure_b, ks=None):
    """Paired t-tests of measure_a vs measure_b at each k present in rows."""
    available = sorted({r.k for r in rows if r.measure == measure_a})
    out = []
    for k in ks if ks is not None else available:
        a = _per_partition_errors(rows, measure_a, k)
        b = _per_partition_errors(rows, measure_b, k)
        if not a or len(a) != len(b):
            raise ValueError(f"measures {measure_a!r} and {measure_b!r} lack matching rows at k={k}")
        t, p, df = paired_t_test(a, b)
        out.append(TTestRow(measure_a=measure_a, measure_b=measure_b, k=k, t=t, p=p, df=df))
    return out


def evaluate_measures(model, specs, test_sets, k_grid, beta=1.0):
    """Full evaluation: rows for every measure, ranges, and pairwise t-tests."""
    report = EvaluationReport()
    for spec in specs:
        report.rows.extend(run_curve(model, spec, test_sets, k_grid, beta=beta))
    report.ranges = summarize_ranges(report.rows)
    labels = [spec.label() for spec in specs]
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            report.ttests.extend(compare_measures(report.rows, a, b))
    return report


def unigram_baseline_rows(model, test_sets, k_grid):
    """Report rows for the neighbor-free unigram baseline.

    The baseline ignores neighborhoods entirely; its per-partition error is
    replicated at every k so the rows plot alongside real measures.
    """
    from .smoothing import unigram_baseline_decide

    rows = []
    for part, triples in enumerate(test_sets):
        err = error_rate([unigram_baseline_decide(model, t.v1, t.v2) for t in triples])
        for k in sorted(set(int(k) for k in k_grid)):
            rows.append(
                ReportRow(
                    measure="unigram",
                    k=k,
                    partition=part,
                    error_rate=err,
                    n_triples=len(triples),
                )
            )
    return rows


def default_k_grid(n_nouns):
    """Stock k grid clipped to the noun count, always ending at full k."""
    if n_nouns < 1:
        raise ValueError("need at least one noun")
    return sorted(set(k for k in DEFAULT_K_BASE if k <= n_nouns) | {n_nouns})


def write_report_csv(report, path):
    """One line per (measure, k, partition); header always present."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["measure", "k", "partition", "error_rate", "n_triples"])
        for row in report.rows:
            writer.writerow([row.measure, row.k, row.partition, repr(row.error_rate), row.n_triples])


def report_to_dict(report):
    return {
        "rows": [
            {
                "measure": r.measure,
                "k": r.k,
                "partition": r.partition,
                "error_rate": r.error_rate,
                "n_triples": r.n_triples,
            }
            for r in report.rows
        ],
        "ranges": [
            {"measure": r.measure, "k": r.k, "mean": r.mean, "min": r.min, "max": r.max}
            for r in report.ranges
        ],
        "ttests": [
            {
                "measure_a": r.measure_a,
                "measure_b": r.measure_b,
                "k": r.k,
                "t": r.t,
                "p": r.p,
                "df": r.df,
            }
            for r in report.ttests
        ],
    }


def write_report_json(report, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")


def load_report_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    report = EvaluationReport()
    report.rows = [ReportRow(**r) for r in doc.get("rows", [])]
    report.ranges = [RangeRow(**r) for r in doc.get("ranges", [])]
    report.ttests = [TTestRow(**r) for r in doc.get("ttests", [])]
    return report


def _testset_path(directory, index):
    return os.path.join(directory, f"testset-{index}.tsv")


def write_test_sets(model, test_sets, directory):
    """One TSV per partition (noun, v1, v2 as strings), testset-<i>.tsv."""
    os.makedirs(directory, exist_ok=True)
    nouns = model.vocab.nouns
    verbs = model.vocab.verbs
    for i, triples in enumerate(test_sets):
        with open(_testset_path(directory, i), "w", encoding="utf-8") as fh:
            for t in triples:
                fh.write(f"{nouns.name_of(t.n)}\t{verbs.name_of(t.v1)}\t{verbs.name_of(t.v2)}\n")


def read_test_sets(model, directory):
    """Load testset-<i>.tsv partitions back into TestTriple lists."""
    indices = []
    for name in os.listdir(directory):
        if name.startswith("testset-") and name.endswith(".tsv"):
            indices.append(int(name[len("testset-") : -len(".tsv")]))
    if not indices:
        raise ValueError(f"no testset-*.tsv files in {directory}")
    indices.sort()
    if indices != list(range(len(indices))):
        raise ValueError(f"test set partitions are not contiguous: {indices}")
    sets = []
    for i in indices:
        triples = []
        with open(_testset_path(directory, i), "r", encoding="utf-8") as fh:
            for line in fh:
                fields = line.split()
                if not fields:
                    continue
                if len(fields) != 3:
                    raise ValueError(f"test set line needs 3 fields, got {len(fields)}")
                triples.append(
                    TestTriple(
                        model.noun_id(fields[0]),
                        model.verb_id(fields[1]),
                        model.verb_id(fields[2]),
                    )
                )
        sets.append(triples)
    return sets
