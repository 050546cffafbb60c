"""Command-line pipeline: ingest, filter, split, model, test sets, evaluation.

Every artifact-writing subcommand drops a JSON manifest next to its output
recording the tool version, seed, parameters, and content digests of the
inputs, so a report can always be traced to what produced it.
"""

import argparse
import hashlib
import json
import logging
import os
import sys

from . import __version__
from .corpus import (
    build_model,
    ingest_pairs,
    load_model,
    load_pairs,
    save_model,
    save_pairs,
    select_top_nouns,
    split_corpus,
)
from .errors import DivsimError, PairFormatError
from .evaluation import (
    build_test_sets,
    compare_measures,
    default_k_grid,
    evaluate_measures,
    load_report_json,
    read_test_sets,
    summarize_ranges,
    unigram_baseline_rows,
    write_report_csv,
    write_report_json,
    write_test_sets,
)
from .measures import KINDS, MeasureSpec
from .smoothing import dwa_estimate, rank_neighbors

log = logging.getLogger(__name__)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path, command, seed, parameters, inputs):
    if os.path.isdir(out_path):
        path = os.path.join(out_path, "manifest.json")
    else:
        path = out_path + ".manifest.json"
    doc = {
        "tool": "divsim",
        "version": __version__,
        "command": command,
        "seed": seed,
        "parameters": parameters,
        "inputs": {p: _sha256(p) for p in inputs},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_measures(text, alpha):
    specs = []
    for kind in text.split(","):
        kind = kind.strip()
        if not kind:
            continue
        specs.append(MeasureSpec(kind, alpha))
    if not specs:
        raise ValueError("no measures given")
    return specs


def _parse_k_grid(text, n_nouns):
    if text == "default":
        return default_k_grid(n_nouns)
    return [int(f) for f in text.split(",") if f.strip()]


def _cmd_synth(args):
    from .synthetic import make_latent_class_pairs

    counts = make_latent_class_pairs(
        n_nouns=args.nouns,
        n_classes=args.classes,
        n_verbs=args.verbs,
        tokens_per_noun=args.tokens_per_noun,
        zipf_exponent=args.zipf,
        seed=args.seed,
    )
    save_pairs(counts, args.out)
    _write_manifest(
        args.out,
        "synth",
        args.seed,
        {
            "nouns": args.nouns,
            "classes": args.classes,
            "verbs": args.verbs,
            "tokens_per_noun": args.tokens_per_noun,
            "zipf": args.zipf,
        },
        [],
    )
    return 0


def _cmd_ingest(args):
    with open(args.pairs, "r", encoding="utf-8") as fh:
        counts = ingest_pairs(fh)
    save_pairs(counts, args.out)
    _write_manifest(args.out, "ingest", None, {}, [args.pairs])
    return 0


def _cmd_filter_nouns(args):
    counts = select_top_nouns(load_pairs(args.pairs), args.top)
    save_pairs(counts, args.out)
    _write_manifest(args.out, "filter-nouns", None, {"top": args.top}, [args.pairs])
    return 0


def _cmd_split(args):
    train, heldout = split_corpus(load_pairs(args.pairs), args.train_fraction, args.seed)
    save_pairs(train, args.train_out)
    save_pairs(heldout, args.heldout_out)
    params = {"train_fraction": args.train_fraction}
    _write_manifest(args.train_out, "split", args.seed, params, [args.pairs])
    _write_manifest(args.heldout_out, "split", args.seed, params, [args.pairs])
    return 0


def _cmd_build_model(args):
    counts = load_pairs(args.pairs)
    build_model(counts)  # validate before writing anything
    save_model(counts, args.out)
    _write_manifest(args.out, "build-model", None, {}, [args.pairs])
    return 0


def _cmd_make_testsets(args):
    model = load_model(args.model)
    heldout = load_pairs(args.heldout, model.vocab)
    sets = build_test_sets(model, heldout, args.partitions, args.seed)
    write_test_sets(model, sets, args.out)
    _write_manifest(
        args.out,
        "make-testsets",
        args.seed,
        {"partitions": args.partitions},
        [args.model, args.heldout],
    )
    return 0


def _cmd_rank(args):
    model = load_model(args.model)
    spec = MeasureSpec(args.measure, args.alpha)
    ranking = rank_neighbors(model, spec, model.noun_id(args.noun))
    if args.k < 1:
        raise ValueError(f"k must be at least 1, got {args.k}")
    k = min(args.k, len(ranking))
    names = model.vocab.nouns
    for place, (m, value) in enumerate(ranking.entries[:k], start=1):
        sys.stdout.write(f"{place}\t{names.name_of(m)}\t{value!r}\n")
    return 0


def _cmd_estimate(args):
    model = load_model(args.model)
    spec = MeasureSpec(args.measure, args.alpha)
    p = dwa_estimate(
        model,
        spec,
        model.noun_id(args.noun),
        model.verb_id(args.verb),
        args.k,
        beta=args.beta,
    )
    sys.stdout.write(f"{p!r}\n")
    return 0


def _cmd_evaluate(args):
    model = load_model(args.model)
    test_sets = read_test_sets(model, args.testsets)
    specs = _parse_measures(args.measures, args.alpha)
    k_grid = _parse_k_grid(args.k_grid, len(model.noun_set))
    report = evaluate_measures(model, specs, test_sets, k_grid, beta=args.beta)
    if args.baseline:
        report.rows.extend(unigram_baseline_rows(model, test_sets, k_grid))
        report.ranges = summarize_ranges(report.rows)
    base, ext = os.path.splitext(args.out)
    csv_path = args.out if ext == ".csv" else base + ".csv"
    json_path = base + ".json"
    write_report_csv(report, csv_path)
    write_report_json(report, json_path)
    _write_manifest(
        csv_path,
        "evaluate",
        None,
        {
            "measures": args.measures,
            "alpha": args.alpha,
            "beta": args.beta,
            "k_grid": ",".join(str(k) for k in k_grid),
            "baseline": args.baseline,
        },
        [args.model],
    )
    return 0


def _cmd_ttest(args):
    report = load_report_json(args.report)
    ks = [args.k] if args.k is not None else None
    rows = compare_measures(report.rows, args.a, args.b, ks=ks)
    sys.stdout.write("k\tt\tp\tdf\n")
    for row in rows:
        sys.stdout.write(f"{row.k}\t{row.t!r}\t{row.p!r}\t{row.df}\n")
    return 0


def _cmd_report(args):
    report = load_report_json(args.report)
    if args.csv_out:
        write_report_csv(report, args.csv_out)
        _write_manifest(args.csv_out, "report", None, {}, [args.report])
        return 0
    sys.stdout.write("measure\tk\tmean\tmin\tmax\n")
    for r in report.ranges:
        sys.stdout.write(f"{r.measure}\t{r.k}\t{r.mean!r}\t{r.min!r}\t{r.max!r}\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="divsim",
        description="Distributional similarity measures and neighbor-based cooccurrence smoothing.",
    )
    parser.add_argument("--version", action="version", version=f"divsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded latent-class pair corpus")
    p.add_argument("--nouns", type=int, default=200)
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--verbs", type=int, default=500)
    p.add_argument("--tokens-per-noun", type=int, default=250)
    p.add_argument("--zipf", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="aggregate a raw pair file into canonical TSV")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("filter-nouns", help="keep pairs of the most frequent nouns")
    p.add_argument("--pairs", required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_filter_nouns)

    p = sub.add_parser("split", help="split pair tokens into train/held-out")
    p.add_argument("--pairs", required=True)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--train-out", required=True)
    p.add_argument("--heldout-out", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("build-model", help="freeze training counts into a model file")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build_model)

    p = sub.add_parser("make-testsets", help="build decision test sets from held-out pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--heldout", required=True)
    p.add_argument("--partitions", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_make_testsets)

    p = sub.add_parser("rank", help="rank neighbors of a noun under one measure")
    p.add_argument("--model", required=True)
    p.add_argument("--measure", choices=KINDS, required=True)
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--noun", required=True)
    p.add_argument("--k", type=int, default=20)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("estimate", help="distance-weighted estimate of P(verb|noun)")
    p.add_argument("--model", required=True)
    p.add_argument("--measure", choices=KINDS, default="skew")
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--noun", required=True)
    p.add_argument("--verb", required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("evaluate", help="error-vs-k curves over the test sets")
    p.add_argument("--model", required=True)
    p.add_argument("--testsets", required=True, help="directory from make-testsets")
    p.add_argument("--measures", required=True, help="comma-separated measure kinds")
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--k-grid", default="default", help='comma-separated ks or "default"')
    p.add_argument("--baseline", action="store_true", help="add unigram baseline rows")
    p.add_argument("--out", required=True, help="report CSV path (JSON written alongside)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("ttest", help="paired t-test between two measures in a report")
    p.add_argument("--report", required=True, help="report JSON path")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_ttest)

    p = sub.add_parser("report", help="re-emit CSV or a range summary from report JSON")
    p.add_argument("--report", required=True)
    p.add_argument("--csv-out", default=None)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PairFormatError as exc:
        print(f"divsim: pair format error: {exc}", file=sys.stderr)
        return 3
    except (DivsimError, ValueError) as exc:
        print(f"divsim: error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"divsim: i/o error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
