"""Command-line interface.

Subcommands: extract (images -> descriptor file), index (descriptors ->
search index), query (classify a query set, CSV to stdout or file), synth
(generate a synthetic dataset), bench (method comparison CSV), sweep
(budget sweep CSV) and validate (distance-asymptotics check).
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from .descriptor import build_smoothing_kernel, extract_descriptor, load_descriptors, save_descriptors
from .image import median_filter, read_pgm
from .metrics import MetricConfig
from .search import SearchConfig, build_index, load_index, save_index, search
from .synth import SynthSpec, generate_synthetic

QUERY_CSV_COLUMNS = ("query_id", "predicted", "true", "distance", "l_checks", "elapsed_us", "early")


def _parse_grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like '10x10', got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _parse_fractions(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from None


def _label_from_name(path: Path, fallback: int) -> int:
    m = re.match(r"(\d+)", path.stem)
    return int(m.group(1)) if m else fallback


def _cmd_extract(args) -> int:
    src = Path(args.input)
    files = sorted(src.glob("*.pgm")) if src.is_dir() else [src]
    if not files:
        print(f"no .pgm files under {src}", file=sys.stderr)
        return 1
    rows, cols = args.grid
    kernel = build_smoothing_kernel(args.bins, args.sigma)
    descriptors = []
    for i, f in enumerate(files):
        img = read_pgm(f)
        if args.median:
            img = median_filter(img)
        descriptors.append(
            extract_descriptor(
                img,
                rows=rows,
                cols=cols,
                bins=args.bins,
                weighted=not args.no_weight,
                kernel=kernel,
                label=_label_from_name(f, i),
            )
        )
    save_descriptors(args.out, descriptors)
    print(f"wrote {len(descriptors)} descriptors to {args.out}")
    return 0


def _cmd_index(args) -> int:
    models = load_descriptors(args.desc)
    metric = MetricConfig(kind=args.metric, delta=args.delta)
    index = build_index(models, metric, beta=args.beta)
    save_index(args.out, index)
    print(
        f"indexed {index.num_models} models: rho0={index.rho0:.6g} "
        f"r1={index.r1} nK={index.nk:.6g} -> {args.out}"
    )
    return 0


def _cmd_query(args) -> int:
    index = load_index(args.idx)
    queries = load_descriptors(args.desc)
    cfg = SearchConfig(
        method=args.method,
        e_max=args.emax,
        m=args.m,
        t=args.t,
        phi_variant=args.phi,
        permsort_pivots=args.pivots,
        permsort_fraction=args.fraction,
    )
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(QUERY_CSV_COLUMNS)
        for qid, query in enumerate(queries):
            t0 = time.perf_counter()
            res = search(index, query, cfg)
            elapsed_us = int(round((time.perf_counter() - t0) * 1e6))
            writer.writerow(
                [
                    qid,
                    res.predicted_label,
                    query.label,
                    f"{res.distance:.9g}",
                    res.l_checks,
                    elapsed_us,
                    int(res.terminated_early),
                ]
            )
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_synth(args) -> int:
    rows, cols = args.grid
    spec = SynthSpec(
        classes=args.classes,
        rows=rows,
        cols=cols,
        bins=args.bins,
        samples_per_block=args.samples,
        queries_per_class=args.queries,
        dirichlet_alpha=args.alpha,
        seed=args.seed,
    )
    models, queries = generate_synthetic(spec)
    models_path = f"{args.out}_models.hgd"
    queries_path = f"{args.out}_queries.hgd"
    save_descriptors(models_path, models)
    save_descriptors(queries_path, queries)
    print(f"wrote {len(models)} models to {models_path}")
    print(f"wrote {len(queries)} queries to {queries_path}")
    return 0


def _cmd_bench(args) -> int:
    models = load_descriptors(args.models)
    queries = load_descriptors(args.queries)
    metric = MetricConfig(kind=args.metric, delta=args.delta)
    r = len(models)
    e_max = max(1, math.ceil(args.emax_frac * r))
    configs = [
        SearchConfig(
            method=method,
            e_max=e_max,
            m=args.m,
            t=args.t,
            permsort_pivots=args.pivots,
            permsort_fraction=args.fraction,
        )
        for method in args.methods.split(",")
    ]
    report = bench_mod.run_benchmark(models, queries, metric, configs, beta=args.beta)
    text = report.to_csv()
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8")
        print(f"wrote benchmark CSV to {args.csv}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    models = load_descriptors(args.models)
    queries = load_descriptors(args.queries)
    metric = MetricConfig(kind=args.metric, delta=args.delta)
    points = bench_mod.sweep_emax(
        models, queries, metric, args.method, _parse_fractions(args.fractions), beta=args.beta
    )
    text = bench_mod.sweep_to_csv(points)
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8")
        print(f"wrote sweep CSV to {args.csv}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    rows, cols = args.grid
    spec = SynthSpec(
        classes=1,
        rows=rows,
        cols=cols,
        bins=args.bins,
        samples_per_block=args.samples,
        queries_per_class=1,
        dirichlet_alpha=args.alpha,
        seed=args.seed,
    )
    report = bench_mod.validate_asymptotics(
        spec,
        trials=args.trials,
        tol_mean=args.tolerance,
        tol_variance=2 * args.tolerance,
        tol_offset=2 * args.tolerance,
    )
    print(report.summary())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mldem", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract descriptors from PGM images")
    p.add_argument("--in", dest="input", required=True, help="PGM file or directory")
    p.add_argument("--out", required=True, help="output descriptor file")
    p.add_argument("--grid", type=_parse_grid, default=(10, 10), help="S1xS2 blocks (default 10x10)")
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--sigma", type=float, default=1.0, help="smoothing bandwidth (0 disables)")
    p.add_argument("--no-weight", action="store_true", help="ignore gradient magnitudes")
    p.add_argument("--median", action="store_true", help="3x3 median filter first")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("index", help="build a search index from descriptors")
    p.add_argument("--desc", required=True)
    p.add_argument("--metric", choices=("kl", "htpnn"), default="kl")
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("query", help="classify a query descriptor set")
    p.add_argument("--idx", required=True)
    p.add_argument("--desc", required=True)
    p.add_argument("--method", choices=("brute", "dem", "mldem", "permsort"), default="mldem")
    p.add_argument("--emax", type=int, default=None)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--phi", choices=("simplified", "full"), default="simplified")
    p.add_argument("--pivots", type=int, default=16)
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--grid", type=_parse_grid, default=(10, 10))
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--samples", type=int, default=200, help="samples per block")
    p.add_argument("--queries", type=int, default=2, help="queries per class")
    p.add_argument("--alpha", type=float, default=1.0, help="Dirichlet concentration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bench", help="compare search methods on a dataset")
    p.add_argument("--models", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--metric", choices=("kl", "htpnn"), default="kl")
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--methods", default="brute,dem,mldem,permsort")
    p.add_argument("--emax-frac", dest="emax_frac", type=float, default=1.0)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--pivots", type=int, default=16)
    p.add_argument("--fraction", type=float, default=1.0)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("sweep", help="error vs evaluation budget sweep")
    p.add_argument("--models", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--metric", choices=("kl", "htpnn"), default="kl")
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--method", choices=("brute", "dem", "mldem", "permsort"), default="mldem")
    p.add_argument("--fractions", default="0.05,0.1,0.2,0.5,1.0")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="check the distance asymptotics empirically")
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--tolerance", type=float, default=0.15)
    p.add_argument("--grid", type=_parse_grid, default=(2, 2))
    p.add_argument("--bins", type=int, default=8)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
