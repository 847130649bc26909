"""Command-line interface.

Subcommands: generate, reduce, evaluate, bench, plot. Exit codes: 0 ok,
2 config error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import datasets
from .core_types import Embedding
from .errors import ConfigError, exit_code_for
from .evaluation import kmeans, nn_distance_uniformity, pair_sets_index
from .pipeline import (
    PipelineConfig,
    benchmark_scaling,
    config_from_mapping,
    parse_config_file,
    run_pipeline,
)
from .plotting import emit_scatter_svg


def _collect_config(args) -> PipelineConfig:
    mapping: dict = {}
    if getattr(args, "config", None):
        mapping.update(parse_config_file(args.config))
    direct = {
        "input": getattr(args, "input", None),
        "dataset": getattr(args, "dataset", None),
        "n": getattr(args, "n", None),
        "k": getattr(args, "k", None),
        "dim": getattr(args, "dim", None),
        "tconorm": getattr(args, "tconorm", None),
        "sigma_mode": getattr(args, "sigma_mode", None),
        "apply_rho": getattr(args, "apply_rho", None),
        "method": getattr(args, "mds", None),
        "seed": getattr(args, "seed", None),
        "workers": getattr(args, "workers", None),
        "on_disconnect": getattr(args, "on_disconnect", None),
        "emit_svg": getattr(args, "plot", None),
        "has_labels": getattr(args, "has_labels", None),
        "precomputed": getattr(args, "precomputed", None),
    }
    for key, value in direct.items():
        if value is not None:
            mapping[key] = value
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        mapping[key.strip()] = value.strip()
    if getattr(args, "input", None):
        mapping["dataset"] = "csv"
    return config_from_mapping(mapping)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--dataset")
    p.add_argument("--input", help="CSV input (features, or square matrix with --precomputed)")
    p.add_argument("--has-labels", dest="has_labels", action="store_const", const=True)
    p.add_argument("--precomputed", action="store_const", const=True)
    p.add_argument("--tconorm")
    p.add_argument("--sigma-mode", dest="sigma_mode")
    p.add_argument("--apply-rho", dest="apply_rho", choices=["true", "false"])
    p.add_argument("--mds", choices=["classical_mds", "metric_mds"])
    p.add_argument("--workers", type=int)
    p.add_argument("--on-disconnect", dest="on_disconnect", choices=["error", "largest_component", "cap"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isumap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset to CSV")
    _add_common(g)
    g.add_argument("--out", required=True)

    r = sub.add_parser("reduce", help="run the full pipeline")
    _add_common(r)
    r.add_argument("--output-dir", required=True)
    r.add_argument("--plot", action="store_const", const=True, help="also write plot.svg")

    e = sub.add_parser("evaluate", help="score an embedding CSV (with label column)")
    e.add_argument("--input", required=True)
    e.add_argument("--kmeans-k", dest="kmeans_k", type=int, default=0)
    e.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("bench", help="stage timings across dataset sizes")
    _add_common(b)
    b.add_argument("--sizes", required=True, help="comma-separated ascending sizes")
    b.add_argument(
        "--ratio-bound", dest="ratio_bound", type=float, default=5.5,
        help="fail when a Dijkstra doubling ratio exceeds this (<= 0 disables)",
    )

    p = sub.add_parser("plot", help="scatter SVG from an embedding CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    return parser


def _cmd_generate(args) -> int:
    cfg = _collect_config(args)
    from .pipeline import generate_dataset

    datasets.write_points_csv(generate_dataset(cfg), args.out)
    print(args.out)
    return 0


def _cmd_reduce(args) -> int:
    cfg = _collect_config(args)
    report = run_pipeline(cfg, output_dir=args.output_dir)
    report.pop("_embedding", None)
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0


def _cmd_evaluate(args) -> int:
    cloud = datasets.load_csv(args.input)  # label column detected via header
    coords = cloud.points
    scores: dict = {"n_points": cloud.n_points, "nn_distance_cv": nn_distance_uniformity(coords)}
    if cloud.labels is not None and args.kmeans_k:
        pred = kmeans(coords, args.kmeans_k, seed=args.seed)
        scores["psi_vs_labels"] = pair_sets_index(pred, cloud.labels)
    print(json.dumps(scores, sort_keys=True, indent=2))
    return 0


def _cmd_bench(args) -> int:
    cfg = _collect_config(args)
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]
    bound = args.ratio_bound if args.ratio_bound > 0 else None
    table = benchmark_scaling(sizes, cfg, ratio_bound=bound)
    print(json.dumps(table, sort_keys=True, indent=2))
    return 0


def _cmd_plot(args) -> int:
    cloud = datasets.load_csv(args.input)
    coords = cloud.points
    emb = Embedding(coords=coords, m=coords.shape[1], stress=0.0, method="classical_mds")
    emit_scatter_svg(emb, cloud.labels, args.out)
    print(args.out)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "reduce": _cmd_reduce,
    "evaluate": _cmd_evaluate,
    "bench": _cmd_bench,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        code = exit_code_for(exc)
        if code == 1:
            raise
        print(f"error ({args.command}): {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
