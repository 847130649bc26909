"""Pipeline orchestration: config parsing, stage sequencing, artifacts.

A run is fully described by a flat key=value config (file and/or --set
overrides). Stages run in order: load/generate -> k-NN + local metric ->
t-conorm merge -> shortest-path completion -> MDS -> evaluation; the report
echoes every effective parameter so a run can be replayed exactly.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import datasets
from .core_types import DenseMetric, Embedding, PointCloud, validate_point_cloud
from .embedding import MdsConfig, classical_mds, metric_mds
from .errors import ConfigError, DataError, NumericalError
from .evaluation import geodesic_correlation, kmeans, nn_distance_uniformity, pair_sets_index, within_cluster_ss
from .geodesics import (
    ON_DISCONNECT_MODES,
    apply_disconnection_policy,
    connectivity_report,
    dijkstra_all_pairs,
    largest_component_indices,
    resolve_workers,
    subgraph,
)
from .local_metric import SIGMA_MODES, LocalMetricConfig, build_star_graphs, smooth_knn_residuals
from .merge import TCONORM_KINDS, TConorm, symmetrize

DATASETS = ("swiss_roll", "swiss_roll_hole", "torus", "hemisphere", "rolled_plane", "csv")
_SPECTRUM_HEAD = 8


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of a pipeline run, with materialized defaults."""

    dataset: str = "swiss_roll"
    input: str = ""
    precomputed: bool = False
    has_labels: bool = False
    n: int = 3000
    k: int = 15
    dim: int = 2
    seed: int = 0
    tconorm: str = "canonical"
    sigma_mode: str = "kth_neighbor"
    apply_rho: bool = True
    bs_tol: float = 1e-5
    bs_max_iter: int = 100
    sigma_floor: float = 1e-12
    method: str = "classical_mds"
    max_iter: int = 500
    lr: float = 1e-2
    init: str = "classical_mds"
    tol: float = 1e-7
    workers: int = 0
    on_disconnect: str = "error"
    emit_svg: bool = False
    eval_kmeans_k: int = 0
    eval_seed: int = 0
    eval_runs: int = 1
    torus_big_radius: float = 2.0
    torus_small_radius: float = 0.6
    hemisphere_concentration: float = 3.0
    rolled_c: int = 4

    def validate(self) -> None:
        if self.dataset not in DATASETS:
            raise ConfigError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if self.dataset == "csv" and not self.input:
            raise ConfigError("dataset=csv requires input=<path>")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")
        if self.tconorm not in TCONORM_KINDS:
            raise ConfigError(f"tconorm must be one of {TCONORM_KINDS}, got {self.tconorm!r}")
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(f"sigma_mode must be one of {SIGMA_MODES}, got {self.sigma_mode!r}")
        if self.on_disconnect not in ON_DISCONNECT_MODES:
            raise ConfigError(
                f"on_disconnect must be one of {ON_DISCONNECT_MODES}, got {self.on_disconnect!r}"
            )
        if self.workers < 0:
            raise ConfigError(f"workers must be >= 0, got {self.workers}")
        if self.eval_runs < 1:
            raise ConfigError(f"eval.runs must be >= 1, got {self.eval_runs}")
        # delegate the rest to the stage configs
        self.local_metric_config()
        self.mds_config()

    def local_metric_config(self) -> LocalMetricConfig:
        return LocalMetricConfig(
            sigma_mode=self.sigma_mode,
            apply_rho=self.apply_rho,
            binary_search_tolerance=self.bs_tol,
            binary_search_max_iter=self.bs_max_iter,
            sigma_floor=self.sigma_floor,
        )

    def mds_config(self) -> MdsConfig:
        return MdsConfig(
            method=self.method,
            m=self.dim,
            max_iter=self.max_iter,
            learning_rate=self.lr,
            init=self.init,
            seed=self.seed,
            convergence_tol=self.tol,
        )

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            key = f.name.replace("eval_", "eval.") if f.name.startswith("eval_") else f.name
            out[key] = getattr(self, f.name)
        return out


_KEY_ALIASES = {"eval.kmeans_k": "eval_kmeans_k", "eval.seed": "eval_seed", "eval.runs": "eval_runs"}
_BOOL_TOKENS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(name: str, raw: str, target_type: type):
    raw = raw.strip()
    try:
        if target_type is bool:
            token = raw.lower()
            if token not in _BOOL_TOKENS:
                raise ValueError
            return _BOOL_TOKENS[token]
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"config key {name!r}: cannot parse {raw!r} as {target_type.__name__}") from None


def config_from_mapping(mapping: dict) -> PipelineConfig:
    """Build a validated PipelineConfig from string or typed key/value pairs."""
    defaults = PipelineConfig()
    kwargs = {}
    valid = {f.name: f for f in fields(PipelineConfig)}
    for key, value in mapping.items():
        name = _KEY_ALIASES.get(key, key)
        if name not in valid:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = _coerce(key, value, type(getattr(defaults, name)))
        kwargs[name] = value
    cfg = PipelineConfig(**kwargs)
    cfg.validate()
    return cfg


def parse_config_file(path) -> dict:
    """Flat key=value lines; '#' starts a comment; blank lines ignored."""
    mapping = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def generate_dataset(cfg: PipelineConfig) -> PointCloud:
    if cfg.dataset == "swiss_roll":
        return datasets.swiss_roll(cfg.n, hole=False, seed=cfg.seed)
    if cfg.dataset == "swiss_roll_hole":
        return datasets.swiss_roll(cfg.n, hole=True, seed=cfg.seed)
    if cfg.dataset == "torus":
        return datasets.torus(cfg.n, R=cfg.torus_big_radius, r=cfg.torus_small_radius, seed=cfg.seed)
    if cfg.dataset == "hemisphere":
        return datasets.nonuniform_hemisphere(
            cfg.n, concentration=cfg.hemisphere_concentration, seed=cfg.seed
        )
    if cfg.dataset == "rolled_plane":
        return datasets.rolled_plane(cfg.n, c=cfg.rolled_c, seed=cfg.seed)
    return datasets.load_csv(cfg.input, has_labels=cfg.has_labels, precomputed=cfg.precomputed)


def write_embedding_csv(emb: Embedding, labels, path) -> None:
    """Embedding rows as repr-exact floats, plus the optional label column."""
    with open(path, "w", newline="") as fh:
        header = [f"x{i + 1}" for i in range(emb.m)]
        if labels is not None:
            header.append("label")
        fh.write(",".join(header) + "\n")
        for i in range(emb.n_points):
            row = [repr(float(x)) for x in emb.coords[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            fh.write(",".join(row) + "\n")


def run_pipeline(cfg: PipelineConfig, output_dir=None) -> dict:
    """Run every stage and return the report dict.

    When ``output_dir`` is given, writes embedding.csv, report.json and
    (optionally) plot.svg there.
    """
    cfg.validate()
    report: dict = {"config": cfg.echo()}
    timings: dict = {}

    t0 = time.perf_counter()
    cloud = generate_dataset(cfg)
    problems = validate_point_cloud(cloud)
    if problems:
        raise DataError("invalid point cloud: " + "; ".join(problems))
    timings["generate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graph = build_star_graphs(cloud, cfg.k, cfg.local_metric_config())
    timings["local_metric"] = time.perf_counter() - t0
    clamped = int(np.count_nonzero(graph.sigma <= cfg.sigma_floor))
    report["sigma_clamped_points"] = clamped
    if cfg.sigma_mode == "binary_search":
        residuals = smooth_knn_residuals(graph.raw_dist, graph.rho, graph.sigma)
        report["sigma_max_residual_unclamped"] = float(
            residuals[graph.sigma > cfg.sigma_floor].max()
        ) if clamped < cloud.n_points else 0.0

    t0 = time.perf_counter()
    sparse = symmetrize(graph, TConorm(cfg.tconorm))
    timings["merge"] = time.perf_counter() - t0
    zero_edges = sum(1 for w in sparse.entries.values() if w == 0.0)
    report["merged_edges"] = sparse.n_edges
    report["merged_zero_edges"] = zero_edges
    if cfg.tconorm == "drastic_sum":
        report["drastic_finite_pair_collapse"] = (
            f"{zero_edges} edges present in both star graphs collapsed to distance 0"
        )

    t0 = time.perf_counter()
    partition = connectivity_report(sparse)
    labels = cloud.labels
    kept_points = cloud.n_points
    if partition.count > 1 and cfg.on_disconnect == "largest_component":
        keep = largest_component_indices(partition)
        sparse = subgraph(sparse, keep)
        labels = None if labels is None else labels[keep]
        kept_points = len(keep)
        report["kept_indices"] = [int(i) for i in keep]
    report["components"] = {"count": partition.count, "sizes": list(partition.sizes)}
    report["n_points"] = kept_points

    dense = dijkstra_all_pairs(sparse, cfg.workers)
    if cfg.on_disconnect != "largest_component":
        dense, cap_info = apply_disconnection_policy(dense, cfg.on_disconnect)
        report["disconnection"] = cap_info
    timings["geodesics"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if cfg.method == "classical_mds":
        emb = classical_mds(dense, cfg.dim)
    else:
        emb = metric_mds(dense, cfg.mds_config())
    timings["embed"] = time.perf_counter() - t0
    report["stress"] = emb.stress
    if emb.eigenvalues is not None:
        r = min(_SPECTRUM_HEAD, dense.n_points - 1)
        head = list(emb.eigenvalues) if len(emb.eigenvalues) >= r else classical_spectrum_head(dense, r)
        report["eigenvalue_head"] = [float(v) for v in head[:_SPECTRUM_HEAD]]
        report["zero_filled_columns"] = int(sum(1 for v in emb.eigenvalues if v <= 0))

    t0 = time.perf_counter()
    evaluation: dict = {"nn_distance_cv": nn_distance_uniformity(emb.coords)}
    try:
        evaluation["geodesic_correlation"] = geodesic_correlation(dense, emb)
    except ConfigError as exc:
        # fully collapsed metrics (e.g. bounded/drastic sums with rho) have no
        # distance spread; the run still completes
        evaluation["geodesic_correlation"] = None
        evaluation["geodesic_correlation_note"] = str(exc)
    if labels is not None and cfg.eval_kmeans_k > 0:
        best = None
        for run in range(cfg.eval_runs):
            pred = kmeans(emb.coords, cfg.eval_kmeans_k, seed=cfg.eval_seed + run)
            objective = within_cluster_ss(emb.coords, pred)
            if best is None or objective < best[0]:
                best = (objective, pred)
        evaluation["kmeans_objective"] = best[0]
        evaluation["psi_vs_labels"] = pair_sets_index(best[1], labels)
    report["evaluation"] = evaluation
    timings["evaluate"] = time.perf_counter() - t0
    report["stage_seconds"] = timings

    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_embedding_csv(emb, labels, out / "embedding.csv")
        (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
        if cfg.emit_svg:
            from .plotting import emit_scatter_svg

            emit_scatter_svg(emb, labels, out / "plot.svg")
    report["_embedding"] = emb
    return report


def classical_spectrum_head(dense: DenseMetric, r: int) -> list:
    """Leading eigenvalues of the double-centered matrix, for reporting."""
    from .embedding import double_center, top_eigenpairs

    vals, _ = top_eigenpairs(double_center(dense.dist), max(1, r))
    return [float(v) for v in vals]


def benchmark_scaling(sizes, cfg: PipelineConfig, repeats: int = 3, ratio_bound: float = 5.5) -> dict:
    """Per-stage wall time across dataset sizes, focused on the Dijkstra stage.

    Runs the pipeline stages up to geodesic completion for each size (the
    kernel is warmed first so JIT compilation does not pollute the ratios)
    and reports doubling ratios of the completion stage. A doubling ratio
    above ``ratio_bound`` (inconsistent with N^2 log N scaling) raises;
    pass ``ratio_bound=None`` to skip the check, e.g. at toy sizes where
    timer noise dominates.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ConfigError("sizes must be ascending")
    from .testkit import random_sparse_metric

    dijkstra_all_pairs(random_sparse_metric(8, seed=0, edge_prob=0.9), workers=1)  # warm JIT
    rows = []
    for n in sizes:
        run_cfg = config_from_mapping({**cfg.echo(), "n": n})
        cloud = generate_dataset(run_cfg)
        t0 = time.perf_counter()
        graph = build_star_graphs(cloud, run_cfg.k, run_cfg.local_metric_config())
        t_local = time.perf_counter() - t0
        t0 = time.perf_counter()
        sparse = symmetrize(graph, TConorm(run_cfg.tconorm))
        t_merge = time.perf_counter() - t0
        best = math.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            dijkstra_all_pairs(sparse, run_cfg.workers)
            best = min(best, time.perf_counter() - t0)
        rows.append(
            {"n": n, "local_metric_s": t_local, "merge_s": t_merge, "dijkstra_s": best}
        )
    ratios = [
        rows[i + 1]["dijkstra_s"] / rows[i]["dijkstra_s"]
        for i in range(len(rows) - 1)
        if rows[i + 1]["n"] == 2 * rows[i]["n"]
    ]
    if ratio_bound is not None and any(r > ratio_bound for r in ratios):
        raise NumericalError(
            f"Dijkstra doubling ratios {ratios} exceed the {ratio_bound} scaling bound"
        )
    return {"rows": rows, "dijkstra_doubling_ratios": ratios, "workers": resolve_workers(cfg.workers)}
