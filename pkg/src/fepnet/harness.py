"""Experiment orchestration over replicates and sweep points.

Replicate ``i`` runs with seed ``master ^ i``.  Every run writes its primary
outputs (edge lists and CSV or JSON tables) into its own directory together
with a ``run.json`` sidecar; the experiment writes ``manifest.json`` at the
top.  Sidecars and the manifest carry wall-times and are the only
non-deterministic files.
"""
from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_to_dict, sweep_point
from .detection import split_seed
from .errors import InsufficientDataError, RunError
from .growth import Graph, grow
from .io import read_edge_list, write_csv, write_edge_list, write_json
from .kernel import kernel_table, make_kernel
from .netstats import (DegreeHistogram, ccdf, degree_histogram, detect_knee,
                       fit_exponential_tail, fit_power_law, ks_distance)
from .spatial import cluster_size_rows, run as run_world


@dataclass
class RunRecord:
    config: dict
    seed: int
    wall_time: float
    files: list[str]
    version: str = __version__
    label: str = ""
    summary: dict = dataclasses.field(default_factory=dict)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


# -- analysis -----------------------------------------------------------------

def degree_rows(hist: DegreeHistogram) -> list[dict]:
    return [{"k": k, "count": int(c), "ccdf": p}
            for (k, p), c in zip(ccdf(hist), hist.counts.tolist())]


def analyze_histogram(hist: DegreeHistogram, k_min: int | None = None,
                      min_count: int = 30, baseline: DegreeHistogram | None = None) -> dict:
    """Fit report for one degree distribution: tail fits plus the knee.

    Fits that lack data are reported as ``None`` rather than raised.
    """
    rep = {"n_nodes": hist.total,
           "min_degree": int(hist.degrees[0]),
           "min_degree_fraction": hist.fraction(int(hist.degrees[0]))}
    try:
        pl = fit_power_law(hist, k_min)
        rep.update(gamma_deg=pl.parameter, k_min=pl.k_min, ks=pl.ks, n_tail=pl.n_tail)
    except InsufficientDataError:
        rep.update(gamma_deg=None, k_min=None, ks=None, n_tail=None)
    try:
        ex = fit_exponential_tail(hist, rep["k_min"] or int(hist.degrees[0]))
        rep.update(exp_rate=ex.parameter, exp_ks=ex.ks, exp_degenerate=ex.degenerate)
    except InsufficientDataError:
        rep.update(exp_rate=None, exp_ks=None, exp_degenerate=None)
    try:
        rep["k_knee"], rep["confidence"] = detect_knee(ccdf(hist), hist.total, min_count)
    except InsufficientDataError:
        rep["k_knee"], rep["confidence"] = None, None
    if baseline is not None:
        rep["ks_vs_ba"] = ks_distance(hist, baseline)
    return rep


# -- single runs ----------------------------------------------------------------

def _grow_graph(cfg: ExperimentConfig, seed: int, kernel_choice: str | None = None) -> Graph:
    g = dataclasses.replace(cfg.growth, seed=seed)
    choice = kernel_choice or g.kernel
    kernel = make_kernel(choice, cfg.kernel.spec() if choice in ("mechanistic", "phenomenological") else None)
    return grow(g, kernel, np.random.default_rng(seed))


def _write_growth(run_dir: Path, graph: Graph, baseline=None, min_count=30) -> tuple[list[Path], dict]:
    hist = degree_histogram(graph)
    report = analyze_histogram(hist, min_count=min_count, baseline=baseline)
    files = [write_edge_list(run_dir / "graph.edges", graph.edges()),
             write_csv(run_dir / "degree.csv", degree_rows(hist)),
             write_json(run_dir / "fit.json", report)]
    return files, report


def _task(cfg: ExperimentConfig, index: int, seed: int, run_dir: Path, label: str,
          baseline_seed: int | None = None) -> RunRecord:
    t0 = time.perf_counter()
    try:
        mode = cfg.mode
        if mode in ("grow", "grow-ba", "sweep"):
            baseline = None
            if baseline_seed is not None:
                baseline = degree_histogram(_grow_graph(cfg, baseline_seed, "linear-BA"))
            graph = _grow_graph(cfg, seed, "linear-BA" if mode == "grow-ba" else None)
            files, summary = _write_growth(run_dir, graph, baseline)
        elif mode == "simulate":
            world = dataclasses.replace(cfg.world, seed=seed)
            snaps = run_world(world, np.random.default_rng(seed))
            files = [write_edge_list(run_dir / "snapshots" / f"t{s.t:07d}.edges", s.edges)
                     for s in snaps]
            files.append(write_csv(run_dir / "clusters.csv", cluster_size_rows(snaps),
                                   ["t", "size", "count"]))
            last = snaps[-1]
            summary = {"n_snapshots": len(snaps), "final_agents": last.n_agents,
                       "final_largest_cluster": int(last.cluster_sizes[0]) if last.n_agents else 0}
        elif mode == "analyze":
            an = cfg.analyze
            n, edges = read_edge_list(an.input, an.n_nodes)
            hist = degree_histogram(Graph.from_edges(n, edges))
            summary = analyze_histogram(hist, an.k_min, an.min_count)
            files = [write_csv(run_dir / "degree.csv", degree_rows(hist)),
                     write_json(run_dir / "fit.json", summary)]
        elif mode == "kernel-table":
            rows = kernel_table(cfg.kernel.spec(), cfg.d_max)
            files = [write_csv(run_dir / "kernel_table.csv", rows,
                               ["d", "mechanistic", "phenomenological", "regime", "local_slope"])]
            summary = {"rows": len(rows)}
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except Exception as exc:  # noqa: BLE001 - re-raised with reproduction context
        raise RunError(index, seed, exc) from exc
    rec = RunRecord(config_to_dict(cfg), seed, 0.0, [], label=label, summary=summary)
    rec.wall_time = time.perf_counter() - t0
    rec.files = [str(Path(f).relative_to(run_dir.parent)) for f in files]
    sidecar = {k: v for k, v in rec.as_dict().items() if k != "files"}
    write_json(run_dir / "run.json", sidecar)
    rec.files.append(str((run_dir / "run.json").relative_to(run_dir.parent)))
    return rec


def _call(args):
    return _task(*args)


def _fmt_value(v) -> str:
    return f"{v:g}" if isinstance(v, float) else str(v)


def _plan(cfg: ExperimentConfig, out: Path) -> list[tuple]:
    if cfg.mode in ("analyze", "kernel-table"):
        return [(cfg, 0, cfg.seed, out / "run_000", "")]
    if cfg.mode == "sweep":
        name = cfg.sweep.parameter.split(".")[-1]
        return [(sweep_point(cfg, v), i, split_seed(cfg.seed, i),
                 out / f"run_{i:03d}_{name}={_fmt_value(v)}", f"{cfg.sweep.parameter}={v}",
                 cfg.seed)
                for i, v in enumerate(cfg.sweep.values)]
    return [(cfg, i, split_seed(cfg.seed, i), out / f"run_{i:03d}", "")
            for i in range(cfg.replicates)]


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> list[RunRecord]:
    """Run every replicate or sweep point of ``cfg`` and write the manifest."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan = _plan(cfg, out)
    workers = min(cfg.parallelism or os.cpu_count() or 1, len(plan))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_call, plan))
    else:
        records = [_call(p) for p in plan]
    extra = []
    if cfg.mode == "sweep":
        name = cfg.sweep.parameter
        rows = [{name: v, "seed": r.seed, **r.summary} for v, r in zip(cfg.sweep.values, records)]
        extra.append(emit_summary(rows, out / "summary.csv"))
    write_json(out / "manifest.json", {
        "version": __version__,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "runs": [r.as_dict() for r in records],
        "files": [str(p.relative_to(out)) for p in extra],
    })
    return records


SUMMARY_COLUMNS = ["seed", "gamma_deg", "k_knee", "confidence", "min_degree_fraction", "ks_vs_ba"]


def emit_summary(rows: list[dict], path) -> Path:
    """One row per run; columns are the union over rows, missing cells blank.

    Swept parameters come first, then the standard fit columns, then anything
    else in first-seen order.
    """
    if not rows:
        raise ValueError("emit_summary needs at least one record")
    if isinstance(rows[0], RunRecord):
        rows = [{"seed": r.seed, **r.summary} for r in rows]
    seen = list(dict.fromkeys(k for r in rows for k in r))
    swept = [k for k in seen if "." in k]
    std = [k for k in SUMMARY_COLUMNS if k in seen]
    rest = [k for k in seen if k not in swept and k not in std]
    return write_csv(path, rows, swept + std + rest)
