"""Command-line interface: reproducible experiments emitting CSV/JSON + figures.

Subcommands: sdp (particle runs + metrics), sweep (parameter grids),
graph (measure one edge-list file), clip (trajectory clips + AUC table).
Exit codes: 0 success, 1 usage or validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import reports
from .clustering import cluster_stats, threshold_cluster, write_labels_csv
from .errors import CollectivenessError, ParameterError, UndefinedMetricError
from .graph import read_edgelist_csv
from .metrics import RunMetrics, aggregate, run_metrics
from .ncl import NclConfig, measure, write_matrix_csv
from .sdp import FrameRecord, SdpParams, measure_simulation, simulate
from .trajectory import (auc_report, categorize_by_score, clip_collectiveness,
                         load_trajectory_csv, read_clip_metadata_csv)

VARIANTS = [("ncl1", "avg"), ("ncl2", "avg"), ("ncl1", "min"), ("ncl2", "min")]


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _add_ncl_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=0.7,
                   help="information threshold in [0, 1] (default 0.7)")
    p.add_argument("--strategy", choices=["avg", "min"], default="avg")
    p.add_argument("--scheme", choices=["ncl1", "ncl2"], default="ncl1")


def _add_sdp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--runs", type=int, default=1, help="number of seeded runs")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p.add_argument("--K", dest="k", type=int, default=20, help="graph neighbors (default 20)")
    p.add_argument("--n-particles", type=int, default=400)
    p.add_argument("--noise-ratio", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--max-frames", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collectiveness",
        description="Measure crowd collectiveness on graphs, particle runs and trajectory clips.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sdp", help="run the particle simulation and aggregate run metrics")
    _add_sdp_flags(p)
    _add_ncl_flags(p)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--no-figure", action="store_true", help="skip the PNG report")

    p = sub.add_parser("sweep", help="metrics over a parameter grid, all four variants")
    p.add_argument("--axis", choices=["lambda", "K", "noise_ratio"], required=True)
    p.add_argument("--grid", required=True,
                   help="comma-separated grid values, e.g. 0.1,0.5,0.9")
    _add_sdp_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.7,
                   help="threshold used when the axis is not lambda")
    p.add_argument("--out", default="out")
    p.add_argument("--no-figure", action="store_true")

    p = sub.add_parser("graph", help="measure one edge-list file")
    p.add_argument("edgelist", help="CSV file with src,dst,weight rows")
    _add_ncl_flags(p)
    p.add_argument("--c-thre", dest="c_thre", type=float, default=None,
                   help="clustering threshold; also writes cluster labels")
    p.add_argument("--out", default="out")
    p.add_argument("--no-figure", action="store_true")

    p = sub.add_parser("clip", help="per-clip collectiveness and AUC table")
    p.add_argument("trajectories", nargs="+", help="one trajectory CSV per clip")
    p.add_argument("--metadata", default=None, help="clip,score,voting CSV")
    p.add_argument("--K", dest="k", type=int, default=20)
    _add_ncl_flags(p)
    p.add_argument("--derive-velocities", action="store_true",
                   help="forward-difference velocities from matched point ids")
    p.add_argument("--out", default="out")
    p.add_argument("--no-figure", action="store_true")
    return parser


def _sdp_params(args, noise_ratio: float | None = None) -> SdpParams:
    return SdpParams(n_particles=args.n_particles, k_neighbors=args.k,
                     eta=args.eta, max_frames=args.max_frames,
                     noise_ratio=args.noise_ratio if noise_ratio is None else noise_ratio)


def _write_frames_csv(path, records_by_run: dict[int, list[FrameRecord]]) -> None:
    lines = ["run,frame,phi,ground_truth"]
    for run_idx in sorted(records_by_run):
        for r in records_by_run[run_idx]:
            lines.append(f"{run_idx},{r.frame},{_fmt(r.measured_phi)},{_fmt(r.ground_truth)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _aggregate_or_none(per_run: list[RunMetrics]) -> dict:
    try:
        return aggregate(per_run).as_dict()
    except UndefinedMetricError:
        print("warning: no run with all metrics defined", file=sys.stderr)
        return {"rc": None, "pca": None, "sd": None, "n_runs": 0, "n_skipped": len(per_run)}


def cmd_sdp(args) -> int:
    params = _sdp_params(args)
    cfg = NclConfig(lam=args.lam, strategy=args.strategy, scheme=args.scheme)
    if args.runs < 1:
        raise ParameterError(f"--runs must be >= 1, got {args.runs}")
    records_by_run: dict[int, list[FrameRecord]] = {}
    per_run: list[RunMetrics] = []
    for i in range(args.runs):
        sim = simulate(params, args.seed + i)
        phis = measure_simulation(sim, params.k_neighbors, params.box_side, [cfg])[cfg]
        records_by_run[i] = [FrameRecord(f + 1, phi, gt)
                             for f, (phi, gt) in enumerate(zip(phis, sim.ground_truths))]
        per_run.append(run_metrics(phis, sim.ground_truths))
    os.makedirs(args.out, exist_ok=True)
    _write_frames_csv(os.path.join(args.out, "frames.csv"), records_by_run)
    _write_json(os.path.join(args.out, "metrics.json"), _aggregate_or_none(per_run))
    if not args.no_figure:
        reports.save_sdp_figure(records_by_run, os.path.join(args.out, "sdp_report.png"))
    return 0


def _parse_grid(text: str, axis: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ParameterError(f"bad --grid value in {text!r}") from None
    values = list(dict.fromkeys(values))  # drop duplicates, keep order
    if not values:
        raise ParameterError("--grid is empty")
    if axis == "K" and any(v != int(v) or v < 1 for v in values):
        raise ParameterError("K grid values must be positive integers")
    return values


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid, args.axis)
    if args.runs < 1:
        raise ParameterError(f"--runs must be >= 1, got {args.runs}")
    # validate the whole grid before any work
    if args.axis == "lambda":
        grid_cfgs = {v: [NclConfig(lam=v, strategy=s, scheme=sc) for sc, s in VARIANTS]
                     for v in grid}
        base_params = [_sdp_params(args)]
    elif args.axis == "K":
        for v in grid:
            SdpParams(n_particles=args.n_particles, k_neighbors=int(v))
        grid_cfgs = {v: [NclConfig(lam=args.lam, strategy=s, scheme=sc) for sc, s in VARIANTS]
                     for v in grid}
        base_params = [_sdp_params(args)]
    else:
        base_params = [_sdp_params(args, noise_ratio=v) for v in grid]
        grid_cfgs = {v: [NclConfig(lam=args.lam, strategy=s, scheme=sc) for sc, s in VARIANTS]
                     for v in grid}

    collected: dict[tuple[float, str], list[RunMetrics]] = {}
    if args.axis == "noise_ratio":
        for params, v in zip(base_params, grid):
            cfgs = grid_cfgs[v]
            for i in range(args.runs):
                sim = simulate(params, args.seed + i)
                series = measure_simulation(sim, params.k_neighbors, params.box_side, cfgs)
                for cfg in cfgs:
                    collected.setdefault((v, cfg.variant), []).append(
                        run_metrics(series[cfg], sim.ground_truths))
    else:
        params = base_params[0]
        all_cfgs = sorted({c for cfgs in grid_cfgs.values() for c in cfgs},
                          key=lambda c: (c.lam, c.scheme, c.strategy))
        for i in range(args.runs):
            sim = simulate(params, args.seed + i)
            if args.axis == "lambda":
                series = measure_simulation(sim, params.k_neighbors, params.box_side, all_cfgs)
                for v in grid:
                    for cfg in grid_cfgs[v]:
                        collected.setdefault((v, cfg.variant), []).append(
                            run_metrics(series[cfg], sim.ground_truths))
            else:
                for v in grid:
                    series = measure_simulation(sim, int(v), params.box_side, grid_cfgs[v])
                    for cfg in grid_cfgs[v]:
                        collected.setdefault((v, cfg.variant), []).append(
                            run_metrics(series[cfg], sim.ground_truths))

    rows = []
    for v in grid:
        for sc, s in VARIANTS:
            agg = _aggregate_or_none(collected[(v, f"{sc}_{s}")])
            rows.append({"axis": args.axis, "value": v, "variant": f"{sc}_{s}",
                         "scheme": sc, "strategy": s, **agg})
    os.makedirs(args.out, exist_ok=True)
    lines = ["axis,value,scheme,strategy,rc,pca,sd,n_runs,n_skipped"]
    for r in rows:
        vals = [r["axis"], _fmt(r["value"]), r["scheme"], r["strategy"],
                "" if r["rc"] is None else _fmt(r["rc"]),
                "" if r["pca"] is None else _fmt(r["pca"]),
                "" if r["sd"] is None else _fmt(r["sd"]),
                str(r["n_runs"]), str(r["n_skipped"])]
        lines.append(",".join(vals))
    with open(os.path.join(args.out, "sweep.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    if not args.no_figure:
        reports.save_sweep_figure(rows, args.axis, os.path.join(args.out, "sweep_report.png"))
    return 0


def cmd_graph(args) -> int:
    cfg = NclConfig(lam=args.lam, strategy=args.strategy, scheme=args.scheme)
    if args.c_thre is not None and not 0.0 <= args.c_thre <= 1.0:
        raise ParameterError(f"--c-thre must be in [0, 1], got {args.c_thre}")
    g = read_edgelist_csv(args.edgelist)
    m = measure(g, cfg)
    print(f"Phi = {_fmt(m.capital_phi)}")
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "phi.csv"), "w", encoding="utf-8") as fh:
        fh.write("node,phi\n")
        for i, v in enumerate(m.phi):
            fh.write(f"{i},{_fmt(v)}\n")
    write_matrix_csv(m.coherence, os.path.join(args.out, "coherence.csv"))
    write_matrix_csv(m.cliques, os.path.join(args.out, "cliques.csv"))
    if args.c_thre is not None:
        labeling = threshold_cluster(m.coherence, args.c_thre)
        write_labels_csv(labeling, os.path.join(args.out, "clusters.csv"))
        stats = cluster_stats(labeling)
        print(f"clusters = {stats.n_clusters} ({stats.n_nontrivial} non-trivial)")
    if not args.no_figure:
        reports.save_graph_figure(m.phi, m.coherence, os.path.join(args.out, "graph_report.png"))
    return 0


def cmd_clip(args) -> int:
    cfg = NclConfig(lam=args.lam, strategy=args.strategy, scheme=args.scheme)
    if args.k < 1:
        raise ParameterError(f"--K must be >= 1, got {args.k}")
    metas = read_clip_metadata_csv(args.metadata) if args.metadata else {}
    results = []  # (clip_id, value, meta | None)
    for path in args.trajectories:
        clip = load_trajectory_csv(path, derive_velocities=args.derive_velocities)
        value = clip_collectiveness(clip, cfg, args.k)
        results.append((clip.clip_id, value, metas.get(clip.clip_id)))
    os.makedirs(args.out, exist_ok=True)
    lines = ["clip,collectiveness,score,category,voting"]
    for cid, value, meta in results:
        if meta is None:
            lines.append(f"{cid},{_fmt(value)},,,")
        else:
            lines.append(f"{cid},{_fmt(value)},{_fmt(meta.score)},"
                         f"{categorize_by_score(meta.score)},{meta.voting or ''}")
    with open(os.path.join(args.out, "clip_collectiveness.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    if metas:
        scored = [(v, meta) for _, v, meta in results if meta is not None]
        table = {mode: auc_report(scored, mode) for mode in ("scores", "voting")}
        if any(cell is None for block in table.values() for cell in block.values()):
            print("warning: some AUC cells undefined (missing class or votes)", file=sys.stderr)
        _write_json(os.path.join(args.out, "auc.json"), table)
    if not args.no_figure:
        items = [(cid, v, categorize_by_score(meta.score) if meta else None)
                 for cid, v, meta in results]
        reports.save_clips_figure(items, os.path.join(args.out, "clips_report.png"))
    return 0


COMMANDS = {"sdp": cmd_sdp, "sweep": cmd_sweep, "graph": cmd_graph, "clip": cmd_clip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        return 0 if not exc.code else 1
    try:
        return COMMANDS[args.command](args)
    except (CollectivenessError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:  # console-script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
