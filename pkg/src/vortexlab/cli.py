"""Command-line entry point: configuration search, simulation, diagnostics.

Exit codes: 0 success, 2 validation failure, 3 numerical abort, 4 I/O
error.  Failures emit a machine-readable JSON object on stderr.  Every
output directory receives a fully resolved config echo; re-running with
the echo reproduces outputs bit-identically at thread count 1.
"""

from __future__ import annotations

import argparse
import json
import sys
import time as _time
from pathlib import Path

import numpy as np

from . import configlab, diagnostics, patches, pointvortex, storage
from .core import PointVortexSystem
from .errors import (
    BlowUpError,
    CoincidentVorticesError,
    CollisionAbortError,
    DegenerateConfigurationError,
    NonConvergenceError,
    SingularEvaluationError,
    SnapshotFormatError,
    StepSizeUnderflowError,
    ValidationError,
    ZeroTotalCirculationError,
)
from .tree import TreeParams, build_quadtree, tree_velocity
from .kernels import direct_velocity

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_NUMERICAL = (
    CollisionAbortError,
    BlowUpError,
    StepSizeUnderflowError,
    NonConvergenceError,
    SingularEvaluationError,
    CoincidentVorticesError,
    DegenerateConfigurationError,
)
_VALIDATION = (ValidationError, ZeroTotalCirculationError, ValueError, KeyError)
_IO = (SnapshotFormatError, OSError, json.JSONDecodeError)


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def _load_system(args) -> PointVortexSystem:
    if args.config:
        data = json.loads(Path(args.config).read_text())
        sys_data = data.get("reference", data)
        circ = args.circulations or sys_data["circulations"]
        pos = args.positions or sys_data["positions"]
    else:
        circ, pos = args.circulations, args.positions
    if circ is None or pos is None:
        raise ValidationError("need --config or both --circulations and --positions")
    return PointVortexSystem(
        positions=np.array(pos, dtype=np.float64).reshape(-1, 2),
        circulations=np.array(circ, dtype=np.float64),
    )


def _csv_floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _add_system_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with {circulations, positions}")
    p.add_argument("--circulations", type=_csv_floats, default=None)
    p.add_argument("--positions", type=_csv_floats, default=None)


def cmd_config_find(args) -> int:
    seed = _load_system(args)
    found = configlab.find_expanding_config(seed.circulations, seed.positions)
    report = configlab.lemma_hypotheses(found)
    fit = configlab.self_similarity_fit(found)
    ok, reasons = configlab.lemma_passes(report)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "configuration.json").write_text(
        json.dumps(storage.system_to_dict(found), indent=2) + "\n"
    )
    lines = [
        "self-similar configuration search",
        f"  alpha (expansion rate): {fit.alpha:.12g}",
        f"  beta  (rotation rate):  {fit.beta_rate:.12g}",
        f"  fit residual:           {fit.residual:.3e}",
        f"  harmonic residual:      {report.harmonic_residual:.3e}",
        f"  sum of circulations:    {report.sum_omega:.12g}",
        f"  |X|: {report.X_norm:.3e}   I: {report.I_value:.3e}",
        f"  collinearity: {report.collinearity:.6g}   equilaterality: {report.equilaterality:.6g}",
        f"  gradient parallelism:   {report.grad_parallelism:.6g}",
        f"  hypotheses: {'PASS' if ok else 'FAIL: ' + '; '.join(reasons)}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_pv_run(args) -> int:
    system = _load_system(args)
    samples = np.linspace(args.t0, args.t1, args.samples) if args.samples else None
    traj = pointvortex.integrate(system, args.t0, args.t1, args.tol, sample_times=samples)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    pointvortex.trajectory_to_csv(traj, out / "trajectory.csv")
    inv0 = pointvortex.invariants(traj.states[0])
    invT = pointvortex.invariants(traj.states[-1])
    summary = {
        "t0": traj.times[0],
        "t1": traj.times[-1],
        "accepted_steps": traj.step_stats.accepted,
        "rejected_steps": traj.step_stats.rejected,
        "min_separation": traj.step_stats.min_separation,
        "dX": [float(a) for a in (invT.X - inv0.X)],
        "dI": invT.I - inv0.I,
        "dE_rel": (invT.E - inv0.E) / (1.0 + abs(inv0.E)),
    }
    (out / "drift_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    (out / "config_echo.json").write_text(
        json.dumps(
            {
                "schema_version": storage.CONFIG_SCHEMA_VERSION,
                "system": storage.system_to_dict(system),
                "t0": args.t0, "t1": args.t1, "tol": args.tol, "samples": args.samples,
            },
            indent=2,
        )
        + "\n"
    )
    print(json.dumps(summary))
    return EXIT_OK


def _build_run_config(args) -> patches.RunConfig:
    if args.config:
        cfg = storage.run_config_from_dict(json.loads(Path(args.config).read_text()))
    else:
        system = configlab.recentre(
            PointVortexSystem(
                positions=np.array(args.positions, dtype=np.float64).reshape(-1, 2),
                circulations=np.array(args.circulations, dtype=np.float64),
            )
        )
        cfg = patches.RunConfig(reference=system)
    overrides = {}
    for name in ("t0", "t_end", "dt", "patch_radius", "blob_radius", "snapshot_every", "backend"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if args.particles is not None:
        overrides["particles_per_patch"] = args.particles
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def cmd_patch_run(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    if args.resume:
        state0, cfg = storage.read_checkpoint(Path(args.resume))
        from dataclasses import replace

        cfg_run = replace(cfg, t0=state0.time, recentre_initial=False, check_reference=False)
        start_state = state0
    else:
        cfg = _build_run_config(args)
        cfg_run = cfg
        start_state = None

    (out / "config_echo.json").write_text(
        json.dumps(storage.run_config_to_dict(cfg), indent=2) + "\n"
    )
    rows_path = out / "bootstrap.csv"
    wrote_header = rows_path.exists() and args.resume
    k_list = tuple(args.k)
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    counter = {"n": sum(1 for _ in snap_dir.glob("snapshot_*.csv"))}

    def observer(t, state):
        rows = diagnostics.bootstrap_report([(t, state)], cfg.reference, k_list=k_list)
        row = rows[0]
        mode = "a" if (rows_path.exists() and (counter["n"] > 0 or wrote_header)) else "w"
        with open(rows_path, mode, newline="") as f:
            import csv as _csv

            w = _csv.writer(f)
            if mode == "w":
                w.writerow(list(row.keys()))
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row.values()])
        if args.snapshot_stride and counter["n"] % args.snapshot_stride == 0:
            storage.write_snapshot_csv(state, snap_dir / f"snapshot_{counter['n']:06d}.csv")
        counter["n"] += 1
        storage.write_checkpoint(state, cfg, out / "checkpoint")
        max_support = max(row[f"support{i}"] for i in (1, 2, 3))
        print(
            json.dumps(
                {"t": t, "I_x": row["I_x"], "L": row.get("L"), "max_support": max_support}
            ),
            flush=True,
        )

    if start_state is None:
        patches.run(cfg_run, observer=observer, keep_snapshots=False)
    else:
        _run_from_state(cfg_run, start_state, observer)
    return EXIT_OK


def _run_from_state(cfg: patches.RunConfig, state, observer) -> None:
    """Continue a run from a checkpointed state (no re-discretization)."""
    backend = (
        patches.TreeBackend(cfg.tree_params) if cfg.backend == "tree" else patches.DirectBackend()
    )
    dt0 = patches.default_dt(cfg) if cfg.dt is None else cfg.dt
    step_index = 0
    while state.time < cfg.t_end - 1e-9 * cfg.t_end:
        dt = dt0 if cfg.dt_policy == "fixed" else dt0 * state.time / cfg.t0
        dt = min(dt, cfg.t_end - state.time)
        state = patches.step(state, dt, backend)
        step_index += 1
        if step_index % cfg.snapshot_every == 0 or state.time >= cfg.t_end - 1e-9 * cfg.t_end:
            observer(state.time, state)


def cmd_diag(args) -> int:
    for k in args.k:
        if k % 2 != 0 or k < 2:
            raise ValidationError(f"moment order k={k} must be an even integer >= 2")
    ref = storage.system_from_dict(json.loads(Path(args.reference).read_text())) if args.reference else None
    snaps = []
    for path in sorted(Path(args.snapshots).glob("snapshot_*.csv")):
        state = storage.read_snapshot_csv(path)
        snaps.append((state.time, state))
    if not snaps:
        raise SnapshotFormatError(f"no snapshot files under {args.snapshots}")
    if ref is None:
        raise ValidationError("--reference is required")
    rows = diagnostics.bootstrap_report(snaps, ref, k_list=tuple(args.k))
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    storage.write_bootstrap_csv(rows, out / "diagnostics.csv")
    summary: dict = {"n_snapshots": len(rows)}
    if len(rows) >= 10:
        window = (rows[0]["t"], rows[-1]["t"])
        for i in (1, 2, 3):
            series = [(r["t"], r[f"support{i}"]) for r in rows]
            if all(v > 0 for _, v in series):
                fit = diagnostics.growth_exponent(series, window)
                summary[f"support{i}_exponent"] = fit.exponent
                summary[f"support{i}_r2"] = fit.r_squared
        if "L" in rows[0]:
            L0, LT = rows[0]["L"], rows[-1]["L"]
            span = rows[-1]["t"] - rows[0]["t"]
            summary["L_drift_per_time"] = abs(LT - L0) / (max(abs(L0), 1.0) * span)
        summary["max_dev"] = max(r["max_dev"] for r in rows)
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    pos = rng.random((args.n, 2)) * 2.0 - 1.0
    g = rng.random(args.n) - 0.5
    px = np.ascontiguousarray(pos[:, 0])
    py = np.ascontiguousarray(pos[:, 1])
    params = TreeParams(opening_angle=args.theta, expansion_order=args.order)
    delta2 = args.delta * args.delta

    direct_velocity(px[:16], py[:16], g[:16], px[:16], py[:16], delta2)  # JIT warm-up
    tree = build_quadtree(px, py, g, params)
    tree_velocity(tree, px[:16], py[:16], args.delta, params)

    t0 = _time.perf_counter()
    ux_d, uy_d, _ = direct_velocity(px, py, g, px, py, delta2)
    t_direct = _time.perf_counter() - t0

    t0 = _time.perf_counter()
    tree = build_quadtree(px, py, g, params)
    ux_t, uy_t = tree_velocity(tree, px, py, args.delta, params)
    t_tree = _time.perf_counter() - t0

    scale = float(np.hypot(ux_d, uy_d).max())
    dev = float(np.hypot(ux_t - ux_d, uy_t - uy_d).max()) / scale
    table = {
        "n": args.n,
        "opening_angle": args.theta,
        "order": args.order,
        "t_direct_s": t_direct,
        "t_tree_s": t_tree,
        "speedup": t_direct / t_tree,
        "max_rel_deviation": dev,
    }
    print(json.dumps(table, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vortexlab")
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("config-find", help="search for a self-similar configuration")
    _add_system_flags(pc)
    pc.add_argument("--output", default="config_out")
    pc.set_defaults(func=cmd_config_find)

    pv = sub.add_parser("pv-run", help="integrate the point-vortex ODE")
    _add_system_flags(pv)
    pv.add_argument("--t0", type=float, default=1.0)
    pv.add_argument("--t1", type=float, default=100.0)
    pv.add_argument("--tol", type=float, default=1e-10)
    pv.add_argument("--samples", type=int, default=200)
    pv.add_argument("--output", default="pv_out")
    pv.set_defaults(func=cmd_pv_run)

    pr = sub.add_parser("patch-run", help="run the three-patch blob simulation")
    _add_system_flags(pr)
    pr.add_argument("--t0", type=float, default=None)
    pr.add_argument("--t-end", dest="t_end", type=float, default=None)
    pr.add_argument("--dt", type=float, default=None)
    pr.add_argument("--patch-radius", dest="patch_radius", type=float, default=None)
    pr.add_argument("--blob-radius", dest="blob_radius", type=float, default=None)
    pr.add_argument("--particles", type=int, default=None)
    pr.add_argument("--snapshot-every", dest="snapshot_every", type=int, default=None)
    pr.add_argument("--snapshot-stride", type=int, default=1,
                    help="write every Nth snapshot to disk (0 = none)")
    pr.add_argument("--backend", choices=["direct", "tree"], default=None)
    pr.add_argument("--k", type=int, nargs="+", default=[2, 4])
    pr.add_argument("--resume", default=None, help="checkpoint directory to resume from")
    pr.add_argument("--output", default="patch_out")
    pr.set_defaults(func=cmd_patch_run)

    dg = sub.add_parser("diag", help="recompute diagnostics from stored snapshots")
    dg.add_argument("--snapshots", required=True, help="directory of snapshot_*.csv")
    dg.add_argument("--reference", required=True, help="configuration JSON")
    dg.add_argument("--k", type=int, nargs="+", default=[2, 4])
    dg.add_argument("--output", default="diag_out")
    dg.set_defaults(func=cmd_diag)

    bn = sub.add_parser("bench", help="tree vs direct timing table")
    bn.add_argument("--n", type=int, default=10_000)
    bn.add_argument("--theta", type=float, default=0.5)
    bn.add_argument("--order", type=int, default=4)
    bn.add_argument("--delta", type=float, default=0.0)
    bn.add_argument("--seed", type=int, default=0)
    bn.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except _IO as exc:
        return _fail(EXIT_IO, exc)
    except _VALIDATION as exc:
        return _fail(EXIT_VALIDATION, exc)


if __name__ == "__main__":
    sys.exit(main())
