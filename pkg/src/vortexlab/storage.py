"""On-disk formats: snapshot CSV, checkpoint (snapshot + config echo),
configuration JSON.  Every format carries a format_version / schema_version
field; floats are written with 17 significant digits so they round-trip
bit-exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .core import ParticleCloud, PointVortexSystem, SimulationState
from .errors import SnapshotFormatError
from .patches import RunConfig
from .tree import TreeParams

SNAPSHOT_FORMAT_VERSION = 1
CONFIG_SCHEMA_VERSION = 1


def write_snapshot_csv(state: SimulationState, path) -> None:
    meta = {
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "time": f"{state.time:.17g}",
        "blob_radius": f"{state.clouds[0].blob_radius:.17g}",
        "signs": ",".join(str(c.sign) for c in state.clouds),
    }
    with open(path, "w", newline="") as f:
        f.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        w = csv.writer(f)
        w.writerow(["cloud_id", "gamma", "x", "y"])
        for cid, cloud in enumerate(state.clouds):
            for g, (x, y) in zip(cloud.strengths, cloud.positions):
                w.writerow([cid, f"{g:.17g}", f"{x:.17g}", f"{y:.17g}"])


def read_snapshot_csv(path) -> SimulationState:
    path = Path(path)
    if not path.exists():
        raise SnapshotFormatError(f"missing snapshot file: {path}")
    with open(path, newline="") as f:
        header = f.readline()
        if not header.startswith("# "):
            raise SnapshotFormatError(f"{path}: missing metadata line")
        try:
            meta = dict(item.split("=", 1) for item in header[2:].split())
            if int(meta.get("format_version", -1)) != SNAPSHOT_FORMAT_VERSION:
                raise SnapshotFormatError(f"{path}: unsupported format_version")
            time = float(meta["time"])
            blob_radius = float(meta["blob_radius"])
            signs = [int(s) for s in meta["signs"].split(",")]
        except (ValueError, KeyError) as exc:
            raise SnapshotFormatError(f"{path}: corrupt metadata line ({exc})") from None
        reader = csv.reader(f)
        try:
            cols = next(reader)
        except StopIteration:
            raise SnapshotFormatError(f"{path}: empty snapshot") from None
        if cols != ["cloud_id", "gamma", "x", "y"]:
            raise SnapshotFormatError(f"{path}: unexpected columns {cols}")
        data: dict[int, list[tuple[float, float, float]]] = {0: [], 1: [], 2: []}
        for row in reader:
            if not row:
                continue
            cid = int(row[0])
            data.setdefault(cid, []).append((float(row[1]), float(row[2]), float(row[3])))
    clouds = []
    for cid in range(3):
        rows = data.get(cid, [])
        if not rows:
            raise SnapshotFormatError(f"{path}: cloud {cid} has no particles")
        arr = np.array(rows)
        clouds.append(
            ParticleCloud(
                positions=arr[:, 1:3], strengths=arr[:, 0],
                blob_radius=blob_radius, sign=signs[cid],
            )
        )
    return SimulationState(clouds=tuple(clouds), time=time)


def system_to_dict(system: PointVortexSystem) -> dict:
    return {
        "circulations": [float(c) for c in system.circulations],
        "positions": [[float(x), float(y)] for x, y in system.positions],
    }


def system_from_dict(d: dict) -> PointVortexSystem:
    return PointVortexSystem(
        positions=np.array(d["positions"], dtype=np.float64),
        circulations=np.array(d["circulations"], dtype=np.float64),
    )


def run_config_to_dict(config: RunConfig) -> dict:
    return {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "reference": system_to_dict(config.reference),
        "t0": config.t0,
        "t_end": config.t_end,
        "patch_radius": config.patch_radius,
        "particles_per_patch": config.particles_per_patch,
        "profile": config.profile,
        "blob_radius": config.blob_radius,
        "dt": config.dt,
        "dt_policy": config.dt_policy,
        "snapshot_every": config.snapshot_every,
        "recentre_initial": config.recentre_initial,
        "backend": config.backend,
        "tree_params": asdict(config.tree_params),
        "speed_limit": config.speed_limit,
        "check_reference": config.check_reference,
    }


def run_config_from_dict(d: dict) -> RunConfig:
    if d.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise SnapshotFormatError("unsupported config schema_version")
    return RunConfig(
        reference=system_from_dict(d["reference"]),
        t0=d["t0"],
        t_end=d["t_end"],
        patch_radius=d["patch_radius"],
        particles_per_patch=d["particles_per_patch"],
        profile=d["profile"],
        blob_radius=d["blob_radius"],
        dt=d["dt"],
        dt_policy=d["dt_policy"],
        snapshot_every=d["snapshot_every"],
        recentre_initial=d["recentre_initial"],
        backend=d["backend"],
        tree_params=TreeParams(**d["tree_params"]),
        speed_limit=d["speed_limit"],
        check_reference=d["check_reference"],
    )


def write_checkpoint(state: SimulationState, config: RunConfig, directory) -> None:
    """Snapshot CSV plus a JSON sidecar echoing the full run configuration."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tmp = directory / "checkpoint.csv.tmp"
    write_snapshot_csv(state, tmp)
    tmp.replace(directory / "checkpoint.csv")
    sidecar = {"schema_version": CONFIG_SCHEMA_VERSION, "config": run_config_to_dict(config)}
    tmp_json = directory / "checkpoint.json.tmp"
    tmp_json.write_text(json.dumps(sidecar, indent=2))
    tmp_json.replace(directory / "checkpoint.json")


def read_checkpoint(directory) -> tuple[SimulationState, RunConfig]:
    directory = Path(directory)
    json_path = directory / "checkpoint.json"
    if not json_path.exists():
        raise SnapshotFormatError(f"missing checkpoint sidecar: {json_path}")
    sidecar = json.loads(json_path.read_text())
    config = run_config_from_dict(sidecar["config"])
    state = read_snapshot_csv(directory / "checkpoint.csv")
    return state, config


def write_bootstrap_csv(rows: list[dict], path) -> None:
    if not rows:
        raise SnapshotFormatError("no rows to write")
    cols = list(rows[0].keys())
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(cols)
        for row in rows:
            w.writerow([f"{row[c]:.17g}" if isinstance(row[c], float) else row[c] for c in cols])
