"""Vortex-blob discretization of three patches and their transport.

Each patch replaces a point vortex with a cloud of particles on concentric
rings; the cloud is advected by the blob-regularized velocity of all
particles (direct O(N^2) summation or the Barnes-Hut tree).  Strengths
never change: circulation is conserved per particle, bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np

from .configlab import LemmaThresholds, lemma_hypotheses, lemma_passes
from .core import (
    FloatArray,
    ParticleCloud,
    PointVortexSystem,
    SimulationState,
    min_pairwise_separation,
)
from .errors import BlowUpError, SingularEvaluationError, ValidationError
from .kernels import direct_velocity, self_velocity
from .tree import Quadtree, TreeParams, build_quadtree, tree_velocity

Profile = Literal["uniform", "radial-bump"]

_GOLDEN_ANGLE = 2.0 * np.pi * 0.38196601125010515


@dataclass
class PatchSpec:
    center: FloatArray
    radius: float
    circulation: float
    profile: Profile = "uniform"
    particles_per_patch: int = 1

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64).reshape(2)
        if self.radius <= 0:
            raise ValidationError("patch radius must be positive")
        if self.circulation == 0:
            raise ValidationError("patch circulation must be nonzero")
        if self.particles_per_patch < 1:
            raise ValidationError("need at least one particle per patch")
        if self.profile not in ("uniform", "radial-bump"):
            raise ValidationError(f"unknown profile {self.profile!r}")


def default_blob_radius(radius: float, particles_per_patch: int) -> float:
    """Overlap heuristic: slightly above the ~radius/sqrt(n) particle spacing."""
    return 0.2 * radius / np.sqrt(particles_per_patch)


def _ring_layout(n: int) -> list[int]:
    """Counts per equal-width ring, proportional to annulus area, summing to n."""
    if n <= 3:
        return [n]
    m = max(1, int(round(np.sqrt(n / 4.0))))
    weights = np.array([2 * j - 1 for j in range(1, m + 1)], dtype=np.float64)
    raw = n * weights / weights.sum()
    counts = np.floor(raw).astype(int)
    remainder = n - counts.sum()
    for idx in np.argsort(raw - counts)[::-1][:remainder]:
        counts[idx] += 1
    # a ring with fewer than 3 particles cannot be angularly symmetric
    for j in range(m):
        while counts[j] < 3:
            counts[np.argmax(counts)] -= 1
            counts[j] += 1
    return [int(c) for c in counts]


def discretize_patch(spec: PatchSpec, blob_radius: float | None = None) -> ParticleCloud:
    """Lay particles on concentric rings inside B(center, radius).

    Ring radii are the rms radii of their annuli, so the uniform profile
    reproduces the analytic disk second moment |Omega| * radius^2 / 2
    exactly in the continuum-count limit.  The last particle's strength is
    adjusted so the total equals the patch circulation bit-exactly.
    """
    n = spec.particles_per_patch
    sign = 1 if spec.circulation > 0 else -1
    delta = default_blob_radius(spec.radius, n) if blob_radius is None else blob_radius
    if n == 1:
        return ParticleCloud(
            positions=spec.center.reshape(1, 2),
            strengths=np.array([spec.circulation]),
            blob_radius=delta,
            sign=sign,
        )
    counts = _ring_layout(n)
    m = len(counts)
    edges = spec.radius * np.arange(m + 1) / m
    positions = []
    strengths = []
    for j, c in enumerate(counts):
        r_in, r_out = edges[j], edges[j + 1]
        r = np.sqrt(0.5 * (r_in**2 + r_out**2))
        if spec.profile == "uniform":
            mass = r_out**2 - r_in**2
        else:  # radial-bump, density (1 - r^2/rho^2)
            rho2 = spec.radius**2
            mass = (r_out**2 - r_in**2) - (r_out**4 - r_in**4) / (2.0 * rho2)
        ang = 2.0 * np.pi * np.arange(c) / c + j * _GOLDEN_ANGLE
        positions.append(spec.center + r * np.column_stack([np.cos(ang), np.sin(ang)]))
        strengths.append(np.full(c, mass / c))
    pos = np.concatenate(positions, axis=0)
    s = np.concatenate(strengths)
    s *= spec.circulation / s.sum()
    s[-1] += spec.circulation - s.sum()
    return ParticleCloud(positions=pos, strengths=s, blob_radius=delta, sign=sign)


def _concat(clouds) -> tuple[FloatArray, FloatArray, FloatArray]:
    pos = np.concatenate([np.asarray(c.positions) for c in clouds], axis=0)
    g = np.concatenate([np.asarray(c.strengths) for c in clouds])
    return np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]), g


def induced_velocity(clouds, eval_points, delta: float) -> FloatArray:
    """Direct strength-weighted kernel sum over all particles of all clouds.

    Summation runs in cloud-major, particle-index order; deterministic for
    a fixed thread count (each output point is accumulated by one thread).
    """
    px, py, g = _concat(clouds)
    ep = np.asarray(eval_points, dtype=np.float64).reshape(-1, 2)
    ux, uy, n_singular = direct_velocity(
        px, py, g, np.ascontiguousarray(ep[:, 0]), np.ascontiguousarray(ep[:, 1]), delta * delta
    )
    if delta == 0.0 and n_singular:
        raise SingularEvaluationError(
            f"{n_singular} evaluation point(s) coincide with a particle and delta=0"
        )
    return np.column_stack([ux, uy])


def induced_velocity_tree(clouds, eval_points, delta: float, params: TreeParams) -> FloatArray:
    """Barnes-Hut approximation of induced_velocity (same interface)."""
    px, py, g = _concat(clouds)
    ep = np.asarray(eval_points, dtype=np.float64).reshape(-1, 2)
    tree = build_quadtree(px, py, g, params)
    ux, uy = tree_velocity(
        tree, np.ascontiguousarray(ep[:, 0]), np.ascontiguousarray(ep[:, 1]), delta, params
    )
    return np.column_stack([ux, uy])


class DirectBackend:
    """O(N^2) summation; self-pairs excluded when evaluating at the particles."""

    name = "direct"

    def particle_velocities(self, px, py, g, delta: float):
        return self_velocity(px, py, g, delta * delta)


class TreeBackend:
    name = "tree"

    def __init__(self, params: TreeParams | None = None):
        self.params = params or TreeParams()

    def particle_velocities(self, px, py, g, delta: float):
        tree = build_quadtree(px, py, g, self.params)
        return tree_velocity(tree, px, py, delta, self.params)


def _common_delta(state: SimulationState) -> float:
    deltas = {c.blob_radius for c in state.clouds}
    if len(deltas) != 1:
        raise ValidationError("all clouds must share one blob radius for stepping")
    return deltas.pop()


def step(state: SimulationState, dt: float, backend=None) -> SimulationState:
    """One classical RK4 step of all particle positions; strengths untouched."""
    if dt <= 0:
        raise ValidationError("dt must be positive")
    backend = backend or DirectBackend()
    delta = _common_delta(state)
    pos = state.all_positions()
    g = np.ascontiguousarray(state.all_strengths())

    def vel(p):
        ux, uy = backend.particle_velocities(
            np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1]), g, delta
        )
        return np.column_stack([ux, uy])

    k1 = vel(pos)
    k2 = vel(pos + 0.5 * dt * k1)
    k3 = vel(pos + 0.5 * dt * k2)
    k4 = vel(pos + dt * k3)
    new_pos = pos + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    clouds = []
    for c, sl in zip(state.clouds, state.cloud_slices()):
        clouds.append(c.with_positions(new_pos[sl]))
    return SimulationState(clouds=tuple(clouds), time=state.time + dt)


@dataclass
class RunConfig:
    """Full specification of a three-patch run."""

    reference: PointVortexSystem          # (y_i, Omega_i), the expanding configuration
    t0: float = 100.0
    t_end: float = 400.0
    patch_radius: float = 1.0
    particles_per_patch: int = 1000
    profile: Profile = "uniform"
    blob_radius: float | None = None      # None -> 0.2 * radius / sqrt(n)
    dt: float | None = None               # None -> 0.02 * min_sep^2 / max|Omega| at t0
    dt_policy: Literal["fixed", "scaled"] = "fixed"
    snapshot_every: int = 1               # in steps
    recentre_initial: bool = True
    backend: Literal["direct", "tree"] = "direct"
    tree_params: TreeParams = field(default_factory=TreeParams)
    speed_limit: float | None = None      # None -> 100 * max(1, initial max speed)
    check_reference: bool = True
    lemma_thresholds: LemmaThresholds = field(default_factory=LemmaThresholds)

    def __post_init__(self):
        if self.t0 <= 0:
            raise ValidationError("t0 must be positive")
        if self.t_end < self.t0:
            raise ValidationError("t_end must be >= t0")
        if self.snapshot_every < 1:
            raise ValidationError("snapshot_every must be >= 1")
        if self.reference.n != 3:
            raise ValidationError("reference must have exactly 3 vortices")


def initial_state(config: RunConfig) -> SimulationState:
    """Discretize the three patches at centers sqrt(t0) * y_i."""
    centers = np.sqrt(config.t0) * config.reference.positions
    n = config.particles_per_patch
    delta = (
        default_blob_radius(config.patch_radius, n)
        if config.blob_radius is None
        else config.blob_radius
    )
    clouds = []
    for i in range(3):
        spec = PatchSpec(
            center=centers[i],
            radius=config.patch_radius,
            circulation=float(config.reference.circulations[i]),
            profile=config.profile,
            particles_per_patch=n,
        )
        clouds.append(discretize_patch(spec, blob_radius=delta))
    state = SimulationState(clouds=tuple(clouds), time=config.t0)
    if config.recentre_initial:
        g = state.all_strengths()
        com = (g[:, None] * state.all_positions()).sum(axis=0) / g.sum()
        clouds = [c.with_positions(c.positions - com) for c in state.clouds]
        state = SimulationState(clouds=tuple(clouds), time=config.t0)
    return state


def default_dt(config: RunConfig) -> float:
    centers = np.sqrt(config.t0) * config.reference.positions
    min_sep = min_pairwise_separation(centers)
    max_om = float(np.abs(config.reference.circulations).max())
    return 0.02 * min_sep**2 / max_om


def run(
    config: RunConfig,
    observer: Callable[[float, SimulationState], None] | None = None,
    keep_snapshots: bool = True,
) -> list[tuple[float, SimulationState]]:
    """Evolve the three patches from t0 to t_end.

    Emits (time, state) at every snapshot_every-th step (always including
    the initial state); `observer` is called at the same cadence, letting
    callers stream diagnostics without retaining particle data.
    """
    if config.check_reference:
        report = lemma_hypotheses(config.reference)
        ok, reasons = lemma_passes(report, config.lemma_thresholds)
        if not ok:
            raise ValidationError("reference configuration rejected: " + "; ".join(reasons))

    state = initial_state(config)
    backend = TreeBackend(config.tree_params) if config.backend == "tree" else DirectBackend()
    dt0 = default_dt(config) if config.dt is None else config.dt
    if config.speed_limit is None:
        p0 = state.all_positions()
        ux0, uy0 = backend.particle_velocities(
            np.ascontiguousarray(p0[:, 0]), np.ascontiguousarray(p0[:, 1]),
            np.ascontiguousarray(state.all_strengths()), _common_delta(state),
        )
        speed_limit = 100.0 * max(1.0, float(np.hypot(ux0, uy0).max()))
    else:
        speed_limit = config.speed_limit

    snapshots: list[tuple[float, SimulationState]] = []

    def emit(s: SimulationState):
        if keep_snapshots:
            snapshots.append((s.time, s))
        if observer is not None:
            observer(s.time, s)

    emit(state)
    step_index = 0
    while state.time < config.t_end - 1e-9 * config.t_end:
        dt = dt0 if config.dt_policy == "fixed" else dt0 * state.time / config.t0
        dt = min(dt, config.t_end - state.time)
        prev_pos = state.all_positions()
        state = step(state, dt, backend)
        step_index += 1
        pos = state.all_positions()
        if not np.isfinite(pos).all():
            raise BlowUpError(f"non-finite particle position at t={state.time:g}")
        disp = pos - prev_pos
        max_speed = float(np.hypot(disp[:, 0], disp[:, 1]).max()) / dt
        if max_speed > speed_limit:
            raise BlowUpError(
                f"particle speed {max_speed:.3e} exceeded guard {speed_limit:.3e} at t={state.time:g}"
            )
        if step_index % config.snapshot_every == 0 or state.time >= config.t_end - 1e-9 * config.t_end:
            emit(state)
    return snapshots
