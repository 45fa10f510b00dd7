"""Exact N-point-vortex ODE: right-hand side, integration, invariants.

The ODE (time rescaled so the 2*pi is absorbed) is

    dx_i/dt = sum_{j != i} Omega_j * perp(x_i - x_j) / |x_i - x_j|^2

Integration uses a Dormand-Prince 5(4) embedded pair with a PI step
controller; short runs relative to drift horizons make accuracy-first
adaptive RK preferable to symplectic schemes here, and the invariant
drift is measured rather than assumed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import FloatArray, PointVortexSystem, min_pairwise_separation, perp
from .errors import (
    CoincidentVorticesError,
    CollisionAbortError,
    StepSizeUnderflowError,
    ValidationError,
)


@dataclass
class InvariantReport:
    """Conserved quantities of a point-vortex system.

    E uses the ordered double sum over i != j exactly, so each unordered
    pair is counted twice.  tilde_I is the double pairwise sum
    sum_ij Omega_i Omega_j |x_i - x_j|^2, computed directly from distances
    (its identity with 2*(sum Omega)*I - 2*|X|^2 is checked in tests, not
    assumed here).
    """

    X: FloatArray
    I: float
    E: float
    tilde_I: float


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    min_separation: float = float("inf")


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[PointVortexSystem] = field(default_factory=list)
    step_stats: StepStats = field(default_factory=StepStats)


def rhs(system: PointVortexSystem) -> FloatArray:
    """Velocity of each vortex; no self-contribution."""
    return _rhs_arrays(system.positions, system.circulations)


def _rhs_arrays(positions: FloatArray, circulations: FloatArray) -> FloatArray:
    n = len(circulations)
    if n == 1:
        return np.zeros((1, 2))
    d = positions[:, None, :] - positions[None, :, :]          # (N,N,2)
    r2 = np.einsum("ijk,ijk->ij", d, d)
    off = ~np.eye(n, dtype=bool)
    if np.any(r2[off] == 0.0):
        raise CoincidentVorticesError("two vortices at the same position")
    np.fill_diagonal(r2, 1.0)
    w = circulations[None, :] / r2
    np.fill_diagonal(w, 0.0)
    return np.einsum("ij,ijk->ik", w, perp(d))


def invariants(system: PointVortexSystem) -> InvariantReport:
    """Linear impulse X, angular impulse I, interaction energy E, tilde I."""
    x, om = system.positions, system.circulations
    X = (om[:, None] * x).sum(axis=0)
    I = float((om * np.einsum("ij,ij->i", x, x)).sum())
    d = x[:, None, :] - x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    n = len(om)
    iu = np.triu_indices(n, k=1)
    if n > 1 and np.any(r2[iu] == 0.0):
        raise CoincidentVorticesError("log singularity: coincident vortices")
    ww = om[:, None] * om[None, :]
    # ordered i != j sum: each unordered pair twice
    E = float(2.0 * (ww[iu] * 0.5 * np.log(r2[iu])).sum())
    tilde_I = float(2.0 * (ww[iu] * r2[iu]).sum())
    return InvariantReport(X=X, I=I, E=E, tilde_I=tilde_I)


# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


def integrate(
    system: PointVortexSystem,
    t0: float,
    t1: float,
    tol: float,
    sample_times=None,
    collision_floor: float | None = None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Adaptive Dormand-Prince integration from t0 to t1 (either direction).

    Records the state at every accepted step, or exactly at `sample_times`
    when given (steps are clipped to land on them).  Aborts loudly when the
    minimum pairwise separation falls below `collision_floor` (default
    1e-6 times the initial minimum separation) or when the step size
    underflows.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if t1 == t0:
        raise ValidationError("t1 must differ from t0")
    direction = 1.0 if t1 > t0 else -1.0

    x = system.positions.copy()
    om = system.circulations
    sep0 = min_pairwise_separation(x)
    floor = 1e-6 * sep0 if collision_floor is None else collision_floor

    samples = None
    if sample_times is not None:
        samples = sorted(float(s) for s in sample_times)
        if direction < 0:
            samples = samples[::-1]

    traj = Trajectory()
    stats = traj.step_stats
    stats.min_separation = sep0

    def record(t, pos):
        traj.times.append(t)
        traj.states.append(system.with_positions(pos))

    t = float(t0)
    next_sample = 0
    if samples is not None:
        while next_sample < len(samples) and samples[next_sample] * direction <= t * direction:
            record(samples[next_sample], x)
            next_sample += 1
    else:
        record(t, x)

    span = abs(t1 - t0)
    h = direction * min(1e-2 * span, 0.1)
    k = [None] * 7
    k[0] = _rhs_arrays(x, om)
    err_prev = 1.0
    safety, fac_min, fac_max = 0.9, 0.2, 5.0

    for _ in range(max_steps):
        if (t - t1) * direction >= 0:
            break
        if abs(h) < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflowError(f"step size underflow at t={t:g}")
        if (t + h - t1) * direction > 0:
            h = t1 - t
        clipped_sample = False
        if samples is not None and next_sample < len(samples):
            s = samples[next_sample]
            if (t + h - s) * direction > 0 or abs(t + h - s) < 1e-14 * max(1.0, abs(s)):
                h = s - t
                clipped_sample = True

        try:
            for i in range(1, 7):
                xi = x + h * sum(a * k[j] for j, a in enumerate(_A[i]))
                k[i] = _rhs_arrays(xi, om)
        except CoincidentVorticesError:
            raise CollisionAbortError(t, _closest_pair(x), min_pairwise_separation(x))

        x5 = x + h * sum(b * k[i] for i, b in enumerate(_B5) if b)
        x4 = x + h * sum(b * k[i] for i, b in enumerate(_B4) if b)
        scale = tol + tol * np.maximum(np.abs(x), np.abs(x5))
        err = float(np.sqrt(np.mean(((x5 - x4) / scale) ** 2)))
        err = max(err, 1e-30)

        if err <= 1.0:
            t = t + h
            x = x5
            k[0] = k[6]  # FSAL
            stats.accepted += 1
            sep = min_pairwise_separation(x)
            stats.min_separation = min(stats.min_separation, sep)
            if sep < floor:
                raise CollisionAbortError(t, _closest_pair(x), sep)
            if samples is None:
                record(t, x)
            elif clipped_sample:
                record(samples[next_sample], x)
                next_sample += 1
            # PI controller
            fac = safety * err ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            err_prev = err
        else:
            stats.rejected += 1
            fac = safety * err ** (-1 / 5)
        h *= min(fac_max, max(fac_min, fac))
    else:
        raise StepSizeUnderflowError("max step count exceeded")

    return traj


def _closest_pair(positions: FloatArray) -> tuple[int, int]:
    n = len(positions)
    best, pair = float("inf"), (0, 0)
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.hypot(*(positions[i] - positions[j])))
            if d < best:
                best, pair = d, (i, j)
    return pair


def rk4_step(positions: FloatArray, circulations: FloatArray, dt: float) -> FloatArray:
    """One classical RK4 step of the point-vortex ODE."""
    k1 = _rhs_arrays(positions, circulations)
    k2 = _rhs_arrays(positions + 0.5 * dt * k1, circulations)
    k3 = _rhs_arrays(positions + 0.5 * dt * k2, circulations)
    k4 = _rhs_arrays(positions + dt * k3, circulations)
    return positions + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed_rk4(
    system: PointVortexSystem, t0: float, t1: float, dt: float, sample_every: int = 1
) -> Trajectory:
    """Fixed-step RK4, matched step-for-step by the patch engine's oracle tests."""
    if dt <= 0 or t1 <= t0:
        raise ValidationError("need dt > 0 and t1 > t0")
    n_steps = int(round((t1 - t0) / dt))
    x = system.positions.copy()
    traj = Trajectory()
    traj.times.append(t0)
    traj.states.append(system.with_positions(x))
    for s in range(1, n_steps + 1):
        x = rk4_step(x, system.circulations, dt)
        traj.step_stats.accepted += 1
        sep = min_pairwise_separation(x)
        traj.step_stats.min_separation = min(traj.step_stats.min_separation, sep)
        if s % sample_every == 0 or s == n_steps:
            traj.times.append(t0 + s * dt)
            traj.states.append(system.with_positions(x))
    return traj


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write t, per-vortex positions, X, I, E with 17 significant digits."""
    n = traj.states[0].n
    header = ["t"]
    for i in range(1, n + 1):
        header += [f"x{i}x", f"x{i}y"]
    header += ["X_x", "X_y", "I", "E"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for t, st in zip(traj.times, traj.states):
            inv = invariants(st)
            row = [t] + list(st.positions.ravel()) + [inv.X[0], inv.X[1], inv.I, inv.E]
            w.writerow([f"{v:.17g}" for v in row])
