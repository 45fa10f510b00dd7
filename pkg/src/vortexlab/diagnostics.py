"""Per-snapshot measurements: centers, moments, angular functionals,
energy, concentration, and scaling-exponent fits.

Moments, angular functionals and concentration all weight by |strength|.
The patches have definite sign, so this matches the signed definition up
to the sign of the patch circulation while keeping every moment >= 0; the
signed value is sign(Omega_i) times ours.  All moments are centered at the
cloud's center of mass; the concentration point and its offset from the
center of mass are reported separately, so the center-vs-concentration
ambiguity stays measurable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .configlab import similarity_decompose
from .core import FloatArray, ParticleCloud, PointVortexSystem, SimulationState
from .errors import ValidationError, ZeroTotalCirculationError
from .kernels import pair_log_energy


@dataclass
class MomentReport:
    patch_id: int
    center: FloatArray
    moments: dict[int, float]      # even k -> I_k about the center of mass
    support_radius: float


@dataclass
class ConcentrationReport:
    patch_id: int
    x_tilde: FloatArray
    R: float
    delta: float
    offcenter: float


@dataclass
class ExponentFit:
    exponent: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


def center_of_mass(cloud: ParticleCloud) -> FloatArray:
    total = cloud.strengths.sum()
    if total == 0.0:
        raise ZeroTotalCirculationError("cloud has zero total strength")
    return (cloud.strengths[:, None] * cloud.positions).sum(axis=0) / total


def _radii(cloud: ParticleCloud, center=None) -> FloatArray:
    c = center_of_mass(cloud) if center is None else center
    d = cloud.positions - c
    return np.sqrt(np.einsum("ij,ij->i", d, d))


def moment(cloud: ParticleCloud, k: int) -> float:
    """k-th radial moment about the center of mass, |strength|-weighted."""
    if k < 2 or k % 2 != 0:
        raise ValidationError("moment order k must be an even integer >= 2")
    return float((np.abs(cloud.strengths) * _radii(cloud) ** k).sum())


def support_radius(cloud: ParticleCloud) -> float:
    return float(_radii(cloud).max())


def moment_report(cloud: ParticleCloud, patch_id: int, k_list=(2, 4)) -> MomentReport:
    return MomentReport(
        patch_id=patch_id,
        center=center_of_mass(cloud),
        moments={k: moment(cloud, k) for k in k_list},
        support_radius=support_radius(cloud),
    )


def _signed_angles(cloud: ParticleCloud, axis_from, axis_to) -> tuple[FloatArray, FloatArray]:
    a = np.asarray(axis_from, dtype=np.float64) - np.asarray(axis_to, dtype=np.float64)
    if a[0] == 0.0 and a[1] == 0.0:
        raise ValidationError("degenerate axis: axis_from equals axis_to")
    c = center_of_mass(cloud)
    b = cloud.positions - c
    # CCW angle from the axis vector to each radius vector
    theta = np.arctan2(a[0] * b[:, 1] - a[1] * b[:, 0], a[0] * b[:, 0] + a[1] * b[:, 1])
    r = np.sqrt(np.einsum("ij,ij->i", b, b))
    return theta, r


def f_moment(cloud: ParticleCloud, axis_from, axis_to, k: int) -> float:
    """Renormalized angular moment: sum |strength| * (-cos 2theta) * r^(k+2).

    theta is the signed counterclockwise angle from (axis_from - axis_to)
    to (particle - center of mass).
    """
    theta, r = _signed_angles(cloud, axis_from, axis_to)
    return float((np.abs(cloud.strengths) * (-np.cos(2.0 * theta)) * r ** (k + 2)).sum())


def sin_moment(cloud: ParticleCloud, axis_from, axis_to, k: int) -> float:
    """sum |strength| * 2 sin(2theta) * r^k, same angle convention as f_moment."""
    theta, r = _signed_angles(cloud, axis_from, axis_to)
    return float((np.abs(cloud.strengths) * 2.0 * np.sin(2.0 * theta) * r**k).sum())


def renormalization_check(
    snapshots: list[tuple[float, SimulationState]],
    patch_id: int,
    other_patch_id: int,
    k: int,
) -> tuple[float, float, float]:
    """Compare d/dt of f_moment against its predicted leading term.

    lhs: centered finite differences of f_moment over the uniform-cadence
    window, averaged; rhs: Omega_1 * sin_moment at the interior snapshots,
    averaged.  Returns (lhs, rhs, |lhs - rhs|); averaging before the
    difference lets the oscillatory component of both sides cancel over a
    full rotation period.
    """
    if len(snapshots) < 3:
        raise ValidationError("renormalization check needs at least 3 snapshots")
    times = np.array([t for t, _ in snapshots])
    h = np.diff(times)
    if not np.allclose(h, h[0], rtol=1e-8):
        raise ValidationError("snapshots must have uniform cadence")
    h = float(h[0])

    F = []
    rhs_vals = []
    for _, state in snapshots:
        cloud = state.clouds[patch_id]
        c_self = center_of_mass(cloud)
        c_other = center_of_mass(state.clouds[other_patch_id])
        F.append(f_moment(cloud, c_self, c_other, k))
        omega1 = cloud.total_strength
        rhs_vals.append(omega1 * sin_moment(cloud, c_self, c_other, k))
    F = np.array(F)
    rhs_vals = np.array(rhs_vals)

    d = (F[2:] - F[:-2]) / (2.0 * h)
    r_mid = rhs_vals[1:-1]
    lhs = float(d.mean())
    rhs = float(r_mid.mean())
    return lhs, rhs, abs(lhs - rhs)


def interaction_energy(state: SimulationState) -> float:
    """Pairwise log energy over all particles, self-pairs excluded.

    Near-coincident pairs are floored at the blob radius; with a zero blob
    radius a tiny floor keeps the value finite.
    """
    pos = state.all_positions()
    g = state.all_strengths()
    floor = max(max(c.blob_radius for c in state.clouds), 1e-300)
    return float(
        pair_log_energy(
            np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]),
            np.ascontiguousarray(g), floor,
        )
    )


def concentration_radius(cloud: ParticleCloud, delta: float, patch_id: int = 0) -> ConcentrationReport:
    """Smallest radius around the best particle-centered candidate that
    leaves out at most delta^4 of the |strength| mass."""
    if not 0.0 < delta < 1.0:
        raise ValidationError("delta must lie in (0, 1)")
    w = np.abs(cloud.strengths)
    total = w.sum()
    allowed = delta**4 * total
    pos = cloud.positions
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    best_R = np.inf
    best_idx = 0
    for i in range(len(pos)):
        order = np.argsort(dist[i], kind="stable")
        cum = np.cumsum(w[order])
        excluded = total - cum
        j = int(np.argmax(excluded <= allowed))
        R_i = dist[i, order[j]]
        if R_i < best_R:
            best_R = R_i
            best_idx = i
    c = center_of_mass(cloud)
    x_tilde = pos[best_idx].copy()
    return ConcentrationReport(
        patch_id=patch_id,
        x_tilde=x_tilde,
        R=float(best_R),
        delta=delta,
        offcenter=float(np.hypot(*(x_tilde - c))),
    )


def growth_exponent(series, window: tuple[float, float]) -> ExponentFit:
    """OLS of log(value) on log(t) over the window."""
    t = np.array([p[0] for p in series], dtype=np.float64)
    v = np.array([p[1] for p in series], dtype=np.float64)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if mask.sum() < 10:
        raise ValidationError(f"need >= 10 samples in window, got {int(mask.sum())}")
    if np.any(v[mask] <= 0.0):
        raise ValidationError("all values in the window must be positive")
    lt, lv = np.log(t[mask]), np.log(v[mask])
    slope, intercept = np.polyfit(lt, lv, 1)
    pred = slope * lt + intercept
    ss_res = float(((lv - pred) ** 2).sum())
    ss_tot = float(((lv - lv.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(
        exponent=float(slope), intercept=float(intercept), r_squared=r2, window=(lo, hi)
    )


def bootstrap_report(
    snapshots: list[tuple[float, SimulationState]],
    reference: PointVortexSystem,
    k_list=(2, 4),
    with_energy: bool = True,
) -> list[dict]:
    """One row per snapshot with every tracked quantity.

    Columns: time, patch centers, similarity decomposition (beta, gamma,
    max |z_i - y_i|), moments I_k per patch, support radii, I_x and E of
    the centers, and the total pairwise log energy L.
    """
    om = reference.circulations
    rows = []
    for t, state in snapshots:
        centers = np.array([center_of_mass(c) for c in state.clouds])
        dec = similarity_decompose(centers, reference)
        row = {"t": t, "beta": dec.beta, "gamma": dec.gamma, "max_dev": dec.deviation,
               "I_z": dec.I_z, "E_z": dec.E_z}
        for i in range(3):
            row[f"x{i + 1}x"] = float(centers[i, 0])
            row[f"x{i + 1}y"] = float(centers[i, 1])
            row[f"support{i + 1}"] = support_radius(state.clouds[i])
            for k in k_list:
                row[f"I{k}_{i + 1}"] = moment(state.clouds[i], k)
        row["I_x"] = float((om * np.einsum("ij,ij->i", centers, centers)).sum())
        d = centers[:, None, :] - centers[None, :, :]
        r = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
        iu = np.triu_indices(3, k=1)
        ww = om[:, None] * om[None, :]
        row["E_centers"] = float(2.0 * (ww[iu] * np.log(r[iu])).sum())
        if with_energy:
            row["L"] = interaction_energy(state)
        rows.append(row)
    return rows
