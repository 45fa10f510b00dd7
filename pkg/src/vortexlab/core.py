"""Geometric primitives, the velocity kernel, and the shared domain types.

Positions are float64 numpy arrays: a single point has shape (2,), a set of
points has shape (N, 2).  The perp convention is counterclockwise,
x^perp = (-x2, x1); this choice is global and propagates into the sign of
the interaction energy, the angular moment functionals, and the rotation
direction of every simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import SingularEvaluationError, ValidationError

FloatArray = NDArray[np.float64]


def _as_points(x, name: str = "positions") -> FloatArray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[-1] != 2:
        raise ValidationError(f"{name} must have trailing dimension 2, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def perp(v) -> FloatArray:
    """Counterclockwise 90-degree rotation: (x, y) -> (-y, x).

    Works on a single vector of shape (2,) or batched arrays (..., 2).
    """
    v = np.asarray(v, dtype=np.float64)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def kernel(x, y, delta: float = 0.0) -> FloatArray:
    """Velocity kernel perp(x - y) / (|x - y|^2 + delta^2).

    With delta = 0 this is the exact kernel; delta > 0 gives the algebraic
    blob desingularization (rational, exactly antisymmetric in x <-> y).
    Broadcasts over leading dimensions.
    """
    if delta < 0:
        raise ValidationError("delta must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    d = x - y
    r2 = np.einsum("...i,...i->...", d, d) + delta * delta
    if np.any(r2 == 0.0):
        # delta = 0 at zero separation, or a subnormal delta whose square
        # underflows: either way the denominator vanished
        raise SingularEvaluationError("kernel evaluated with zero denominator")
    return perp(d) / r2[..., None]


def pairwise_distances(positions: FloatArray) -> FloatArray:
    """Full (N, N) matrix of pairwise distances."""
    d = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", d, d))


def min_pairwise_separation(positions: FloatArray) -> float:
    """Smallest distance between distinct points; inf for a single point."""
    n = len(positions)
    if n < 2:
        return float("inf")
    dist = pairwise_distances(positions)
    iu = np.triu_indices(n, k=1)
    return float(dist[iu].min())


@dataclass
class PointVortexSystem:
    """Positions and circulations of N ideal point vortices.

    Invariants: equal-length lists with N >= 1, every circulation nonzero,
    all positions pairwise distinct, all entries finite.
    """

    positions: FloatArray
    circulations: FloatArray

    def __post_init__(self):
        self.positions = _as_points(self.positions)
        if self.positions.ndim != 2:
            raise ValidationError("positions must have shape (N, 2)")
        self.circulations = np.asarray(self.circulations, dtype=np.float64)
        if self.circulations.ndim != 1 or len(self.circulations) != len(self.positions):
            raise ValidationError("circulations must have shape (N,) matching positions")
        if len(self.positions) < 1:
            raise ValidationError("need at least one vortex")
        if not np.isfinite(self.circulations).all():
            raise ValidationError("circulations contain non-finite values")
        if np.any(self.circulations == 0.0):
            raise ValidationError("all circulations must be nonzero")
        if min_pairwise_separation(self.positions) == 0.0:
            raise ValidationError("positions must be pairwise distinct")
        self.positions.setflags(write=False)
        self.circulations.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.circulations)

    @property
    def total_circulation(self) -> float:
        return float(self.circulations.sum())

    def with_positions(self, positions) -> "PointVortexSystem":
        return PointVortexSystem(np.array(positions, dtype=np.float64), self.circulations.copy())


@dataclass
class ParticleCloud:
    """Blob discretization of one signed patch.

    strengths carry the sign of the patch (or are zero); blob_radius is the
    desingularization length shared by all particles of the cloud.
    """

    positions: FloatArray
    strengths: FloatArray
    blob_radius: float
    sign: int

    def __post_init__(self):
        self.positions = _as_points(self.positions)
        if self.positions.ndim != 2:
            raise ValidationError("positions must have shape (n, 2)")
        self.strengths = np.asarray(self.strengths, dtype=np.float64)
        if self.strengths.shape != (len(self.positions),):
            raise ValidationError("strengths must have shape (n,) matching positions")
        if not np.isfinite(self.strengths).all():
            raise ValidationError("strengths contain non-finite values")
        if self.blob_radius < 0 or not np.isfinite(self.blob_radius):
            raise ValidationError("blob_radius must be finite and >= 0")
        if self.sign not in (-1, 1):
            raise ValidationError("sign must be +1 or -1")
        if np.any(self.sign * self.strengths < 0.0):
            raise ValidationError("every strength must have the stated sign or be zero")

    @property
    def n(self) -> int:
        return len(self.strengths)

    @property
    def total_strength(self) -> float:
        return float(self.strengths.sum())

    def with_positions(self, positions) -> "ParticleCloud":
        return ParticleCloud(
            np.array(positions, dtype=np.float64),
            self.strengths.copy(),
            self.blob_radius,
            self.sign,
        )


@dataclass
class SimulationState:
    """Three particle clouds plus the current time."""

    clouds: tuple[ParticleCloud, ParticleCloud, ParticleCloud]
    time: float

    def __post_init__(self):
        self.clouds = tuple(self.clouds)
        if len(self.clouds) != 3:
            raise ValidationError("SimulationState holds exactly 3 clouds")
        if not np.isfinite(self.time):
            raise ValidationError("time must be finite")

    def all_positions(self) -> FloatArray:
        return np.concatenate([c.positions for c in self.clouds], axis=0)

    def all_strengths(self) -> FloatArray:
        return np.concatenate([c.strengths for c in self.clouds], axis=0)

    def cloud_slices(self) -> list[slice]:
        out, start = [], 0
        for c in self.clouds:
            out.append(slice(start, start + c.n))
            start += c.n
        return out
