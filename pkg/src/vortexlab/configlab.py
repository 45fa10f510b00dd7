"""Construction and analysis of self-similarly expanding three-vortex systems.

A configuration with circulations satisfying the harmonic condition
Omega1*Omega2 + Omega1*Omega3 + Omega2*Omega3 = 0, linear impulse X = 0 and
angular impulse I = 0 can expand self-similarly: every vortex velocity is
(alpha*Id + beta*J) applied to its position, with J the perp map.  This
module verifies those hypotheses, fits (alpha, beta), searches for such
configurations by least squares, and decomposes evolved center triples into
rotation/dilation/normalized-shape parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .core import FloatArray, PointVortexSystem, pairwise_distances, perp
from .errors import (
    DegenerateConfigurationError,
    NonConvergenceError,
    ValidationError,
    ZeroTotalCirculationError,
)
from .pointvortex import invariants, rhs


@dataclass
class SelfSimilarFit:
    """Least-squares rates of the similarity motion V_i ~ (alpha*Id + beta*J) x_i.

    alpha > 0 classifies the configuration as expanding, alpha < 0 as
    collapsing, alpha = 0 as rigid rotation.  residual is the
    |Omega|-weighted RMS misfit.
    """

    alpha: float
    beta_rate: float
    residual: float


@dataclass
class LemmaReport:
    harmonic_residual: float
    sum_omega: float
    sum_identity_residual: float  # (sum Omega)^2 - (sum Omega^2 + 2 sum_{i<j} Omega_i Omega_j)
    X_norm: float
    I_value: float
    collinearity: float     # normalized triangle area; 0 = collinear
    equilaterality: float   # relative spread of pairwise distances; 0 = equilateral
    grad_parallelism: float


@dataclass
class LemmaThresholds:
    """Pass/fail knobs for the hypothesis checks; configuration, not law."""

    harmonic_tol: float = 1e-12
    impulse_tol: float = 1e-10
    collinearity_min: float = 1e-8
    equilaterality_min: float = 1e-8


def lemma_passes(report: LemmaReport, thresholds: LemmaThresholds | None = None) -> tuple[bool, list[str]]:
    th = thresholds or LemmaThresholds()
    reasons = []
    if abs(report.harmonic_residual) > th.harmonic_tol:
        reasons.append("harmonic circulation condition violated")
    if report.sum_omega == 0.0:
        reasons.append("total circulation is zero")
    if report.X_norm > th.impulse_tol:
        reasons.append("linear impulse X != 0")
    if abs(report.I_value) > th.impulse_tol:
        reasons.append("angular impulse I != 0")
    if report.collinearity < th.collinearity_min:
        reasons.append("configuration is collinear")
    if report.equilaterality < th.equilaterality_min:
        reasons.append("configuration is equilateral")
    return (not reasons, reasons)


@dataclass
class SimilarityDecomposition:
    """Rotation angle, dilation and de-similarized centers z_i.

    Applying rotation by beta then scaling by gamma to z reproduces the
    input centers up to the least-squares misfit.
    """

    beta: float
    gamma: float
    z: FloatArray            # (3, 2)
    I_z: float
    E_z: float
    deviation: float         # max_i |z_i - y_i|


def check_harmonic(circulations) -> float:
    """Residual of Omega1*Omega2 + Omega1*Omega3 + Omega2*Omega3 = 0."""
    o1, o2, o3 = (float(c) for c in circulations)
    return o1 * o2 + o1 * o3 + o2 * o3


def recentre(system: PointVortexSystem) -> PointVortexSystem:
    """Translate so that the linear impulse X vanishes."""
    total = system.total_circulation
    if total == 0.0:
        raise ZeroTotalCirculationError("cannot recentre with zero total circulation")
    X = (system.circulations[:, None] * system.positions).sum(axis=0)
    return system.with_positions(system.positions - X / total)


def self_similarity_fit(system: PointVortexSystem) -> SelfSimilarFit:
    """Weighted least squares of the vortex velocities onto alpha*x + beta*J x.

    The two basis fields x and J x are orthogonal in the |Omega|-weighted
    inner product, so the normal equations decouple.
    """
    x = system.positions
    w = np.abs(system.circulations)
    denom = float((w[:, None] * x * x).sum())
    if denom == 0.0:
        raise DegenerateConfigurationError("all positions at the origin")
    V = rhs(system)
    jx = perp(x)
    alpha = float((w[:, None] * V * x).sum() / denom)
    beta = float((w[:, None] * V * jx).sum() / denom)
    res = V - alpha * x - beta * jx
    rms = float(np.sqrt((w * np.einsum("ij,ij->i", res, res)).sum() / w.sum()))
    return SelfSimilarFit(alpha=alpha, beta_rate=beta, residual=rms)


def _triangle_metrics(positions: FloatArray) -> tuple[float, float]:
    d = pairwise_distances(positions)
    dists = np.array([d[0, 1], d[0, 2], d[1, 2]])
    dmax = dists.max()
    a = positions[1] - positions[0]
    b = positions[2] - positions[0]
    area2 = abs(a[0] * b[1] - a[1] * b[0])
    collinearity = float(area2 / dmax**2) if dmax > 0 else 0.0
    equilaterality = float((dmax - dists.min()) / dists.mean()) if dmax > 0 else 0.0
    return collinearity, equilaterality


def lemma_hypotheses(system: PointVortexSystem) -> LemmaReport:
    """Evaluate every numerically checkable hypothesis of the configuration lemma."""
    if system.n != 3:
        raise ValidationError("lemma hypotheses are defined for N = 3")
    om = system.circulations
    inv = invariants(system)
    harmonic = check_harmonic(om)
    cross_sum = float(om[0] * om[1] + om[0] * om[2] + om[1] * om[2])
    identity = float(om.sum() ** 2 - ((om**2).sum() + 2.0 * cross_sum))
    collinearity, equilaterality = _triangle_metrics(system.positions)
    try:
        gp = gradient_parallelism(system)
    except DegenerateConfigurationError:
        gp = 0.0
    return LemmaReport(
        harmonic_residual=harmonic,
        sum_omega=float(om.sum()),
        sum_identity_residual=identity,
        X_norm=float(np.hypot(*inv.X)),
        I_value=inv.I,
        collinearity=collinearity,
        equilaterality=equilaterality,
        grad_parallelism=gp,
    )


def gradient_parallelism(system: PointVortexSystem) -> float:
    """Wedge norm of the normalized gradients of E and tilde-I.

    Gradients are taken in pairwise-distance coordinates:
    dE/dd_ij = Omega_i*Omega_j/d_ij and d(tilde I)/dd_ij = 2*Omega_i*Omega_j*d_ij.
    Zero iff all pairwise distances are equal (equilateral triangle).
    """
    if system.n != 3:
        raise ValidationError("gradient parallelism is defined for N = 3")
    collinearity, _ = _triangle_metrics(system.positions)
    if collinearity < 1e-14:
        raise DegenerateConfigurationError("collinear triangle")
    d = pairwise_distances(system.positions)
    om = system.circulations
    pairs = [(0, 1), (0, 2), (1, 2)]
    dist = np.array([d[i, j] for i, j in pairs])
    ww = np.array([om[i] * om[j] for i, j in pairs])
    gE = ww / dist
    gI = 2.0 * ww * dist
    gE = gE / np.linalg.norm(gE)
    gI = gI / np.linalg.norm(gI)
    return float(np.linalg.norm(np.cross(gE, gI)))


def find_expanding_config(
    circulations,
    seed_positions,
    max_iterations: int = 100,
    target_residual: float = 1e-10,
    thresholds: LemmaThresholds | None = None,
) -> PointVortexSystem:
    """Solve for a self-similarly expanding configuration near the seed.

    Unknowns are the 3 positions; the residual stacks the similarity-fit
    misfit (with alpha, beta eliminated by the inner fit), X, I, and two
    gauge conditions pinning rotation (x1 stays on the ray of the seed's
    x1) and scale (|x1 - x2| keeps the seed value).
    """
    om = np.asarray(circulations, dtype=np.float64)
    if abs(check_harmonic(om)) > 1e-12:
        raise ValidationError(
            f"harmonic residual {check_harmonic(om):g} != 0: no self-similar expansion possible"
        )
    if om.sum() == 0.0:
        raise ZeroTotalCirculationError("total circulation must be nonzero")
    seed = np.asarray(seed_positions, dtype=np.float64).reshape(3, 2)
    s1 = seed[0]
    d12_seed = float(np.hypot(*(seed[0] - seed[1])))
    scale = max(1.0, float(np.abs(seed).max()))

    def residual_vec(flat):
        x = flat.reshape(3, 2)
        try:
            sys_ = PointVortexSystem(x, om)
            fit = self_similarity_fit(sys_)
            V = rhs(sys_)
        except Exception:
            return np.full(11, 1e6)
        jx = perp(x)
        sim = (V - fit.alpha * x - fit.beta_rate * jx).ravel()
        X = (om[:, None] * x).sum(axis=0)
        I = (om * np.einsum("ij,ij->i", x, x)).sum()
        gauge_rot = (s1[0] * x[0, 1] - s1[1] * x[0, 0]) / scale
        gauge_scale = np.hypot(*(x[0] - x[1])) - d12_seed
        return np.concatenate([sim, X / scale, [I / scale**2, gauge_rot, gauge_scale]])

    sol = least_squares(
        residual_vec,
        seed.ravel(),
        method="lm",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=max_iterations * 20,
    )
    result = PointVortexSystem(sol.x.reshape(3, 2), om)
    fit = self_similarity_fit(result)
    inv = invariants(result)
    vmax = float(np.abs(rhs(result)).max())
    if fit.residual > target_residual * max(vmax, 1.0) or abs(inv.I) > 1e-10 or np.hypot(*inv.X) > 1e-10:
        raise NonConvergenceError("self-similar configuration search failed", fit.residual)
    collinearity, equilaterality = _triangle_metrics(result.positions)
    th = thresholds or LemmaThresholds()
    if collinearity < th.collinearity_min:
        raise DegenerateConfigurationError("converged to a collinear configuration")
    if equilaterality < th.equilaterality_min:
        raise DegenerateConfigurationError("converged to an equilateral configuration")
    return result


def similarity_decompose(centers, reference: PointVortexSystem) -> SimilarityDecomposition:
    """Weighted complex Procrustes fit of centers = gamma * R_beta * reference.

    gamma*e^{i beta} is the |Omega|-weighted least-squares ratio
    sum w conj(y) x / sum w |y|^2 with positions as complex numbers; the
    de-similarized centers are z = gamma^-1 R_{-beta} x.
    """
    x = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    y = reference.positions
    if len(x) != len(y):
        raise ValidationError("centers must match the reference size")
    w = np.abs(reference.circulations)
    zc = x[:, 0] + 1j * x[:, 1]
    yc = y[:, 0] + 1j * y[:, 1]
    denom = float((w * np.abs(yc) ** 2).sum())
    if denom == 0.0:
        raise ValidationError("reference has zero norm")
    c = (w * np.conj(yc) * zc).sum() / denom
    gamma = float(np.abs(c))
    if gamma == 0.0:
        raise ValidationError("degenerate similarity: zero dilation")
    beta = float(np.angle(c))
    z_complex = zc * np.exp(-1j * beta) / gamma
    z = np.column_stack([z_complex.real, z_complex.imag])
    om = reference.circulations
    I_z = float((om * np.einsum("ij,ij->i", z, z)).sum())
    d = pairwise_distances(z)
    iu = np.triu_indices(len(z), k=1)
    ww = om[:, None] * om[None, :]
    E_z = float(2.0 * (ww[iu] * np.log(d[iu])).sum())
    deviation = float(np.sqrt(np.einsum("ij,ij->i", z - y, z - y)).max())
    return SimilarityDecomposition(beta=beta, gamma=gamma, z=z, I_z=I_z, E_z=E_z, deviation=deviation)
