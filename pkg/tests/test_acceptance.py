"""End-to-end acceptance suite.

Each criterion prints one pass/fail line.  Criteria 5-7 share a single full
three-patch run (n=1000 per patch, rho=1, t in [100, 400]) executed once
per session through a module-scoped fixture; the run streams per-step
diagnostics through the observer instead of retaining every snapshot.
"""

import time

import numpy as np
import pytest

from vortexlab import example_configuration
from vortexlab.configlab import (
    check_harmonic,
    gradient_parallelism,
    recentre,
    self_similarity_fit,
    similarity_decompose,
)
from vortexlab.core import PointVortexSystem, pairwise_distances
from vortexlab.diagnostics import (
    center_of_mass,
    growth_exponent,
    interaction_energy,
    moment,
    renormalization_check,
    support_radius,
)
from vortexlab.kernels import self_velocity
from vortexlab.patches import RunConfig, initial_state, run
from vortexlab.pointvortex import integrate, integrate_fixed_rk4, invariants, rhs
from vortexlab.tree import TreeParams, build_quadtree, tree_velocity

from conftest import random_three_vortex

T0, T_END, DT = 100.0, 400.0, 0.1
N_PER_PATCH = 1000


def report(n, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def reference():
    return recentre(example_configuration())


@pytest.fixture(scope="module")
def full_run(reference):
    cfg = RunConfig(
        reference=reference, t0=T0, t_end=T_END, patch_radius=1.0,
        particles_per_patch=N_PER_PATCH, dt=DT, snapshot_every=1,
    )
    # retain full states only inside two one-rotation-period windows
    # (patch 1 has |Omega| = 2 and internal rotation period pi)
    windows = [(T0, T0 + np.pi + 1e-9), (T_END - np.pi - 1e-9, T_END)]
    rows = []
    window_states = {0: [], 1: []}
    kept = {}

    def observer(t, state):
        idx = len(rows)
        g = state.all_strengths()
        pos = state.all_positions()
        com = (g[:, None] * pos).sum(0) / g.sum()
        centers = np.array([center_of_mass(c) for c in state.clouds])
        dec = similarity_decompose(centers, reference)
        row = {
            "t": t, "gamma": dec.gamma, "beta": dec.beta, "max_dev": dec.deviation,
            "com": com,
            "supports": [support_radius(c) for c in state.clouds],
            "I2": [moment(c, 2) for c in state.clouds],
        }
        if idx % 10 == 0:
            row["L"] = interaction_energy(state)
        rows.append(row)
        for w, (lo, hi) in enumerate(windows):
            if lo <= t <= hi:
                window_states[w].append((t, state))
        if idx == 0:
            kept["first"] = state
        kept["last"] = state

    run(cfg, observer=observer, keep_snapshots=False)
    return {"cfg": cfg, "rows": rows, "windows": window_states,
            "first": kept["first"], "last": kept["last"], "reference": reference}


def test_criterion_1_configuration_algebra(reference):
    example = example_configuration()
    harmonic = check_harmonic(example.circulations)
    inv = invariants(reference)
    ok = harmonic == 0.0 and np.hypot(*inv.X) <= 1e-13 and abs(inv.I) <= 1e-12
    report(1, ok, f"harmonic={harmonic:g} |X|={np.hypot(*inv.X):.2e} I={inv.I:.2e}")


def test_criterion_2_self_similarity(reference):
    fit = self_similarity_fit(reference)
    vmax = float(np.abs(rhs(reference)).max())
    ok = fit.residual <= 1e-10 * vmax and fit.alpha > 0

    traj = integrate(reference, 1.0, 100.0, 1e-10,
                     sample_times=np.linspace(1.0, 100.0, 34))
    d0 = pairwise_distances(traj.states[0].positions)[np.triu_indices(3, 1)]
    worst_ratio_spread = 0.0
    worst_I = 0.0
    for st in traj.states:
        d = pairwise_distances(st.positions)[np.triu_indices(3, 1)]
        r = d / d0
        worst_ratio_spread = max(worst_ratio_spread, (r.max() - r.min()) / r.mean())
        worst_I = max(worst_I, abs(invariants(st).I))
    ok = ok and worst_ratio_spread <= 1e-6 and worst_I <= 1e-9
    report(2, ok, f"alpha={fit.alpha:.6f} residual={fit.residual:.2e} "
                  f"ratio_spread={worst_ratio_spread:.2e} |I|max={worst_I:.2e}")


def test_criterion_3_appendix_identity():
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(100):
        s = random_three_vortex(rng)
        inv = invariants(s)
        pred = 2.0 * s.total_circulation * inv.I - 2.0 * float(inv.X @ inv.X)
        scale = max(abs(inv.tilde_I), abs(pred), 1.0)
        worst = max(worst, abs(inv.tilde_I - pred) / scale)
    ok = worst <= 1e-12

    ang = np.array([0.0, 2.0, 4.0]) * np.pi / 3.0
    equi = PointVortexSystem(
        np.column_stack([np.cos(ang), np.sin(ang)]), np.array([2.0, -1.0, 0.5])
    )
    gp_equi = gradient_parallelism(equi)
    ok = ok and gp_equi <= 1e-14

    min_generic = np.inf
    count = 0
    while count < 100:
        s = random_three_vortex(rng)
        d = pairwise_distances(s.positions)[np.triu_indices(3, 1)]
        if (d.max() - d.min()) / d.mean() < 1e-3:
            continue
        a = s.positions[1] - s.positions[0]
        b = s.positions[2] - s.positions[0]
        if abs(a[0] * b[1] - a[1] * b[0]) / d.max() ** 2 < 1e-6:
            continue
        min_generic = min(min_generic, gradient_parallelism(s))
        count += 1
    ok = ok and min_generic > 0.0
    report(3, ok, f"identity_max={worst:.2e} gp_equilateral={gp_equi:.2e} "
                  f"gp_generic_min={min_generic:.2e}")


def test_criterion_4_point_vortex_reduction(reference):
    dt = 0.5
    cfg = RunConfig(reference=reference, t0=T0, t_end=2 * T0, dt=dt,
                    particles_per_patch=1, blob_radius=0.0,
                    recentre_initial=False, snapshot_every=10**9)
    snaps = run(cfg)
    final = np.concatenate([c.positions for c in snaps[-1][1].clouds])
    ode = PointVortexSystem(np.sqrt(T0) * reference.positions, reference.circulations)
    ref_traj = integrate_fixed_rk4(ode, T0, 2 * T0, dt)
    ref_pos = ref_traj.states[-1].positions
    dev = np.abs(final - ref_pos).max() / np.abs(ref_pos).max()
    ok = dev <= 1e-8
    report(4, ok, f"relative deviation {dev:.2e} over t in [100, 200]")


def test_criterion_5_conservation(full_run):
    first, last = full_run["first"], full_run["last"]
    circ_exact = all(
        np.array_equal(a.strengths, b.strengths)
        and a.strengths.sum() == b.strengths.sum()
        for a, b in zip(first.clouds, last.clouds)
    )

    rows = full_run["rows"]
    scale = np.sqrt(T_END) * np.abs(full_run["reference"].positions).max()
    com_drift = max(float(np.abs(r["com"]).max()) for r in rows) / scale

    L_rows = [(r["t"], r["L"]) for r in rows if "L" in r]
    L0 = L_rows[0][1]
    L_drift = max(
        abs(L - L0) / (max(abs(L0), 1.0) * (t - T0)) for t, L in L_rows[1:]
    )
    ok = circ_exact and com_drift <= 1e-6 and L_drift <= 1e-3
    report(5, ok, f"circulation_bit_exact={circ_exact} com_drift={com_drift:.2e} "
                  f"L_drift_per_time={L_drift:.2e}")


def test_criterion_6_scaling(full_run):
    rows = full_run["rows"]
    ref = full_run["reference"]
    # the exact self-similar law of the reference: d(gamma^2)/dt = 2*alpha,
    # asymptotically gamma ~ sqrt(t); the patch centers must track it to 5%
    alpha = self_similarity_fit(ref).alpha
    gamma0 = rows[0]["gamma"]
    worst_gamma = max(
        abs(r["gamma"] / np.sqrt(gamma0**2 + 2.0 * alpha * (r["t"] - T0)) - 1.0)
        for r in rows
    )

    exps, r2s, i2_exps = [], [], []
    window = (T0, T_END)
    for i in range(3):
        fit = growth_exponent([(r["t"], r["supports"][i]) for r in rows], window)
        exps.append(fit.exponent)
        r2s.append(fit.r_squared)
        i2_exps.append(
            growth_exponent([(r["t"], r["I2"][i]) for r in rows], window).exponent
        )

    d_ref = pairwise_distances(ref.positions)[np.triu_indices(3, 1)]
    max_dev = max(r["max_dev"] for r in rows)
    dev_ok = max_dev <= 0.1 * d_ref.min()

    ok = (worst_gamma <= 0.05 and all(e <= 0.4 for e in exps)
          and all(e < 1.0 for e in i2_exps) and dev_ok)
    report(6, ok,
           f"gamma_vs_similarity_law={worst_gamma:.2e} support_exps={np.round(exps, 3)} "
           f"(r2={np.round(r2s, 3)}) I2_exps={np.round(i2_exps, 3)} "
           f"max_dev={max_dev:.3f} (limit {0.1 * d_ref.min():.3f})")


def test_criterion_7_renormalization(full_run):
    # window-averaged identity over one full rotation period of patch 1, at
    # the start and the end of the run; an undeformed disk violates the
    # identity's concentration hypothesis, so the pinned baseline bounds the
    # residual by 1% of I_2 (first measurements: 6.5e-3 and 2.3e-3)
    ok = True
    details = []
    for w in (0, 1):
        snaps = full_run["windows"][w]
        lhs, rhs_, resid = renormalization_check(snaps, 0, 1, 2)
        I2_mean = np.mean([moment(st.clouds[0], 2) for _, st in snaps])
        t_mid = np.mean([t for t, _ in snaps])
        bound = max(0.3 * max(abs(lhs), abs(rhs_), I2_mean / t_mid), 0.01 * I2_mean)
        ok = ok and resid <= bound
        details.append(f"w{w}: resid={resid:.2e} bound={bound:.2e}")

    # cadence refinement on the minimal nontrivial reduction: a dominant
    # vortex plus a light tracer forming cloud 1, one far vortex as cloud 2
    m = 1e-6
    sys3 = PointVortexSystem(
        np.array([[-m, 0.0], [1.0 - m, 0.0], [200.0, 0.0]]),
        np.array([1.0 - m, m, 1.0]),
    )
    fine = integrate_fixed_rk4(sys3, 0.0, 1.6, 0.0125)
    from vortexlab.core import ParticleCloud, SimulationState

    def snapshot(i):
        pos = fine.states[i].positions
        c1 = ParticleCloud(pos[:2], np.array([1.0 - m, m]), 0.0, 1)
        c2 = ParticleCloud(pos[2:3], np.array([1.0]), 0.0, 1)
        c3 = ParticleCloud(np.array([[500.0, -500.0]]), np.array([0.0]), 0.0, 1)
        return (fine.times[i], SimulationState(clouds=(c1, c2, c3), time=fine.times[i]))

    # all cadences difference about the same center time so the oscillation
    # phase is identical and only the step size h varies
    residuals = []
    cadences = (0.4, 0.2, 0.1)
    center = int(round(0.8 / 0.0125))
    for h in cadences:
        stride = int(round(h / 0.0125))
        sn = [snapshot(center - stride), snapshot(center), snapshot(center + stride)]
        residuals.append(renormalization_check(sn, 0, 1, 2)[2])
    slope = np.polyfit(np.log(cadences), np.log(residuals), 1)[0]
    ok = ok and 1.8 <= slope <= 2.2
    report(7, ok, f"{' '.join(details)} fd_slope={slope:.2f}")


def test_criterion_8_tree_backend():
    rng = np.random.default_rng(0)
    n = 10_000
    r = np.sqrt(rng.random(n))
    th = 2.0 * np.pi * rng.random(n)
    px, py = r * np.cos(th), r * np.sin(th)
    g = rng.random(n) - 0.5
    params = TreeParams(opening_angle=0.5, expansion_order=4)
    tree = build_quadtree(px, py, g, params)
    uxt, uyt = tree_velocity(tree, px, py, 0.0, params)
    uxd, uyd = self_velocity(px, py, g, 0.0)
    scale = float(np.hypot(uxd, uyd).max())
    dev = float(np.hypot(uxt - uxd, uyt - uyd).max()) / scale

    n2 = 100_000
    r = np.sqrt(rng.random(n2))
    th = 2.0 * np.pi * rng.random(n2)
    px2, py2 = r * np.cos(th), r * np.sin(th)
    g2 = rng.random(n2) - 0.5
    t0 = time.perf_counter()
    self_velocity(px2, py2, g2, 0.0)
    t_direct = time.perf_counter() - t0
    t0 = time.perf_counter()
    tree2 = build_quadtree(px2, py2, g2, params)
    tree_velocity(tree2, px2, py2, 0.0, params)
    t_tree = time.perf_counter() - t0
    speedup = t_direct / t_tree

    ok = dev <= 1e-4 and speedup > 1.0
    report(8, ok, f"max_rel_dev={dev:.2e} speedup_at_1e5={speedup:.1f}x "
                  f"(direct {t_direct:.1f}s, tree {t_tree:.1f}s)")
