"""Acceptance criteria 1-11.

Each test records one PASS/FAIL line; conftest prints them at the end of the
session.  Run this file directly for the same lines without pytest.
"""
import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from warpform import gallery as G
from warpform.classify import (Tag, b1_structure_check, classify_point, classify_sample, rebase,
                               type_c_consistency)
from warpform.immersion import gauss_residual, isometry_residual, sample, second_ff, spherical_hull
from warpform.warped import (BlockDomain, FactorChart, Grid, WarpedDomain, check_distributions, curvature_warped,
                             riemann_fd, riemann_tensor, sectional_curvature)
from warpform import jets as J

RESULTS = {}


def record(k, ok, text):
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}: {text}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def hyperbolic_domain():
    L = FactorChart.euclidean(1, ((-1.0, 1.0),))
    M = FactorChart.euclidean(2, ((-1.0, 1.0), (-1.0, 1.0)))
    return WarpedDomain(L, M, lambda y: J.exp(y[0]))


# ---------------------------------------------------------------- 1

def test_c01_gauss_oracle():
    worst_jet, worst_fd, where = 0.0, 0.0, ""
    for name in G.names():
        inst = G.get(name)
        for z in inst.grid().points():
            rj = gauss_residual(inst.f, z, "jet")
            rf = gauss_residual(inst.f, z, "fd")
            if rj > worst_jet:
                worst_jet, where = rj, name
            worst_fd = max(worst_fd, rf)
    ok = worst_jet < 1e-6 and worst_fd < 1e-4
    record(1, ok, f"Gauss residual max {worst_jet:.2e} (jets, < 1e-6; worst {where}), "
                  f"{worst_fd:.2e} (FD, < 1e-4) over {len(G.names())} instances")


# ---------------------------------------------------------------- 2

def test_c02_warped_curvature():
    dom = hyperbolic_domain()
    rng = np.random.default_rng(2)
    sec_err = 0.0
    for z in dom.grid(5).points():
        for _ in range(4):
            u, v = rng.normal(size=3), rng.normal(size=3)
            sec_err = max(sec_err, abs(sectional_curvature(dom, z, u, v) + 1.0))
        eye = np.eye(3)
        for i in range(3):
            for j in range(i + 1, 3):
                sec_err = max(sec_err, abs(sectional_curvature(dom, z, eye[i], eye[j]) + 1.0))
    fd_err = 0.0
    for z in dom.grid(7).points():
        fd_err = max(fd_err, float(np.max(np.abs(riemann_tensor(dom, z, "warped") - riemann_fd(dom, z)))))
    vanish = 0.0
    for z in dom.grid(4).points():
        X, Y = rng.normal(size=3), rng.normal(size=3)
        X[1:] = 0
        Y[1:] = 0
        V, W = rng.normal(size=3), rng.normal(size=3)
        V[0] = W[0] = 0
        vanish = max(vanish, float(np.max(np.abs(curvature_warped(dom, z, X, Y, V)))),
                     float(np.max(np.abs(curvature_warped(dom, z, V, W, X)))))
    ok = sec_err < 1e-8 and fd_err < 1e-6 and vanish < 1e-9
    record(2, ok, f"R x_exp R^2: |K+1| max {sec_err:.1e} (< 1e-8); warped vs FD Riemann {fd_err:.1e} "
                  f"on 7x7x7 (< 1e-6); |R(X,Y)V|, |R(V,W)X| max {vanish:.1e} (< 1e-9)")


# ---------------------------------------------------------------- 3

def test_c03_psi_isometry():
    res = {}
    for c in (0, 1):
        inst = G.psi_chart_instance(c)
        res[c] = max(isometry_residual(inst.f, z) for z in inst.grid((9, 9)).points())
    ok = max(res.values()) < 1e-8
    record(3, ok, f"Psi pullback vs sigma-warped metric: c=0 {res[0]:.1e}, c=1 {res[1]:.1e} on 9x9 (< 1e-8)")


# ---------------------------------------------------------------- 4

def _alpha_error(inst):
    err = 0.0
    for z in inst.grid().points():
        s = sample(inst.f, z)
        amb = np.einsum("qij,qa->ija", second_ff(s).alpha, s.normal_frame)
        err = max(err, float(np.max(np.abs(amb - inst.predicted_alpha(z)))))
    return err


def test_c04_type_a_and_sff_split():
    bad, flagged, err = [], 0, 0.0
    for name in G.WARPED_NAMES:
        inst = G.get(name)
        for z in inst.grid().points():
            tag = classify_point(inst.f, z).tag
            if tag == Tag.INDETERMINATE:
                flagged += 1
            elif tag != Tag.A:
                bad.append((name, tag.value))
        err = max(err, _alpha_error(inst))
    # the grad rho-bar term is not decorative: without it the torus prediction is wrong
    rep = G.flat_rep(3, 1, [2])
    prof = G.FactorMap(G.line_chart(1, ((-2.8, 2.8),)),
                       lambda y: np.array([J.sin(y[0]), 3.0 + J.cos(y[0]), 0.0 * y[0]]))
    no_grad = G.make_rotational(prof, rep, ((-2.8, 2.8),), include_grad_term=False)
    err_no_grad = _alpha_error(no_grad)
    ok = not bad and err < 1e-7 and err_no_grad > 1e-2
    record(4, ok, f"{len(G.WARPED_NAMES)} warped-product instances: non-A points {len(bad)}, flagged {flagged}; "
                  f"predicted vs computed alpha {err:.1e} (< 1e-7); without grad term {err_no_grad:.2f}")


# ---------------------------------------------------------------- 5

def test_c05_hypersurface_restriction():
    rng = np.random.default_rng(5)
    insts = [G.get(n) for n in G.HYPERSURFACE_NAMES if n != "hypersurface_random"]
    insts += [G.hypersurface_random(seed=s) for s in range(1, 6)]
    insts = [i for i in insts if i.f.codim == 1]
    counts = {}
    total = 1000
    for k in range(total):
        inst = insts[k % len(insts)]
        lo = np.array([b[0] for b in inst.bounds])
        hi = np.array([b[1] for b in inst.bounds])
        z = lo + (hi - lo) * rng.random(len(lo))
        t = classify_point(inst.f, z).tag.value
        counts[t] = counts.get(t, 0) + 1
    bad = counts.get("B2", 0) + counts.get("C", 0)
    record(5, bad == 0, f"{total} random points over {len(insts)} codim-1 instances: "
                        f"{dict(sorted(counts.items()))}; B2 + C = {bad}")


# ---------------------------------------------------------------- 6

def test_c06_b2_exact_values():
    inst = G.get("clifford_tilted")
    worst = {"|lambda|-1/sqrt2": 0.0, "|beta|": 0.0, "|gamma|": 0.0, "|delta_t0|": 0.0}
    prod = 0.0
    tags = set()
    for z in inst.grid().points():
        pt = classify_point(inst.f, z)
        tags.add(pt.tag.value)
        b = pt.bdata
        if b is None:
            continue
        worst["|lambda|-1/sqrt2"] = max(worst["|lambda|-1/sqrt2"], abs(abs(b.lam) - 1 / math.sqrt(2)))
        worst["|beta|"] = max(worst["|beta|"], abs(b.beta))
        worst["|gamma|"] = max(worst["|gamma|"], abs(b.gamma))
        worst["|delta_t0|"] = max(worst["|delta_t0|"], abs(b.delta_t0))
        prod = max(prod, abs(b.delta_t0 + inst.f.space.c))
    ok = tags == {"B2"} and max(worst.values()) < 1e-6 and prod < 1e-8
    record(6, ok, f"tilted Clifford torus tags {sorted(tags)}; "
                  + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f" (< 1e-6); |delta_t0+c| {prod:.1e} (< 1e-8)")


# ---------------------------------------------------------------- 7

def test_c07_b1_structure():
    inst = G.get("bent_rotational")
    grid = inst.grid()
    tags = {}
    for z in grid.points():
        t = classify_point(inst.f, z).tag.value
        tags[t] = tags.get(t, 0) + 1
    rep = b1_structure_check(inst.f, grid)
    sv = rep.maxima.get("sv_ratio", 1.0)
    om = rep.maxima.get("omega_on_kernel", 1.0)
    bg = rep.minima.get("abs_beta_plus_gamma", 0.0)
    ok = tags.get("B1", 0) == grid.size and sv < 1e-6 and om < 1e-5 and bg > 0.01
    record(7, ok, f"bent rotational composition tags {tags}; sigma2/sigma1 {sv:.1e} (< 1e-6); "
                  f"omega on ker A_xi {om:.1e} (< 1e-5); min |beta+gamma| {bg:.3f} (> 0.01)")


# ---------------------------------------------------------------- 8

def test_c08_type_c_consistency():
    inst = G.get("tilted_flat_c")
    grid = inst.grid()
    tags = {classify_point(inst.f, z).tag.value for z in grid.points()}
    rep = type_c_consistency(inst.f, grid)
    norm = rep.maxima.get("intrinsic_norm", 0.0)
    ok = tags == {"C"} and rep.points_checked == grid.size and norm < 1e-8 and rep.passed
    record(8, ok, f"tilted T^2 x R in R^5: tags {sorted(tags)} on {grid.size} points; "
                  f"|R - c wedge| max {norm:.1e} (< 1e-8)")


# ---------------------------------------------------------------- 9

def test_c09_spherical_hull():
    circ = G.planar_circle(0.5)
    res = spherical_hull(circ, Grid(((-1.0, 1.0),), (9,)))
    ok = res.m == 1 and res.ctilde is not None and abs(res.ctilde - 4.0) < 1e-6
    record(9, ok, f"circle r=0.5 in R^3: mode {res.mode}, m={res.m}, ctilde={res.ctilde!r} (expect 1, 4)")


# ---------------------------------------------------------------- 10

def test_c10_distribution_negative_control():
    def bad_metric(z):
        y, x = z[0], z[1]
        r = 2.0 + J.sin(y) + 0.1 * x
        obj = any(isinstance(v, J.Jet) for v in (y, x))
        return np.array([[1.0 + 0.0 * y, 0.0 * y], [0.0 * y, r * r]], dtype=object if obj else float)

    bad = BlockDomain(1, 1, ((-1.0, 1.0), (-1.0, 1.0)), bad_metric)
    neg = check_distributions(bad, bad.grid(7)).V_spherical_residual
    genuine = [hyperbolic_domain(),
               WarpedDomain(FactorChart.euclidean(1, ((-1.0, 1.0),)), FactorChart.euclidean(1, ((-1.0, 1.0),)),
                            lambda y: 2.0 + J.sin(y[0]))]
    genuine += [G.get(n).f.dom for n in G.WARPED_NAMES]
    pos = 0.0
    for dom in genuine:
        r = check_distributions(dom, dom.grid(5))
        pos = max(pos, r.V_spherical_residual, r.H_totally_geodesic_residual, r.eta_vertical_residual)
    ok = neg > 1e-3 and pos < 1e-8
    record(10, ok, f"dy^2+(rho+0.1x)^2dx^2: V-spherical residual {neg:.3e} (> 1e-3); "
                   f"{len(genuine)} genuine warped metrics max {pos:.1e} (< 1e-8)")


# ---------------------------------------------------------------- 11

def _invariants(pt):
    b = pt.bdata
    if b is None:
        return np.zeros(5)
    return np.array([abs(b.beta), abs(b.lam), abs(b.gamma), b.det, b.delta_t0])


def test_c11_classifier_invariance():
    from warpform.warped import hv_split
    rng = np.random.default_rng(11)
    cases = [("clifford_tilted_ext", [0.1, 0.2, -0.3, 0.4]), ("bent_rotational", [0.4, 0.7]),
             ("tilted_flat_c", [0.1, -0.2, 0.3]), ("clifford_tilted", [0.2, -0.1]),
             ("product_s1_s3", [0.1, 0.2, 0.3])]
    changed, spread = 0, 0.0
    for name, z in cases:
        f = G.get(name).f
        z = np.array(z)
        s = sample(f, z)
        split = hv_split(f.dom, z)
        base = classify_sample(s, split)
        inv0 = _invariants(base)
        p, n, k = f.dom.p, f.dom.n, s.k
        for _ in range(100):
            QH = ortho_group.rvs(p, random_state=rng) if p > 1 else np.array([[rng.choice([-1.0, 1.0])]])
            QV = ortho_group.rvs(n, random_state=rng) if n > 1 else np.array([[rng.choice([-1.0, 1.0])]])
            QN = ortho_group.rvs(k, random_state=rng) if k > 1 else np.array([[rng.choice([-1.0, 1.0])]])
            s2, split2 = rebase(s, split, QH, QV, QN)
            pt = classify_sample(s2, split2)
            if pt.tag != base.tag:
                changed += 1
            spread = max(spread, float(np.max(np.abs(_invariants(pt) - inv0))))
    ok = changed == 0 and spread < 1e-9
    record(11, ok, f"100 random re-bases x {len(cases)} points: tag changes {changed}, "
                   f"invariant scalar spread {spread:.1e} (< 1e-9)")


if __name__ == "__main__":
    import sys
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
