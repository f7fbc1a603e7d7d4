"""Pointwise type classification (A / B1 / B2 / C) and the type-B relations."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import StencilError, TypeInconsistencyError
from .immersion import (Immersion, ImmersionSample, SecondFF, _grid_points, intrinsic_tensor,
                        relative_nullity, sample, second_ff, _domain_frame)
from .linalg import ABS_ZERO, canonical_sign, gram_schmidt, numerical_rank
from .warped import FD_STEP, HVSplit, WarpedDomain, eta_data, hv_split

B_TOL = 1e-6
B_BAND = 10.0          # ratios in [tol, B_BAND * tol) are indeterminate


class Tag(str, Enum):
    A = "A"
    B1 = "B1"
    B2 = "B2"
    C = "C"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class BTypeData:
    X: np.ndarray            # unit horizontal (domain coordinates)
    e: np.ndarray            # unit vertical (domain coordinates)
    xi: np.ndarray           # unit normal (ambient)
    xitilde: np.ndarray | None
    beta: float
    lam: float
    gamma: float
    beta_t0: float
    gamma_t0: float
    delta_t0: float
    btilde: float | None
    reconstruction_residual: float = 0.0

    @property
    def det(self) -> float:
        """beta * gamma - lambda^2."""
        return self.beta * self.gamma - self.lam**2

    @property
    def det_ratio(self) -> float:
        scale = max(self.beta**2, self.gamma**2, self.lam**2)
        return abs(self.det) / scale

    def as_dict(self) -> dict:
        return {
            "beta": self.beta, "lambda": self.lam, "gamma": self.gamma,
            "beta_t0": self.beta_t0, "gamma_t0": self.gamma_t0, "delta_t0": self.delta_t0,
            "btilde": self.btilde, "det": self.det,
            "X": self.X.tolist(), "e": self.e.tolist(), "xi": self.xi.tolist(),
            "xitilde": None if self.xitilde is None else self.xitilde.tolist(),
        }


@dataclass(frozen=True)
class PointType:
    tag: Tag
    dim_alpha_hv: int
    margin: float
    bdata: BTypeData | None = None
    singular_values: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class AlphaHV:
    span_dim: int
    basis: np.ndarray          # rows: normal-frame components spanning alpha(H, V)
    singular_values: np.ndarray
    marginal: bool
    margin: float
    scale: float


# ---------------------------------------------------------------- helpers

def _split_alpha(alpha: SecondFF, split: HVSplit):
    """alpha in the split's orthonormal basis: (k, D, D) with H first."""
    F = split.frame
    return np.einsum("ai,qij,bj->qab", F, alpha.alpha, F)


def _alpha_scale(alpha: SecondFF, split: HVSplit) -> float:
    a = _split_alpha(alpha, split)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a.reshape(a.shape[0], -1), compute_uv=False)[0])


def rebase(s: ImmersionSample, split: HVSplit, QH=None, QV=None, QN=None):
    """Same point with the H, V and normal bases replaced by rotated ones."""
    H, V = split.H_basis, split.V_basis
    if QH is not None:
        H = QH @ H
    if QV is not None:
        V = QV @ V
    s2 = s if QN is None else dataclasses.replace(s, normal_frame=QN @ s.normal_frame)
    return s2, HVSplit(H, V)


# ---------------------------------------------------------------- operations

def alpha_hv(s: ImmersionSample, alpha: SecondFF, split: HVSplit) -> AlphaHV:
    """Numerical span of {alpha(Y_i, V_j)}."""
    p = split.H_basis.shape[0]
    a = _split_alpha(alpha, split)
    k = a.shape[0]
    mixed = a[:, :p, p:].reshape(k, -1)          # columns are alpha(Y_i, V_j)
    scale = _alpha_scale(alpha, split)
    if mixed.size == 0:
        return AlphaHV(0, np.zeros((0, k)), np.zeros(0), False, float("inf"), scale)
    u, sv, _ = np.linalg.svd(mixed, full_matrices=False)
    dec = numerical_rank(sv, scale)
    return AlphaHV(dec.rank, u[:, : dec.rank].T.copy(), sv, dec.marginal, dec.margin, dec.scale)


def extract_b_data(s: ImmersionSample, alpha: SecondFF, split: HVSplit, check: bool = True) -> BTypeData:
    """Distinguished vectors and scalars of a type-B point.

    xi spans alpha(H, V); with M_ij = <alpha(Y_i, V_j), xi> = lambda u_i v_j,
    X = sum u_i Y_i and e = sum v_j V_j.  Signs are fixed by making the first
    significant component of X, e, xi, xitilde (as domain / ambient vectors)
    positive.
    """
    p = split.H_basis.shape[0]
    n = split.V_basis.shape[0]
    a = _split_alpha(alpha, split)
    k = a.shape[0]
    Nf = s.normal_frame
    mixed = a[:, :p, p:].reshape(k, -1)
    u, sv, _ = np.linalg.svd(mixed, full_matrices=False)
    scale = max(_alpha_scale(alpha, split), ABS_ZERO)
    if sv[0] < 1e-7 * scale:
        raise TypeInconsistencyError("alpha(H, V) vanishes: not a type-B point")
    xi_c = u[:, 0]
    xi_amb = canonical_sign(xi_c @ Nf)
    xi_c = Nf @ s.space_gram @ xi_amb
    Mx = np.einsum("q,qij->ij", xi_c, a[:, :p, p:])
    uu, ss, vv = np.linalg.svd(Mx)
    xs, es = uu[:, 0], vv[0]
    X = canonical_sign(xs @ split.H_basis)
    e = canonical_sign(es @ split.V_basis)
    # back to split coordinates after the sign fix
    g = np.asarray(s.metric)
    xs = split.H_basis @ g @ X
    es = split.V_basis @ g @ e
    ax = np.concatenate([xs, np.zeros(n)])
    ae = np.concatenate([np.zeros(p), es])

    def form(q, A_, B_):
        return float(np.einsum("ij,i,j->", q, A_, B_))

    aq = np.einsum("q,qij->ij", xi_c, a)
    beta, lam, gamma = form(aq, ax, ax), form(aq, ax, ae), form(aq, ae, ae)
    if abs(lam) < 1e-7 * scale:
        raise TypeInconsistencyError(f"lambda = {lam:.3e} is below the rank threshold")

    xit_amb = None
    bt0 = gt0 = 0.0
    if k >= 2:
        proj = np.eye(k) - np.outer(xi_c, xi_c)
        cands = [proj @ np.einsum("qij,i,j->q", a, ax, ax), proj @ np.einsum("qij,i,j->q", a, ae, ae)]
        cands += list(proj)
        best = max(cands, key=lambda v: float(np.linalg.norm(v)))
        if k == 2:
            best = proj @ np.array([-xi_c[1], xi_c[0]])
        t = best / np.linalg.norm(best)
        xit_amb = canonical_sign(t @ Nf)
        t = Nf @ s.space_gram @ xit_amb
        at = np.einsum("q,qij->ij", t, a)
        bt0, gt0 = form(at, ax, ax), form(at, ae, ae)
    delta = bt0 * gt0 + beta * gamma - lam**2
    det_ratio = abs(beta * gamma - lam**2) / max(beta**2, gamma**2, lam**2)
    btilde = None
    if det_ratio >= B_BAND * B_TOL and abs(bt0) > 1e-7 * scale:
        btilde = delta / bt0

    # reconstruction: A_xi Y = <Y,X>(beta X + lambda e), A_xi V = <V,e>(lambda X + gamma e)
    D = p + n
    A_pred = beta * np.outer(ax, ax) + lam * (np.outer(ax, ae) + np.outer(ae, ax)) + gamma * np.outer(ae, ae)
    res = float(np.max(np.abs(aq - A_pred)))
    if k >= 2:
        other = np.eye(k) - np.outer(xi_c, xi_c)
        res = max(res, float(np.max(np.abs(np.einsum("rq,qij->rij", other, a[:, :p, p:])))))
    if check and res > 1e-5 * scale:
        raise TypeInconsistencyError(f"type-B reconstruction fails (residual {res:.3e})")
    return BTypeData(X, e, xi_amb, xit_amb, beta, lam, gamma, bt0, gt0, delta, btilde, res)


def classify_sample(s: ImmersionSample, split: HVSplit, tol: float = B_TOL) -> PointType:
    a = second_ff(s)
    hv = alpha_hv(s, a, split)
    if hv.marginal:
        return PointType(Tag.INDETERMINATE, hv.span_dim, hv.margin, None, hv.singular_values)
    if hv.span_dim == 0:
        return PointType(Tag.A, 0, hv.margin, None, hv.singular_values)
    if hv.span_dim >= 2:
        return PointType(Tag.C, hv.span_dim, hv.margin, None, hv.singular_values)
    bd = extract_b_data(s, a, split)
    ratio = bd.det_ratio
    if ratio < tol:
        tag = Tag.B1
    elif ratio >= B_BAND * tol:
        tag = Tag.B2
    else:
        tag = Tag.INDETERMINATE
    with np.errstate(divide="ignore"):
        lr = np.log10(max(ratio, 1e-300))
    margin = min(hv.margin, abs(lr - np.log10(tol)), abs(lr - np.log10(B_BAND * tol)))
    return PointType(tag, 1, float(margin), bd, hv.singular_values)


def classify_point(f: Immersion, z, tol: float = B_TOL, method: str = "jet") -> PointType:
    """Type of ``f`` at ``z`` from dim alpha(H, V) and, for type B, beta*gamma - lambda^2."""
    z = np.asarray(z, dtype=float)
    s = sample(f, z, method)
    return classify_sample(s, hv_split(f.dom, z), tol)


def classify_grid(f: Immersion, grid, tol: float = B_TOL) -> list:
    return [classify_point(f, z, tol) for z in _grid_points(grid)]


# ---------------------------------------------------------------- pointwise relations

def _max(vals) -> float:
    vals = list(vals)
    return float(max(vals)) if vals else 0.0


def verify_pointwise_relations(s: ImmersionSample, alpha: SecondFF, bdata: BTypeData | None,
                               eta_val=None, is_product: bool = False, split: HVSplit | None = None,
                               c: float | None = None) -> dict:
    """Residuals of the curvature-like and type-B relations at one point.

    ``eta_val`` is the :class:`warpform.warped.EtaData` at the point (needed
    for the C(X, V, W, Y) identity; skipped when absent).
    """
    if bdata is None:
        return {}
    if split is None:
        raise ValueError("an HVSplit is required")
    if c is None:
        c = s.space.c
    p = split.H_basis.shape[0]
    n = split.V_basis.shape[0]
    D = p + n
    a = _split_alpha(alpha, split)
    k = a.shape[0]
    g = s.metric
    hs = range(p)
    vs = range(p, D)

    def C(i, j, kk, l):
        return float(a[:, i, l] @ a[:, j, kk] - a[:, i, kk] @ a[:, j, l])

    out = {}
    out["C_XYVZ"] = _max(abs(C(i, j, v, l)) for i in hs for j in hs for l in hs for v in vs)
    out["C_XYVW"] = _max(abs(C(i, j, v, w)) for i in hs for j in hs for v in vs for w in vs)
    out["C_XUVW"] = _max(abs(C(i, u_, v, w)) for i in hs for u_ in vs for v in vs for w in vs)
    if eta_val is not None:
        H = split.H_basis[:, :p]          # L-components of the horizontal basis
        gL, eta_, cov = eta_val.gL, eta_val.eta, eta_val.cov

        def hop(Xc):
            return cov @ Xc - float(Xc @ gL @ eta_) * eta_ - c * Xc

        res = 0.0
        for i in hs:
            for l in hs:
                rhs_h = float(hop(H[i]) @ gL @ H[l])
                for v in vs:
                    for w in vs:
                        vw = 1.0 if v == w else 0.0
                        res = max(res, abs(C(i, v, w, l) - vw * rhs_h))
        out["C_XVWY"] = res

    xi_c = s.normal_frame @ s.space_gram @ bdata.xi
    xs = split.H_basis @ g @ bdata.X
    es = split.V_basis @ g @ bdata.e
    lam, beta, gamma = bdata.lam, bdata.beta, bdata.gamma
    # alpha(Y,V) = lambda <Y,X><V,e> xi
    pred_mixed = lam * np.einsum("i,j,q->qij", xs, es, xi_c)
    out["alpha_YV"] = float(np.max(np.abs(a[:, :p, p:] - pred_mixed)))
    aq = np.einsum("q,qij->ij", xi_c, a)
    out["beta_relation"] = float(np.max(np.abs(aq[:p, :p] - beta * np.outer(xs, xs))))
    out["gamma_relation"] = float(np.max(np.abs(aq[p:, p:] - gamma * np.outer(es, es))))
    Pt = np.eye(k) - np.outer(xi_c, xi_c)
    Pv = np.eye(n) - np.outer(es, es)
    pa = np.einsum("rq,qij->rij", Pt, a)
    pee = np.einsum("qij,i,j->q", pa[:, p:, p:], es, es)
    det = bdata.det
    lhs = np.einsum("qab,qcd->abcd", pa[:, :p, :p], pa[:, p:, p:]) \
        - np.einsum("qab,cd,q->abcd", pa[:, :p, :p], np.eye(n), pee)
    rhs = det * np.einsum("a,b,cd->abcd", xs, xs, Pv)
    out["P_tilde_identity"] = float(np.max(np.abs(lhs - rhs)))
    out["delta_definition"] = abs(bdata.delta_t0 - (bdata.beta_t0 * bdata.gamma_t0 + det))

    if bdata.xitilde is not None and k == 2:
        t = s.normal_frame @ s.space_gram @ bdata.xitilde
        at = np.einsum("q,qij->ij", t, a)
        bt, gt = at[:p, :p], at[p:, p:]
        is_b2 = bdata.det_ratio >= B_BAND * B_TOL
        if is_b2:
            out["B2_beta_tilde"] = float(np.max(np.abs(bt - bdata.beta_t0 * np.outer(xs, xs))))
            out["B2_gamma_tilde"] = float(np.max(np.abs(
                bdata.beta_t0 * gt - (bdata.delta_t0 * np.eye(n) - det * np.outer(es, es)))))
        elif bdata.det_ratio < B_TOL:
            r1 = float(np.max(np.abs(gt - bdata.gamma_t0 * np.eye(n))))
            r2 = float(np.max(np.abs(bt)))
            out["B1_alternative"] = min(r1, r2)
    if is_product:
        out["delta_plus_c"] = abs(bdata.delta_t0 + c)
        lhs2 = np.einsum("qab,qcd->abcd", pa[:, :p, :p], pa[:, p:, p:]) \
            + det * np.einsum("a,b,c,d->abcd", xs, xs, es, es) \
            + c * np.einsum("ab,cd->abcd", np.eye(p), np.eye(n))
        out["product_identity"] = float(np.max(np.abs(lhs2)))
    return out


# ---------------------------------------------------------------- structure checks

@dataclass
class StructureReport:
    name: str
    points_checked: int = 0
    points_total: int = 0
    maxima: dict = field(default_factory=dict)
    minima: dict = field(default_factory=dict)
    passed: bool = True
    failures: list = field(default_factory=list)

    def bump_max(self, key, val):
        self.maxima[key] = max(self.maxima.get(key, 0.0), float(val))

    def bump_min(self, key, val):
        self.minima[key] = min(self.minima.get(key, float("inf")), float(val))

    def as_dict(self) -> dict:
        return {"name": self.name, "points_checked": self.points_checked, "points_total": self.points_total,
                "maxima": self.maxima, "minima": self.minima, "passed": self.passed,
                "failures": self.failures[:20]}


def _aligned(v, ref):
    d = float(np.dot(v, ref))
    if abs(d) < 0.5 * float(np.linalg.norm(v) * np.linalg.norm(ref)):
        raise StencilError("distinguished vector jumps across the stencil")
    return v if d > 0 else -v


def _bdata_at(f: Immersion, z) -> tuple:
    s = sample(f, z)
    split = hv_split(f.dom, z)
    return s, split, extract_b_data(s, second_ff(s), split)


B1_SV_RATIO = 1e-6
B1_OMEGA = 1e-5
B1_BETA_GAMMA = 0.01


def b1_structure_check(f: Immersion, grid, h: float = FD_STEP) -> StructureReport:
    """Rank-one A_xi, its closed form along E0 and the vanishing of omega on ker A_xi."""
    rep = StructureReport("b1")
    pts = _grid_points(grid)
    rep.points_total = len(pts)
    for z in pts:
        pt = classify_point(f, z)
        if pt.tag != Tag.B1:
            continue
        rep.points_checked += 1
        s, split, bd = _bdata_at(f, z)
        a = second_ff(s)
        F = _domain_frame(f.dom, z)
        xi_c = s.normal_frame @ s.space_gram @ bd.xi
        A = np.einsum("q,ai,qij,bj->ab", xi_c, F, a.alpha, F)
        sv = np.linalg.svd(A, compute_uv=False)
        ratio = sv[1] / sv[0] if len(sv) > 1 else 0.0
        rep.bump_max("sv_ratio", ratio)
        g = np.asarray(f.dom.metric(z), dtype=float)
        E0 = bd.beta * bd.X + bd.lam * bd.e
        E0 = E0 / np.sqrt(float(E0 @ g @ E0))
        e0f = F @ g @ E0
        rep.bump_max("shape_E0", np.max(np.abs(A - (bd.beta + bd.gamma) * np.outer(e0f, e0f))))
        rep.bump_min("abs_beta_plus_gamma", abs(bd.beta + bd.gamma))
        if bd.xitilde is not None:
            # omega(d_m) = <d_m xi, xitilde> with xi sign-aligned across the stencil
            D = f.dim
            om = np.zeros(D)
            for m in range(D):
                dz = np.zeros(D)
                dz[m] = h
                xp = _aligned(_bdata_at(f, z + dz)[2].xi, bd.xi)
                xm = _aligned(_bdata_at(f, z - dz)[2].xi, bd.xi)
                om[m] = float(((xp - xm) / (2 * h)) @ s.space_gram @ bd.xitilde)
            # ker A_xi in frame coordinates -> domain vectors
            _, svv, vt = np.linalg.svd(A)
            ker = vt[1:] @ F
            rep.bump_max("omega_on_kernel", np.max(np.abs(ker @ om), initial=0.0))
        ok = (ratio < B1_SV_RATIO and abs(bd.beta + bd.gamma) > B1_BETA_GAMMA
              and rep.maxima.get("omega_on_kernel", 0.0) < B1_OMEGA)
        if not ok:
            rep.passed = False
            rep.failures.append(z.tolist())
    return rep


B2_TOL = 1e-6


def b2_structure_check(f: Immersion, grid, h: float = FD_STEP, tol: float = B2_TOL) -> StructureReport:
    """Shape operator of xitilde, lift conditions on X and e, and the nullity dichotomy."""
    rep = StructureReport("b2")
    pts = _grid_points(grid)
    rep.points_total = len(pts)
    dom = f.dom
    p = dom.p
    D = f.dim
    for z in pts:
        pt = classify_point(f, z)
        if pt.tag != Tag.B2:
            continue
        rep.points_checked += 1
        s, split, bd = _bdata_at(f, z)
        a = second_ff(s)
        g = s.metric
        bad = []
        if bd.xitilde is None:
            rep.passed = False
            rep.failures.append({"z": z.tolist(), "reason": "codimension 1"})
            continue
        t = s.normal_frame @ s.space_gram @ bd.xitilde
        At = np.linalg.solve(g, np.einsum("q,qij->ij", t, a.alpha))   # mixed tensor A^i_j
        bt = bd.btilde if bd.btilde is not None else 0.0
        eye = np.eye(D)
        r1 = r2 = 0.0
        for j in range(D):
            E = eye[j]
            Y = E.copy()
            Y[p:] = 0
            V = E - Y
            if np.any(Y):
                r1 = max(r1, float(np.max(np.abs(At @ Y - bd.beta_t0 * float(Y @ g @ bd.X) * bd.X))))
            if np.any(V):
                pred = bt * V + (bd.gamma_t0 - bt) * float(V @ g @ bd.e) * bd.e
                r2 = max(r2, float(np.max(np.abs(At @ V - pred))))
        rep.bump_max("A_xitilde_H", r1)
        rep.bump_max("A_xitilde_V", r2)
        # derivatives of the X and e fields
        gam = s.christoffel()
        eta_full = np.zeros(D)
        if isinstance(dom, WarpedDomain):
            eta_full[:p] = eta_data(dom, z[:p]).eta
        rX = rE = 0.0
        for m in range(D):
            dz = np.zeros(D)
            dz[m] = h
            bp = _bdata_at(f, z + dz)[2]
            bm = _bdata_at(f, z - dz)[2]
            dX = (_aligned(bp.X, bd.X) - _aligned(bm.X, bd.X)) / (2 * h)
            de = (_aligned(bp.e, bd.e) - _aligned(bm.e, bd.e)) / (2 * h)
            covX = dX + gam[:, m, :] @ bd.X
            cove = de + gam[:, m, :] @ bd.e
            if m >= p:
                rX = max(rX, float(np.max(np.abs(covX + float(bd.X @ g @ eta_full) * eye[m]))))
            else:
                rE = max(rE, float(np.max(np.abs(cove))))
        rep.bump_max("nabla_V_X", rX)
        rep.bump_max("nabla_Y_e", rE)
        # nullity dichotomy
        nul = relative_nullity(s, a)
        Hb = eye[:p]
        Vb = eye[p:]
        xperp = gram_schmidt(np.vstack([bd.X, Hb]), g, canonical=False)[1:]
        expect = xperp
        if abs(bd.delta_t0) < 1e-7:
            eperp = gram_schmidt(np.vstack([bd.e, Vb]), g, canonical=False)[1:]
            expect = np.vstack([xperp, eperp]) if len(eperp) else xperp
        rN = _subspace_distance(nul.basis, expect, g)
        rep.bump_max("nullity_mismatch", rN)
        if max(r1, r2, rX, rE, rN) > tol:
            rep.passed = False
            rep.failures.append(z.tolist())
    return rep


def _subspace_distance(A, B, g) -> float:
    """Operator-norm distance between g-orthogonal projectors onto row spans."""
    D = g.shape[0]

    def proj(S):
        S = np.atleast_2d(S)
        if S.size == 0:
            return np.zeros((D, D))
        G = S @ g @ S.T
        return S.T @ np.linalg.solve(G, S @ g)

    if (np.size(A) == 0) != (np.size(B) == 0):
        return 1.0
    return float(np.linalg.norm(proj(A) - proj(B), 2))


TYPE_C_TOL = 1e-8


def type_c_consistency(f: Immersion, grid, tol: float = TYPE_C_TOL) -> StructureReport:
    """At C points (n >= 3, or products with p + n >= 3) R - c wedge must vanish."""
    rep = StructureReport("typec")
    pts = _grid_points(grid)
    rep.points_total = len(pts)
    dom = f.dom
    p, n = dom.p, dom.n
    product = False
    if isinstance(dom, WarpedDomain):
        product = all(np.linalg.norm(eta_data(dom, z[:p]).eta) < 1e-12 for z in pts)
    applies = n >= 3 or (product and p + n >= 3)
    for z in pts:
        pt = classify_point(f, z)
        if pt.tag != Tag.C or not applies:
            continue
        rep.points_checked += 1
        T = intrinsic_tensor(f, z, f.space.c)
        F = _domain_frame(dom, z)
        Tf = np.einsum("ai,bj,ck,dl,ijkl->abcd", F, F, F, F, T)
        r = float(np.sqrt(np.sum(Tf**2)))
        rep.bump_max("intrinsic_norm", r)
        if r > tol:
            rep.passed = False
            rep.failures.append(z.tolist())
    return rep
