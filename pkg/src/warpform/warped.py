"""Warped product domains L x_rho M and their intrinsic geometry.

A domain point is the concatenation ``z = (y, x)`` of an L-chart point ``y``
(p coordinates) and an M-chart point ``x`` (n coordinates).  Vectors are
given in the same coordinates; the first p slots are horizontal and the last
n vertical.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from . import jets as J
from .errors import DimensionError, DomainError, NotALiftError
from .linalg import gram_schmidt

FD_STEP = 1e-4


# ---------------------------------------------------------------- charts and grids

@dataclass(frozen=True)
class FactorChart:
    dim: int
    bounds: tuple
    metric_at: Callable = field(compare=False)

    def __post_init__(self):
        b = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if len(b) != self.dim:
            raise DimensionError("one (lo, hi) pair per coordinate is required")
        object.__setattr__(self, "bounds", b)

    @classmethod
    def euclidean(cls, dim: int, bounds) -> "FactorChart":
        eye = np.eye(dim)
        return cls(dim, bounds, lambda u: eye)

    @classmethod
    def from_sub(cls, sub, bounds) -> "FactorChart":
        """Chart of a spherical submanifold with its intrinsic metric."""
        return cls(sub.m, bounds, sub.metric)

    def metric(self, u):
        g = np.asarray(self.metric_at(u))
        if g.shape != (self.dim, self.dim):
            raise DimensionError(f"metric_at returned shape {g.shape}")
        return g

    def jets(self, u, method: str = "jet"):
        return _metric_arrays(self.metric, u, self.dim, method)


def _metric_arrays(metric_fn, z, dim, method):
    z = np.asarray(z, dtype=float)
    if method == "jet":
        return J.jet_arrays(metric_fn(J.seed(z)), dim)
    if method == "fd":
        return J.fd_arrays(lambda q: np.asarray(metric_fn(q), dtype=float), z, FD_STEP)
    raise ValueError(f"unknown differentiation method {method!r}")


@dataclass(frozen=True)
class Grid:
    """Tensor grid; points are ordered lexicographically (last axis fastest)."""

    bounds: tuple
    counts: tuple

    def __post_init__(self):
        if len(self.bounds) != len(self.counts):
            raise DimensionError("bounds and counts differ in length")
        object.__setattr__(self, "bounds", tuple((float(a), float(b)) for a, b in self.bounds))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self):
        return [np.linspace(lo, hi, n) if n > 1 else np.array([(lo + hi) / 2])
                for (lo, hi), n in zip(self.bounds, self.counts)]

    def points(self) -> np.ndarray:
        return np.array(list(itertools.product(*self.axes())), dtype=float).reshape(self.size, len(self.counts))

    def spacing(self) -> np.ndarray:
        return np.array([(hi - lo) / max(n - 1, 1) for (lo, hi), n in zip(self.bounds, self.counts)])


# ---------------------------------------------------------------- domains

class BlockDomain:
    """Product chart with a horizontal/vertical coordinate split and any metric.

    ``metric_fn(z)`` must be jet friendly.  Used directly for non-warped
    controls; :class:`WarpedDomain` specialises it.
    """

    def __init__(self, p: int, n: int, bounds, metric_fn: Callable):
        self.p = int(p)
        self.n = int(n)
        self.bounds = tuple((float(a), float(b)) for a, b in bounds)
        if len(self.bounds) != self.p + self.n:
            raise DimensionError("bounds must cover p + n coordinates")
        self._metric_fn = metric_fn

    @property
    def dim(self) -> int:
        return self.p + self.n

    def check(self, z, slack: float = 1e-9) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise DimensionError(f"domain point must have {self.dim} coordinates")
        for zi, (lo, hi) in zip(z, self.bounds):
            w = slack * max(1.0, hi - lo)
            if not (lo - w <= zi <= hi + w):
                raise DomainError(f"point {z} outside chart bounds {self.bounds}")
        return z

    def metric(self, z):
        return np.asarray(self._metric_fn(z))

    def metric_arrays(self, z, method: str = "jet"):
        return _metric_arrays(self.metric, z, self.dim, method)

    def christoffel(self, z, method: str = "jet"):
        g, dg, d2g = self.metric_arrays(z, method)
        gam, dgam = K.christoffel(g[None], dg[None], d2g[None])
        return g, gam[0], dgam[0]

    def grid(self, counts) -> Grid:
        if np.isscalar(counts):
            counts = (int(counts),) * self.dim
        return Grid(self.bounds, counts)


class WarpedDomain(BlockDomain):
    def __init__(self, L: FactorChart, M: FactorChart, rho: Callable):
        self.L = L
        self.M = M
        self.rho = rho
        super().__init__(L.dim, M.dim, L.bounds + M.bounds, self._warped_metric)

    def _warped_metric(self, z):
        p, n = self.p, self.n
        y, x = z[:p], z[p:]
        gL = self.L.metric(y)
        gM = self.M.metric(x)
        r = self.rho(y)
        obj = any(isinstance(v, J.Jet) for v in np.ravel(np.asarray(z, dtype=object)))
        out = np.zeros((p + n, p + n), dtype=object if obj else float)
        out[:p, :p] = gL
        r2 = r * r
        for i in range(n):
            for j in range(n):
                out[p + i, p + j] = r2 * gM[i, j]
        return out

    def rho_value(self, y) -> float:
        r = float(self.rho(np.asarray(y, dtype=float)))
        if r <= 0:
            raise DomainError(f"warping function not positive: rho = {r}")
        return r

    def rho_jets(self, y):
        y = np.asarray(y, dtype=float)
        v, g, h = J.jet_arrays(np.array([self.rho(J.seed(y))], dtype=object), self.p)
        if v[0] <= 0:
            raise DomainError(f"warping function not positive: rho = {v[0]}")
        return v[0], g[0], h[0]


# ---------------------------------------------------------------- pointwise operations

def warped_metric(dom: WarpedDomain, z, u, v) -> float:
    z = dom.check(z)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    p = dom.p
    gL = np.asarray(dom.L.metric(z[:p]), dtype=float)
    gM = np.asarray(dom.M.metric(z[p:]), dtype=float)
    r = dom.rho_value(z[:p])
    return float(u[:p] @ gL @ v[:p] + r * r * (u[p:] @ gM @ v[p:]))


@dataclass(frozen=True)
class EtaData:
    eta: np.ndarray          # horizontal components (p)
    cov: np.ndarray          # cov[a, c] = (nabla_{d_c} eta)^a on L
    gL: np.ndarray
    rho: float


def eta_data(dom: WarpedDomain, y) -> EtaData:
    y = np.asarray(y, dtype=float)
    gL, dgL, d2gL = dom.L.jets(y)
    r, dr, hr = dom.rho_jets(y)
    dlog = dr / r
    hlog = hr / r - np.outer(dr, dr) / r**2
    ginv = np.linalg.inv(gL)
    eta = -ginv @ dlog
    # d_c eta = -ginv (d_c gL eta + hess log rho [:, c])
    d_eta = -ginv @ (np.einsum("abc,b->ac", dgL, eta) + hlog)
    gam, _ = K.christoffel(gL[None], dgL[None], d2gL[None])
    cov = d_eta + np.einsum("acb,b->ac", gam[0], eta)
    return EtaData(eta, cov, gL, r)


def eta(dom: WarpedDomain, z) -> np.ndarray:
    """-grad log rho, lifted horizontally (returned with all p + n slots)."""
    z = dom.check(z)
    out = np.zeros(dom.dim)
    out[: dom.p] = eta_data(dom, z[: dom.p]).eta
    return out


@dataclass(frozen=True)
class HVSplit:
    H_basis: np.ndarray   # rows: p orthonormal horizontal vectors
    V_basis: np.ndarray   # rows: n orthonormal vertical vectors

    @property
    def frame(self) -> np.ndarray:
        return np.vstack([self.H_basis, self.V_basis])


def hv_split(dom: BlockDomain, z) -> HVSplit:
    z = np.asarray(z, dtype=float)
    g = np.asarray(dom.metric(z), dtype=float)
    eye = np.eye(dom.dim)
    H = gram_schmidt(eye[: dom.p], g, canonical=False)
    V = gram_schmidt(eye[dom.p:], g, canonical=False)
    return HVSplit(H, V)


def _field_jets(field_, z, dim):
    """Value and first derivatives (dim x dim, [component, direction]) of a vector field."""
    if callable(field_):
        v, d1, _ = J.jet_arrays(np.asarray(field_(J.seed(z)), dtype=object), dim)
        return v, d1
    v = np.asarray(field_, dtype=float)
    return v, np.zeros((dim, dim))


def _covariant(gam, A, B, dB):
    # (nabla_A B)^k = A^i (d_i B^k + Gamma^k_ij B^j)
    return dB @ A + np.einsum("kij,i,j->k", gam, A, B)


def _require_lift(name, v, d1, p, horizontal):
    tol = 1e-10 * max(1.0, np.max(np.abs(v)))
    if horizontal:
        bad = np.max(np.abs(v[p:]), initial=0.0) > tol or np.max(np.abs(d1[:p, p:]), initial=0.0) > tol
    else:
        bad = np.max(np.abs(v[:p]), initial=0.0) > tol or np.max(np.abs(d1[p:, :p]), initial=0.0) > tol
    if bad:
        raise NotALiftError(f"{name} is not the lift of a {'horizontal' if horizontal else 'vertical'} field")


@dataclass(frozen=True)
class ConnectionTerms:
    XY_is_L_lift_residual: float
    mixed: np.ndarray
    mixed_residual: float
    VW_vertical: np.ndarray
    VW_vertical_residual: float
    VW_horizontal: np.ndarray
    VW_horizontal_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.XY_is_L_lift_residual, self.mixed_residual,
                   self.VW_vertical_residual, self.VW_horizontal_residual)


def connection_terms(dom: WarpedDomain, z, X, Y, V, W) -> ConnectionTerms:
    """Compare the full Levi-Civita connection with the warped product relations.

    Fields may be constant coordinate vectors or jet-friendly callables of the
    domain point.  The full connection comes from the Christoffel symbols of
    the whole warped metric; the formula side uses only L, M and eta.
    """
    z = dom.check(z)
    p, D = dom.p, dom.dim
    vals = {}
    for name, f, hor in (("X", X, True), ("Y", Y, True), ("V", V, False), ("W", W, False)):
        v, d1 = _field_jets(f, z, D)
        _require_lift(name, v, d1, p, hor)
        vals[name] = (v, d1)
    _, gam, _ = dom.christoffel(z)
    g = np.asarray(dom.metric(z), dtype=float)
    ed = eta_data(dom, z[:p])
    eta_full = np.concatenate([ed.eta, np.zeros(dom.n)])

    (Xv, dX), (Yv, dY), (Vv, dV), (Wv, dW) = (vals[k] for k in "XYVW")

    nXY = _covariant(gam, Xv, Yv, dY)
    gL, dgL, d2gL = dom.L.jets(z[:p])
    gamL, _ = K.christoffel(gL[None], dgL[None], d2gL[None])
    lXY = dY[:p, :p] @ Xv[:p] + np.einsum("kij,i,j->k", gamL[0], Xv[:p], Yv[:p])
    res_xy = float(np.max(np.abs(nXY - np.concatenate([lXY, np.zeros(dom.n)]))))

    mixed = _covariant(gam, Xv, Vv, dV)
    expect_mixed = -float(Xv @ g @ eta_full) * Vv
    # torsion-free: nabla_V X must agree as well for lifts
    mixed_alt = _covariant(gam, Vv, Xv, dX)
    res_mixed = float(max(np.max(np.abs(mixed - expect_mixed)), np.max(np.abs(mixed_alt - expect_mixed))))

    nVW = _covariant(gam, Vv, Wv, dW)
    gM, dgM, d2gM = dom.M.jets(z[p:])
    gamM, _ = K.christoffel(gM[None], dgM[None], d2gM[None])
    mVW = dW[p:, p:] @ Vv[p:] + np.einsum("kij,i,j->k", gamM[0], Vv[p:], Wv[p:])
    vw = float(Vv @ g @ Wv)
    res_vv = float(np.max(np.abs(nVW[p:] - mVW)))
    res_vh = float(np.max(np.abs(nVW[:p] - vw * ed.eta)))
    return ConnectionTerms(res_xy, mixed, res_mixed, nVW[p:], res_vv, nVW[:p], res_vh)


# ---------------------------------------------------------------- curvature

@dataclass(frozen=True)
class _CurvatureParts:
    RL: np.ndarray
    RM: np.ndarray
    ed: EtaData
    gM: np.ndarray


def _parts(dom: WarpedDomain, z) -> _CurvatureParts:
    p = dom.p
    gL, dgL, d2gL = dom.L.jets(z[:p])
    gM, dgM, d2gM = dom.M.jets(z[p:])
    gamL, dgamL = K.christoffel(gL[None], dgL[None], d2gL[None])
    gamM, dgamM = K.christoffel(gM[None], dgM[None], d2gM[None])
    RL = K.riemann(gamL, dgamL)[0]
    RM = K.riemann(gamM, dgamM)[0]
    return _CurvatureParts(RL, RM, eta_data(dom, z[:p]), gM)


def _apply(R, A, B, C):
    # R(A, B) C with R[l, k, i, j]
    return np.einsum("lkij,i,j,k->l", R, A, B, C)


def _assemble(parts: _CurvatureParts, p: int, E1, E2, E3):
    ed = parts.ed
    gL, eta_, cov = ed.gL, ed.eta, ed.cov
    r2 = ed.rho**2
    X1, X2, X3 = E1[:p], E2[:p], E3[:p]
    V1, V2, V3 = E1[p:], E2[p:], E3[p:]

    def ipv(a, b):
        return r2 * float(a @ parts.gM @ b)

    def hop(X):
        return cov @ X - float(X @ gL @ eta_) * eta_

    def h(X, Y):
        return float(hop(X) @ gL @ Y)

    eta2 = float(eta_ @ gL @ eta_)
    out_h = _apply(parts.RL, X1, X2, X3) + ipv(V2, V3) * hop(X1) - ipv(V1, V3) * hop(X2)
    out_v = (-h(X1, X3) * V2 + h(X2, X3) * V1 + _apply(parts.RM, V1, V2, V3)
             - eta2 * (ipv(V2, V3) * V1 - ipv(V1, V3) * V2))
    return np.concatenate([out_h, out_v])


def curvature_warped(dom: WarpedDomain, z, E1, E2, E3) -> np.ndarray:
    """R(E1, E2) E3 assembled from the factor curvatures, eta and nabla eta."""
    z = dom.check(z)
    E1, E2, E3 = (np.asarray(E, dtype=float) for E in (E1, E2, E3))
    return _assemble(_parts(dom, z), dom.p, E1, E2, E3)


def riemann_tensor(dom: BlockDomain, z, method: str = "warped") -> np.ndarray:
    """Full curvature tensor R[l, k, i, j] at ``z``.

    ``method`` is ``"warped"`` (factor assembly, WarpedDomain only), ``"jet"``
    (Christoffels of the whole metric from jets) or ``"fd"`` (finite
    differences of the whole metric).
    """
    z = dom.check(z)
    D = dom.dim
    if method == "warped":
        if not isinstance(dom, WarpedDomain):
            raise TypeError("factor assembly needs a WarpedDomain")
        parts = _parts(dom, z)
        eye = np.eye(D)
        R = np.zeros((D, D, D, D))
        for i in range(D):
            for j in range(D):
                for k in range(D):
                    R[:, k, i, j] = _assemble(parts, dom.p, eye[i], eye[j], eye[k])
        return R
    g, dg, d2g = dom.metric_arrays(z, method)
    gam, dgam = K.christoffel(g[None], dg[None], d2g[None])
    return K.riemann(gam, dgam)[0]


def riemann_fd(dom: BlockDomain, z) -> np.ndarray:
    return riemann_tensor(dom, z, "fd")


def lowered(g, R) -> np.ndarray:
    """R_{qkij} = <R(d_i, d_j) d_k, d_q>."""
    return K.lower(np.asarray(g, dtype=float)[None], R[None])[0]


def sectional_curvature(dom: BlockDomain, z, u, v, R=None) -> float:
    z = np.asarray(z, dtype=float)
    g = np.asarray(dom.metric(z), dtype=float)
    if R is None:
        R = riemann_tensor(dom, z, "warped" if isinstance(dom, WarpedDomain) else "jet")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    num = float(_apply(R, u, v, v) @ g @ u)
    den = float((u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2)
    return num / den


# ---------------------------------------------------------------- warped-product distribution conditions

@dataclass(frozen=True)
class DistributionReport:
    H_totally_geodesic_residual: float
    V_umbilical_residual: float
    V_spherical_residual: float
    eta_vertical_residual: float
    block_orthogonality_residual: float
    points: int

    @property
    def is_warped(self) -> bool:
        return max(self.H_totally_geodesic_residual, self.V_spherical_residual,
                   self.eta_vertical_residual, self.block_orthogonality_residual) < 1e-8


def _distribution_point(dom: BlockDomain, z):
    p, n = dom.p, dom.dim - dom.p
    g, gam, dgam = dom.christoffel(z)
    _, dg, _ = dom.metric_arrays(z)
    hs, vs = slice(0, p), slice(p, p + n)
    block = float(np.max(np.abs(g[hs, vs]), initial=0.0))
    # (nabla_{d_a} d_b)_V
    tg = float(np.max(np.abs(gam[vs, hs, hs]), initial=0.0))
    gV = g[vs, vs]
    gVinv = np.linalg.inv(gV)
    # mean curvature normal of the vertical leaves (horizontal components)
    hor = gam[hs, vs, vs]                       # [a, alpha, beta]
    eta_hat = np.einsum("ab,cab->c", gVinv, hor) / n
    umb = float(np.max(np.abs(hor - np.einsum("ab,c->cab", gV, eta_hat)), initial=0.0))
    # derivatives of eta_hat in every coordinate direction
    dgV = dg[vs, vs, :]
    dgVinv = -np.einsum("ab,bck,cd->adk", gVinv, dgV, gVinv)
    dhor = dgam[hs, vs, vs, :]
    d_eta = (np.einsum("abk,cab->ck", dgVinv, hor) + np.einsum("ab,cabk->ck", gVinv, dhor)) / n
    eta_full = np.concatenate([eta_hat, np.zeros(n)])
    d_full = np.zeros((p + n, p + n))
    d_full[:p] = d_eta
    cov = d_full + np.einsum("kij,j->ki", gam, eta_full)     # cov[k, i] = (nabla_i eta)^k
    sph = float(np.max(np.abs(cov[hs, vs]), initial=0.0))    # (nabla_V eta)_H
    eta_v = float(np.max(np.abs(cov[vs, hs]), initial=0.0))  # (nabla_X eta)_V
    return tg, umb, sph, eta_v, block


def check_distributions(dom: BlockDomain, grid) -> DistributionReport:
    """Distribution conditions on a grid: H totally geodesic, V spherical.

    The spherical residual combines umbilicity of V with parallelism of its
    mean curvature normal along V; ``eta_vertical_residual`` is the vertical
    part of the horizontal derivative of that normal.
    """
    pts = grid.points() if isinstance(grid, Grid) else np.atleast_2d(np.asarray(grid, dtype=float))
    tg = umb = sph = ev = blk = 0.0
    for z in pts:
        a, b, c, d, e = _distribution_point(dom, z)
        tg, umb, sph, ev, blk = max(tg, a), max(umb, b), max(sph, c), max(ev, d), max(blk, e)
    return DistributionReport(tg, umb, max(umb, sph), ev, blk, len(pts))
