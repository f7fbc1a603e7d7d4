"""Immersions into space forms: jets, fundamental forms and their identities.

Tangent vectors are passed as domain coordinate vectors (p + n components)
unless a function says otherwise.  Normal vectors are either ambient model
vectors or component vectors in the sample's normal frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from . import jets as J
from .ambient import AmbientSpace, inner
from .errors import DegenerateImmersionError, DomainError, NonNormalError, OffManifoldError, StencilError
from .linalg import align_frame, complement, gram_schmidt, numerical_rank
from .warped import BlockDomain, FD_STEP, Grid, WarpedDomain, eta_data, riemann_tensor

FRAME_TOL = 1e-10
RANK_DEGENERATE = 1e-8


@dataclass
class Immersion:
    dom: BlockDomain
    space: AmbientSpace
    map: Callable = field(repr=False)
    declared_isometric: bool = True
    name: str = ""

    @property
    def dim(self) -> int:
        return self.dom.dim

    @property
    def codim(self) -> int:
        return self.space.l - self.dom.dim

    def __call__(self, z):
        return np.asarray(self.map(z))

    def value(self, z) -> np.ndarray:
        return np.asarray(self.map(np.asarray(z, dtype=float)), dtype=float)

    def jets(self, z, method: str = "jet"):
        z = np.asarray(z, dtype=float)
        md = self.space.model_dim
        if method == "jet":
            out = np.asarray(self.map(J.seed(z)), dtype=object)
            if out.shape != (md,):
                raise DomainError(f"map returned shape {out.shape}, expected ({md},)")
            return J.jet_arrays(out, self.dim)
        if method == "fd":
            return J.fd_arrays(self.value, z, FD_STEP)
        raise ValueError(f"unknown differentiation method {method!r}")


@dataclass(frozen=True)
class ImmersionSample:
    z: np.ndarray
    value: np.ndarray
    d1: np.ndarray              # (D, model_dim): row i is d_i f
    d2: np.ndarray              # (D, D, model_dim)
    tangent_frame: np.ndarray   # (D, model_dim) orthonormal
    normal_frame: np.ndarray    # (k, model_dim) orthonormal, tangent to Q_c
    frame_coeffs: np.ndarray    # (D, D): tangent_frame = frame_coeffs @ d1
    metric: np.ndarray          # induced metric g_ij
    dmetric: np.ndarray         # dmetric[i, j, k] = d_k g_ij (exact from second jets)
    method: str = "jet"

    @property
    def k(self) -> int:
        return self.normal_frame.shape[0]

    def christoffel(self) -> np.ndarray:
        D = self.metric.shape[0]
        gam, _ = K.christoffel(self.metric[None], self.dmetric[None], np.zeros((1, D, D, D, D)))
        return gam[0]

    def to_frame(self, u) -> np.ndarray:
        """Orthonormal-frame components of the domain vector ``u``."""
        amb = np.asarray(u, dtype=float) @ self.d1
        return self.tangent_frame @ (self.space_gram @ amb)

    space: AmbientSpace | None = field(default=None, repr=False)

    @property
    def space_gram(self) -> np.ndarray:
        return self.space.gram


def _normal_candidates(space: AmbientSpace, value):
    return space.tangent_candidates(value)


def sample(f: Immersion, z, method: str = "jet", normal_reference=None) -> ImmersionSample:
    """Second-order jet of ``f`` at ``z`` with tangent and normal frames.

    ``normal_reference`` (rows) makes the normal frame the one closest to a
    given frame; finite-difference stencils use it so that frames vary
    smoothly across neighbouring samples.
    """
    sp = f.space
    z = np.asarray(z, dtype=float)
    if z.shape != (f.dim,):
        raise DomainError(f"domain point needs {f.dim} coordinates")
    val, grad, hess = f.jets(z, method)
    if sp.c != 0 and sp.residual(val) > sp.tol:
        raise OffManifoldError(f"image point off the quadric by {sp.residual(val):.3e}")
    Jm = sp.gram
    d1 = grad.T.copy()                        # (D, md)
    d2 = np.moveaxis(hess, 0, -1).copy()      # (D, D, md)
    g = d1 @ Jm @ d1.T
    ev = np.linalg.eigvalsh(g)
    if ev[0] <= 0 or np.sqrt(ev[0]) < RANK_DEGENERATE * np.sqrt(ev[-1]):
        raise DegenerateImmersionError(f"differential has deficient rank at z={z}")
    dg = np.einsum("kia,ab,jb->ijk", d2, Jm, d1)
    dg = dg + np.swapaxes(dg, 0, 1)
    T = gram_schmidt(d1, Jm)
    if T.shape[0] != f.dim:
        raise DegenerateImmersionError(f"differential has deficient rank at z={z}")
    coeffs = np.linalg.solve(g, d1 @ Jm @ T.T).T
    k = f.codim
    cand = _normal_candidates(sp, val)
    if normal_reference is not None:
        _, full = complement(T, cand, Jm)
        Nf = align_frame(normal_reference, full[:k], Jm)
    else:
        _, Nf = complement(T, cand, Jm)
        Nf = Nf[:k]
    if Nf.shape[0] != k:
        raise DegenerateImmersionError("could not complete the normal frame")
    return ImmersionSample(z, val, d1, d2, T, Nf, coeffs, g, dg, method, sp)


def frame_residuals(s: ImmersionSample) -> dict:
    Jm = s.space_gram
    T, N = s.tangent_frame, s.normal_frame
    out = {
        "tangent_orthonormality": float(np.max(np.abs(T @ Jm @ T.T - np.eye(len(T))))),
        "normal_orthonormality": float(np.max(np.abs(N @ Jm @ N.T - np.eye(len(N))), initial=0.0)),
        "normal_tangent": float(np.max(np.abs(N @ Jm @ T.T), initial=0.0)),
    }
    out["radial"] = 0.0 if s.space.c == 0 else float(np.max(np.abs(np.vstack([T, N]) @ Jm @ s.value)))
    return out


# ---------------------------------------------------------------- second fundamental form

@dataclass(frozen=True)
class SecondFF:
    alpha: np.ndarray          # (k, D, D) coordinate components in the normal frame
    sample: ImmersionSample = field(repr=False)

    @property
    def frame_alpha(self) -> np.ndarray:
        F = self.sample.frame_coeffs
        return np.einsum("ai,qij,bj->qab", F, self.alpha, F)

    def __call__(self, u, v) -> np.ndarray:
        """Normal-frame components of alpha(u, v) for domain vectors u, v."""
        return np.einsum("qij,i,j->q", self.alpha, np.asarray(u, float), np.asarray(v, float))

    def ambient(self, u, v) -> np.ndarray:
        return self(u, v) @ self.sample.normal_frame

    @property
    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.alpha - np.swapaxes(self.alpha, 1, 2)), initial=0.0))


def second_ff(s: ImmersionSample, space: AmbientSpace | None = None) -> SecondFF:
    """Normal part of the second partials; for c != 0 the radial part drops out."""
    diag = (s.space if space is None else space).diag
    a = np.einsum("ija,a,qa->qij", s.d2, diag, s.normal_frame)
    return SecondFF(a, s)


def _normal_components(s: ImmersionSample, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape == (s.k,):
        return xi
    if xi.shape != s.value.shape:
        raise NonNormalError("normal vector has the wrong length")
    Jm = s.space_gram
    scale = max(1.0, float(np.linalg.norm(xi)))
    tang = s.tangent_frame @ Jm @ xi
    if np.max(np.abs(tang), initial=0.0) > 1e-9 * scale:
        raise NonNormalError("vector has a tangential component")
    # anything left after projecting onto the normal frame is radial or tangential
    comp = s.normal_frame @ Jm @ xi
    if np.linalg.norm(xi - comp @ s.normal_frame) > 1e-9 * scale:
        raise NonNormalError("vector is not normal to the immersion")
    return comp


def shape_operator(s: ImmersionSample, alpha: SecondFF, xi) -> np.ndarray:
    """A_xi in the orthonormal tangent frame."""
    comp = _normal_components(s, xi)
    return np.einsum("q,qab->ab", comp, alpha.frame_alpha)


def shape_operator_coords(s: ImmersionSample, alpha: SecondFF, xi) -> np.ndarray:
    """Mixed tensor A^i_j = g^ik <alpha(d_k, d_j), xi> in coordinates."""
    comp = _normal_components(s, xi)
    return np.linalg.solve(s.metric, np.einsum("q,qkj->kj", comp, alpha.alpha))


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray        # rows: domain vectors, orthonormal in the induced metric
    dim: int
    marginal: bool = False
    singular_values: np.ndarray = field(default=None, repr=False)


def relative_nullity(s: ImmersionSample, alpha: SecondFF) -> Subspace:
    """Kernel of E -> (A_xi_1 E, ..., A_xi_k E)."""
    fa = alpha.frame_alpha
    D = fa.shape[1]
    stacked = fa.reshape(-1, D) if fa.size else np.zeros((0, D))
    if stacked.shape[0] == 0:
        return Subspace(s.frame_coeffs.copy(), D)
    _, sv, vt = np.linalg.svd(stacked)
    full_sv = np.zeros(D)
    full_sv[: len(sv)] = sv
    dec = numerical_rank(full_sv)
    ker = vt[dec.rank:] if dec.rank < vt.shape[0] else np.zeros((0, D))
    # frame components -> domain vectors
    basis = ker @ s.frame_coeffs
    return Subspace(basis, D - dec.rank, dec.marginal, full_sv)


@dataclass(frozen=True)
class PrincipalNormal:
    zeta: np.ndarray             # ambient vector
    zeta_components: np.ndarray  # normal-frame components
    eigenspace: np.ndarray       # rows: domain vectors of the tested subspace
    is_nullity: bool
    residual: float
    found: bool


def principal_normals(s: ImmersionSample, alpha: SecondFF, dirs, tol: float = 1e-8) -> list:
    """For each candidate subspace S test whether S lies in some Delta_zeta.

    The least-squares zeta is the mean of alpha(T, T) over an orthonormal
    basis of S; the residual is the largest deviation of alpha(T, E) from
    <T, E> zeta over that basis and the tangent frame.
    """
    out = []
    g = s.metric
    F = s.frame_coeffs
    scale = max(1.0, float(np.max(np.abs(alpha.frame_alpha), initial=0.0)))
    for S in dirs:
        S = np.atleast_2d(np.asarray(S, dtype=float))
        B = gram_schmidt(S, g, canonical=False)
        if B.shape[0] == 0:
            raise ValueError("empty candidate subspace")
        zeta = np.mean([alpha(t, t) for t in B], axis=0)
        res = 0.0
        for t in B:
            for e in F:
                res = max(res, float(np.max(np.abs(alpha(t, e) - float(t @ g @ e) * zeta), initial=0.0)))
        nz = float(np.linalg.norm(zeta))
        found = res < tol * scale
        out.append(PrincipalNormal(zeta @ s.normal_frame, zeta, B, found and nz < tol * scale, res, found))
    return out


# ---------------------------------------------------------------- curvature identities

def curvature_like_C(s: ImmersionSample, alpha: SecondFF, E1, E2, E3, E4) -> float:
    """<alpha(E1,E4), alpha(E2,E3)> - <alpha(E1,E3), alpha(E2,E4)>."""
    return float(alpha(E1, E4) @ alpha(E2, E3) - alpha(E1, E3) @ alpha(E2, E4))


def extrinsic_C_tensor(alpha: SecondFF) -> np.ndarray:
    """C[i, j, k, l] in coordinates."""
    return K.extrinsic_c(alpha.alpha[None])[0]


def intrinsic_tensor(f: Immersion, z, c: float, method: str = "jet") -> np.ndarray:
    """<R(d_i,d_j)d_k, d_l> - c(<d_j,d_k><d_i,d_l> - <d_i,d_k><d_j,d_l>) as [i, j, k, l]."""
    dom = f.dom
    if method == "jet":
        R = riemann_tensor(dom, z, "warped" if isinstance(dom, WarpedDomain) and dom.n > 0 else "jet")
    else:
        R = riemann_tensor(dom, z, "fd")
    g = np.asarray(dom.metric(np.asarray(z, dtype=float)), dtype=float)
    low = K.lower(g[None], R[None])[0]          # [l, k, i, j]
    Rt = np.einsum("lkij->ijkl", low)
    wedge = np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)
    return Rt - c * wedge


def _domain_frame(dom: BlockDomain, z) -> np.ndarray:
    g = np.asarray(dom.metric(np.asarray(z, dtype=float)), dtype=float)
    return gram_schmidt(np.eye(dom.dim), g, canonical=False)


def gauss_residual(f: Immersion, z, method: str = "jet") -> float:
    """max |intrinsic (R - c wedge) - extrinsic C| over an orthonormal domain frame."""
    z = np.asarray(z, dtype=float)
    s = sample(f, z, method)
    a = second_ff(s)
    ext = extrinsic_C_tensor(a)
    intr = intrinsic_tensor(f, z, f.space.c, method)
    F = _domain_frame(f.dom, z)
    diff = np.einsum("ai,bj,ck,dl,ijkl->abcd", F, F, F, F, intr - ext)
    return float(np.max(np.abs(diff)))


def isometry_residual(f: Immersion, z, method: str = "jet") -> float:
    s = sample(f, z, method)
    g = np.asarray(f.dom.metric(np.asarray(z, dtype=float)), dtype=float)
    return float(np.max(np.abs(s.metric - g)))


# ---------------------------------------------------------------- Codazzi

def _stencil(f: Immersion, z, h: float):
    D = f.dim
    centre = sample(f, z)
    plus, minus = [], []
    for m in range(D):
        e = np.zeros(D)
        e[m] = h
        sp_ = sample(f, z + e, normal_reference=centre.normal_frame)
        sm_ = sample(f, z - e, normal_reference=centre.normal_frame)
        jump = max(np.max(np.abs(sp_.normal_frame - centre.normal_frame), initial=0.0),
                   np.max(np.abs(sm_.normal_frame - centre.normal_frame), initial=0.0))
        if jump > 1e3 * h:
            raise StencilError("normal frame is not differentiable across the stencil")
        plus.append(sp_)
        minus.append(sm_)
    return centre, plus, minus


def covariant_alpha(f: Immersion, z, h: float = FD_STEP):
    """(nabla_m alpha)^r_ij as an array [r, m, i, j] plus the centre sample."""
    z = np.asarray(z, dtype=float)
    centre, plus, minus = _stencil(f, z, h)
    Jm = centre.space_gram
    a0 = second_ff(centre).alpha
    D, k = f.dim, centre.k
    d_alpha = np.zeros((k, D, D, D))    # [r, m, i, j]
    omega = np.zeros((k, k, D))          # omega[r, q, m] = <d_m nu_q, nu_r>
    for m in range(D):
        ap = second_ff(plus[m]).alpha
        am = second_ff(minus[m]).alpha
        d_alpha[:, m] = (ap - am) / (2 * h)
        dnu = (plus[m].normal_frame - minus[m].normal_frame) / (2 * h)
        omega[:, :, m] = (centre.normal_frame @ Jm @ dnu.T)
    gam = centre.christoffel()
    cov = (d_alpha + np.einsum("rqm,qij->rmij", omega, a0)
           - np.einsum("lmi,rlj->rmij", gam, a0) - np.einsum("lmj,ril->rmij", gam, a0))
    return cov, centre


def codazzi_residual(f: Immersion, z, xi_field: Callable | None = None, h: float = FD_STEP) -> float:
    """Residual of the Codazzi equation at ``z`` in an orthonormal frame.

    Without ``xi_field`` the full normal-valued equation is tested.  With a
    unit normal field ``xi_field(z) -> ambient vector`` the shape-operator form
    (nabla_E1 A_xi)E2 - (nabla_E2 A_xi)E1 = A_{nabla^perp_E1 xi}E2 - A_{nabla^perp_E2 xi}E1
    is tested; in codimension 2 the right side is
    omega(E1) A_xi' E2 - omega(E2) A_xi' E1 with omega(E) = <nabla^perp_E xi, xi'>.
    """
    z = np.asarray(z, dtype=float)
    if xi_field is None:
        cov, centre = covariant_alpha(f, z, h)
        diff = cov - np.swapaxes(cov, 1, 2)
        F = centre.frame_coeffs
        diff = np.einsum("am,bi,cj,rmij->rabc", F, F, F, diff)
        return float(np.max(np.abs(diff), initial=0.0))
    centre, plus, minus = _stencil(f, z, h)
    D = f.dim
    Jm = centre.space_gram

    def A_of(s, xi_vec):
        a = second_ff(s)
        comp = s.normal_frame @ Jm @ xi_vec
        return np.linalg.solve(s.metric, np.einsum("q,qkj->kj", comp, a.alpha))

    def xi_at(s):
        v = np.asarray(xi_field(s.z), dtype=float)
        # keep only the normal part (a field given in closed form may carry roundoff)
        return (s.normal_frame @ Jm @ v) @ s.normal_frame

    xi0 = xi_at(centre)
    A0 = A_of(centre, xi0)
    dA = np.zeros((D, D, D))        # [m, i, j]
    mu = []
    for m in range(D):
        xp, xm = xi_at(plus[m]), xi_at(minus[m])
        if np.linalg.norm(xp - xm) > 1e3 * h * max(1.0, np.linalg.norm(xi0)):
            raise StencilError("normal field is not differentiable across the stencil")
        dA[m] = (A_of(plus[m], xp) - A_of(minus[m], xm)) / (2 * h)
        dxi = (xp - xm) / (2 * h)
        mu.append((centre.normal_frame @ Jm @ dxi) @ centre.normal_frame)
    gam = centre.christoffel()
    # (nabla_m A)^i_j
    covA = dA + np.einsum("imk,kj->mij", gam, A0) - np.einsum("kmj,ik->mij", gam, A0)
    lhs = np.einsum("mij->imj", covA) - np.einsum("jim->imj", covA)   # [i, m, j]
    A_mu = np.array([A_of(centre, mu[m]) for m in range(D)])          # [m, i, j]
    rhs = np.einsum("mij->imj", A_mu) - np.einsum("jim->imj", A_mu)
    diff = lhs - rhs
    # to the orthonormal frame: upper index with F^{-T}, lower ones with F
    F = centre.frame_coeffs
    Finv = np.linalg.inv(F)
    diff = np.einsum("ia,bm,cj,imj->abc", Finv, F, F, diff)
    return float(np.max(np.abs(diff), initial=0.0))


def normal_connection_form(f: Immersion, z, xi_field: Callable, xi2_field: Callable, h: float = FD_STEP) -> np.ndarray:
    """omega(d_m) = <nabla^perp_{d_m} xi, xi'> for every coordinate direction."""
    z = np.asarray(z, dtype=float)
    centre = sample(f, z)
    Jm = centre.space_gram
    xi2 = np.asarray(xi2_field(z), dtype=float)
    out = np.zeros(f.dim)
    for m in range(f.dim):
        e = np.zeros(f.dim)
        e[m] = h
        d = (np.asarray(xi_field(z + e), float) - np.asarray(xi_field(z - e), float)) / (2 * h)
        out[m] = float(d @ Jm @ xi2)
    return out


# ---------------------------------------------------------------- spherical hull

@dataclass(frozen=True)
class HullResult:
    m: int | None
    ctilde: float | None
    mode: str                 # "i", "ii" or "undetermined"
    theta_norm_spread: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def determined(self) -> bool:
        return self.m is not None


def _grid_points(grid) -> np.ndarray:
    if isinstance(grid, Grid):
        return grid.points()
    return np.atleast_2d(np.asarray(grid, dtype=float))


def _umbilic_direction_exists(alpha_blocks: np.ndarray, mixed: np.ndarray | None, tol: float = 1e-7) -> bool:
    """Is there a unit normal xi with <alpha(V_i,V_j),xi> = lambda delta_ij (and no mixed part)?

    ``alpha_blocks`` is (k, n, n) in an orthonormal basis of the subspace.
    """
    k, n, _ = alpha_blocks.shape
    if k == 0:
        return False
    rows = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                if i + 1 < n:
                    rows.append(alpha_blocks[:, i, i] - alpha_blocks[:, i + 1, i + 1])
            else:
                rows.append(alpha_blocks[:, i, j])
    if mixed is not None:
        rows.extend(mixed.reshape(k, -1).T)
    if not rows:
        return True
    Mx = np.array(rows)
    sv = np.linalg.svd(Mx, compute_uv=False)
    full = np.zeros(k)
    full[: len(sv)] = sv
    scale = max(1.0, float(np.max(np.abs(alpha_blocks))))
    return bool(full[-1] < tol * scale)


def spherical_hull(G: Immersion, grid, leaf_y=None, tol: float = 1e-6) -> HullResult:
    """Dimension and curvature of the spherical hull in the two decidable modes.

    Standalone (``leaf_y is None``): ``G`` is an immersion of a single factor.
    Mode (i): the whole normal bundle is umbilical with a parallel principal
    normal theta, giving m = dim and ctilde = c + |theta|^2.  Mode (ii): at no
    grid point does a normal direction have a shape operator proportional to
    the identity, giving m = l and ctilde = c.

    Leaf mode: ``G`` is a warped product immersion, ``leaf_y`` a point of L
    with rho = 1, and ``grid`` runs over M.  Mode (i): the vertical space lies
    in some Delta_zeta at every leaf point (m = n, ctilde = c + |zeta|^2 +
    |grad log rho|^2).  Mode (ii): no normal direction has A restricted to the
    vertical space proportional to the identity (m = l - p, ctilde = c +
    |grad log rho|^2).
    """
    c = G.space.c
    if leaf_y is None:
        return _hull_standalone(G, grid, c, tol)
    return _hull_leaf(G, grid, np.asarray(leaf_y, dtype=float), c, tol)


def _hull_standalone(G, grid, c, tol):
    pts = _grid_points(grid)
    n = G.dim
    umbilic_all, parallel_all, no_dir_all = True, True, True
    norms = []
    par_res = 0.0
    for z in pts:
        s = sample(G, z)
        a = second_ff(s)
        fa = a.frame_alpha
        theta = np.einsum("qaa->q", fa) / n
        dev = fa - np.einsum("q,ab->qab", theta, np.eye(n))
        scale = max(1.0, float(np.max(np.abs(fa), initial=0.0)))
        if np.max(np.abs(dev), initial=0.0) > tol * scale:
            umbilic_all = False
        if _umbilic_direction_exists(fa, None):
            no_dir_all = False
        norms.append(float(np.linalg.norm(theta)))
        if umbilic_all:
            r = _theta_parallel_residual(G, z)
            par_res = max(par_res, r)
            if r > tol * scale:
                parallel_all = False
    spread = float(np.ptp(norms)) if norms else 0.0
    if umbilic_all and parallel_all and spread < tol * max(1.0, max(norms)):
        th = float(np.mean(norms))
        return HullResult(n, c + th * th, "i", spread, {"theta_norm": th, "parallel_residual": par_res})
    if no_dir_all and n >= 2:
        return HullResult(G.space.l, c, "ii", spread)
    return HullResult(None, None, "undetermined", spread)


def _theta_parallel_residual(G, z, h: float = FD_STEP) -> float:
    """Largest normal component of the derivative of the mean curvature vector."""
    centre = sample(G, z)
    Jm = centre.space_gram
    n = G.dim

    def theta_amb(s):
        fa = second_ff(s).frame_alpha
        return (np.einsum("qaa->q", fa) / n) @ s.normal_frame

    res = 0.0
    for m in range(n):
        e = np.zeros(n)
        e[m] = h
        sp_ = sample(G, z + e, normal_reference=centre.normal_frame)
        sm_ = sample(G, z - e, normal_reference=centre.normal_frame)
        d = (theta_amb(sp_) - theta_amb(sm_)) / (2 * h)
        res = max(res, float(np.max(np.abs(centre.normal_frame @ Jm @ d), initial=0.0)))
    return res


def _hull_leaf(f, grid, ybar, c, tol):
    dom = f.dom
    if not isinstance(dom, WarpedDomain):
        raise TypeError("leaf mode needs an immersion of a warped product")
    p, n = dom.p, dom.n
    if abs(dom.rho_value(ybar) - 1.0) > 1e-9:
        raise DomainError("leaf mode needs rho(leaf_y) = 1")
    ed = eta_data(dom, ybar)
    grad_log2 = float(ed.eta @ ed.gL @ ed.eta)
    xs = _grid_points(grid)
    eye = np.eye(p + n)
    in_delta, no_dir = True, True
    znorms = []
    for x in xs:
        z = np.concatenate([ybar, x])
        s = sample(f, z)
        a = second_ff(s)
        pn = principal_normals(s, a, [eye[p:]], tol=tol)[0]
        if not pn.found:
            in_delta = False
        znorms.append(float(np.linalg.norm(pn.zeta_components)))
        # vertical block in an orthonormal vertical basis, mixed block against horizontals
        Vb = gram_schmidt(eye[p:], s.metric, canonical=False)
        Hb = gram_schmidt(eye[:p], s.metric, canonical=False)
        blk = np.einsum("ai,qij,bj->qab", Vb, a.alpha, Vb)
        mixed = np.einsum("ai,qij,bj->qab", Hb, a.alpha, Vb) if p else None
        if _umbilic_direction_exists(blk, mixed):
            no_dir = False
    spread = float(np.ptp(znorms)) if znorms else 0.0
    if in_delta:
        zn = float(np.mean(znorms))
        return HullResult(n, c + zn * zn + grad_log2, "i", spread, {"zeta_norm": zn, "grad_log_rho_sq": grad_log2})
    if no_dir and n >= 2:
        return HullResult(f.space.l - p, c + grad_log2, "ii", spread, {"grad_log_rho_sq": grad_log2})
    return HullResult(None, None, "undetermined", spread)
