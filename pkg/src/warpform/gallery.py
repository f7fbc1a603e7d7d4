"""Certified example immersions with known types and closed-form alpha.

Every instance carries default grid bounds and counts so suites are
reproducible.  Maps are written against :mod:`warpform.jets` and work on
floats and on seeded jets alike.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .ambient import AmbientSpace, SphericalSub, WarpedRep, extrinsic_product_embed, inner, psi, sigma
from .errors import DomainError, ScenarioError
from .immersion import Immersion
from .warped import BlockDomain, FactorChart, Grid, WarpedDomain

SQ2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FactorMap:
    """An immersion of one factor given by a chart and a (jet friendly) map."""

    chart: FactorChart
    map: Callable = field(repr=False)

    def __call__(self, u):
        return self.map(u)


@dataclass(frozen=True)
class GalleryInstance:
    name: str
    f: Immersion
    expected_type: str            # "A", "B1", "B2", "C" or "mixed"
    predicted_alpha: Callable | None = field(default=None, repr=False)
    notes: str = ""
    counts: tuple = ()
    bounds: tuple = ()
    params: dict = field(default_factory=dict)
    kind: str = "warped"          # "warped", "extrinsic", "composition" or "tilted"

    def grid(self, counts=None) -> Grid:
        counts = self.counts if counts is None else counts
        if np.isscalar(counts):
            counts = (int(counts),) * self.f.dim
        return Grid(self.bounds or self.f.dom.bounds, counts)

    def manifest(self) -> dict:
        return {
            "name": self.name,
            "expected_type": self.expected_type,
            "kind": self.kind,
            "c": self.f.space.c,
            "ambient_dim": self.f.space.l,
            "p": self.f.dom.p,
            "n": self.f.dom.n,
            "codim": self.f.codim,
            "counts": list(self.counts),
            "bounds": [list(b) for b in (self.bounds or self.f.dom.bounds)],
            "params": self.params,
            "notes": self.notes,
        }


# ---------------------------------------------------------------- projections

def _off(u, tang, Jm):
    """Remove the component of ``u`` along the span of the rows of ``tang``."""
    if tang.shape[0] == 0:
        return u
    G = tang @ Jm @ tang.T
    return u - tang.T @ np.linalg.solve(G, tang @ Jm @ u)


def _leaf_projector(rep: WarpedRep, y):
    """Orthogonal projection onto the tangent space of the leaf V at ``y``."""
    sp = rep.total
    Jm = sp.gram
    T = rep.sub.tangent_basis

    def P(u):
        u = u - T.T @ (T @ Jm @ u)
        if sp.c != 0:
            u = u - sp.c * float(u @ Jm @ y) * y
        return u

    return P


def _factor_jets(fm: FactorMap, u):
    u = np.asarray(u, dtype=float)
    out = np.asarray(fm.map(J.seed(u)), dtype=object)
    return J.jet_arrays(out, fm.chart.dim)


# ---------------------------------------------------------------- constructors

def make_warped_product_immersion(rep: WarpedRep, h1: FactorMap, h2: FactorMap, name: str = "warped",
                                  counts=None, bounds=None, notes: str = "", params=None,
                                  include_grad_term: bool = True) -> GalleryInstance:
    """f = Psi o (h1 x h2), with rho = sigma o h1.

    ``h1`` maps into the leaf V through zbar, ``h2`` into the spherical
    factor.  The predicted alpha is assembled from the second fundamental
    forms of h1 (in V) and h2 (in the spherical factor) together with the
    normal part of grad sigma along h1.  ``include_grad_term=False`` drops
    that last part (only useful as a negative control).
    """
    sp = rep.total
    sub = rep.sub
    L, M = h1.chart, h2.chart
    p, n = L.dim, M.dim
    if p + n > sp.l:
        raise DomainError("factor dimensions exceed the ambient dimension")
    # sigma o h1 must stay positive over the chart
    for y in Grid(L.bounds, (5,) * p).points():
        if float(sigma(rep, np.asarray(h1(y), dtype=float))) <= 0:
            raise DomainError(f"sigma o h1 is not positive at y = {y}")
        if not rep.in_leaf(np.asarray(h1(y), dtype=float), tol=1e-8):
            raise DomainError("h1 does not map into the leaf through zbar")
    for x in Grid(M.bounds, (3,) * n).points():
        if not sub.contains(np.asarray(h2(x), dtype=float), tol=1e-8):
            raise DomainError("h2 does not map into the spherical factor")

    def rho(y):
        return sigma(rep, h1(y))

    dom = WarpedDomain(L, M, rho)

    def fmap(z):
        return psi(rep, h1(z[:p]), h2(z[p:]))

    f = Immersion(dom, sp, fmap, True, name)
    Jm = sp.gram

    def predicted(z):
        z = np.asarray(z, dtype=float)
        y, x = z[:p], z[p:]
        v1, g1, H1 = _factor_jets(h1, y)
        v2, g2, H2 = _factor_jets(h2, x)
        PL = _leaf_projector(rep, v1)
        tF = g1.T
        tG = g2.T
        Tx = sub.tangent_basis_at(v2)
        aF = np.array([[_off(PL(H1[:, i, j]), tF, Jm) for j in range(p)] for i in range(p)])
        aG = np.array([[_off(Tx.T @ (Tx @ Jm @ H2[:, i, j]), tG, Jm) for j in range(n)] for i in range(n)])
        gperp = _off(PL(np.asarray(sub.a, dtype=float)), tF, Jm) if include_grad_term else 0.0 * v1
        r = float(sigma(rep, v1))
        gM = np.asarray(M.metric(x), dtype=float)

        def dpsi(u, w):
            return u + float(u @ Jm @ sub.a) * (v2 - sub.zbar) + r * w

        D = p + n
        out = np.zeros((D, D, sp.model_dim))
        zero = np.zeros(sp.model_dim)
        for i in range(D):
            for j in range(D):
                if i < p and j < p:
                    out[i, j] = dpsi(aF[i, j], zero)
                elif i >= p and j >= p:
                    a_, b_ = i - p, j - p
                    out[i, j] = dpsi(-r * gM[a_, b_] * gperp, aG[a_, b_])
        return out

    counts = tuple(counts) if counts is not None else (7,) * (p + n)
    return GalleryInstance(name, f, "A", predicted, notes, counts, tuple(bounds or dom.bounds),
                           dict(params or {}), "warped")


def make_rotational(profile: FactorMap, rep: WarpedRep, fiber_bounds, name: str = "rotational",
                    counts=None, notes: str = "", params=None, include_grad_term: bool = True) -> GalleryInstance:
    """Rotational submanifold: h2 is the identity chart of the spherical factor."""
    sub = rep.sub
    h2 = FactorMap(FactorChart.from_sub(sub, fiber_bounds), sub.chart)
    return make_warped_product_immersion(rep, profile, h2, name, counts, None, notes, params,
                                         include_grad_term=include_grad_term)


def make_extrinsic_product(c: float, radii, h1: FactorMap, h2: FactorMap, name: str = "extrinsic",
                           counts=None, notes: str = "", params=None) -> GalleryInstance:
    """f = (h1, h2) into S(r1) x S(r2) inside Q_c, r1^2 + r2^2 = 1/c."""
    r1, r2 = (float(r) for r in radii)
    if c <= 0 or abs(r1 * r1 + r2 * r2 - 1.0 / c) > 1e-12 * max(1.0, 1.0 / c):
        raise DomainError("extrinsic products need c > 0 and r1^2 + r2^2 = 1/c")
    L, M = h1.chart, h2.chart
    p, n = L.dim, M.dim
    d1 = len(np.asarray(h1(np.array([(lo + hi) / 2 for lo, hi in L.bounds]))))
    d2 = len(np.asarray(h2(np.array([(lo + hi) / 2 for lo, hi in M.bounds]))))
    sp = AmbientSpace(c, d1 + d2 - 1)
    extrinsic_product_embed(c, r1, r2, np.asarray(h1(np.array([b[0] for b in L.bounds])), dtype=float),
                            np.asarray(h2(np.array([b[0] for b in M.bounds])), dtype=float))
    dom = WarpedDomain(L, M, lambda y: 1.0)

    def fmap(z):
        u = np.asarray(h1(z[:p]))
        v = np.asarray(h2(z[p:]))
        return np.concatenate([u, v])

    f = Immersion(dom, sp, fmap, True, name)
    counts = tuple(counts) if counts is not None else (7,) * (p + n)
    pr = {"c": c, "radii": [r1, r2]}
    pr.update(params or {})
    return GalleryInstance(name, f, "A", None, notes, counts, dom.bounds, pr, "extrinsic")


def make_composition(g: GalleryInstance, H: Callable, target: AmbientSpace, name: str = "composition",
                     expected_type: str = "mixed", counts=None, bounds=None, notes: str = "",
                     params=None) -> GalleryInstance:
    """f = H o g, with ``H`` a jet friendly isometric immersion into ``target``."""
    src = g.f.space
    if target.c != src.c or target.l != src.l + 1:
        raise DomainError("H must map Q_c^l into Q_c^(l+1)")
    gf = g.f

    def fmap(z):
        return H(gf(z))

    f = Immersion(gf.dom, target, fmap, gf.declared_isometric, name)
    return GalleryInstance(name, f, expected_type, None, notes, tuple(counts or g.counts),
                           tuple(bounds or g.bounds), dict(params or {}), "composition")


def make_tilted_flat(Q, radii, extra_flat_dims: int, p: int = 1, name: str = "tilted",
                     counts=None, bounds=None, notes: str = "", params=None) -> GalleryInstance:
    """(w) -> (r1 cos(a/r1), r1 sin(a/r1), r2 cos(b/r2), r2 sin(b/r2), flat...), (a, b, ...) = Q w.

    The first ``p`` domain coordinates are horizontal, the rest vertical.
    """
    Q = np.asarray(Q, dtype=float)
    d = Q.shape[0]
    if Q.shape != (d, d) or np.max(np.abs(Q @ Q.T - np.eye(d))) > 1e-10:
        raise DomainError("Q must be orthogonal within 1e-10")
    if d != 2 + int(extra_flat_dims):
        raise DomainError("Q must act on the two circle coordinates plus the flat ones")
    r1, r2 = (float(r) for r in radii)
    if r1 <= 0 or r2 <= 0:
        raise DomainError("radii must be positive")
    sp = AmbientSpace(0.0, 4 + int(extra_flat_dims))
    bounds = tuple(bounds or ((-0.6, 0.6),) * d)
    eye = np.eye(p)
    L = FactorChart(p, bounds[:p], lambda u: eye)
    M = FactorChart(d - p, bounds[p:], lambda u: np.eye(d - p))
    dom = WarpedDomain(L, M, lambda y: 1.0)

    def fmap(w):
        w = np.asarray(w)
        lin = [sum(Q[k, j] * w[j] for j in range(d)) for k in range(d)]
        a, b = lin[0], lin[1]
        head = [r1 * J.cos(a / r1), r1 * J.sin(a / r1), r2 * J.cos(b / r2), r2 * J.sin(b / r2)]
        return np.array(head + lin[2:], dtype=object if w.dtype == object else float)

    def predicted(w):
        w = np.asarray(w, dtype=float)
        a, b = Q[0] @ w, Q[1] @ w
        n1 = np.zeros(sp.model_dim)
        n2 = np.zeros(sp.model_dim)
        n1[:2] = [math.cos(a / r1), math.sin(a / r1)]
        n2[2:4] = [math.cos(b / r2), math.sin(b / r2)]
        return (-np.einsum("i,j,a->ija", Q[0], Q[0], n1) / r1
                - np.einsum("i,j,a->ija", Q[1], Q[1], n2) / r2)

    f = Immersion(dom, sp, fmap, True, name)
    counts = tuple(counts) if counts is not None else (7,) * d
    pr = {"Q": Q.tolist(), "radii": [r1, r2], "extra_flat_dims": int(extra_flat_dims), "p": p}
    pr.update(params or {})
    return GalleryInstance(name, f, "mixed", predicted, notes, counts, bounds, pr, "tilted")


# ---------------------------------------------------------------- building blocks

def flat_rep(l: int, centre_axis: int, tangent_axes, radius: float = 1.0) -> WarpedRep:
    """Rotational representation of R^l: a round sphere of ``radius`` in the
    coordinate plane ``tangent_axes + [centre_axis]``, centred at the origin and
    based at ``radius * e_centre``."""
    sp = AmbientSpace(0.0, l)
    eye = np.eye(l)
    zbar = radius * eye[centre_axis]
    a = eye[centre_axis] / radius
    return WarpedRep(SphericalSub(sp, zbar, a, eye[list(tangent_axes)]))


def line_chart(dim: int, bounds) -> FactorChart:
    return FactorChart.euclidean(dim, bounds)


def circle_map(radius: float, offset=(0.0, 0.0)):
    """Unit-speed circle of ``radius`` in R^2."""
    def m(u):
        t = u[0] / radius
        return np.array([radius * J.cos(t) + offset[0], radius * J.sin(t) + offset[1]],
                        dtype=object if np.asarray(u).dtype == object else float)
    return m


def planar_circle(r: float = 0.5, l: int = 3) -> Immersion:
    """Unit-speed circle of radius r in the first coordinate plane of R^l."""
    dom = BlockDomain(1, 0, ((-1.0, 1.0),), lambda u: np.eye(1))

    def m(u):
        t = u[0] / r
        out = [r * J.cos(t), r * J.sin(t)] + [0.0] * (l - 2)
        return np.array(out, dtype=object if np.asarray(u).dtype == object else float)

    return Immersion(dom, AmbientSpace(0.0, l), m, True, f"circle_r{r:g}")


def circle_instance(r: float = 0.5) -> GalleryInstance:
    f = planar_circle(r)
    return GalleryInstance("planar_circle", f, "A", None, "circle of radius r in R^3; spherical hull is Q_(1/r^2)^1",
                           (9,), f.dom.bounds, {"r": r}, "curve")


def psi_chart_instance(c: float) -> GalleryInstance:
    """Psi itself in dimension 2 (identity factor charts): polar coordinates
    for c = 0 and the rotational chart of S^2 for c = 1."""
    if c == 0:
        rep = flat_rep(2, 0, [1])
        h1 = FactorMap(line_chart(1, ((0.5, 2.0),)), lambda y: np.array([y[0], 0.0 * y[0]]))
        fb = ((-1.2, 1.2),)
    elif c == 1:
        sp = AmbientSpace(1.0, 2)
        eye = np.eye(3)
        rep = WarpedRep(SphericalSub(sp, eye[2], eye[2], eye[[1]]))
        h1 = FactorMap(line_chart(1, ((-1.0, 1.0),)),
                       lambda y: np.array([J.sin(y[0]), 0.0 * y[0], J.cos(y[0])]))
        fb = ((-1.2, 1.2),)
    else:
        raise ValueError("c must be 0 or 1")
    inst = make_rotational(h1, rep, fb, f"psi_c{c:g}", counts=(9, 9))
    return inst


# ---------------------------------------------------------------- instances

def plane() -> GalleryInstance:
    sp = AmbientSpace(0.0, 3)
    eye = np.eye(3)
    rep = WarpedRep(SphericalSub(sp, np.zeros(3), np.zeros(3), eye[[1]]))
    h1 = FactorMap(line_chart(1, ((-1.0, 1.0),)), lambda y: np.array([y[0], 0.0 * y[0], 0.0 * y[0]]))
    h2 = FactorMap(line_chart(1, ((-1.0, 1.0),)), rep.sub.chart)
    return make_warped_product_immersion(rep, h1, h2, "plane", notes="R x_1 R as a plane in R^3")


def cylinder() -> GalleryInstance:
    rep = flat_rep(3, 1, [2])
    h1 = FactorMap(line_chart(1, ((-1.0, 1.0),)), lambda y: np.array([y[0], 1.0 + 0.0 * y[0], 0.0 * y[0]]))
    return make_rotational(h1, rep, ((-2.5, 2.5),), "cylinder", notes="R x_1 S^1, profile a line parallel to the axis")


def rotational_torus(a: float = 3.0, b: float = 1.0) -> GalleryInstance:
    rep = flat_rep(3, 1, [2])

    def prof(y):
        t = y[0] / b
        return np.array([b * J.sin(t), a + b * J.cos(t), 0.0 * y[0]])

    h1 = FactorMap(line_chart(1, ((-2.8 * b, 2.8 * b),)), prof)
    return make_rotational(h1, rep, ((-2.8, 2.8),), "rotational_torus",
                           notes="torus of revolution, profile circle", params={"a": a, "b": b})


def catenoid() -> GalleryInstance:
    rep = flat_rep(3, 1, [2])

    def prof(s):
        return np.array([J.arcsinh(s[0]), J.sqrt(1.0 + s[0] * s[0]), 0.0 * s[0]])

    h1 = FactorMap(line_chart(1, ((-1.5, 1.5),)), prof)
    return make_rotational(h1, rep, ((-2.8, 2.8),), "catenoid", notes="catenary profile in arclength")


def cone(r0: float = 0.6) -> GalleryInstance:
    """Cone t * gamma(s) over a small circle gamma of the unit sphere."""
    sp = AmbientSpace(0.0, 3)
    eye = np.eye(3)
    rep = WarpedRep(SphericalSub(sp, eye[2], eye[2], eye[[0, 1]]))
    h1 = FactorMap(line_chart(1, ((0.5, 2.0),)), lambda t: np.array([0.0 * t[0], 0.0 * t[0], t[0]]))

    def curve(s):
        th = s[0] / r0
        return rep.sub.chart(np.array([r0 * J.cos(th), r0 * J.sin(th)]))

    h2 = FactorMap(line_chart(1, ((-1.5, 1.5),)), curve)
    return make_warped_product_immersion(rep, h1, h2, "cone", notes="cone over a small circle; V lies in a Delta_zeta",
                                         params={"r0": r0})


def rotational_r4() -> GalleryInstance:
    """Rotational hypersurface of R^4 with a two-sphere fiber (n = 2)."""
    sp = AmbientSpace(0.0, 4)
    eye = np.eye(4)
    rep = WarpedRep(SphericalSub(sp, eye[3], eye[3], eye[[1, 2]]))

    def prof(y):
        return np.array([J.sin(y[0]), 0.0 * y[0], 0.0 * y[0], 3.0 + J.cos(y[0])])

    h1 = FactorMap(line_chart(1, ((-2.5, 2.5),)), prof)
    return make_rotational(h1, rep, ((-0.6, 0.6), (-0.6, 0.6)), "rotational_r4", counts=(5, 5, 5),
                           notes="rotational hypersurface with S^2 fibers")


def spherical_rotational(r: float = 0.8) -> GalleryInstance:
    """Rotational surface of S^3 whose profile is a small circle of S^2."""
    sp = AmbientSpace(1.0, 3)
    eye = np.eye(4)
    rep = WarpedRep(SphericalSub(sp, eye[2], eye[2], eye[[3]]))
    h = math.sqrt(1.0 - r * r)

    def prof(y):
        t = y[0] / r
        return np.array([r * J.sin(t), h + 0.0 * y[0], r * J.cos(t), 0.0 * y[0]])

    h1 = FactorMap(line_chart(1, ((-1.0, 1.0),)), prof)
    return make_rotational(h1, rep, ((-2.8, 2.8),), "spherical_rotational", params={"r": r},
                           notes="rotational surface in S^3")


def hyperbolic_torus(R0: float = 1.0, d: float = 2.0, r1: float = 1.0) -> GalleryInstance:
    """Rotational torus in H^3: a geodesic circle profile rotated around a geodesic."""
    sp = AmbientSpace(-1.0, 3)
    eye = np.eye(4)
    zbar = np.array([math.sinh(R0), 0.0, 0.0, math.cosh(R0)])
    a = np.array([1.0 / math.sinh(R0), 0.0, 0.0, 0.0])
    rep = WarpedRep(SphericalSub(sp, zbar, a, eye[[1]]))
    P = np.array([math.sinh(d), 0.0, 0.0, math.cosh(d)])
    u1 = np.array([math.cosh(d), 0.0, 0.0, math.sinh(d)])
    u2 = eye[2]
    s1 = math.sinh(r1)

    def prof(y):
        t = y[0] / s1
        return math.cosh(r1) * P + (s1 * J.cos(t)) * u1 + (s1 * J.sin(t)) * u2

    h1 = FactorMap(line_chart(1, ((-2.8 * s1, 2.8 * s1),)), prof)
    return make_rotational(h1, rep, ((-2.5, 2.5),), "hyperbolic_torus",
                           params={"R0": R0, "d": d, "r1": r1}, notes="rotational torus in H^3")


def _sphere_arc(r: float):
    return circle_map(r)


def clifford_torus() -> GalleryInstance:
    r = 1.0 / SQ2
    h = FactorMap(line_chart(1, ((-2.0, 2.0),)), _sphere_arc(r))
    return make_extrinsic_product(1.0, (r, r), h, h, "clifford_torus", notes="minimal Clifford torus in S^3")


def product_s1_s3(r1: float = 0.6, r2: float = 0.8) -> GalleryInstance:
    """S^1(r1) x (a flat torus inside S^3(r2)) in S^5."""
    k = r2 / SQ2
    h1 = FactorMap(line_chart(1, ((-1.5, 1.5),)), _sphere_arc(r1))

    def torus(u):
        a, b = u[0] / k, u[1] / k
        return np.array([k * J.cos(a), k * J.sin(a), k * J.cos(b), k * J.sin(b)],
                        dtype=object if np.asarray(u).dtype == object else float)

    h2 = FactorMap(line_chart(2, ((-0.8, 0.8), (-0.8, 0.8))), torus)
    return make_extrinsic_product(1.0, (r1, r2), h1, h2, "product_s1_s3", counts=(5, 5, 5),
                                  notes="alpha x g into S^1(r1) x S^3(r2)")


def sphere_product() -> GalleryInstance:
    """S^1 x S^2 in R^5 (non-flat Riemannian product, c = 0)."""
    sp = AmbientSpace(0.0, 3)
    eye = np.eye(3)
    s2 = SphericalSub(sp, eye[2], eye[2], eye[[0, 1]])
    L = line_chart(1, ((-1.5, 1.5),))
    M = FactorChart.from_sub(s2, ((-0.6, 0.6), (-0.6, 0.6)))
    dom = WarpedDomain(L, M, lambda y: 1.0)
    circ = circle_map(1.0)

    def fmap(z):
        return np.concatenate([np.asarray(circ(z[:1])), np.asarray(s2.chart(z[1:]))])

    f = Immersion(dom, AmbientSpace(0.0, 5), fmap, True, "sphere_product")
    return GalleryInstance("sphere_product", f, "A", None, "S^1 x S^2 in R^2 x R^3", (5, 5, 5), dom.bounds, {},
                           "extrinsic")


def _rotational_cone_base(lo=0.0, hi=1.0) -> GalleryInstance:
    """g(y, x) = (a(y), b(y) cos x, b(y) sin x), a = y/sqrt2, b = 1 + y/sqrt2."""
    rep = flat_rep(3, 1, [2])

    def prof(y):
        return np.array([y[0] / SQ2, 1.0 + y[0] / SQ2, 0.0 * y[0]])

    h1 = FactorMap(line_chart(1, ((lo, hi),)), prof)
    return make_rotational(h1, rep, ((0.25, 1.3),), "cone_base")


def bent_rotational() -> GalleryInstance:
    """Rotational surface composed with a cylinder over the unit circle."""
    g = _rotational_cone_base()
    target = AmbientSpace(0.0, 4)

    def H(u):
        return np.array([u[0], J.cos(u[1]), J.sin(u[1]), u[2]], dtype=object if np.asarray(u).dtype == object else float)

    return make_composition(g, H, target, "bent_rotational", "B1", counts=(7, 7),
                            notes="(a, cos(b cos x), sin(b cos x), b sin x)")


def bent_axis() -> GalleryInstance:
    """Negative control: the bending acts along the rotation axis."""
    g = _rotational_cone_base()
    target = AmbientSpace(0.0, 4)

    def H(u):
        return np.array([J.cos(u[0]), J.sin(u[0]), u[1], u[2]], dtype=object if np.asarray(u).dtype == object else float)

    return make_composition(g, H, target, "bent_axis", "A", counts=(7, 7),
                            notes="(cos a, sin a, b cos x, b sin x)")


def clifford_tilted() -> GalleryInstance:
    Q = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQ2
    inst = make_tilted_flat(Q, (1.0, 1.0), 0, p=1, name="clifford_tilted",
                            notes="flat torus with s = (p+q)/sqrt2, t = (p-q)/sqrt2")
    return _with_type(inst, "B2")


def clifford_tilted_ext() -> GalleryInstance:
    """i1 x g x i2: coordinates (u1, p | q, u2) with the tilted torus on (p, q)."""
    s = 1.0 / SQ2
    Q = np.array([[0, s, s, 0], [0, s, -s, 0], [1, 0, 0, 0], [0, 0, 0, 1]], dtype=float)
    inst = make_tilted_flat(Q, (1.0, 1.0), 2, p=2, name="clifford_tilted_ext", counts=(5, 5, 5, 5),
                            notes="tilted torus with a line factor on each side")
    return _with_type(inst, "B2")


def tilted_flat_c() -> GalleryInstance:
    Q = np.array([[1 / math.sqrt(3)] * 3,
                  [1 / SQ2, -1 / SQ2, 0.0],
                  [1 / math.sqrt(6), 1 / math.sqrt(6), -2 / math.sqrt(6)]])
    inst = make_tilted_flat(Q, (1.0, 1.0), 1, p=1, name="tilted_flat_c", counts=(5, 5, 5),
                            notes="flat T^2 x R tilted inside R^5")
    return _with_type(inst, "C")


def tilted_identity() -> GalleryInstance:
    return _with_type(make_tilted_flat(np.eye(2), (1.0, 1.0), 0, p=1, name="tilted_identity"), "A")


def _with_type(inst: GalleryInstance, t: str) -> GalleryInstance:
    from dataclasses import replace
    return replace(inst, expected_type=t)


def _spherical_chart_r3() -> GalleryInstance:
    """Identity chart (0, inf) x_t S^2 of R^3 (codimension 0)."""
    sp = AmbientSpace(0.0, 3)
    eye = np.eye(3)
    rep = WarpedRep(SphericalSub(sp, eye[2], eye[2], eye[[0, 1]]))
    h1 = FactorMap(line_chart(1, ((0.8, 1.6),)), lambda t: np.array([0.0 * t[0], 0.0 * t[0], t[0]]))
    return make_rotational(h1, rep, ((-0.5, 0.5), (-0.5, 0.5)), "spherical_chart_r3", counts=(5, 5, 5))


def hypersurface_random(seed: int = 7) -> GalleryInstance:
    """Codimension-one isometric immersion of (0, inf) x_t S^2.

    R^3 is rotated by a seeded random orthogonal matrix and then bent into R^4
    along a circle of random radius.
    """
    from scipy.stats import ortho_group

    rng = np.random.default_rng(seed)
    O = ortho_group.rvs(3, random_state=rng)
    R = float(rng.uniform(0.8, 3.0))
    g = _spherical_chart_r3()
    target = AmbientSpace(0.0, 4)

    def H(u):
        u = np.asarray(u)
        w = [sum(O[k, j] * u[j] for j in range(3)) for k in range(3)]
        out = [R * J.cos(w[0] / R), R * J.sin(w[0] / R), w[1], w[2]]
        return np.array(out, dtype=object if u.dtype == object else float)

    return make_composition(g, H, target, "hypersurface_random", "mixed", counts=(5, 5, 5),
                            params={"seed": int(seed), "R": R, "O": O.tolist()},
                            notes="bent spherical chart of R^3")


# ---------------------------------------------------------------- registry

REGISTRY: dict[str, Callable[[], GalleryInstance]] = {
    "plane": plane,
    "cylinder": cylinder,
    "rotational_torus": rotational_torus,
    "catenoid": catenoid,
    "cone": cone,
    "rotational_r4": rotational_r4,
    "spherical_rotational": spherical_rotational,
    "hyperbolic_torus": hyperbolic_torus,
    "clifford_torus": clifford_torus,
    "product_s1_s3": product_s1_s3,
    "sphere_product": sphere_product,
    "bent_rotational": bent_rotational,
    "bent_axis": bent_axis,
    "clifford_tilted": clifford_tilted,
    "clifford_tilted_ext": clifford_tilted_ext,
    "tilted_flat_c": tilted_flat_c,
    "tilted_identity": tilted_identity,
    "hypersurface_random": hypersurface_random,
    "planar_circle": circle_instance,
}

WARPED_NAMES = ("plane", "cylinder", "rotational_torus", "catenoid", "cone", "rotational_r4",
                "spherical_rotational", "hyperbolic_torus")
HYPERSURFACE_NAMES = ("cylinder", "rotational_torus", "catenoid", "cone", "rotational_r4",
                      "spherical_rotational", "hyperbolic_torus", "hypersurface_random")


def get(name: str, **kwargs) -> GalleryInstance:
    try:
        ctor = REGISTRY[name]
    except KeyError:
        raise ScenarioError(f"unknown gallery instance {name!r}") from None
    return ctor(**kwargs)


def names() -> list:
    return list(REGISTRY)


def manifest() -> list:
    return [get(n).manifest() for n in REGISTRY]
