"""Space forms, their spherical submanifolds and warped product representations.

``Q_c^l`` is modelled as ``R^l`` when ``c == 0`` and otherwise as the quadric
``<z, z> = 1/c`` in ``R^(l+1)``; for ``c < 0`` the last coordinate carries the
minus sign and only the sheet with positive last coordinate is used.

All point-valued functions here are written against :mod:`warpform.jets`, so
they accept float arrays or object arrays of jets alike.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import jets as J
from .errors import DimensionError, DomainError, OffManifoldError
from .linalg import gram_schmidt

VECTOR_TOL = 1e-10


class Signature(str, Enum):
    EUCLIDEAN = "Euclidean"
    LORENTZIAN = "Lorentzian"


@dataclass(frozen=True)
class AmbientSpace:
    c: float
    l: int
    diag: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 1:
            raise DimensionError(f"dimension must be a positive integer, got {self.l}")
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "l", int(self.l))
        d = np.ones(self.model_dim)
        if self.c < 0:
            d[-1] = -1.0
        d.setflags(write=False)
        object.__setattr__(self, "diag", d)

    @property
    def model_dim(self) -> int:
        return self.l if self.c == 0 else self.l + 1

    @property
    def signature(self) -> Signature:
        return Signature.LORENTZIAN if self.c < 0 else Signature.EUCLIDEAN

    @property
    def gram(self) -> np.ndarray:
        return np.diag(self.diag)

    @property
    def tol(self) -> float:
        """On-manifold tolerance for quadric membership."""
        return 1e-9 * (1.0 if self.c == 0 else abs(1.0 / self.c))

    def inner(self, u, v):
        return inner(u, v, self)

    def residual(self, z) -> float:
        """|<z,z> - 1/c| (0 for the flat model)."""
        if self.c == 0:
            return 0.0
        z = np.asarray(z, dtype=float)
        return abs(float(z @ (self.diag * z)) - 1.0 / self.c)

    def check_point(self, z) -> np.ndarray:
        z = _as_vec(z, self)
        zf = np.asarray([float(x) for x in z])
        if self.c != 0:
            if self.residual(zf) > self.tol:
                raise OffManifoldError(
                    f"point off the quadric: |<z,z>-1/c| = {self.residual(zf):.3e}")
            if self.c < 0 and zf[-1] <= 0:
                raise OffManifoldError("point on the lower sheet of the hyperboloid")
        return z

    def tangent_candidates(self, z) -> np.ndarray:
        """Projections of the coordinate vectors onto T_z Q (rows)."""
        eye = np.eye(self.model_dim)
        return np.array([project_tangent(z, e, self, check=False) for e in eye])


def _as_vec(u, space: AmbientSpace):
    u = np.asarray(u)
    if u.dtype != object:
        u = u.astype(float)
    if u.shape != (space.model_dim,):
        raise DimensionError(f"expected a vector with {space.model_dim} components, got shape {u.shape}")
    return u


def inner(u, v, space: AmbientSpace):
    """Ambient inner product; Lorentzian sign on the last slot when ``c < 0``."""
    u = _as_vec(u, space)
    v = _as_vec(v, space)
    if u.dtype == object or v.dtype == object:
        total = 0.0
        for a, b, s in zip(u, v, space.diag):
            total = total + (a * b if s > 0 else -(a * b))
        return total
    return float(np.dot(u * space.diag, v))


def project_tangent(z, u, space: AmbientSpace, check: bool = True):
    """Orthogonal projection of ``u`` onto T_z Q_c^l."""
    if space.c == 0:
        return _as_vec(u, space)
    if check:
        space.check_point(z)
    z = _as_vec(z, space)
    u = _as_vec(u, space)
    return u - (space.c * inner(u, z, space)) * z


# ---------------------------------------------------------------- spherical submanifolds

@dataclass(frozen=True)
class SphericalSub:
    """Complete spherical (or totally geodesic) submanifold Q_ctilde^m through zbar.

    ``a`` is the negative of the mean curvature vector at ``zbar`` lifted to
    the model: for ``c != 0`` it is ``c*zbar + H`` with ``H`` tangent, so
    ``<zbar, a> = 1`` and ``<a, a> = ctilde``.
    """

    space: AmbientSpace
    zbar: np.ndarray
    a: np.ndarray
    tangent_basis: np.ndarray
    ctilde: float = field(init=False)

    def __post_init__(self):
        sp = self.space
        zbar = np.array(sp.check_point(np.asarray(self.zbar, dtype=float)), dtype=float)
        a = np.array(_as_vec(np.asarray(self.a, dtype=float), sp), dtype=float)
        T = np.atleast_2d(np.asarray(self.tangent_basis, dtype=float))
        if T.shape[1] != sp.model_dim:
            raise DimensionError("tangent basis has the wrong ambient dimension")
        gram = T @ sp.gram @ T.T
        if np.max(np.abs(gram - np.eye(len(T)))) > VECTOR_TOL:
            raise DimensionError("tangent basis is not orthonormal")
        if len(T) and np.max(np.abs(T @ sp.gram @ a)) > VECTOR_TOL:
            raise DimensionError("a is not orthogonal to the tangent basis")
        if sp.c != 0:
            if np.max(np.abs(T @ sp.gram @ zbar)) > VECTOR_TOL:
                raise DimensionError("tangent basis is not tangent to Q_c at zbar")
            if abs(inner(zbar, a, sp) - 1.0) > VECTOR_TOL:
                raise DimensionError("<zbar, a> must equal 1 when c != 0")
        for arr in (zbar, a, T):
            arr.setflags(write=False)
        object.__setattr__(self, "zbar", zbar)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "tangent_basis", T)
        object.__setattr__(self, "ctilde", float(inner(a, a, sp)))

    @classmethod
    def from_curvature_vector(cls, space: AmbientSpace, zbar, tangent_basis, H=None):
        """Build from the tangent plane at ``zbar`` and the mean curvature vector ``-H``.

        ``H`` is a tangent vector of Q_c at ``zbar`` normal to the plane (``None``
        means totally geodesic).
        """
        zbar = np.asarray(zbar, dtype=float)
        H = np.zeros(space.model_dim) if H is None else np.asarray(H, dtype=float)
        a = H + space.c * zbar
        return cls(space, zbar, a, tangent_basis)

    @property
    def m(self) -> int:
        return self.tangent_basis.shape[0]

    @property
    def kind(self) -> str:
        ct = self.ctilde
        if abs(ct) <= VECTOR_TOL:
            return "flat" if self.space.c == 0 else "horosphere"
        return "sphere" if ct > 0 else "hyperbolic"

    # sphere / hyperbolic data: centre o, radius R and unit direction e from o to zbar
    @property
    def centre(self) -> np.ndarray:
        return self.zbar - self.a / self.ctilde

    @property
    def radius(self) -> float:
        return math.sqrt(abs(1.0 / self.ctilde))

    @property
    def e_hat(self) -> np.ndarray:
        return self.a * math.sqrt(abs(self.ctilde)) / self.ctilde

    def chart(self, u):
        """Point of the submanifold at chart coordinates ``u`` (length m).

        m = 1 uses arclength from zbar along the first tangent vector; m >= 2
        uses graph coordinates over the tangent plane at zbar.
        """
        u = np.asarray(u)
        if u.shape != (self.m,):
            raise DimensionError(f"chart needs {self.m} coordinates")
        T = self.tangent_basis
        kind = self.kind
        lin = _lincomb(u, T)
        if kind == "flat":
            return self.zbar + lin
        if kind == "horosphere":
            return self.zbar + lin - (0.5 * _sumsq(u)) * self.a
        R = self.radius
        o, e = self.centre, self.e_hat
        if self.m == 1:
            t = u[0] / R
            if kind == "sphere":
                return o + (R * J.cos(t)) * e + (R * J.sin(t)) * T[0]
            return o + (R * J.cosh(t)) * e + (R * J.sinh(t)) * T[0]
        r2 = _sumsq(u)
        if kind == "sphere":
            if float(r2) >= R * R:
                raise DomainError("graph chart of the sphere used outside its hemisphere")
            return o + J.sqrt(R * R - r2) * e + lin
        return o + J.sqrt(R * R + r2) * e + lin

    def metric(self, u):
        """Intrinsic metric matrix of the chart at ``u`` (jet friendly)."""
        u = np.asarray(u)
        m = self.m
        eye = np.eye(m)
        kind = self.kind
        if kind in ("flat", "horosphere") or m == 1:
            return eye.astype(object) if u.dtype == object else eye
        R = self.radius
        r2 = _sumsq(u)
        den = (R * R - r2) if kind == "sphere" else (R * R + r2)
        sgn = 1.0 if kind == "sphere" else -1.0
        out = np.empty((m, m), dtype=object if u.dtype == object else float)
        for i in range(m):
            for j in range(m):
                out[i, j] = eye[i, j] + sgn * u[i] * u[j] / den
        return out

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        sp = self.space
        if sp.c != 0 and sp.residual(x) > sp.tol:
            return False
        d = x - self.zbar
        basis = gram_schmidt(np.vstack([self.tangent_basis, self.a]) if np.any(self.a) else self.tangent_basis)
        resid = d - basis.T @ (basis @ d)
        if np.linalg.norm(resid) > tol * max(1.0, np.linalg.norm(d)):
            return False
        if self.kind in ("sphere", "hyperbolic"):
            off = x - self.centre
            return abs(inner(off, off, sp) - 1.0 / self.ctilde) < tol * max(1.0, abs(1.0 / self.ctilde))
        return True

    def tangent_basis_at(self, x) -> np.ndarray:
        """Orthonormal tangent frame of the submanifold at the point ``x``."""
        x = np.asarray(x, dtype=float)
        T = self.tangent_basis
        sp = self.space
        kind = self.kind
        if kind == "flat":
            return T.copy()
        if kind == "horosphere":
            d = x - self.zbar
            return gram_schmidt(np.array([t - inner(d, t, sp) * self.a for t in T]), sp.gram)
        off = x - self.centre
        span = np.vstack([T, self.e_hat])
        proj = np.array([v - inner(v, off, sp) * self.ctilde * off for v in span])
        return gram_schmidt(proj, sp.gram)[: self.m]


def _lincomb(u, T):
    out = np.zeros(T.shape[1], dtype=object if np.asarray(u).dtype == object else float)
    for ui, t in zip(u, T):
        out = out + ui * t
    return out


def _sumsq(u):
    s = 0.0
    for x in u:
        s = s + x * x
    return s


# ---------------------------------------------------------------- warped product representation

@dataclass(frozen=True)
class WarpedRep:
    """Warped product representation of Q_c^l determined by (zbar, sub)."""

    sub: SphericalSub

    @property
    def total(self) -> AmbientSpace:
        return self.sub.space

    def sigma(self, z):
        return sigma(self, z)

    def psi(self, y, x):
        return psi(self, y, x)

    def in_leaf(self, y, tol: float = 1e-9) -> bool:
        """Whether ``y`` lies in the complementary totally geodesic leaf V through zbar."""
        y = np.asarray(y, dtype=float)
        sp = self.total
        ref = y - self.sub.zbar if sp.c == 0 else y
        return bool(np.all(np.abs(self.sub.tangent_basis @ sp.gram @ ref) < tol * max(1.0, np.linalg.norm(y))))


def sigma(rep: WarpedRep, z):
    """Warping function of the representation: a height function along ``a``."""
    sp = rep.total
    z = _as_vec(z, sp)
    if sp.c != 0:
        return inner(z, rep.sub.a, sp)
    return 1.0 + inner(z - rep.sub.zbar, rep.sub.a, sp)


def psi(rep: WarpedRep, y, x):
    """Psi(y, x) = y + sigma(y) (x - zbar)."""
    s = sigma(rep, y)
    if float(s) <= 0:
        raise DomainError(f"sigma(y) = {float(s):.3e} is not positive")
    y = _as_vec(y, rep.total)
    x = _as_vec(x, rep.total)
    return y + s * (x - rep.sub.zbar)


def extrinsic_product_embed(c: float, r1: float, r2: float, u, v, tol: float = 1e-12):
    """Concatenate points of spheres S(r1) and S(r2) with r1^2 + r2^2 = 1/c."""
    if c <= 0:
        raise DomainError("extrinsic products are built for c > 0 only")
    if r1 <= 0 or r2 <= 0 or abs(r1 * r1 + r2 * r2 - 1.0 / c) > 1e-12 * max(1.0, 1.0 / c):
        raise DomainError("radii must satisfy r1^2 + r2^2 = 1/c")
    u = np.asarray(u)
    v = np.asarray(v)
    if u.dtype != object:
        if abs(float(np.dot(u, u)) - r1 * r1) > 1e-9 * max(1.0, r1 * r1):
            raise DomainError("first factor point is not on the sphere of radius r1")
        if abs(float(np.dot(v, v)) - r2 * r2) > 1e-9 * max(1.0, r2 * r2):
            raise DomainError("second factor point is not on the sphere of radius r2")
    return np.concatenate([u, v])
