"""Batched curvature kernels.

Every kernel exists twice: a vectorised numpy version and an explicit-loop
version compiled with numba.  ``WARPFORM_NUMBA=0`` in the environment forces
the numpy path; otherwise numba is used when it imports.

Array conventions (leading axis ``N`` is the batch):

* ``g[N,i,j]`` metric, ``dg[N,i,j,k] = d_k g_ij``, ``d2g[N,i,j,k,m] = d_k d_m g_ij``
* ``gam[N,l,i,j] = Gamma^l_ij``, ``dgam[N,l,i,j,k] = d_k Gamma^l_ij``
* ``R[N,l,k,i,j]``: ``R(d_i, d_j) d_k = R[l,k,i,j] d_l`` with
  ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _flag_on() -> bool:
    return os.environ.get("WARPFORM_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = HAVE_NUMBA and _flag_on()


# ---------------------------------------------------------------- numpy path

def christoffel_np(g, dg, d2g):
    ginv = np.linalg.inv(g)
    # first kind: G[m,i,j] = 1/2 (d_i g_mj + d_j g_mi - d_m g_ij)
    first = 0.5 * (np.einsum("nmji->nmij", dg) + np.einsum("nmij->nmij", dg)
                   - np.einsum("nijm->nmij", dg))
    gam = np.einsum("nlm,nmij->nlij", ginv, first)
    dfirst = 0.5 * (np.einsum("nmjik->nmijk", d2g) + np.einsum("nmijk->nmijk", d2g)
                    - np.einsum("nijmk->nmijk", d2g))
    dginv = -np.einsum("nla,nabk,nbm->nlmk", ginv, dg, ginv)
    dgam = np.einsum("nlmk,nmij->nlijk", dginv, first) + np.einsum("nlm,nmijk->nlijk", ginv, dfirst)
    return gam, dgam


def riemann_np(gam, dgam):
    # R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    t1 = np.einsum("nljki->nlkij", dgam)
    t3 = np.einsum("nlim,nmjk->nlkij", gam, gam)
    return t1 - np.swapaxes(t1, 3, 4) + t3 - np.swapaxes(t3, 3, 4)


def lower_np(g, R):
    return np.einsum("nql,nlkij->nqkij", g, R)


def extrinsic_c_np(alpha):
    """C[i,j,k,l] = <a(i,l), a(j,k)> - <a(i,k), a(j,l)> for alpha[N,K,D,D]."""
    t = np.einsum("nqil,nqjk->nijkl", alpha, alpha)
    return t - np.swapaxes(t, 3, 4)


# ---------------------------------------------------------------- numba path

@njit(cache=True)
def _inv_small(a):
    return np.linalg.inv(a)


@njit(cache=True)
def christoffel_nb(g, dg, d2g):
    N, D = g.shape[0], g.shape[1]
    gam = np.zeros((N, D, D, D))
    dgam = np.zeros((N, D, D, D, D))
    first = np.empty((D, D, D))
    dfirst = np.empty((D, D, D, D))
    dginv = np.empty((D, D, D))
    for n in range(N):
        ginv = _inv_small(g[n].copy())
        for m in range(D):
            for i in range(D):
                for j in range(D):
                    first[m, i, j] = 0.5 * (dg[n, m, j, i] + dg[n, m, i, j] - dg[n, i, j, m])
                    for k in range(D):
                        dfirst[m, i, j, k] = 0.5 * (d2g[n, m, j, i, k] + d2g[n, m, i, j, k]
                                                    - d2g[n, i, j, m, k])
        for l in range(D):
            for m in range(D):
                for k in range(D):
                    s = 0.0
                    for a in range(D):
                        for b in range(D):
                            s += ginv[l, a] * dg[n, a, b, k] * ginv[b, m]
                    dginv[l, m, k] = -s
        for l in range(D):
            for i in range(D):
                for j in range(D):
                    s = 0.0
                    for m in range(D):
                        s += ginv[l, m] * first[m, i, j]
                    gam[n, l, i, j] = s
                    for k in range(D):
                        s = 0.0
                        for m in range(D):
                            s += dginv[l, m, k] * first[m, i, j] + ginv[l, m] * dfirst[m, i, j, k]
                        dgam[n, l, i, j, k] = s
    return gam, dgam


@njit(cache=True)
def riemann_nb(gam, dgam):
    N, D = gam.shape[0], gam.shape[1]
    R = np.zeros((N, D, D, D, D))
    for n in range(N):
        for l in range(D):
            for k in range(D):
                for i in range(D):
                    for j in range(D):
                        s = dgam[n, l, j, k, i] - dgam[n, l, i, k, j]
                        for m in range(D):
                            s += gam[n, l, i, m] * gam[n, m, j, k] - gam[n, l, j, m] * gam[n, m, i, k]
                        R[n, l, k, i, j] = s
    return R


@njit(cache=True)
def lower_nb(g, R):
    N, D = g.shape[0], g.shape[1]
    out = np.zeros((N, D, D, D, D))
    for n in range(N):
        for q in range(D):
            for k in range(D):
                for i in range(D):
                    for j in range(D):
                        s = 0.0
                        for l in range(D):
                            s += g[n, q, l] * R[n, l, k, i, j]
                        out[n, q, k, i, j] = s
    return out


@njit(cache=True)
def extrinsic_c_nb(alpha):
    N, K, D = alpha.shape[0], alpha.shape[1], alpha.shape[2]
    C = np.zeros((N, D, D, D, D))
    for n in range(N):
        for i in range(D):
            for j in range(D):
                for k in range(D):
                    for l in range(D):
                        s = 0.0
                        for q in range(K):
                            s += alpha[n, q, i, l] * alpha[n, q, j, k] - alpha[n, q, i, k] * alpha[n, q, j, l]
                        C[n, i, j, k, l] = s
    return C


# ---------------------------------------------------------------- dispatch

def _pick(np_fn, nb_fn):
    def fn(*arrays):
        arrays = tuple(np.ascontiguousarray(a, dtype=np.float64) for a in arrays)
        if USE_NUMBA:
            return nb_fn(*arrays)
        return np_fn(*arrays)

    fn.__name__ = np_fn.__name__[:-3]
    fn.__doc__ = np_fn.__doc__
    return fn


christoffel = _pick(christoffel_np, christoffel_nb)
riemann = _pick(riemann_np, riemann_nb)
lower = _pick(lower_np, lower_nb)
extrinsic_c = _pick(extrinsic_c_np, extrinsic_c_nb)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
