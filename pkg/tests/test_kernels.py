import os
import subprocess
import sys

import numpy as np
import pytest

from warpform import _kernels as K


def batch(N=6, D=3, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(N, D, D))
    g = np.einsum("nij,nkj->nik", A, A) + D * np.eye(D)
    dg = rng.normal(size=(N, D, D, D))
    dg = dg + np.swapaxes(dg, 1, 2)
    d2g = rng.normal(size=(N, D, D, D, D))
    d2g = d2g + np.swapaxes(d2g, 1, 2)
    d2g = d2g + np.swapaxes(d2g, 3, 4)
    alpha = rng.normal(size=(N, 2, D, D))
    return g, dg, d2g, alpha + np.swapaxes(alpha, 2, 3)


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not importable")
def test_numba_and_numpy_paths_agree():
    g, dg, d2g, alpha = batch()
    gam, dgam = K.christoffel_np(g, dg, d2g)
    gam2, dgam2 = K.christoffel_nb(g, dg, d2g)
    assert np.allclose(gam, gam2, atol=1e-13) and np.allclose(dgam, dgam2, atol=1e-12)
    R = K.riemann_np(gam, dgam)
    assert np.allclose(R, K.riemann_nb(gam, dgam), atol=1e-12)
    assert np.allclose(K.lower_np(g, R), K.lower_nb(g, R), atol=1e-12)
    assert np.allclose(K.extrinsic_c_np(alpha), K.extrinsic_c_nb(alpha), atol=1e-12)


def test_riemann_symmetries():
    g, dg, d2g, alpha = batch(seed=3)
    gam, dgam = K.christoffel(g, dg, d2g)
    R = K.riemann(gam, dgam)
    # R[n, l, k, i, j] is antisymmetric in (i, j)
    assert np.allclose(R, -np.swapaxes(R, 3, 4))
    C = K.extrinsic_c(alpha)
    assert np.allclose(C, -np.swapaxes(C, 1, 2))
    assert np.allclose(C, -np.swapaxes(C, 3, 4))


def test_env_flag_selects_numpy():
    code = "import warpform._kernels as K; print(K.backend())"
    env = dict(os.environ, WARPFORM_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
