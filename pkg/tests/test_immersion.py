import math

import numpy as np
import pytest

from warpform import gallery as G
from warpform import jets as J
from warpform.ambient import AmbientSpace
from warpform.errors import DegenerateImmersionError, NonNormalError
from warpform.immersion import (Immersion, codazzi_residual, curvature_like_C, extrinsic_C_tensor, frame_residuals,
                                gauss_residual, isometry_residual, principal_normals, relative_nullity, sample,
                                second_ff, shape_operator, spherical_hull)
from warpform.warped import BlockDomain, FactorChart, Grid, WarpedDomain


def _arr(*xs):
    return np.array(xs, dtype=object if any(isinstance(x, J.Jet) for x in xs) else float)


def sphere(r=2.0, scale=1.0):
    """Round sphere of radius r in latitude/longitude coordinates (scale != 1 mis-sizes the map)."""
    L = FactorChart(1, ((-1.0, 1.0),), lambda u: np.eye(1) * r * r)
    M = FactorChart(1, ((-1.5, 1.5),), lambda u: np.eye(1))
    dom = WarpedDomain(L, M, lambda y: r * J.cos(y[0]))
    R = r * scale

    def m(z):
        t, p = z[0], z[1]
        return _arr(R * J.cos(t) * J.cos(p), R * J.cos(t) * J.sin(p), R * J.sin(t))

    return Immersion(dom, AmbientSpace(0.0, 3), m, True, "sphere")


def test_plane_has_zero_alpha_and_full_nullity():
    f = G.get("plane").f
    s = sample(f, [0.2, 0.3])
    a = second_ff(s)
    assert np.allclose(a.alpha, 0.0)
    assert relative_nullity(s, a).dim == 2
    assert np.allclose(shape_operator(s, a, s.normal_frame[0]), 0.0)
    assert abs(np.linalg.norm(s.normal_frame[0]) - 1) < 1e-12
    assert gauss_residual(f, [0.2, 0.3]) < 1e-12


def test_sphere_umbilic_inward():
    f = sphere(2.0)
    z = np.array([0.3, 0.4])
    s = sample(f, z)
    a = second_ff(s)
    outward = s.value / np.linalg.norm(s.value)
    A = shape_operator(s, a, outward)
    assert np.allclose(A, -0.5 * np.eye(2), atol=1e-12)
    assert relative_nullity(s, a).dim == 0
    X, Y = s.frame_coeffs
    assert curvature_like_C(s, a, X, Y, Y, X) == pytest.approx(0.25)
    assert codazzi_residual(f, z) < 1e-6


def test_shape_operator_rejects_tangent_vector():
    f = sphere()
    s = sample(f, [0.1, 0.1])
    with pytest.raises(NonNormalError):
        shape_operator(s, second_ff(s), s.tangent_frame[0])


def test_clifford_torus_eigenvalues_and_frame():
    f = G.get("clifford_torus").f
    s = sample(f, [0.2, -0.3])
    assert s.k == 1
    assert abs(s.normal_frame[0] @ s.value) < 1e-10
    ev = np.sort(np.linalg.eigvalsh(shape_operator(s, second_ff(s), s.normal_frame[0])))
    assert np.allclose(np.abs(ev), [1.0, 1.0]) and ev[0] * ev[1] < 0
    assert max(frame_residuals(s).values()) < 1e-10


def test_cylinder_nullity_is_ruling():
    f = G.get("cylinder").f
    s = sample(f, [0.1, 0.5])
    a = second_ff(s)
    nul = relative_nullity(s, a)
    assert nul.dim == 1
    # ruling = the horizontal line direction of the profile
    assert abs(nul.basis[0][1]) < 1e-10
    assert np.allclose(a(np.eye(2)[0], np.eye(2)[1]), 0.0, atol=1e-12)


def test_principal_normals():
    torus = G.get("rotational_torus").f
    s = sample(torus, [0.3, 0.7])
    pn = principal_normals(s, second_ff(s), [[[0.0, 1.0]]])[0]
    assert pn.found and not pn.is_nullity and pn.residual < 1e-8
    cyl = G.get("cylinder").f
    s = sample(cyl, [0.1, 0.5])
    # the cylinder's horizontal direction lies in the relative nullity
    pn = principal_normals(s, second_ff(s), [[[1.0, 0.0]]])[0]
    assert pn.found and pn.is_nullity
    # negative control: a graph with distinct principal curvatures and an oblique line field
    dom = BlockDomain(1, 1, ((-1.0, 1.0), (-1.0, 1.0)),
                      lambda z: np.eye(2))
    graph = Immersion(dom, AmbientSpace(0.0, 3),
                      lambda z: _arr(z[0], z[1], z[0] * z[0] + 0.3 * z[1] * z[1]), False, "graph")
    s = sample(graph, [0.1, 0.2])
    assert not principal_normals(s, second_ff(s), [[[1.0, 2.0]]])[0].found


def test_C_tensor_symmetries():
    for name in ("rotational_torus", "clifford_tilted_ext", "bent_rotational", "product_s1_s3"):
        inst = G.get(name)
        z = inst.grid().points()[3]
        C = extrinsic_C_tensor(second_ff(sample(inst.f, z)))
        assert np.allclose(C, -np.swapaxes(C, 0, 1), atol=1e-10)
        assert np.allclose(C, -np.swapaxes(C, 2, 3), atol=1e-10)
        assert np.allclose(C, np.einsum("ijkl->klij", C), atol=1e-10)
        bianchi = C + np.einsum("ijkl->jkil", C) + np.einsum("ijkl->kijl", C)
        assert np.max(np.abs(bianchi)) < 1e-10


def test_alpha_symmetry_everywhere():
    for name in G.names():
        inst = G.get(name)
        s = sample(inst.f, inst.grid().points()[0])
        assert second_ff(s).symmetry_residual < 1e-10


def test_gauss_negative_control():
    f = sphere(2.0, scale=1.01)
    assert gauss_residual(f, [0.2, 0.3]) > 1e-4
    assert isometry_residual(f, [0.2, 0.3]) > 1e-3
    assert gauss_residual(sphere(2.0), [0.2, 0.3]) < 1e-12


def test_codazzi_flat_torus_and_plane():
    for name in ("plane", "tilted_identity", "clifford_tilted"):
        inst = G.get(name)
        assert codazzi_residual(inst.f, inst.grid().points()[12]) < 1e-8


def test_degenerate_map_rejected():
    dom = BlockDomain(1, 1, ((-1.0, 1.0), (-1.0, 1.0)), lambda z: np.eye(2))
    f = Immersion(dom, AmbientSpace(0.0, 3), lambda z: _arr(z[0] + z[1], z[0] + z[1], 0 * z[0]), False)
    with pytest.raises(DegenerateImmersionError):
        sample(f, [0.0, 0.0])


def test_spherical_hull_cases():
    res = spherical_hull(G.planar_circle(0.5), Grid(((-1.0, 1.0),), (9,)))
    assert res.m == 1 and res.ctilde == pytest.approx(4.0, abs=1e-6)
    res = spherical_hull(G.planar_circle(2.0), Grid(((-1.0, 1.0),), (9,)))
    assert res.ctilde == pytest.approx(0.25, abs=1e-6)
    dom = BlockDomain(1, 0, ((-1.0, 1.0),), lambda u: np.eye(1))
    line = Immersion(dom, AmbientSpace(0.0, 3), lambda u: _arr(u[0], 0 * u[0], 0 * u[0]), True)
    res = spherical_hull(line, Grid(((-1.0, 1.0),), (9,)))
    assert res.m == 1 and res.ctilde == pytest.approx(0.0, abs=1e-9)
