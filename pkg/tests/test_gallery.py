import math

import numpy as np
import pytest

from warpform import gallery as G
from warpform import jets as J
from warpform.ambient import AmbientSpace
from warpform.errors import DomainError, ScenarioError
from warpform.immersion import Immersion, isometry_residual, principal_normals, sample, second_ff


def test_manifest_fields():
    man = G.manifest()
    assert [m["name"] for m in man] == G.names()
    for m in man:
        assert {"name", "expected_type", "c", "p", "n", "codim"} <= set(m)
    assert set(G.WARPED_NAMES) <= set(G.names())


def test_unknown_instance():
    with pytest.raises(ScenarioError):
        G.get("no_such_thing")


@pytest.mark.parametrize("name", G.names())
def test_every_instance_is_isometric(name):
    inst = G.get(name)
    for z in inst.grid().points()[::5]:
        assert isometry_residual(inst.f, z) < 1e-10


def test_tilted_flat_validation():
    with pytest.raises(DomainError):
        G.make_tilted_flat([[1.0, 0.1], [0.0, 1.0]], (1.0, 1.0), 0)
    with pytest.raises(DomainError):
        G.make_tilted_flat(np.eye(2), (1.0, -1.0), 0)
    with pytest.raises(DomainError):
        G.make_tilted_flat(np.eye(3), (1.0, 1.0), 0)


def test_extrinsic_radius_constraint():
    h = G.FactorMap(G.line_chart(1, ((-1.0, 1.0),)), G.circle_map(0.5))
    with pytest.raises(DomainError):
        G.make_extrinsic_product(1.0, (0.5, 0.5), h, h)


def test_nonpositive_sigma_rejected():
    rep = G.flat_rep(3, 1, [2])
    prof = G.FactorMap(G.line_chart(1, ((-1.0, 1.0),)), lambda y: np.array([y[0], y[0], 0.0 * y[0]]))
    with pytest.raises(DomainError):
        G.make_rotational(prof, rep, ((-1.0, 1.0),))


def test_composition_target_checked():
    with pytest.raises(DomainError):
        G.make_composition(G.get("cylinder"), lambda u: u, AmbientSpace(0.0, 5))


def test_psi_itself_is_isometric():
    for c in (0, 1):
        inst = G.psi_chart_instance(c)
        assert inst.f.codim == 0
        assert max(isometry_residual(inst.f, z) for z in inst.grid().points()) < 1e-8


@pytest.mark.parametrize("name", ["rotational_torus", "cone", "catenoid", "spherical_rotational"])
def test_vertical_lies_in_principal_normal_space(name):
    inst = G.get(name)
    p = inst.f.dom.p
    V = np.eye(inst.f.dim)[p:]
    for z in inst.grid().points()[::4]:
        s = sample(inst.f, z)
        assert principal_normals(s, second_ff(s), [V])[0].found


def test_horizontal_nullity_breaks_when_factors_couple():
    cyl = G.get("cylinder")
    s = sample(cyl.f, [0.2, 0.3])
    assert principal_normals(s, second_ff(s), [[[1.0, 0.0]]])[0].is_nullity
    # a twist coupling the profile and the fibre removes the ruling from the nullity
    twisted = Immersion(cyl.f.dom, cyl.f.space,
                        lambda z: np.array([z[0], J.cos(z[1] + 0.3 * z[0] * z[0]), J.sin(z[1] + 0.3 * z[0] * z[0])],
                                           dtype=object if np.asarray(z).dtype == object else float), False)
    s = sample(twisted, [0.2, 0.3])
    assert not principal_normals(s, second_ff(s), [[[1.0, 0.0]]])[0].is_nullity


def test_grad_term_matters():
    rep = G.flat_rep(3, 1, [2])
    prof = G.FactorMap(G.line_chart(1, ((-2.8, 2.8),)),
                       lambda y: np.array([J.sin(y[0]), 3.0 + J.cos(y[0]), 0.0 * y[0]]))
    with_g = G.make_rotational(prof, rep, ((-2.8, 2.8),))
    without = G.make_rotational(prof, rep, ((-2.8, 2.8),), include_grad_term=False)
    z = np.array([0.4, 0.3])
    s = sample(with_g.f, z)
    amb = np.einsum("qij,qa->ija", second_ff(s).alpha, s.normal_frame)
    assert np.max(np.abs(amb - with_g.predicted_alpha(z))) < 1e-9
    assert np.max(np.abs(amb - without.predicted_alpha(z))) > 1e-2


def test_hypersurface_random_is_seeded():
    a = G.hypersurface_random(seed=3)
    b = G.hypersurface_random(seed=3)
    z = a.grid().points()[4]
    assert np.allclose(a.f.value(z), b.f.value(z))
    assert not np.allclose(a.f.value(z), G.hypersurface_random(seed=4).f.value(z))


def _flat_plane_rep():
    from warpform.ambient import SphericalSub, WarpedRep
    sp = AmbientSpace(0.0, 3)
    return WarpedRep(SphericalSub(sp, np.zeros(3), np.zeros(3), np.eye(3)[[0, 1]]))


@pytest.mark.parametrize("bent,in_nullity", [(False, True), (True, False)])
def test_vertical_nullity_iff_h2_geodesic(bent, in_nullity):
    rep = _flat_plane_rep()
    h1 = G.FactorMap(G.line_chart(1, ((-1.0, 1.0),)), lambda y: np.array([0.0 * y[0], 0.0 * y[0], y[0]]))
    if bent:
        m = lambda u: np.array([0.7 * J.cos(u[0] / 0.7), 0.7 * J.sin(u[0] / 0.7), 0.0 * u[0]])
    else:
        m = lambda u: np.array([u[0], 0.3 * u[0], 0.0 * u[0]]) / math.sqrt(1.09)
    h2 = G.FactorMap(G.line_chart(1, ((-1.0, 1.0),)), m)
    inst = G.make_warped_product_immersion(rep, h1, h2, "h2_test")
    for z in inst.grid().points()[::6]:
        s = sample(inst.f, z)
        assert principal_normals(s, second_ff(s), [[[0.0, 1.0]]])[0].is_nullity == in_nullity
