import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from warpform import gallery as G
from warpform.classify import (Tag, alpha_hv, b1_structure_check, b2_structure_check, classify_grid, classify_point,
                               classify_sample, extract_b_data, rebase, type_c_consistency, verify_pointwise_relations)
from warpform.errors import TypeInconsistencyError
from warpform.immersion import sample, second_ff
from warpform.warped import eta_data, hv_split


def parts(name, z=None):
    inst = G.get(name)
    z = inst.grid().points()[7] if z is None else np.asarray(z, float)
    s = sample(inst.f, z)
    return inst, s, second_ff(s), hv_split(inst.f.dom, z)


@pytest.mark.parametrize("name,dim", [("cylinder", 0), ("rotational_torus", 0), ("clifford_tilted", 1),
                                      ("tilted_flat_c", 2)])
def test_alpha_hv_span(name, dim):
    _, s, a, split = parts(name)
    assert alpha_hv(s, a, split).span_dim == dim


def test_examples():
    assert classify_point(G.get("cylinder").f, [0.1, 0.2]).tag == Tag.A
    pt = classify_point(G.get("bent_rotational").f, [0.5, math.pi / 4])
    assert pt.tag == Tag.B1 and abs(pt.bdata.det) < 1e-8
    pt = classify_point(G.get("clifford_tilted").f, [0.1, 0.2])
    assert pt.tag == Tag.B2 and pt.bdata.det == pytest.approx(-0.5, abs=1e-12)


def test_clifford_b_data():
    _, s, a, split = parts("clifford_tilted")
    b = extract_b_data(s, a, split)
    assert abs(b.beta) < 1e-12 and abs(b.gamma) < 1e-12
    assert abs(b.lam) == pytest.approx(1 / math.sqrt(2))
    assert abs(b.beta_t0) == pytest.approx(1 / math.sqrt(2)) and abs(b.gamma_t0) == pytest.approx(1 / math.sqrt(2))
    assert abs(b.delta_t0) < 1e-12
    assert set(b.as_dict()) >= {"beta", "lambda", "gamma", "beta_t0", "gamma_t0", "delta_t0", "det"}


def test_extractor_rejects_type_a():
    _, s, a, split = parts("rotational_torus")
    with pytest.raises(TypeInconsistencyError):
        extract_b_data(s, a, split)


def test_hypersurface_extractor_gives_b1_only():
    _, s, a, split = parts("bent_axis")
    assert classify_sample(s, split).tag in (Tag.A, Tag.B1)


def test_relations_clifford():
    inst, s, a, split = parts("clifford_tilted")
    b = extract_b_data(s, a, split)
    rel = verify_pointwise_relations(s, a, b, eta_data(inst.f.dom, s.z[:1]), True, split)
    assert rel and max(rel.values()) < 1e-8
    assert "delta_plus_c" in rel and "B2_beta_tilde" in rel


def test_relations_b1_and_a():
    inst, s, a, split = parts("bent_rotational")
    b = extract_b_data(s, a, split)
    rel = verify_pointwise_relations(s, a, b, eta_data(inst.f.dom, s.z[:1]), False, split)
    assert max(rel.values()) < 1e-8 and "B2_beta_tilde" not in rel
    assert verify_pointwise_relations(s, a, None) == {}


def test_structure_checks_vacuous_and_real():
    rot = G.get("rotational_torus")
    assert b1_structure_check(rot.f, rot.grid()).points_checked == 0
    bent = G.get("bent_rotational")
    assert b2_structure_check(bent.f, bent.grid()).passed
    rep = b2_structure_check(G.get("clifford_tilted_ext").f, G.get("clifford_tilted_ext").grid())
    assert rep.passed and rep.points_checked > 0
    tc = G.get("tilted_flat_c")
    assert type_c_consistency(tc.f, tc.grid()).passed


def test_classify_grid_length():
    inst = G.get("clifford_tilted")
    out = classify_grid(inst.f, inst.grid())
    assert len(out) == inst.grid().size and {p.tag for p in out} == {Tag.B2}


def test_rebase_invariance_small():
    rng = np.random.default_rng(0)
    _, s, a, split = parts("bent_rotational")
    base = classify_sample(s, split)
    for _ in range(10):
        s2, sp2 = rebase(s, split, np.array([[-1.0]]), np.array([[1.0]]), ortho_group.rvs(2, random_state=rng))
        pt = classify_sample(s2, sp2)
        assert pt.tag == base.tag
        assert abs(abs(pt.bdata.lam) - abs(base.bdata.lam)) < 1e-12
