import numpy as np
from hypothesis import given, settings, strategies as st

from warpform import jets as J


def sample_fn(z):
    x, y = z[0], z[1]
    return np.array([J.sin(x) * J.exp(y), x * x / (1.0 + y * y), J.sqrt(2.0 + J.cos(x * y)),
                     J.arctan(x - y) + J.tanh(y) * J.log(3.0 + x)],
                    dtype=object if np.asarray(z).dtype == object else float)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_jets_match_finite_differences(x, y):
    z = np.array([x, y])
    v, g, h = J.jet_arrays(sample_fn(J.seed(z)), 2)
    fv, fg, fh = J.fd_arrays(sample_fn, z, 1e-4)
    assert np.allclose(v, fv, atol=1e-14)
    assert np.allclose(g, fg, atol=1e-7)
    assert np.allclose(h, fh, atol=1e-5)


def test_hessian_is_symmetric_and_exact_for_polynomial():
    z = np.array([0.3, -0.7])
    out = np.array([z_ for z_ in [J.seed(z)[0] ** 3 * J.seed(z)[1]]], dtype=object)
    v, g, h = J.jet_arrays(out, 2)
    x, y = z
    assert np.isclose(v[0], x**3 * y)
    assert np.allclose(g[0], [3 * x * x * y, x**3])
    assert np.allclose(h[0], [[6 * x * y, 3 * x * x], [3 * x * x, 0.0]])


def test_division_and_reciprocal():
    s = J.seed([2.0])
    v, g, h = J.jet_arrays(np.array([1.0 / s[0]], dtype=object), 1)
    assert np.allclose([v[0], g[0, 0], h[0, 0, 0]], [0.5, -0.25, 0.25])


def test_plain_floats_pass_through():
    v, g, h = J.jet_arrays(np.array([1.5, 2.0], dtype=object), 3)
    assert np.allclose(v, [1.5, 2.0]) and not g.any() and not h.any()
