import math

import numpy as np
import pytest

from warpform import jets as J
from warpform.errors import ScenarioError
from warpform.expr import compile_expr, compile_matrix, compile_vector


def test_evaluates_floats_and_jets():
    f = compile_expr("2 + sin(y) * exp(-x**2) + pi", ["y", "x"])
    assert f([0.5, 0.0]) == pytest.approx(2 + math.sin(0.5) + math.pi)
    v, g, _ = J.jet_arrays(np.array([f(J.seed([0.5, 0.0]))], dtype=object), 2)
    assert g[0] == pytest.approx([math.cos(0.5), 0.0])


def test_vector_and_matrix():
    vec = compile_vector(["x", "y*y", "1"], ["x", "y"])
    assert np.allclose(vec([2.0, 3.0]), [2, 9, 1])
    mat = compile_matrix([["1", "0"], ["0", "exp(2*y)"]], ["y", "x"])
    assert np.allclose(mat([1.0, 0.0]), [[1, 0], [0, math.e**2]])
    with pytest.raises(ScenarioError):
        compile_matrix([["1", "0"]], ["y"])


@pytest.mark.parametrize("text", ["__import__('os')", "x.real", "x if x else 1", "[x]", "open(x)",
                                  "sin(x, x)", "'a'", "x // 2", "lambda: 1", "z + 1", "x +"])
def test_rejections(text):
    with pytest.raises(ScenarioError):
        compile_expr(text, ["x", "y"])


def test_wrong_arity():
    with pytest.raises(ScenarioError):
        compile_expr("x", ["x", "y"])([1.0])
