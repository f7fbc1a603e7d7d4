import numpy as np

from warpform.linalg import align_frame, canonical_sign, complement, gram_schmidt, numerical_rank


def test_canonical_sign():
    assert np.allclose(canonical_sign(np.array([0.0, -2.0, 1.0])), [0.0, 2.0, -1.0])
    assert np.allclose(canonical_sign(np.zeros(3)), 0.0)


def test_gram_schmidt_drops_dependent_rows():
    B = gram_schmidt([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    assert B.shape == (2, 3)
    assert np.allclose(B @ B.T, np.eye(2))


def test_gram_schmidt_lorentzian_spacelike():
    J = np.diag([1.0, 1.0, -1.0])
    B = gram_schmidt([[1.0, 0.0, 0.5], [0.0, 1.0, 0.2]], J)
    assert np.allclose(B @ J @ B.T, np.eye(2))


def test_numerical_rank_band():
    assert numerical_rank([1.0, 1e-3, 1e-12]).rank == 2
    dec = numerical_rank([1.0, 1e-8])
    assert dec.rank == 1 and dec.marginal
    assert numerical_rank([0.0, 0.0]).rank == 0


def test_complement_and_alignment():
    _, C = complement([[1.0, 0.0, 0.0]], np.eye(3))
    assert C.shape == (2, 3) and np.allclose(C[:, 0], 0.0)
    ref = np.eye(3)[1:]
    A = align_frame(ref, C[::-1])
    assert np.allclose(np.abs(np.diag(A @ ref.T)), 1.0)
