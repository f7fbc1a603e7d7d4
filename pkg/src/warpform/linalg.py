"""Small dense linear algebra: deterministic frames and rank decisions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# singular values below RANK_REL * scale count as zero; between RANK_FLOOR and
# RANK_REL the decision is flagged marginal
RANK_REL = 1e-7
RANK_FLOOR = 1e-9
# absolute floor so that an identically vanishing form has rank 0
ABS_ZERO = 1e-9


def canonical_sign(v: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so that its first non-negligible component is positive."""
    v = np.asarray(v, dtype=float)
    big = np.max(np.abs(v)) if v.size else 0.0
    if big == 0.0:
        return v
    for x in v:
        if abs(x) > eps * big:
            return v if x > 0 else -v
    return v


def gram_schmidt(vectors, J=None, drop_tol: float = 1e-10, canonical: bool = True):
    """Orthonormalise rows of ``vectors`` in order under the form ``J``.

    Modified Gram-Schmidt with one reorthogonalisation pass.  Rows whose
    residual norm falls below ``drop_tol`` times their original norm are
    skipped.  ``J`` must be positive on the span (spacelike vectors only when
    it is Lorentzian).
    """
    vecs = np.atleast_2d(np.asarray(vectors, dtype=float))
    dim = vecs.shape[1]
    if J is None:
        J = np.eye(dim)
    out = []
    for v in vecs:
        n0 = np.sqrt(abs(v @ J @ v))
        if n0 == 0.0:
            continue
        w = v.copy()
        for _ in range(2):
            for u in out:
                w = w - (w @ J @ u) * u
        nw2 = w @ J @ w
        if nw2 <= (drop_tol * n0) ** 2:
            continue
        w = w / np.sqrt(nw2)
        out.append(canonical_sign(w) if canonical else w)
    return np.array(out).reshape(len(out), dim)


@dataclass(frozen=True)
class RankDecision:
    rank: int
    marginal: bool
    margin: float          # log10 gap around the threshold (larger is safer)
    singular_values: np.ndarray
    scale: float


def numerical_rank(sv, scale: float | None = None, rel: float = RANK_REL,
                   floor: float = RANK_FLOOR, abs_zero: float = ABS_ZERO) -> RankDecision:
    """Rank from singular values with a relative threshold and marginal band."""
    sv = np.sort(np.abs(np.asarray(sv, dtype=float)))[::-1]
    if scale is None:
        scale = float(sv[0]) if sv.size else 0.0
    scale = max(scale, abs_zero)
    thresh = rel * scale
    band_lo = floor * scale
    rank = int(np.sum(sv >= thresh))
    marginal = bool(np.any((sv >= band_lo) & (sv < thresh)))
    # margin: distance in decades from the nearest singular value to the threshold
    if sv.size:
        with np.errstate(divide="ignore"):
            logs = np.log10(np.maximum(sv, 1e-300)) - np.log10(thresh)
        margin = float(np.min(np.abs(logs)))
    else:
        margin = float("inf")
    return RankDecision(rank, marginal, margin, sv, scale)


def complement(basis, ambient_candidates, J=None):
    """Orthonormal complement of ``basis`` spanned by the candidate rows.

    Candidates are first stripped of their ``basis`` components, then taken in
    decreasing order of residual norm (ties resolved by index) so that the
    choice is well conditioned and deterministic.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    cand = np.atleast_2d(np.asarray(ambient_candidates, dtype=float))
    dim = cand.shape[1]
    if J is None:
        J = np.eye(dim)
    res = cand.copy()
    for u in basis:
        res = res - np.outer(res @ J @ u, u)
    norms = np.sqrt(np.abs(np.einsum("ij,jk,ik->i", res, J, res)))
    order = sorted(range(len(res)), key=lambda i: (-round(norms[i], 12), i))
    return order, gram_schmidt(np.vstack([basis, res[order]]), J)[len(basis):]


def align_frame(reference, new_basis, J=None):
    """Orthonormal frame of span(new_basis) closest to ``reference``.

    Projects each reference vector onto the new span and orthonormalises in
    the same order, so frames at nearby points vary smoothly.
    """
    ref = np.atleast_2d(np.asarray(reference, dtype=float))
    nb = np.atleast_2d(np.asarray(new_basis, dtype=float))
    dim = ref.shape[1]
    if J is None:
        J = np.eye(dim)
    G = nb @ J @ nb.T
    coeff = np.linalg.solve(G, nb @ J @ ref.T)
    proj = (nb.T @ coeff).T
    return gram_schmidt(proj, J, canonical=False)
