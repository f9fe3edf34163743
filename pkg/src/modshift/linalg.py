"""Deterministic exact linear algebra over finite fields.

Matrices are numpy int64 arrays of ring element codes.  Elimination uses a
fixed pivot discipline (columns left to right, first nonzero row) so that
echelon forms, ranks, and nullspace bases are bit-reproducible.  Composite
moduli are not handled here; callers split them through the crt module.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .rings import Ring

__all__ = ["rref", "rank", "nullspace", "solve_affine", "row_span_rank"]


def _check_field(ring: Ring):
    if not ring.is_field:
        raise InvalidParameterError(
            f"{ring.descriptor()} is not a field; split composite characteristics first"
        )


def rref(matrix: np.ndarray, ring: Ring):
    """Reduced row echelon form. Returns (rref matrix, pivot column list)."""
    _check_field(ring)
    m = np.array(matrix, dtype=np.int64)
    if m.ndim != 2:
        raise InvalidParameterError("matrix must be 2-dimensional")
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = ring.inverse(int(m[r, c]))
        m[r] = ring.mul_arr(np.int64(inv), m[r])
        factors = m[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            m[hit] = ring.sub_arr(
                m[hit], ring.mul_arr(factors[hit][:, None], m[r][None, :])
            )
        pivots.append(c)
        r += 1
    return m, pivots


def rank(matrix: np.ndarray, ring: Ring) -> int:
    _, pivots = rref(matrix, ring)
    return len(pivots)


def row_span_rank(rows: np.ndarray, ring: Ring) -> int:
    if rows.size == 0:
        return 0
    return rank(rows, ring)


def nullspace(matrix: np.ndarray, ring: Ring) -> np.ndarray:
    """Basis of {x : M x = 0}, one row per basis vector.

    Free coordinates are the non-pivot columns in left-to-right order; basis
    vector j has a 1 at the j-th free coordinate.
    """
    m, pivots = rref(matrix, ring)
    cols = m.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[j, fc] = ring.one
        for r, pc in enumerate(pivots):
            basis[j, pc] = ring.neg(int(m[r, fc]))
    return basis


def solve_affine(matrix: np.ndarray, rhs: np.ndarray, ring: Ring):
    """Solve M x = b. Returns (particular solution | None, nullspace basis)."""
    m = np.asarray(matrix, dtype=np.int64)
    b = np.asarray(rhs, dtype=np.int64).reshape(-1, 1)
    if m.shape[0] != b.shape[0]:
        raise InvalidParameterError("rhs length != row count")
    aug, pivots = rref(np.hstack([m, b]), ring)
    cols = m.shape[1]
    if any(p == cols for p in pivots):
        return None, nullspace(m, ring)
    x = np.zeros(cols, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = aug[r, cols]
    return x, nullspace(m, ring)
