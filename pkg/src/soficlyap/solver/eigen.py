"""Dense symmetric eigensolver (cyclic Jacobi rotations)."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError

MAX_DIMENSION = 64


def symmetric_eigen(matrix, max_sweeps: int = 100) -> tuple:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    The input is symmetrized first.  Columns of the returned matrix are the
    eigenvectors, in the same order as the eigenvalues.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIMENSION:
        raise InvalidInputError(f"dimension {n} exceeds {MAX_DIMENSION}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    a = 0.5 * (a + a.T)
    if n == 2:
        return _jacobi_2x2(a[0, 0], a[0, 1], a[1, 1])
    v = np.eye(n)
    if n <= 1:
        return np.diag(a).copy(), v

    scale = np.abs(a).max()
    if scale == 0.0:
        return np.zeros(n), v
    thresh = (1e-17 * scale) ** 2
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        if np.sum(a[iu] ** 2) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _jacobi_2x2(app, apq, aqq) -> tuple:
    # a single rotation diagonalizes a 2x2 block
    if apq == 0.0:
        c, s = 1.0, 0.0
    else:
        theta = (aqq - app) / (2.0 * apq)
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
        c = 1.0 / np.sqrt(t * t + 1.0)
        s = t * c
    lp = c * c * app - 2.0 * s * c * apq + s * s * aqq
    lq = s * s * app + 2.0 * s * c * apq + c * c * aqq
    if lp <= lq:
        return np.array([lp, lq]), np.array([[c, s], [-s, c]])
    return np.array([lq, lp]), np.array([[s, c], [c, -s]])


def min_eigen(matrix) -> tuple:
    w, v = symmetric_eigen(matrix)
    return w[0], v[:, 0]
