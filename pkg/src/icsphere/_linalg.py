"""Dense symmetric eigensolver and Cholesky factorization.

A cyclic Jacobi iteration keeps the eigendecomposition fully
deterministic across platforms: rotation order is fixed, convergence is
a fixed relative threshold, and eigenvector signs follow one rule.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, DimensionError, ModelError

__all__ = ["jacobi_eigh", "fix_column_signs", "cholesky_lower"]

_OFFDIAG_TOL = 1e-12
_MAX_SWEEPS = 60


def _offdiag_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(a[mask] ** 2)))


def fix_column_signs(v: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry is positive.

    Ties go to the lowest row index (argmax of |.| picks the first
    maximum). In-place on v, which is also returned.
    """
    lead = np.argmax(np.abs(v), axis=0)
    flip = v[lead, np.arange(v.shape[1])] < 0.0
    v[:, flip] *= -1.0
    return v


def jacobi_eigh(a: np.ndarray, max_sweeps: int = _MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of symmetric a.

    Iterates cyclic Jacobi sweeps until the off-diagonal Frobenius mass
    drops below 1e-12 times the Frobenius norm of the input. Column i of
    the returned matrix pairs with eigenvalue i; signs are deterministic.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.reshape(1).copy(), v
    fro = float(np.linalg.norm(a, "fro"))
    if fro == 0.0:
        return np.zeros(n), v
    threshold = _OFFDIAG_TOL * fro

    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= threshold:
            break
        # Entries this small contribute at most threshold/10 to the
        # off-diagonal norm even if every one of them is skipped.
        skip_below = max(threshold / (10.0 * n), 1e-300)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip_below:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p - s * (col_q + tau * col_p)
                a[:, q] = col_q + s * (col_p - tau * col_q)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp - s * (vq + tau * vp)
                v[:, q] = vq + s * (vp - tau * vq)
    else:
        raise ConvergenceError(
            f"Jacobi sweeps did not reach tolerance in {max_sweeps} sweeps",
            terms_used=max_sweeps,
        )

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    fix_column_signs(v)
    return w, v


def cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = a; raises ModelError if a is not PD."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    low = np.zeros((n, n))
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if not (d > 0.0) or not math.isfinite(d):
            raise ModelError(
                f"matrix is not positive definite (pivot {j} is {d!r})"
            )
        low[j, j] = math.sqrt(d)
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low
