"""Geometry of centered unit directions.

A cross-sectional observation is mapped to the sphere by removing its
mean and dividing by the norm of what is left. The image set is the
intersection of the unit sphere with the zero-sum hyperplane; this
module owns that map and the orthogonal change of basis that makes
moment formulas diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import fix_column_signs, jacobi_eigh
from .errors import DegenerateInputError, DimensionError, DomainError
from .specfun import log_gamma

__all__ = [
    "UNIT_TOL",
    "UnitDirection",
    "Representation",
    "center",
    "centering_matrix",
    "standardize",
    "standardize_rows",
    "helmert_v",
    "build_representation",
    "support_surface_area",
]

# Membership tolerance for the constrained sphere: unit norm and zero sum.
UNIT_TOL = 1e-12

# Relative floor below which a centered vector counts as zero.
DEGENERACY_REL = 1e-12
DEGENERACY_ABS = 1e-300


def _as_vector(z, minimum_size: int = 2) -> np.ndarray:
    arr = np.asarray(z, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {arr.shape}")
    if arr.size < minimum_size:
        raise DimensionError(f"need at least {minimum_size} components, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class UnitDirection:
    """A point on the centered unit sphere: unit norm, components sum to zero."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.coords)
        arr = arr.copy()
        if abs(float(np.linalg.norm(arr)) - 1.0) > UNIT_TOL:
            raise DomainError("coordinates do not have unit norm")
        if abs(float(arr.sum())) > UNIT_TOL:
            raise DomainError("coordinates do not sum to zero")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    def as_array(self) -> np.ndarray:
        """Read-only coordinate view."""
        return self.coords

    def __neg__(self) -> "UnitDirection":
        return UnitDirection(-self.coords)


def center(z) -> np.ndarray:
    """Subtract the cross-sectional mean. Matrix-free application of P."""
    arr = _as_vector(z)
    return arr - arr.mean()


def centering_matrix(n: int) -> np.ndarray:
    """Dense n x n projection onto the zero-sum hyperplane."""
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    return np.eye(n) - 1.0 / n


def _unitize_centered(c: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(c))
    u = c / r
    # A second centering pass scrubs the O(eps * scale / r) residual sum
    # that the first pass leaves when the input is nearly constant.
    u -= u.mean()
    u /= float(np.linalg.norm(u))
    return u


def standardize(z) -> UnitDirection:
    """Map z to its centered unit direction.

    Raises DegenerateInputError when z is (numerically) constant, i.e.
    the centered part is below 1e-12 of the input scale.
    """
    arr = _as_vector(z)
    c = arr - arr.mean()
    r = float(np.linalg.norm(c))
    floor = max(DEGENERACY_REL * float(np.linalg.norm(arr)), DEGENERACY_ABS)
    if r <= floor:
        raise DegenerateInputError(
            "input is constant across components; its direction is undefined"
        )
    return UnitDirection(_unitize_centered(c))


def standardize_rows(rows) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized standardize over the rows of a matrix.

    Returns (units, kept) where kept is a boolean mask over input rows
    and units stacks the directions of the surviving rows. Degenerate
    rows are dropped, not errored, because bulk callers expect that.
    """
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {arr.shape}")
    if arr.shape[1] < 2:
        raise DimensionError("rows need at least 2 components")
    if not np.all(np.isfinite(arr)):
        raise DomainError("matrix has non-finite entries")
    c = arr - arr.mean(axis=1, keepdims=True)
    r = np.linalg.norm(c, axis=1)
    floor = np.maximum(DEGENERACY_REL * np.linalg.norm(arr, axis=1), DEGENERACY_ABS)
    kept = r > floor
    u = c[kept] / r[kept, None]
    u -= u.mean(axis=1, keepdims=True)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u, kept


def helmert_v(n: int) -> np.ndarray:
    """Orthogonal basis whose last column is the constant direction.

    Columns 1..n-1 span the zero-sum hyperplane, so V^T P V is the
    identity padded with a trailing zero row and column.
    """
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    v = np.zeros((n, n))
    for j in range(1, n):
        d = math.sqrt((n - j) * (n - j + 1.0))
        v[j - 1, j - 1] = (n - j) / d
        v[j:, j - 1] = -1.0 / d
    v[:, n - 1] = 1.0 / math.sqrt(n)
    return v


@dataclass(frozen=True, eq=False)
class Representation:
    """Change of basis that diagonalizes a projected covariance.

    u is orthogonal with last column constant; lam holds the n-1
    variances of the uncorrelated block, sorted descending; nu is the
    projected mean expressed in the new basis.
    """

    u: np.ndarray
    lam: np.ndarray
    nu: np.ndarray
    _ortho_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        lam = np.array(self.lam, dtype=np.float64)
        nu = np.array(self.nu, dtype=np.float64)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionError(f"u must be square, got {u.shape}")
        n = u.shape[0]
        if lam.shape != (n - 1,) or nu.shape != (n - 1,):
            raise DimensionError("lam and nu must have length n - 1")
        if np.max(np.abs(u.T @ u - np.eye(n))) > self._ortho_tol:
            raise DomainError("u is not orthogonal")
        if np.any(lam < 0.0):
            raise DomainError("lam must be componentwise nonnegative")
        if np.any(lam[:-1] < lam[1:]):
            raise DomainError("lam must be sorted descending")
        for name, val in (("u", u), ("lam", lam), ("nu", nu)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return int(self.u.shape[0])


def build_representation(mu, cov) -> Representation:
    """Rotate a model (mu, cov) into the basis that decorrelates P Z.

    The last basis vector is the constant direction; the remaining n-1
    eigen-directions of the projected covariance come sorted by
    decreasing variance with deterministic signs.
    """
    mu = _as_vector(mu)
    cov = np.asarray(cov, dtype=np.float64)
    n = mu.size
    if cov.shape != (n, n):
        raise DimensionError(f"cov must be {n} x {n}, got {cov.shape}")
    v = helmert_v(n)
    b = v.T @ cov @ v
    b = 0.5 * (b[: n - 1, : n - 1] + b[: n - 1, : n - 1].T)
    w, q = jacobi_eigh(b)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    q = fix_column_signs(q[:, order])

    u = v.copy()
    u[:, : n - 1] = v[:, : n - 1] @ q
    lam = np.clip(w, 0.0, None)

    pu = u - u.mean(axis=0, keepdims=True)
    gram = u.T @ pu
    target = np.eye(n)
    target[n - 1, n - 1] = 0.0
    if np.max(np.abs(gram - target)) > 1e-10:
        raise DomainError("projected Gram matrix deviates from its block form")

    pmu = mu - mu.mean()
    nu = (u.T @ pmu)[: n - 1]
    return Representation(u=u, lam=lam, nu=nu)


def support_surface_area(n: int) -> float:
    """Surface area of the support sphere in n coordinates (an (n-2)-sphere).

    Defined for n >= 3; the measure collapses to two points at n = 2.
    """
    if n < 3:
        raise DimensionError(f"surface area needs n >= 3, got {n}")
    return math.exp(
        math.log(2.0) + 0.5 * (n - 2) * math.log(math.pi) - log_gamma((n - 2) / 2.0)
    )
