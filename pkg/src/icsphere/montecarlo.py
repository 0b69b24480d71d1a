"""Seeded Monte Carlo for directional moments.

The generator is a counter-based SplitMix64 finalizer, fully specified
here so any implementation can reproduce the streams bit for bit:

- mix64(v): v ^= v >> 30; v *= 0xBF58476D1CE4E5B9; v ^= v >> 27;
  v *= 0x94D049BB133111EB; v ^= v >> 31  (all mod 2^64)
- key(seed, stream) = mix64(mix64(seed + 0x9E3779B97F4A7C15)
                            XOR mix64(stream + 0x6A09E667F3BCC909))
- raw output i (i >= 0): mix64(key + (i+1) * 0x9E3779B97F4A7C15)
- uniform i: (raw >> 11) * 2^-53, in [0, 1)
- standard normals come from the polar method; attempt j consumes
  uniforms 2j and 2j+1 exactly, a = 2u-1, b = 2v-1, s = a^2 + b^2 is
  accepted iff 0 < s < 1, and emits a*m then b*m with
  m = sqrt(-2 ln(s) / s). An unconsumed second variate is cached.

Row-major consumption: a draw matrix of shape (rows, n) takes rows*n
normals in one run of the stream. Work is split into shards of 65536
rows; shard i of a request seeded (seed, stream) uses the stream
(seed, stream + i), which makes results independent of shard batching.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from operator import index as _int_index

import numpy as np

from .errors import (
    DegenerateInputError,
    DimensionError,
    DomainError,
    UndefinedMeanDirectionError,
)
from .moments import GaussianModel, MomentSummary
from .sphere import UnitDirection, standardize, standardize_rows

__all__ = [
    "SHARD_ROWS",
    "STREAM_BLOCK",
    "SeededStream",
    "DirectionalSample",
    "DensityEstimate",
    "ProjectedMomentsMC",
    "PerturbationPoint",
    "sample_mvn",
    "sample_chi",
    "estimate_md_mrl",
    "estimate_cov",
    "scatter_matrix",
    "estimate_chi_mrl",
    "projected_moments_mc",
    "kde",
    "ic_distribution",
    "md_perturbation_experiment",
]

SHARD_ROWS = 65536
# Stream spacing for logically separate sub-experiments (e.g. one per
# perturbation factor), leaving room for shard offsets underneath.
STREAM_BLOCK = 1 << 32

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_STREAM_SALT = 0x6A09E667F3BCC909

_U_GAMMA = np.uint64(_GAMMA)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_INV_2_53 = 2.0 ** -53


def _mix64_int(v: int) -> int:
    v &= _MASK64
    v = ((v ^ (v >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    v = ((v ^ (v >> 27)) * 0x94D049BB133111EB) & _MASK64
    return v ^ (v >> 31)


def _mix64_array(v: np.ndarray) -> np.ndarray:
    v = (v ^ (v >> _U30)) * _U_M1
    v = (v ^ (v >> _U27)) * _U_M2
    return v ^ (v >> _U31)


@dataclass(frozen=True)
class SeededStream:
    """Address of one pseudo-random stream: (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", _int_index(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", _int_index(self.stream_id) & _MASK64)

    def shifted(self, offset: int) -> "SeededStream":
        return SeededStream(self.seed, (self.stream_id + offset) & _MASK64)

    def key(self) -> int:
        a = _mix64_int(self.seed + _GAMMA)
        b = _mix64_int(self.stream_id + _STREAM_SALT)
        return _mix64_int(a ^ b)


class _NormalSource:
    """Sequential standard-normal source over one stream.

    Batches are vectorized but bitwise-identical to the scalar
    definition in the module docstring, including across arbitrary
    take() boundaries.
    """

    def __init__(self, stream: SeededStream):
        self._key = np.uint64(stream.key())
        self._attempts = 0
        self._cached: float | None = None

    def _uniform_block(self, first_index: int, count: int) -> np.ndarray:
        idx = np.arange(first_index + 1, first_index + count + 1, dtype=np.uint64)
        raw = _mix64_array(self._key + idx * _U_GAMMA)
        return (raw >> _U11).astype(np.float64) * _INV_2_53

    def take(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.float64)
        pos = 0
        if self._cached is not None and count > 0:
            out[0] = self._cached
            self._cached = None
            pos = 1
        need = count - pos
        if need <= 0:
            return out
        pairs_needed = (need + 1) // 2
        pieces = []
        got = 0
        while got < pairs_needed:
            remaining = pairs_needed - got
            # Polar acceptance is pi/4; 1.35 overshoots slightly.
            block = max(256, int(remaining * 1.35) + 16)
            u = self._uniform_block(2 * self._attempts, 2 * block).reshape(block, 2)
            a = 2.0 * u[:, 0] - 1.0
            b = 2.0 * u[:, 1] - 1.0
            s = a * a + b * b
            accepted = np.nonzero((s > 0.0) & (s < 1.0))[0]
            if accepted.size >= remaining:
                accepted = accepted[:remaining]
                # Attempts after the last used one have not happened yet.
                self._attempts += int(accepted[-1]) + 1
            else:
                self._attempts += block
            s_a = s[accepted]
            m = np.sqrt(-2.0 * np.log(s_a) / s_a)
            pieces.append(
                np.column_stack((a[accepted] * m, b[accepted] * m)).ravel()
            )
            got += accepted.size
        flat = pieces[0] if len(pieces) == 1 else np.concatenate(pieces)
        if need % 2 == 1:
            self._cached = float(flat[-1])
            flat = flat[:-1]
        out[pos:] = flat
        return out


def _validate_count(count: int, minimum: int = 1) -> int:
    try:
        count = _int_index(count)
    except TypeError:
        raise DomainError(f"count must be an int, got {count!r}") from None
    if count < minimum:
        raise DomainError(f"count must be at least {minimum}, got {count}")
    return count


def _validate_threads(threads: int) -> int:
    try:
        threads = _int_index(threads)
    except TypeError:
        raise DomainError(f"threads must be an int, got {threads!r}") from None
    if threads < 1:
        raise DomainError(f"threads must be at least 1, got {threads}")
    return threads


def _shards(count: int) -> list[tuple[int, int, int]]:
    """(shard_index, start_row, rows) triples covering count rows."""
    out = []
    start = 0
    i = 0
    while start < count:
        rows = min(SHARD_ROWS, count - start)
        out.append((i, start, rows))
        start += rows
        i += 1
    return out


def _map_ordered(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def sample_mvn(model: GaussianModel, count: int, stream: SeededStream,
               threads: int = 1) -> np.ndarray:
    """count rows drawn from N(mu, cov), shape (count, n)."""
    count = _validate_count(count)
    threads = _validate_threads(threads)
    lt = model.chol.T
    mu = model.mu
    n = model.n

    def one(spec):
        i, _, rows = spec
        src = _NormalSource(stream.shifted(i))
        g = src.take(rows * n).reshape(rows, n)
        return g @ lt + mu

    blocks = _map_ordered(one, _shards(count), threads)
    return blocks[0] if len(blocks) == 1 else np.vstack(blocks)


@dataclass(frozen=True, eq=False)
class DirectionalSample:
    """Rows on the centered unit sphere, one direction per observation."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise DimensionError(f"need shape (N >= 1, n >= 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample has non-finite entries")
        norms = np.linalg.norm(arr, axis=1)
        if float(np.max(np.abs(norms - 1.0))) > 1e-12:
            raise DomainError("rows must have unit norm")
        if float(np.max(np.abs(arr.sum(axis=1)))) > 1e-12:
            raise DomainError("rows must sum to zero")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def points(self) -> list[UnitDirection]:
        return [UnitDirection(row) for row in self.matrix]


def sample_chi(model: GaussianModel, count: int, stream: SeededStream,
               threads: int = 1) -> DirectionalSample:
    """Directions of count draws. Degenerate draws (a probability-zero
    event) are dropped rather than errored."""
    draws = sample_mvn(model, count, stream, threads)
    units, _ = standardize_rows(draws)
    if units.shape[0] == 0:
        raise DegenerateInputError("every draw was constant across components")
    return DirectionalSample(units)


def estimate_md_mrl(sample: DirectionalSample) -> MomentSummary:
    """Sample mean direction and mean resultant length."""
    mean = sample.matrix.mean(axis=0)
    r = float(np.linalg.norm(mean))
    if r <= 1e-12:
        raise UndefinedMeanDirectionError(
            "sample resultant is zero; mean direction undefined", mrl=r
        )
    return MomentSummary(md=standardize(mean), mrl=r, cov_chi=None)


def estimate_cov(sample: DirectionalSample) -> np.ndarray:
    """Sample covariance of the directions with divisor N."""
    if sample.size < 2:
        raise DomainError("covariance needs at least 2 observations")
    xc = sample.matrix - sample.matrix.mean(axis=0)
    cov = (xc.T @ xc) / sample.size
    return 0.5 * (cov + cov.T)


def scatter_matrix(sample: DirectionalSample) -> np.ndarray:
    """Uncentered second moment E_hat[x x^T]; its trace is exactly 1."""
    x = sample.matrix
    scatter = (x.T @ x) / sample.size
    return 0.5 * (scatter + scatter.T)


def estimate_chi_mrl(model: GaussianModel, count: int, stream: SeededStream,
                     threads: int = 1) -> float:
    """Mean resultant length of chi(Z) by streaming accumulation.

    Never materializes the draw matrix, so count = 10^7 is fine.
    """
    count = _validate_count(count)
    threads = _validate_threads(threads)
    lt = model.chol.T
    mu = model.mu
    n = model.n

    def one(spec):
        i, _, rows = spec
        src = _NormalSource(stream.shifted(i))
        g = src.take(rows * n).reshape(rows, n)
        units, _ = standardize_rows(g @ lt + mu)
        return units.sum(axis=0), units.shape[0]

    total = np.zeros(n)
    kept = 0
    for vec, rows in _map_ordered(one, _shards(count), threads):
        total += vec
        kept += rows
    if kept == 0:
        raise DegenerateInputError("every draw was constant across components")
    return float(np.linalg.norm(total / kept))


@dataclass(frozen=True, eq=False)
class ProjectedMomentsMC:
    """Monte Carlo moments of u = y/||y||, y ~ N(x e_1, I_n), with
    elementwise standard errors for both the mean and the covariance."""

    mean: np.ndarray
    cov: np.ndarray
    se_mean: np.ndarray
    se_cov: np.ndarray
    count: int


def projected_moments_mc(n: int, x: float, count: int, stream: SeededStream,
                         threads: int = 1) -> ProjectedMomentsMC:
    """Streaming MC check of the canonical mean varrho e_1 and covariance
    diag(f, g, ..., g). Memory is O(n^2) regardless of count."""
    n = _int_index(n)
    if n < 2:
        raise DimensionError(f"need n >= 2, got {n}")
    if not (x >= 0.0 and math.isfinite(x)):
        raise DomainError(f"need x >= 0, got {x!r}")
    count = _validate_count(count, minimum=2)
    threads = _validate_threads(threads)

    def one(spec):
        i, _, rows = spec
        src = _NormalSource(stream.shifted(i))
        g = src.take(rows * n).reshape(rows, n)
        g[:, 0] += x
        norms = np.linalg.norm(g, axis=1)
        u = g[norms > 0.0] / norms[norms > 0.0, None]
        u2 = u * u
        return u.sum(axis=0), u.T @ u, u2.T @ u2, u.shape[0]

    s1 = np.zeros(n)
    m2 = np.zeros((n, n))
    m4 = np.zeros((n, n))
    kept = 0
    for a, b, c, rows in _map_ordered(one, _shards(count), threads):
        s1 += a
        m2 += b
        m4 += c
        kept += rows
    mean = s1 / kept
    raw2 = m2 / kept
    cov = raw2 - np.outer(mean, mean)
    sq = m4 / kept
    var_prod = np.clip(sq - raw2 ** 2, 0.0, None)
    se_cov = np.sqrt(var_prod / kept)
    se_mean = np.sqrt(np.clip(np.diag(raw2) - mean ** 2, 0.0, None) / kept)
    return ProjectedMomentsMC(mean=mean, cov=cov, se_mean=se_mean,
                              se_cov=se_cov, count=kept)


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    """Gaussian kernel density on a fixed 512-point grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        dens = np.asarray(self.density, dtype=np.float64)
        if grid.shape != dens.shape or grid.ndim != 1:
            raise DimensionError("grid and density must be equal-length vectors")
        if np.any(dens < 0.0):
            raise DomainError("density must be nonnegative")
        mass = float(_trapezoid(dens, grid))
        if not (0.99 <= mass <= 1.01):
            raise DomainError(f"density integrates to {mass:.6f}, not 1")
        for name, val in (("grid", grid), ("density", dens)):
            val = np.array(val)
            val.setflags(write=False)
            object.__setattr__(self, name, val)


_KDE_GRID_POINTS = 512

# np.trapz was renamed np.trapezoid in numpy 2.0.
_trapezoid = getattr(np, "trapezoid", getattr(np, "trapz", None))


def kde(values, bandwidth: float | None = None) -> DensityEstimate:
    """Gaussian KDE with the 0.9 min(sd, IQR/1.34) N^(-1/5) default width.

    Zero spread makes the automatic bandwidth collapse; that raises
    DegenerateInputError rather than returning a delta spike.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size < 2:
        raise DomainError("kde needs a 1-d array with at least 2 values")
    if not np.all(np.isfinite(vals)):
        raise DomainError("kde values must be finite")
    if bandwidth is None:
        sd = float(vals.std())
        q1, q3 = np.percentile(vals, [25.0, 75.0])
        h = 0.9 * min(sd, (q3 - q1) / 1.34) * vals.size ** -0.2
        if h <= 0.0:
            raise DegenerateInputError(
                "automatic bandwidth is zero (no spread in the data)"
            )
    else:
        h = float(bandwidth)
        if not (h > 0.0 and math.isfinite(h)):
            raise DomainError(f"bandwidth must be positive, got {bandwidth!r}")
    lo = float(vals.min()) - 3.0 * h
    hi = float(vals.max()) + 3.0 * h
    grid = np.linspace(lo, hi, _KDE_GRID_POINTS)
    dens = np.zeros(_KDE_GRID_POINTS)
    step = 8192
    for start in range(0, vals.size, step):
        chunk = vals[start:start + step]
        z = (grid[None, :] - chunk[:, None]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=0)
    dens /= vals.size * h * math.sqrt(2.0 * math.pi)
    return DensityEstimate(grid=grid, density=dens, bandwidth=h)


def ic_distribution(model: GaussianModel, theta_mode: str, count: int,
                    stream: SeededStream, bandwidth: float | None = None,
                    threads: int = 1) -> tuple[DensityEstimate, np.ndarray]:
    """Sampled distribution of T = theta . chi(Z).

    theta_mode "chi_mu" projects onto the standardized model mean;
    "sample_md" projects onto the sample mean direction, regenerating
    the same draws in a second pass so the result stays deterministic.
    Returns the density estimate and the raw projections.
    """
    if theta_mode not in ("chi_mu", "sample_md"):
        raise DomainError(f"theta_mode must be chi_mu or sample_md, got {theta_mode!r}")
    count = _validate_count(count, minimum=2)
    threads = _validate_threads(threads)
    lt = model.chol.T
    mu = model.mu
    n = model.n

    def units_of(spec):
        i, _, rows = spec
        src = _NormalSource(stream.shifted(i))
        g = src.take(rows * n).reshape(rows, n)
        units, _ = standardize_rows(g @ lt + mu)
        return units

    shards = _shards(count)
    if theta_mode == "chi_mu":
        try:
            theta = standardize(mu).coords
        except DegenerateInputError:
            raise UndefinedMeanDirectionError(
                "model mean is constant; chi_mu projection undefined", mrl=0.0
            ) from None
    else:
        sums = _map_ordered(lambda s: units_of(s).sum(axis=0), shards, threads)
        resultant = np.sum(sums, axis=0)
        if float(np.linalg.norm(resultant)) <= 1e-12:
            raise UndefinedMeanDirectionError(
                "sample resultant is zero; sample_md projection undefined",
                mrl=0.0,
            )
        theta = standardize(resultant).coords

    pieces = _map_ordered(lambda s: units_of(s) @ theta, shards, threads)
    values = np.concatenate(pieces)
    if float(np.max(np.abs(values))) > 1.0 + 1e-9:
        raise DomainError("projection escaped [-1, 1]; inputs are inconsistent")
    values = np.clip(values, -1.0, 1.0)
    return kde(values, bandwidth), values


@dataclass(frozen=True, eq=False)
class PerturbationPoint:
    """One perturbation setting and its estimated direction moments."""

    factor: float
    md: UnitDirection
    mrl: float


def md_perturbation_experiment(mu, cov, axis: str, factors, count: int,
                               stream: SeededStream,
                               threads: int = 1) -> list[PerturbationPoint]:
    """Estimated mean direction as one model parameter is scaled.

    axis "mu1" multiplies the first mean component by each factor;
    axis "sigma1" scales the first row and column of the covariance
    (so the first volatility is scaled, correlations untouched).
    Factor j runs on stream_id + j * STREAM_BLOCK.
    """
    if axis not in ("mu1", "sigma1"):
        raise DomainError(f"axis must be mu1 or sigma1, got {axis!r}")
    mu = np.asarray(mu, dtype=np.float64)
    cov = np.asarray(cov, dtype=np.float64)
    factors = [float(k) for k in factors]
    if len(factors) == 0:
        raise DomainError("need at least one factor")
    if any(not (k > 0.0 and math.isfinite(k)) for k in factors):
        raise DomainError("factors must be positive and finite")
    count = _validate_count(count, minimum=2)

    out = []
    for j, k in enumerate(factors):
        if axis == "mu1":
            mu_k = mu.copy()
            mu_k[0] *= k
            cov_k = cov
        else:
            scale = np.ones(mu.size)
            scale[0] = k
            cov_k = cov * np.outer(scale, scale)
            mu_k = mu
        model = GaussianModel(mu_k, cov_k)
        sub = stream.shifted(j * STREAM_BLOCK)
        lt = model.chol.T

        def one(spec, lt=lt, mu_vec=model.mu, sub=sub, n=model.n):
            i, _, rows = spec
            src = _NormalSource(sub.shifted(i))
            g = src.take(rows * n).reshape(rows, n)
            units, _ = standardize_rows(g @ lt + mu_vec)
            return units.sum(axis=0), units.shape[0]

        total = np.zeros(mu.size)
        kept = 0
        for vec, rows in _map_ordered(one, _shards(count), _validate_threads(threads)):
            total += vec
            kept += rows
        mean = total / max(kept, 1)
        r = float(np.linalg.norm(mean))
        if r <= 1e-12:
            raise UndefinedMeanDirectionError(
                f"zero resultant at factor {k}", mrl=r
            )
        out.append(PerturbationPoint(factor=k, md=standardize(mean), mrl=r))
    return out
