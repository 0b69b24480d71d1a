"""Tests for the deterministic sampling stack.

The scalar generator written out in plain Python here is the reference
definition; the vectorized source must reproduce it bitwise, at every
take() boundary, for any shard layout, and for any thread count.
"""

import math

import numpy as np
import pytest

from icsphere import montecarlo as mc
from icsphere import moments, specfun, sphere
from icsphere.errors import (
    DegenerateInputError,
    DimensionError,
    DomainError,
    UndefinedMeanDirectionError,
)

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
SALT = 0x6A09E667F3BCC909


def mix64(v: int) -> int:
    v &= MASK
    v ^= v >> 30
    v = (v * 0xBF58476D1CE4E5B9) & MASK
    v ^= v >> 27
    v = (v * 0x94D049BB133111EB) & MASK
    v ^= v >> 31
    return v


def stream_key(seed: int, stream_id: int) -> int:
    a = mix64((seed + GAMMA) & MASK)
    b = mix64((stream_id + SALT) & MASK)
    return mix64(a ^ b)


def scalar_normals(stream: mc.SeededStream, count: int) -> np.ndarray:
    """First count normals of the stream, one attempt at a time."""
    key = stream_key(stream.seed, stream.stream_id)

    def uniform(i: int) -> float:
        raw = mix64((key + (i + 1) * GAMMA) & MASK)
        return (raw >> 11) * 2.0 ** -53

    out: list[float] = []
    attempt = 0
    while len(out) < count:
        u = uniform(2 * attempt)
        v = uniform(2 * attempt + 1)
        attempt += 1
        a = 2.0 * u - 1.0
        b = 2.0 * v - 1.0
        s = a * a + b * b
        if 0.0 < s < 1.0:
            m = float(np.sqrt(-2.0 * np.log(s) / s))
            out.append(a * m)
            out.append(b * m)
    return np.array(out[:count])


class TestNormalSource:
    def test_matches_scalar_reference(self):
        stream = mc.SeededStream(seed=20240701, stream_id=0)
        ref = scalar_normals(stream, 400)
        got = mc._NormalSource(stream).take(400)
        assert np.array_equal(got, ref)

    def test_take_boundaries_are_invisible(self):
        stream = mc.SeededStream(seed=7, stream_id=3)
        ref = scalar_normals(stream, 16)
        src = mc._NormalSource(stream)
        pieces = [src.take(7), src.take(5), src.take(1), src.take(3)]
        assert np.array_equal(np.concatenate(pieces), ref)

    def test_zero_take(self):
        src = mc._NormalSource(mc.SeededStream(seed=1))
        assert src.take(0).size == 0
        assert np.array_equal(src.take(4), scalar_normals(mc.SeededStream(seed=1), 4))

    def test_streams_are_distinct(self):
        a = mc._NormalSource(mc.SeededStream(seed=1, stream_id=0)).take(32)
        b = mc._NormalSource(mc.SeededStream(seed=1, stream_id=1)).take(32)
        c = mc._NormalSource(mc.SeededStream(seed=2, stream_id=0)).take(32)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_reproducible(self):
        s = mc.SeededStream(seed=99, stream_id=5)
        assert np.array_equal(
            mc._NormalSource(s).take(257), mc._NormalSource(s).take(257)
        )

    def test_moments_sane(self):
        z = mc._NormalSource(mc.SeededStream(seed=12345)).take(200000)
        n = z.size
        assert abs(z.mean()) < 4.0 / math.sqrt(n)
        assert abs(z.var() - 1.0) < 4.0 * math.sqrt(2.0 / n)
        # symmetry of tails
        assert abs((z > 1.96).mean() - 0.025) < 4.0 * math.sqrt(0.025 / n)
        assert abs((z < -1.96).mean() - 0.025) < 4.0 * math.sqrt(0.025 / n)


class TestSeededStream:
    def test_key_matches_reference(self):
        s = mc.SeededStream(seed=20240701, stream_id=42)
        assert s.key() == stream_key(20240701, 42)

    def test_shift_wraps(self):
        s = mc.SeededStream(seed=0, stream_id=MASK)
        assert s.shifted(1).stream_id == 0

    def test_negative_seed_normalized(self):
        s = mc.SeededStream(seed=-1)
        assert s.seed == MASK


class TestShards:
    def test_small_count_single_shard(self):
        assert mc._shards(100) == [(0, 0, 100)]
        assert mc._shards(mc.SHARD_ROWS) == [(0, 0, mc.SHARD_ROWS)]

    def test_split_counts(self):
        shards = mc._shards(mc.SHARD_ROWS * 2 + 5)
        assert shards == [
            (0, 0, mc.SHARD_ROWS),
            (1, mc.SHARD_ROWS, mc.SHARD_ROWS),
            (2, 2 * mc.SHARD_ROWS, 5),
        ]


class TestSampleMVN:
    def test_shard_layout_is_the_contract(self):
        model = moments.GaussianModel(
            mu=np.array([0.1, -0.2, 0.3]), cov=np.eye(3)
        )
        stream = mc.SeededStream(seed=11, stream_id=7)
        count = 2 * mc.SHARD_ROWS + 18928
        full = mc.sample_mvn(model, count, stream)
        parts = [
            mc.sample_mvn(model, mc.SHARD_ROWS, stream),
            mc.sample_mvn(model, mc.SHARD_ROWS, stream.shifted(1)),
            mc.sample_mvn(model, 18928, stream.shifted(2)),
        ]
        assert np.array_equal(full, np.vstack(parts))

    def test_threads_do_not_change_output(self):
        model = moments.GaussianModel(mu=np.zeros(4), cov=np.eye(4))
        stream = mc.SeededStream(seed=5)
        count = mc.SHARD_ROWS + 1000
        assert np.array_equal(
            mc.sample_mvn(model, count, stream, threads=1),
            mc.sample_mvn(model, count, stream, threads=4),
        )

    def test_first_row_matches_reference(self):
        mu = np.array([1.0, 2.0])
        cov = np.array([[4.0, 1.0], [1.0, 2.0]])
        model = moments.GaussianModel(mu=mu, cov=cov)
        stream = mc.SeededStream(seed=3, stream_id=9)
        x = mc.sample_mvn(model, 5, stream)
        g = scalar_normals(stream, 10).reshape(5, 2)
        ref = g @ model.chol.T + mu
        assert np.array_equal(x, ref)

    def test_mean_and_cov_recovered(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((4, 4))
        cov = a @ a.T + 0.5 * np.eye(4)
        mu = np.array([1.0, -2.0, 0.5, 3.0])
        model = moments.GaussianModel(mu=mu, cov=cov)
        n = 100000
        x = mc.sample_mvn(model, n, mc.SeededStream(seed=77))
        se_mean = np.sqrt(np.diag(cov) / n)
        assert np.all(np.abs(x.mean(axis=0) - mu) <= 4.0 * se_mean)
        sample_cov = np.cov(x, rowvar=False)
        d = np.diag(cov)
        se_cov = np.sqrt((np.outer(d, d) + cov ** 2) / n)
        assert np.all(np.abs(sample_cov - cov) <= 4.0 * se_cov)

    def test_rejects_bad_count(self):
        model = moments.GaussianModel(mu=np.zeros(2), cov=np.eye(2))
        with pytest.raises(DomainError):
            mc.sample_mvn(model, 0, mc.SeededStream(seed=1))


class TestDirectionalSample:
    def test_validation(self):
        s = math.sqrt(0.5)
        ok = mc.DirectionalSample(np.array([[s, -s], [-s, s]]))
        assert ok.size == 2 and ok.dim == 2
        with pytest.raises(DomainError):
            mc.DirectionalSample(np.array([[1.0, 0.0]]))
        with pytest.raises(DomainError):
            mc.DirectionalSample(np.array([[2 * s, -2 * s]]))
        with pytest.raises(DimensionError):
            mc.DirectionalSample(np.array([s, -s]))
        with pytest.raises(DomainError):
            mc.DirectionalSample(np.array([[np.nan, 0.0]]))

    def test_rows_readonly(self):
        s = math.sqrt(0.5)
        d = mc.DirectionalSample(np.array([[s, -s]]))
        with pytest.raises(ValueError):
            d.matrix[0, 0] = 1.0
        assert d.points()[0].coords == pytest.approx([s, -s])


class TestEstimators:
    @staticmethod
    def toy_sample(n_rows: int = 500, dim: int = 4, seed: int = 21):
        model = moments.GaussianModel(
            mu=np.array([0.6, 0.1, -0.2, 0.0]), cov=np.eye(dim)
        )
        return mc.sample_chi(model, n_rows, mc.SeededStream(seed=seed))

    def test_md_mrl_on_identical_rows(self):
        u = sphere.standardize([3.0, -1.0, 0.0]).coords
        sample = mc.DirectionalSample(np.tile(u, (10, 1)))
        summary = mc.estimate_md_mrl(sample)
        assert summary.mrl == pytest.approx(1.0, abs=1e-12)
        assert summary.md.coords == pytest.approx(u, abs=1e-12)

    def test_md_mrl_on_balanced_pair(self):
        u = sphere.standardize([1.0, 0.0, -1.0]).coords
        sample = mc.DirectionalSample(np.vstack([u, -u]))
        with pytest.raises(UndefinedMeanDirectionError) as exc:
            mc.estimate_md_mrl(sample)
        assert exc.value.mrl <= 1e-12

    def test_cov_identical_rows_is_zero(self):
        u = sphere.standardize([2.0, -3.0, 1.0]).coords
        sample = mc.DirectionalSample(np.tile(u, (5, 1)))
        assert np.max(np.abs(mc.estimate_cov(sample))) < 1e-15

    def test_cov_annihilates_constant_vector(self):
        sample = self.toy_sample()
        cov = mc.estimate_cov(sample)
        assert np.max(np.abs(cov @ np.ones(sample.dim))) < 1e-10
        assert np.max(np.abs(cov - cov.T)) == 0.0

    def test_scatter_trace_is_one(self):
        sample = self.toy_sample()
        scatter = mc.scatter_matrix(sample)
        assert np.trace(scatter) == pytest.approx(1.0, abs=1e-12)

    def test_scatter_single_point(self):
        u = sphere.standardize([1.0, 2.0, -3.0]).coords
        sample = mc.DirectionalSample(u[None, :])
        assert mc.scatter_matrix(sample) == pytest.approx(np.outer(u, u))

    def test_streaming_mrl_matches_materialized(self):
        model = moments.GaussianModel(
            mu=np.array([0.4, -0.1, 0.0]), cov=np.eye(3)
        )
        stream = mc.SeededStream(seed=31)
        direct = mc.estimate_md_mrl(mc.sample_chi(model, 5000, stream)).mrl
        streaming = mc.estimate_chi_mrl(model, 5000, stream)
        assert streaming == pytest.approx(direct, abs=1e-12)

    def test_streaming_mrl_threads_agree(self):
        model = moments.GaussianModel(mu=np.arange(3.0), cov=np.eye(3))
        stream = mc.SeededStream(seed=13)
        count = mc.SHARD_ROWS + 500
        a = mc.estimate_chi_mrl(model, count, stream, threads=1)
        b = mc.estimate_chi_mrl(model, count, stream, threads=3)
        assert a == b


class TestProjectedMomentsMC:
    def test_recovers_closed_forms(self):
        n, x, count = 3, 1.0, 200000
        res = mc.projected_moments_mc(n, x, count, mc.SeededStream(seed=101))
        assert res.count == count
        target_mean = np.zeros(n)
        target_mean[0] = specfun.varrho(n, x)
        assert np.all(
            np.abs(res.mean - target_mean) <= 4.0 * res.se_mean + 1e-12
        )
        target = np.diag(
            [specfun.f_var(n, x)] + [specfun.g_var(n, x)] * (n - 1)
        )
        assert np.all(np.abs(res.cov - target) <= 4.0 * res.se_cov + 1e-12)

    def test_zero_signal_is_uniform(self):
        n, count = 4, 100000
        res = mc.projected_moments_mc(n, 0.0, count, mc.SeededStream(seed=55))
        assert np.all(np.abs(res.mean) <= 4.0 * res.se_mean + 1e-12)
        target = np.eye(n) / n
        assert np.all(np.abs(res.cov - target) <= 4.0 * res.se_cov + 1e-12)

    def test_rejects_bad_inputs(self):
        s = mc.SeededStream(seed=1)
        with pytest.raises(DimensionError):
            mc.projected_moments_mc(1, 0.5, 100, s)
        with pytest.raises(DomainError):
            mc.projected_moments_mc(3, -0.5, 100, s)
        with pytest.raises(DomainError):
            mc.projected_moments_mc(3, math.inf, 100, s)


class TestKDE:
    def test_fixed_bandwidth_honored(self):
        vals = np.array([0.0, 1.0, 2.0, 3.0])
        est = mc.kde(vals, bandwidth=0.5)
        assert est.bandwidth == 0.5
        assert est.grid[0] == pytest.approx(-1.5)
        assert est.grid[-1] == pytest.approx(4.5)
        assert est.grid.size == 512

    def test_standard_normal_density(self):
        vals = mc._NormalSource(mc.SeededStream(seed=2024)).take(100000)
        est = mc.kde(vals)
        mass = float(np.trapezoid(est.density, est.grid))
        assert abs(mass - 1.0) <= 0.01
        at_zero = est.density[np.argmin(np.abs(est.grid))]
        assert at_zero == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=0.05)

    def test_zero_spread_rejected(self):
        with pytest.raises(DegenerateInputError):
            mc.kde(np.ones(50))

    def test_bad_inputs_rejected(self):
        with pytest.raises(DomainError):
            mc.kde(np.array([1.0]))
        with pytest.raises(DomainError):
            mc.kde(np.array([1.0, np.inf]))
        with pytest.raises(DomainError):
            mc.kde(np.array([1.0, 2.0]), bandwidth=-1.0)

    def test_density_estimate_mass_guard(self):
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(DomainError):
            mc.DensityEstimate(grid=grid, density=np.full(11, 3.0), bandwidth=1.0)


class TestICDistribution:
    def test_two_assets_is_two_point(self):
        model = moments.GaussianModel(mu=np.array([0.5, 0.0]), cov=np.eye(2))
        est, values = mc.ic_distribution(
            model, "chi_mu", 4000, mc.SeededStream(seed=8)
        )
        assert set(np.round(values, 12)) <= {-1.0, 1.0}
        mrl = specfun.varrho(1, model.mu[0] / math.sqrt(2.0))
        se = math.sqrt(1.0 - mrl * mrl) / math.sqrt(values.size)
        assert abs(values.mean() - mrl) <= 4.0 * se
        assert est.grid.size == 512

    def test_chi_mu_mean_matches_resultant_curve(self):
        n = 10
        rng = np.random.default_rng(6)
        mu = rng.standard_normal(n) * 0.01
        model = moments.HomoscedasticModel(mu=mu, sigma=0.02, rho=0.1)
        summary = moments.md_mrl_homoscedastic(model)
        _, values = mc.ic_distribution(
            model.to_gaussian(), "chi_mu", 100000, mc.SeededStream(seed=41)
        )
        var_t = moments.variance_T(summary.md, summary.cov_chi)
        se = math.sqrt(var_t / values.size)
        assert abs(values.mean() - summary.mrl) <= 4.0 * se

    def test_sample_md_mean_equals_sample_mrl(self):
        model = moments.GaussianModel(
            mu=np.array([0.3, 0.0, -0.3]), cov=np.eye(3)
        )
        stream = mc.SeededStream(seed=17)
        _, values = mc.ic_distribution(model, "sample_md", 3000, stream)
        mrl_hat = mc.estimate_md_mrl(mc.sample_chi(model, 3000, stream)).mrl
        assert values.mean() == pytest.approx(mrl_hat, abs=1e-10)

    def test_deterministic(self):
        model = moments.GaussianModel(mu=np.array([0.2, -0.2]), cov=np.eye(2))
        s = mc.SeededStream(seed=3)
        _, v1 = mc.ic_distribution(model, "chi_mu", 2000, s)
        _, v2 = mc.ic_distribution(model, "chi_mu", 2000, s)
        assert np.array_equal(v1, v2)

    def test_degenerate_mean_rejected_for_chi_mu(self):
        model = moments.GaussianModel(mu=np.ones(3), cov=np.eye(3))
        with pytest.raises(UndefinedMeanDirectionError):
            mc.ic_distribution(model, "chi_mu", 100, mc.SeededStream(seed=1))

    def test_bad_mode_rejected(self):
        model = moments.GaussianModel(mu=np.zeros(2), cov=np.eye(2))
        with pytest.raises(DomainError):
            mc.ic_distribution(model, "other", 100, mc.SeededStream(seed=1))


class TestPerturbationExperiment:
    MU = np.array([1.0, 0.2, -0.5])
    COV = 0.25 * np.eye(3)

    def test_mu1_axis_tracks_closed_form(self):
        factors = [0.5, 1.0, 2.0]
        points = mc.md_perturbation_experiment(
            self.MU, self.COV, "mu1", factors, 20000, mc.SeededStream(seed=70)
        )
        assert [p.factor for p in points] == factors
        for p in points:
            mu_k = self.MU.copy()
            mu_k[0] *= p.factor
            model = moments.HomoscedasticModel(mu=mu_k, sigma=0.5, rho=0.0)
            truth = moments.md_mrl_homoscedastic(model)
            cosine = float(p.md.coords @ truth.md.coords)
            assert cosine > math.cos(math.radians(2.0))
            assert p.mrl == pytest.approx(truth.mrl, abs=0.02)

    def test_sigma1_axis_decreases_concentration(self):
        points = mc.md_perturbation_experiment(
            self.MU, self.COV, "sigma1", [1.0, 3.0], 20000,
            mc.SeededStream(seed=71),
        )
        assert points[1].mrl < points[0].mrl

    def test_deterministic(self):
        a = mc.md_perturbation_experiment(
            self.MU, self.COV, "mu1", [1.0, 2.0], 2000, mc.SeededStream(seed=5)
        )
        b = mc.md_perturbation_experiment(
            self.MU, self.COV, "mu1", [1.0, 2.0], 2000, mc.SeededStream(seed=5)
        )
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.md.coords, pb.md.coords)
            assert pa.mrl == pb.mrl

    def test_factor_streams_are_independent_of_order(self):
        stream = mc.SeededStream(seed=9)
        both = mc.md_perturbation_experiment(
            self.MU, self.COV, "mu1", [1.0, 2.0], 3000, stream
        )
        # factor j alone on stream_id + j * STREAM_BLOCK reproduces it
        solo = mc.md_perturbation_experiment(
            self.MU, self.COV, "mu1", [2.0], 3000,
            stream.shifted(mc.STREAM_BLOCK),
        )
        assert np.array_equal(both[1].md.coords, solo[0].md.coords)
        assert both[1].mrl == solo[0].mrl

    def test_rejects_bad_arguments(self):
        s = mc.SeededStream(seed=1)
        with pytest.raises(DomainError):
            mc.md_perturbation_experiment(self.MU, self.COV, "mu9", [1.0], 10, s)
        with pytest.raises(DomainError):
            mc.md_perturbation_experiment(self.MU, self.COV, "mu1", [], 10, s)
        with pytest.raises(DomainError):
            mc.md_perturbation_experiment(self.MU, self.COV, "mu1", [-1.0], 10, s)


class TestClosedFormAgreement:
    @pytest.mark.parametrize(
        "n,sigma,rho,scale",
        [(3, 1.0, 0.0, 1.0), (5, 0.5, 0.3, 0.4), (10, 0.02, 0.12, 0.003)],
    )
    def test_mrl_and_cov_within_mc_error(self, n, sigma, rho, scale):
        rng = np.random.default_rng(1000 + n)
        mu = rng.standard_normal(n) * scale
        model = moments.HomoscedasticModel(mu=mu, sigma=sigma, rho=rho)
        truth = moments.md_mrl_homoscedastic(model)
        count = 200000
        sample = mc.sample_chi(
            model.to_gaussian(), count, mc.SeededStream(seed=500 + n)
        )
        est = mc.estimate_md_mrl(sample)
        # resultant-length spread: coordinate variances sum to 1 - mrl^2
        se_mrl = math.sqrt((1.0 - truth.mrl ** 2) / count)
        assert abs(est.mrl - truth.mrl) <= 4.0 * se_mrl
        cov_hat = mc.estimate_cov(sample)
        # conservative entrywise error scale for bounded coordinates
        se_cov = 4.0 / math.sqrt(count)
        assert np.max(np.abs(cov_hat - truth.cov_chi)) <= se_cov
