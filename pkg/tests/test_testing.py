import numpy as np
import pytest
from scipy.stats import kstest

from rdpgtest.errors import DegenerateRowError, InsufficientSampleError
from rdpgtest.harness import two_block_pair, uniform_box_pair
from rdpgtest.mmd import GaussianKernel, u_statistic
from rdpgtest.model import sample_latent, sample_rdpg
from rdpgtest.streams import substream
from rdpgtest.testing import (
    TestConfig,
    _reflection_search,
    p_value,
    permutation_null,
    preprocess,
    two_sample_point_test,
    two_sample_test,
)

from util import random_cloud

SPEC = GaussianKernel(0.5)


def _two_graphs(epsilon, n, seed):
    f, g = two_block_pair(epsilon)
    rng = substream(seed)
    a = sample_rdpg(sample_latent(f, n, rng), 1.0, rng)
    b = sample_rdpg(sample_latent(g, n, rng), 1.0, rng)
    return a, b


class TestPreprocess:
    def test_identity_returns_rows_unchanged(self):
        x = np.array([[0.1, 0.2], [0.3, 0.4]])
        out, info = preprocess(x, "identity")
        assert np.array_equal(out, x) and info == {}

    def test_scaling_with_unit_frame(self):
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        out, info = preprocess(x, "scaling")
        assert np.allclose(out, x) and info["scale"] == pytest.approx(1.0)

    def test_projection_row(self):
        out, _ = preprocess(np.array([[3.0, 4.0]]), "projection")
        assert np.allclose(out, [[0.6, 0.8]])

    def test_sparse_rescaling(self):
        out, info = preprocess(np.array([[0.1, 0.2]]), "sparse", sparsity=0.25)
        assert np.allclose(out, [[0.2, 0.4]]) and info["sparsity"] == 0.25

    def test_projection_degenerate_rows(self):
        x = np.array([[0.5, 0.5], [0.0, 0.0], [1e-9, 0.0]])
        with pytest.raises(DegenerateRowError) as err:
            preprocess(x, "projection", eps_floor=1e-6)
        assert err.value.vertices == [1, 2]

    def test_sparse_needs_factor(self):
        with pytest.raises(ValueError, match="factor"):
            preprocess(np.ones((2, 2)) * 0.1, "sparse")

    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="variant"):
            preprocess(np.ones((2, 2)), "bogus")


class TestPermutationNull:
    def test_identical_points_give_zero(self):
        pooled = np.tile([0.2, 0.3], (10, 1))
        null = permutation_null(pooled, 5, 5, SPEC, 20, substream(70))
        assert np.allclose(null, 0.0, atol=1e-12)

    def test_deterministic_given_seed(self):
        rng = substream(71)
        pooled = random_cloud(6, 2, rng)
        a = permutation_null(pooled, 3, 3, SPEC, 10, substream(72))
        b = permutation_null(pooled, 3, 3, SPEC, 10, substream(72))
        assert np.array_equal(a, b)

    def test_matches_direct_statistic(self):
        # The aggregated kernel-matrix path must agree with recomputing the
        # statistic on each permuted split.
        rng = substream(73)
        pooled = random_cloud(17, 3, rng)
        n, m = 9, 8
        null = permutation_null(pooled, n, m, SPEC, 25, substream(74))
        check_rng = substream(74)
        for b in range(25):
            perm = check_rng.permutation(17)
            direct = u_statistic(SPEC, pooled[perm[:n]], pooled[perm[n:]])
            assert null[b] == pytest.approx(direct, abs=1e-10)

    def test_mean_zero_under_exchangeability(self):
        rng = substream(75)
        pooled = random_cloud(30, 2, rng)
        null = permutation_null(pooled, 15, 15, SPEC, 2000, substream(76))
        se = null.std(ddof=1) / np.sqrt(null.size)
        assert abs(null.mean()) <= 4.0 * se

    def test_pool_size_must_match(self):
        with pytest.raises(ValueError, match="pool"):
            permutation_null(np.zeros((5, 2)), 3, 3, SPEC, 5, substream(77))

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSampleError):
            permutation_null(np.zeros((3, 2)), 1, 2, SPEC, 5, substream(78))


class TestPValue:
    def test_observed_above_all(self):
        assert p_value(10.0, np.zeros(199)) == pytest.approx(1.0 / 200.0)

    def test_observed_below_all(self):
        assert p_value(-1.0, np.zeros(199)) == 1.0

    def test_ties_count_toward_null(self):
        assert p_value(0.5, np.full(99, 0.5)) == 1.0

    def test_empty_null_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            p_value(0.0, [])


class TestConfigValidation:
    def test_variant_checked(self):
        with pytest.raises(ValueError, match="variant"):
            TestConfig(variant="weird")

    def test_permutations_positive(self):
        with pytest.raises(ValueError, match="permutations"):
            TestConfig(permutations=0)

    def test_alpha_open_interval(self):
        with pytest.raises(ValueError, match="alpha"):
            TestConfig(alpha_level=1.0)

    def test_sparse_requires_factors(self):
        with pytest.raises(ValueError, match="sparsity_x"):
            TestConfig(variant="sparse")
        cfg = TestConfig(variant="sparse", sparsity_x=0.5, sparsity_y=0.4)
        assert cfg.sparsity_x == 0.5


class TestReflectionSearch:
    def test_finds_mirroring(self):
        f, _ = two_block_pair(0.0)
        rng = substream(79)
        x = sample_latent(f, 150, rng).X
        y = sample_latent(f, 150, rng).X
        mirrored = y * np.array([1.0, -1.0])
        signs, _ = _reflection_search(SPEC, x, mirrored)
        assert np.array_equal(signs, [1.0, -1.0])
        aligned = u_statistic(SPEC, x, mirrored * signs)
        assert aligned == pytest.approx(u_statistic(SPEC, x, y), abs=1e-12)
        assert aligned < u_statistic(SPEC, x, mirrored)


class TestTwoSampleTest:
    def test_report_fields_and_determinism(self):
        a, b = _two_graphs(0.0, 60, seed=80)
        cfg = TestConfig(d=2, permutations=99, seed=81)
        first = two_sample_test(a, b, cfg)
        second = two_sample_test(a, b, cfg)
        assert first.statistic == second.statistic
        assert np.array_equal(first.null_values, second.null_values)
        assert first.n == first.m == 60
        assert first.rho == pytest.approx(0.5)
        assert first.scaled_statistic == pytest.approx(120 * first.statistic)
        assert 1.0 / 100.0 <= first.p_value <= 1.0
        assert first.reject == (first.p_value <= cfg.alpha_level)
        assert first.null_values.size == 99
        keys = set(first.to_dict())
        assert {"statistic", "scaled_statistic", "p_value", "n", "m", "rho",
                "variant", "kernel", "B", "seed"} <= keys
        assert "p_value=" in first.format_kv()

    def test_detects_strong_alternative(self):
        a, b = _two_graphs(0.3, 150, seed=82)
        report = two_sample_test(a, b, TestConfig(d=2, permutations=100, seed=83))
        assert report.reject and report.p_value == pytest.approx(1.0 / 101.0)

    def test_dimension_cannot_exceed_graph(self):
        a, b = _two_graphs(0.0, 20, seed=84)
        with pytest.raises(ValueError, match="exceeds"):
            two_sample_test(a, b, TestConfig(d=25))

    def test_median_bandwidth_resolved(self):
        a, b = _two_graphs(0.0, 50, seed=85)
        cfg = TestConfig(d=2, kernel=GaussianKernel(None), permutations=50, seed=86)
        report = two_sample_test(a, b, cfg)
        assert report.kernel.startswith("gaussian(sigma=")
        assert "median" not in report.kernel

    def test_scaling_variant_records_factors(self):
        a, b = _two_graphs(0.0, 50, seed=87)
        cfg = TestConfig(variant="scaling", d=2, permutations=50, seed=88)
        report = two_sample_test(a, b, cfg)
        assert report.preprocessing["scale_x"] > 0
        assert report.preprocessing["scale_y"] > 0

    def test_sparse_variant_runs(self):
        f, _ = two_block_pair(0.0)
        rng = substream(89)
        a = sample_rdpg(sample_latent(f, 80, rng), 0.5, rng)
        b = sample_rdpg(sample_latent(f, 80, rng), 0.5, rng)
        cfg = TestConfig(variant="sparse", d=2, permutations=50, seed=90,
                         sparsity_x=0.5, sparsity_y=0.5)
        report = two_sample_test(a, b, cfg)
        assert report.preprocessing["sparsity_x"] == 0.5


class TestExactInvariances:
    def test_scaling_statistic_ignores_global_scale(self):
        rng = substream(91)
        for trial in range(10):
            x = random_cloud(20, 2, rng)
            y = random_cloud(15, 2, rng)
            c = float(rng.uniform(0.1, 5.0))
            base = u_statistic(SPEC, preprocess(x, "scaling")[0], preprocess(y, "scaling")[0])
            scaled = u_statistic(
                SPEC, preprocess(x, "scaling")[0], preprocess(c * y, "scaling")[0]
            )
            assert scaled == pytest.approx(base, abs=1e-12)

    def test_projection_statistic_ignores_row_scaling(self):
        rng = substream(92)
        for trial in range(10):
            x = random_cloud(18, 3, rng) + 0.05
            y = random_cloud(12, 3, rng) + 0.05
            d = rng.uniform(0.2, 3.0, size=18)
            base = u_statistic(
                SPEC, preprocess(x, "projection")[0], preprocess(y, "projection")[0]
            )
            scaled = u_statistic(
                SPEC,
                preprocess(d[:, None] * x, "projection")[0],
                preprocess(y, "projection")[0],
            )
            assert scaled == pytest.approx(base, abs=1e-12)


class TestPointTest:
    def test_null_p_values_roughly_uniform(self):
        # A continuous null keeps the statistic free of mass ties; a point
        # mass mixture would discretize the permutation distribution.
        f, _ = uniform_box_pair(0.0)
        cfg = TestConfig(d=2, permutations=60, seed=0)
        pvals = []
        for r in range(200):
            rng = substream(93, r)
            x = f.sample(40, rng)
            y = f.sample(40, rng)
            pvals.append(two_sample_point_test(x, y, cfg, rng=rng).p_value)
        assert kstest(pvals, "uniform").statistic <= 0.12

    def test_separates_distributions(self):
        f, g = two_block_pair(0.3)
        rng = substream(94)
        report = two_sample_point_test(
            f.sample(200, rng), g.sample(200, rng), TestConfig(d=2, seed=95)
        )
        assert report.reject
