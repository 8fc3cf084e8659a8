import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy.stats import binom

from ldlab import models
from ldlab.orthopoly import make_krawtchouk_basis, make_weight_law


class TestSampling:
    def test_boolean_mean_weight(self):
        spec = models.boolean_null(8, Fraction(1, 2))
        batch = models.sample(spec, 100_000, seed=1)
        w = (batch.payload > 0).sum(axis=1)
        se = math.sqrt(8 * 0.25 / batch.count)
        assert abs(w.mean() - 4.0) <= 3 * se

    def test_gauss_vector_norm(self):
        spec = models.gauss_vector_null(100)
        batch = models.sample(spec, 10_000, seed=2)
        sq = (batch.payload**2).sum(axis=1)
        se = sq.std(ddof=1) / math.sqrt(batch.count)
        assert abs(sq.mean() - 100.0) <= 3 * se

    def test_wigner_spike_lambda_zero_degenerates(self):
        null = models.sample(models.gauss_wigner_null(12), 4000, seed=3)
        spike = models.sample(models.wigner_spike_spec(12, 0.0, 4), 4000, seed=4)
        for moment in [1, 2, 4]:
            a = (null.payload**moment).mean(axis=0)
            b = (spike.payload**moment).mean(axis=0)
            pooled_se = np.sqrt(
                (null.payload**moment).var(axis=0) / 4000
                + (spike.payload**moment).var(axis=0) / 4000
            )
            assert np.all(np.abs(a - b) <= 5 * pooled_se + 1e-12)

    def test_determinism_bit_for_bit(self):
        spec = models.biased_product_spec(32, 0.3, 0.05)
        b1 = models.sample(spec, 10_000, seed=7)
        b2 = models.sample(spec, 10_000, seed=7)
        assert np.array_equal(b1.payload, b2.payload)
        b3 = models.sample(spec, 10_000, seed=8)
        assert not np.array_equal(b1.payload, b3.payload)

    def test_weight_conditioned_law(self):
        spec = models.weight_conditioned_spec(12, 0.5, [3, 4, 5])
        batch = models.sample(spec, 20_000, seed=5)
        w = (batch.payload > 0).sum(axis=1)
        assert set(np.unique(w)) <= {3, 4, 5}
        law = models.planted_weight_law(spec)
        freq = np.bincount(w, minlength=13) / batch.count
        assert np.abs(freq - law.pmf).max() <= 0.02

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            models.biased_product_spec(10, 0.5, 0.6)
        with pytest.raises(ValueError):
            models.wigner_spike_spec(10, 1.0, 11)
        with pytest.raises(ValueError):
            models.sample(models.gauss_vector_null(10), 0, seed=0)


class TestBooleanNoise:
    def test_eps_zero_identity(self, rng):
        x = rng.choice([-1, 1], size=(50, 16)).astype(np.int8)
        assert np.array_equal(models.apply_boolean_noise(x, 0.0, 0.3, seed=0), x)

    def test_eps_one_reproduces_null_weight_law(self):
        # with full resampling the output weight law is exactly Bin(n, gamma)
        n, gamma = 8, 0.3
        x = np.ones((200_000, n), dtype=np.int8)  # worst-case input: all +1
        noisy = models.apply_boolean_noise(x, 1.0, gamma, seed=11)
        w = (noisy > 0).sum(axis=1)
        want = binom.pmf(np.arange(n + 1), n, gamma)
        freq = np.bincount(w, minlength=n + 1) / len(w)
        # exact oracle on the law + MC goodness of fit at 5 sigma per cell
        law = models.noisy_weight_law(
            make_weight_law(n, gamma).with_pmf(np.eye(n + 1)[n]), 1.0
        )
        assert np.abs(law.pmf - want).max() <= 1e-12
        se = np.sqrt(want * (1 - want) / len(w))
        assert np.all(np.abs(freq - want) <= 5 * se + 1e-4)

    def test_degree_attenuation_per_coordinate(self):
        # E over the channel of chi_S(noisy x) = (1-eps)^{|S|} chi_S(x), exactly:
        # each coordinate contributes (1-eps) chi_i(x) + eps * 0
        gamma, eps = 0.3, 0.4
        scale = 2 * math.sqrt(gamma * (1 - gamma))
        x = np.array([1, -1, 1, 1, -1, -1])
        chi = (x - (2 * gamma - 1)) / scale
        for S in [(0,), (0, 1), (1, 3, 4), (0, 1, 2, 5)]:
            # exact channel expectation coordinate by coordinate
            per_coord = []
            for i in S:
                keep = (1 - eps) * chi[i]
                fresh = eps * (gamma * (1 - (2 * gamma - 1)) / scale
                               + (1 - gamma) * (-1 - (2 * gamma - 1)) / scale)
                per_coord.append(keep + fresh)
            want = np.prod(per_coord)
            assert want == pytest.approx((1 - eps) ** len(S) * np.prod(chi[list(S)]), abs=1e-12)

    def test_noise_semigroup_boolean(self):
        eps1, eps2, gamma, n = 0.3, 0.4, 0.3, 10
        x = np.ones((120_000, n), dtype=np.int8)
        two = models.apply_boolean_noise(
            models.apply_boolean_noise(x, eps1, gamma, seed=1), eps2, gamma, seed=2
        )
        one = models.apply_boolean_noise(x, models.compose_eps(eps1, eps2), gamma, seed=3)
        for moment in range(1, 5):
            wa = ((two > 0).sum(axis=1).astype(float)) ** moment
            wb = ((one > 0).sum(axis=1).astype(float)) ** moment
            se = math.sqrt(wa.var() / len(wa) + wb.var() / len(wb))
            assert abs(wa.mean() - wb.mean()) <= 3.5 * se


class TestOUNoise:
    def test_eps_zero_identity(self, rng):
        x = rng.normal(size=(10, 7))
        assert np.array_equal(models.apply_ou_noise(x, 0.0, seed=0), x)

    def test_gaussian_stability(self):
        batch = models.sample(models.gauss_vector_null(50), 40_000, seed=6)
        noisy = models.apply_ou_noise(batch.payload, 0.37, seed=7)
        v = (noisy**2).mean(axis=0)
        se = math.sqrt(2.0 / 40_000)
        assert np.all(np.abs(v - 1.0) <= 5 * se)

    def test_eps_one_is_null(self):
        x = np.full((30_000, 20), 3.0)
        noisy = models.apply_ou_noise(x, 1.0, seed=8)
        assert abs(noisy.mean()) <= 3 * (1.0 / math.sqrt(30_000 * 20))
        assert abs((noisy**2).mean() - 1.0) <= 5 * math.sqrt(2.0 / (30_000 * 20))

    def test_matrix_noise_keeps_symmetry(self, sym_matrix):
        m = sym_matrix(9)
        noisy = models.apply_ou_noise(m, 0.5, seed=9)
        assert np.allclose(noisy, noisy.T)

    def test_ou_semigroup_moments(self):
        eps1, eps2 = 0.2, 0.5
        x = np.full((150_000,), 1.7)
        two = models.apply_ou_noise(models.apply_ou_noise(x, eps1, seed=1), eps2, seed=2)
        one = models.apply_ou_noise(x, models.compose_eps(eps1, eps2), seed=3)
        for moment in range(1, 5):
            a, b = two**moment, one**moment
            se = math.sqrt(a.var() / len(a) + b.var() / len(b))
            assert abs(a.mean() - b.mean()) <= 3.5 * se


class TestNoisyWeightLaw:
    def test_eps_zero_identity(self):
        pi = make_weight_law(12, 0.3)
        out = models.noisy_weight_law(pi, 0.0)
        assert np.abs(out.pmf - pi.pmf).max() <= 1e-14

    def test_eps_one_turns_anything_into_null(self):
        pi = make_weight_law(12, 0.3).with_pmf(np.eye(13)[2])
        out = models.noisy_weight_law(pi, 1.0)
        assert np.abs(out.pmf - make_weight_law(12, 0.3).pmf).max() <= 1e-13

    def test_point_mass_formula_and_simulation(self):
        # all-ones string, eps = 1/2, gamma = 1/2: noisy weight ~ Bin(10, 3/4)
        n = 10
        pi = make_weight_law(n, 0.5).with_pmf(np.eye(n + 1)[n])
        out = models.noisy_weight_law(pi, 0.5)
        want = binom.pmf(np.arange(n + 1), n, 0.75)
        assert np.abs(out.pmf - want).max() <= 1e-13
        x = np.ones((1_000_000, n), dtype=np.int8)
        noisy = models.apply_boolean_noise(x, 0.5, 0.5, seed=13)
        freq = np.bincount((noisy > 0).sum(axis=1), minlength=n + 1) / len(x)
        se = np.sqrt(want * (1 - want) / len(x))
        assert np.all(np.abs(freq - want) <= 4 * se + 1e-5)

    def test_matches_empirical_channel(self):
        # planted biased law, moderate eps: law vs 1e6-draw simulation
        n, gamma, eps = 10, 0.3, 0.35
        spec = models.biased_product_spec(n, gamma, 0.1)
        law = models.noisy_weight_law(models.planted_weight_law(spec), eps)
        batch = models.sample(spec, 1_000_000, seed=14)
        noisy = models.apply_boolean_noise(batch.payload, eps, gamma, seed=15)
        freq = np.bincount((noisy > 0).sum(axis=1), minlength=n + 1) / batch.count
        se = np.sqrt(law.pmf * (1 - law.pmf) / batch.count)
        assert np.all(np.abs(freq - law.pmf) <= 4 * se + 1e-5)


class TestDataProcessing:
    def test_post_map_contracts_tv_exactly(self):
        # coarse-grain the weight into buckets: TV can only shrink
        from ldlab.binomtv import exact_tv

        n, gamma = 40, 0.3
        nu = make_weight_law(n, gamma)
        pi = models.planted_weight_law(models.biased_product_spec(n, gamma, 0.08))
        tv_full = exact_tv(nu, pi)
        for width in [2, 5, 8]:
            buckets = np.arange(n + 1) // width
            pa = np.bincount(buckets, weights=nu.pmf)
            pb = np.bincount(buckets, weights=pi.pmf)
            tv_coarse = 0.5 * np.abs(pa - pb).sum()
            assert tv_coarse <= tv_full + 1e-12


class TestHypercontractivity:
    def test_fourth_moment_growth(self, rng):
        # E[p^4] <= C^d E[p^2]^2 with C = 4 (fit on this corpus gives ~2.6)
        n = 10
        X = np.array(list(product([-1, 1], repeat=n)), dtype=float)
        for gamma in [0.3, 0.5]:
            logw = ((X > 0) * math.log(gamma) + (X < 0) * math.log(1 - gamma)).sum(axis=1)
            w = np.exp(logw)
            chi = (X - (2 * gamma - 1)) / (2 * math.sqrt(gamma * (1 - gamma)))
            for _ in range(60):
                d = int(rng.integers(1, 4))
                vals = np.zeros(len(X))
                for _ in range(int(rng.integers(1, 5))):
                    S = rng.choice(n, size=d, replace=False)
                    vals += rng.normal() * np.prod(chi[:, S], axis=1)
                m2 = float((w * vals**2).sum())
                m4 = float((w * vals**4).sum())
                assert m4 <= 4.0**d * m2**2 + 1e-12


class TestQuadratureProduct:
    def test_two_point_rule(self):
        spec = models.quadrature_product_spec(2, 5)
        batch = models.sample(spec, 2000, seed=16)
        assert set(np.round(np.unique(batch.payload), 12)) == {-1.0, 1.0}

    def test_three_point_rule_nodes_weights(self):
        from ldlab.quadrature import gauss_hermite_rule

        x, w = gauss_hermite_rule(3)
        assert np.allclose(sorted(x), [-math.sqrt(3), 0.0, math.sqrt(3)], atol=1e-12)
        assert np.allclose(sorted(w), sorted([1 / 6, 2 / 3, 1 / 6]), atol=1e-12)

    def test_moment_matching(self):
        # m-point rule matches N(0,1) moments through degree 2m-1 exactly
        from ldlab.quadrature import gauss_hermite_rule

        for m in [2, 3, 5]:
            x, w = gauss_hermite_rule(m)
            assert abs(np.sum(w * x)) <= 1e-12
            assert abs(np.sum(w * x**2) - 1.0) <= 1e-12
            for deg in range(2 * m):
                gaussian = 0.0 if deg % 2 else math.prod(range(1, deg, 2))
                assert np.sum(w * x**deg) == pytest.approx(gaussian, abs=1e-9)


class TestSerialization:
    @pytest.mark.parametrize(
        "spec_factory",
        [
            lambda: models.boolean_null(13, Fraction(3, 10)),
            lambda: models.gauss_vector_null(7),
            lambda: models.gauss_wigner_null(5),
        ],
    )
    def test_roundtrip(self, tmp_path, spec_factory):
        spec = spec_factory()
        batch = models.sample(spec, 50, seed=17)
        path = models.save_batch(tmp_path / "batch.bin", batch)
        loaded = models.load_batch(path)
        assert loaded.domain == batch.domain
        assert loaded.count == batch.count
        assert np.array_equal(loaded.payload, batch.payload)
        assert loaded.seed == batch.seed

    def test_csv_export(self, tmp_path):
        batch = models.sample(models.gauss_vector_null(3), 4, seed=18)
        path = models.batch_to_csv(tmp_path / "batch.csv", batch)
        lines = open(path).read().strip().splitlines()
        assert len(lines) == 5
        with pytest.raises(ValueError):
            models.batch_to_csv(tmp_path / "big.csv", batch, limit=2)
