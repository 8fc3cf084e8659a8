import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldlab.orthopoly import (
    hermite_eval,
    hermite_vandermonde,
    krawtchouk_eval,
    make_krawtchouk_basis,
    make_weight_law,
    verify_hermite_derivative,
    verify_hermite_orthonormality,
    verify_krawtchouk_bound,
    verify_krawtchouk_orthonormality,
)
from ldlab.quadrature import gauss_hermite_rule


class TestHermite:
    def test_h0_is_one(self):
        assert hermite_eval(0, 3.7) == 1.0

    def test_h1_is_identity(self):
        assert hermite_eval(1, 2.0) == 2.0

    def test_h2_at_zero(self):
        # He_2(x) = x^2 - 1 normalized by sqrt(2!)
        assert hermite_eval(2, 0.0) == pytest.approx(-1.0 / math.sqrt(2), abs=1e-15)

    def test_orthonormality_quadrature(self):
        assert verify_hermite_orthonormality(12) <= 1e-10

    def test_derivative_identity(self):
        # h_l' = sqrt(l) h_{l-1}, against central differences at step 1e-5
        assert verify_hermite_derivative(12, step=1e-5) <= 1e-6

    def test_high_degree_relative_accuracy(self):
        # recurrence vs 50-digit reference at k = 30, |x| <= 10
        import mpmath as mp

        xs = [-10.0, -3.3, 0.7, 9.9]
        with mp.workdps(50):
            for x in xs:
                want = float(mp.hermite(30, mp.mpf(x) / mp.sqrt(2)) * mp.mpf(2) ** mp.mpf(-15)
                             / mp.sqrt(mp.factorial(30)))
                got = hermite_eval(30, x)
                assert got == pytest.approx(want, rel=1e-10)

    def test_derivative_bound_variance_sandwich(self, rng):
        # Var[p(g)] <= E[p'(g)^2] <= k Var[p(g)] for random degree-<=8 polys
        x, w = gauss_hermite_rule(400)
        for _ in range(25):
            k = int(rng.integers(1, 9))
            c = rng.normal(size=k + 1)
            hv = hermite_vandermonde(x, k)
            p = c @ hv
            var = float(np.sum(w * p * p) - np.sum(w * p) ** 2)
            dc = np.array([c[l] * math.sqrt(l) for l in range(1, k + 1)])
            dp = dc @ hv[: k] if k >= 1 else np.zeros_like(x)
            e_dp2 = float(np.sum(w * dp * dp))
            assert var <= e_dp2 + 1e-10 * max(var, 1.0)
            assert e_dp2 <= k * var + 1e-10 * max(var, 1.0)


class TestWeightLaw:
    def test_small_explicit_support(self):
        law = make_weight_law(2, Fraction(1, 2))
        assert np.allclose(law.support_y, [-math.sqrt(2), 0.0, math.sqrt(2)])
        assert np.allclose(law.pmf, [0.25, 0.5, 0.25])

    @given(
        n=st.integers(min_value=1, max_value=300),
        num=st.integers(min_value=1, max_value=9),
    )
    @settings(max_examples=30, deadline=None)
    def test_centering_normalization(self, n, num):
        law = make_weight_law(n, Fraction(num, 10))
        assert abs(law.pmf.sum() - 1.0) <= 1e-12
        assert abs(law.moment_y(1)) <= 1e-12
        assert abs(law.moment_y(2) - 1.0) <= 1e-12

    def test_fourth_moment_kurtosis_oracle(self):
        # independent oracle: standardized binomial kurtosis 3 + (1-6pq)/(npq)
        n, gamma = 50, 0.3
        law = make_weight_law(n, gamma)
        pq = gamma * (1 - gamma)
        want = 3.0 + (1.0 - 6.0 * pq) / (n * pq)
        assert law.moment_y(4) == pytest.approx(want, abs=1e-12)
        # and the moment-comparison shape with k = 2: (2k-1)!! (1 + O(k^3/(gamma n)))
        assert law.moment_y(4) <= 3.0 * (1.0 + 8.0 / (gamma * n))

    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            make_weight_law(10, Fraction(0))
        with pytest.raises(ValueError):
            make_weight_law(10, Fraction(7, 7))

    def test_pointwise_lower_bound(self):
        # pmf >= (1/sqrt(2n)) exp(-y^2/2 - c |y|^3 / sqrt(gamma n)) with c = 0.5
        # (grid search on this corpus gives c ~= 0.11; 0.5 is the pinned cap)
        c = 0.5
        for n in [50, 500, 2000]:
            for gamma in [0.3, 0.5]:
                law = make_weight_law(n, gamma)
                y = law.support_y
                mask = np.abs(y) <= 2.0 * math.sqrt(math.log(n))
                lower = (
                    np.exp(-y[mask] ** 2 / 2 - c * np.abs(y[mask]) ** 3 / math.sqrt(gamma * n))
                    / math.sqrt(2 * n)
                )
                assert np.all(law.pmf[mask] >= lower)


class TestKrawtchouk:
    def test_kr0_kr1(self):
        basis = make_krawtchouk_basis(20, 0.3)
        assert krawtchouk_eval(basis, 0, 0.37) == 1.0
        # Gram-Schmidt against the exact law forces Kr_1(y) = y
        assert krawtchouk_eval(basis, 1, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_kr3_norm_by_enumeration(self):
        basis = make_krawtchouk_basis(20, 0.3)
        law = make_weight_law(20, 0.3)
        vals = basis.values(law.support_y, kmax=3)
        assert float(np.sum(law.pmf * vals[3] ** 2)) == pytest.approx(1.0, abs=1e-10)

    def test_orthonormality_enumeration(self):
        for n, gamma in [(10, 0.3), (20, 0.5), (50, 0.3)]:
            basis = make_krawtchouk_basis(n, gamma)
            law = make_weight_law(n, gamma)
            assert verify_krawtchouk_orthonormality(basis, law, amax=min(n, 12)) <= 1e-10

    def test_degree_rejections(self):
        basis = make_krawtchouk_basis(12, 0.3)
        with pytest.raises(ValueError):
            krawtchouk_eval(basis, 13, 0.0)
        with pytest.raises(ValueError):
            make_krawtchouk_basis(10, 0.3, kmax=11)

    def test_monomial_export_matches_recurrence(self, tmp_path, rng):
        basis = make_krawtchouk_basis(24, 0.3)
        table = basis.monomial_coefficients(kmax=8)
        ys = rng.uniform(-2, 2, size=5)
        for k in [2, 5, 8]:
            horner = np.polyval(list(reversed(table[k])), ys)
            assert np.allclose(horner, basis.values(ys, kmax=k)[k], rtol=1e-10, atol=1e-12)
        path = basis.export_coefficients_csv(tmp_path / "coeffs.csv", kmax=8)
        lines = open(path).read().strip().splitlines()
        assert len(lines) == 10  # header + degrees 0..8

    def test_bound_edge_linear_case(self):
        # Kr_1(y) = y, so the ratio is |y| e^{-y^2/4} <= 0.858; grid wider than
        # the validity window must be flagged, not rejected
        basis = make_krawtchouk_basis(200, 0.3, kmax=100)
        rep = verify_krawtchouk_bound(basis, 1, np.linspace(-2, 2, 81))
        assert rep["max_ratio"] <= 1.01
        assert rep["grid_points_outside_validity"] > 0

    def test_bound_moderate_degree(self):
        basis = make_krawtchouk_basis(200, 0.3, kmax=100)
        rep = verify_krawtchouk_bound(basis, 50, np.linspace(-2.4, 2.4, 97))
        assert rep["max_ratio"] <= 3.0

    def test_bound_no_overflow_small_n(self):
        basis = make_krawtchouk_basis(30, 0.3, kmax=15)
        rep = verify_krawtchouk_bound(basis, 15, np.linspace(-1.7, 1.7, 69))
        assert math.isfinite(rep["max_ratio"])

    def test_bound_degree_precondition(self):
        basis = make_krawtchouk_basis(30, 0.3, kmax=20)
        with pytest.raises(ValueError):
            verify_krawtchouk_bound(basis, 16, np.array([0.0]))
