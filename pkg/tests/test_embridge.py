import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaddigits.densities import (
    Density,
    benford,
    builtin_densities,
    halfnormal,
    lognormal,
    ratio_uniforms,
    uniform,
    weibull,
)
from leaddigits.digitcore import canonicalize, empirical_block_freq
from leaddigits.embridge import (
    as_density,
    decade_plan,
    em_decompose,
    euler_maclaurin_first_order,
    profile_from_density,
    rho_integral,
)
from leaddigits.errors import ConvergenceError, DomainError, NormalizationError, TruncationError
from leaddigits.profiles import (
    WindowSpec,
    ratio_uniforms_profile,
    rho_from_profile,
    windowed_profile_from_cdf,
)


class TestRhoIntegral:
    def test_examples(self):
        assert rho_integral(benford(), 1) == pytest.approx(math.log10(2), abs=1e-14)
        assert rho_integral(ratio_uniforms(), 1) == pytest.approx(1 / 3, abs=1e-14)
        assert rho_integral(uniform(), 2) == pytest.approx(1 / 9, abs=1e-14)

    def test_multi_digit_blocks(self):
        # uniform on (0, 1): every m-digit block has mass 1/(9 10^(m-1))
        for k in (10, 57, 314, 9999):
            m = len(str(k))
            assert rho_integral(uniform(), k) == pytest.approx(1 / (9 * 10 ** (m - 1)), rel=1e-12)

    @pytest.mark.parametrize("f", builtin_densities(), ids=lambda f: f.name)
    def test_first_digits_sum_to_one(self, f):
        assert math.fsum(rho_integral(f, k) for k in range(1, 10)) == pytest.approx(1.0, abs=1e-12)

    def test_normalization_error(self):
        f = Density("double", lambda x: np.where((x >= 1) & (x <= 10), 2.0 / 9.0, 0.0), (1.0, 10.0))
        with pytest.raises(NormalizationError) as info:
            rho_integral(f, 1)
        assert info.value.measured == pytest.approx(2.0)

    def test_convergence_error_reports_achieved_error(self):
        with pytest.raises(ConvergenceError) as info:
            rho_integral(lognormal(0.0, 1.0), 1, tol=1e-30)
        assert info.value.state["error"] > 1e-30

    def test_truncation_error(self):
        # a heavy tail whose mass is spread beyond the scanned range
        tail = Density(
            "tail",
            lambda x: np.where(np.asarray(x) >= 1.0, 0.001 * np.asarray(x, float) ** -1.001, 0.0),
            (1.0, math.inf),
            cdf=lambda x: 1.0 - np.maximum(np.asarray(x, float), 1.0) ** -0.001,
        )
        with pytest.raises((TruncationError, NormalizationError)):
            rho_integral(tail, 1)

    def test_bare_callable(self):
        f = as_density(lambda x: np.where((np.asarray(x) > 0) & (np.asarray(x) <= 1), 1.0, 0.0), (0.0, 1.0))
        assert rho_integral(f, 1) == pytest.approx(1 / 9, abs=1e-13)
        with pytest.raises(DomainError):
            as_density(3.0)

    def test_plan_drops_negligible_decades(self):
        plan = decade_plan(halfnormal())
        assert plan.lost <= 1e-8
        assert plan.mass == pytest.approx(1.0, abs=1e-12)
        assert max(plan.decades) <= 1

    @pytest.mark.parametrize("f", [benford(), ratio_uniforms(), weibull(0.7, 3.0)], ids=lambda f: f.name)
    def test_monte_carlo_counting(self, f):
        n = 1_000_000
        data = canonicalize(f.sample(n, np.random.default_rng(21)))
        table = empirical_block_freq(data, 1)
        for k in range(1, 10):
            rho = rho_integral(f, k)
            assert abs(table.freq(k) - rho) <= 3 * math.sqrt(rho * (1 - rho) / n) + 1e-12


class TestProfileFromDensity:
    def test_benford_is_identity(self):
        g = profile_from_density(benford())
        s = np.linspace(0, 1, 21)
        np.testing.assert_allclose(g(s), s, atol=1e-14)

    def test_ratio_of_uniforms_closed_form(self):
        g = profile_from_density(ratio_uniforms())
        s = np.linspace(0, 1, 101)
        np.testing.assert_allclose(g(s), ratio_uniforms_profile()(s), atol=1e-9)

    def test_halfnormal_matches_windowed_aggregate(self):
        f = halfnormal()
        g = profile_from_density(f)
        agg = windowed_profile_from_cdf(f.cdf, WindowSpec(-16, 2), f.pdf)
        s = np.linspace(0, 1, 41)
        np.testing.assert_allclose(g(s), agg(s), atol=1e-12)

    def test_derivative_is_analytic(self):
        g = profile_from_density(lognormal(0.3, 0.8))
        x = np.array([0.2, 0.5, 0.8])
        h = 1e-5
        fd = (g(x + h) - g(x - h)) / (2 * h)
        np.testing.assert_allclose(g.derivative(x), fd, rtol=1e-7)

    def test_tabulate(self):
        t = profile_from_density(weibull(1.5, 2.0)).tabulate(257)
        t.check()

    @pytest.mark.parametrize("f", [lognormal(0.0, 1.0), weibull(0.5, 1.0), halfnormal(3.0)], ids=lambda f: f.name)
    def test_route_agreement_for_long_blocks(self, f):
        g = profile_from_density(f)
        ks = np.array([100, 123, 500, 999, 1000, 4242])
        direct = np.array([rho_integral(f, int(k)) for k in ks])
        np.testing.assert_allclose(rho_from_profile(g, 1.0, ks), direct, atol=2e-10)


class TestDecomposition:
    def test_benford_has_no_deviation(self):
        for k in (1, 5, 17, 123, 999):
            rep = em_decompose(benford(), k)
            assert rep.J3 == pytest.approx(0.0, abs=1e-13)
            assert rep.J3_y == pytest.approx(0.0, abs=1e-13)

    def test_uniform_first_digit(self):
        rep = em_decompose(uniform(), 1)
        assert rep.rho == pytest.approx(1 / 9, abs=1e-14)
        assert rep.J1 == pytest.approx(math.log10(2), abs=1e-15)
        assert rep.J3 == pytest.approx(1 / 9 - math.log10(2), abs=1e-13)
        assert rep.J3 == pytest.approx(-0.18992, abs=1e-5)
        assert rep.deviation == rep.rho - rep.benford_rho

    @pytest.mark.parametrize("f", builtin_densities(), ids=lambda f: f.name)
    def test_log_scale_quadrature_agrees(self, f):
        for k in (1, 4, 9, 37):
            rep = em_decompose(f, k)
            assert rep.J1_y == pytest.approx(rep.J1, abs=1e-10)
            assert rep.J3_y == pytest.approx(rep.J3, abs=1e-10)
            assert rep.J1 + rep.J3 == pytest.approx(rep.rho, abs=1e-15)

    @pytest.mark.parametrize("f", builtin_densities(), ids=lambda f: f.name)
    def test_deviations_cancel_over_a_decade(self, f):
        reps = [em_decompose(f, k) for k in range(1, 10)]
        assert math.fsum(r.rho for r in reps) == pytest.approx(1.0, abs=1e-12)
        assert math.fsum(r.J3 for r in reps) == pytest.approx(0.0, abs=1e-12)

    def test_to_dict(self):
        row = em_decompose(uniform(), 3).to_dict()
        assert set(row) == {"k", "J1", "J3", "rho", "benford_rho", "J1_y", "J3_y", "deviation"}

    def test_no_cdf_skips_log_scale_terms(self):
        f = as_density(lambda x: np.where((np.asarray(x) > 0) & (np.asarray(x) <= 1), 1.0, 0.0), (0.0, 1.0))
        rep = em_decompose(f, 2)
        assert rep.J1_y is None and rep.J3_y is None


class TestEulerMaclaurin:
    def test_exact_first_order_formula(self):
        g = lambda y: math.exp(-0.3 * y) * (1 + 0.5 * math.sin(y))  # noqa: E731
        dg = lambda y: math.exp(-0.3 * y) * (-0.3 * (1 + 0.5 * math.sin(y)) + 0.5 * math.cos(y))  # noqa: E731
        em = euler_maclaurin_first_order(g, dg, 0, 12)
        assert em.error < 1e-12

    @given(st.integers(min_value=-5, max_value=5), st.integers(min_value=0, max_value=8))
    @settings(max_examples=25, deadline=None)
    def test_polynomials(self, a, n):
        g = lambda y: y**3 - 2 * y + 1  # noqa: E731
        dg = lambda y: 3 * y**2 - 2  # noqa: E731
        em = euler_maclaurin_first_order(g, dg, a, a + n)
        assert em.total == pytest.approx(em.direct, abs=1e-9)

    def test_bounds(self):
        with pytest.raises(DomainError):
            euler_maclaurin_first_order(math.exp, math.exp, 3, 1)
