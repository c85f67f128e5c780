"""Distribution models: GPD primitives, factories, sampling, policies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meplot import (
    GpdParams,
    ThresholdPolicy,
    auto_k,
    beta_tail_model,
    exponential_model,
    gpd_cdf,
    gpd_model,
    gpd_quantile,
    gpd_tail,
    lognormal_model,
    me_closed_form,
    me_numeric,
    pareto_model,
    parse_model_spec,
    sample,
    uniform_model,
)
from meplot.distributions import sample_key
from meplot.errors import ParameterError, SupportError

ALL_MODELS = [
    gpd_model(0.5, 1.0),
    gpd_model(-0.5, 1.0),
    gpd_model(0.0, 2.0),
    pareto_model(3.0),
    uniform_model(),
    beta_tail_model(2.0),
    exponential_model(),
    lognormal_model(),
]


class TestGpdPrimitives:
    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            GpdParams(xi=0.5, beta=0.0)
        with pytest.raises(ParameterError):
            GpdParams(xi=0.5, beta=-1.0)

    def test_exponential_special_case(self):
        p = GpdParams(xi=0.0, beta=2.0)
        x = np.linspace(0.0, 20.0, 41)
        np.testing.assert_allclose(gpd_cdf(p, x), 1.0 - np.exp(-x / 2.0), rtol=1e-14)

    def test_pareto_special_case(self):
        # xi = 0.5, beta = 1: tail(x) = (1 + x/2)^(-2)
        p = GpdParams(xi=0.5, beta=1.0)
        x = np.linspace(0.0, 50.0, 26)
        np.testing.assert_allclose(gpd_tail(p, x), (1.0 + 0.5 * x) ** -2.0, rtol=1e-13)

    def test_bounded_support_endpoint(self):
        p = GpdParams(xi=-0.5, beta=1.0)
        assert p.right_endpoint == pytest.approx(2.0)
        assert gpd_cdf(p, 2.0) == 1.0
        assert gpd_tail(p, 2.0) == 0.0
        with pytest.raises(SupportError):
            gpd_cdf(p, 2.5)
        with pytest.raises(SupportError):
            gpd_cdf(p, -0.1)

    def test_quantile_round_trip_grid(self):
        for xi in (-0.9, -0.5, -1e-10, 0.0, 1e-10, 0.25, 0.5, 0.9, 2.0):
            p = GpdParams(xi=xi, beta=1.3)
            u = np.linspace(1e-6, 1.0 - 1e-6, 101)
            np.testing.assert_allclose(
                gpd_cdf(p, gpd_quantile(p, u)), u, rtol=0, atol=1e-9,
                err_msg=f"xi={xi}",
            )

    def test_small_xi_continuity(self):
        # cdf and quantile must not jump across the xi ~ 0 branch switch.
        u = np.linspace(0.05, 0.95, 19)
        q0 = gpd_quantile(GpdParams(xi=0.0, beta=1.0), u)
        for xi in (1e-7, -1e-7, 1e-9, -1e-9):
            q = gpd_quantile(GpdParams(xi=xi, beta=1.0), u)
            np.testing.assert_allclose(q, q0, rtol=1e-5)

    @given(
        xi=st.floats(-0.95, 0.95),
        beta=st.floats(0.1, 10.0),
        u=st.floats(0.001, 0.999),
    )
    @settings(max_examples=200, deadline=None)
    def test_quantile_round_trip_property(self, xi, beta, u):
        p = GpdParams(xi=xi, beta=beta)
        assert gpd_cdf(p, float(gpd_quantile(p, u))) == pytest.approx(u, abs=1e-8)


class TestMeanExcess:
    def test_closed_form_is_affine(self):
        p = GpdParams(xi=0.25, beta=1.0)
        u = np.linspace(0.0, 10.0, 11)
        np.testing.assert_allclose(me_closed_form(p, u), (1.0 + 0.25 * u) / 0.75)

    def test_mean_requires_xi_below_one(self):
        from meplot.errors import MeanNotDefinedError

        with pytest.raises(MeanNotDefinedError):
            me_closed_form(GpdParams(xi=1.0, beta=1.0), 0.0)
        with pytest.raises(MeanNotDefinedError):
            me_closed_form(GpdParams(xi=1.5, beta=1.0), 1.0)

    @pytest.mark.parametrize("xi", [-0.9, -0.5, 0.0, 0.25, 0.5, 0.9])
    def test_numeric_matches_closed_form(self, xi):
        p = GpdParams(xi=xi, beta=1.0)
        d = gpd_model(xi, 1.0)
        hi = p.right_endpoint if math.isfinite(p.right_endpoint) else 20.0
        for u in np.linspace(0.0, 0.98 * hi, 25):
            closed = float(me_closed_form(p, u))
            assert me_numeric(d, float(u)) == pytest.approx(closed, rel=1e-8)

    def test_exponential_memorylessness(self):
        d = exponential_model(mean=2.0)
        for u in (0.0, 1.0, 5.0):
            assert me_numeric(d, u) == pytest.approx(2.0, rel=1e-10)

    def test_uniform_mean_excess(self):
        # Uniform(0,1): M(u) = (1-u)/2.
        d = uniform_model()
        for u in (0.0, 0.3, 0.9):
            assert me_numeric(d, u) == pytest.approx((1.0 - u) / 2.0, rel=1e-10)


class TestModelFactories:
    @pytest.mark.parametrize("d", ALL_MODELS, ids=lambda d: d.spec_string())
    def test_cdf_quantile_round_trip(self, d):
        u = np.linspace(0.01, 0.99, 49)
        q = np.array([float(d.quantile(v)) for v in u])
        c = np.array([float(d.cdf(x)) for x in q])
        np.testing.assert_allclose(c, u, atol=1e-9)

    @pytest.mark.parametrize("d", ALL_MODELS, ids=lambda d: d.spec_string())
    def test_tail_complements_cdf(self, d):
        for v in (0.1, 0.5, 0.9):
            x = float(d.quantile(v))
            assert float(d.tail(x)) + float(d.cdf(x)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("d", ALL_MODELS, ids=lambda d: d.spec_string())
    def test_tail_quantile_consistent(self, d):
        # quantile_of_tail(w) must agree with quantile(1 - w) where the
        # latter is representable, and stay accurate for tiny w.
        for w in (0.5, 1e-3, 1e-9):
            x = float(d.quantile_of_tail(w))
            assert float(d.tail(x)) == pytest.approx(w, rel=1e-8)

    def test_pareto_oracle(self):
        d = pareto_model(2.0)
        assert float(d.tail(4.0)) == pytest.approx(1.0 / 16.0)
        assert float(d.quantile_of_tail(1.0 / 16.0)) == pytest.approx(4.0)
        assert d.true_xi == pytest.approx(0.5)

    def test_regimes(self):
        assert gpd_model(0.5, 1.0).regime == "frechet"
        assert gpd_model(-0.5, 1.0).regime == "weibull"
        assert gpd_model(0.0, 1.0).regime == "gumbel"
        assert pareto_model(3.0).regime == "frechet"
        assert uniform_model().regime == "weibull"
        assert beta_tail_model(2.0).regime == "weibull"
        assert exponential_model().regime == "gumbel"
        assert lognormal_model().regime == "gumbel"

    def test_parse_round_trip(self):
        for text in ("gpd:xi=0.5,beta=1", "pareto:alpha=3", "uniform", "exp:mean=2"):
            d = parse_model_spec(text)
            again = parse_model_spec(d.spec_string())
            assert again.spec_string() == d.spec_string()

    def test_parse_rejects_unknown(self):
        with pytest.raises(ParameterError):
            parse_model_spec("cauchy:scale=1")
        with pytest.raises(ParameterError):
            parse_model_spec("gpd:xi=0.5,bogus=1")


class TestSampling:
    def test_deterministic_given_seed(self):
        d = pareto_model(2.0)
        a = sample(d, 1000, seed=42).values
        b = sample(d, 1000, seed=42).values
        assert np.array_equal(a, b)
        c = sample(d, 1000, seed=43).values
        assert not np.array_equal(a, c)

    def test_replicates_are_distinct_streams(self):
        d = exponential_model()
        a = sample(d, 500, seed=1, replicate=0).values
        b = sample(d, 500, seed=1, replicate=1).values
        assert not np.array_equal(a, b)

    def test_key_injective_over_seed_replicate(self):
        keys = {
            sample_key(seed, rep)
            for seed in (0, 1, 2, 2**63)
            for rep in (0, 1, 2, 2**20)
        }
        assert len(keys) == 16

    def test_sample_lives_on_support(self):
        d = gpd_model(-0.5, 1.0)  # support [0, 2]
        v = sample(d, 5000, seed=0).values
        assert v.min() >= 0.0 and v.max() <= 2.0

    def test_empirical_cdf_matches_model(self):
        d = gpd_model(0.5, 1.0)
        v = sample(d, 200_000, seed=7).values
        for q in (0.25, 0.5, 0.9):
            x = float(d.quantile(q))
            assert np.mean(v <= x) == pytest.approx(q, abs=0.01)


class TestThresholdPolicy:
    def test_auto_k(self):
        assert auto_k(10**5) == math.ceil((10**5) ** 0.45)
        assert auto_k(100) == math.ceil(100**0.45)

    def test_power_rule(self):
        pol = ThresholdPolicy(rule="power", exponent=0.45)
        assert pol.k_for(10**5) == auto_k(10**5)
        assert pol.k_grid(10**5) == [auto_k(10**5)]

    def test_ratio_rule(self):
        pol = ThresholdPolicy(rule="ratio", fraction=0.01)
        assert pol.k_for(10_000) == 100

    def test_explicit_rule(self):
        pol = ThresholdPolicy(rule="explicit", ks=(10, 20, 40))
        assert pol.k_grid(10**4) == [10, 20, 40]

    def test_power_span_rule(self):
        pol = ThresholdPolicy(rule="power_span", exponents=(0.45, 0.55))
        ks = pol.k_grid(10**4)
        assert ks == sorted(ks) and len(ks) == 2

    def test_invalid_rules(self):
        with pytest.raises(ParameterError):
            ThresholdPolicy(rule="power")  # missing exponent
        with pytest.raises(ParameterError):
            ThresholdPolicy(rule="nope", exponent=0.5)
