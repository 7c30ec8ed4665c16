import math

import numpy as np
import pytest
from scipy import integrate as spi
from scipy import stats

from momentdensity.errors import ConfigurationError, DomainError, StateError
from momentdensity.models import (
    DIRECT,
    EXCESS_LIFE,
    LENGTH_BIASED,
    Sample,
    WeightedModel,
    builtin_scenario,
    custom_model,
    direct_model,
    excess_life_model,
    length_biased_model,
    observed_density,
    scenario_names,
)
from momentdensity.special_math import integrate

SCENARIOS = ["lb-exp2", "excess-gamma22"]


def quad(f):
    # both scenarios have tails below e^-90 past 200, where S/f would be 0/0
    return spi.quad(f, 0, 200.0, points=[1.0, 5.0, 20.0], epsabs=0, epsrel=1e-12, limit=200)[0]


class TestBuiltins:
    def test_names(self):
        assert set(scenario_names()) == set(SCENARIOS)

    def test_lb_exp2_values(self):
        scenario, model = builtin_scenario("lb-exp2")
        assert model.kind == LENGTH_BIASED
        assert scenario.W == 0.5 and model.total_weight == 0.5
        assert scenario.f(1.0) == pytest.approx(2 * math.exp(-2), rel=1e-15)
        assert scenario.d2f(1.0) == pytest.approx(8 * math.exp(-2), rel=1e-15)

    def test_lb_exp2_f_from_observed_gamma(self):
        # f = W g(y)/y with g the G(2, scale 1/2) density
        scenario, _ = builtin_scenario("lb-exp2")
        ys = np.linspace(0.05, 6, 50)
        g = stats.gamma(2, scale=0.5).pdf(ys)
        np.testing.assert_allclose(scenario.f(ys), 0.5 * g / ys, rtol=1e-13)

    def test_excess_gamma22_values(self):
        scenario, model = builtin_scenario("excess-gamma22")
        assert model.kind == EXCESS_LIFE and scenario.W == 4.0
        assert scenario.sf(2.0) == pytest.approx(2 * math.exp(-1), rel=1e-15)
        assert scenario.df(4.0) == pytest.approx(-math.exp(-2) / 4, rel=1e-14)
        assert scenario.df(2.0) == 0.0

    def test_excess_matches_scipy_gamma(self):
        scenario, _ = builtin_scenario("excess-gamma22")
        ref = stats.gamma(2, scale=2)
        ys = np.linspace(0.01, 30, 100)
        np.testing.assert_allclose(scenario.f(ys), ref.pdf(ys), rtol=1e-13)
        np.testing.assert_allclose(scenario.cdf(ys), ref.cdf(ys), rtol=1e-12, atol=1e-16)
        np.testing.assert_allclose(scenario.sf(ys), ref.sf(ys), rtol=1e-12)

    @pytest.mark.parametrize("name", SCENARIOS)
    def test_derivatives_by_finite_differences(self, name):
        scenario, _ = builtin_scenario(name)
        for x in (0.3, 1.0, 2.5, 5.0):
            h = 1e-5 * x
            fd1 = (scenario.f(x + h) - scenario.f(x - h)) / (2 * h)
            fd2 = (scenario.df(x + h) - scenario.df(x - h)) / (2 * h)
            assert scenario.df(x) == pytest.approx(fd1, rel=1e-7, abs=1e-10)
            assert scenario.d2f(x) == pytest.approx(fd2, rel=1e-7, abs=1e-10)

    @pytest.mark.parametrize("name", SCENARIOS)
    def test_check_and_smoothness_bounds(self, name):
        scenario, _ = builtin_scenario(name)
        scenario.check()
        grid = np.linspace(0.0, 40.0, 40001)
        assert np.max(np.abs(scenario.d2f(grid))) <= scenario.M * (1 + 1e-12)
        assert np.max(np.abs(scenario.df(grid))) <= scenario.L * (1 + 1e-12)
        assert np.all(np.diff(scenario.cdf(grid)) >= 0)

    @pytest.mark.parametrize("name", SCENARIOS)
    def test_total_weight_by_quadrature(self, name):
        scenario, model = builtin_scenario(name)
        total = quad(lambda y: float(model.w(y) * scenario.f(y)))
        assert total == pytest.approx(scenario.W, rel=1e-10)

    @pytest.mark.parametrize("name", SCENARIOS)
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_moment_relation(self, name, k):
        scenario, model = builtin_scenario(name)
        lhs = scenario.W * quad(
            lambda y: y**k * float(observed_density(scenario, model, y)) / float(model.w(y))
        )
        rhs = quad(lambda y: y**k * float(scenario.f(y)))
        assert lhs == pytest.approx(rhs, rel=1e-7)

    def test_unknown(self):
        with pytest.raises(ConfigurationError):
            builtin_scenario("nope")


class TestObservedDensity:
    def test_lb_exp2_at_one(self):
        scenario, model = builtin_scenario("lb-exp2")
        assert observed_density(scenario, model, 1.0) == pytest.approx(4 * math.exp(-2), rel=1e-14)
        assert observed_density(scenario, model, 1.0) == pytest.approx(
            stats.gamma(2, scale=0.5).pdf(1.0), rel=1e-14
        )

    def test_excess_at_zero(self):
        scenario, model = builtin_scenario("excess-gamma22")
        assert observed_density(scenario, model, 0.0) == 0.25

    @pytest.mark.parametrize("name", SCENARIOS)
    def test_normalized(self, name):
        scenario, model = builtin_scenario(name)
        assert quad(lambda y: float(observed_density(scenario, model, y))) == pytest.approx(1.0, abs=1e-8)

    def test_excess_life_identities(self):
        scenario, model = builtin_scenario("excess-gamma22")
        g = lambda y: float(observed_density(scenario, model, y))  # noqa: E731
        for y in np.linspace(0.2, 10, 25):
            h = 1e-5 * y
            dg = (g(y + h) - g(y - h)) / (2 * h)
            assert -scenario.W * dg == pytest.approx(float(scenario.f(y)), abs=1e-7)
            assert -dg / g(y) == pytest.approx(float(scenario.hazard(y)), abs=1e-7)

    def test_unknown_weight_is_state_error(self):
        scenario, _ = builtin_scenario("lb-exp2")
        with pytest.raises(StateError):
            observed_density(scenario, length_biased_model(), 1.0)


class TestWeightedModel:
    def test_direct_has_unit_weight(self):
        model = direct_model()
        assert model.kind == DIRECT and model.total_weight == 1.0
        with pytest.raises(ConfigurationError):
            WeightedModel(DIRECT, lambda y: 1.0, 2.0)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            WeightedModel("weird", lambda y: y)
        with pytest.raises(DomainError):
            length_biased_model(-1.0)
        with pytest.raises(ConfigurationError):
            custom_model(None)

    def test_excess_without_truth(self):
        model = excess_life_model(4.0)
        with pytest.raises(StateError):
            model.w(1.0)

    def test_excess_with_scenario_weight(self):
        scenario, _ = builtin_scenario("excess-gamma22")
        model = excess_life_model(scenario=scenario)
        assert model.total_weight == 4.0
        assert model.w(3.0) == pytest.approx(scenario.sf(3.0) / scenario.f(3.0))

    def test_require_total_weight(self):
        with pytest.raises(StateError):
            length_biased_model().require_total_weight()
        assert length_biased_model().with_total_weight(2).require_total_weight() == 2.0


class TestSample:
    def test_validation(self):
        for bad in ([], [1.0, 0.0], [1.0, -2.0], [float("nan")]):
            with pytest.raises(DomainError):
                Sample(np.asarray(bad, dtype=float))

    def test_read_only(self):
        s = Sample([1.0, 2.0])
        assert s.n == 2 and len(s) == 2
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_from_file(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("# lengths\n1.5\n\n2.25  # second\n3\n")
        s = Sample.from_file(path)
        np.testing.assert_array_equal(s.values, [1.5, 2.25, 3.0])

    def test_from_file_bad_line(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("1.0\nabc\n")
        with pytest.raises(ConfigurationError):
            Sample.from_file(path)


def test_kernel_expectation_of_weighted_density():
    # int h f computed directly equals W * int h g / w, the identity behind the estimators
    from momentdensity.special_math import DeltaKernel

    scenario, model = builtin_scenario("lb-exp2")
    kernel = DeltaKernel(20.0, 1.0)
    lhs = integrate(scenario.f, kernel)
    rhs = integrate(lambda y: scenario.W * observed_density(scenario, model, y) / y, kernel)
    assert lhs == pytest.approx(rhs, rel=1e-10)
