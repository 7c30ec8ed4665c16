import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentdensity.errors import ConfigurationError, DegenerateCurvatureError, DomainError
from momentdensity.models import builtin_scenario
from momentdensity.smoothing import (
    AlphaRule,
    alpha_global,
    alpha_local_density,
    alpha_local_survival,
    parse_alpha_rule,
)
from momentdensity.theory import density_asymptotics, survival_asymptotics

LB, _ = builtin_scenario("lb-exp2")
EG, _ = builtin_scenario("excess-gamma22")


class TestGlobal:
    def test_examples(self):
        assert alpha_global(300, 0.4) == 10
        assert alpha_global(400, 0.4) == 11
        assert alpha_global(1, 0.4) == 1
        assert alpha_global(1, 1.9) == 1

    def test_exact_powers_not_bumped(self):
        assert alpha_global(32, 0.4) == 4  # 32^0.4 = 4 up to rounding
        assert alpha_global(2000, 0.6) == 96

    def test_real_mode(self):
        assert alpha_global(300, 0.4, integerize=False) == pytest.approx(300**0.4, rel=1e-15)

    @pytest.mark.parametrize("delta", [0.0, 2.0, -0.1])
    def test_delta_range(self, delta):
        with pytest.raises(ConfigurationError):
            alpha_global(100, delta)

    @settings(max_examples=200, deadline=None)
    @given(n=st.integers(1, 10**6), m=st.integers(0, 10**6), d=st.floats(0.01, 1.9), e=st.floats(0.0, 0.09))
    def test_monotone(self, n, m, d, e):
        assert alpha_global(n + m, d) >= alpha_global(n, d) >= 1
        assert alpha_global(n, d + e) >= alpha_global(n, d)


class TestLocalDensity:
    def test_value_against_high_precision(self):
        x, n, W = mp.mpf(1), mp.mpf(300), mp.mpf("0.5")
        f = 2 * mp.exp(-2 * x)
        d2 = 8 * mp.exp(-2 * x)
        exact = n ** mp.mpf("0.4") * (mp.pi / (4 * W**2)) ** mp.mpf("0.2") * (x**3 * d2 / mp.sqrt(f)) ** mp.mpf("0.8")
        got = alpha_local_density(LB, 0.5, 1.0, 300)
        assert got == pytest.approx(float(exact), rel=1e-13)
        assert round(got, 1) == 22.1

    def test_homogeneity(self):
        base = alpha_local_density(LB, 0.5, 1.3, 300)
        assert alpha_local_density(LB, 0.5, 1.3, 2**2.5 * 300) == pytest.approx(2 * base, rel=1e-14)

    @pytest.mark.parametrize("delta", [0.4, 0.6, 1.2])
    def test_general_homogeneity(self, delta):
        base = alpha_local_density(LB, 0.5, 0.7, 100, delta)
        assert alpha_local_density(LB, 0.5, 0.7, 3 ** (1 / delta) * 100, delta) == pytest.approx(3 * base, rel=1e-13)

    @pytest.mark.parametrize("x", [0.3, 1.0, 2.5])
    def test_balances_variance_and_squared_bias(self, x):
        alpha = alpha_local_density(LB, 0.5, x, 500)
        report = density_asymptotics(LB, 0.5, x, alpha, 500)
        assert report.variance == pytest.approx(report.bias**2, rel=1e-6)

    def test_negative_curvature_uses_magnitude(self):
        # the excess-gamma22 target has f'' < 0 at x = 1
        assert EG.d2f(1.0) < 0
        alpha = alpha_local_density(EG, 4.0, 1.0, 400)
        report = density_asymptotics(EG, 4.0, 1.0, alpha, 400)
        assert report.variance == pytest.approx(report.bias**2, rel=1e-6)

    def test_degenerate(self):
        # f''(4) = 0 for x e^{-x/2}/4
        with pytest.raises(DegenerateCurvatureError):
            alpha_local_density(EG, 4.0, 4.0, 400)

    def test_delta_range(self):
        with pytest.raises(ConfigurationError):
            alpha_local_density(LB, 0.5, 1.0, 300, 0.3)

    def test_integerize(self):
        assert alpha_local_density(LB, 0.5, 1.0, 300, integerize=True) == 23


class TestLocalSurvival:
    def test_value(self):
        x, n, W = mp.mpf(4), mp.mpf(400), mp.mpf(4)
        d1 = -mp.exp(-2) / 4
        S = (1 + x / 2) * mp.exp(-x / 2)
        exact = n ** mp.mpf("0.4") * (mp.pi / (4 * W**2)) ** mp.mpf("0.2") * x**2 * (abs(d1) / mp.sqrt(S)) ** mp.mpf("0.8")
        got = alpha_local_survival(EG, 4.0, 4.0, 400)
        assert math.isfinite(got) and got > 0
        assert got == pytest.approx(float(exact), rel=1e-13)

    def test_mode_is_degenerate(self):
        with pytest.raises(DegenerateCurvatureError):
            alpha_local_survival(EG, 4.0, 2.0, 400)

    def test_homogeneity(self):
        base = alpha_local_survival(EG, 4.0, 4.0, 400)
        assert alpha_local_survival(EG, 4.0, 4.0, 2**2.5 * 400) == pytest.approx(2 * base, rel=1e-14)

    @pytest.mark.parametrize("x", [4.0, 7.0, 10.0])
    def test_balances_variance_and_squared_bias(self, x):
        alpha = alpha_local_survival(EG, 4.0, x, 400)
        assert alpha > 1
        report = survival_asymptotics(EG, 4.0, x, alpha, 400)
        assert report.variance == pytest.approx(report.bias**2, rel=1e-6)

    def test_floor_at_one(self):
        # the raw rule is below one near the origin
        assert alpha_local_survival(EG, 4.0, 0.5, 400) == 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            alpha_local_survival(EG, 4.0, 0.0, 400)


class TestAlphaRule:
    def test_resolution(self):
        assert AlphaRule.fixed(7.5).resolve(10) == 7.5
        assert AlphaRule.global_rate().resolve(300) == 10
        assert AlphaRule.global_rate(0.6).resolve(2000) == 96
        assert AlphaRule.local_density().resolve(300, 1.0, LB) == alpha_local_density(LB, 0.5, 1.0, 300)
        assert AlphaRule.local_survival().resolve(400, 4.0, EG) == alpha_local_survival(EG, 4.0, 4.0, 400)

    def test_local_needs_scenario(self):
        with pytest.raises(ConfigurationError):
            AlphaRule.local_density().resolve(300, 1.0)

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("fixed:10", AlphaRule.fixed(10)),
            ("global:2/5", AlphaRule.global_rate(0.4)),
            ("global:0.6:real", AlphaRule.global_rate(0.6, integerize=False)),
            ("local-density:0.4", AlphaRule.local_density(0.4)),
            ("local-survival:3/5:int", AlphaRule.local_survival(0.6, integerize=True)),
        ],
    )
    def test_parse(self, text, expected):
        assert parse_alpha_rule(text) == expected

    @pytest.mark.parametrize(
        "text", ["", "fixed", "fixed:0.5", "global:2", "global:x", "local-density:0.2", "magic:1", "global:0.4:maybe"]
    )
    def test_parse_errors(self, text):
        with pytest.raises(ConfigurationError):
            parse_alpha_rule(text)

    def test_str_roundtrip(self):
        for rule in (AlphaRule.fixed(12), AlphaRule.global_rate(0.4), AlphaRule.local_density(0.6)):
            assert parse_alpha_rule(str(rule)) == rule
