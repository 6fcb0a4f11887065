"""
Unit tests for finite-size scaling fits.
"""

import math

import numpy as np
import pytest

from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import ConjugatePairSeed, FitModel, ModelParams, PatternSeed, Regime
from j1j2bench.thermo.finite_size import (
    boundary_at,
    boundary_pattern,
    boundary_sliding,
    delta_e2,
    magnitudes,
    monotone_decreasing,
)
from j1j2bench.thermo.scaling import preferred_model, scaling_fit

SIZES = [4, 6, 8, 10, 12]


@pytest.mark.unit
class TestScalingFit:
    """Test log-space least squares."""

    def test_exact_exponential(self):
        deltas = [2.5 * math.exp(-0.7 * x) for x in SIZES]
        fit = scaling_fit(SIZES, deltas, FitModel.EXPONENTIAL)
        assert fit.rate == pytest.approx(0.7)
        assert fit.amplitude == pytest.approx(2.5)
        assert fit.residual < 1e-10
        assert fit.decaying

    def test_exact_power_law(self):
        deltas = [3.0 * x ** -2.0 for x in SIZES]
        fit = scaling_fit(SIZES, deltas, FitModel.POWER_LAW)
        assert fit.rate == pytest.approx(2.0)
        assert fit.amplitude == pytest.approx(3.0)

    def test_growing_data_is_not_decaying(self):
        fit = scaling_fit(SIZES, [math.exp(0.1 * x) for x in SIZES], FitModel.EXPONENTIAL)
        assert not fit.decaying

    @pytest.mark.parametrize(
        "deltas, model",
        [
            ([math.exp(-0.5 * x) for x in SIZES], FitModel.EXPONENTIAL),
            ([x ** -1.5 for x in SIZES], FitModel.POWER_LAW),
        ],
    )
    def test_preferred_model(self, deltas, model):
        assert preferred_model(SIZES, deltas).model == model

    def test_too_few_points(self):
        with pytest.raises(ConfigError):
            scaling_fit([4, 6], [0.1, 0.01], FitModel.EXPONENTIAL)

    def test_length_mismatch(self):
        with pytest.raises(ConfigError):
            scaling_fit([4, 6, 8], [0.1, 0.01], FitModel.EXPONENTIAL)

    def test_non_positive_delta(self):
        with pytest.raises(ConfigError):
            scaling_fit([4, 6, 8], [0.1, 0.0, 0.01], FitModel.POWER_LAW)


@pytest.mark.unit
class TestSweepHelpers:
    """Test helpers applied to size sweeps."""

    def test_magnitudes(self):
        sizes, deltas = magnitudes([(4, -0.5), (6, 0.25)])
        assert sizes == [4, 6]
        assert deltas == [0.5, 0.25]

    def test_monotone(self):
        assert monotone_decreasing([0.5, 0.2, 0.1])
        assert not monotone_decreasing([0.5, 0.6, 0.1])
        assert monotone_decreasing(list(np.geomspace(1.0, 1e-6, 5)))


@pytest.mark.unit
class TestBoundaryStringTracking:
    """Test the root-pattern predicates that pick the sliding boundary string."""

    P = ModelParams(two_n=8, b=0.75, eta=1.0, regime=Regime.ETA_PLUS_I_PI)

    def pattern(self, mu, pairs=3, n=2, imaginary=()):
        return PatternSeed(
            imaginary=list(imaginary),
            pairs=[ConjugatePairSeed(n=n, lam=0.1 * k) for k in range(pairs)],
            boundary_mu=mu,
        )

    @pytest.mark.parametrize("mu", [0.4, -0.9, 1.2])
    def test_sliding_string_accepted(self, mu):
        assert boundary_pattern(self.P, boundary_sliding)(self.pattern(mu))

    @pytest.mark.parametrize("mu", [0.0, 2e-4, -math.pi / 2, -math.pi / 2 + 5e-4, math.pi / 2 - 5e-4])
    def test_ground_positions_rejected(self, mu):
        assert not boundary_pattern(self.P, boundary_sliding)(self.pattern(mu))

    def test_wrong_composition_rejected(self):
        accept = boundary_pattern(self.P, boundary_sliding)
        assert not accept(self.pattern(0.4, pairs=2))
        assert not accept(self.pattern(0.4, n=3))
        assert not accept(self.pattern(0.4, pairs=2, imaginary=[0.2, -0.2]))
        assert not accept(PatternSeed(imaginary=[0.1] * 7))

    def test_reference_positions(self):
        assert boundary_pattern(self.P, boundary_at(0.0))(self.pattern(0.0))
        assert boundary_pattern(self.P, boundary_at(-math.pi / 2))(self.pattern(math.pi / 2 - 1e-6))
        assert not boundary_pattern(self.P, boundary_at(0.0))(self.pattern(-math.pi / 2))


@pytest.mark.integration
@pytest.mark.slow
class TestSlidingStringScaling:
    """Test that the tracked boundary string stays on one branch across sizes."""

    def test_e2_deviation_shrinks_with_size(self):
        base = ModelParams(two_n=8, b=0.75, eta=1.0, regime=Regime.ETA_PLUS_I_PI)
        points = delta_e2(base, [8, 10, 12])
        _, deltas = magnitudes(points)
        assert monotone_decreasing(deltas), points
