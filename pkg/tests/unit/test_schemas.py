"""
Unit tests for the parameter, result and record models.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from j1j2bench.errors import ConfigError, NumericalError, PolePointError, WorkbenchError
from j1j2bench.models.schemas import (
    Branch,
    CheckResult,
    DensityProfile,
    EnergyMomentum,
    ExcitationQuery,
    FitModel,
    IdentityReport,
    MatrixFlag,
    ModelParams,
    OperatorMatrix,
    PatternSeed,
    Regime,
    ResultRecord,
    ScalingFit,
)
from tests.factories import SeedFactory


@pytest.mark.unit
class TestModelParams:
    """Test model parameter validation and derived constants."""

    @pytest.mark.parametrize("two_n", [2, 5, 7])
    def test_invalid_size(self, two_n):
        with pytest.raises(ValidationError):
            ModelParams(two_n=two_n, b=0.2, eta=0.8)

    def test_non_positive_eta(self):
        with pytest.raises(ValidationError):
            ModelParams(two_n=4, b=0.2, eta=0.0)

    def test_non_finite_b(self):
        with pytest.raises(ValidationError):
            ModelParams(two_n=4, b=math.inf, eta=0.8)

    @pytest.mark.parametrize("b", [0.0, math.pi / 2, 2.0])
    def test_regime_two_strip(self, b):
        """b must lie strictly inside (0, pi/2) in the eta + i*pi regime."""
        with pytest.raises(ValidationError):
            ModelParams(two_n=4, b=b, eta=0.8, regime=Regime.ETA_PLUS_I_PI)

    def test_frozen(self, table_params):
        with pytest.raises(ValidationError):
            table_params.b = 0.3

    def test_sizes(self, table_params):
        assert table_params.n_half == 2
        assert table_params.dim == 16

    def test_crossing_parameter(self, table_params, ipi_params):
        assert table_params.eta_c == complex(0.8, 0.0)
        assert ipi_params.eta_c == complex(0.6, math.pi)
        assert ipi_params.sinh_eta.real == pytest.approx(-math.sinh(0.6))
        assert ipi_params.cosh_eta.real == pytest.approx(-math.cosh(0.6))

    def test_couplings_real_in_hermitian_strip(self, table_params, ipi_params):
        for p in (table_params, ipi_params):
            for value in (p.j1x, p.j1z, p.j2, p.j3x, p.j3z):
                assert abs(value.imag) < 1e-14

    def test_unitarity_factor_at_zero(self, table_params):
        assert table_params.phi(0.0) == pytest.approx(1.0)

    def test_staggered_theta(self, table_params):
        a = table_params.a
        np.testing.assert_allclose(table_params.staggered_theta, [-a, a, -a, a])

    def test_with_size_keeps_couplings(self, ipi_params):
        bigger = ipi_params.with_size(8)
        assert bigger.two_n == 8
        assert (bigger.b, bigger.eta, bigger.regime) == (ipi_params.b, ipi_params.eta, ipi_params.regime)

    def test_hashable_for_caching(self, table_params):
        assert hash(table_params) == hash(ModelParams(two_n=4, b=0.2, eta=0.8))


@pytest.mark.unit
class TestOperatorMatrix:
    """Test operator flag validation."""

    def test_non_square(self):
        with pytest.raises(ValidationError):
            OperatorMatrix(entries=np.zeros((2, 3)))

    def test_hermitian_flag_checked(self):
        with pytest.raises(ValidationError):
            OperatorMatrix(entries=np.array([[0, 1], [0, 0]], dtype=complex), flag=MatrixFlag.HERMITIAN)

    def test_unitary_flag_checked(self):
        with pytest.raises(ValidationError):
            OperatorMatrix(entries=2 * np.eye(2, dtype=complex), flag=MatrixFlag.UNITARY)

    def test_dim(self):
        assert OperatorMatrix(entries=np.eye(4), flag=MatrixFlag.HERMITIAN).dim == 4


@pytest.mark.unit
class TestExcitationQuery:
    """Test branch parameter validation."""

    def test_e1_requires_string_length(self):
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E1, lam=0.1)
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E1, n=1, lam=0.1)

    def test_parameter_outside_strip(self):
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E2, mu=math.pi / 2)

    def test_ground_values_rejected(self):
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E2, mu=0.0)
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E3, mu=-math.pi / 2)

    def test_e4_needs_both_positions(self):
        with pytest.raises(ValidationError):
            ExcitationQuery(branch=Branch.E4, mu1=0.1)

    def test_regime_checks(self, table_params):
        e1 = ExcitationQuery(branch=Branch.E1, n=2, lam=0.1)
        e1.check_regime(table_params)
        with pytest.raises(ConfigError):
            ExcitationQuery(branch=Branch.E2, mu=0.3).check_regime(table_params)

    def test_phase_checks(self):
        phase_two = ModelParams(two_n=4, b=1.0, eta=0.8, regime=Regime.ETA_PLUS_I_PI)
        with pytest.raises(ConfigError, match="e2"):
            ExcitationQuery(branch=Branch.E2, mu=0.3).check_regime(phase_two)
        ExcitationQuery(branch=Branch.E3, mu=0.3).check_regime(phase_two)
        with pytest.raises(ConfigError):
            ExcitationQuery(branch=Branch.E1, n=2, lam=0.0).check_regime(phase_two)


@pytest.mark.unit
class TestSmallModels:
    """Test the remaining value models."""

    def test_momentum_range(self):
        EnergyMomentum(energy=1.0, momentum=-math.pi)
        with pytest.raises(ValidationError):
            EnergyMomentum(energy=1.0, momentum=math.pi)

    def test_identity_report(self):
        report = IdentityReport(residuals={"a": 1e-14, "b": 1e-3}, thresholds={"a": 1e-12, "b": 1e-12})
        assert report.passed is False
        assert report.failures == ["b"]

    def test_pattern_seed_counts(self, table_params):
        seed = SeedFactory.boundary(pair_count=1, mu=0.0)
        assert seed.root_count == 3
        positions = seed.positions(table_params)
        assert positions[0].real == pytest.approx(-table_params.eta)
        assert positions[1].real == pytest.approx(table_params.eta)
        assert positions[2] == 0j

    def test_pattern_seed_from_json(self):
        seed = PatternSeed.model_validate({"imaginary": [-0.4, 0.0, 0.4]})
        assert seed.root_count == 3
        assert seed.composition()["imaginary"] == 3

    def test_constant_density(self):
        profile = DensityProfile(label="flat", omega=np.array([0]), coefficients=np.array([0.5 + 0j]))
        np.testing.assert_allclose(profile.evaluate([-1.0, 0.0, 1.0]), 0.5 / math.pi)
        assert profile.on_grid(8).values.shape == (8,)

    def test_scaling_fit_predict(self):
        fit = ScalingFit(model=FitModel.POWER_LAW, amplitude=2.0, rate=1.0, residual=0.0, sizes=[], deltas=[])
        assert fit.predict(4.0) == pytest.approx(0.5)
        assert fit.decaying


@pytest.mark.unit
class TestResultRecord:
    """Test record validation."""

    def test_missing_provenance(self):
        with pytest.raises(ValidationError, match="provenance"):
            ResultRecord(command="ed", columns={"energy": [1.0]})

    def test_ragged_columns(self):
        with pytest.raises(ValidationError):
            ResultRecord(
                command="ed",
                columns={"a": [1.0], "b": [1.0, 2.0]},
                provenance={"a": "x", "b": "y"},
            )

    def test_passed(self):
        record = ResultRecord(
            command="reproduce",
            checks={
                "one": CheckResult(value=0.0, tolerance=1.0, passed=True),
                "two": CheckResult(value=2.0, tolerance=1.0, passed=False),
            },
        )
        assert record.passed is False


@pytest.mark.unit
class TestErrors:
    """Test the exception hierarchy."""

    def test_exit_codes(self):
        assert ConfigError("x").exit_code == 2
        assert PolePointError("x").exit_code == 3

    def test_config_error_is_value_error(self):
        assert isinstance(ConfigError("x"), ValueError)

    def test_record(self):
        record = PolePointError("root on a pole", {"roots": [[0.0, 1.0]]}).to_record()
        assert record == {
            "error": "PolePointError",
            "message": "root on a pole",
            "diagnostics": {"roots": [[0.0, 1.0]]},
            "exit_code": 3,
        }

    def test_hierarchy(self):
        assert issubclass(PolePointError, NumericalError)
        assert issubclass(NumericalError, WorkbenchError)
