"""
Unit tests for configuration management.
"""

import math

import pytest
from pydantic import ValidationError

from j1j2bench.config import DENSE_HARD_LIMIT, Settings


@pytest.mark.unit
class TestSettings:
    """Test Settings class."""

    def test_default_settings(self):
        """Test default settings initialization."""
        settings = Settings(_env_file=None)
        assert settings.ed_max_two_n == 12
        assert settings.allow_large_ed is False
        assert settings.threads == 1
        assert settings.log_level == "INFO"
        assert settings.newton_tol == 1e-10
        assert settings.qpt_step == 0.01

    def test_threads_from_environment(self, monkeypatch):
        """Test the J1J2_THREADS variable sets the worker count."""
        monkeypatch.setenv("J1J2_THREADS", "3")
        assert Settings(_env_file=None).threads == 3

    def test_tolerance_from_environment(self, monkeypatch):
        """Test tolerances are read case-insensitively from the environment."""
        monkeypatch.setenv("NEWTON_TOL", "1e-12")
        assert Settings(_env_file=None).newton_tol == 1e-12

    @pytest.mark.parametrize("field", ["newton_tol", "tol_pair", "series_tolerance", "fd_step", "qpt_step"])
    def test_non_positive_tolerance_rejected(self, field):
        """Test tolerance validation."""
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: 0.0})

    def test_gap_ratio_validation(self):
        """Test a band gap ratio of one or less is rejected."""
        with pytest.raises(ValidationError):
            Settings(_env_file=None, band_gap_ratio=1.0)

    def test_threads_validation(self):
        """Test worker count validation."""
        with pytest.raises(ValidationError):
            Settings(_env_file=None, threads=0)

    def test_log_level_normalized(self):
        """Test log level is upper-cased and validated."""
        assert Settings(_env_file=None, log_level="debug").log_level == "DEBUG"
        with pytest.raises(ValidationError):
            Settings(_env_file=None, log_level="verbose")


@pytest.mark.unit
class TestDenseLimit:
    """Test the dense-operator size limit."""

    def test_default_limit(self):
        assert Settings(_env_file=None).dense_limit == 12

    def test_opt_in_raises_limit(self):
        assert Settings(_env_file=None, allow_large_ed=True).dense_limit == DENSE_HARD_LIMIT

    def test_limit_never_exceeds_hard_ceiling(self):
        assert Settings(_env_file=None, ed_max_two_n=20).dense_limit == DENSE_HARD_LIMIT


@pytest.mark.unit
class TestOmegaCutoff:
    """Test the Fourier cutoff rule."""

    def test_cutoff_from_series_tolerance(self):
        settings = Settings(_env_file=None)
        expected = math.ceil(-math.log(1e-14) / 1.0) + 4
        assert settings.omega_cutoff(1.0) == expected

    def test_slower_decay_needs_more_modes(self):
        settings = Settings(_env_file=None)
        assert settings.omega_cutoff(0.5) > settings.omega_cutoff(1.0)

    def test_explicit_tolerance(self):
        settings = Settings(_env_file=None, omega_padding=0)
        assert settings.omega_cutoff(1.0, tolerance=math.exp(-10)) == 10


@pytest.mark.unit
class TestValidateConfig:
    """Test cross-field validation."""

    def test_valid_defaults(self):
        Settings(_env_file=None).validate_config()

    def test_odd_ed_size_rejected(self):
        with pytest.raises(ValueError, match="even"):
            Settings(_env_file=None, ed_max_two_n=7).validate_config()

    def test_ed_size_above_ceiling_rejected(self):
        with pytest.raises(ValueError):
            Settings(_env_file=None, ed_max_two_n=16).validate_config()

    def test_tail_tighter_than_series_rejected(self):
        with pytest.raises(ValueError, match="TAIL_TOLERANCE"):
            Settings(_env_file=None, tail_tolerance=1e-16, series_tolerance=1e-14).validate_config()
