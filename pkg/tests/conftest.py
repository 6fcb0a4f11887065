"""
Shared test fixtures and configuration.
"""

import math

import numpy as np
import pytest

from j1j2bench.config import Settings
from j1j2bench.core.spectrum import exact_spectrum
from j1j2bench.models.schemas import ModelParams, Regime
from j1j2bench.transfer.roots import extract_zero_roots, resolve_eigenstates


# Configuration Fixtures
@pytest.fixture
def test_settings():
    """Settings with defaults, independent of any .env file."""
    return Settings(_env_file=None, log_level="DEBUG")


# Reference Parameter Sets
@pytest.fixture
def table_params():
    """2N=4, a=0.2i, eta=0.8: the reference four-site spectrum."""
    return ModelParams(two_n=4, b=0.2, eta=0.8)


@pytest.fixture
def small_params():
    """Six sites in the real-eta regime."""
    return ModelParams(two_n=6, b=0.3, eta=0.7)


@pytest.fixture
def ipi_params():
    """Four sites in the eta + i*pi regime."""
    return ModelParams(two_n=4, b=0.2, eta=0.6, regime=Regime.ETA_PLUS_I_PI)


@pytest.fixture
def thermo_params():
    """eta + i*pi regime at the transition scan's eta_plus."""
    return ModelParams(two_n=8, b=0.2, eta=0.6, regime=Regime.ETA_PLUS_I_PI)


# Cached Spectra
@pytest.fixture
def table_spectrum(table_params):
    """Full spectrum with eigenvectors of the reference chain."""
    return exact_spectrum(table_params)


@pytest.fixture
def table_states(table_params, table_spectrum):
    """Transfer-matrix resolved eigenstates of the reference chain."""
    return resolve_eigenstates(table_spectrum, table_params)


@pytest.fixture
def table_root_sets(table_params, table_states):
    """Extracted zero roots of every reference eigenstate."""
    return [extract_zero_roots(s.vector, table_params) for s in table_states]


# Numerical Helpers
@pytest.fixture
def random_state():
    """Reproducible normalized complex vector of dimension 16."""
    rng = np.random.default_rng(11)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    return v / np.linalg.norm(v)


@pytest.fixture
def half_pi():
    return math.pi / 2
