"""
Integration tests: exact diagonalization, extracted zero roots and BAE solutions
describe the same spectrum.
"""

import numpy as np
import pytest

from j1j2bench.bae.patterns import ground_seed
from j1j2bench.bae.solver import solve
from j1j2bench.cli.reproduce import bae_levels, distinct_root_sets, four_site_seeds, match_levels, run_target
from j1j2bench.core.spectrum import exact_spectrum
from j1j2bench.models.schemas import ModelParams, Regime
from j1j2bench.transfer.roots import (
    angle_distance,
    energy_from_roots,
    extract_zero_roots,
    momentum_from_roots,
    pairing_defect,
    resolve_eigenstates,
    shift_eigenphase,
)


@pytest.mark.integration
class TestRootsAgainstDiagonalization:
    """Test root-derived quantities against ED on every state."""

    def test_energies(self, table_params, table_states, table_root_sets):
        for state, zrs in zip(table_states, table_root_sets):
            assert energy_from_roots(zrs, table_params) == pytest.approx(state.energy, abs=1e-8)

    def test_momenta_match_shift_eigenphase(self, table_params, table_states, table_root_sets):
        for state, zrs in zip(table_states, table_root_sets):
            k = momentum_from_roots(zrs, table_params)
            assert angle_distance(k, shift_eigenphase(state.vector, table_params)) < 1e-6

    def test_root_pairing(self, table_root_sets):
        assert max(pairing_defect(zrs.roots) for zrs in table_root_sets) < 1e-6

    def test_root_count(self, table_root_sets):
        assert all(len(zrs.roots) == 3 for zrs in table_root_sets)

    @pytest.mark.parametrize(
        "p",
        [
            ModelParams(two_n=6, b=0.3, eta=0.7),
            ModelParams(two_n=6, b=0.4, eta=0.9, regime=Regime.ETA_PLUS_I_PI),
        ],
        ids=["real_eta", "eta_plus_i_pi"],
    )
    def test_six_sites(self, p):
        states = resolve_eigenstates(exact_spectrum(p), p)
        worst = 0.0
        assert len(states) == p.dim
        for state in states:
            zrs = extract_zero_roots(state.vector, p)
            worst = max(worst, abs(energy_from_roots(zrs, p) - state.energy))
        assert worst < 1e-8


@pytest.mark.integration
class TestBaeRoute:
    """Test BAE solutions against ED."""

    def test_reference_spectrum(self):
        """All eight distinct four-site levels through three routes."""
        record = run_target("spectrum-4site", {})
        assert record.passed, {k: c for k, c in record.checks.items() if not c.passed}
        assert len(record.columns["energy_ed"]) == 8

    def test_ground_seed(self, table_params, table_spectrum):
        zrs = solve(ground_seed(table_params), table_params)
        assert energy_from_roots(zrs, table_params) == pytest.approx(table_spectrum.ground_energy, abs=1e-8)
        np.testing.assert_allclose(np.sort(zrs.roots.imag), [-0.4614, 0.0, 0.4614], atol=1e-3)

    def test_ground_seed_i_pi_regime(self, thermo_params):
        """Pairs at +-eta_plus around the boundary string reach the ED ground state."""
        p = thermo_params
        zrs = solve(ground_seed(p), p)
        ground = exact_spectrum(p, n_lowest=1, eigenvalues_only=True).ground_energy
        assert energy_from_roots(zrs, p) == pytest.approx(ground, abs=1e-8)
        assert ground == pytest.approx(-15.7551, abs=5e-4)
        paired = [z for z in zrs.roots if abs(z.real) > 0.3]
        assert len(paired) == 2 * (p.n_half - 1)
        np.testing.assert_allclose(np.abs([z.real for z in paired]), p.eta_plus, atol=0.05)

    def test_four_site_seeds_reach_distinct_levels(self, table_params):
        """Every composition seed lands on its own ED root set."""
        rows = distinct_root_sets(table_params)
        solved = bae_levels(table_params, four_site_seeds(table_params))
        assert all(zrs is not None for zrs in solved)
        assert max(match_levels(solved, rows)) < 1e-3
        energies = sorted(energy_from_roots(zrs, table_params) for zrs in solved)
        np.testing.assert_allclose(energies, [e for e, _ in rows], atol=1e-8)
