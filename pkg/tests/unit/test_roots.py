"""
Unit tests for strip geometry, root pairing, tagging and eigenstate resolution.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from j1j2bench.config import settings
from j1j2bench.core.spectrum import degeneracy_groups
from j1j2bench.errors import NotAnEigenvectorError, PolePointError
from j1j2bench.models.schemas import ModelParams, Regime, RootKind, SpectrumResult, Which, ZeroRootSet
from j1j2bench.transfer.roots import (
    angle_distance,
    build_root_set,
    canonical_order,
    canonical_strip,
    energy_from_roots,
    lambda_on_state,
    merge_close_groups,
    pair_roots,
    pairing_defect,
    reduce_angle,
    resolve_eigenstates,
    sample_points,
    strip_distance,
    tag_roots,
)
from j1j2bench.transfer.transfer import apply_transfer, perturbed_theta, quantum_determinant_terms
from tests.factories import RootSetFactory


@pytest.mark.unit
class TestStripGeometry:
    """Test angle reduction and the i*pi periodic strip."""

    @pytest.mark.parametrize(
        "k, expected",
        [(0.0, 0.0), (math.pi, -math.pi), (-math.pi, -math.pi), (1.5 * math.pi, -0.5 * math.pi), (7.0, 7.0 - 2 * math.pi)],
    )
    def test_reduce_angle(self, k, expected):
        assert reduce_angle(k) == pytest.approx(expected)

    def test_canonical_strip_range(self):
        assert canonical_strip(complex(0.3, 2.0)) == pytest.approx(complex(0.3, 2.0 - math.pi))
        assert canonical_strip(complex(0.0, math.pi / 2)).imag == pytest.approx(-math.pi / 2)

    def test_strip_distance_periodic(self):
        assert strip_distance(complex(0, math.pi / 2 - 1e-9), complex(0, -math.pi / 2)) < 1e-8
        assert strip_distance(complex(1, 0), complex(0, 0)) == pytest.approx(1.0)

    def test_angle_distance(self):
        assert angle_distance(math.pi - 0.1, -math.pi + 0.1) == pytest.approx(0.2)

    def test_canonical_order(self):
        ordered = canonical_order([0.5 + 0.1j, -0.5 + 0.1j, 0.3j, -0.2j])
        assert list(ordered) == [-0.5 + 0.1j, -0.2j, 0.3j, 0.5 + 0.1j]

    def test_sample_points(self, table_params):
        u = sample_points(table_params, 0.37)
        assert len(u) == 4
        np.testing.assert_allclose(u.real, 0.37)
        np.testing.assert_allclose(np.diff(u.imag), math.pi / 4)


@pytest.mark.unit
class TestPairing:
    """Test the z -> -z* mirror pairing."""

    def test_pairs_and_self_mirrors(self):
        roots = np.array([-0.5 + 0.1j, 0.2j, 0.5 + 0.1j])
        pairs, worst = pair_roots(roots)
        assert sorted(pairs) == [(0, 2), (1, 1)]
        assert worst == pytest.approx(0.0, abs=1e-15)

    def test_unpaired_root(self):
        roots = np.array([-0.5 + 0.1j, 0.2j, 0.4 + 0.1j])
        pairs, worst = pair_roots(roots)
        assert pairs == [(1, 1)]
        assert worst > 1e-6

    def test_pairing_defect(self):
        assert pairing_defect(np.array([-0.3 + 0.2j, 0.3 + 0.2j])) == pytest.approx(0.0)
        assert pairing_defect(np.array([0.3 + 0.2j])) == pytest.approx(0.6)


@pytest.mark.unit
class TestTags:
    """Test root pattern tags."""

    def test_conjugate_pair_tag(self, small_params):
        zrs = RootSetFactory.with_pair(small_params, n=2, lam=0.3)
        kinds = [t.kind for t in zrs.tags]
        assert kinds.count(RootKind.CONJUGATE_PAIR) == 2
        assert kinds.count(RootKind.IMAGINARY) == 3
        assert all(t.n == 2 for t in zrs.tags if t.kind == RootKind.CONJUGATE_PAIR)

    def test_longer_string(self, small_params):
        zrs = RootSetFactory.with_pair(small_params, n=3, lam=-0.2)
        assert {t.n for t in zrs.tags if t.kind == RootKind.CONJUGATE_PAIR} == {3}

    def test_boundary_string_in_i_pi_regime(self):
        p = ModelParams(two_n=4, b=0.2, eta=0.6, regime=Regime.ETA_PLUS_I_PI)
        roots = np.array([-0.6 + 0.4j, 0.1j, 0.6 + 0.4j])
        pairs, _ = pair_roots(roots)
        tags = tag_roots(roots, pairs, p)
        assert [t.kind for t in tags] == [
            RootKind.CONJUGATE_PAIR,
            RootKind.BOUNDARY_STRING,
            RootKind.CONJUGATE_PAIR,
        ]

    def test_unmatched_real_part_is_unknown(self, table_params):
        zrs = build_root_set(1.0, [-0.55 + 0.2j, 0.0j, 0.55 + 0.2j], table_params)
        assert [t.kind for t in zrs.tags].count(RootKind.UNKNOWN) == 2

    def test_x_coordinates(self, table_params):
        zrs = RootSetFactory.imaginary(table_params)
        np.testing.assert_allclose(zrs.x.imag, 0.0, atol=1e-15)


@pytest.mark.unit
class TestEnergyFromRoots:
    """Test the energy formula on root sets."""

    def test_pole(self, table_params):
        pole = table_params.a + table_params.eta_c / 2
        zrs = ZeroRootSet(lambda0=1.0, roots=np.array([pole, 0.1j, -0.1j]))
        with pytest.raises(PolePointError):
            energy_from_roots(zrs, table_params)

    def test_mirror_symmetric_roots_give_real_energy(self, table_params):
        energy = energy_from_roots(RootSetFactory.imaginary(table_params, spread=0.5), table_params)
        assert math.isfinite(energy)


@pytest.mark.unit
class TestEigenvalueFunction:
    """Test Lambda(u) on transfer-matrix eigenstates."""

    @pytest.mark.parametrize("level", [0, 5, 11])
    def test_i_pi_antiperiodicity(self, table_params, table_states, level):
        values = lambda_on_state(table_states[level].vector, table_params, [0.2, 0.2 + 1j * math.pi])
        assert abs(values[1] + values[0]) < 1e-9 * max(1.0, abs(values[0]))

    def test_functional_relation_at_distinct_inhomogeneities(self, table_params):
        p = table_params
        theta = perturbed_theta(p)
        u0 = 0.37
        t_u0 = apply_transfer(u0, p, np.eye(p.dim, dtype=complex), Which.T, theta)
        values, vectors = scipy.linalg.eig(t_u0)
        separation = [np.min(np.abs(np.delete(values, i) - values[i])) for i in range(len(values))]
        psi = vectors[:, int(np.argmax(separation))]
        for theta_j in theta:
            lam = lambda_on_state(psi, p, [theta_j, theta_j - p.eta_c], u0=u0, theta=theta)
            constant = quantum_determinant_terms(theta_j, p, theta)
            scale = max(1.0, abs(constant), abs(lam[0] * lam[1]))
            assert abs(lam[0] * lam[1] + constant) / scale < 1e-8


def spectrum_from(eigenvalues, template: SpectrumResult, eigenvectors=None) -> SpectrumResult:
    return SpectrumResult(
        eigenvalues=eigenvalues,
        eigenvectors=template.eigenvectors if eigenvectors is None else eigenvectors,
        degeneracy_groups=degeneracy_groups(eigenvalues, template.tol_deg),
        tol_deg=template.tol_deg,
        norm=template.norm,
        dim=template.dim,
    )


@pytest.mark.unit
class TestNearlyDegenerateLevels:
    """Test resolving H levels whose eigenvectors mix across a tiny gap."""

    def test_merge_close_groups(self, table_spectrum):
        values = np.array([0.0, 0.0, 1e-6, 0.5, 0.5 + 2e-6, 0.5 + 4e-6, 2.0])
        spec = spectrum_from(values, table_spectrum)
        assert spec.degeneracy_groups == [[0, 1], [2], [3], [4], [5], [6]]
        assert merge_close_groups(spec, 1e-5) == [[[0, 1], [2]], [[3], [4], [5]], [[6]]]
        assert merge_close_groups(spec, 1e-9) == [[g] for g in spec.degeneracy_groups]

    def mixed_spectrum(self, spectrum: SpectrumResult) -> SpectrumResult:
        """Move the second level 5e-6 above the ground and rotate one vector of each by 1e-4."""
        ground, second = spectrum.degeneracy_groups[0], spectrum.degeneracy_groups[1]
        values = spectrum.eigenvalues.copy()
        values[second] = values[ground[0]] + 5e-6
        vectors = spectrum.eigenvectors.copy()
        a, b = ground[0], second[0]
        c, s = math.cos(1e-4), math.sin(1e-4)
        vectors[:, a] = c * spectrum.eigenvectors[:, a] + s * spectrum.eigenvectors[:, b]
        vectors[:, b] = -s * spectrum.eigenvectors[:, a] + c * spectrum.eigenvectors[:, b]
        return spectrum_from(values, spectrum, vectors)

    def test_mixed_levels_resolved_jointly(self, table_params, table_spectrum, table_states):
        mixed = self.mixed_spectrum(table_spectrum)
        states = resolve_eigenstates(mixed, table_params)
        assert sorted(s.index for s in states) == list(range(16))
        np.testing.assert_allclose(
            np.sort(np.array([s.lambda_u0 for s in states])),
            np.sort(np.array([s.lambda_u0 for s in table_states])),
            rtol=1e-8,
            atol=1e-10,
        )
        for state in states:
            values = lambda_on_state(state.vector, table_params, [0.1 + 0.2j])
            assert np.isfinite(values).all()

    def test_mixed_levels_leak_when_resolved_apart(self, table_params, table_spectrum, monkeypatch):
        monkeypatch.setattr(settings, "resolve_merge_relative", 1e-12)
        with pytest.raises(NotAnEigenvectorError):
            resolve_eigenstates(self.mixed_spectrum(table_spectrum), table_params)
