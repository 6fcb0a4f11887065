"""
Unit tests for the Pauli algebra and the chain Hamiltonian.
"""

import numpy as np
import pytest

from j1j2bench.core.hamiltonian import (
    build_hamiltonian,
    check_hermitian,
    couplings,
    hamiltonian_terms,
    levi_civita,
)
from j1j2bench.core.pauli import (
    SIGMA,
    basis_state,
    check_dense_size,
    commutator_norm,
    kron_site_operator,
    pauli_string,
    twisted_translation,
    wrap_site,
)
from j1j2bench.errors import DimensionError, HermiticityError
from j1j2bench.models.schemas import MatrixFlag, ModelParams
from j1j2bench.transfer.transfer import reconstruct_hamiltonian
from tests.factories import ParamsFactory


@pytest.mark.unit
class TestPauliStrings:
    """Test signed-permutation Pauli strings against Kronecker products."""

    @pytest.mark.parametrize("alpha", ["x", "y", "z"])
    @pytest.mark.parametrize("site", [1, 2, 3])
    def test_single_site_matches_kron(self, alpha, site):
        dense = pauli_string([(alpha, site)], 3).entries
        np.testing.assert_allclose(dense, kron_site_operator(alpha, site, 3))

    def test_product_order(self):
        """Factors are written left to right as in the operator product."""
        xz = pauli_string([("x", 1), ("z", 1)], 4).entries
        expected = -1j * kron_site_operator("y", 1, 4)
        np.testing.assert_allclose(xz, expected)

    def test_two_site_string(self):
        dense = pauli_string([("y", 1), ("y", 4)], 4).entries
        expected = kron_site_operator("y", 1, 4) @ kron_site_operator("y", 4, 4)
        np.testing.assert_allclose(dense, expected)

    def test_commutator_norm(self):
        assert commutator_norm(SIGMA["x"], SIGMA["x"]) == 0.0
        assert commutator_norm(SIGMA["x"], SIGMA["z"]) == pytest.approx(2.0)

    def test_basis_state(self):
        assert basis_state([0, 1, 0, 1]) == 5
        assert basis_state([1, 0, 0, 0]) == 8

    def test_wrap_site_twist(self):
        assert wrap_site(3, "y", 4) == (3, 1.0)
        assert wrap_site(5, "x", 4) == (1, 1.0)
        assert wrap_site(6, "z", 4) == (2, -1.0)


@pytest.mark.unit
class TestDenseLimit:
    """Test the dense-size guard."""

    def test_hard_ceiling(self):
        with pytest.raises(DimensionError):
            check_dense_size(16)

    def test_opt_in_required(self):
        with pytest.raises(DimensionError, match="ALLOW_LARGE_ED"):
            check_dense_size(14)

    def test_small_sizes_allowed(self):
        check_dense_size(12)


@pytest.mark.unit
class TestTwistedTranslation:
    """Test the two-site translation with the boundary twist."""

    @pytest.mark.parametrize("two_n", [4, 6])
    def test_unitary_permutation(self, two_n):
        T = twisted_translation(two_n).entries
        np.testing.assert_allclose(T @ T.conj().T, np.eye(1 << two_n))
        assert np.all(np.sum(np.abs(T), axis=0) == 1)

    def test_full_cycle_flips_every_spin(self):
        """N applications move every site once around and flip it once."""
        two_n = 4
        T = twisted_translation(two_n).entries
        flip = np.eye(1 << two_n)[::-1]
        np.testing.assert_allclose(T @ T, flip)


@pytest.mark.unit
class TestHamiltonian:
    """Test the dense Hamiltonian."""

    def test_levi_civita(self):
        eps = levi_civita()
        assert len(eps) == 6
        assert sum(sign for _, sign in eps) == 0
        assert (("x", "y", "z"), 1) in eps

    def test_hermitian(self, table_params):
        H = build_hamiltonian(table_params)
        assert H.flag == MatrixFlag.HERMITIAN
        assert H.dim == 16

    def test_traceless(self, small_params):
        """Every Pauli string in H is traceless."""
        H = build_hamiltonian(small_params).entries
        assert abs(np.trace(H)) < 1e-10

    def test_couplings_real(self, ipi_params):
        values = couplings(ipi_params)
        assert set(values) == {"j1", "j2", "j3"}
        assert values["j2"]["x"] == values["j2"]["z"]

    def test_term_count(self, table_params):
        """Six two-body and six three-body strings per site."""
        assert len(hamiltonian_terms(table_params)) == 12 * table_params.two_n

    @pytest.mark.parametrize(
        "params",
        [
            ParamsFactory.real_eta(4, b=0.2, eta=0.8),
            ParamsFactory.real_eta(6, b=0.45, eta=1.1),
            ParamsFactory.eta_plus_i_pi(4, b=0.3, eta=0.6),
            ParamsFactory.eta_plus_i_pi(6, b=1.0, eta=1.3),
        ],
    )
    def test_commutes_with_twisted_translation(self, params):
        H = build_hamiltonian(params).entries
        T = twisted_translation(params.two_n).entries
        assert commutator_norm(H, T) < 1e-10 * max(1.0, float(np.max(np.abs(H))))

    def test_regime_two_builds(self, ipi_params):
        H = build_hamiltonian(ipi_params).entries
        np.testing.assert_allclose(H, H.conj().T, atol=1e-14)

    def test_assembled_matrix_is_exactly_hermitian(self, small_params):
        H = build_hamiltonian(small_params).entries
        assert np.max(np.abs(H - H.conj().T)) < 1e-13

    def test_non_hermitian_rejected(self):
        matrix = np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex)
        with pytest.raises(HermiticityError):
            check_hermitian(matrix, "M")


def antiperiodic_xxz(two_n: int, eta: float) -> np.ndarray:
    """-sum_j (sx sx + sy sy + cosh(eta) sz sz) with sigma^x conjugation across the boundary."""
    anisotropy = {"x": 1.0, "y": 1.0, "z": np.cosh(eta)}
    twist = {"x": 1.0, "y": -1.0, "z": -1.0}
    H = np.zeros((1 << two_n, 1 << two_n), dtype=complex)
    for site in range(1, two_n + 1):
        right = site % two_n + 1
        for alpha, j in anisotropy.items():
            sign = twist[alpha] if site == two_n else 1.0
            H -= sign * j * kron_site_operator(alpha, site, two_n) @ kron_site_operator(alpha, right, two_n)
    return H


@pytest.mark.unit
class TestXXZLimit:
    """Test the homogeneous b = 0 point, where only nearest-neighbour XXZ terms survive."""

    @pytest.mark.parametrize("two_n, eta", [(4, 0.8), (6, 1.3)])
    def test_build_matches_xxz(self, two_n, eta):
        p = ModelParams(two_n=two_n, b=0.0, eta=eta)
        np.testing.assert_allclose(build_hamiltonian(p).entries, antiperiodic_xxz(two_n, eta), atol=1e-12)

    def test_couplings_vanish(self):
        values = couplings(ModelParams(two_n=4, b=0.0, eta=0.8))
        assert values["j2"]["x"] == 0.0
        assert all(value == 0.0 for value in values["j3"].values())
        assert values["j1"]["x"] == pytest.approx(1.0)

    def test_transfer_reconstruction(self):
        p = ModelParams(two_n=4, b=0.0, eta=0.8)
        rebuilt = reconstruct_hamiltonian(p).entries
        np.testing.assert_allclose(rebuilt, antiperiodic_xxz(4, 0.8), atol=1e-8)
