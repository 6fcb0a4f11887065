"""
Hamiltonian of the antiperiodic J1-J2 chain with staggered chiral three-spin terms.

H = -sum_j sum_alpha [ J1^a s^a_j s^a_{j+1} + J2 s^a_j s^a_{j+2}
                       + (-1)^j J3^a eps_abg s^a_{j+1} s^b_j s^g_{j+2} ]

with sites beyond 2N folded back through sigma^x conjugation.
"""

import itertools
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from j1j2bench.core.pauli import PauliOp, add_pauli_string, check_dense_size, wrap_site
from j1j2bench.errors import HermiticityError
from j1j2bench.models.schemas import MatrixFlag, ModelParams, OperatorMatrix

logger = logging.getLogger(__name__)

AXES = ("x", "y", "z")

Term = Tuple[complex, List[PauliOp]]

# largest |M - M^dagger| entry accepted, relative to the largest |M| entry
HERMITICITY_TOL = 1e-12


def levi_civita() -> List[Tuple[Tuple[str, str, str], int]]:
    """Non-vanishing components of the Levi-Civita symbol."""
    out = []
    for perm in itertools.permutations(range(3)):
        inversions = sum(1 for i, j in itertools.combinations(range(3), 2) if perm[i] > perm[j])
        out.append((tuple(AXES[k] for k in perm), -1 if inversions % 2 else 1))
    return out


def couplings(p: ModelParams) -> Dict[str, Dict[str, float]]:
    """
    Real couplings J1^a, J2, J3^a.
    
    Raises:
        HermiticityError: if any coupling carries a non-negligible imaginary part
    """
    raw = {
        "j1": {"x": p.j1x, "y": p.j1y, "z": p.j1z},
        "j2": {"x": p.j2, "y": p.j2, "z": p.j2},
        "j3": {"x": p.j3x, "y": p.j3y, "z": p.j3z},
    }
    real: Dict[str, Dict[str, float]] = {}
    for name, values in raw.items():
        real[name] = {}
        for alpha, value in values.items():
            if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
                raise HermiticityError(
                    f"coupling {name}{alpha} = {value} is not real",
                    {"coupling": f"{name}{alpha}", "value": [value.real, value.imag]},
                )
            real[name][alpha] = value.real
    return real


def _folded(coefficient: float, factors: Sequence[PauliOp], two_n: int) -> Term:
    ops: List[PauliOp] = []
    sign = 1.0
    for alpha, site in factors:
        folded, s = wrap_site(site, alpha, two_n)
        ops.append((alpha, folded))
        sign *= s
    return complex(coefficient * sign), ops


def hamiltonian_terms(p: ModelParams) -> List[Term]:
    """All Pauli strings of H with their folded boundary coefficients."""
    j = couplings(p)
    eps = levi_civita()
    terms: List[Term] = []
    for site in range(1, p.two_n + 1):
        for alpha in AXES:
            terms.append(_folded(-j["j1"][alpha], [(alpha, site), (alpha, site + 1)], p.two_n))
            terms.append(_folded(-j["j2"][alpha], [(alpha, site), (alpha, site + 2)], p.two_n))
        stagger = (-1) ** site
        for (alpha, beta, gamma), sign in eps:
            coefficient = -stagger * sign * j["j3"][alpha]
            if coefficient == 0.0:
                continue
            terms.append(
                _folded(coefficient, [(alpha, site + 1), (beta, site), (gamma, site + 2)], p.two_n)
            )
    return terms


def check_hermitian(matrix: np.ndarray, label: str) -> None:
    """
    Raises:
        HermiticityError: if the assembled matrix differs from its adjoint
    """
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if deviation > HERMITICITY_TOL * scale:
        raise HermiticityError(
            f"{label} is not Hermitian (max |M - M^dagger| = {deviation:.3e})",
            {"label": label, "deviation": deviation},
        )


def build_hamiltonian(p: ModelParams) -> OperatorMatrix:
    """
    Dense Hamiltonian of the chain.
    
    Args:
        p: Model parameters
        
    Returns:
        Hermitian operator of dimension 2^(2N)
    """
    check_dense_size(p.two_n)
    dim = p.dim
    matrix = np.zeros((dim, dim), dtype=complex)
    terms = hamiltonian_terms(p)
    for coefficient, ops in terms:
        if coefficient != 0:
            add_pauli_string(matrix, ops, coefficient, p.two_n)
    check_hermitian(matrix, "H")
    logger.info(f"Built Hamiltonian: 2N={p.two_n}, b={p.b}, eta={p.eta}, regime={p.regime.value}, terms={len(terms)}")
    return OperatorMatrix(entries=matrix, flag=MatrixFlag.HERMITIAN, label="H")
