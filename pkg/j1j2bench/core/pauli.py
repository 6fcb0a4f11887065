"""
Pauli operator algebra on 2N sites.

Basis convention: site 1 is the leftmost tensor factor (most significant bit) and
spin up is bit 0. A Pauli string sends every basis state to a single basis state
times a phase, so strings are assembled as signed permutations.
"""

import logging
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from j1j2bench.config import DENSE_HARD_LIMIT, settings
from j1j2bench.errors import DimensionError
from j1j2bench.models.schemas import MatrixFlag, OperatorMatrix

logger = logging.getLogger(__name__)

SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)

# Sign picked up by sigma^alpha under conjugation with sigma^x (boundary twist).
TWIST_SIGN = {"x": 1.0, "y": -1.0, "z": -1.0}

PauliOp = Tuple[str, int]


def check_dense_size(two_n: int) -> None:
    """Reject chains whose dense operators would exceed the allowed size."""
    if two_n > DENSE_HARD_LIMIT:
        raise DimensionError(
            f"2N={two_n} exceeds the dense limit {DENSE_HARD_LIMIT}",
            {"two_n": two_n, "limit": DENSE_HARD_LIMIT},
        )
    if two_n > settings.dense_limit:
        raise DimensionError(
            f"2N={two_n} requires ALLOW_LARGE_ED=true",
            {"two_n": two_n, "limit": settings.dense_limit},
        )


def bit_shift(site: int, two_n: int) -> int:
    """Bit position of a 1-based site index."""
    return two_n - site


def pauli_action(ops: Sequence[PauliOp], two_n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Action of a Pauli product on every basis state.
    
    Args:
        ops: (alpha, site) factors, written left to right as in the product
        two_n: Number of sites
        
    Returns:
        (targets, phases) with P|s> = phases[s] |targets[s]>
    """
    current = np.arange(1 << two_n, dtype=np.int64)
    phases = np.ones(current.shape, dtype=complex)
    for alpha, site in reversed(list(ops)):
        shift = bit_shift(site, two_n)
        bit = (current >> shift) & 1
        if alpha == "x":
            current = current ^ (1 << shift)
        elif alpha == "y":
            phases = phases * np.where(bit == 0, 1j, -1j)
            current = current ^ (1 << shift)
        elif alpha == "z":
            phases = phases * np.where(bit == 0, 1.0, -1.0)
        else:
            raise ValueError(f"Unknown Pauli label: {alpha}")
    return current, phases


def add_pauli_string(matrix: np.ndarray, ops: Sequence[PauliOp], coefficient: complex, two_n: int) -> None:
    """Accumulate coefficient * (Pauli product) into a dense matrix in place."""
    targets, phases = pauli_action(ops, two_n)
    columns = np.arange(1 << two_n)
    matrix[targets, columns] += coefficient * phases


def pauli_string(ops: Sequence[PauliOp], two_n: int, coefficient: complex = 1.0) -> OperatorMatrix:
    """Dense matrix of a single Pauli product."""
    check_dense_size(two_n)
    matrix = np.zeros((1 << two_n, 1 << two_n), dtype=complex)
    add_pauli_string(matrix, ops, coefficient, two_n)
    return OperatorMatrix(entries=matrix, label="".join(f"s{a}{j}" for a, j in ops))


def kron_site_operator(alpha: str, site: int, two_n: int) -> np.ndarray:
    """sigma^alpha on one site by explicit Kronecker products (reference construction)."""
    factors: List[np.ndarray] = [
        SIGMA[alpha] if k == site else IDENTITY2 for k in range(1, two_n + 1)
    ]
    return reduce(np.kron, factors)


def wrap_site(site: int, alpha: str, two_n: int) -> Tuple[int, float]:
    """Fold a site index beyond 2N back with the sign of the sigma^x conjugation."""
    if site > two_n:
        return site - two_n, TWIST_SIGN[alpha]
    return site, 1.0


def twisted_translation(two_n: int) -> OperatorMatrix:
    """
    Two-site translation composed with the boundary twist,
    |s1 s2 ... s2N> -> |s3 ... s2N s1' s2'> with s' the flipped spin.
    """
    check_dense_size(two_n)
    dim = 1 << two_n
    states = np.arange(dim, dtype=np.int64)
    # shifting left by two sites moves sites 3..2N up; sites 1, 2 re-enter flipped at the end
    head = states >> (two_n - 2)
    targets = ((states << 2) & (dim - 1)) | (head ^ 0b11)
    matrix = np.zeros((dim, dim), dtype=complex)
    matrix[targets, states] = 1.0
    return OperatorMatrix(entries=matrix, flag=MatrixFlag.UNITARY, label="T2*twist")


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry norm of [a, b]."""
    return float(np.max(np.abs(a @ b - b @ a)))


def basis_state(bits: Iterable[int]) -> int:
    """Basis index of a spin configuration given site by site (0 = up)."""
    index = 0
    for bit in bits:
        index = (index << 1) | int(bit)
    return index
