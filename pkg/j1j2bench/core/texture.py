"""
Kink bases and spin-texture projections of eigenstates.
"""

import logging
from typing import List

import numpy as np

from j1j2bench.core.spectrum import fix_phases
from j1j2bench.models.schemas import (
    KinkBasis,
    KinkKind,
    ModelParams,
    SpectrumResult,
    TextureRow,
    TextureTable,
)

logger = logging.getLogger(__name__)


def reference_state(two_n: int, kind: KinkKind) -> int:
    """|up...up> for ferro, |up down up down ...> for neel."""
    if kind == KinkKind.FERRO:
        return 0
    index = 0
    for site in range(1, two_n + 1):
        index = (index << 1) | (0 if site % 2 else 1)
    return index


def kink_basis(p: ModelParams, kind: KinkKind) -> KinkBasis:
    """
    4N kink states K_j = prod_{k<j} sigma^x_{(k-1) mod 2N + 1} |reference>.
    
    Args:
        p: Model parameters (only 2N is used)
        kind: Ferro or Neel reference
        
    Returns:
        KinkBasis with one basis-state index per kink vector
    """
    two_n = p.two_n
    state = reference_state(two_n, kind)
    indices: List[int] = [state]
    for k in range(1, 2 * two_n):
        site = (k - 1) % two_n + 1
        state ^= 1 << (two_n - site)
        indices.append(state)
    return KinkBasis(kind=kind, two_n=two_n, indices=indices)


def texture_projections(spec: SpectrumResult, basis: KinkBasis) -> TextureTable:
    """
    Projections alpha_ij = <K_j|psi_i> and residual norms delta_i.
    
    Inside each degeneracy group the eigenvectors are rotated onto the eigenvectors of
    the kink projector compressed to the group, which makes delta independent of the
    eigensolver's arbitrary choice of basis in degenerate subspaces.
    
    Raises:
        ValueError: if the spectrum has no eigenvectors or the dimensions differ
    """
    if spec.eigenvectors is None:
        raise ValueError("texture projections need eigenvectors")
    if spec.dim != basis.dim:
        raise ValueError(f"dimension mismatch: spectrum {spec.dim}, basis {basis.dim}")
    
    vectors = spec.eigenvectors.copy()
    for group in spec.degeneracy_groups:
        if len(group) < 2:
            continue
        block = vectors[:, group]
        overlaps = block[basis.indices, :]
        _, rotation = np.linalg.eigh(overlaps.conj().T @ overlaps)
        # largest kink weight first within the group
        vectors[:, group] = block @ rotation[:, ::-1]
    vectors = fix_phases(vectors)
    
    alpha = vectors[basis.indices, :].T
    weights = np.sum(np.abs(alpha) ** 2, axis=1)
    deltas = np.sqrt(np.clip(1.0 - weights, 0.0, None))
    rows = [
        TextureRow(index=i, energy=float(spec.eigenvalues[i]), alpha=alpha[i], delta=float(deltas[i]))
        for i in range(vectors.shape[1])
    ]
    logger.info(f"Projected {len(rows)} states on the {basis.kind.value} kink basis")
    return TextureTable(kind=basis.kind, rows=rows)
