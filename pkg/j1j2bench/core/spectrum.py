"""
Hermitian eigensolving, degeneracy grouping and low-lying band detection.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from j1j2bench.config import settings
from j1j2bench.core.hamiltonian import build_hamiltonian
from j1j2bench.errors import DiagonalizationError, HermiticityError
from j1j2bench.models.schemas import (
    BandReport,
    MatrixFlag,
    ModelParams,
    OperatorMatrix,
    Regime,
    SpectrumResult,
)

logger = logging.getLogger(__name__)


def degeneracy_groups(eigenvalues: np.ndarray, tol_deg: float) -> List[List[int]]:
    """Partition sorted eigenvalues into chains of neighbours closer than tol_deg."""
    groups: List[List[int]] = []
    for i, value in enumerate(eigenvalues):
        if groups and value - eigenvalues[groups[-1][-1]] < tol_deg:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus amplitude is real and positive."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    amplitudes = vectors[pivots, np.arange(vectors.shape[1])]
    return vectors * (np.abs(amplitudes) / amplitudes)[np.newaxis, :]


def diagonalize(
    H: OperatorMatrix,
    tol_deg: Optional[float] = None,
    n_lowest: Optional[int] = None,
    eigenvalues_only: bool = False,
) -> SpectrumResult:
    """
    Full (or lowest-part) spectrum of a Hermitian operator.
    
    Args:
        H: Operator flagged hermitian
        tol_deg: Absolute degeneracy tolerance (default tol_deg_relative * ||H||)
        n_lowest: Only compute this many lowest eigenpairs
        eigenvalues_only: Skip eigenvectors
        
    Returns:
        SpectrumResult with ascending eigenvalues
    """
    if H.flag != MatrixFlag.HERMITIAN:
        raise HermiticityError("diagonalize requires an operator flagged hermitian", {"flag": H.flag.value})
    subset = None
    if n_lowest is not None and n_lowest < H.dim:
        subset = [0, n_lowest - 1]
    try:
        if eigenvalues_only:
            values = scipy.linalg.eigh(H.entries, eigvals_only=True, subset_by_index=subset)
            vectors = None
        else:
            values, vectors = scipy.linalg.eigh(H.entries, subset_by_index=subset)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise DiagonalizationError(f"eigensolver failed: {e}", {"dim": H.dim}) from e
    
    # ||H||_2 from the extreme eigenvalues; a subset only sees the low end
    norm = float(np.max(np.abs(values)))
    if subset is not None:
        norm = max(norm, float(np.max(np.abs(H.entries).sum(axis=1))))
    tol = tol_deg if tol_deg is not None else settings.tol_deg_relative * norm
    
    if vectors is not None:
        residual = float(np.max(np.linalg.norm(H.entries @ vectors - vectors * values, axis=0)))
        if residual > settings.eigen_residual_tol * max(norm, 1.0):
            raise DiagonalizationError(
                f"eigenpair residual {residual:.3e} too large",
                {"residual": residual, "norm": norm},
            )
        vectors = fix_phases(vectors)
    
    groups = degeneracy_groups(values, tol)
    logger.info(f"Diagonalized {H.label or 'operator'}: dim={H.dim}, levels={len(values)}, groups={len(groups)}")
    return SpectrumResult(
        eigenvalues=values,
        eigenvectors=vectors,
        degeneracy_groups=groups,
        tol_deg=tol,
        norm=norm,
        dim=H.dim,
    )


@lru_cache(maxsize=32)
def exact_spectrum(p: ModelParams, n_lowest: Optional[int] = None, eigenvalues_only: bool = False) -> SpectrumResult:
    """Cached diagonalization of the chain Hamiltonian."""
    return diagonalize(build_hamiltonian(p), n_lowest=n_lowest, eigenvalues_only=eigenvalues_only)


def low_band(spec: SpectrumResult, gap_ratio: Optional[float] = None) -> BandReport:
    """
    Detect the low-lying band separated by the largest gap in the lower half.
    
    The largest gap among E_{i+1} - E_i, i < dim/2, must exceed gap_ratio times every
    gap below it; gaps above it lie in the upper band and are not compared. A band made
    of one degenerate level is compared against all gaps of the lower half instead.
    """
    ratio_needed = gap_ratio or settings.band_gap_ratio
    values = spec.eigenvalues
    half = min(spec.dim // 2, len(values) - 1)
    gaps = np.diff(values[: half + 1])
    if len(gaps) < 2:
        return BandReport(found=False)
    edge = int(np.argmax(gaps))
    largest = gaps[edge]
    second = float(np.max(gaps[:edge])) if edge > 0 else 0.0
    if second < spec.tol_deg:
        # a single degenerate level below the gap is measured against all other gaps
        second = float(np.max(np.delete(gaps, edge)))
    ratio = float(largest / second) if second > 0 else math.inf
    if ratio < ratio_needed:
        logger.warning(f"No clear two-band structure (gap ratio {ratio:.2f} < {ratio_needed})")
        return BandReport(found=False, gap_ratio=ratio)
    
    band_size = edge + 1
    ground = values[0]
    ground_multiplicity = sum(1 for v in values[:band_size] if v - ground < spec.tol_deg)
    delta_e = [float(v - ground) for v in values[ground_multiplicity:band_size]]
    distinct = [
        float(values[g[0]] - ground)
        for g in degeneracy_groups(values[:band_size], spec.tol_deg)
        if g[0] >= ground_multiplicity
    ]
    return BandReport(
        found=True,
        band_size=band_size,
        ground_multiplicity=ground_multiplicity,
        count=len(delta_e),
        delta_e=delta_e,
        distinct_delta_e=distinct,
        delta_e_max=max(delta_e) if delta_e else 0.0,
        gap_ratio=ratio,
    )


def nearly_degenerate_scan(spec: SpectrumResult, p: Optional[ModelParams] = None) -> BandReport:
    """Nearly degenerate states above the ground doublet in the real-eta regime."""
    if p is not None and p.regime != Regime.REAL_ETA:
        raise ValueError("nearly degenerate states are defined in the real_eta regime")
    return low_band(spec)


def delta_e_max_scan(two_n: int, eta: float, b_grid: Sequence[float]) -> List[Tuple[float, Optional[float]]]:
    """
    Width of the low-lying band as a function of b.
    
    Returns:
        (b, delta_e_max) pairs; None where no band was found
    """
    def one(b: float) -> Tuple[float, Optional[float]]:
        p = ModelParams(two_n=two_n, b=b, eta=eta)
        report = low_band(exact_spectrum(p, eigenvalues_only=True))
        return b, report.delta_e_max if report.found else None
    
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        results = list(pool.map(one, b_grid))
    found = [r for r in results if r[1] is not None]
    logger.info(f"delta_e_max scan: {len(found)}/{len(results)} grid points with a band")
    return results


def scan_minimizer(results: Sequence[Tuple[float, Optional[float]]]) -> Optional[float]:
    """Grid point with the smallest band width."""
    found = [(value, b) for b, value in results if value is not None]
    if not found:
        return None
    return min(found)[1]
