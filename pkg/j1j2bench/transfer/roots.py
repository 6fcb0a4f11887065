"""
Per-eigenstate transfer-matrix eigenvalues, zero-root extraction and the energy and
momentum carried by a root set.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from j1j2bench.config import settings
from j1j2bench.errors import (
    BranchPointError,
    IllConditionedSampleError,
    NotAnEigenvectorError,
    NumericalError,
    PolePointError,
)
from j1j2bench.models.schemas import (
    ModelParams,
    ResolvedState,
    RootKind,
    RootTag,
    SpectrumResult,
    Which,
    ZeroRootSet,
)
from j1j2bench.transfer.transfer import apply_shift, apply_transfer

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2


# ========================
# Strip geometry
# ========================

def reduce_angle(k: float) -> float:
    """Reduce an angle to [-pi, pi)."""
    reduced = (k + math.pi) % (2 * math.pi) - math.pi
    return -math.pi if reduced >= math.pi else reduced


def canonical_strip(z: complex, snap: float = 1e-9) -> complex:
    """Shift Im z by multiples of pi into [-pi/2, pi/2); values just below pi/2 snap to -pi/2."""
    y = (z.imag + HALF_PI) % math.pi - HALF_PI
    if y > HALF_PI - snap:
        y -= math.pi
    return complex(z.real, y)


def strip_distance(z1: complex, z2: complex) -> float:
    """Distance with the imaginary direction taken modulo i*pi."""
    dy = (z1.imag - z2.imag + HALF_PI) % math.pi - HALF_PI
    return abs(complex(z1.real - z2.real, dy))


def canonical_order(roots: Sequence[complex]) -> np.ndarray:
    """Sort by real part (rounded) then imaginary part."""
    ordered = sorted((complex(z) for z in roots), key=lambda z: (round(z.real, 6), z.imag))
    return np.array(ordered, dtype=complex)


def pair_roots(roots: np.ndarray, tol: Optional[float] = None) -> Tuple[List[Tuple[int, int]], float]:
    """
    Match every root with its mirror -z*.

    Returns:
        (pairs, worst mirror distance); a self-mirrored root is paired with itself
    """
    tol = tol if tol is not None else settings.tol_pair
    free = list(range(len(roots)))
    pairs: List[Tuple[int, int]] = []
    worst = 0.0
    while free:
        i = free.pop(0)
        mirror = -np.conj(roots[i])
        candidates = [i] + free
        distances = [strip_distance(mirror, roots[j]) for j in candidates]
        best = int(np.argmin(distances))
        j = candidates[best]
        worst = max(worst, distances[best])
        if distances[best] > tol:
            logger.warning(f"Root {roots[i]:.6f} has no mirror within {tol:g} (closest {distances[best]:.2e})")
            continue
        if j != i:
            free.remove(j)
        pairs.append((i, j))
    return pairs, worst


def tag_roots(roots: np.ndarray, pairs: Sequence[Tuple[int, int]], p: ModelParams) -> List[RootTag]:
    """
    Pattern tag per root: imaginary, conjugate pair with real parts +-n*eta/2, boundary
    string (the single imaginary root in the eta_plus_i_pi regime) or unknown.
    """
    width = settings.classify_tolerance * p.eta
    partner = {}
    for i, j in pairs:
        partner[i] = j
        partner[j] = i
    tags: List[RootTag] = []
    for idx, z in enumerate(roots):
        x = abs(z.real)
        if x <= width:
            tags.append(RootTag(kind=RootKind.IMAGINARY))
            continue
        n = None
        if partner.get(idx, idx) != idx:
            m = 2
            while m * p.eta / 2 - width <= x:
                if abs(x - m * p.eta / 2) <= width:
                    n = m
                    break
                m += 1
        tags.append(RootTag(kind=RootKind.CONJUGATE_PAIR, n=n) if n else RootTag(kind=RootKind.UNKNOWN))
    imaginary = [i for i, t in enumerate(tags) if t.kind == RootKind.IMAGINARY]
    if p.is_regime_two and len(imaginary) == 1:
        tags[imaginary[0]] = RootTag(kind=RootKind.BOUNDARY_STRING)
    return tags


def build_root_set(
    lambda0: complex, roots: Sequence[complex], p: ModelParams, condition: Optional[float] = None
) -> ZeroRootSet:
    """Canonicalize, pair and tag a root set."""
    ordered = canonical_order(canonical_strip(complex(z)) for z in roots)
    pairs, _ = pair_roots(ordered)
    return ZeroRootSet(
        lambda0=complex(lambda0),
        roots=ordered,
        pairing=pairs,
        tags=tag_roots(ordered, pairs, p),
        condition=condition,
    )


def pairing_defect(roots: np.ndarray) -> float:
    """Largest distance between a root and its closest mirror image."""
    return max((min(strip_distance(-np.conj(z), w) for w in roots) for z in roots), default=0.0)


# ========================
# Eigenstates of t(u)
# ========================

def merge_close_groups(spec: SpectrumResult, merge_tol: float) -> List[List[List[int]]]:
    """
    Chain consecutive degeneracy groups whose energies differ by less than merge_tol;
    each chain is resolved by t(u0) on its joint span.
    """
    clusters: List[List[List[int]]] = []
    for group in spec.degeneracy_groups:
        if clusters:
            last = clusters[-1][-1]
            if spec.eigenvalues[group[0]] - spec.eigenvalues[last[-1]] < merge_tol:
                clusters[-1].append(group)
                continue
        clusters.append([group])
    return clusters


def _assign_to_groups(
    groups: Sequence[List[int]], weights: np.ndarray, values: np.ndarray
) -> List[Tuple[int, List[int], int]]:
    """
    Map t(u0)-eigenvectors of a merged span back onto the H groups they live in.

    Returns:
        (column, group, H index) triples, t eigenvalues ordered within each group
    """
    offsets = np.cumsum([0] + [len(g) for g in groups])
    group_weight = np.stack([weights[offsets[g] : offsets[g + 1]].sum(axis=0) for g in range(len(groups))])
    owner = np.argmax(group_weight, axis=0)
    triples = []
    for g, group in enumerate(groups):
        columns = [int(c) for c in np.flatnonzero(owner == g)]
        if len(columns) != len(group):
            raise NotAnEigenvectorError(
                "t(u0) does not separate nearly degenerate H levels",
                {"group": list(group), "assigned": len(columns)},
            )
        columns.sort(key=lambda c: (values[c].real, values[c].imag))
        triples.extend((c, list(group), idx) for c, idx in zip(columns, group))
    return triples


def resolve_eigenstates(spec: SpectrumResult, p: ModelParams, u0: Optional[float] = None) -> List[ResolvedState]:
    """
    Split every H-degeneracy group into eigenvectors of t(u0).

    Groups closer than resolve_merge_relative * ||H|| are diagonalized together and the
    resulting vectors handed back to the group carrying most of their weight.

    Raises:
        NotAnEigenvectorError: if a span is not invariant under t(u0)
    """
    if spec.eigenvectors is None:
        raise ValueError("resolve_eigenstates needs eigenvectors")
    u0 = settings.lambda_sample_offset if u0 is None else u0
    merge_tol = settings.resolve_merge_relative * max(spec.norm, 1.0)
    states: List[ResolvedState] = []
    clusters = merge_close_groups(spec, merge_tol)
    for groups in clusters:
        indices = [i for g in groups for i in g]
        V = spec.eigenvectors[:, indices]
        TV = apply_transfer(u0, p, V)
        block = V.conj().T @ TV
        scale = max(1.0, float(np.max(np.abs(TV))))
        leakage = float(np.max(np.abs(TV - V @ block))) / scale
        if leakage > settings.eigen_tol:
            raise NotAnEigenvectorError(
                "H-eigenspace is not invariant under t(u0)",
                {"group": indices, "leakage": leakage},
            )
        if len(indices) == 1:
            values, W = block.diagonal().copy(), np.eye(1, dtype=complex)
        else:
            values, W = scipy.linalg.eig(block)
        W = W / np.linalg.norm(W, axis=0)
        vectors = V @ W
        vectors /= np.linalg.norm(vectors, axis=0)
        for column, group, idx in _assign_to_groups(groups, np.abs(W) ** 2, values):
            states.append(
                ResolvedState(
                    index=idx,
                    energy=float(spec.eigenvalues[idx]),
                    vector=vectors[:, column],
                    group=group,
                    lambda_u0=complex(values[column]),
                )
            )
    merged = len(spec.degeneracy_groups) - len(clusters)
    if merged:
        logger.warning(f"Resolved {merged} nearly degenerate group(s) jointly with their neighbours")
    logger.debug(f"Resolved {len(states)} states in {len(spec.degeneracy_groups)} groups")
    return states


def lambda_on_state(
    state: np.ndarray,
    p: ModelParams,
    samples: Sequence[complex],
    u0: Optional[float] = None,
    theta: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Lambda(u_k) = <psi|t(u_k)|psi> / <psi|psi>, at the staggered inhomogeneities unless
    theta is given.

    Raises:
        NotAnEigenvectorError: if psi is not an eigenvector of t(u0) or of any t(u_k)
    """
    u0 = settings.lambda_sample_offset if u0 is None else u0
    psi = np.asarray(state, dtype=complex)
    norm2 = float(np.vdot(psi, psi).real)
    points = [complex(u0)] + [complex(u) for u in samples]
    block = apply_transfer_many(points, p, psi, theta)
    values = (psi.conj() @ block) / norm2
    residual = np.linalg.norm(block - np.outer(psi, values), axis=0)
    scale = np.maximum(1.0, np.abs(values)) * math.sqrt(norm2)
    worst = int(np.argmax(residual / scale))
    if residual[worst] / scale[worst] > settings.eigen_tol:
        raise NotAnEigenvectorError(
            f"state is not an eigenvector of t(u) at u={points[worst]}",
            {"u": [points[worst].real, points[worst].imag], "residual": float(residual[worst] / scale[worst])},
        )
    return values[1:]


def apply_transfer_many(
    points: Sequence[complex], p: ModelParams, psi: np.ndarray, theta: Optional[np.ndarray] = None
) -> np.ndarray:
    """Columns t(u_k) psi."""
    return np.stack([apply_transfer(u, p, psi, Which.T, theta) for u in points], axis=1)


def sample_points(p: ModelParams, offset: float) -> np.ndarray:
    """u_k = offset + i*pi*(k-1)/2N, k = 1..2N."""
    return offset + 1j * math.pi * np.arange(p.two_n) / p.two_n


def extract_zero_roots(state: np.ndarray, p: ModelParams) -> ZeroRootSet:
    """
    Lambda0 and the 2N-1 zero roots of the transfer-matrix eigenvalue on a state.

    Lambda(u) e^{(2N-1)u} is an ordinary polynomial of degree 2N-1 in w = e^{2u}; its
    coefficients come from 2N samples on a vertical line and its roots from the
    companion matrix. An ill-conditioned sample system is retried on a shifted line.
    """
    for attempt in Retrying(
        stop=stop_after_attempt(settings.lambda_resample_attempts),
        retry=retry_if_exception_type(IllConditionedSampleError),
        reraise=True,
    ):
        with attempt:
            number = attempt.retry_state.attempt_number
            offset = settings.lambda_sample_offset + settings.lambda_resample_shift * (number - 1)
            if number > 1:
                logger.warning(f"Resampling Lambda on the line Re u = {offset:.3f} (attempt {number})")
            return _extract_at_offset(state, p, offset)
    raise RuntimeError("unreachable")


def _extract_at_offset(state: np.ndarray, p: ModelParams, offset: float) -> ZeroRootSet:
    L = p.two_n
    u = sample_points(p, offset)
    values = lambda_on_state(state, p, u, u0=offset)
    exponents = 2 * np.arange(L) - (L - 1)
    M = np.exp(np.outer(u, exponents))
    condition = float(np.linalg.cond(M))
    if condition > settings.lambda_condition_limit:
        raise IllConditionedSampleError(
            f"sample system condition {condition:.2e} exceeds limit",
            {"condition": condition, "offset": offset},
        )
    coeffs = scipy.linalg.solve(M, values)
    if abs(coeffs[-1]) < 1e-12 * float(np.max(np.abs(coeffs))):
        raise NumericalError("Lambda has fewer than 2N-1 finite zero roots", {"coefficients": np.abs(coeffs).tolist()})
    w = scipy.linalg.eigvals(np.polynomial.polynomial.polycompanion(coeffs))
    roots = [canonical_strip(complex(0.5 * np.log(wk) + p.eta_c / 2)) for wk in w]

    shifted = u[:, np.newaxis] - np.array(roots)[np.newaxis, :] + p.eta_c / 2
    basis = np.prod(np.sinh(shifted), axis=1)
    lambda0 = complex(np.vdot(basis, values) / np.vdot(basis, basis))
    zrs = build_root_set(lambda0, roots, p, condition)
    logger.debug(f"Extracted roots {np.round(zrs.roots, 6)} (cond {condition:.2e})")
    return zrs


# ========================
# Energy and momentum
# ========================

def energy_from_roots(zrs: ZeroRootSet, p: ModelParams) -> float:
    """E = phi(2a) sinh(eta) sum_j [coth(z_j - a - eta/2) + coth(z_j + a - eta/2)] + E0."""
    z = np.asarray(zrs.roots, dtype=complex)
    half = p.eta_c / 2
    args = np.concatenate([z - p.a - half, z + p.a - half])
    sinh_args = np.sinh(args)
    if np.any(np.abs(sinh_args) < 1e-12):
        raise PolePointError("zero root sits on a pole of coth", {"roots": [[r.real, r.imag] for r in z]})
    total = p.phi2a * p.sinh_eta * np.sum(np.cosh(args) / sinh_args) + p.e0
    if abs(total.imag) > 1e-8 * max(1.0, abs(total)):
        raise NumericalError("energy from roots is not real", {"imag": float(total.imag)})
    return float(total.real)


def momentum_from_roots(zrs: ZeroRootSet, p: ModelParams) -> float:
    """k = -i sum_j ln[sinh(a + z_j - eta/2) / sinh(a - z_j - eta/2)] mod 2pi."""
    z = np.asarray(zrs.roots, dtype=complex)
    half = p.eta_c / 2
    num = np.sinh(p.a + z - half)
    den = np.sinh(p.a - z - half)
    if np.any(np.abs(num) < 1e-12) or np.any(np.abs(den) < 1e-12):
        raise BranchPointError("logarithm argument at a branch point", {"roots": [[r.real, r.imag] for r in z]})
    k = -1j * np.sum(np.log(num / den))
    if abs(k.imag) > 1e-8:
        raise NumericalError("momentum from roots is not real", {"imag": float(k.imag)})
    return reduce_angle(float(k.real))


def shift_eigenphase(state: np.ndarray, p: ModelParams) -> float:
    """Phase of <psi|U|psi> / <psi|psi>, reduced to [-pi, pi)."""
    psi = np.asarray(state, dtype=complex)
    value = np.vdot(psi, apply_shift(p, psi)) / np.vdot(psi, psi)
    return reduce_angle(float(np.angle(value)))


def angle_distance(k1: float, k2: float) -> float:
    """Distance between two angles on the circle."""
    return abs(reduce_angle(k1 - k2))
