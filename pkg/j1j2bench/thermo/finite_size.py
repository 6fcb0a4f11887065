"""
Thermodynamic-limit formulas against exact diagonalization at finite 2N.

Excitation gaps are compared on the first ED state above a reference level whose
extracted zero roots show the pattern of the branch; the branch parameter (lambda or
mu) is read from those roots.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from j1j2bench.bae.patterns import classify
from j1j2bench.config import settings
from j1j2bench.core.spectrum import exact_spectrum
from j1j2bench.errors import NumericalError
from j1j2bench.models.schemas import ModelParams, PatternSeed, SpectrumResult, ZeroRootSet
from j1j2bench.thermo.regime_one import e1_energy, ground_energy_I
from j1j2bench.thermo.regime_two import e2_energy, e2g, e3_energy
from j1j2bench.transfer.roots import extract_zero_roots, resolve_eigenstates, strip_distance

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2

# lowest eigenpairs searched for an excitation of the requested pattern
EXCITATION_SEARCH_STATES = 256

# boundary-string positions closer than this count as the same point of the strip
BOUNDARY_TOL = 1e-3

Point = Tuple[int, float]


def ed_ground_energy(p: ModelParams) -> float:
    return exact_spectrum(p, n_lowest=1, eigenvalues_only=True).ground_energy


def _sweep(sizes: Sequence[int], one: Callable[[int], float]) -> List[Point]:
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        values = list(pool.map(one, sizes))
    return list(zip(sizes, values))


def delta_e1g(base: ModelParams, sizes: Sequence[int]) -> List[Point]:
    """E1g - E_ED per size."""
    return _sweep(sizes, lambda n: ground_energy_I(base.with_size(n)) - ed_ground_energy(base.with_size(n)))


def delta_e2g(base: ModelParams, sizes: Sequence[int], omega_max: Optional[int] = None) -> List[Point]:
    """E2g - E_ED per size."""
    return _sweep(sizes, lambda n: e2g(base.with_size(n), omega_max) - ed_ground_energy(base.with_size(n)))


def _search_levels(p: ModelParams) -> Iterator[Tuple[float, ZeroRootSet, PatternSeed]]:
    """(energy, roots, pattern) of the lowest resolved states, in ascending energy."""
    spec: SpectrumResult = exact_spectrum(p, n_lowest=min(p.dim, EXCITATION_SEARCH_STATES))
    groups = spec.degeneracy_groups
    if len(spec.eigenvalues) < spec.dim:
        # the last group may be cut by the subset
        groups = groups[:-1]
    for group in groups:
        partial = SpectrumResult(
            eigenvalues=spec.eigenvalues,
            eigenvectors=spec.eigenvectors,
            degeneracy_groups=[group],
            tol_deg=spec.tol_deg,
            norm=spec.norm,
            dim=spec.dim,
        )
        for state in resolve_eigenstates(partial, p):
            zrs = extract_zero_roots(state.vector, p)
            yield state.energy, zrs, classify(zrs, p)


def find_excitation(
    p: ModelParams,
    accept: Callable[[PatternSeed], bool],
    reference: Optional[Callable[[PatternSeed], bool]] = None,
) -> Tuple[float, ZeroRootSet, PatternSeed]:
    """
    Lowest state whose root pattern is accepted, measured from a reference state.

    The reference is the lowest state whose pattern matches `reference` (the ED ground
    level when None); the excitation is the lowest accepted state above it.

    Returns:
        (E - E_reference, roots, pattern)

    Raises:
        NumericalError: if the reference or the excitation is not among the searched states
    """
    base: Optional[float] = None
    tol = 0.0
    accepted: List[Tuple[float, ZeroRootSet, PatternSeed]] = []
    for energy, zrs, pattern in _search_levels(p):
        if base is None and (reference is None or reference(pattern)):
            base = energy
            tol = settings.tol_deg_relative * max(1.0, abs(energy))
            logger.debug(f"Reference level at E={energy:.10f}: {pattern.composition()}")
        if accept(pattern):
            accepted.append((energy, zrs, pattern))
        if base is None:
            continue
        above = [level for level in accepted if level[0] > base + tol]
        if above:
            energy, zrs, pattern = above[0]
            logger.debug(f"Excitation at E={energy:.10f}: {pattern.composition()}")
            return energy - base, zrs, pattern
    raise NumericalError(
        "no state with the requested root pattern among the lowest levels",
        {"two_n": p.two_n, "searched": EXCITATION_SEARCH_STATES, "reference_found": base is not None},
    )


def _single_pair(n: int) -> Callable[[PatternSeed], bool]:
    def accept(pattern: PatternSeed) -> bool:
        return not pattern.unknown and len(pattern.pairs) == 1 and pattern.pairs[0].n == n
    return accept


def boundary_pattern(p: ModelParams, accept_mu: Callable[[float], bool]) -> Callable[[PatternSeed], bool]:
    """N-1 length-2 pairs plus a boundary string whose position passes accept_mu."""
    def accept(pattern: PatternSeed) -> bool:
        if pattern.unknown or pattern.imaginary or pattern.boundary_mu is None:
            return False
        if len(pattern.pairs) != p.n_half - 1 or any(pair.n != 2 for pair in pattern.pairs):
            return False
        return accept_mu(pattern.boundary_mu)
    return accept


def _near(mu: float, target: float) -> bool:
    return strip_distance(complex(0, mu), complex(0, target)) <= BOUNDARY_TOL


def boundary_at(mu0: float) -> Callable[[float], bool]:
    return lambda mu: _near(mu, mu0)


def boundary_sliding(mu: float) -> bool:
    """A boundary string away from both ground positions 0 and -pi/2."""
    return not _near(mu, 0.0) and not _near(mu, -HALF_PI)


def delta_e1(base: ModelParams, sizes: Sequence[int], n: int = 2) -> List[Point]:
    """e1(lambda) - (E - E_ground) on the lowest single-pair state."""
    def one(size: int) -> float:
        p = base.with_size(size)
        gap, _, pattern = find_excitation(p, _single_pair(n))
        return e1_energy(p, n, pattern.pairs[0].lam) - gap
    return _sweep(sizes, one)


def _sliding_string(p: ModelParams, ground_mu: float) -> Tuple[float, float]:
    """(gap, mu) of the lowest sliding boundary string above the mu = ground_mu level."""
    gap, _, pattern = find_excitation(
        p,
        boundary_pattern(p, boundary_sliding),
        reference=boundary_pattern(p, boundary_at(ground_mu)),
    )
    return gap, pattern.boundary_mu


def delta_e2(base: ModelParams, sizes: Sequence[int], omega_max: Optional[int] = None) -> List[Point]:
    """e2(mu) - (E(mu) - E(0)) on the lowest sliding boundary string, phase I."""
    def one(size: int) -> float:
        p = base.with_size(size)
        gap, mu = _sliding_string(p, 0.0)
        return e2_energy(p, mu, omega_max) - gap
    return _sweep(sizes, one)


def delta_e3(base: ModelParams, sizes: Sequence[int], omega_max: Optional[int] = None) -> List[Point]:
    """e3(mu) - (E(mu) - E(-pi/2)) on the lowest sliding boundary string, phase II."""
    def one(size: int) -> float:
        p = base.with_size(size)
        gap, mu = _sliding_string(p, -HALF_PI)
        return e3_energy(p, mu, omega_max) - gap
    return _sweep(sizes, one)


def magnitudes(points: Sequence[Point]) -> Tuple[List[float], List[float]]:
    """(2N, |delta|) columns for fitting."""
    return [float(n) for n, _ in points], [abs(d) for _, d in points]


def monotone_decreasing(values: Sequence[float]) -> bool:
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) < 0))
