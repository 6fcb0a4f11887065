"""
Root-pattern classification and seeding.
"""

import logging
import math
from typing import List

import numpy as np

from j1j2bench.models.schemas import (
    ConjugatePairSeed,
    DensityProfile,
    ModelParams,
    PatternSeed,
    RootKind,
    ZeroRootSet,
)
from j1j2bench.thermo.density import ground_density_I, ground_density_II
from j1j2bench.transfer.roots import strip_distance

logger = logging.getLogger(__name__)


def classify(zrs: ZeroRootSet, p: ModelParams) -> PatternSeed:
    """
    Composition of a tagged root set with fitted pattern parameters.

    Imaginary roots keep x = Im z, a conjugate pair becomes (n, lambda) with lambda the
    mean imaginary part, the boundary string keeps mu; anything else is unknown.
    """
    tags = zrs.tags
    roots = zrs.roots
    partner = {}
    for i, j in zrs.pairing:
        partner[i] = j
        partner[j] = i
    imaginary: List[float] = []
    pairs: List[ConjugatePairSeed] = []
    unknown: List[complex] = []
    boundary_mu = None
    seen = set()
    for idx, (z, tag) in enumerate(zip(roots, tags)):
        if idx in seen:
            continue
        seen.add(idx)
        if tag.kind == RootKind.IMAGINARY:
            imaginary.append(float(z.imag))
        elif tag.kind == RootKind.BOUNDARY_STRING:
            boundary_mu = float(z.imag)
        elif tag.kind == RootKind.CONJUGATE_PAIR and partner.get(idx, idx) != idx:
            j = partner[idx]
            if tags[j].kind == RootKind.CONJUGATE_PAIR and tags[j].n == tag.n:
                seen.add(j)
                pairs.append(ConjugatePairSeed(n=tag.n, lam=float((z.imag + roots[j].imag) / 2)))
            else:
                unknown.append(complex(z))
        else:
            unknown.append(complex(z))
    if unknown:
        logger.warning(f"{len(unknown)} roots could not be classified")
    return PatternSeed(imaginary=imaginary, pairs=pairs, boundary_mu=boundary_mu, unknown=unknown)


def _has_collision(positions: np.ndarray, tol: float = 1e-3) -> bool:
    return any(
        strip_distance(positions[i], positions[j]) < tol
        for i in range(len(positions))
        for j in range(i + 1, len(positions))
    )


def seed_from_roots(zrs: ZeroRootSet, p: ModelParams) -> PatternSeed:
    """
    Idealized seed of an extracted root set: pairs snapped to +-n*eta/2 and positions
    rounded to two decimals (kept as found when rounding makes two roots meet).
    """
    pattern = classify(zrs, p)
    rounded = PatternSeed(
        imaginary=[round(x, 2) for x in pattern.imaginary],
        pairs=[ConjugatePairSeed(n=s.n, lam=round(s.lam, 2)) for s in pattern.pairs],
        boundary_mu=None if pattern.boundary_mu is None else round(pattern.boundary_mu, 2),
        unknown=pattern.unknown,
    )
    if _has_collision(rounded.positions(p)):
        return pattern
    return rounded


def density_quantiles(
    density: DensityProfile, count: int, points: int = 4001, origin: float = -math.pi / 2
) -> List[float]:
    """
    Positions splitting a root density on one period [origin, origin + pi) into
    equal-weight cells, reported in the canonical strip [-pi/2, pi/2) and sorted.
    """
    grid = np.linspace(origin, origin + math.pi, points)
    values = np.clip(density.evaluate(grid), 0.0, None)
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(grid))])
    cumulative /= cumulative[-1]
    targets = (np.arange(count) + 0.5) / count
    positions = (np.interp(targets, cumulative, grid) + math.pi / 2) % math.pi - math.pi / 2
    return sorted(float(x) for x in positions)


def ground_seed(p: ModelParams) -> PatternSeed:
    """
    Ground-state pattern: 2N-1 imaginary roots at the quantiles of the
    thermodynamic ground density (real_eta), or N-1 pairs at +-eta_plus with the
    boundary string at mu = 0 (b <= pi/4) or -pi/2 (eta_plus_i_pi).

    Pair centres are quantiles of the pair density on the period starting at the
    boundary string, so they crowd towards mu + pi/2 where the density peaks.
    """
    if not p.is_regime_two:
        xs = density_quantiles(ground_density_I(p), p.two_n - 1)
        xs[len(xs) // 2] = 0.0
        return PatternSeed(imaginary=xs)
    mu = 0.0 if p.b <= math.pi / 4 else -math.pi / 2
    lams = density_quantiles(ground_density_II(p, mu), p.n_half - 1, origin=mu)
    return PatternSeed(pairs=[ConjugatePairSeed(n=2, lam=lam) for lam in lams], boundary_mu=mu)
