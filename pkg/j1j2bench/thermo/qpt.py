"""
First-order transition scan in the eta_plus_i_pi regime.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from j1j2bench.config import settings
from j1j2bench.errors import ConfigError, GridResolutionError
from j1j2bench.models.schemas import ModelParams, QptReport
from j1j2bench.thermo.regime_two import e2g, e3g

logger = logging.getLogger(__name__)


def b_grid(step: Optional[float] = None) -> np.ndarray:
    """b = step, 2*step, ... strictly inside (0, pi/2)."""
    step = step or settings.qpt_step
    return np.arange(1, int(math.ceil((math.pi / 2) / step))) * step


def _branch_slope(branch: Callable[[float], float], b: float, h: float) -> float:
    """Richardson-combined central difference of one analytic branch."""

    def central(step: float) -> float:
        return (branch(b + step) - branch(b - step)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def qpt_scan(
    p: ModelParams,
    grid: Optional[Sequence[float]] = None,
    omega_max: Optional[int] = None,
) -> QptReport:
    """
    Per-site ground energy min(E2g, E3g)/2N over a b grid, its derivative and the
    transition point.

    The crossing is located by root bracketing of E2g - E3g between the grid points
    where the difference changes sign. The reported jump is the difference of the
    one-sided slopes of the two branches at the crossing; the noise is the largest
    second difference of the grid derivative away from the crossing.

    Raises:
        GridResolutionError: if the grid does not bracket the crossing
    """
    if not p.is_regime_two:
        raise ConfigError("qpt_scan requires the eta_plus_i_pi regime", {"regime": p.regime.value})
    bs = np.asarray(b_grid() if grid is None else grid, dtype=float)
    if len(bs) < 5:
        raise GridResolutionError("QPT grid needs at least five points", {"points": len(bs)})
    sites = p.two_n

    def branches(b: float) -> Tuple[float, float]:
        q = p.with_b(b)
        return e2g(q, omega_max), e3g(q, omega_max)

    def gap(b: float) -> float:
        left, right = branches(b)
        return left - right

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        values = list(pool.map(branches, bs))
    first = np.array([v[0] for v in values])
    second = np.array([v[1] for v in values])
    energy = np.minimum(first, second) / sites
    derivative = np.gradient(energy, bs)

    difference = first - second
    changes = np.flatnonzero(np.sign(difference[:-1]) * np.sign(difference[1:]) < 0)
    exact = np.flatnonzero(difference == 0)
    if exact.size:
        critical = float(bs[exact[0]])
    elif changes.size:
        i = int(changes[0])
        critical = optimize.brentq(gap, bs[i], bs[i + 1], xtol=1e-14)
    else:
        raise GridResolutionError(
            "grid does not bracket the E2g/E3g crossing",
            {"b_min": float(bs[0]), "b_max": float(bs[-1])},
        )

    h = float(np.min(np.diff(bs)))
    left_value, right_value = branches(critical)
    slope_left = _branch_slope(lambda b: branches(b)[0] / sites, critical, h)
    slope_right = _branch_slope(lambda b: branches(b)[1] / sites, critical, h)

    second_diff = np.abs(np.diff(derivative, n=2))
    centers = bs[1:-1]
    away = np.abs(centers - critical) > 2.5 * h
    noise = float(np.max(second_diff[away])) if np.any(away) else 0.0

    report = QptReport(
        eta_plus=p.eta_plus,
        two_n=p.two_n,
        b_grid=bs.tolist(),
        energy=energy.tolist(),
        derivative=derivative.tolist(),
        critical_b=float(critical),
        continuity_gap=abs(left_value - right_value) / sites,
        slope_left=slope_left,
        slope_right=slope_right,
        jump=abs(slope_right - slope_left),
        noise=noise,
    )
    logger.info(
        f"QPT scan: critical b={report.critical_b:.6f}, jump={report.jump:.3e}, noise={report.noise:.3e}"
    )
    return report
