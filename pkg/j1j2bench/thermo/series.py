"""
Truncated Fourier-mode series with tail control.
"""

import logging
import math
from typing import Optional

import numpy as np

from j1j2bench.config import settings
from j1j2bench.errors import SeriesConvergenceError

logger = logging.getLogger(__name__)


def omega_max_for(decay_rate: float, override: Optional[int] = None) -> int:
    """Cutoff for terms decaying as exp(-rate * omega); an explicit override wins."""
    if override is not None:
        return int(override)
    if decay_rate <= 0:
        raise SeriesConvergenceError("series does not decay", {"rate": decay_rate})
    return settings.omega_cutoff(decay_rate)


def tail_bound(amplitude: float, decay_rate: float, omega_max: int) -> float:
    """Bound on sum_{omega > omega_max} amplitude * exp(-rate * omega)."""
    return abs(amplitude) * math.exp(-decay_rate * (omega_max + 1)) / (1 - math.exp(-decay_rate))


def check_tail(amplitude: float, decay_rate: float, omega_max: int, label: str) -> float:
    """
    Raises:
        SeriesConvergenceError: if the neglected tail may exceed tail_tolerance
    """
    bound = tail_bound(amplitude, decay_rate, omega_max)
    if bound > settings.tail_tolerance:
        raise SeriesConvergenceError(
            f"{label}: tail bound {bound:.2e} at omega_max={omega_max}",
            {"series": label, "omega_max": omega_max, "tail_bound": bound},
        )
    return bound


def modes(omega_max: int) -> np.ndarray:
    """omega = 1..omega_max."""
    return np.arange(1, omega_max + 1, dtype=float)


def plain_sum(terms: np.ndarray) -> float:
    return math.fsum(np.asarray(terms, dtype=float))


def alternating_sum(terms: np.ndarray) -> float:
    """Sum of a sign-alternating series, consecutive terms combined pairwise first."""
    terms = np.asarray(terms, dtype=float)
    if len(terms) % 2:
        terms = np.append(terms, 0.0)
    return math.fsum(terms[0::2] + terms[1::2])


def signs(omega: np.ndarray) -> np.ndarray:
    """(-1)^omega."""
    return np.where(omega.astype(int) % 2 == 0, 1.0, -1.0)
