"""
Finite-size scaling fits in log space.
"""

import logging
import math
from typing import Sequence

import numpy as np

from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import FitModel, ScalingFit

logger = logging.getLogger(__name__)


def scaling_fit(sizes: Sequence[float], deltas: Sequence[float], model: FitModel) -> ScalingFit:
    """
    Least-squares fit of log(delta) against x (exponential) or log(x) (power law).

    Raises:
        ConfigError: fewer than three points, or a non-positive delta
    """
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(deltas, dtype=float)
    if len(x) < 3 or len(x) != len(y):
        raise ConfigError("scaling_fit needs at least three (size, delta) points", {"points": len(x)})
    if np.any(y <= 0):
        raise ConfigError("scaling_fit needs positive deltas", {"deltas": y.tolist()})
    abscissa = x if model == FitModel.EXPONENTIAL else np.log(x)
    slope, intercept = np.polyfit(abscissa, np.log(y), 1)
    residual = float(np.linalg.norm(np.log(y) - (slope * abscissa + intercept)))
    fit = ScalingFit(
        model=model,
        amplitude=math.exp(intercept),
        rate=-float(slope),
        residual=residual,
        sizes=x.tolist(),
        deltas=y.tolist(),
    )
    if not fit.decaying:
        logger.warning(f"{model.value} fit is not decaying (rate {fit.rate:.4f})")
    return fit


def preferred_model(sizes: Sequence[float], deltas: Sequence[float]) -> ScalingFit:
    """The fit with the lower log-space residual."""
    fits = [scaling_fit(sizes, deltas, model) for model in FitModel]
    return min(fits, key=lambda f: f.residual)
