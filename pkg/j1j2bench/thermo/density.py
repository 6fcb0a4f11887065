"""
Zero-root densities in the thermodynamic limit.

Every density solves a convolution equation that is diagonal in Fourier space, so the
non-constant modes are ratios of kernel transforms; the constant mode is fixed by the
number of roots the density carries.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import DensityProfile, ModelParams
from j1j2bench.thermo.kernels import Kernel, KernelFamily, sigma_transform
from j1j2bench.thermo.series import omega_max_for

logger = logging.getLogger(__name__)


def _require_regime(p: ModelParams, regime_two: bool) -> None:
    if p.is_regime_two != regime_two:
        expected = "eta_plus_i_pi" if regime_two else "real_eta"
        raise ConfigError(f"this density requires the {expected} regime", {"regime": p.regime.value})


def _profile(
    label: str,
    omega_max: int,
    constant: float,
    nonzero: Callable[[np.ndarray], np.ndarray],
) -> DensityProfile:
    omega = np.arange(-omega_max, omega_max + 1)
    safe = np.where(omega == 0, 1, omega)
    coefficients = np.where(omega == 0, constant, nonzero(safe)).astype(complex)
    return DensityProfile(label=label, omega=omega, coefficients=coefficients)


def ground_density_I(p: ModelParams, omega_max: Optional[int] = None) -> DensityProfile:
    """rho~(omega) = e^{-eta|omega|} cos(2 omega b), rho~(0) = 1 - 1/2N."""
    _require_regime(p, regime_two=False)
    b1 = Kernel(family=KernelFamily.B, n=1, eta=p.eta)
    b2 = Kernel(family=KernelFamily.B, n=2, eta=p.eta)
    return _profile(
        "rho_ground_real_eta",
        omega_max_for(p.eta, omega_max),
        1 - 1 / p.two_n,
        lambda w: b2.transform(w) * sigma_transform(p.b, w) / b1.transform(w),
    )


def ground_density_I_closed_form(p: ModelParams, x: np.ndarray) -> np.ndarray:
    """Resummed real-space ground density."""
    q = math.exp(-p.eta)
    x = np.asarray(x, dtype=float)

    def poisson(arg: np.ndarray) -> np.ndarray:
        return (1 - q * np.cos(arg)) / (1 - 2 * q * np.cos(arg) + q * q)

    return (poisson(2 * x + 2 * p.b) + poisson(2 * x - 2 * p.b)) / math.pi - 1 / math.pi - 1 / (p.two_n * math.pi)


def excitation_density_I(p: ModelParams, n: int, lam: float, omega_max: Optional[int] = None) -> DensityProfile:
    """
    Density with one conjugate pair (n, lambda) removed from the imaginary line.

    For n = 2 the e^{-(n-2)eta|omega|} part does not decay (a point hole at lambda) and
    is truncated at the same cutoff as the rest.
    """
    _require_regime(p, regime_two=False)
    if n < 2:
        raise ConfigError("n must be >= 2", {"n": n})
    two_n = p.two_n
    b1, b2 = (Kernel(family=KernelFamily.B, n=k, eta=p.eta) for k in (1, 2))
    b_plus = Kernel(family=KernelFamily.B, n=n + 1, eta=p.eta)
    b_minus = Kernel(family=KernelFamily.B, n=n - 1, eta=p.eta)

    def nonzero(w: np.ndarray) -> np.ndarray:
        source = two_n * b2.transform(w) * sigma_transform(p.b, w)
        hole = np.exp(-2j * w * lam) * (b_plus.transform(w) + b_minus.transform(w))
        return (source - hole) / (two_n * b1.transform(w))

    return _profile(f"rho1_n{n}", omega_max_for(p.eta, omega_max), 1 - 3 / two_n, nonzero)


def _regime_two_density(
    p: ModelParams, label: str, positions: list, constant: float, omega_max: Optional[int]
) -> DensityProfile:
    _require_regime(p, regime_two=True)
    c1, c3 = (Kernel(family=KernelFamily.C, n=k, eta=p.eta_plus) for k in (1, 3))
    b2 = Kernel(family=KernelFamily.B, n=2, eta=p.eta_plus)

    def nonzero(w: np.ndarray) -> np.ndarray:
        strings = sum(np.exp(-2j * w * mu) for mu in positions) * c1.transform(w) / p.two_n
        return -(strings + b2.transform(w) * sigma_transform(p.b, w)) / (c1.transform(w) + c3.transform(w))

    return _profile(label, omega_max_for(p.eta_plus, omega_max), constant, nonzero)


def ground_density_II(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> DensityProfile:
    """Pair-center density with the boundary string at i*mu; rho~(0) = 1/2 - 1/2N."""
    return _regime_two_density(p, "rho2", [mu], 0.5 - 1 / p.two_n, omega_max)


def excitation_density_II(
    p: ModelParams, mu: float, mu1: float, mu2: float, omega_max: Optional[int] = None
) -> DensityProfile:
    """Density with one pair broken into imaginary roots i*mu1, i*mu2; rho~(0) = 1/2 - 1/N."""
    return _regime_two_density(p, "rho3", [mu, mu1, mu2], 0.5 - 1 / p.n_half, omega_max)


def normalization(profile: DensityProfile) -> float:
    """Integral of the density over the strip."""
    return profile.constant_mode
