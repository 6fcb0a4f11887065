"""
Ground state and conjugate-pair excitation for real eta.
"""

import cmath
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import Branch, EnergyMomentum, ExcitationQuery, ModelParams
from j1j2bench.thermo.series import check_tail, modes, omega_max_for, plain_sum
from j1j2bench.transfer.roots import reduce_angle

logger = logging.getLogger(__name__)


def _require_real_eta(p: ModelParams) -> None:
    if p.is_regime_two:
        raise ConfigError("requires the real_eta regime", {"regime": p.regime.value})


def ground_energy_I(p: ModelParams) -> float:
    """E1g = -2N cosh(eta) - N cosh(eta) sin^2(2b)/sinh^2(eta) + (cosh 2eta - cos 4b)/sinh(eta)."""
    _require_real_eta(p)
    eta, b, n = p.eta, p.b, p.n_half
    return (
        -2 * n * math.cosh(eta)
        - n * math.cosh(eta) * math.sin(2 * b) ** 2 / math.sinh(eta) ** 2
        + (math.cosh(2 * eta) - math.cos(4 * b)) / math.sinh(eta)
    )


def e1_energy(p: ModelParams, n: int, lam: float) -> float:
    """Excitation energy of one conjugate pair at +-n*eta/2 + i*lambda."""
    _require_real_eta(p)
    eta, b = p.eta, p.b
    s = math.sinh((n - 1) * eta)
    c = math.cosh((n - 1) * eta)
    prefactor = (math.cosh(2 * eta) - math.cos(4 * b)) / math.sinh(eta)
    return prefactor * (s / (c - math.cos(2 * lam + 2 * b)) + s / (c - math.cos(2 * lam - 2 * b)))


def e1_limit(p: ModelParams) -> float:
    """n -> infinity limit of e1."""
    return 2 * (math.cosh(2 * p.eta) - math.cos(4 * p.b)) / math.sinh(p.eta)


def k1_momentum(p: ModelParams, n: int, lam: float, omega_max: Optional[int] = None) -> float:
    """
    Momentum of the pair excitation, principal branch, reduced to [-pi, pi).
    """
    _require_real_eta(p)
    eta, b = p.eta, p.b
    rate = (n - 1) * eta
    w_max = omega_max_for(rate, omega_max)
    check_tail(4.0, rate, w_max, "k1")
    w = modes(w_max)
    series = 4 * plain_sum(
        np.sin(2 * w * lam) / w * np.cos(2 * w * b) * np.exp(-n * eta * w) * np.cosh(eta * w)
    )
    lo = 1j * (n - 1) * eta / 2
    hi = 1j * (n + 1) * eta / 2
    first = cmath.log(
        (cmath.sin(b + lam + lo) * cmath.sin(b + lam - hi))
        / (cmath.sin(b - lam + lo) * cmath.sin(b - lam - hi))
    )
    second = cmath.log(
        (cmath.sin(b + lam - lo) * cmath.sin(b + lam + hi))
        / (cmath.sin(b - lam - lo) * cmath.sin(b - lam + hi))
    )
    k = series + 0.5j * (first - second)
    return reduce_angle(float(k.real))


def excitation_I(q: ExcitationQuery, p: ModelParams, omega_max: Optional[int] = None) -> EnergyMomentum:
    """Energy and momentum of the E1 branch."""
    if q.branch != Branch.E1:
        raise ConfigError("excitation_I handles the e1 branch", {"branch": q.branch.value})
    q.check_regime(p)
    return EnergyMomentum(
        energy=e1_energy(p, q.n, q.lam),
        momentum=k1_momentum(p, q.n, q.lam, omega_max),
    )


def e1_dispersion(
    p: ModelParams, n: int, lams: Sequence[float], omega_max: Optional[int] = None
) -> Tuple[List[float], List[float], List[bool]]:
    """
    (k1, e1) along a lambda grid.

    Returns:
        (momenta, energies, jump flags); a flag marks a point whose momentum differs
        from the previous one by more than pi (a 2*pi branch jump)
    """
    momenta = [k1_momentum(p, n, lam, omega_max) for lam in lams]
    energies = [e1_energy(p, n, lam) for lam in lams]
    jumps = [False] + [abs(b - a) > math.pi for a, b in zip(momenta, momenta[1:])]
    if any(jumps):
        logger.warning(f"k1 branch jumps at {sum(jumps)} grid points")
    return momenta, energies, jumps
