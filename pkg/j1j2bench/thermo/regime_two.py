"""
Regime eta = eta_plus + i*pi: ground energy as a function of the boundary string,
both excitation branches and their momenta.

C = cosh(2 eta_plus) - cos(4b) is the common prefactor of all expressions.
"""

import cmath
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from j1j2bench.errors import ConfigError
from j1j2bench.models.schemas import Branch, EnergyMomentum, ExcitationQuery, GroundStateII, ModelParams
from j1j2bench.thermo.series import alternating_sum, check_tail, modes, omega_max_for, plain_sum, signs
from j1j2bench.transfer.roots import reduce_angle

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2


def _require_regime_two(p: ModelParams) -> None:
    if not p.is_regime_two:
        raise ConfigError("requires the eta_plus_i_pi regime", {"regime": p.regime.value})


def _c(p: ModelParams) -> float:
    return math.cosh(2 * p.eta_plus) - math.cos(4 * p.b)


def _bracket(p: ModelParams, mu: float) -> float:
    ch = math.cosh(p.eta_plus)
    return 0.5 * _c(p) * (1 / (ch + math.cos(2 * (mu + p.b))) + 1 / (ch + math.cos(2 * (mu - p.b))))


def _cutoff(p: ModelParams, omega_max: Optional[int]) -> int:
    return omega_max_for(p.eta_plus, omega_max)


def _boundary_series(p: ModelParams, mu: float, w_max: int) -> float:
    """2C/sinh(eta+) sum (-1)^w e^{-eta+ w} cos(2 mu w) cos(2 b w) tanh(eta+ w)."""
    eta, b = p.eta_plus, p.b
    amplitude = 2 * _c(p) / math.sinh(eta)
    check_tail(amplitude, eta, w_max, "boundary string series")
    w = modes(w_max)
    terms = signs(w) * np.exp(-eta * w) * np.cos(2 * mu * w) * np.cos(2 * b * w) * np.tanh(eta * w)
    return amplitude * alternating_sum(terms)


def _bulk_terms(p: ModelParams, w_max: int) -> float:
    eta, b, n = p.eta_plus, p.b, p.n_half
    amplitude = 4 * n * _c(p) / math.sinh(eta)
    check_tail(amplitude, 2 * eta, w_max, "bulk series")
    w = modes(w_max)
    bulk = -amplitude * plain_sum(np.exp(-2 * eta * w) * np.cos(2 * b * w) ** 2 * np.tanh(eta * w))
    constant = n * math.cosh(eta) * (math.cos(2 * b) ** 2 - math.cosh(2 * eta)) / math.sinh(eta) ** 2
    return bulk + constant


def energy_mu(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """Ground-branch energy E(mu) with the boundary string at i*mu."""
    _require_regime_two(p)
    w_max = _cutoff(p, omega_max)
    return _bulk_terms(p, w_max) + _boundary_series(p, mu, w_max) + _bracket(p, mu)


def epsilon(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """mu-dependent part of E(mu); one imaginary root at i*mu costs epsilon(mu)."""
    _require_regime_two(p)
    return _boundary_series(p, mu, _cutoff(p, omega_max)) + _bracket(p, mu)


def large_eta_epsilon(p: ModelParams, mu: float) -> float:
    """Leading large-eta_plus form C/cosh(eta+) [1 - 4 e^{-eta+} cos 2b cos 2mu]."""
    _require_regime_two(p)
    eta = p.eta_plus
    return _c(p) / math.cosh(eta) * (1 - 4 * math.exp(-eta) * math.cos(2 * p.b) * math.cos(2 * mu))


def e2g(p: ModelParams, omega_max: Optional[int] = None) -> float:
    """Phase-I ground energy E(0)."""
    return energy_mu(p, 0.0, omega_max)


def e3g(p: ModelParams, omega_max: Optional[int] = None) -> float:
    """Phase-II ground energy E(-pi/2)."""
    return energy_mu(p, -HALF_PI, omega_max)


def ground_energy_II(p: ModelParams, omega_max: Optional[int] = None) -> GroundStateII:
    """Both ground candidates and the one selected by the minimum of E(mu)."""
    first, second = e2g(p, omega_max), e3g(p, omega_max)
    if abs(first - second) <= 1e-12 * max(1.0, abs(first)):
        phase, energy, mu = "tied", first, None
    elif first < second:
        phase, energy, mu = "I", first, 0.0
    else:
        phase, energy, mu = "II", second, -HALF_PI
    return GroundStateII(e2g=first, e3g=second, phase=phase, energy=energy, mu=mu)


def mu_argmin(p: ModelParams, mu_grid: Sequence[float], omega_max: Optional[int] = None) -> float:
    """Grid point minimizing E(mu)."""
    values = [energy_mu(p, mu, omega_max) for mu in mu_grid]
    return float(mu_grid[int(np.argmin(values))])


def e2_energy(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """Boundary-string excitation above the mu = 0 ground state."""
    _require_regime_two(p)
    eta, b = p.eta_plus, p.b
    w_max = _cutoff(p, omega_max)
    amplitude = 4 * _c(p) / math.sinh(eta)
    check_tail(amplitude, eta, w_max, "e2 series")
    w = modes(w_max)
    terms = signs(w) * np.exp(-eta * w) * (np.cos(2 * mu * w) - 1) * np.cos(2 * b * w) * np.tanh(eta * w)
    ch = math.cosh(eta)
    bracket = 0.5 * _c(p) * (
        1 / (ch + math.cos(2 * (mu + b))) + 1 / (ch + math.cos(2 * (mu - b))) - 2 / (ch + math.cos(2 * b))
    )
    return 2 * _c(p) / math.sinh(eta) * alternating_sum(terms) + bracket


def e3_energy(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """Boundary-string excitation above the mu = -pi/2 ground state."""
    _require_regime_two(p)
    eta, b = p.eta_plus, p.b
    w_max = _cutoff(p, omega_max)
    amplitude = 4 * _c(p) / math.sinh(eta)
    check_tail(amplitude, eta, w_max, "e3 series")
    w = modes(w_max)
    common = np.exp(-eta * w) * np.cos(2 * b * w) * np.tanh(eta * w)
    series = alternating_sum(signs(w) * np.cos(2 * mu * w) * common) - plain_sum(common)
    ch = math.cosh(eta)
    bracket = 0.5 * _c(p) * (
        1 / (ch + math.cos(2 * (mu + b))) + 1 / (ch + math.cos(2 * (mu - b))) - 2 / (ch - math.cos(2 * b))
    )
    return 2 * _c(p) / math.sinh(eta) * series + bracket


def k2_momentum(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """Momentum of the boundary-string excitation, reduced to [-pi, pi)."""
    _require_regime_two(p)
    eta, b = p.eta_plus, p.b
    w_max = _cutoff(p, omega_max)
    check_tail(2.0, eta, w_max, "k2 series")
    w = modes(w_max)
    series = 2 * plain_sum(np.sin(2 * w * mu) / w * np.cos(2 * w * b) * np.exp(-eta * w) * np.tanh(eta * w))
    half = 0.5j * eta
    first = cmath.log(cmath.cos(b + mu - half) / cmath.cos(b - mu - half))
    second = cmath.log(cmath.cos(b + mu + half) / cmath.cos(b - mu + half))
    k = series + 0.5j * (first - second)
    return reduce_angle(float(k.real))


def k3_momentum(p: ModelParams, mu: float, omega_max: Optional[int] = None) -> float:
    """k3 = k2 + pi mod 2pi."""
    return reduce_angle(k2_momentum(p, mu, omega_max) + math.pi)


def e4_energy(p: ModelParams, mu1: float, mu2: float, omega_max: Optional[int] = None) -> float:
    """Two imaginary roots replacing one pair: epsilon(mu1) + epsilon(mu2)."""
    return epsilon(p, mu1, omega_max) + epsilon(p, mu2, omega_max)


def k4_momentum(p: ModelParams, mu1: float, mu2: float, omega_max: Optional[int] = None) -> float:
    return reduce_angle(k2_momentum(p, mu1, omega_max) + k2_momentum(p, mu2, omega_max))


def excitation_II_first(q: ExcitationQuery, p: ModelParams, omega_max: Optional[int] = None) -> EnergyMomentum:
    """E2 (phase I) or E3 (phase II) boundary-string excitation."""
    if q.branch not in (Branch.E2, Branch.E3):
        raise ConfigError("excitation_II_first handles the e2 and e3 branches", {"branch": q.branch.value})
    q.check_regime(p)
    if q.branch == Branch.E2:
        return EnergyMomentum(energy=e2_energy(p, q.mu, omega_max), momentum=k2_momentum(p, q.mu, omega_max))
    return EnergyMomentum(energy=e3_energy(p, q.mu, omega_max), momentum=k3_momentum(p, q.mu, omega_max))


def excitation_II_second(q: ExcitationQuery, p: ModelParams, omega_max: Optional[int] = None) -> EnergyMomentum:
    """E4 two-parameter (spinon) excitation."""
    if q.branch != Branch.E4:
        raise ConfigError("excitation_II_second handles the e4 branch", {"branch": q.branch.value})
    q.check_regime(p)
    return EnergyMomentum(
        energy=e4_energy(p, q.mu1, q.mu2, omega_max),
        momentum=k4_momentum(p, q.mu1, q.mu2, omega_max),
    )


def mu_grid(points: int) -> np.ndarray:
    """Uniform grid of [-pi/2, pi/2); contains -pi/2, and 0 when the point count is even."""
    return -HALF_PI + math.pi * np.arange(points) / points


def first_dispersion(
    p: ModelParams, branch: Branch, mus: Sequence[float], omega_max: Optional[int] = None
) -> Tuple[List[float], List[float]]:
    """(k, e) along a mu grid for the E2 or E3 branch."""
    if branch == Branch.E2:
        return (
            [k2_momentum(p, mu, omega_max) for mu in mus],
            [e2_energy(p, mu, omega_max) for mu in mus],
        )
    if branch == Branch.E3:
        return (
            [k3_momentum(p, mu, omega_max) for mu in mus],
            [e3_energy(p, mu, omega_max) for mu in mus],
        )
    raise ConfigError("first_dispersion handles the e2 and e3 branches", {"branch": branch.value})


def e4_grid(p: ModelParams, points: int, omega_max: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """e4 and k4 on a points x points (mu1, mu2) grid."""
    mus = mu_grid(points)
    eps = np.array([epsilon(p, mu, omega_max) for mu in mus])
    ks = np.array([k2_momentum(p, mu, omega_max) for mu in mus])
    energies = eps[:, np.newaxis] + eps[np.newaxis, :]
    momenta = np.vectorize(reduce_angle)(ks[:, np.newaxis] + ks[np.newaxis, :])
    return energies, momenta
