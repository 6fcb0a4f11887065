"""
Homogeneous Bethe ansatz equations for (Lambda0^2, z_1..z_{2N-1}).

For every inhomogeneity theta_l:

    Lambda0^2 prod_j sinh(theta_l - z_j + eta/2) sinh(theta_l - z_j - eta/2)
      + sinh(eta)^(-4N) prod_j sinh(theta_l - theta_j + eta) sinh(theta_l - theta_j - eta) = 0

Each equation is evaluated as exp(S1 - m) + exp(S2 - m), with S1, S2 the summed
log-sinh terms and m the larger real part, so sizes beyond 2N ~ 10 do not overflow.
The unknown vector is [log Lambda0^2, z_1, ..., z_{2N-1}].
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from j1j2bench.errors import ResidualOverflowError
from j1j2bench.models.schemas import ModelParams

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)

Evaluation = Tuple[np.ndarray, np.ndarray, np.ndarray]


def log_sinh(x: np.ndarray) -> np.ndarray:
    """log sinh(x) without overflow; the branch is irrelevant once exponentiated."""
    x = np.asarray(x, dtype=complex)
    positive = x.real >= 0
    s = np.where(positive, x, -x)
    out = s + np.log1p(-np.exp(-2 * s)) - LOG2
    return np.where(positive, out, out + 1j * math.pi)


def coth(x: np.ndarray) -> np.ndarray:
    return np.cosh(x) / np.sinh(x)


class BaeSystem:
    """Residual and Jacobian of the BAEs at given inhomogeneities."""

    def __init__(self, p: ModelParams, theta: np.ndarray):
        self.p = p
        self.theta = np.asarray(theta, dtype=complex)
        if len(self.theta) != p.two_n:
            raise ValueError(f"theta has {len(self.theta)} entries, expected {p.two_n}")
        eta = p.eta_c
        diff = self.theta[:, np.newaxis] - self.theta[np.newaxis, :]
        # S2 does not depend on the unknowns
        self.s2 = (
            -2 * p.two_n * np.log(complex(p.sinh_eta))
            + np.sum(log_sinh(diff + eta) + log_sinh(diff - eta), axis=1)
        )

    @property
    def size(self) -> int:
        """Number of equations, equal to the number of unknowns."""
        return self.p.two_n

    def s1(self, x: np.ndarray) -> np.ndarray:
        z = x[1:]
        half = self.p.eta_c / 2
        arg = self.theta[:, np.newaxis] - z[np.newaxis, :]
        return x[0] + np.sum(log_sinh(arg + half) + log_sinh(arg - half), axis=1)

    def offsets(self, x: np.ndarray) -> np.ndarray:
        """Per-equation exponent offset m_l = max(Re S1, Re S2)."""
        m = np.maximum(self.s1(x).real, self.s2.real)
        bad = np.flatnonzero(~np.isfinite(m))
        if bad.size:
            raise ResidualOverflowError(
                f"BAE residual not representable for equation {int(bad[0]) + 1}",
                {"equation": int(bad[0]) + 1},
            )
        return m

    def evaluate(self, x: np.ndarray, offsets: Optional[np.ndarray] = None) -> Evaluation:
        """
        Scaled residual, Jacobian and the offsets used.

        Args:
            x: [log Lambda0^2, z_1..z_{2N-1}]
            offsets: Exponent offsets to reuse (default: computed at x)

        Returns:
            (residual, jacobian, offsets)
        """
        x = np.asarray(x, dtype=complex)
        m = self.offsets(x) if offsets is None else offsets
        s1 = self.s1(x)
        first = np.exp(s1 - m)
        residual = first + np.exp(self.s2 - m)

        half = self.p.eta_c / 2
        arg = self.theta[:, np.newaxis] - x[np.newaxis, 1:]
        jac = np.empty((self.size, self.size), dtype=complex)
        jac[:, 0] = first
        jac[:, 1:] = first[:, np.newaxis] * (-coth(arg + half) - coth(arg - half))
        return residual, jac, m

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x)[0]

    def direct_residual(self, x: np.ndarray) -> np.ndarray:
        """Unstabilized product form (small chains only)."""
        x = np.asarray(x, dtype=complex)
        eta = self.p.eta_c
        z = x[1:]
        arg = self.theta[:, np.newaxis] - z[np.newaxis, :]
        diff = self.theta[:, np.newaxis] - self.theta[np.newaxis, :]
        p_term = np.exp(x[0]) * np.prod(np.sinh(arg + eta / 2) * np.sinh(arg - eta / 2), axis=1)
        q_term = self.p.sinh_eta ** (-2 * self.p.two_n) * np.prod(
            np.sinh(diff + eta) * np.sinh(diff - eta), axis=1
        )
        return p_term + q_term

    def initial_log_lambda0_sq(self, z: np.ndarray) -> complex:
        """log of mean(-Q_l / P_l) for fixed roots, averaged without overflow."""
        x = np.concatenate([[0.0], np.asarray(z, dtype=complex)])
        ratios = self.s2 - self.s1(x) + 1j * math.pi
        ref = float(np.max(ratios.real))
        return complex(ref + np.log(np.mean(np.exp(ratios - ref))))


# ========================
# Staggered limit
# ========================

def _shifted_cosh_series(d: complex, constant: complex, order: int) -> np.ndarray:
    """Taylor coefficients in t of [cosh(2(t + d)) - constant] / 2."""
    k = np.arange(order)
    factor = np.array([2.0 ** i / math.factorial(i) for i in k])
    coeffs = factor * np.where(k % 2 == 0, np.cosh(2 * d), np.sinh(2 * d))
    coeffs = coeffs.astype(complex)
    coeffs[0] -= constant
    return coeffs / 2


def _shifted_sinh_series(d: complex, order: int) -> np.ndarray:
    """Taylor coefficients in t of -sinh(2(t + d))."""
    k = np.arange(order)
    factor = np.array([2.0 ** i / math.factorial(i) for i in k])
    return -(factor * np.where(k % 2 == 0, np.sinh(2 * d), np.cosh(2 * d))).astype(complex)


def _series_product(factors: list, order: int) -> np.ndarray:
    out = np.zeros(order, dtype=complex)
    out[0] = 1.0
    for f in factors:
        out = np.polynomial.polynomial.polymul(out, f)[:order]
    return out


class ConfluentSystem:
    """
    BAEs at theta_j = (-1)^j a exactly.

    With N inhomogeneities at each of +-a the equations collapse; the solution is
    fixed instead by F(u) = Lambda0^2 P(u) + Q(u) vanishing to order N at u = +-a,
    where P(u) = prod_j sinh(u - z_j + eta/2) sinh(u - z_j - eta/2) and Q(u) is the
    theta-only product. The first N Taylor coefficients at each point give 2N equations.
    """

    def __init__(self, p: ModelParams):
        self.p = p
        self.order = p.n_half
        self.centers = [p.a, -p.a]
        theta = p.staggered_theta
        cosh_two_eta = complex(p.cosh_two_eta)
        norm = complex(p.sinh_eta) ** (-2 * p.two_n)
        self.q_series = []
        self.scales = []
        for u0 in self.centers:
            q = norm * _series_product(
                [_shifted_cosh_series(u0 - t, cosh_two_eta, self.order) for t in theta], self.order
            )
            self.q_series.append(q)
            self.scales.append(max(float(np.max(np.abs(q))), 1e-300))

    @property
    def size(self) -> int:
        return self.p.two_n

    def evaluate(self, x: np.ndarray, offsets: Optional[np.ndarray] = None) -> Evaluation:
        """Scaled Taylor-coefficient residual and its Jacobian."""
        x = np.asarray(x, dtype=complex)
        lam_sq = np.exp(x[0])
        z = x[1:]
        cosh_eta = complex(self.p.cosh_eta)
        residual = np.empty(self.size, dtype=complex)
        jac = np.empty((self.size, self.size), dtype=complex)
        for block, u0 in enumerate(self.centers):
            rows = slice(block * self.order, (block + 1) * self.order)
            f = [_shifted_cosh_series(u0 - zj, cosh_eta, self.order) for zj in z]
            p_series = _series_product(f, self.order)
            scale = self.scales[block]
            residual[rows] = (lam_sq * p_series + self.q_series[block]) / scale
            jac[rows, 0] = lam_sq * p_series / scale
            for j, zj in enumerate(z):
                others = f[:j] + f[j + 1:]
                dp = _series_product(others + [_shifted_sinh_series(u0 - zj, self.order)], self.order)
                jac[rows, j + 1] = lam_sq * dp / scale
        return residual, jac, np.zeros(self.size)

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.evaluate(x)[0]
