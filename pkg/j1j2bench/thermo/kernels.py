"""
Integral kernels of the density equations and their Fourier transforms.

Fourier convention on [-pi/2, pi/2):
    f(x) = (1/pi) sum_omega f~(omega) e^{2i omega x},  f~(omega) = int f(x) e^{-2i omega x} dx
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate


class KernelFamily(str, Enum):
    BETA = "beta"
    B = "b"
    GAMMA = "gamma"
    C = "c"


class Kernel(BaseModel):
    """
    b_n(x) = 2 sin 2x / (cosh n*eta - cos 2x), beta_n its antiderivative;
    c_n(x) = 2 sin 2x / (cos 2x + cosh n*eta), gamma_n with gamma_n' = -c_n.
    """

    model_config = ConfigDict(frozen=True)

    family: KernelFamily
    n: int = Field(..., ge=1)
    eta: float = Field(..., gt=0, description="Decay scale (eta, or eta_plus in the i*pi regime)")

    @property
    def decay_rate(self) -> float:
        return self.n * self.eta

    def transform(self, omega: np.ndarray) -> np.ndarray:
        """Fourier coefficients at integer modes."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        sign = np.sign(omega)
        decay = np.exp(-self.decay_rate * np.abs(omega))
        parity = np.where(omega.astype(int) % 2 == 0, 1.0, -1.0)
        if self.family == KernelFamily.B:
            return -2j * math.pi * sign * decay
        if self.family == KernelFamily.C:
            return 2j * math.pi * parity * sign * decay
        # log kernels: derivative transform divided by 2i*omega, mean value at omega = 0
        base = KernelFamily.B if self.family == KernelFamily.BETA else KernelFamily.C
        derivative = Kernel(family=base, n=self.n, eta=self.eta).transform(omega)
        if self.family == KernelFamily.GAMMA:
            derivative = -derivative
        safe = np.where(omega == 0, 1.0, omega)
        out = derivative / (2j * safe)
        mean = math.pi * (self.decay_rate - math.log(4.0))
        return np.where(omega == 0, mean, out)

    def real_space(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ch = math.cosh(self.decay_rate)
        if self.family == KernelFamily.B:
            return 2 * np.sin(2 * x) / (ch - np.cos(2 * x))
        if self.family == KernelFamily.C:
            return 2 * np.sin(2 * x) / (np.cos(2 * x) + ch)
        if self.family == KernelFamily.BETA:
            return np.log((ch - np.cos(2 * x)) / 2)
        return np.log((np.cos(2 * x) + ch) / 2)

    def transform_numeric(self, omega: int) -> complex:
        """Quadrature of the real-space kernel (reference for the closed forms)."""
        lo, hi = -math.pi / 2, math.pi / 2
        re = integrate.quad(lambda x: float(self.real_space(x)) * math.cos(2 * omega * x), lo, hi, limit=200)[0]
        im = integrate.quad(lambda x: -float(self.real_space(x)) * math.sin(2 * omega * x), lo, hi, limit=200)[0]
        return complex(re, im)


def sigma_transform(b: float, omega: np.ndarray) -> np.ndarray:
    """Inhomogeneity density (delta(x-b) + delta(x+b))/2 in Fourier space."""
    return np.cos(2 * np.asarray(omega, dtype=float) * b).astype(complex)
