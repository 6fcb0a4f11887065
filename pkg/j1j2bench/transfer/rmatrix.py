"""
Six-vertex R-matrix on auxiliary (x) quantum space and its identity suite.
"""

import logging
from typing import Dict, List, Sequence

import numpy as np

from j1j2bench.core.pauli import IDENTITY2, SIGMA
from j1j2bench.errors import NumericalError
from j1j2bench.models.schemas import IdentityReport, ModelParams

logger = logging.getLogger(__name__)

PERMUTATION = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
IDENTITY4 = np.eye(4, dtype=complex)
ANTISYMMETRIZER = 0.5 * (IDENTITY4 - PERMUTATION)

IDENTITY_THRESHOLD = 1e-12


def six_vertex_r(u: complex, eta: complex) -> np.ndarray:
    """
    R(u) with diagonal weights sinh(u+eta)/sinh(eta), sinh(u)/sinh(eta) and unit
    off-diagonal weights.
    
    Raises:
        NumericalError: if sinh(eta) vanishes
    """
    s_eta = np.sinh(eta)
    if abs(s_eta) < 1e-14:
        raise NumericalError("R-matrix undefined at sinh(eta) = 0", {"eta": [eta.real, eta.imag]})
    w = np.sinh(u + eta) / s_eta
    v = np.sinh(u) / s_eta
    return np.array(
        [[w, 0, 0, 0], [0, v, 1, 0], [0, 1, v, 0], [0, 0, 0, w]], dtype=complex
    )


def r_matrix(u: complex, p: ModelParams) -> np.ndarray:
    """R-matrix of the model at spectral parameter u."""
    return six_vertex_r(complex(u), p.eta_c)


def partial_transpose_quantum(m: np.ndarray) -> np.ndarray:
    """Transpose in the second (quantum) factor of a two-site matrix."""
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def embed(m: np.ndarray, pair: str) -> np.ndarray:
    """Two-site matrix acting on spaces '12', '13' or '23' of a three-site space."""
    if pair == "12":
        return np.kron(m, IDENTITY2)
    if pair == "23":
        return np.kron(IDENTITY2, m)
    if pair == "13":
        swap23 = np.kron(IDENTITY2, PERMUTATION)
        return swap23 @ np.kron(m, IDENTITY2) @ swap23
    raise ValueError(f"Unknown pair: {pair}")


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def r_identity_residuals(p: ModelParams, u: complex, v: complex, w: complex) -> Dict[str, float]:
    """Residual of every R-matrix identity at one sample (v, w only enter Yang-Baxter)."""
    eta = p.eta_c
    R = r_matrix(u, p)
    crossing_v = np.kron(-1j * SIGMA["y"], IDENTITY2)
    sz0 = np.kron(SIGMA["z"], IDENTITY2)
    z2 = max(
        _rel(np.kron(SIGMA[a], SIGMA[a]) @ R, R @ np.kron(SIGMA[a], SIGMA[a])) for a in "xyz"
    )
    lhs = embed(r_matrix(u - v, p), "12") @ embed(r_matrix(u - w, p), "13") @ embed(r_matrix(v - w, p), "23")
    rhs = embed(r_matrix(v - w, p), "23") @ embed(r_matrix(u - w, p), "13") @ embed(r_matrix(u - v, p), "12")
    return {
        "initial_condition": _rel(r_matrix(0.0, p), PERMUTATION),
        "unitarity": _rel(R @ (PERMUTATION @ r_matrix(-u, p) @ PERMUTATION), p.phi(u) * IDENTITY4),
        "crossing": _rel(R, crossing_v @ partial_transpose_quantum(r_matrix(-u - eta, p)) @ crossing_v),
        "pt_symmetry": max(_rel(R, PERMUTATION @ R @ PERMUTATION), _rel(R, R.T)),
        "z2_symmetry": z2,
        "quasi_periodicity": _rel(r_matrix(u + 1j * np.pi, p), -sz0 @ R @ sz0),
        "fusion": _rel(r_matrix(-eta, p), -2.0 * ANTISYMMETRIZER),
        "yang_baxter": _rel(lhs, rhs),
    }


def r_property_suite(p: ModelParams, samples: Sequence[complex]) -> IdentityReport:
    """
    Maximum relative residual of each R-matrix identity over the samples.
    
    Yang-Baxter uses cyclic triples (u_k, u_k+1, u_k+2) of the samples.
    """
    samples = [complex(s) for s in samples]
    if not samples:
        raise ValueError("r_property_suite needs at least one sample")
    worst: Dict[str, float] = {}
    count = len(samples)
    for k, u in enumerate(samples):
        residuals = r_identity_residuals(p, u, samples[(k + 1) % count], samples[(k + 2) % count])
        for name, value in residuals.items():
            worst[name] = max(worst.get(name, 0.0), value)
    logger.info(f"R-matrix suite over {count} samples: max residual {max(worst.values()):.2e}")
    return IdentityReport(residuals=worst, thresholds={k: IDENTITY_THRESHOLD for k in worst})


def random_samples(count: int, seed: int = 7, radius: float = 1.0) -> List[complex]:
    """Reproducible complex spectral parameters in a box around the origin."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(-radius, radius, count)
    im = rng.uniform(-radius, radius, count)
    return [complex(x, y) for x, y in zip(re, im)]
