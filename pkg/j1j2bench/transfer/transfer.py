"""
Twisted transfer matrices t(u), t_hat(u) and the operators generated from them.

Both transfer matrices are applied matrix-free to blocks of vectors: a vector of the
chain is reshaped to a (2,)*2N tensor, the auxiliary qubit is prepended and the
R-matrices are contracted one site at a time. Dense matrices are the action on the
identity.
"""

import logging
from typing import Dict, Optional

import numpy as np

from j1j2bench.config import settings
from j1j2bench.core.hamiltonian import build_hamiltonian
from j1j2bench.core.pauli import check_dense_size, twisted_translation
from j1j2bench.errors import FiniteDifferenceError
from j1j2bench.models.schemas import (
    IdentityReport,
    MatrixFlag,
    ModelParams,
    OperatorMatrix,
    SpectralPoint,
    Which,
)
from j1j2bench.transfer.rmatrix import six_vertex_r

logger = logging.getLogger(__name__)


def perturbed_theta(p: ModelParams, epsilon: float = 1.0) -> np.ndarray:
    """theta_j = (-1)^j a + i * epsilon * delta_j with delta_j = scale * j / 2N."""
    return p.staggered_theta + 1j * epsilon * homotopy_deltas(p)


def homotopy_deltas(p: ModelParams) -> np.ndarray:
    j = np.arange(1, p.two_n + 1, dtype=float)
    return settings.homotopy_delta_scale * j / p.two_n


def apply_transfer(
    u: complex,
    p: ModelParams,
    vectors: np.ndarray,
    which: Which = Which.T,
    theta: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Action of t(u) or t_hat(u) on the columns of a (dim, m) block.

    t(u)     = tr_0 sigma^x_0 R_01(u - theta_1) ... R_0,2N(u - theta_2N)
    t_hat(u) = tr_0 sigma^x_0 R_0,2N(u + theta_2N) ... R_01(u + theta_1)

    Args:
        u: Spectral parameter
        p: Model parameters
        vectors: Block of column vectors (or a single vector)
        which: t or t_hat
        theta: Inhomogeneities (default staggered)

    Returns:
        Block of the same shape
    """
    L = p.two_n
    theta = p.staggered_theta if theta is None else np.asarray(theta, dtype=complex)
    SpectralPoint(u=u, theta=theta).check_length(p)
    single = vectors.ndim == 1
    block = vectors.reshape(-1, 1) if single else vectors
    m = block.shape[1]
    tensor = block.astype(complex).reshape((2,) * L + (m,))

    # rightmost factor acts first
    if which == Which.T:
        order = [(site, u - theta[site - 1]) for site in range(L, 0, -1)]
    else:
        order = [(site, u + theta[site - 1]) for site in range(1, L + 1)]
    r_tensors = [(site, six_vertex_r(arg, p.eta_c).reshape(2, 2, 2, 2)) for site, arg in order]

    result = np.zeros(tensor.shape, dtype=complex)
    for aux in (0, 1):
        x = np.zeros((2,) + tensor.shape, dtype=complex)
        x[aux] = tensor
        for site, r4 in r_tensors:
            x = np.tensordot(r4, x, axes=([2, 3], [0, site]))
            x = np.moveaxis(x, 1, site)
        # <aux| sigma^x X = X[1 - aux]
        result += x[1 - aux]
    out = result.reshape(block.shape)
    return out[:, 0] if single else out


def transfer_matrix(sp: SpectralPoint, p: ModelParams, which: Which = Which.T) -> OperatorMatrix:
    """Dense t(u) or t_hat(u)."""
    check_dense_size(p.two_n)
    sp.check_length(p)
    entries = apply_transfer(sp.u, p, np.eye(p.dim, dtype=complex), which, sp.theta)
    return OperatorMatrix(entries=entries, label=f"{which.value}({sp.u:.4g})")


def _dense(u: complex, p: ModelParams, which: Which = Which.T, theta: Optional[np.ndarray] = None) -> np.ndarray:
    check_dense_size(p.two_n)
    return apply_transfer(u, p, np.eye(p.dim, dtype=complex), which, theta)


def transfer_derivative(u: complex, p: ModelParams) -> np.ndarray:
    """
    dt/du by central differences at h and h/2, Richardson-combined.

    Raises:
        FiniteDifferenceError: if the two step sizes disagree beyond fd_richardson_tol
    """
    h = settings.fd_step

    def central(step: float) -> np.ndarray:
        return (_dense(u + step, p) - _dense(u - step, p)) / (2 * step)

    coarse = central(h)
    fine = central(h / 2)
    scale = max(1.0, float(np.max(np.abs(fine))))
    disagreement = float(np.max(np.abs(coarse - fine))) / scale
    if disagreement > settings.fd_richardson_tol:
        raise FiniteDifferenceError(
            f"finite-difference derivative unstable at u={u}",
            {"step": h, "disagreement": disagreement},
        )
    return (4 * fine - coarse) / 3


def reconstruct_hamiltonian(p: ModelParams) -> OperatorMatrix:
    """
    H = -phi(2a)^(1-N) sinh(eta) [t_hat(-a) t'(a) + t_hat(a) t'(-a)] + E0.
    """
    a = p.a
    t_hat_minus = _dense(-a, p, Which.T_HAT)
    t_hat_plus = _dense(a, p, Which.T_HAT)
    bracket = t_hat_minus @ transfer_derivative(a, p) + t_hat_plus @ transfer_derivative(-a, p)
    prefactor = -(p.phi2a ** (1 - p.n_half)) * p.sinh_eta
    entries = prefactor * bracket + p.e0 * np.eye(p.dim)
    logger.info(f"Reconstructed H from transfer matrices: 2N={p.two_n}")
    return OperatorMatrix(entries=entries, label="H_from_t")


def shift_operator(p: ModelParams) -> OperatorMatrix:
    """U = phi(2a)^(-N) t(a) t(-a) at staggered theta."""
    entries = (p.phi2a ** (-p.n_half)) * (_dense(p.a, p) @ _dense(-p.a, p))
    return OperatorMatrix(entries=entries, flag=MatrixFlag.UNITARY, label="U")


def apply_shift(p: ModelParams, vectors: np.ndarray) -> np.ndarray:
    """Matrix-free U on a block of vectors."""
    return (p.phi2a ** (-p.n_half)) * apply_transfer(p.a, p, apply_transfer(-p.a, p, vectors))


def quantum_determinant_terms(u: complex, p: ModelParams, theta: np.ndarray) -> complex:
    """a(u) d(u - eta) with d(u) = prod sinh(u - theta_j) / sinh(eta) and a(u) = d(u + eta)."""
    s = p.sinh_eta
    a_val = np.prod(np.sinh(u - theta + p.eta_c) / s)
    d_val = np.prod(np.sinh(u - p.eta_c - theta) / s)
    return complex(a_val * d_val)


def _frob_rel(commutator: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(commutator) / max(np.linalg.norm(a) * np.linalg.norm(b), 1e-300))


def _rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


TRANSFER_THRESHOLDS: Dict[str, float] = {
    "commute_t_t": 1e-10,
    "commute_t_t_hat": 1e-10,
    "crossing": 1e-10,
    "operator_product": 1e-9,
    "reconstruction": 1e-8,
    "shift_commutes_with_h": 1e-9,
    "shift_is_twisted_translation": 1e-9,
}


def transfer_identity_report(
    p: ModelParams,
    u: complex = complex(0.3, 0.0),
    v: complex = complex(-0.1, 0.2),
) -> IdentityReport:
    """
    Residuals of commutativity, crossing, the operator product identity at distinct
    inhomogeneities, Hamiltonian reconstruction and the shift operator.
    """
    t_u = _dense(u, p)
    t_v = _dense(v, p)
    t_hat_v = _dense(v, p, Which.T_HAT)
    residuals: Dict[str, float] = {
        "commute_t_t": _frob_rel(t_u @ t_v - t_v @ t_u, t_u, t_v),
        "commute_t_t_hat": _frob_rel(t_u @ t_hat_v - t_hat_v @ t_u, t_u, t_hat_v),
        "crossing": _rel(t_u, -_dense(-u - p.eta_c, p, Which.T_HAT)),
    }

    theta = perturbed_theta(p)
    worst = 0.0
    for theta_j in theta:
        product = _dense(theta_j, p, theta=theta) @ _dense(theta_j - p.eta_c, p, theta=theta)
        constant = quantum_determinant_terms(theta_j, p, theta)
        scale = max(1.0, abs(constant), float(np.max(np.abs(product))))
        worst = max(worst, float(np.max(np.abs(product + constant * np.eye(p.dim)))) / scale)
    residuals["operator_product"] = worst

    H = build_hamiltonian(p).entries
    residuals["reconstruction"] = _rel(reconstruct_hamiltonian(p).entries, H)
    U = shift_operator(p).entries
    residuals["shift_commutes_with_h"] = _frob_rel(U @ H - H @ U, U, H)
    residuals["shift_is_twisted_translation"] = _rel(U, twisted_translation(p.two_n).entries)

    report = IdentityReport(
        residuals=residuals, thresholds={k: TRANSFER_THRESHOLDS[k] for k in residuals}
    )
    logger.info(
        f"Transfer identities at 2N={p.two_n}: "
        f"{'all passed' if report.passed else 'failed ' + ', '.join(report.failures)}"
    )
    return report

