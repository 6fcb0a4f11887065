"""
Pydantic models for model parameters, numerical results and CLI records.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from j1j2bench.errors import ConfigError


# ========================
# MODEL PARAMETERS
# ========================

class Regime(str, Enum):
    """Crossing-parameter regime; both keep the Hamiltonian Hermitian for a = i*b."""
    
    REAL_ETA = "real_eta"
    ETA_PLUS_I_PI = "eta_plus_i_pi"


class ModelParams(BaseModel):
    """Model constants with the derived couplings and normalizers."""
    
    model_config = ConfigDict(frozen=True)
    
    two_n: int = Field(..., description="Number of sites 2N", examples=[4])
    b: float = Field(..., description="Inhomogeneity a = i*b", examples=[0.2])
    eta: float = Field(..., description="Real part of the crossing parameter", examples=[0.8])
    regime: Regime = Field(default=Regime.REAL_ETA, description="real_eta or eta_plus_i_pi")
    
    @field_validator("two_n")
    @classmethod
    def validate_two_n(cls, v: int) -> int:
        """Chain length must be even and at least 4."""
        if v < 4 or v % 2:
            raise ValueError("two_n must be an even integer >= 4")
        return v
    
    @model_validator(mode="after")
    def validate_hermitian_regime(self) -> "ModelParams":
        """Reject parameter sets outside the Hermitian strips."""
        if not (math.isfinite(self.b) and math.isfinite(self.eta)):
            raise ValueError("b and eta must be finite")
        if self.eta <= 0:
            raise ValueError("eta must be > 0 (eta_plus > 0 in the eta_plus_i_pi regime)")
        if self.regime == Regime.ETA_PLUS_I_PI and not 0 < self.b < math.pi / 2:
            raise ValueError("b must lie in (0, pi/2) in the eta_plus_i_pi regime")
        return self
    
    @property
    def n_half(self) -> int:
        """N, half the number of sites."""
        return self.two_n // 2
    
    @property
    def dim(self) -> int:
        """Hilbert-space dimension 2^(2N)."""
        return 1 << self.two_n
    
    @property
    def is_regime_two(self) -> bool:
        return self.regime == Regime.ETA_PLUS_I_PI
    
    @property
    def a(self) -> complex:
        return complex(0.0, self.b)
    
    @property
    def eta_c(self) -> complex:
        """Complex crossing parameter eta (eta_plus + i*pi in regime two)."""
        return complex(self.eta, math.pi if self.is_regime_two else 0.0)
    
    @property
    def eta_plus(self) -> float:
        return self.eta
    
    @property
    def sinh_eta(self) -> complex:
        # exact values: sinh(x + i*pi) = -sinh(x)
        sign = -1.0 if self.is_regime_two else 1.0
        return complex(sign * math.sinh(self.eta), 0.0)
    
    @property
    def cosh_eta(self) -> complex:
        sign = -1.0 if self.is_regime_two else 1.0
        return complex(sign * math.cosh(self.eta), 0.0)
    
    @property
    def cosh_two_eta(self) -> complex:
        return 1.0 + 2.0 * self.sinh_eta ** 2
    
    def phi(self, u: complex) -> complex:
        """Unitarity factor phi(u) = -sinh(u+eta) sinh(u-eta) / sinh^2(eta)."""
        return complex(-np.sinh(u + self.eta_c) * np.sinh(u - self.eta_c) / self.sinh_eta ** 2)
    
    @property
    def phi2a(self) -> complex:
        return self.phi(2 * self.a)
    
    @property
    def e0(self) -> complex:
        """Additive energy constant of the transfer-matrix reconstruction."""
        cosh_2a = np.cosh(2 * self.a)
        return complex(
            -self.n_half * self.cosh_eta * (cosh_2a ** 2 - self.cosh_two_eta) / self.sinh_eta ** 2
        )
    
    @property
    def j1x(self) -> complex:
        return complex(np.cosh(2 * self.a))
    
    @property
    def j1y(self) -> complex:
        return self.j1x
    
    @property
    def j1z(self) -> complex:
        return self.cosh_eta
    
    @property
    def j2(self) -> complex:
        return complex(-np.sinh(2 * self.a) ** 2 * self.cosh_eta / (2 * self.sinh_eta ** 2))
    
    @property
    def j3x(self) -> complex:
        return complex(1j * np.sinh(2 * self.a) * self.cosh_eta / (2 * self.sinh_eta))
    
    @property
    def j3y(self) -> complex:
        return self.j3x
    
    @property
    def j3z(self) -> complex:
        return complex(1j * np.sinh(4 * self.a) / (4 * self.sinh_eta))
    
    @property
    def staggered_theta(self) -> np.ndarray:
        """theta_j = (-1)^j * a for j = 1..2N."""
        signs = np.array([(-1) ** j for j in range(1, self.two_n + 1)], dtype=float)
        return signs * self.a
    
    def with_size(self, two_n: int) -> "ModelParams":
        """Same couplings on a chain of another length."""
        return ModelParams(two_n=two_n, b=self.b, eta=self.eta, regime=self.regime)
    
    def with_b(self, b: float) -> "ModelParams":
        """Same chain at another inhomogeneity."""
        return ModelParams(two_n=self.two_n, b=b, eta=self.eta, regime=self.regime)


# ========================
# OPERATORS AND SPECTRA
# ========================

class MatrixFlag(str, Enum):
    HERMITIAN = "hermitian"
    UNITARY = "unitary"
    NONE = "none"


class OperatorMatrix(BaseModel):
    """Dense complex square operator on the 2^(2N)-dimensional chain space."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    entries: np.ndarray = Field(..., description="Dense complex matrix")
    flag: MatrixFlag = Field(default=MatrixFlag.NONE, description="hermitian, unitary or none")
    label: str = Field(default="", description="Human-readable operator name")
    
    @model_validator(mode="after")
    def validate_flag(self) -> "OperatorMatrix":
        """Check shape and the invariant promised by the flag."""
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        if self.flag == MatrixFlag.HERMITIAN:
            scale = max(float(np.max(np.abs(m))), 1e-300)
            if float(np.max(np.abs(m - m.conj().T))) >= 1e-12 * scale:
                raise ValueError("matrix flagged hermitian is not Hermitian")
        elif self.flag == MatrixFlag.UNITARY:
            defect = float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))
            if defect >= 1e-10:
                raise ValueError(f"matrix flagged unitary has defect {defect:.3e}")
        return self
    
    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


class SpectrumResult(BaseModel):
    """Ascending eigenvalues, eigenvectors (columns) and degeneracy groups."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    degeneracy_groups: List[List[int]] = Field(default_factory=list)
    tol_deg: float = Field(..., description="Absolute degeneracy tolerance used")
    norm: float = Field(..., description="Spectral norm of H")
    dim: int = Field(..., description="Dimension of the full space")
    
    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])
    
    def group_of(self, index: int) -> List[int]:
        """Degeneracy group containing an eigenvalue index."""
        for group in self.degeneracy_groups:
            if index in group:
                return group
        raise KeyError(index)


class KinkKind(str, Enum):
    FERRO = "ferro"
    NEEL = "neel"


class KinkBasis(BaseModel):
    """4N computational-basis states obtained by cyclic successive spin flips."""
    
    model_config = ConfigDict(frozen=True)
    
    kind: KinkKind
    two_n: int
    indices: List[int] = Field(..., description="Basis-state index of each kink vector")
    
    @property
    def dim(self) -> int:
        return 1 << self.two_n
    
    @property
    def vectors(self) -> np.ndarray:
        """Kink vectors as columns of a dim x 4N matrix."""
        out = np.zeros((self.dim, len(self.indices)), dtype=complex)
        out[self.indices, np.arange(len(self.indices))] = 1.0
        return out


class TextureRow(BaseModel):
    """Projection of one eigenstate onto a kink basis."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    index: int
    energy: float
    alpha: np.ndarray = Field(..., description="Projections <K_j|psi_i>")
    delta: float = Field(..., description="Norm of the part of psi_i outside the kink span")


class TextureTable(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    kind: KinkKind
    rows: List[TextureRow]


class BandReport(BaseModel):
    """Low-lying band of ground plus nearly degenerate states."""
    
    model_config = ConfigDict(frozen=True)
    
    found: bool
    band_size: int = 0
    ground_multiplicity: int = 0
    count: int = Field(default=0, description="Number of nearly degenerate states")
    delta_e: List[float] = Field(default_factory=list, description="E_d - E_1g per state")
    distinct_delta_e: List[float] = Field(default_factory=list)
    delta_e_max: Optional[float] = None
    gap_ratio: Optional[float] = None


# ========================
# TRANSFER MATRIX
# ========================

class Which(str, Enum):
    T = "t"
    T_HAT = "t_hat"


class SpectralPoint(BaseModel):
    """Spectral parameter with its inhomogeneities."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    u: complex
    theta: np.ndarray
    
    @field_validator("u", mode="before")
    @classmethod
    def coerce_complex(cls, v: Any) -> complex:
        return complex(v)
    
    @classmethod
    def staggered(cls, u: complex, p: ModelParams) -> "SpectralPoint":
        return cls(u=complex(u), theta=p.staggered_theta)
    
    def check_length(self, p: ModelParams) -> None:
        if len(self.theta) != p.two_n:
            raise ValueError(f"theta has {len(self.theta)} entries, expected {p.two_n}")


class ResolvedState(BaseModel):
    """Simultaneous eigenvector of H and t(u0)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    index: int = Field(..., description="Position in the ascending spectrum")
    energy: float
    vector: np.ndarray
    group: List[int] = Field(..., description="H-degeneracy group the state was resolved in")
    lambda_u0: complex = Field(..., description="Transfer-matrix eigenvalue at the resolving point")


class RootKind(str, Enum):
    IMAGINARY = "imaginary"
    CONJUGATE_PAIR = "conjugate_pair"
    BOUNDARY_STRING = "boundary_string"
    UNKNOWN = "unknown"


class RootTag(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    kind: RootKind
    n: Optional[int] = Field(default=None, description="String length of a conjugate pair")


class ZeroRootSet(BaseModel):
    """Lambda0 with the 2N-1 zero roots of one transfer-matrix eigenvalue."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    lambda0: complex
    roots: np.ndarray = Field(..., description="Canonically ordered complex roots")
    pairing: List[Tuple[int, int]] = Field(default_factory=list)
    tags: List[RootTag] = Field(default_factory=list)
    condition: Optional[float] = Field(default=None, description="Condition number of the sample system")
    
    @property
    def x(self) -> np.ndarray:
        """x_j = -i z_j."""
        return -1j * self.roots


class EnergyMomentum(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    energy: float
    momentum: float
    
    @field_validator("momentum")
    @classmethod
    def validate_momentum(cls, v: float) -> float:
        if not -math.pi <= v < math.pi:
            raise ValueError("momentum must lie in [-pi, pi)")
        return v


class IdentityReport(BaseModel):
    """Maximum relative residual per identity with its threshold."""
    
    model_config = ConfigDict(frozen=True)
    
    residuals: Dict[str, float]
    thresholds: Dict[str, float]
    
    @property
    def passed(self) -> bool:
        return all(self.residuals[k] < self.thresholds[k] for k in self.residuals)
    
    @property
    def failures(self) -> List[str]:
        return [k for k in self.residuals if not self.residuals[k] < self.thresholds[k]]


# ========================
# BAE SOLVER
# ========================

class ConjugatePairSeed(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    n: int = Field(..., ge=2, description="Real parts at +-n*eta/2")
    lam: float = Field(..., description="Common imaginary part")


class PatternSeed(BaseModel):
    """Root-pattern composition with initial positions."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    imaginary: List[float] = Field(default_factory=list, description="x of roots z = i*x")
    pairs: List[ConjugatePairSeed] = Field(default_factory=list)
    boundary_mu: Optional[float] = Field(default=None, description="Boundary string position mu")
    unknown: List[complex] = Field(default_factory=list, description="Unclassified roots as found")
    
    @property
    def root_count(self) -> int:
        return (
            len(self.imaginary)
            + 2 * len(self.pairs)
            + (1 if self.boundary_mu is not None else 0)
            + len(self.unknown)
        )
    
    def positions(self, p: ModelParams) -> np.ndarray:
        """Initial root positions."""
        roots: List[complex] = [complex(0.0, x) for x in self.imaginary]
        for pair in self.pairs:
            offset = pair.n * p.eta / 2
            roots.extend([complex(-offset, pair.lam), complex(offset, pair.lam)])
        if self.boundary_mu is not None:
            roots.append(complex(0.0, self.boundary_mu))
        roots.extend(complex(z) for z in self.unknown)
        return np.array(roots, dtype=complex)
    
    def composition(self) -> Dict[str, Any]:
        return {
            "imaginary": len(self.imaginary),
            "pairs": [(pair.n, pair.lam) for pair in self.pairs],
            "boundary_mu": self.boundary_mu,
            "unknown": len(self.unknown),
        }


class HomotopyStep(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    epsilon: float
    roots: np.ndarray
    log_lambda0_sq: complex
    residual: float
    iterations: int
    condition: float
    pairing_defect: float


class HomotopyPath(BaseModel):
    """Continuation record from distinct inhomogeneities to the staggered limit."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True)
    
    deltas: List[float]
    schedule: List[float] = Field(default_factory=list, description="Epsilon values actually visited")
    steps: List[HomotopyStep] = Field(default_factory=list)
    refinements: int = 0
    extrapolated: bool = False
    residual_history: List[float] = Field(default_factory=list, description="Final polish residuals")
    
    @property
    def max_pairing_defect(self) -> float:
        return max((s.pairing_defect for s in self.steps), default=0.0)


# ========================
# THERMODYNAMIC LIMIT
# ========================

class DensityProfile(BaseModel):
    """Fourier coefficients of a density on [-pi/2, pi/2), f(x) = (1/pi) sum f~(w) e^{2iwx}."""
    
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
    
    label: str
    omega: np.ndarray = Field(..., description="Modes -omega_max..omega_max")
    coefficients: np.ndarray = Field(..., description="Complex coefficients aligned with omega")
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    
    @property
    def omega_max(self) -> int:
        return int(np.max(self.omega))
    
    @property
    def constant_mode(self) -> float:
        return float(self.coefficients[self.omega == 0][0].real)
    
    def coefficient(self, w: int) -> complex:
        return complex(self.coefficients[self.omega == w][0])
    
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Real-space density on arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        phases = np.exp(2j * np.outer(x, self.omega))
        return (phases @ self.coefficients).real / math.pi
    
    def on_grid(self, points: int = 101) -> "DensityProfile":
        """Copy with a cached evaluation on a uniform grid of [-pi/2, pi/2)."""
        grid = -math.pi / 2 + math.pi * np.arange(points) / points
        return self.model_copy(update={"grid": grid, "values": self.evaluate(grid)})


class Branch(str, Enum):
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"
    E4 = "e4"


class ExcitationQuery(BaseModel):
    """Excitation branch with its free parameters."""
    
    model_config = ConfigDict(frozen=True)
    
    branch: Branch
    n: Optional[int] = None
    lam: Optional[float] = None
    mu: Optional[float] = None
    mu1: Optional[float] = None
    mu2: Optional[float] = None
    
    @model_validator(mode="after")
    def validate_branch_parameters(self) -> "ExcitationQuery":
        """Each branch carries exactly its own parameters inside the strip."""
        half = math.pi / 2
        
        def in_strip(name: str, v: Optional[float]) -> None:
            if v is None:
                raise ValueError(f"{self.branch.value} requires {name}")
            if not -half <= v < half:
                raise ValueError(f"{name} must lie in [-pi/2, pi/2)")
        
        if self.branch == Branch.E1:
            if self.n is None or self.n < 2:
                raise ValueError("e1 requires n >= 2")
            in_strip("lam", self.lam)
        elif self.branch in (Branch.E2, Branch.E3):
            in_strip("mu", self.mu)
            if self.branch == Branch.E2 and self.mu == 0.0:
                raise ValueError("mu = 0 is the ground value of the e2 branch")
            if self.branch == Branch.E3 and self.mu == -half:
                raise ValueError("mu = -pi/2 is the ground value of the e3 branch")
        else:
            in_strip("mu1", self.mu1)
            in_strip("mu2", self.mu2)
        return self
    
    def check_regime(self, p: ModelParams) -> None:
        """Raise if the branch does not exist for the model's regime or phase."""
        if self.branch == Branch.E1:
            if p.is_regime_two:
                raise ConfigError("e1 requires the real_eta regime")
            return
        if not p.is_regime_two:
            raise ConfigError(f"{self.branch.value} requires the eta_plus_i_pi regime")
        if self.branch == Branch.E2 and p.b > math.pi / 4:
            raise ConfigError("e2 exists for b in (0, pi/4]")
        if self.branch == Branch.E3 and p.b < math.pi / 4:
            raise ConfigError("e3 exists for b in [pi/4, pi/2)")


class FitModel(str, Enum):
    EXPONENTIAL = "exponential"
    POWER_LAW = "power_law"


class ScalingFit(BaseModel):
    """delta = A exp(-c x) or A x^(-c), fitted in log space."""
    
    model_config = ConfigDict(frozen=True)
    
    model: FitModel
    amplitude: float
    rate: float
    residual: float = Field(..., description="Log-space residual norm")
    sizes: List[float]
    deltas: List[float]
    
    @property
    def decaying(self) -> bool:
        return self.rate > 0
    
    def predict(self, x: float) -> float:
        if self.model == FitModel.EXPONENTIAL:
            return self.amplitude * math.exp(-self.rate * x)
        return self.amplitude * x ** (-self.rate)


class GroundStateII(BaseModel):
    """Minimizer selection between the two regime-two ground candidates."""
    
    model_config = ConfigDict(frozen=True)
    
    e2g: float
    e3g: float
    phase: str = Field(..., description="'I' (mu = 0), 'II' (mu = -pi/2) or 'tied'")
    energy: float
    mu: Optional[float]


class QptReport(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    eta_plus: float
    two_n: int
    b_grid: List[float]
    energy: List[float] = Field(..., description="Per-site ground energy")
    derivative: List[float]
    critical_b: float
    continuity_gap: float
    slope_left: float
    slope_right: float
    jump: float
    noise: float


# ========================
# CLI RECORDS
# ========================

class Command(str, Enum):
    ED = "ed"
    TRANSFER_CHECK = "transfer-check"
    ROOTS = "roots"
    BAE_SOLVE = "bae-solve"
    THERMO = "thermo"
    EXCITE = "excite"
    QPT_SCAN = "qpt-scan"
    SCALING = "scaling"
    TEXTURE = "texture"
    REPRODUCE = "reproduce"


class RunConfig(BaseModel):
    """One fully validated CLI invocation."""
    
    model_config = ConfigDict(frozen=True)
    
    command: Command
    two_n: int = 4
    b: float = 0.2
    eta: Optional[float] = None
    regime: Regime = Regime.REAL_ETA
    output: str = Field(default="./results", description="Output directory")
    format: str = Field(default="both", description="csv, json or both")
    omega_max: Optional[int] = Field(default=None, ge=1)
    step: Optional[float] = Field(default=None, gt=0)
    sizes: List[int] = Field(default_factory=list)
    seeds_file: Optional[str] = None
    branch: Optional[Branch] = None
    n: Optional[int] = None
    lam: Optional[float] = None
    mu: Optional[float] = None
    mu1: Optional[float] = None
    mu2: Optional[float] = None
    grid_points: int = Field(default=101, ge=3)
    kind: KinkKind = KinkKind.FERRO
    quantity: Optional[str] = None
    target: Optional[str] = None
    strict: bool = False
    provenance: Dict[str, str] = Field(default_factory=dict, description="Source of each value")
    
    @field_validator("format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        if v not in ("csv", "json", "both"):
            raise ValueError("format must be csv, json or both")
        return v
    
    def model_params(self, two_n: Optional[int] = None) -> ModelParams:
        """Model parameters of this run; eta must be set."""
        if self.eta is None:
            raise ValueError("eta is required")
        return ModelParams(
            two_n=two_n or self.two_n, b=self.b, eta=self.eta, regime=self.regime
        )


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)
    
    value: float
    tolerance: float
    passed: bool


class ResultRecord(BaseModel):
    """Machine-readable output of one run."""
    
    schema_version: str = "1.0"
    command: str
    target: Optional[str] = None
    inputs: Dict[str, Any] = Field(default_factory=dict)
    columns: Dict[str, List[Any]] = Field(default_factory=dict)
    scalars: Dict[str, Any] = Field(default_factory=dict)
    provenance: Dict[str, str] = Field(default_factory=dict)
    checks: Dict[str, CheckResult] = Field(default_factory=dict)
    
    @model_validator(mode="after")
    def validate_provenance(self) -> "ResultRecord":
        """Every emitted column and scalar is labeled with its source operation."""
        missing = [k for k in [*self.columns, *self.scalars] if k not in self.provenance]
        if missing:
            raise ValueError(f"missing provenance for: {', '.join(missing)}")
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("all columns must have the same length")
        return self
    
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())
