"""
Configuration management with environment-based settings.
Every numerical tolerance of the workbench lives here so a run can be re-tuned from
the environment or a .env file without touching code.
"""

import logging
import math
from typing import Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

# Hard ceiling for dense operators (dim 16384); never configurable.
DENSE_HARD_LIMIT = 14


class Settings(BaseSettings):
    """Workbench settings with environment-based configuration."""
    
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )
    
    # ========================
    # EXACT DIAGONALIZATION
    # ========================
    ed_max_two_n: int = Field(default=12, description="Largest 2N diagonalized without opt-in")
    allow_large_ed: bool = Field(default=False, description="Opt in to 2N = 14 dense operators")
    tol_deg_relative: float = Field(default=1e-8, description="Degeneracy tolerance relative to ||H||")
    eigen_residual_tol: float = Field(default=1e-9, description="Eigenpair residual bound relative to ||H||")
    band_gap_ratio: float = Field(default=3.0, description="Largest/next-largest gap ratio for band detection")
    
    # ========================
    # TRANSFER MATRIX
    # ========================
    lambda_sample_offset: float = Field(default=0.37, description="Real offset of the Lambda sampling line")
    lambda_resample_shift: float = Field(default=0.113, description="Offset shift applied on each resample")
    lambda_resample_attempts: int = Field(default=3, description="Sampling attempts before giving up")
    lambda_condition_limit: float = Field(default=1e8, description="Max condition number of the sample system")
    eigen_tol: float = Field(default=1e-8, description="Eigenvector residual tolerance for t(u0)")
    resolve_merge_relative: float = Field(
        default=1e-5, description="H levels closer than this times ||H|| are resolved by t(u0) together"
    )
    tol_pair: float = Field(default=1e-6, description="Absolute tolerance of the z -> -z* pairing")
    fd_step: float = Field(default=1e-5, description="Central-difference step for dt/du")
    fd_richardson_tol: float = Field(default=1e-6, description="Allowed h vs h/2 derivative disagreement")
    
    # ========================
    # BAE SOLVER
    # ========================
    homotopy_depth: int = Field(default=20, description="Schedule runs 1, 1/2, ..., 2^-depth, 0")
    homotopy_delta_scale: float = Field(default=0.1, description="delta_j = j * scale / 2N")
    homotopy_max_refinements: int = Field(default=6, description="Schedule bisections allowed per step")
    newton_tol: float = Field(default=1e-10, description="Converged when max |scaled residual| is below")
    newton_max_iter: int = Field(default=60, description="Newton iterations per continuation step")
    newton_max_halvings: int = Field(default=30, description="Backtracking halvings before divergence")
    collision_tol: float = Field(default=1e-8, description="Two roots closer than this collide")
    bae_condition_limit: float = Field(default=1e12, description="Stop descending in epsilon above this Jacobian condition")
    classify_tolerance: float = Field(default=0.1, description="Cluster match tolerance in units of eta")
    cluster_tolerance: float = Field(default=0.05, description="Absolute real-part tolerance for pattern checks")
    
    # ========================
    # THERMODYNAMIC LIMIT
    # ========================
    series_tolerance: float = Field(default=1e-14, description="Target size of the first neglected term")
    tail_tolerance: float = Field(default=1e-12, description="Upper bound accepted for the series tail")
    omega_padding: int = Field(default=4, description="Extra Fourier modes beyond the tolerance cutoff")
    qpt_step: float = Field(default=0.01, description="Default b-grid step of the QPT scan")
    
    # ========================
    # RUNTIME
    # ========================
    threads: int = Field(default=1, alias="J1J2_THREADS", description="Worker threads for sweeps")
    output_dir: str = Field(default="./results", description="Default output directory")
    
    # ========================
    # LOGGING
    # ========================
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(default="text", description="Log format: json or text")
    
    @field_validator(
        "tol_deg_relative",
        "eigen_residual_tol",
        "eigen_tol",
        "resolve_merge_relative",
        "tol_pair",
        "fd_step",
        "fd_richardson_tol",
        "newton_tol",
        "collision_tol",
        "series_tolerance",
        "tail_tolerance",
        "qpt_step",
    )
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Tolerances and steps must be strictly positive."""
        if not v > 0:
            raise ValueError("must be strictly positive")
        return v
    
    @field_validator("band_gap_ratio")
    @classmethod
    def validate_gap_ratio(cls, v: float) -> float:
        """A band needs a gap strictly larger than its neighbours."""
        if v <= 1:
            raise ValueError("band_gap_ratio must exceed 1")
        return v
    
    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """Validate worker count."""
        if v < 1:
            raise ValueError("J1J2_THREADS must be at least 1")
        return v
    
    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate logging level name."""
        v = v.upper()
        if v not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
            raise ValueError(f"Invalid log level: {v}")
        return v
    
    @property
    def dense_limit(self) -> int:
        """Largest 2N for which dense operators may be built."""
        if self.allow_large_ed:
            return DENSE_HARD_LIMIT
        return min(self.ed_max_two_n, DENSE_HARD_LIMIT)
    
    def omega_cutoff(self, decay_rate: float, tolerance: Optional[float] = None) -> int:
        """
        Number of Fourier modes kept for a series decaying as exp(-rate * omega).
        
        Args:
            decay_rate: Exponential decay rate of the terms
            tolerance: Target size of the first neglected term
            
        Returns:
            omega_max
        """
        tol = tolerance or self.series_tolerance
        return int(math.ceil(-math.log(tol) / decay_rate)) + self.omega_padding
    
    def validate_config(self) -> None:
        """Validate cross-field consistency."""
        if self.ed_max_two_n % 2 or self.ed_max_two_n < 4:
            raise ValueError("ED_MAX_TWO_N must be an even number >= 4")
        if self.ed_max_two_n > DENSE_HARD_LIMIT:
            raise ValueError(f"ED_MAX_TWO_N cannot exceed {DENSE_HARD_LIMIT}")
        if self.tail_tolerance < self.series_tolerance:
            raise ValueError("TAIL_TOLERANCE must not be tighter than SERIES_TOLERANCE")


# Global settings instance
settings = Settings()

# Validate on import
try:
    settings.validate_config()
except ValueError as e:
    print(f"⚠️  Configuration warning: {e}")
    print(f"   Please check your .env file")
