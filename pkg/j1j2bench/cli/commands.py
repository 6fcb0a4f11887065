"""
Command handlers: one function per RunConfig.command, each returning a ResultRecord.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from j1j2bench.bae.patterns import ground_seed
from j1j2bench.bae.solver import solve_with_path
from j1j2bench.cli.output import RecordBuilder
from j1j2bench.cli.reproduce import run_target
from j1j2bench.config import settings
from j1j2bench.core.spectrum import exact_spectrum, nearly_degenerate_scan
from j1j2bench.core.texture import kink_basis, texture_projections
from j1j2bench.errors import ConfigError, IdentityCheckError
from j1j2bench.models.schemas import (
    Branch,
    Command,
    ExcitationQuery,
    FitModel,
    ModelParams,
    PatternSeed,
    ResultRecord,
    RunConfig,
    ZeroRootSet,
)
from j1j2bench.thermo import finite_size
from j1j2bench.thermo.density import (
    ground_density_I,
    ground_density_I_closed_form,
    ground_density_II,
)
from j1j2bench.thermo.qpt import b_grid, qpt_scan
from j1j2bench.thermo.regime_one import e1_dispersion, excitation_I, ground_energy_I
from j1j2bench.thermo.regime_two import (
    e4_grid,
    energy_mu,
    epsilon,
    excitation_II_first,
    excitation_II_second,
    first_dispersion,
    ground_energy_II,
    mu_grid,
)
from j1j2bench.thermo.scaling import scaling_fit
from j1j2bench.transfer.rmatrix import r_property_suite, random_samples
from j1j2bench.transfer.roots import (
    energy_from_roots,
    extract_zero_roots,
    momentum_from_roots,
    resolve_eigenstates,
    shift_eigenphase,
)
from j1j2bench.transfer.transfer import transfer_identity_report

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig], ResultRecord]

SCALING_QUANTITIES = {
    "e1g": finite_size.delta_e1g,
    "e1": finite_size.delta_e1,
    "e2g": finite_size.delta_e2g,
    "e2": finite_size.delta_e2,
    "e3": finite_size.delta_e3,
}


def inputs_of(config: RunConfig) -> Dict:
    """Input echo of a run."""
    echo = config.model_dump(mode="json", exclude={"provenance"})
    echo["sources"] = dict(sorted(config.provenance.items()))
    return echo


def builder_for(config: RunConfig) -> RecordBuilder:
    return RecordBuilder(config.command.value, inputs_of(config))


def root_columns(builder: RecordBuilder, root_sets: List[ZeroRootSet], source: str) -> None:
    """Columns z1..z(2N-1) (re/im) and lambda0 of equally sized root sets."""
    if not root_sets:
        return
    builder.column("lambda0", [zrs.lambda0 for zrs in root_sets], source)
    for j in range(len(root_sets[0].roots)):
        builder.column(f"z{j + 1}", [complex(zrs.roots[j]) for zrs in root_sets], source)
    builder.column("tags", [";".join(t.kind.value + (str(t.n) if t.n else "") for t in zrs.tags) for zrs in root_sets], source)


# ========================
# spinchain-core
# ========================

def run_ed(config: RunConfig) -> ResultRecord:
    p = config.model_params()
    spec = exact_spectrum(p, eigenvalues_only=True)
    group_of = {i: g for g, members in enumerate(spec.degeneracy_groups) for i in members}
    builder = builder_for(config)
    builder.column("level", range(len(spec.eigenvalues)), "ed")
    builder.column("energy", spec.eigenvalues, "ed: diagonalize")
    builder.column("group", [group_of[i] for i in range(len(spec.eigenvalues))], "ed: degeneracy grouping")
    builder.scalar("ground_energy", spec.ground_energy, "ed: diagonalize")
    builder.scalar("tol_deg", spec.tol_deg, "ed: degeneracy grouping")
    if not p.is_regime_two:
        band = nearly_degenerate_scan(spec, p)
        builder.scalar("band_found", band.found, "ed: low_band")
        if band.found:
            builder.scalar("nearly_degenerate_count", band.count, "ed: low_band")
            builder.scalar("distinct_delta_e", band.distinct_delta_e, "ed: low_band")
            builder.scalar("delta_e_max", band.delta_e_max, "ed: low_band")
    return builder.build()


def run_texture(config: RunConfig) -> ResultRecord:
    p = config.model_params()
    table = texture_projections(exact_spectrum(p), kink_basis(p, config.kind))
    builder = builder_for(config)
    builder.column("level", [row.index for row in table.rows], "ed")
    builder.column("energy", [row.energy for row in table.rows], "ed: diagonalize")
    builder.column("delta", [row.delta for row in table.rows], "texture_projections")
    for j in range(len(table.rows[0].alpha)):
        builder.column(f"alpha{j + 1}", [complex(row.alpha[j]) for row in table.rows], "texture_projections")
    return builder.build()


# ========================
# transfer-matrix
# ========================

def run_transfer_check(config: RunConfig) -> ResultRecord:
    """R-matrix property suite and transfer-matrix identities; any failure is exit 3."""
    p = config.model_params()
    r_report = r_property_suite(p, random_samples(8))
    t_report = transfer_identity_report(p)
    residuals = {**{f"r_{k}": v for k, v in r_report.residuals.items()}, **t_report.residuals}
    thresholds = {**{f"r_{k}": v for k, v in r_report.thresholds.items()}, **t_report.thresholds}
    names = sorted(residuals)
    builder = builder_for(config)
    builder.column("identity", names, "identity suite")
    builder.column("residual", [residuals[k] for k in names], "identity suite")
    builder.column("threshold", [thresholds[k] for k in names], "identity suite")
    for name in names:
        builder.check(name, residuals[name], thresholds[name], residuals[name] <= thresholds[name])
    failures = [f"r_{k}" for k in r_report.failures] + list(t_report.failures)
    if failures:
        raise IdentityCheckError(
            f"identity residuals above threshold: {', '.join(failures)}",
            {name: residuals[name] for name in failures},
        )
    return builder.build()


def run_roots(config: RunConfig) -> ResultRecord:
    """Zero roots, energy and momentum of every eigenstate."""
    p = config.model_params()
    states = resolve_eigenstates(exact_spectrum(p), p)
    root_sets = [extract_zero_roots(s.vector, p) for s in states]
    builder = builder_for(config)
    builder.column("level", [s.index for s in states], "ed")
    builder.column("energy_ed", [s.energy for s in states], "ed: diagonalize")
    builder.column("energy_roots", [energy_from_roots(z, p) for z in root_sets], "energy_from_roots")
    builder.column("momentum_roots", [momentum_from_roots(z, p) for z in root_sets], "momentum_from_roots")
    builder.column("shift_phase", [shift_eigenphase(s.vector, p) for s in states], "shift operator eigenphase")
    root_columns(builder, root_sets, "extract_zero_roots")
    builder.column("condition", [z.condition for z in root_sets], "extract_zero_roots")
    return builder.build()


# ========================
# bae-solver
# ========================

def load_seeds(path: Optional[str], p: ModelParams) -> List[PatternSeed]:
    """Seeds from a JSON list of pattern objects, or the ground pattern."""
    if not path:
        return [ground_seed(p)]
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read seeds file {path}: {e}", {"path": path}) from e
    if not isinstance(raw, list) or not raw:
        raise ConfigError("seeds file must hold a non-empty JSON list", {"path": path})
    try:
        return [PatternSeed.model_validate(item) for item in raw]
    except ValidationError as e:
        raise ConfigError(f"invalid seed in {path}", {"path": path, "errors": e.errors(include_url=False)}) from e


def run_bae_solve(config: RunConfig) -> ResultRecord:
    p = config.model_params()
    seeds = load_seeds(config.seeds_file, p)
    started = time.perf_counter()
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        results = list(pool.map(lambda seed: solve_with_path(seed, p), seeds))
    logger.info(f"Solved {len(seeds)} seeds in {time.perf_counter() - started:.2f}s")
    root_sets = [zrs for zrs, _ in results]
    paths = [path for _, path in results]
    builder = builder_for(config)
    builder.column("seed", range(len(seeds)), "input")
    builder.column("energy", [energy_from_roots(z, p) for z in root_sets], "energy_from_roots on BAE solution")
    builder.column("momentum", [momentum_from_roots(z, p) for z in root_sets], "momentum_from_roots on BAE solution")
    root_columns(builder, root_sets, "bae solve")
    builder.column("continuation_steps", [len(path.steps) for path in paths], "homotopy path")
    builder.column("refinements", [path.refinements for path in paths], "homotopy path")
    builder.column("final_residual", [path.residual_history[-1] for path in paths], "confluent polish")
    builder.column("max_pairing_defect", [path.max_pairing_defect for path in paths], "homotopy path")
    return builder.build()


# ========================
# thermo-limit
# ========================

def run_thermo(config: RunConfig) -> ResultRecord:
    """Thermodynamic ground state and its density on a grid of [-pi/2, pi/2)."""
    p = config.model_params()
    points = config.grid_points
    grid = mu_grid(points)
    builder = builder_for(config)
    builder.column("x", grid, "uniform grid")
    if not p.is_regime_two:
        density = ground_density_I(p, config.omega_max)
        builder.column("rho", density.evaluate(grid), "ground_density_I")
        builder.column("rho_closed_form", ground_density_I_closed_form(p, grid), "ground_density_I closed form")
        builder.scalar("ground_energy", ground_energy_I(p), "ground_energy_I")
        builder.scalar("density_constant_mode", density.constant_mode, "ground_density_I")
        return builder.build()
    ground = ground_energy_II(p, config.omega_max)
    density = ground_density_II(p, ground.mu if ground.mu is not None else 0.0, config.omega_max)
    builder.column("rho", density.evaluate(grid), "ground_density_II")
    builder.column("energy_mu", [energy_mu(p, mu, config.omega_max) for mu in grid], "energy_mu")
    builder.column("epsilon", [epsilon(p, mu, config.omega_max) for mu in grid], "epsilon")
    builder.scalar("e2g", ground.e2g, "e2g")
    builder.scalar("e3g", ground.e3g, "e3g")
    builder.scalar("ground_energy", ground.energy, "ground_energy_II")
    builder.scalar("phase", ground.phase, "ground_energy_II")
    builder.scalar("mu", ground.mu, "ground_energy_II")
    return builder.build()


def _has_parameters(config: RunConfig) -> bool:
    if config.branch == Branch.E1:
        return config.lam is not None
    if config.branch in (Branch.E2, Branch.E3):
        return config.mu is not None
    return config.mu1 is not None and config.mu2 is not None


def run_excite(config: RunConfig) -> ResultRecord:
    """One excitation point when its parameters are given, otherwise its dispersion."""
    p = config.model_params()
    builder = builder_for(config)
    branch = config.branch
    if _has_parameters(config):
        try:
            query = ExcitationQuery(
                branch=branch, n=config.n or 2, lam=config.lam, mu=config.mu, mu1=config.mu1, mu2=config.mu2
            )
        except ValidationError as e:
            raise ConfigError(f"invalid excitation: {e.errors()[0]['msg']}", {"branch": branch.value}) from e
        if branch == Branch.E1:
            point = excitation_I(query, p, config.omega_max)
        elif branch == Branch.E4:
            point = excitation_II_second(query, p, config.omega_max)
        else:
            point = excitation_II_first(query, p, config.omega_max)
        builder.scalar("energy", point.energy, f"{branch.value} energy")
        builder.scalar("momentum", point.momentum, f"{branch.value} momentum")
        return builder.build()

    ExcitationQuery.model_construct(branch=branch).check_regime(p)
    grid = mu_grid(config.grid_points)
    if branch == Branch.E1:
        n = config.n or 2
        momenta, energies, jumps = e1_dispersion(p, n, grid, config.omega_max)
        builder.column("lam", grid, "uniform grid")
        builder.column("momentum", momenta, "k1")
        builder.column("energy", energies, "e1")
        builder.column("branch_jump", jumps, "k1 branch check")
    elif branch == Branch.E4:
        energies, momenta = e4_grid(p, config.grid_points, config.omega_max)
        mu1, mu2 = np.meshgrid(grid, grid, indexing="ij")
        builder.column("mu1", mu1.ravel(), "uniform grid")
        builder.column("mu2", mu2.ravel(), "uniform grid")
        builder.column("energy", energies.ravel(), "e4")
        builder.column("momentum", momenta.ravel(), "k4")
        builder.scalar("min_energy", float(np.min(energies)), "e4")
    else:
        momenta, energies = first_dispersion(p, branch, grid, config.omega_max)
        builder.column("mu", grid, "uniform grid")
        builder.column("momentum", momenta, f"k{branch.value[1]}")
        builder.column("energy", energies, branch.value)
        builder.scalar("min_energy", float(np.min(energies)), branch.value)
    return builder.build()


def run_qpt_scan(config: RunConfig) -> ResultRecord:
    report = qpt_scan(config.model_params(), b_grid(config.step), config.omega_max)
    builder = builder_for(config)
    builder.column("b", report.b_grid, "b grid")
    builder.column("energy_per_site", report.energy, "min(e2g, e3g) / 2N")
    builder.column("derivative", report.derivative, "gradient of energy_per_site")
    for name in ("critical_b", "continuity_gap", "slope_left", "slope_right", "jump", "noise"):
        builder.scalar(name, getattr(report, name), "qpt_scan")
    return builder.build()


def fit_sizes(builder: RecordBuilder, points: List[Tuple[int, float]], source: str) -> Dict[FitModel, object]:
    """Columns two_n / delta and both fits as scalars."""
    sizes, magnitudes = finite_size.magnitudes(points)
    builder.column("two_n", [n for n, _ in points], "input")
    builder.column("delta", [d for _, d in points], source)
    fits = {}
    for model in FitModel:
        fit = scaling_fit(sizes, magnitudes, model)
        fits[model] = fit
        builder.scalar(f"{model.value}_amplitude", fit.amplitude, f"scaling_fit ({model.value})")
        builder.scalar(f"{model.value}_rate", fit.rate, f"scaling_fit ({model.value})")
        builder.scalar(f"{model.value}_residual", fit.residual, f"scaling_fit ({model.value})")
    preferred = min(fits.values(), key=lambda f: f.residual)
    builder.scalar("preferred_model", preferred.model.value, "scaling_fit residual comparison")
    builder.scalar("monotone", finite_size.monotone_decreasing(magnitudes), source)
    return fits


def run_scaling(config: RunConfig) -> ResultRecord:
    quantity = config.quantity
    if quantity not in SCALING_QUANTITIES:
        raise ConfigError(
            f"unknown scaling quantity '{quantity}'",
            {"field": "quantity", "allowed": sorted(SCALING_QUANTITIES)},
        )
    base = config.model_params()
    sweep = SCALING_QUANTITIES[quantity]
    if quantity == "e1":
        points = sweep(base, config.sizes, config.n or 2)
    elif quantity == "e1g":
        points = sweep(base, config.sizes)
    else:
        points = sweep(base, config.sizes, config.omega_max)
    builder = builder_for(config)
    fit_sizes(builder, points, f"delta_{quantity}")
    return builder.build()


def run_reproduce(config: RunConfig) -> ResultRecord:
    return run_target(config.target, inputs_of(config))


HANDLERS: Dict[Command, Handler] = {
    Command.ED: run_ed,
    Command.TRANSFER_CHECK: run_transfer_check,
    Command.ROOTS: run_roots,
    Command.BAE_SOLVE: run_bae_solve,
    Command.THERMO: run_thermo,
    Command.EXCITE: run_excite,
    Command.QPT_SCAN: run_qpt_scan,
    Command.SCALING: run_scaling,
    Command.TEXTURE: run_texture,
    Command.REPRODUCE: run_reproduce,
}


def run(config: RunConfig) -> ResultRecord:
    """Dispatch one validated configuration."""
    started = time.perf_counter()
    logger.info(f"Running '{config.command.value}'")
    record = HANDLERS[config.command](config)
    logger.info(f"'{config.command.value}' finished in {time.perf_counter() - started:.2f}s")
    return record
