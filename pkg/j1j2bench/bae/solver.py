"""
Newton iteration with homotopy continuation in the inhomogeneities.

theta_j(eps) = (-1)^j a + i * eps * delta_j. The solve starts at eps = 1 where all
theta_j are distinct, descends along eps = 1, 1/2, 1/4, ..., then reaches eps = 0 by
extrapolation and a polish on the confluent system.
"""

import logging
import time
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg

from j1j2bench.bae.system import BaeSystem, ConfluentSystem, Evaluation
from j1j2bench.config import settings
from j1j2bench.errors import ConfigError, NewtonDivergenceError, NumericalError, RootCollisionError
from j1j2bench.models.schemas import (
    HomotopyPath,
    HomotopyStep,
    ModelParams,
    PatternSeed,
    ZeroRootSet,
)
from j1j2bench.transfer.roots import build_root_set, pairing_defect, strip_distance
from j1j2bench.transfer.transfer import homotopy_deltas, perturbed_theta

logger = logging.getLogger(__name__)

Evaluator = Callable[..., Evaluation]


def newton(
    evaluate: Evaluator,
    x0: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[np.ndarray, List[float], np.ndarray]:
    """
    Damped Newton iteration on a square complex system.

    Each step is halved until the residual (scaled with the offsets of the current
    iterate) decreases.

    Returns:
        (solution, residual history, Jacobian at the solution)

    Raises:
        NewtonDivergenceError: no decrease after newton_max_halvings halvings, or the
            iteration budget is exhausted
    """
    tol = tol or settings.newton_tol
    max_iter = max_iter or settings.newton_max_iter
    x = np.asarray(x0, dtype=complex).copy()
    r, J, m = evaluate(x)
    history = [float(np.max(np.abs(r)))]
    for iteration in range(max_iter):
        if history[-1] < tol:
            return x, history, J
        try:
            dx = scipy.linalg.solve(J, -r)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise NewtonDivergenceError(f"singular Jacobian: {e}", {"iteration": iteration}) from e
        step = 1.0
        current = history[-1]
        for _ in range(settings.newton_max_halvings):
            trial = x + step * dx
            try:
                r_trial = evaluate(trial, m)[0]
            except NumericalError:
                r_trial = None
            if r_trial is not None and np.all(np.isfinite(r_trial)):
                if float(np.max(np.abs(r_trial))) < (1 - 1e-4 * step) * current:
                    break
            step /= 2
        else:
            raise NewtonDivergenceError(
                "step damping exhausted",
                {"iteration": iteration, "residual": current},
            )
        x = trial
        r, J, m = evaluate(x)
        history.append(float(np.max(np.abs(r))))
        logger.debug(f"Newton iter {iteration + 1}: residual {history[-1]:.3e} (step {step:g})")
    if history[-1] < tol:
        return x, history, J
    raise NewtonDivergenceError(
        f"no convergence in {max_iter} iterations",
        {"residual": history[-1], "history": history[-5:]},
    )


def converges_quadratically(history: List[float], floor: float = 1e-14) -> bool:
    """Residual ratio below 0.1 over the last three steps above round-off."""
    tail = [r for r in history if r > floor]
    ratios = [b / a for a, b in zip(tail, tail[1:])][-3:]
    return all(ratio < 0.1 for ratio in ratios)


def check_collisions(z: np.ndarray, epsilon: float) -> None:
    """Reject a continuation step where two roots meet."""
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            distance = strip_distance(z[i], z[j])
            if distance < settings.collision_tol:
                raise RootCollisionError(
                    f"roots {i + 1} and {j + 1} collide at eps={epsilon:g}",
                    {"epsilon": epsilon, "distance": distance},
                )


class HomotopySolver:
    """Continuation of one BAE solution from eps = 1 to the staggered limit."""

    def __init__(self, p: ModelParams):
        self.p = p
        self.deltas = homotopy_deltas(p)
        self.path = HomotopyPath(deltas=self.deltas.tolist())

    def _step(self, epsilon: float, x0: np.ndarray) -> Tuple[np.ndarray, HomotopyStep]:
        system = BaeSystem(self.p, perturbed_theta(self.p, epsilon))
        x, history, J = newton(system.evaluate, x0)
        check_collisions(x[1:], epsilon)
        step = HomotopyStep(
            epsilon=epsilon,
            roots=x[1:].copy(),
            log_lambda0_sq=complex(x[0]),
            residual=history[-1],
            iterations=len(history) - 1,
            condition=float(np.linalg.cond(J)),
            pairing_defect=pairing_defect(x[1:]),
        )
        return x, step

    def _record(self, step: HomotopyStep) -> None:
        self.path.schedule.append(step.epsilon)
        self.path.steps.append(step)
        logger.debug(
            f"eps={step.epsilon:.3e}: residual {step.residual:.2e}, cond {step.condition:.2e}, "
            f"{step.iterations} iterations"
        )

    def start(self, seed_roots: np.ndarray) -> np.ndarray:
        """Newton at eps = 1 from the seed, translated by i * mean(delta)."""
        z0 = seed_roots + 1j * float(np.mean(self.deltas))
        system = BaeSystem(self.p, perturbed_theta(self.p, 1.0))
        x0 = np.concatenate([[system.initial_log_lambda0_sq(z0)], z0])
        x, step = self._step(1.0, x0)
        self._record(step)
        self.path.residual_history = [step.residual]
        return x

    def descend(self, x: np.ndarray) -> List[Tuple[float, np.ndarray]]:
        """
        Follow eps = 1/2, 1/4, ... until the depth is reached or the Jacobian
        becomes too ill-conditioned to trust.
        """
        visited = [(1.0, x)]
        targets = [2.0 ** -k for k in range(1, settings.homotopy_depth + 1)]
        for target in targets:
            eps, x_now = self._advance(visited, target)
            visited.append((eps, x_now))
            if self.path.steps[-1].condition > settings.bae_condition_limit:
                logger.debug(f"Stopping descent at eps={eps:.3e}: Jacobian condition too large")
                break
        return visited

    def _advance(self, visited: List[Tuple[float, np.ndarray]], target: float) -> Tuple[float, np.ndarray]:
        """Reach target from the last visited point, bisecting on failure."""
        refinements = 0
        while True:
            eps_prev, x_prev = visited[-1]
            goal = target
            while True:
                try:
                    x_guess = self._predict(visited, goal)
                    x_new, step = self._step(goal, x_guess)
                    break
                except (NewtonDivergenceError, RootCollisionError) as e:
                    refinements += 1
                    self.path.refinements += 1
                    if refinements > settings.homotopy_max_refinements:
                        raise NewtonDivergenceError(
                            f"continuation failed between eps={eps_prev:g} and {target:g}: {e.message}",
                            {"epsilon": eps_prev, "target": target, **e.diagnostics},
                        ) from e
                    goal = 0.5 * (eps_prev + goal)
                    logger.warning(f"Refining homotopy schedule: trying eps={goal:.4e}")
            self._record(step)
            if goal == target:
                return goal, x_new
            visited.append((goal, x_new))

    @staticmethod
    def _predict(visited: List[Tuple[float, np.ndarray]], eps: float) -> np.ndarray:
        """Linear extrapolation in eps from the last two points."""
        if len(visited) < 2:
            return visited[-1][1]
        (e1, x1), (e2, x2) = visited[-2], visited[-1]
        return x2 + (x2 - x1) * (eps - e2) / (e2 - e1)

    def close(self, visited: List[Tuple[float, np.ndarray]]) -> np.ndarray:
        """Quadratic extrapolation to eps = 0 and polish on the confluent system."""
        points = visited[-3:]
        eps = [e for e, _ in points]
        guess = np.zeros_like(points[-1][1])
        for i, (e_i, x_i) in enumerate(points):
            weight = 1.0
            for j, e_j in enumerate(eps):
                if j != i:
                    weight *= (0.0 - e_j) / (e_i - e_j)
            guess = guess + weight * x_i
        self.path.extrapolated = True
        confluent = ConfluentSystem(self.p)
        x, history, _ = newton(confluent.evaluate, guess)
        check_collisions(x[1:], 0.0)
        self.path.residual_history = history
        self.path.schedule.append(0.0)
        return x


def solve_with_path(seed: PatternSeed, p: ModelParams) -> Tuple[ZeroRootSet, HomotopyPath]:
    """
    Solve the BAEs at the staggered inhomogeneities from a pattern seed.

    Raises:
        ConfigError: if the seed does not carry 2N-1 roots
        NewtonDivergenceError, RootCollisionError: continuation failed
    """
    if seed.root_count != p.two_n - 1:
        raise ConfigError(
            f"seed has {seed.root_count} roots, expected {p.two_n - 1}",
            {"composition": seed.composition()},
        )
    started = time.perf_counter()
    solver = HomotopySolver(p)
    x = solver.start(seed.positions(p))
    visited = solver.descend(x)
    x = solver.close(visited)

    final = BaeSystem(p, p.staggered_theta)
    residual = float(np.max(np.abs(final.residual(x))))
    if residual > settings.newton_tol:
        raise NumericalError(
            "staggered-limit residual above tolerance",
            {"residual": residual, "confluent_history": solver.path.residual_history},
        )
    zrs = build_root_set(np.sqrt(np.exp(x[0])), x[1:], p)
    logger.info(
        f"BAE solved at 2N={p.two_n}: {len(solver.path.steps)} continuation steps, "
        f"{solver.path.refinements} refinements, residual {residual:.1e}, "
        f"{time.perf_counter() - started:.2f}s"
    )
    return zrs, solver.path


def solve(seed: PatternSeed, p: ModelParams) -> ZeroRootSet:
    """Zero roots of the BAE solution reached from a seed."""
    return solve_with_path(seed, p)[0]
