"""Global-best particle swarm on the unit box, plus an exhaustive grid search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

GRID_KEYS = ("k", "epsilon_percentile", "b", "alpha")


class ObjectiveError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PsoParams:
    c1: float = 0.5
    c2: float = 0.1
    inertia: float = 0.9
    iterations: int = 500
    swarm_size: int = 20
    seed: int = 0

    def __post_init__(self):
        if min(self.c1, self.c2, self.inertia) < 0:
            raise ValueError("PSO coefficients must be non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_score: float
    trace: np.ndarray  # global best after initialization, then after each step
    history: list[np.ndarray] = field(default_factory=list, repr=False)


def _evaluate(objective, X: np.ndarray, step: int) -> np.ndarray:
    scores = np.array([float(objective(x)) for x in X])
    bad = ~np.isfinite(scores)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ObjectiveError(f"objective returned {scores[i]} at step {step} "
                             f"for position {X[i].tolist()}")
    return scores


def optimize(objective: Callable[[np.ndarray], float], d: int, params: PsoParams,
             keep_history: bool = False) -> PsoResult:
    """Maximize ``objective`` over ``[0, 1]^d``.

    Velocities start at zero and are not clamped; positions are clipped to
    the box after every move. Random factors for a step are drawn before
    any objective call, so the trajectory depends on the seed only.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(params.seed)
    n = params.swarm_size
    x = rng.uniform(0.0, 1.0, size=(n, d))
    v = np.zeros((n, d))
    pbest = x.copy()
    pscore = _evaluate(objective, x, 0)
    g = int(np.argmax(pscore))
    gbest, gscore = pbest[g].copy(), pscore[g]
    trace = [gscore]
    history = [x.copy()] if keep_history else []
    for step in range(1, params.iterations + 1):
        r1 = rng.uniform(size=(n, d))
        r2 = rng.uniform(size=(n, d))
        v = (params.inertia * v + params.c1 * r1 * (pbest - x)
             + params.c2 * r2 * (gbest - x))
        x = np.clip(x + v, 0.0, 1.0)
        scores = _evaluate(objective, x, step)
        improved = scores > pscore
        pbest[improved] = x[improved]
        pscore[improved] = scores[improved]
        g = int(np.argmax(pscore))
        if pscore[g] > gscore:
            gbest, gscore = pbest[g].copy(), pscore[g]
        trace.append(gscore)
        if keep_history:
            history.append(x.copy())
    return PsoResult(gbest, float(gscore), np.array(trace), history)


@dataclass
class GridResult:
    best: dict
    best_score: float
    table: list[tuple[dict, float]]


def grid_points(param_grid: Mapping[str, Sequence]) -> list[dict]:
    """Every grid point, ordered by k, then epsilon, then b, then alpha."""
    missing = [key for key in GRID_KEYS if key not in param_grid]
    if missing:
        raise ValueError(f"grid is missing {missing}")
    axes = [sorted(param_grid[key]) for key in GRID_KEYS]
    if any(len(a) == 0 for a in axes):
        raise ValueError("every grid axis needs at least one value")
    return [dict(zip(GRID_KEYS, combo)) for combo in itertools.product(*axes)]


def grid_search(param_grid: Mapping[str, Sequence], evaluate: Callable[[dict], float]) -> GridResult:
    """Score every point; ties keep the earliest (smallest k, epsilon, b, alpha)."""
    table = []
    best, best_score = None, -np.inf
    for point in grid_points(param_grid):
        score = float(evaluate(point))
        table.append((point, score))
        if score > best_score:
            best, best_score = point, score
    if best is None:
        # every score was -inf or nan
        best, best_score = table[0]
    return GridResult(best, best_score, table)
