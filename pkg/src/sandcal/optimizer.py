"""Real-coded genetic algorithm with rank-biased triangular selection.

Each generation is the union of four blocks: elites copied verbatim,
recombined rows whose genes are drawn from triangularly sampled ranks,
freshly re-initialized rows, and blend-crossover offspring of two
rank-sampled parents.  The mutated share (recombined + re-initialized)
shrinks geometrically over the iterations, an annealing-style schedule,
while inside it the recombined share grows linearly.

All random draws come from a single seeded generator in a fixed order
(init theta; then per iteration: psi, reinit theta, parent X, parent Y,
blend theta), so a run is reproducible from its seed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constitutive import P_DIM
from .cost import DEFAULT_WEIGHTS, evaluate_population, prepare_test
from .errors import ConfigError


def round_half_up(x: float) -> int:
    """Round to nearest integer, ties away from zero (matches the
    'nearest integer' rule everywhere the GA quantizes a real)."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class GAConfig:
    n_ind: int = 500          # population size N_i
    p_dim: int = P_DIM
    n_iter: int = 100         # number of update iterations
    n_eli: int = 5            # elites copied verbatim
    n_f: float = 0.5          # mating fraction of the ranked population
    mu_in: float = 0.4        # initial mutation ratio
    mu_en: float = 0.05       # final mutation ratio
    seed: int = 0             # 0 = derive from system entropy

    def __post_init__(self):
        if self.p_dim != P_DIM:
            raise ConfigError(f"p_dim must be {P_DIM}, got {self.p_dim}")
        if self.n_ind < 2:
            raise ConfigError(f"n_ind must be >= 2, got {self.n_ind}")
        if self.n_iter < 2:
            raise ConfigError(f"n_iter must be >= 2, got {self.n_iter}")
        if not 0 <= self.n_eli < self.n_ind:
            raise ConfigError(f"n_eli must be in [0, n_ind), got {self.n_eli}")
        if not 0.0 < self.n_f <= 1.0:
            raise ConfigError(f"n_f must be in (0, 1], got {self.n_f}")
        if not 0.0 < self.mu_en <= self.mu_in <= 1.0:
            raise ConfigError(
                f"need 0 < mu_en <= mu_in <= 1, got ({self.mu_in}, {self.mu_en})")
        if round_half_up(self.mu_in * self.n_ind) + self.n_eli > self.n_ind:
            raise ConfigError("mu_in * n_ind + n_eli exceeds the population size")
        if self.n_mate_pool < 2:
            raise ConfigError(f"mating pool round(n_f*n_ind) = {self.n_mate_pool} < 2")

    @property
    def n_mate_pool(self) -> int:
        """N_f, the number of top-ranked rows allowed to mate."""
        return round_half_up(self.n_f * self.n_ind)


@dataclass(frozen=True)
class SearchDomain:
    """Componentwise box bounds of the 8 calibrated parameters, in file
    units (phi_c in degrees)."""

    p_min: np.ndarray
    p_max: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_min", np.asarray(self.p_min, dtype=float))
        object.__setattr__(self, "p_max", np.asarray(self.p_max, dtype=float))
        if self.p_min.shape != (P_DIM,) or self.p_max.shape != (P_DIM,):
            raise ConfigError(f"bounds must be {P_DIM}-vectors")
        if not np.all(self.p_min < self.p_max):
            raise ConfigError("need p_min < p_max componentwise")
        names = ("phi_c[deg]", "h_s[MPa]", "n", "e_c0", "alpha", "beta",
                 "lambda_d", "lambda_i")
        lo = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
        hi = [90.0, math.inf, 1.0, math.inf, math.inf, math.inf, 1.0, math.inf]
        for j, name in enumerate(names):
            if self.p_min[j] < lo[j] or self.p_max[j] > hi[j] or (
                    j in (0, 2, 6) and self.p_min[j] <= lo[j]):
                raise ConfigError(
                    f"bounds for {name} must lie inside ({lo[j]}, {hi[j]})")
        if self.p_min[5] < 0.0:
            raise ConfigError("beta lower bound must be >= 0")


def triangular_sample(L: float, M: float, U: float, P):
    """Inverse-CDF sample of the triangular distribution on [L, U] with
    mode M, driven by uniform variates P in [0, 1)."""
    if not (L <= M <= U) or L >= U:
        raise ConfigError(f"invalid triangular bounds L={L}, M={M}, U={U}")
    P = np.asarray(P, dtype=float)
    f = (M - L) / (U - L)
    lower = L + np.sqrt(P * (U - L) * (M - L))
    upper = U - np.sqrt((1.0 - P) * (U - L) * (U - M))
    x = np.where(P < f, lower, upper)
    return float(x) if x.ndim == 0 else x


def _rank_draw(n_draws: int, pool: int, rng) -> np.ndarray:
    """0-based rank indices from a triangular with L = M = 1, U = pool,
    rounded to nearest and clamped."""
    x = triangular_sample(1.0, 1.0, float(pool), rng.random(n_draws))
    idx = np.floor(np.asarray(x) + 0.5).astype(int)
    return np.clip(idx, 1, pool) - 1


def init_population(dom: SearchDomain, n_ind: int, rng) -> np.ndarray:
    """Uniform rows in [p_min, p_max)."""
    theta = rng.random((n_ind, P_DIM))
    return dom.p_min + theta * (dom.p_max - dom.p_min)


def mutation_schedule(cfg: GAConfig, it: int):
    """Counts (n_mut, n_com, n_ran) at 1-based iteration ``it``: the
    mutation ratio decays geometrically from mu_in to mu_en, and the
    recombined share of it grows linearly."""
    if not 1 <= it <= cfg.n_iter:
        raise ConfigError(f"iteration {it} outside [1, {cfg.n_iter}]")
    mu = cfg.mu_in * (cfg.mu_en / cfg.mu_in) ** ((it - 1) / (cfg.n_iter - 1))
    n_mut = round_half_up(mu * cfg.n_ind)
    n_com = round_half_up(n_mut * it / cfg.n_iter)
    return n_mut, n_com, n_mut - n_com


def update_population(pop: np.ndarray, class_order: np.ndarray,
                      dom: SearchDomain, cfg: GAConfig, it: int,
                      rng) -> np.ndarray:
    """One generation step: elites | recombined | re-init | crossover."""
    n_mut, n_com, n_ran = mutation_schedule(cfg, it)
    n_mat = cfg.n_ind - cfg.n_eli - n_mut
    if n_mat < 0:
        raise ConfigError(f"negative crossover count at ITER={it}")
    ranked = pop[class_order]
    blocks = [ranked[:cfg.n_eli]]
    # recombination: gene (i, j) taken from the rank psi(i, j)
    psi = np.empty((n_com, P_DIM), dtype=int)
    for j in range(P_DIM):
        psi[:, j] = _rank_draw(n_com, cfg.n_ind, rng)
    blocks.append(ranked[psi, np.arange(P_DIM)[None, :]])
    blocks.append(init_population(dom, n_ran, rng))
    # selection + blend crossover among the top n_mate_pool ranks
    x = _rank_draw(n_mat, cfg.n_mate_pool, rng)
    y = _rank_draw(n_mat, cfg.n_mate_pool, rng)
    theta = rng.random((n_mat, P_DIM))
    blocks.append(ranked[x] * theta + ranked[y] * (1.0 - theta))
    return np.concatenate(blocks, axis=0)


@dataclass
class HistoryRow:
    iteration: int
    delta_min: tuple
    delta_max: tuple
    best_cost: float
    n_feasible: int


@dataclass
class RunResult:
    best: np.ndarray              # rank-1 candidate of the final evaluation
    best_cost: float
    best_row: int                 # 0-based row of the best in the final pop
    population: np.ndarray
    costs: np.ndarray
    class_order: np.ndarray
    history: list = field(default_factory=list)
    evaluations: list = field(default_factory=list)  # (iteration, pop, costs)


def _history_row(it, costs, breakdowns, class_order) -> HistoryRow:
    feas = [b for b in breakdowns if b.feasible]
    if feas:
        mins = tuple(min(getattr(b, f"delta{i}") for b in feas) for i in (1, 2, 3))
        maxs = tuple(max(getattr(b, f"delta{i}") for b in feas) for i in (1, 2, 3))
    else:
        mins = maxs = (math.nan,) * 3
    return HistoryRow(it, mins, maxs, float(costs[class_order[0]]), len(feas))


def _eval_block(args):
    """Worker-side evaluation of a population slice (picklable helper)."""
    pop_block, tests, weights, n_step = args
    costs, breakdowns, _ = evaluate_population(pop_block, tests, weights, n_step)
    return costs, breakdowns


def run(cfg: GAConfig, dom: SearchDomain, tests, weights=DEFAULT_WEIGHTS,
        n_step: int = 100, on_iteration=None, keep_log: bool = True,
        workers: int = 1) -> RunResult:
    """Full calibration: init, n_iter evaluate/update rounds, final
    evaluation.  ``on_iteration`` is called with each HistoryRow.

    ``workers`` > 1 fans the cost evaluation out over processes by
    candidate blocks; results are gathered by row index, so the ranking
    (and hence the whole run) is identical for any worker count.
    """
    seed = None if cfg.seed == 0 else cfg.seed
    rng = np.random.default_rng(seed)
    prepared = [prepare_test(t) for t in tests]
    if workers == 0:
        workers = os.cpu_count() or 1
    executor = ProcessPoolExecutor(workers) if workers > 1 else None

    def evaluate(pop):
        if executor is None:
            return evaluate_population(pop, tests, weights, n_step, prepared=prepared)
        blocks = np.array_split(pop, workers)
        parts = executor.map(_eval_block,
                             [(b, tests, weights, n_step) for b in blocks if len(b)])
        costs_l, breakdowns = [], []
        for c, b in parts:
            costs_l.append(c)
            breakdowns.extend(b)
        costs = np.concatenate(costs_l)
        return costs, breakdowns, np.argsort(costs, kind="stable")

    pop = init_population(dom, cfg.n_ind, rng)
    result = RunResult(None, math.inf, -1, pop, None, None)
    try:
        for it in range(1, cfg.n_iter + 1):
            costs, breakdowns, class_order = evaluate(pop)
            row = _history_row(it, costs, breakdowns, class_order)
            result.history.append(row)
            if keep_log:
                result.evaluations.append((it, pop.copy(), costs.copy()))
            if on_iteration is not None:
                on_iteration(row)
            pop = update_population(pop, class_order, dom, cfg, it, rng)
        costs, breakdowns, class_order = evaluate(pop)
    finally:
        if executor is not None:
            executor.shutdown()
    row = _history_row(cfg.n_iter + 1, costs, breakdowns, class_order)
    result.history.append(row)
    if keep_log:
        result.evaluations.append((cfg.n_iter + 1, pop.copy(), costs.copy()))
    if on_iteration is not None:
        on_iteration(row)
    result.population = pop
    result.costs = costs
    result.class_order = class_order
    result.best_row = int(class_order[0])
    result.best = pop[result.best_row].copy()
    result.best_cost = float(costs[result.best_row])
    return result
