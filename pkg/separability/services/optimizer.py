import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from separability.services.criteria import ParamPair, require_bipartite, theorem1_margin
from separability.services.errors import BadConfig
from separability.services.linalg import DensityMatrix
from separability.services.states import SITE_OPTIMIZER, rng_stream, standard_normal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    n: int = 2
    m: int = 2
    restarts: int = 10
    max_iters: int = 400
    init_scale: float = 1.0
    seed: int = 0
    tol: float = 1e-10
    max_evaluations: int | None = None
    warm_starts: tuple[ParamPair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise BadConfig(f"Vector lengths must be at least 1, got n={self.n}, m={self.m}.")
        if self.restarts < 1:
            raise BadConfig(f"restarts must be at least 1, got {self.restarts}.")
        if self.max_iters < 1:
            raise BadConfig(f"max_iters must be at least 1, got {self.max_iters}.")
        if not self.init_scale > 0 or not np.isfinite(self.init_scale):
            raise BadConfig(f"init_scale must be a positive finite number, got {self.init_scale}.")
        if self.seed < 0:
            raise BadConfig(f"seed must be non-negative, got {self.seed}.")
        if not self.tol > 0:
            raise BadConfig(f"tol must be positive, got {self.tol}.")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise BadConfig(f"max_evaluations must be at least 1, got {self.max_evaluations}.")
        for warm in self.warm_starts:
            if warm.n > self.n or warm.m > self.m:
                raise BadConfig(f"Warm start {warm!r} is longer than the search vectors (n={self.n}, m={self.m}).")


@dataclass(frozen=True)
class OptimizationResult:
    best: ParamPair
    margin: float
    evaluations: int
    trace: tuple[tuple[int, float], ...]
    timed_out: bool = False

    @property
    def norms(self) -> tuple[float, float]:
        return self.best.norms()

    def as_dict(self) -> dict:
        return {
            "best": self.best.as_dict(),
            "norms": list(self.norms),
            "margin": float(self.margin),
            "evaluations": self.evaluations,
            "timed_out": self.timed_out,
            "trace": [[int(i), float(v)] for i, v in self.trace],
        }


class _BudgetExhausted(Exception):
    pass


def evaluate_objective(rho: DensityMatrix, p: ParamPair) -> float:
    return theorem1_margin(rho, p).margin


class _Search:
    """Tracks the best point across restarts and enforces the evaluation budget."""

    def __init__(self, rho: DensityMatrix, cfg: OptimizerConfig):
        self.rho = rho
        self.cfg = cfg
        self.evaluations = 0
        self.best_x: np.ndarray | None = None
        self.best_margin = -np.inf
        self.trace: list[tuple[int, float]] = []

    def split(self, x: np.ndarray) -> ParamPair:
        return ParamPair(x[:self.cfg.n], x[self.cfg.n:])

    def margin(self, x: np.ndarray) -> float:
        budget = self.cfg.max_evaluations
        if budget is not None and self.evaluations >= budget:
            raise _BudgetExhausted
        value = evaluate_objective(self.rho, self.split(x))
        self.evaluations += 1
        if value > self.best_margin:
            self.best_margin = value
            self.best_x = np.array(x, dtype=float)
            self.trace.append((self.evaluations, value))
        return value

    def objective(self, x: np.ndarray) -> float:
        return -self.margin(x)


def _embed(p: ParamPair, n: int, m: int) -> np.ndarray:
    x = np.zeros(n + m)
    x[:p.n] = p.mu
    x[n:n + p.m] = p.nu
    return x


def optimize_params(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximize the realignment margin over ``(mu, nu)`` with restarted Nelder-Mead.

    Warm starts are evaluated first. Each restart perturbs the best point found so far,
    alternating between ``init_scale`` and ten times that.
    """
    cfg = cfg or OptimizerConfig()
    require_bipartite(rho)
    dim = cfg.n + cfg.m
    gen = rng_stream(cfg.seed, SITE_OPTIMIZER)
    search = _Search(rho, cfg)
    timed_out = False

    try:
        for warm in cfg.warm_starts:
            search.margin(_embed(warm, cfg.n, cfg.m))

        for r in range(cfg.restarts):
            scale = cfg.init_scale if r % 2 == 0 else 10.0 * cfg.init_scale
            step = scale * standard_normal(gen, (dim,))
            x0 = step if search.best_x is None else search.best_x + step
            simplex = np.vstack([x0, x0 + scale * np.eye(dim)])
            minimize(
                search.objective,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "maxiter": cfg.max_iters,
                    "xatol": cfg.tol,
                    "fatol": cfg.tol,
                },
            )
            search.trace.append((search.evaluations, search.best_margin))
            logger.debug("restart %d/%d: best margin %.9g after %d evaluations",
                         r + 1, cfg.restarts, search.best_margin, search.evaluations)
    except _BudgetExhausted:
        timed_out = True
        logger.warning("optimizer stopped after %d evaluations (budget exhausted)", search.evaluations)

    if search.best_x is None:
        raise BadConfig("Evaluation budget ended before any point was evaluated.")
    best = search.split(search.best_x)
    logger.info("optimized margin %.9g with |mu|=%.6g |nu|=%.6g", search.best_margin, *best.norms())
    return OptimizationResult(
        best=best,
        margin=float(search.best_margin),
        evaluations=search.evaluations,
        trace=tuple(search.trace),
        timed_out=timed_out,
    )
