import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from separability.conf import setting, tau_detect
from separability.services.errors import BadParams, NoSignChange, NotBipartite, TolTooSmall
from separability.services.linalg import (
    DensityMatrix, hermitian_eigenvalues, partial_transpose, realign, reduce_operator, trace_norm, vectorize,
)

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200


class Verdict(str, Enum):
    ENTANGLED = "ENTANGLED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class ParamPair:
    """Real vectors ``mu`` (length n) and ``nu`` (length m) that parametrize the Q matrix."""

    mu: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        for name in ("mu", "nu"):
            raw = getattr(self, name)
            try:
                vec = np.atleast_1d(np.asarray(raw, dtype=float)).ravel()
            except (TypeError, ValueError):
                raise BadParams(f"{name} must be a vector of real numbers, got {raw!r}.")
            if vec.size < 1:
                raise BadParams(f"{name} must have at least one entry.")
            if not np.all(np.isfinite(vec)):
                raise BadParams(f"{name} has non-finite entries.")
            vec.flags.writeable = False
            object.__setattr__(self, name, vec)

    @classmethod
    def shi(cls, alpha: float, beta: float) -> "ParamPair":
        return cls([alpha], [beta])

    @classmethod
    def sun(cls, alpha: float, beta: float, l: int) -> "ParamPair":
        if int(l) != l or l < 1:
            raise BadParams(f"Vector length l must be a positive integer, got {l}.")
        return cls(np.full(int(l), float(alpha)), np.full(int(l), float(beta)))

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def m(self) -> int:
        return self.nu.size

    def norms(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.mu)), float(np.linalg.norm(self.nu))

    def separable_bound(self) -> float:
        return float(np.sqrt((self.mu @ self.mu + 1.0) * (self.nu @ self.nu + 1.0)))

    def as_dict(self) -> dict:
        return {"mu": [float(v) for v in self.mu], "nu": [float(v) for v in self.nu]}

    def __eq__(self, other):
        if not isinstance(other, ParamPair):
            return NotImplemented
        return np.array_equal(self.mu, other.mu) and np.array_equal(self.nu, other.nu)

    def __repr__(self):
        return f"ParamPair(mu={self.mu.tolist()}, nu={self.nu.tolist()})"


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    lhs: float
    rhs: float
    tau: float
    params: ParamPair | None = None
    margin: float = field(init=False)
    verdict: Verdict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "margin", self.lhs - self.rhs)
        verdict = Verdict.ENTANGLED if self.margin > self.tau else Verdict.INCONCLUSIVE
        object.__setattr__(self, "verdict", verdict)

    @property
    def entangled(self) -> bool:
        return self.verdict is Verdict.ENTANGLED

    def as_dict(self) -> dict:
        return {
            "kind": "criterion",
            "name": self.criterion,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "margin": float(self.margin),
            "verdict": self.verdict.value,
            "tau": float(self.tau),
            "bound": None,
            "d": None,
            "vacuous": None,
            "params": self.params.as_dict() if self.params is not None else None,
        }


def require_bipartite(rho: DensityMatrix) -> tuple[int, int]:
    if rho.n_parties != 2:
        raise NotBipartite(f"Criterion needs a bipartite state, got {rho.n_parties} subsystem(s) {list(rho.dims)}.")
    return rho.dims


def marginals(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    require_bipartite(rho)
    return reduce_operator(rho.mat, rho.dims, [0]), reduce_operator(rho.mat, rho.dims, [1])


def build_q_matrix(rho: DensityMatrix, p: ParamPair) -> np.ndarray:
    d_a, d_b = require_bipartite(rho)
    rho_a, rho_b = marginals(rho)
    mu = p.mu.astype(complex)
    nu = p.nu.astype(complex)
    return np.block([
        [np.outer(mu, nu), np.outer(mu, vectorize(rho_b))],
        [np.outer(vectorize(rho_a), nu), realign(rho.mat, d_a, d_b)],
    ])


def theorem1_margin(rho: DensityMatrix, p: ParamPair, tau: float | None = None, *,
                    criterion: str = "thm1") -> CriterionReport:
    lhs = trace_norm(build_q_matrix(rho, p))
    report = CriterionReport(criterion, lhs, p.separable_bound(), tau_detect(tau), params=p)
    logger.debug("%s on %s: lhs=%.12g rhs=%.12g margin=%.3e", criterion, rho.dims, report.lhs, report.rhs,
                 report.margin)
    return report


def shi_margin(rho: DensityMatrix, alpha: float, beta: float, tau: float | None = None) -> CriterionReport:
    return theorem1_margin(rho, ParamPair.shi(alpha, beta), tau, criterion="shi")


def sun_margin(rho: DensityMatrix, alpha: float, beta: float, l: int, tau: float | None = None) -> CriterionReport:
    return theorem1_margin(rho, ParamPair.sun(alpha, beta, l), tau, criterion="sun")


def ccnr_margin(rho: DensityMatrix, tau: float | None = None) -> CriterionReport:
    d_a, d_b = require_bipartite(rho)
    return CriterionReport("ccnr", trace_norm(realign(rho.mat, d_a, d_b)), 1.0, tau_detect(tau))


def zhang_margin(rho: DensityMatrix, tau: float | None = None) -> CriterionReport:
    d_a, d_b = require_bipartite(rho)
    rho_a, rho_b = marginals(rho)
    lhs = trace_norm(realign(rho.mat - np.kron(rho_a, rho_b), d_a, d_b))
    purity_a = float(np.trace(rho_a @ rho_a).real)
    purity_b = float(np.trace(rho_b @ rho_b).real)
    rhs = float(np.sqrt(max(0.0, 1.0 - purity_a) * max(0.0, 1.0 - purity_b)))
    return CriterionReport("zhang", lhs, rhs, tau_detect(tau))


def ppt_min_eigenvalue(rho: DensityMatrix, tau: float | None = None) -> CriterionReport:
    require_bipartite(rho)
    lowest = float(hermitian_eigenvalues(partial_transpose(rho, 1)).values[-1])
    return CriterionReport("ppt", -lowest, 0.0, tau_detect(tau))


@dataclass(frozen=True)
class ThresholdResult:
    family: str
    criterion: str
    threshold: float
    bracket: tuple[float, float]
    iterations: int
    lo_report: CriterionReport
    hi_report: CriterionReport
    scan_lo: float
    scan_hi: float

    @property
    def direction(self) -> str:
        """``up`` when the ENTANGLED side is at the top of the bracket."""
        return "up" if self.hi_report.entangled else "down"

    @property
    def entangled_range(self) -> tuple[float, float]:
        return (self.threshold, self.scan_hi) if self.direction == "up" else (self.scan_lo, self.threshold)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "criterion": self.criterion,
            "threshold": float(self.threshold),
            "lo": float(self.bracket[0]),
            "hi": float(self.bracket[1]),
            "scan_lo": float(self.scan_lo),
            "scan_hi": float(self.scan_hi),
            "iterations": self.iterations,
            "direction": self.direction,
            "lo_margin": float(self.lo_report.margin),
            "hi_margin": float(self.hi_report.margin),
        }


Criterion = Callable[[DensityMatrix], CriterionReport]


def threshold_scan(family: Callable[[float], DensityMatrix], crit: Criterion, lo: float, hi: float,
                   tol: float | None = None) -> ThresholdResult:
    """Bisect ``[lo, hi]`` for the parameter where ``crit``'s verdict flips.

    The verdict is assumed monotone over the bracket; only the endpoints are checked.
    """
    tol = float(setting("SCAN_TOL") if tol is None else tol)
    if not lo < hi:
        raise BadParams(f"Scan bracket needs lo < hi, got [{lo}, {hi}].")
    floor = 64 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
    if not tol > floor:
        raise TolTooSmall(f"Tolerance {tol:g} must exceed {floor:.3e} for the bracket [{lo}, {hi}].")

    name = getattr(family, "label", getattr(family, "__name__", "family"))
    lo_report, hi_report = crit(family(lo)), crit(family(hi))
    if lo_report.verdict == hi_report.verdict:
        raise NoSignChange(
            f"{lo_report.criterion} gives {lo_report.verdict.value} at both ends of [{lo}, {hi}] for {name} "
            f"(margins {lo_report.margin:.6g}, {hi_report.margin:.6g})."
        )

    a, b = float(lo), float(hi)
    low_verdict = lo_report.verdict
    iterations = 0
    while b - a > tol and iterations < MAX_BISECTIONS:
        mid = 0.5 * (a + b)
        if crit(family(mid)).verdict == low_verdict:
            a = mid
        else:
            b = mid
        iterations += 1

    threshold = 0.5 * (a + b)
    logger.info("%s threshold for %s: %.9f after %d bisections", lo_report.criterion, name, threshold, iterations)
    return ThresholdResult(
        family=name,
        criterion=lo_report.criterion,
        threshold=threshold,
        bracket=(a, b),
        iterations=iterations,
        lo_report=lo_report,
        hi_report=hi_report,
        scan_lo=float(lo),
        scan_hi=float(hi),
    )


def criterion_closure(name: str, *, params: ParamPair | None = None, alpha: float | None = None,
                      beta: float | None = None, l: int | None = None, tau: float | None = None) -> Criterion:
    """Resolve a criterion tag into a ``rho -> CriterionReport`` callable."""
    if name == "thm1":
        if params is None:
            raise BadParams("thm1 needs mu and nu.")
        return lambda rho: theorem1_margin(rho, params, tau)
    if name == "shi":
        if alpha is None or beta is None:
            raise BadParams("shi needs alpha and beta.")
        return lambda rho: shi_margin(rho, alpha, beta, tau)
    if name == "sun":
        if alpha is None or beta is None or l is None:
            raise BadParams("sun needs alpha, beta and l.")
        return lambda rho: sun_margin(rho, alpha, beta, l, tau)
    if name == "ccnr":
        return lambda rho: ccnr_margin(rho, tau)
    if name == "zhang":
        return lambda rho: zhang_margin(rho, tau)
    if name == "ppt":
        return lambda rho: ppt_min_eigenvalue(rho, tau)
    raise BadParams(f"Unknown criterion {name!r}.")


BIPARTITE_CRITERIA: tuple[str, ...] = ("thm1", "shi", "sun", "ccnr", "zhang", "ppt")


def parse_vector(text: str | Iterable[float]) -> list[float]:
    if not isinstance(text, str):
        return [float(v) for v in text]
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise BadParams(f"Cannot parse {text!r} as a comma-separated list of numbers.")
    if not values:
        raise BadParams("Vector must have at least one entry.")
    return values
