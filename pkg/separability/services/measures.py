"""
Pure-state concurrence and convex-roof negativity, and the realignment lower bounds for
mixed states.

Both mixed-state bounds are an affine function of the Q-matrix trace norm:
``bound == scale * (q_norm - offset)``. They are returned unclamped; a non-positive bound
carries no information and is flagged ``vacuous``.
"""

import logging
from dataclasses import dataclass

import numpy as np

from separability.services.criteria import ParamPair, build_q_matrix, require_bipartite
from separability.services.errors import DimMismatch
from separability.services.linalg import (
    DensityMatrix, partial_transpose, pure_density, schmidt_coefficients, trace_norm,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundReport:
    measure: str
    bound: float
    params: ParamPair
    d: int
    q_norm: float
    offset: float
    scale: float

    @property
    def vacuous(self) -> bool:
        return self.bound <= 0.0

    @property
    def margin(self) -> float:
        return self.q_norm - self.offset

    def as_dict(self) -> dict:
        return {
            "kind": "bound",
            "name": self.measure,
            "lhs": float(self.q_norm),
            "rhs": float(self.offset),
            "margin": float(self.margin),
            "verdict": None,
            "tau": None,
            "bound": float(self.bound),
            "d": self.d,
            "vacuous": self.vacuous,
            "params": self.params.as_dict(),
        }


def _local_d(dims: tuple[int, ...]) -> int:
    d = min(dims)
    if d < 2:
        raise DimMismatch(f"Entanglement measures need local dimension at least 2, got dims {list(dims)}.")
    return d


def concurrence_pure(psi, d_a: int, d_b: int) -> float:
    purity = float(np.sum(schmidt_coefficients(psi, d_a, d_b) ** 2))
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - purity))))


def negativity_pure(psi, d_a: int, d_b: int) -> float:
    d = _local_d((d_a, d_b))
    rho = pure_density(psi, (d_a, d_b))
    return (trace_norm(partial_transpose(rho, 1)) - 1.0) / (d - 1)


def negativity_pure_schmidt(psi, d_a: int, d_b: int) -> float:
    """Same quantity as ``negativity_pure`` from the Schmidt sum ``2/(d-1) sum_{i<j} sqrt(l_i l_j)``."""
    d = _local_d((d_a, d_b))
    roots = np.sqrt(np.clip(schmidt_coefficients(psi, d_a, d_b), 0.0, None))
    return float((roots.sum() ** 2 - 1.0) / (d - 1))


def _q_norm(rho: DensityMatrix, p: ParamPair) -> float:
    return trace_norm(build_q_matrix(rho, p))


def concurrence_lower_bound(rho: DensityMatrix, p: ParamPair) -> BoundReport:
    d = _local_d(require_bipartite(rho))
    q_norm = _q_norm(rho, p)
    offset = p.separable_bound()
    scale = float(np.sqrt(2.0) / np.sqrt(d * (d - 1)))
    bound = scale * (q_norm - offset)
    logger.debug("concurrence bound on %s: %.9g (q_norm=%.12g)", rho.dims, bound, q_norm)
    return BoundReport("concurrence", bound, p, d, q_norm, offset, scale)


def cren_lower_bound(rho: DensityMatrix, p: ParamPair) -> BoundReport:
    d = _local_d(require_bipartite(rho))
    q_norm = _q_norm(rho, p)
    offset = p.separable_bound()
    scale = 1.0 / (d - 1)
    bound = scale * (q_norm - offset)
    logger.debug("CREN bound on %s: %.9g (q_norm=%.12g)", rho.dims, bound, q_norm)
    return BoundReport("cren", bound, p, d, q_norm, offset, scale)
