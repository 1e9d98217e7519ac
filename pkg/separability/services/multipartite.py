"""
Multipartite criteria: the bipartition-averaged Q norm for tripartite states, the
genuine-entanglement test and GME-concurrence bound built on it, and the generalized
realignment matrix for n-partite full separability.

Subsystem indices are 0-based in code; bipartition labels such as ``2|13`` are 1-based.
"""

import logging
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Sequence

import numpy as np

from separability.conf import tau_detect
from separability.services.criteria import (
    Criterion, CriterionReport, ParamPair, criterion_closure, theorem1_margin,
)
from separability.services.errors import BadFamily, BadParams, DimMismatch, UnequalLocalDims
from separability.services.linalg import DensityMatrix, permute_operator, reduce_operator, trace_norm
from separability.services.measures import BoundReport

logger = logging.getLogger(__name__)

MAX_QR_PARTIES = 6


@dataclass(frozen=True)
class Bipartition:
    solo: int
    rest: tuple[int, ...]

    @classmethod
    def of(cls, solo: int, n: int = 3) -> "Bipartition":
        if not 0 <= solo < n:
            raise DimMismatch(f"Party {solo} does not exist in a {n}-party state.")
        return cls(solo, tuple(k for k in range(n) if k != solo))

    @property
    def order(self) -> tuple[int, ...]:
        return (self.solo,) + self.rest

    @property
    def label(self) -> str:
        return f"{self.solo + 1}|{''.join(str(k + 1) for k in self.rest)}"


BIPARTITIONS = tuple(Bipartition.of(i) for i in range(3))


@dataclass(frozen=True, eq=False)
class MuFamily:
    """Vectors ``mu_q .. mu_n`` for the generalized realignment; ``q`` is 1-based."""

    vectors: tuple[np.ndarray, ...]
    q: int = 1

    def __post_init__(self):
        vectors = []
        for i, raw in enumerate(self.vectors):
            vec = np.atleast_1d(np.asarray(raw, dtype=float)).ravel()
            if vec.size < 1 or not np.all(np.isfinite(vec)):
                raise BadFamily(f"mu vector {i} must be a nonempty finite real vector.")
            vec.flags.writeable = False
            vectors.append(vec)
        object.__setattr__(self, "vectors", tuple(vectors))

    def check(self, n: int):
        if n > MAX_QR_PARTIES:
            raise BadFamily(f"Generalized realignment supports at most {MAX_QR_PARTIES} parties, got {n}.")
        if not 1 <= self.q <= n - 1:
            raise BadFamily(f"Start index q={self.q} must lie in [1, {n - 1}] for {n} parties.")
        if len(self.vectors) != n - self.q + 1:
            raise BadFamily(f"Expected {n - self.q + 1} mu vectors for q={self.q} and {n} parties, "
                            f"got {len(self.vectors)}.")

    def separable_bound(self) -> float:
        return float(prod(np.sqrt(v @ v + 1.0) for v in self.vectors))

    def as_dict(self) -> dict:
        return {"q": self.q, "vectors": [[float(x) for x in v] for v in self.vectors]}


def permute_systems(rho: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Factor ``j`` of the result is factor ``perm[j]`` of ``rho``."""
    mat = permute_operator(rho.mat, rho.dims, perm)
    mat.flags.writeable = False
    return DensityMatrix(tuple(rho.dims[p] for p in perm), mat)


def _require_tripartite(rho: DensityMatrix):
    if rho.n_parties != 3:
        raise DimMismatch(f"Expected a tripartite state, got {rho.n_parties} subsystem(s) {list(rho.dims)}.")


def _equal_local_dim(rho: DensityMatrix) -> int:
    _require_tripartite(rho)
    if len(set(rho.dims)) != 1:
        raise UnequalLocalDims(f"All local dimensions must be equal, got {list(rho.dims)}.")
    return rho.dims[0]


def bipartition_view(rho: DensityMatrix, b: Bipartition) -> DensityMatrix:
    """``rho`` with ``b.solo`` moved first, regarded as bipartite ``[d_i, d_j * d_k]``."""
    _require_tripartite(rho)
    reordered = permute_systems(rho, b.order)
    return DensityMatrix((reordered.dims[0], prod(reordered.dims[1:])), reordered.mat)


def bipartition_q_norm(rho: DensityMatrix, b: Bipartition, p: ParamPair) -> float:
    return theorem1_margin(bipartition_view(rho, b), p).lhs


def _pairs(p: ParamPair, pairs: Sequence[ParamPair] | None) -> tuple[ParamPair, ...]:
    if pairs is None:
        return (p,) * 3
    if len(pairs) != 3:
        raise BadFamily(f"Need one ParamPair per bipartition (3), got {len(pairs)}.")
    return tuple(pairs)


def script_q_average(rho: DensityMatrix, p: ParamPair, pairs: Sequence[ParamPair] | None = None) -> float:
    """Mean of the three bipartition Q norms; ``pairs`` overrides ``p`` per bipartition."""
    chosen = _pairs(p, pairs)
    norms = [bipartition_q_norm(rho, b, pp) for b, pp in zip(BIPARTITIONS, chosen)]
    logger.debug("bipartition norms %s", dict(zip((b.label for b in BIPARTITIONS), norms)))
    return float(sum(norms) / 3.0)


def _biseparable_bound(d: int, chosen: Sequence[ParamPair]) -> float:
    return sum(pp.separable_bound() for pp in chosen) / 3.0 + 2.0 * (d - 1) / 3.0


def biseparability_margin(rho: DensityMatrix, p: ParamPair, tau: float | None = None, *,
                          pairs: Sequence[ParamPair] | None = None, criterion: str = "bisep") -> CriterionReport:
    """ENTANGLED here means genuinely tripartite entangled."""
    d = _equal_local_dim(rho)
    chosen = _pairs(p, pairs)
    lhs = script_q_average(rho, p, pairs)
    return CriterionReport(criterion, lhs, _biseparable_bound(d, chosen), tau_detect(tau), params=p)


def gme_concurrence_lower_bound(rho: DensityMatrix, p: ParamPair,
                                pairs: Sequence[ParamPair] | None = None) -> BoundReport:
    d = _equal_local_dim(rho)
    chosen = _pairs(p, pairs)
    q_avg = script_q_average(rho, p, pairs)
    offset = _biseparable_bound(d, chosen)
    scale = float(1.0 / np.sqrt(d * (d - 1)))
    return BoundReport("gme_concurrence", scale * (q_avg - offset), p, d, q_avg, offset, scale)


def gme_concurrence_pure(psi, dims: Sequence[int]) -> float:
    """``sqrt(min_i (1 - Tr rho_i^2))`` over the single-party marginals of a pure state."""
    dims = tuple(int(d) for d in dims)
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != prod(dims):
        raise DimMismatch(f"State vector of length {psi.size} does not match dims {list(dims)}.")
    rho = np.outer(psi, psi.conj())
    impurities = []
    for k in range(len(dims)):
        marginal = reduce_operator(rho, dims, [k])
        impurities.append(1.0 - float(np.trace(marginal @ marginal).real))
    return float(np.sqrt(max(0.0, min(impurities))))


def _qr_block(rho: DensityMatrix, head: list[int], tail: list[int], traced: set[int],
              mus: dict[int, np.ndarray]) -> np.ndarray:
    dims = rho.dims
    kept = [k for k in range(len(dims)) if k not in traced]
    reduced = reduce_operator(rho.mat, dims, kept).reshape([dims[k] for k in kept] * 2)
    row = {k: i for i, k in enumerate(kept)}
    col = {k: len(kept) + i for i, k in enumerate(kept)}

    axes, shape, mu_axes = [], [], {}

    def merged(k):
        if k in traced:
            mu_axes[len(shape)] = mus[k]
            shape.append(1)
        else:
            axes.extend([col[k], row[k]])
            shape.append(dims[k] ** 2)

    for k in head:
        axes.append(row[k])
        shape.append(dims[k])
    merged(tail[0])
    for k in head:
        axes.append(col[k])
        shape.append(dims[k])
    for k in tail[1:]:
        merged(k)

    block = reduced.transpose(axes).reshape(shape)
    for axis, mu in mu_axes.items():
        block = block * mu.reshape([mu.size if i == axis else 1 for i in range(len(shape))])
    return block


def generalized_qr(rho: DensityMatrix, fam: MuFamily) -> np.ndarray:
    """Generalized realignment matrix assembled block by block over traced-out subsets.

    Parties before ``q`` keep their matrix indices. Party ``q`` contributes the row
    coordinate ``(mu_q ; Vec(.))`` and parties ``q+1 .. n`` the column coordinates.
    """
    n = rho.n_parties
    fam.check(n)
    dims = rho.dims
    head = list(range(fam.q - 1))
    tail = list(range(fam.q - 1, n))
    mus = dict(zip(tail, fam.vectors))
    sizes = {k: mus[k].size + dims[k] ** 2 for k in tail}

    full_shape = [dims[k] for k in head] + [sizes[tail[0]]] + [dims[k] for k in head] + [sizes[k] for k in tail[1:]]
    out = np.zeros(full_shape, dtype=complex)

    for choice in product((False, True), repeat=len(tail)):
        traced = {k for k, t in zip(tail, choice) if t}

        def span(k):
            return slice(0, mus[k].size) if k in traced else slice(mus[k].size, sizes[k])

        index = ([slice(None)] * len(head) + [span(tail[0])] + [slice(None)] * len(head)
                 + [span(k) for k in tail[1:]])
        out[tuple(index)] = _qr_block(rho, head, tail, traced, mus)

    side = prod(dims[k] for k in head)
    return out.reshape(side * sizes[tail[0]], side * prod(sizes[k] for k in tail[1:]))


def full_separability_margin(rho: DensityMatrix, fam: MuFamily, tau: float | None = None) -> CriterionReport:
    """ENTANGLED here means the state is not fully separable."""
    lhs = trace_norm(generalized_qr(rho, fam))
    return CriterionReport("fullsep", lhs, fam.separable_bound(), tau_detect(tau))


MULTIPARTITE_CRITERIA: tuple[str, ...] = ("bisep", "fullsep")


def resolve_criterion(name: str, *, params: ParamPair | None = None, family: MuFamily | None = None,
                      alpha: float | None = None, beta: float | None = None, l: int | None = None,
                      tau: float | None = None) -> Criterion:
    """Like ``criteria.criterion_closure`` but also knows the multipartite tests."""
    if name == "bisep":
        if params is None:
            raise BadParams("bisep needs mu and nu.")
        return lambda rho: biseparability_margin(rho, params, tau)
    if name == "fullsep":
        if family is None:
            raise BadFamily("fullsep needs a mu family.")
        return lambda rho: full_separability_margin(rho, family, tau)
    return criterion_closure(name, params=params, alpha=alpha, beta=beta, l=l, tau=tau)
