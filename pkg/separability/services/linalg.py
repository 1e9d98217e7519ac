"""
Dense complex linear algebra for density matrices.

Conventions:
  - ``vectorize`` stacks columns, so ``Vec(A)[i + m*j] == A[i, j]``.
  - ``realign`` emits one row per block, block index in column-major order, which makes
    ``realign(kron(A, B)) == outer(vectorize(A), vectorize(B))``.
  - Subsystems are indexed from 0; a density matrix on dims ``(d_0, ..., d_{n-1})`` has
    row index ``i_0 * (d_1 ... d_{n-1}) + ... + i_{n-1}`` (standard Kronecker order).
"""

import logging
from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from separability.services.errors import (
    BadPermutation, BadSubsystemIndex, ConvergenceFailure, DimMismatch, NotFinite,
    NotHermitian, NotNormalized, NotPositive, NotSquare, ShapeMismatch, TraceNotOne,
)

logger = logging.getLogger(__name__)

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumResult:
    values: np.ndarray
    vectors: np.ndarray | None = None

    def __len__(self):
        return len(self.values)

    @property
    def total(self) -> float:
        return float(np.sum(self.values))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.mat.reshape(self.dims + self.dims)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"Expected a 2-D matrix, got an array with {m.ndim} dimension(s).")
    if not np.all(np.isfinite(m)):
        raise NotFinite("Matrix has NaN or infinite entries.")
    return m


def _frozen(dims: Sequence[int], mat: np.ndarray) -> DensityMatrix:
    mat = np.array(mat, dtype=complex, copy=True)
    mat.flags.writeable = False
    return DensityMatrix(tuple(int(d) for d in dims), mat)


def _check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimMismatch(f"Subsystem dimensions must be positive integers, got {list(dims)}.")
    return dims


def validate_density(dims: Iterable[int], mat) -> DensityMatrix:
    dims = _check_dims(dims)
    mat = as_matrix(mat)
    rows, cols = mat.shape
    if rows != cols:
        raise NotSquare(f"Density matrix must be square, got {rows}x{cols}.")
    if rows != prod(dims):
        raise DimMismatch(f"Matrix side {rows} does not match product of dims {list(dims)} = {prod(dims)}.")

    herm = float(np.max(np.abs(mat - mat.conj().T)))
    if herm > HERM_TOL:
        raise NotHermitian(f"max |rho - rho^dagger| = {herm:.3e} exceeds {HERM_TOL:g}.", residual=herm)

    tr = np.trace(mat)
    tr_residual = float(abs(tr - 1.0))
    if tr_residual > TRACE_TOL:
        raise TraceNotOne(f"trace = {tr.real:.12g}, off from 1 by {tr_residual:.3e}.", residual=tr_residual)

    lowest = float(scipy.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0])
    if lowest < -PSD_TOL:
        raise NotPositive(f"minimum eigenvalue {lowest:.3e} is below -{PSD_TOL:g}.", residual=-lowest)

    return _frozen(dims, mat)


def pure_density(psi, dims: Iterable[int]) -> DensityMatrix:
    """|psi><psi| as a DensityMatrix; psi must be normalized."""
    dims = _check_dims(dims)
    psi = _check_normalized(psi)
    if psi.size != prod(dims):
        raise DimMismatch(f"State vector of length {psi.size} does not match dims {list(dims)}.")
    return _frozen(dims, np.outer(psi, psi.conj()))


def _check_normalized(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if not np.all(np.isfinite(psi)):
        raise NotFinite("State vector has NaN or infinite entries.")
    residual = abs(float(np.linalg.norm(psi)) - 1.0)
    if residual > NORM_TOL:
        raise NotNormalized(f"|psi| differs from 1 by {residual:.3e}.", residual=residual)
    return psi


def vectorize(a) -> np.ndarray:
    return as_matrix(a).reshape(-1, order="F")


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def _check_index(dims: tuple[int, ...], index: int) -> int:
    if not isinstance(index, (int, np.integer)) or not 0 <= index < len(dims):
        raise BadSubsystemIndex(f"Subsystem index {index!r} is out of range for {len(dims)} subsystem(s).")
    return int(index)


def reduce_operator(mat, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of any square operator, keeping ``keep`` in ascending order.

    An empty ``keep`` returns the full trace as a 1x1 matrix.
    """
    dims = tuple(dims)
    n = len(dims)
    keep = sorted({_check_index(dims, k) for k in keep})
    tensor = np.asarray(mat).reshape(dims + dims)

    row_labels = list(range(n))
    col_labels = [n + k if k in keep else k for k in range(n)]
    out_labels = keep + [n + k for k in keep]
    reduced = np.einsum(tensor, row_labels + col_labels, out_labels)

    side = prod(dims[k] for k in keep)
    return np.asarray(reduced).reshape(side, side)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    keep = sorted(set(keep))
    if not keep:
        raise BadSubsystemIndex("At least one subsystem must be kept.")
    for k in keep:
        _check_index(rho.dims, k)
    return _frozen([rho.dims[k] for k in keep], reduce_operator(rho.mat, rho.dims, keep))


def partial_transpose(rho: DensityMatrix, sys: int | Iterable[int]) -> np.ndarray:
    systems = [sys] if isinstance(sys, (int, np.integer)) else list(sys)
    n = rho.n_parties
    axes = list(range(2 * n))
    for k in systems:
        k = _check_index(rho.dims, k)
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return rho.tensor().transpose(axes).reshape(rho.dim, rho.dim)


def permute_operator(mat, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``j`` of the result is factor ``perm[j]`` of ``mat``."""
    dims = tuple(dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise BadPermutation(f"{perm} is not a permutation of {list(range(n))}.")
    side = prod(dims)
    tensor = np.asarray(mat).reshape(dims + dims)
    return tensor.transpose(perm + [n + p for p in perm]).reshape(side, side)


def as_bipartite(rho: DensityMatrix, cut: int = 1) -> DensityMatrix:
    """Group subsystems ``[0, cut)`` against ``[cut, n)``; the matrix itself is unchanged."""
    if not 1 <= cut < rho.n_parties:
        raise BadSubsystemIndex(f"Cut {cut} must split {rho.n_parties} subsystems into two nonempty groups.")
    if rho.n_parties == 2:
        return rho
    return DensityMatrix((prod(rho.dims[:cut]), prod(rho.dims[cut:])), rho.mat)


def realign(z, d_row: int, d_blk: int, *, d_col: int | None = None, d_blk_col: int | None = None) -> np.ndarray:
    """Realigned matrix of a ``d_row x d_col`` grid of ``d_blk x d_blk_col`` blocks.

    Square grids of square blocks are the common case (``d_col``/``d_blk_col`` default to
    ``d_row``/``d_blk``); rectangular layouts are what ``kron`` of rectangular factors gives.
    """
    z = as_matrix(z)
    d_col = d_row if d_col is None else d_col
    d_blk_col = d_blk if d_blk_col is None else d_blk_col
    if z.shape != (d_row * d_blk, d_col * d_blk_col):
        raise ShapeMismatch(
            f"Matrix of shape {z.shape} is not a {d_row}x{d_col} grid of {d_blk}x{d_blk_col} blocks."
        )
    return z.reshape(d_row, d_blk, d_col, d_blk_col).transpose(2, 0, 3, 1).reshape(d_row * d_col, d_blk * d_blk_col)


def singular_values(m) -> SpectrumResult:
    m = as_matrix(m)
    try:
        values = scipy.linalg.svdvals(m)
    except scipy.linalg.LinAlgError:
        logger.debug("gesdd did not converge on a %sx%s matrix, retrying with gesvd", *m.shape)
        try:
            values = scipy.linalg.svd(m, compute_uv=False, lapack_driver="gesvd")
        except scipy.linalg.LinAlgError as exc:
            raise ConvergenceFailure(f"SVD of a {m.shape[0]}x{m.shape[1]} matrix did not converge: {exc}",
                                     max_iter=100 * max(m.shape)) from exc
    return SpectrumResult(values=np.asarray(values, dtype=float))


def trace_norm(m) -> float:
    return singular_values(m).total


def hermitian_eigenvalues(h, *, vectors: bool = False) -> SpectrumResult:
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise NotSquare(f"Hermitian eigenproblem needs a square matrix, got {h.shape[0]}x{h.shape[1]}.")
    herm = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if herm > HERM_TOL:
        raise NotHermitian(f"max |H - H^dagger| = {herm:.3e} exceeds {HERM_TOL:g}.", residual=herm)
    sym = 0.5 * (h + h.conj().T)
    try:
        if vectors:
            values, vecs = scipy.linalg.eigh(sym)
            return SpectrumResult(values=values[::-1].copy(), vectors=vecs[:, ::-1].copy())
        values = scipy.linalg.eigvalsh(sym)
    except scipy.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"Hermitian eigensolver failed: {exc}", max_iter=100 * h.shape[0]) from exc
    return SpectrumResult(values=values[::-1].copy())


def schmidt_coefficients(psi, d_a: int, d_b: int) -> np.ndarray:
    psi = _check_normalized(psi)
    if psi.size != d_a * d_b:
        raise DimMismatch(f"State vector of length {psi.size} does not match {d_a}x{d_b}.")
    return singular_values(psi.reshape(d_a, d_b)).values ** 2
