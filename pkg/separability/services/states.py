"""
State generators: seeded random states and the named fixtures used by the CLI and the
reproduction tables.

Randomness comes from counter-based Philox streams keyed by ``(seed, call site)``, and normal
deviates are drawn with Box-Muller from 53-bit uniforms, so a seed gives the same state on
every platform regardless of how many other draws happen elsewhere.
"""

import logging
import re
from dataclasses import dataclass, field
from math import prod
from typing import Callable, Iterable

import numpy as np

from separability.services.errors import BadRank, DimMismatch, ParamOutOfRange, UnknownState
from separability.services.linalg import (
    DensityMatrix, kron, permute_operator, pure_density, validate_density,
)

logger = logging.getLogger(__name__)

SITE_PURE = 1
SITE_DENSITY = 2
SITE_SEPARABLE = 3
SITE_UNITARY = 4
SITE_BISEPARABLE = 5
SITE_OPTIMIZER = 6


def rng_stream(seed: int, site: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(site),))))


def standard_normal(gen: np.random.Generator, shape) -> np.ndarray:
    shape = tuple(shape) if isinstance(shape, (tuple, list)) else (int(shape),)
    size = prod(shape)
    half = (size + 1) // 2
    u1 = 1.0 - gen.random(half)  # (0, 1]
    u2 = gen.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:size]
    return z.reshape(shape)


def complex_normal(gen: np.random.Generator, shape) -> np.ndarray:
    return (standard_normal(gen, shape) + 1j * standard_normal(gen, shape)) / np.sqrt(2.0)


def _unit_vector(gen: np.random.Generator, size: int) -> np.ndarray:
    v = complex_normal(gen, (size,))
    return v / np.linalg.norm(v)


def _dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimMismatch(f"Subsystem dimensions must be positive integers, got {list(dims)}.")
    return dims


def random_pure(dims: Iterable[int], seed: int) -> np.ndarray:
    dims = _dims(dims)
    return _unit_vector(rng_stream(seed, SITE_PURE), prod(dims))


def random_density(dims: Iterable[int], rank: int, seed: int) -> DensityMatrix:
    """Induced-measure mixed state: ``G G^dagger / Tr`` with a ``D x rank`` Ginibre ``G``."""
    dims = _dims(dims)
    side = prod(dims)
    if not 1 <= rank <= side:
        raise BadRank(f"Rank must lie in [1, {side}], got {rank}.")
    g = complex_normal(rng_stream(seed, SITE_DENSITY), (side, rank))
    mat = g @ g.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    return validate_density(dims, mat / np.trace(mat).real)


def random_separable(dims: Iterable[int], terms: int, seed: int) -> DensityMatrix:
    """Convex mixture of ``terms`` fully product pure states with flat-Dirichlet weights."""
    dims = _dims(dims)
    if terms < 1:
        raise BadRank(f"A separable mixture needs at least one term, got {terms}.")
    gen = rng_stream(seed, SITE_SEPARABLE)
    weights = -np.log(1.0 - gen.random(terms))
    weights /= weights.sum()

    mat = np.zeros((prod(dims), prod(dims)), dtype=complex)
    for w in weights:
        term = np.ones((1, 1), dtype=complex)
        for d in dims:
            v = _unit_vector(gen, d)
            term = kron(term, np.outer(v, v.conj()))
        mat += w * term
    return validate_density(dims, mat)


def random_biseparable(dims: Iterable[int], terms: int, seed: int) -> DensityMatrix:
    """Mixture of pure states each product across a random single-party cut."""
    dims = _dims(dims)
    n = len(dims)
    if n < 2:
        raise DimMismatch("Biseparable states need at least two subsystems.")
    if terms < 1:
        raise BadRank(f"A biseparable mixture needs at least one term, got {terms}.")
    gen = rng_stream(seed, SITE_BISEPARABLE)
    weights = -np.log(1.0 - gen.random(terms))
    weights /= weights.sum()

    side = prod(dims)
    mat = np.zeros((side, side), dtype=complex)
    for w in weights:
        solo = int(gen.integers(n))
        rest = [k for k in range(n) if k != solo]
        order = [solo] + rest
        psi = np.kron(_unit_vector(gen, dims[solo]), _unit_vector(gen, prod(dims[k] for k in rest)))
        local = np.outer(psi, psi.conj())
        inverse = list(np.argsort(order))
        mat += w * permute_operator(local, [dims[k] for k in order], inverse)
    return validate_density(dims, mat)


def haar_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix, phases fixed."""
    if d < 1:
        raise DimMismatch(f"Unitary dimension must be positive, got {d}.")
    z = complex_normal(rng_stream(seed, SITE_UNITARY), (d, d))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


# Named fixtures

def _ket(dims: tuple[int, ...], *digits: int) -> np.ndarray:
    v = np.zeros(prod(dims), dtype=complex)
    v[np.ravel_multi_index(digits, dims)] = 1.0
    return v


def bell(d: int = 2) -> DensityMatrix:
    psi = sum(_ket((d, d), i, i) for i in range(d)) / np.sqrt(d)
    return pure_density(psi, (d, d))


def ghz(n: int = 3) -> DensityMatrix:
    dims = (2,) * n
    psi = (_ket(dims, *([0] * n)) + _ket(dims, *([1] * n))) / np.sqrt(2.0)
    return pure_density(psi, dims)


def w_qubit(n: int = 3) -> DensityMatrix:
    dims = (2,) * n
    psi = sum(_ket(dims, *[int(j == k) for j in range(n)]) for k in range(n)) / np.sqrt(n)
    return pure_density(psi, dims)


def horodecki_2x4(b: float) -> DensityMatrix:
    """Bound-entangled 2x4 family (PPT, entangled for 0 < b < 1)."""
    s = np.sqrt(1.0 - b * b)
    m = np.zeros((8, 8))
    for i in range(7):
        m[i, i] = b
    m[4, 4] = m[7, 7] = (1.0 + b) / 2.0
    m[4, 7] = m[7, 4] = s / 2.0
    for i, j in ((0, 5), (1, 6), (2, 7)):
        m[i, j] = m[j, i] = b
    return validate_density((2, 4), m / (7.0 * b + 1.0))


def horodecki_3x3(a: float) -> DensityMatrix:
    """Bound-entangled 3x3 family (PPT, entangled for 0 < a < 1)."""
    s = np.sqrt(1.0 - a * a)
    m = np.zeros((9, 9))
    for i in range(9):
        m[i, i] = a
    m[6, 6] = m[8, 8] = (1.0 + a) / 2.0
    m[6, 8] = m[8, 6] = s / 2.0
    for i, j in ((0, 4), (0, 8), (4, 8)):
        m[i, j] = m[j, i] = a
    return validate_density((3, 3), m / (8.0 * a + 1.0))


def example1(x: float, d: float = 0.9) -> DensityMatrix:
    """``x |psi><psi| + (1 - x) rho_d`` on 2x4, ``psi`` maximally entangled on the first 2x2 block."""
    psi = (_ket((2, 4), 0, 0) + _ket((2, 4), 1, 1)) / np.sqrt(2.0)
    mat = x * np.outer(psi, psi.conj()) + (1.0 - x) * horodecki_2x4(d).mat
    return validate_density((2, 4), mat)


def example2(p: float, t: float) -> DensityMatrix:
    """``(1 - p) I_9 / 9 + p rho_t`` with ``rho_t`` the 3x3 bound-entangled state."""
    mat = (1.0 - p) * np.eye(9) / 9.0 + p * horodecki_3x3(t).mat
    return validate_density((3, 3), mat)


def _tiles_projector_sum() -> np.ndarray:
    minus01 = (np.eye(3)[0] - np.eye(3)[1]) / np.sqrt(2.0)
    minus12 = (np.eye(3)[1] - np.eye(3)[2]) / np.sqrt(2.0)
    plus = np.ones(3) / np.sqrt(3.0)
    e = np.eye(3)
    vectors = [
        np.kron(e[0], minus01),
        np.kron(minus01, e[2]),
        np.kron(e[2], minus12),
        np.kron(minus12, e[0]),
        np.kron(plus, plus),
    ]
    total = np.zeros((9, 9), dtype=complex)
    for v in vectors:
        total += np.outer(v, v.conj())
    return total


def tiles() -> DensityMatrix:
    """Normalized projector onto the complement of the five-tile unextendible product basis."""
    return validate_density((3, 3), (np.eye(9) - _tiles_projector_sum()) / 4.0)


def tiles_noise(t: float) -> DensityMatrix:
    mat = (1.0 - t) * np.eye(9) / 9.0 + t * tiles().mat
    return validate_density((3, 3), mat)


def w_noise(q: float) -> DensityMatrix:
    """``(1 - q) I_27 / 27 + q |W><W|`` for the six-term three-qutrit W-type vector."""
    dims = (3, 3, 3)
    psi = sum(_ket(dims, *digits) for digits in ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 2), (1, 2, 1), (2, 1, 1)))
    psi = psi / np.sqrt(6.0)
    mat = q * np.outer(psi, psi.conj()) + (1.0 - q) * np.eye(27) / 27.0
    return validate_density(dims, mat)


def ghz_noise(x: float) -> DensityMatrix:
    mat = x * np.eye(8) / 8.0 + (1.0 - x) * ghz(3).mat
    return validate_density((2, 2, 2), mat)


# Registry

@dataclass(frozen=True)
class Param:
    name: str
    lo: float
    hi: float
    default: float | None = None
    integer: bool = False
    open_lo: bool = False
    open_hi: bool = False

    def check(self, value: float) -> float:
        if self.integer:
            if float(value) != int(value):
                raise ParamOutOfRange(f"Parameter {self.name}={value} must be an integer.")
            value = int(value)
        else:
            value = float(value)
        below = value <= self.lo if self.open_lo else value < self.lo
        above = value >= self.hi if self.open_hi else value > self.hi
        if below or above or not np.isfinite(value):
            left = "(" if self.open_lo else "["
            right = ")" if self.open_hi else "]"
            raise ParamOutOfRange(f"Parameter {self.name}={value} is outside {left}{self.lo}, {self.hi}{right}.")
        return value


@dataclass(frozen=True)
class BuiltinState:
    name: str
    factory: Callable[..., DensityMatrix]
    params: tuple[Param, ...] = ()
    description: str = ""

    def build(self, values: Iterable[float] = (), **named) -> DensityMatrix:
        values = list(values)
        if len(values) > len(self.params):
            raise ParamOutOfRange(f"{self.name} takes at most {len(self.params)} parameter(s), got {len(values)}.")
        kwargs = {}
        for i, param in enumerate(self.params):
            if i < len(values):
                raw = values[i]
            elif param.name in named:
                raw = named[param.name]
            elif param.default is not None:
                raw = param.default
            else:
                raise ParamOutOfRange(f"{self.name} needs a value for {param.name}.")
            kwargs[param.name] = param.check(raw)
        unknown = set(named) - {p.name for p in self.params}
        if unknown:
            raise ParamOutOfRange(f"{self.name} has no parameter(s) {sorted(unknown)}.")
        return self.factory(**kwargs)


BUILTINS: dict[str, BuiltinState] = {
    s.name: s for s in (
        BuiltinState("bell", bell, (Param("d", 2, 16, default=2, integer=True),),
                     "maximally entangled d x d state"),
        BuiltinState("ghz", ghz, (Param("n", 2, 6, default=3, integer=True),), "n-qubit GHZ state"),
        BuiltinState("w_qubit", w_qubit, (Param("n", 2, 6, default=3, integer=True),), "n-qubit W state"),
        BuiltinState("horodecki_2x4", horodecki_2x4, (Param("b", 0.0, 1.0, default=0.9, open_lo=True, open_hi=True),),
                     "2x4 bound-entangled family"),
        BuiltinState("horodecki_3x3", horodecki_3x3, (Param("a", 0.0, 1.0, default=0.5, open_lo=True, open_hi=True),),
                     "3x3 bound-entangled family"),
        BuiltinState("example1", example1, (Param("x", 0.0, 1.0), Param("d", 0.0, 1.0, default=0.9, open_lo=True,
                                                                          open_hi=True)),
                     "2x4 Bell state mixed with the 2x4 bound-entangled state"),
        BuiltinState("example2", example2, (Param("p", 0.0, 1.0), Param("t", 0.0, 1.0, open_lo=True, open_hi=True)),
                     "3x3 bound-entangled state with white noise"),
        BuiltinState("tiles", tiles, (), "five-tile UPB bound-entangled state"),
        BuiltinState("tiles_noise", tiles_noise, (Param("t", 0.0, 1.0),), "tiles state with white noise"),
        BuiltinState("w_noise", w_noise, (Param("q", 0.0, 1.0),), "three-qutrit W-type state with white noise"),
        BuiltinState("ghz_noise", ghz_noise, (Param("x", 0.0, 1.0),), "three-qubit GHZ state with white noise"),
    )
}

_BUILTIN_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def parse_builtin(text: str) -> tuple[str, list[float]]:
    """Split ``name(p1, p2)`` into the name and its positional numbers."""
    match = _BUILTIN_RE.match(text)
    if not match:
        raise UnknownState(f"Cannot parse builtin state {text!r}; expected name or name(p1, p2, ...).")
    name, args = match.group(1), match.group(2)
    values = []
    if args and args.strip():
        for token in args.split(","):
            try:
                values.append(float(token))
            except ValueError:
                raise UnknownState(f"Parameter {token.strip()!r} of {name} is not a number.")
    return name, values


def builtin_state(name: str, params: Iterable[float] = (), **named) -> DensityMatrix:
    try:
        spec = BUILTINS[name]
    except KeyError:
        raise UnknownState(f"Unknown builtin state {name!r}. Known: {', '.join(sorted(BUILTINS))}.")
    rho = spec.build(params, **named)
    logger.debug("built %s%s", name, tuple(params))
    return rho


@dataclass(frozen=True)
class StateFamily:
    """One-parameter family ``t -> rho(t)`` over a builtin, other parameters held fixed."""

    name: str
    param: Param
    fixed: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if not self.fixed:
            return self.name
        held = ", ".join(f"{k}={v:g}" for k, v in self.fixed.items())
        return f"{self.name}[{held}]"

    @property
    def param_range(self) -> tuple[float, float]:
        return self.param.lo, self.param.hi

    def __call__(self, t: float) -> DensityMatrix:
        return BUILTINS[self.name].build(**{self.param.name: t}, **self.fixed)


def state_family(name: str, **fixed) -> StateFamily:
    try:
        spec = BUILTINS[name]
    except KeyError:
        raise UnknownState(f"Unknown builtin state {name!r}. Known: {', '.join(sorted(BUILTINS))}.")
    free = [p for p in spec.params if p.name not in fixed and not p.integer]
    if not free:
        raise UnknownState(f"{name} has no free continuous parameter to scan.")
    for p in spec.params:
        if p.name in fixed:
            fixed[p.name] = p.check(fixed[p.name])
    return StateFamily(name=name, param=free[0], fixed=fixed)
