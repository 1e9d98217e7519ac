import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from separability.services.criteria import ParamPair
from separability.services.errors import DimMismatch, NotBipartite
from separability.services.linalg import pure_density, validate_density
from separability.services.measures import (
    concurrence_lower_bound, concurrence_pure, cren_lower_bound, negativity_pure, negativity_pure_schmidt,
)
from separability.services.states import bell, ghz, random_pure, tiles

seeds = st.integers(min_value=0, max_value=2**32 - 1)
vectors = st.lists(st.floats(min_value=-3.0, max_value=3.0, allow_nan=False), min_size=1, max_size=3)

BELL = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)


def test_concurrence_pure():
    assert concurrence_pure(BELL, 2, 2) == pytest.approx(1.0)
    assert concurrence_pure([1.0, 0.0, 0.0, 0.0], 2, 2) == pytest.approx(0.0)
    psi = np.array([np.sqrt(0.9), 0.0, 0.0, np.sqrt(0.1)])
    assert concurrence_pure(psi, 2, 2) == pytest.approx(0.6)


@settings(deadline=None, max_examples=25)
@given(seed=seeds, dims=st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_negativity_agrees_with_schmidt_formula(seed, dims):
    psi = random_pure(dims, seed)
    assert negativity_pure(psi, *dims) == pytest.approx(negativity_pure_schmidt(psi, *dims), abs=1e-9)


def test_negativity_of_maximally_entangled_state_is_one():
    psi = np.zeros(9)
    psi[[0, 4, 8]] = 1.0 / np.sqrt(3.0)
    assert negativity_pure(psi, 3, 3) == pytest.approx(1.0)


def test_bell_bounds_are_tight():
    p = ParamPair([1.0], [1.0])
    conc = concurrence_lower_bound(bell(), p)
    assert conc.bound == pytest.approx(1.0)
    assert conc.d == 2
    assert conc.bound == pytest.approx(conc.scale * (conc.q_norm - conc.offset))
    assert cren_lower_bound(bell(), p).bound == pytest.approx(1.0)


@settings(deadline=None, max_examples=25)
@given(seed=seeds, mu=vectors, nu=vectors)
def test_concurrence_bound_is_below_pure_concurrence(seed, mu, nu):
    psi = random_pure((2, 2), seed)
    bound = concurrence_lower_bound(pure_density(psi, (2, 2)), ParamPair(mu, nu)).bound
    assert bound <= concurrence_pure(psi, 2, 2) + 1e-9


def test_maximally_mixed_bound_is_vacuous():
    report = cren_lower_bound(validate_density((2, 2), np.eye(4) / 4), ParamPair([1.0, 1.0], [1.0]))
    assert report.vacuous
    assert report.bound < 0
    data = report.as_dict()
    assert data["kind"] == "bound"
    assert data["vacuous"] is True
    assert data["verdict"] is None


def test_tiles_bound_uses_local_dimension_three():
    report = concurrence_lower_bound(tiles(), ParamPair([1.0, 1.0], [1.0, 0.0]))
    assert report.d == 3
    assert report.scale == pytest.approx(np.sqrt(2.0 / 6.0))


def test_bounds_reject_bad_inputs():
    with pytest.raises(NotBipartite):
        concurrence_lower_bound(ghz(3), ParamPair([1.0], [1.0]))
    with pytest.raises(DimMismatch):
        cren_lower_bound(validate_density((1, 4), np.eye(4) / 4), ParamPair([1.0], [1.0]))


def test_bounds_never_exceed_pure_values():
    from separability.services.states import random_pure

    gen = np.random.default_rng(77)
    dims_choices = [(2, 2), (2, 3), (3, 3)]
    for seed in range(500):
        dims = dims_choices[seed % 3]
        psi = random_pure(dims, seed)
        rho = pure_density(psi, dims)
        p = ParamPair(gen.uniform(-3, 3, 1 + seed % 3), gen.uniform(-3, 3, 1 + seed % 2))
        assert concurrence_lower_bound(rho, p).bound <= concurrence_pure(psi, *dims) + 1e-9
        assert cren_lower_bound(rho, p).bound <= negativity_pure(psi, *dims) + 1e-9
