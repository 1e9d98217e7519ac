import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from separability.services.errors import (
    BadPermutation, BadSubsystemIndex, DimMismatch, NotFinite, NotHermitian, NotNormalized,
    NotPositive, NotSquare, ShapeMismatch, TraceNotOne,
)
from separability.services.linalg import (
    as_bipartite, hermitian_eigenvalues, kron, partial_trace, partial_transpose, permute_operator,
    pure_density, realign, reduce_operator, schmidt_coefficients, singular_values, trace_norm,
    validate_density, vectorize,
)
from separability.services.states import bell, ghz, random_density

entries = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)


def test_vectorize_stacks_columns():
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(vectorize(a), [1, 3, 2, 4])


@settings(deadline=None, max_examples=200)
@given(a=arrays(np.float64, (2, 2), elements=entries), b=arrays(np.float64, (3, 3), elements=entries))
def test_realign_of_product_is_outer_product(a, b):
    r = realign(kron(a, b), 2, 3)
    assert np.allclose(r, np.outer(vectorize(a), vectorize(b)))


@settings(deadline=None, max_examples=200)
@given(a=arrays(np.float64, (2, 3), elements=entries), b=arrays(np.float64, (3, 2), elements=entries))
def test_realign_rectangular_blocks(a, b):
    r = realign(kron(a, b), 2, 3, d_col=3, d_blk_col=2)
    assert r.shape == (6, 6)
    assert np.allclose(r, np.outer(vectorize(a), vectorize(b)))


@settings(deadline=None, max_examples=200)
@given(a=arrays(np.float64, (2, 2), elements=entries), b=arrays(np.float64, (2, 2), elements=entries))
def test_trace_norm_of_realigned_product(a, b):
    expected = np.linalg.norm(a) * np.linalg.norm(b)
    assert trace_norm(realign(kron(a, b), 2, 2)) == pytest.approx(expected, abs=1e-9)


def test_realign_rejects_wrong_shape():
    with pytest.raises(ShapeMismatch):
        realign(np.eye(6), 2, 2)


def test_validate_density_errors():
    with pytest.raises(NotSquare):
        validate_density((2,), np.ones((2, 3)) / 2)
    with pytest.raises(DimMismatch):
        validate_density((2, 2), np.eye(2) / 2)
    with pytest.raises(NotHermitian) as exc:
        validate_density((2,), [[0.5, 0.1], [0.0, 0.5]])
    assert exc.value.residual == pytest.approx(0.1)
    with pytest.raises(TraceNotOne):
        validate_density((2,), np.eye(2))
    with pytest.raises(NotPositive):
        validate_density((2,), np.diag([1.5, -0.5]))
    with pytest.raises(NotFinite):
        validate_density((2,), [[np.nan, 0], [0, 0.5]])
    with pytest.raises(ShapeMismatch):
        validate_density((2,), [0.5, 0.5])


def test_validated_matrix_is_read_only():
    rho = validate_density((2,), np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1.0


def test_pure_density_requires_normalized_vector():
    with pytest.raises(NotNormalized):
        pure_density([1.0, 1.0], (2,))
    with pytest.raises(DimMismatch):
        pure_density([1.0, 0.0], (3,))


def test_partial_trace_of_product_state():
    rho_a = np.diag([0.7, 0.3])
    rho_b = np.diag([0.5, 0.25, 0.25])
    rho = validate_density((2, 3), np.kron(rho_a, rho_b))
    assert np.allclose(partial_trace(rho, [0]).mat, rho_a)
    assert np.allclose(partial_trace(rho, [1]).mat, rho_b)
    assert partial_trace(rho, [1]).dims == (3,)


def test_partial_trace_keeps_unit_trace():
    for seed in range(5):
        rho = random_density((2, 3, 2), 4, seed)
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            assert np.trace(partial_trace(rho, keep).mat).real == pytest.approx(1.0)


def test_reduce_operator_with_nothing_kept_is_the_trace():
    mat = np.diag([1.0, 2.0, 3.0, 4.0])
    assert reduce_operator(mat, (2, 2), []).shape == (1, 1)
    assert reduce_operator(mat, (2, 2), [])[0, 0] == pytest.approx(10.0)


def test_partial_trace_rejects_bad_index():
    with pytest.raises(BadSubsystemIndex):
        partial_trace(bell(), [2])
    with pytest.raises(BadSubsystemIndex):
        partial_trace(bell(), [])


def test_partial_transpose_of_bell_has_negative_eigenvalue():
    values = hermitian_eigenvalues(partial_transpose(bell(), 1)).values
    assert values[-1] == pytest.approx(-0.5)
    assert np.allclose(partial_transpose(bell(), 0), partial_transpose(bell(), 1).T)


def test_permute_operator_swaps_factors():
    a = np.arange(4.0).reshape(2, 2)
    b = np.arange(9.0).reshape(3, 3)
    assert np.allclose(permute_operator(np.kron(a, b), (2, 3), [1, 0]), np.kron(b, a))
    with pytest.raises(BadPermutation):
        permute_operator(np.kron(a, b), (2, 3), [0, 0])


def test_as_bipartite_groups_parties():
    rho = ghz(3)
    assert as_bipartite(rho, 1).dims == (2, 4)
    assert as_bipartite(rho, 2).dims == (4, 2)
    with pytest.raises(BadSubsystemIndex):
        as_bipartite(rho, 0)


def test_singular_values_and_trace_norm():
    sv = singular_values(np.diag([3.0, -1.0]))
    assert np.allclose(sv.values, [3.0, 1.0])
    assert trace_norm(np.diag([3.0, -1.0])) == pytest.approx(4.0)


def test_hermitian_eigenvalues_descending():
    spectrum = hermitian_eigenvalues(np.diag([1.0, 3.0, 2.0]), vectors=True)
    assert np.allclose(spectrum.values, [3.0, 2.0, 1.0])
    assert spectrum.vectors.shape == (3, 3)
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues([[0.0, 1.0], [0.0, 0.0]])


def test_schmidt_coefficients():
    psi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
    assert np.allclose(schmidt_coefficients(psi, 2, 2), [0.5, 0.5])
    assert np.allclose(schmidt_coefficients([1.0, 0.0, 0.0, 0.0], 2, 2), [1.0, 0.0])


@settings(deadline=None, max_examples=200)
@given(
    a=arrays(np.float64, (2, 3), elements=entries),
    b=arrays(np.float64, (3, 4), elements=entries),
    c=arrays(np.float64, (4, 2), elements=entries),
)
def test_vec_of_product_identity(a, b, c):
    assert np.allclose(vectorize(a @ b @ c), np.kron(c.T, a) @ vectorize(b), atol=1e-10)


def test_trace_norm_is_unitarily_invariant():
    from separability.services.states import complex_normal, haar_unitary, rng_stream

    for seed in range(20):
        m = complex_normal(rng_stream(seed, 99), (5, 5))
        u, v = haar_unitary(5, seed), haar_unitary(5, seed + 1000)
        assert trace_norm(u @ m @ v.conj().T) == pytest.approx(trace_norm(m), rel=1e-9)


@pytest.mark.parametrize("side", [1, 4, 17, 64])
def test_singular_values_match_gram_eigenvalues(side):
    from separability.services.states import complex_normal, rng_stream

    m = complex_normal(rng_stream(side, 98), (side, side))
    gram = hermitian_eigenvalues(m.conj().T @ m).values
    assert np.allclose(singular_values(m).values ** 2, gram, atol=1e-10 * max(1.0, gram[0]))
