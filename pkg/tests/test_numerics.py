import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rirsim.numerics import (
    COND_LIMIT,
    ShapeError,
    Singular,
    lu_factor,
    mat_inverse,
    mat_mul,
    mat_rank,
    mat_solve,
    pivot_condition,
    rng_stream,
    sample_cn01,
)


def fro(x):
    return float(np.linalg.norm(x))


# -- sampling ----------------------------------------------------------------

def test_sample_is_deterministic_per_seed():
    a = sample_cn01(rng_stream(1), 2, 2)
    b = sample_cn01(rng_stream(1), 2, 2)
    assert a.shape == (2, 2) and a.dtype == np.complex128
    assert np.array_equal(a, b)


def test_seed_and_stream_sensitivity():
    assert not np.array_equal(sample_cn01(rng_stream(1), 3, 4), sample_cn01(rng_stream(2), 3, 4))
    assert not np.array_equal(sample_cn01(rng_stream(1, 0), 3, 4),
                              sample_cn01(rng_stream(1, 1), 3, 4))
    assert not np.array_equal(sample_cn01(rng_stream(1, 0, 0), 3, 4),
                              sample_cn01(rng_stream(1, 0, 1), 3, 4))


def test_unit_complex_variance():
    z = sample_cn01(rng_stream(1), 1000, 1000)
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.05
    assert abs(np.var(z.real) - 0.5) < 0.01
    assert abs(np.var(z.imag) - 0.5) < 0.01
    assert abs(np.mean(z)) < 0.01
    # real and imaginary parts uncorrelated
    assert abs(np.mean(z.real * z.imag)) < 0.01


@pytest.mark.parametrize("rows,cols", [(0, 1), (1, 0), (-1, 2)])
def test_sample_rejects_empty_shapes(rows, cols):
    with pytest.raises(ShapeError):
        sample_cn01(rng_stream(0), rows, cols)


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        rng_stream(-1)


# -- products ----------------------------------------------------------------

def test_mat_mul_identity_and_zero():
    a = sample_cn01(rng_stream(4), 3, 3)
    assert np.array_equal(mat_mul(np.eye(3), a), a)
    assert np.array_equal(mat_mul(a, np.zeros((3, 2))), np.zeros((3, 2)))


def test_mat_mul_conjugate_transpose_identity():
    rng = rng_stream(7)
    a, b = sample_cn01(rng, 3, 3), sample_cn01(rng, 3, 3)
    lhs = mat_mul(a, b).conj().T
    rhs = mat_mul(b.conj().T, a.conj().T)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_mat_mul_dimension_mismatch():
    with pytest.raises(ShapeError):
        mat_mul(np.ones((2, 3)), np.ones((2, 3)))


def test_non_finite_input_rejected():
    with pytest.raises(ValueError):
        mat_mul(np.array([[np.nan]]), np.ones((1, 1)))


# -- inverse and solve -------------------------------------------------------

def test_inverse_examples():
    assert np.allclose(mat_inverse(np.eye(4)), np.eye(4), atol=0)
    assert np.allclose(mat_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-15)


def test_inverse_residual_random():
    a = sample_cn01(rng_stream(3), 5, 5)
    x = mat_inverse(a)
    assert fro(a @ x - np.eye(5)) < 1e-9


def test_solve_examples():
    rng = rng_stream(9)
    a, b = sample_cn01(rng, 4, 4), sample_cn01(rng, 4, 1)
    assert np.allclose(mat_solve(np.eye(4), b), b, atol=0)
    assert fro(mat_solve(a, a) - np.eye(4)) < 1e-9
    x = mat_solve(a, b)
    assert fro(a @ x - b) < 1e-9


def test_solve_matches_inverse_product():
    rng = rng_stream(12)
    a, b = sample_cn01(rng, 6, 6), sample_cn01(rng, 6, 3)
    assert np.max(np.abs(mat_solve(a, b) - mat_inverse(a) @ b)) < 1e-8


def test_solve_shape_errors():
    with pytest.raises(ShapeError):
        mat_solve(np.ones((2, 3)), np.ones((2, 1)))
    with pytest.raises(ShapeError):
        mat_solve(np.eye(3), np.ones((2, 1)))
    with pytest.raises(ShapeError):
        mat_inverse(np.ones((2, 3)))


def test_singular_matrices_raise():
    with pytest.raises(Singular) as info:
        mat_inverse(np.zeros((3, 3)))
    assert info.value.cond == np.inf
    rank1 = np.outer([1, 2, 3], [1, 1j, 2])
    with pytest.raises(Singular):
        mat_solve(rank1, np.ones((3, 1)))
    with pytest.raises(Singular):
        mat_inverse(np.diag([1.0, 1e-13]))


def test_condition_estimate():
    assert pivot_condition(np.eye(3)) == 1.0
    assert pivot_condition(np.diag([1.0, 1e-3])) == pytest.approx(1e3)
    assert pivot_condition(np.zeros((2, 2))) == np.inf
    _, cond = lu_factor(np.diag([1.0, 1e-11]))
    assert cond <= COND_LIMIT


def test_inputs_not_mutated():
    a = sample_cn01(rng_stream(5), 4, 4)
    b = sample_cn01(rng_stream(6), 4, 2)
    a0, b0 = a.copy(), b.copy()
    mat_solve(a, b)
    mat_inverse(a)
    mat_rank(a)
    assert np.array_equal(a, a0) and np.array_equal(b, b0)


def test_operations_are_bit_reproducible():
    a = sample_cn01(rng_stream(8), 7, 7)
    assert np.array_equal(mat_inverse(a), mat_inverse(a))


def test_random_inverse_invariant_over_seeds():
    for seed in range(50):
        a = sample_cn01(rng_stream(seed), 8, 8)
        assert fro(mat_mul(a, mat_inverse(a)) - np.eye(8)) < 1e-9


# -- rank --------------------------------------------------------------------

def test_rank_examples():
    assert mat_rank(np.eye(5)) == 5
    u, v = np.array([1, 2j, 3]), np.array([1 - 1j, 2, 0.5, 4])
    assert mat_rank(np.outer(u, v.conj())) == 1
    assert mat_rank(sample_cn01(rng_stream(11), 3, 5)) == 3
    assert mat_rank(np.zeros((3, 3))) == 0


def test_rank_generic_over_100_seeds():
    failures = 0
    for seed in range(100):
        rng = rng_stream(seed)
        r, c = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        failures += mat_rank(sample_cn01(rng, r, c), tol=1e-10) != min(r, c)
    assert failures == 0


def test_rank_of_low_rank_products():
    for seed in range(20):
        rng = rng_stream(seed, 1)
        left, right = sample_cn01(rng, 6, 2), sample_cn01(rng, 2, 5)
        assert mat_rank(left @ right) == 2


def test_rank_rejects_bad_tol():
    with pytest.raises(ValueError):
        mat_rank(np.eye(2), tol=0)


# -- properties --------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 2 ** 32 - 1), shift=st.floats(0.0, 5.0))
def test_solve_residual_property(n, seed, shift):
    rng = rng_stream(seed)
    a = sample_cn01(rng, n, n) + shift * np.eye(n)
    b = sample_cn01(rng, n, 2)
    try:
        x = mat_solve(a, b)
    except Singular:
        return
    assert fro(a @ x - b) <= 1e-9 * max(1.0, fro(a) * fro(x))


@settings(max_examples=60, deadline=None)
@given(r=st.integers(1, 8), c=st.integers(1, 8), k=st.integers(1, 8), seed=st.integers(0, 10 ** 6))
def test_rank_bounded_by_inner_dimension(r, c, k, seed):
    rng = rng_stream(seed)
    prod = sample_cn01(rng, r, k) @ sample_cn01(rng, k, c)
    assert mat_rank(prod) == min(r, c, k)
