import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from mtensor import (
    DiagonalTensor,
    SparseTensor,
    apply,
    comparison_tensor,
    diag_compose,
    diag_inverse,
    identity_tensor,
    kron_identity,
    kron_rank_one,
    power_vec,
    scale_modes,
)
from mtensor.errors import DimensionMismatchError, TensorError

from conftest import brute_apply


def test_duplicates_are_summed_and_zeros_dropped():
    A = SparseTensor.from_entries(3, 2, [((1, 2, 2), 1.5), ((1, 2, 2), 2.5), ((2, 1, 1), 0.0)])
    assert A.nnz == 1
    assert A[(1, 2, 2)] == 4.0
    assert A[(2, 1, 1)] == 0.0


def test_canonical_order_makes_equality_exact():
    a = SparseTensor.from_entries(3, 2, {(2, 1, 1): 1.0, (1, 2, 2): -1.0})
    b = SparseTensor.from_entries(3, 2, [((1, 2, 2), -1.0), ((2, 1, 1), 1.0)])
    assert a == b
    assert hash(a) == hash(b)
    assert [k for k, _ in a.entries()] == [(1, 2, 2), (2, 1, 1)]


@pytest.mark.parametrize(
    "entries",
    [{(1, 2): 1.0}, {(0, 1, 1): 1.0}, {(1, 3, 1): 1.0}],
)
def test_bad_indices_rejected(entries):
    with pytest.raises(TensorError):
        SparseTensor.from_entries(3, 2, entries)


def test_non_finite_rejected():
    with pytest.raises(TensorError):
        SparseTensor.from_entries(3, 2, {(1, 1, 1): float("nan")})


def test_stored_arrays_are_read_only():
    A = identity_tensor(3, 2).to_sparse()
    with pytest.raises(ValueError):
        A.values[0] = 5.0


def test_apply_identity():
    assert_array_equal(apply(identity_tensor(3, 2), [2, 3]), [4, 9])
    assert_array_equal(apply(identity_tensor(3, 2).to_sparse(), [2, 3]), [4, 9])


def test_apply_B0(B0):
    assert_array_equal(apply(B0, [1, 1]), [3, 1])


def test_apply_all_ones_matches_brute_force(ones3):
    x = np.array([1.0, 2.0])
    assert_array_equal(brute_apply(ones3, x), [9, 9])
    assert_array_equal(apply(ones3, x), [9, 9])


def test_apply_dimension_mismatch(ones3):
    with pytest.raises(DimensionMismatchError):
        apply(ones3, [1, 2, 3])


def test_apply_random_against_brute_force():
    rng = np.random.default_rng(7)
    for m in (2, 3, 4):
        T = rng.standard_normal((3,) * m) * (rng.random((3,) * m) < 0.6)
        A = SparseTensor.from_dense(T)
        x = rng.standard_normal(3)
        assert_allclose(apply(A, x), brute_apply(A, x), rtol=1e-13, atol=1e-13)


def test_apply_is_homogeneous():
    rng = np.random.default_rng(3)
    A = SparseTensor.from_dense(rng.standard_normal((3, 3, 3, 3)))
    x = rng.standard_normal(3)
    for alpha in (0.5, 2.0, 3.0):
        assert_allclose(apply(A, alpha * x), alpha**3 * apply(A, x), rtol=1e-12, atol=1e-12)


def test_power_vec():
    assert_array_equal(power_vec([1, 1, 1], 5), [1, 1, 1])
    assert_array_equal(power_vec([2, 3], 3), [8, 27])
    assert_allclose(power_vec([8, 27], 1 / 3), [2, 3], rtol=1e-15)
    assert_array_equal(power_vec([-2, 3], 3), [-8, 27])
    with pytest.raises(TensorError):
        power_vec([-8, 27], 1 / 3)


def test_identity_tensor():
    I = identity_tensor(3, 2)
    assert dict(I.to_sparse().entries()) == {(1, 1, 1): 1.0, (2, 2, 2): 1.0}
    assert_array_equal(apply(identity_tensor(4, 3), [1, 2, 3]), [1, 8, 27])
    assert_array_equal(identity_tensor(2, 2).to_dense(), np.eye(2))


def test_comparison_tensor():
    A = SparseTensor.from_entries(3, 2, {(1, 1, 1): -2.0, (1, 2, 2): 3.0})
    M = comparison_tensor(A)
    assert M[(1, 1, 1)] == 2.0
    assert M[(1, 2, 2)] == -3.0
    assert comparison_tensor(M) == M
    Z = identity_tensor(4, 2) * 2 - kron_identity(2)
    assert comparison_tensor(Z) == Z


def test_diag_compose_and_inverse():
    A = SparseTensor.from_dense(np.random.default_rng(0).standard_normal((2, 2, 2)))
    I = identity_tensor(3, 2)
    assert diag_compose(I, A) == A
    D = DiagonalTensor.of(3, [2.0, 3.0])
    assert_array_equal(apply(diag_compose(D, identity_tensor(3, 2).to_sparse()), [1, 1]), [2, 3])
    back = diag_compose(diag_inverse(D), diag_compose(D, A))
    assert_allclose(back.to_dense(), A.to_dense(), rtol=1e-15)
    assert_array_equal(diag_inverse(DiagonalTensor.of(3, [2, 4])).diag, [0.5, 0.25])
    assert diag_inverse(I) == I
    composed = diag_compose(diag_inverse(D), D.to_sparse())
    assert composed == I


def test_diag_inverse_zero_entry():
    with pytest.raises(TensorError):
        diag_inverse(DiagonalTensor.of(3, [1.0, 0.0]))


def test_diag_compose_mismatch():
    with pytest.raises(DimensionMismatchError):
        diag_compose(DiagonalTensor.of(3, [1.0, 1.0, 1.0]), identity_tensor(3, 2).to_sparse())


def test_scale_modes():
    A = identity_tensor(3, 2).to_sparse()
    assert scale_modes(A, [1, 1]) == A
    assert_array_equal(scale_modes(A, [2, 3]).diagonal(), [4, 9])
    rng = np.random.default_rng(11)
    for _ in range(5):
        B = SparseTensor.from_dense(rng.standard_normal((3, 3, 3)))
        d, x = rng.uniform(0.5, 2, 3), rng.standard_normal(3)
        assert_allclose(apply(scale_modes(B, d), x), brute_apply(B, d * x), rtol=1e-12, atol=1e-12)


def test_kron_identity():
    J = kron_identity(2)
    assert dict(J.entries()) == {
        (1, 1, 1, 1): 1.0, (1, 1, 2, 2): 1.0, (2, 2, 1, 1): 1.0, (2, 2, 2, 2): 1.0,
    }
    assert_array_equal(apply(J, [1, 2]), [5, 10])
    assert_array_equal(apply(kron_identity(3), np.ones(3)), [3, 3, 3])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kron_identity_is_norm_times_x(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        x = rng.standard_normal(n)
        assert_allclose(apply(kron_identity(n), x), (x @ x) * x, rtol=1e-13, atol=1e-14)


def test_kron_rank_one():
    B = kron_rank_one([1, 2], [1, 1], 2)
    assert_array_equal(apply(B, [1, 1]), [8, 64])
    assert kron_rank_one([1, 2], [0, 0], 2).nnz == 0
    # dense expansion as an outer product
    a, b = np.array([1.0, 2.0]), np.array([1.0, 1.0])
    dense = np.einsum("i,j,k,l->ijkl", a**3, b, b, b)
    assert_array_equal(B.to_dense(), dense)


@pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_kron_rank_one_identity(n, k):
    rng = np.random.default_rng(10 * n + k)
    a, b = rng.uniform(0, 2, n), rng.uniform(0, 2, n)
    B = kron_rank_one(a, b, k)
    for _ in range(4):
        x = rng.standard_normal(n)
        p = 2 * k - 1
        assert_allclose(apply(B, x), a**p * (b @ x) ** p, rtol=1e-12, atol=1e-12)


def test_kron_rank_one_rejects_bad_input():
    with pytest.raises(TensorError):
        kron_rank_one([-1, 1], [1, 1], 2)
    with pytest.raises(TensorError):
        kron_rank_one([1, 1], [1, 1], 0)


def test_arithmetic_and_subtensor(B0):
    A = identity_tensor(4, 2) * 2 - B0
    assert dict(A.entries()) == {(1, 1, 2, 2): -1.0, (2, 2, 2, 2): 1.0}
    assert (A + B0) == (identity_tensor(4, 2) * 2).to_sparse()
    sub = B0.subtensor([2])
    assert sub.dim == 1 and dict(sub.entries()) == {(1, 1, 1, 1): 1.0}


def test_permute_roundtrip():
    rng = np.random.default_rng(5)
    A = SparseTensor.from_dense(rng.standard_normal((3, 3, 3)))
    perm = [3, 1, 2]
    inv = [perm.index(i) + 1 for i in (1, 2, 3)]
    P = A.permute(perm)
    assert P.permute(inv) == A
    x = rng.standard_normal(3)
    px = np.empty(3)
    px[np.array(perm) - 1] = x
    y = np.empty(3)
    y[np.array(perm) - 1] = apply(A, x)
    assert_allclose(apply(P, px), y, rtol=1e-13)


# --- properties ----------------------------------------------------------------

from hypothesis import given, settings  # noqa: E402
from hypothesis import strategies as st  # noqa: E402
from hypothesis.extra.numpy import arrays  # noqa: E402

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def dense_tensors(draw, m=None, n=None):
    m = m or draw(st.integers(2, 4))
    n = n or draw(st.integers(1, 3))
    T = draw(arrays(np.float64, (n,) * m, elements=finite))
    return SparseTensor.from_dense(T)


@settings(max_examples=80, deadline=None)
@given(data=st.data(), m=st.integers(2, 4), n=st.integers(1, 3))
def test_apply_is_linear_in_the_tensor(data, m, n):
    A = data.draw(dense_tensors(m, n))
    B = data.draw(dense_tensors(m, n))
    a, b = data.draw(finite), data.draw(finite)
    x = data.draw(arrays(np.float64, n, elements=finite))
    lhs = apply(A * a + B * b, x)
    rhs = a * apply(A, x) + b * apply(B, x)
    scale = 1 + (abs(a) + abs(b)) * 10 * n ** (m - 1) * (1 + np.abs(x).max()) ** (m - 1)
    assert_allclose(lhs, rhs, atol=1e-12 * scale)


@settings(max_examples=80, deadline=None)
@given(A=dense_tensors())
def test_comparison_is_idempotent_and_z(A):
    M = comparison_tensor(A)
    assert comparison_tensor(M) == M
    assert np.all(M.values[~M.diagonal_mask] <= 0)
    assert np.all(M.diagonal() >= 0)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_apply_commutes_with_relabeling(data):
    A = data.draw(dense_tensors())
    n = A.dim
    perm = data.draw(st.permutations(range(1, n + 1)))
    x = data.draw(arrays(np.float64, n, elements=finite))
    p0 = np.array(perm) - 1
    px = np.empty(n)
    px[p0] = x
    expected = np.empty(n)
    expected[p0] = apply(A, x)
    assert_allclose(apply(A.permute(perm), px), expected, rtol=1e-12, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_diag_inverse_undoes_compose(data):
    A = data.draw(dense_tensors())
    d = data.draw(arrays(np.float64, A.dim, elements=st.floats(0.1, 10)))
    D = DiagonalTensor(A.order, A.dim, d)
    back = diag_compose(diag_inverse(D), diag_compose(D, A))
    assert_allclose(back.to_dense(), A.to_dense(), rtol=1e-14, atol=1e-300)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_dense_roundtrip(data):
    A = data.draw(dense_tensors())
    assert SparseTensor.from_dense(A.to_dense()) == A
    assert SparseTensor.from_entries(A.order, A.dim, dict(A.entries())) == A
