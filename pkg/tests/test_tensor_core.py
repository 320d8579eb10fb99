"""Core algebra: Einstein product against the nested-loop oracle, unfolding
isomorphism, and the unit/involution laws."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import tensormeans as tm
from tensormeans.oracles import (
    naive_conjugate_transpose,
    naive_einstein_product,
    naive_inner_product,
    naive_trace,
)


def random_tensor(modes, seed, hermitian=False):
    rng = np.random.default_rng(seed)
    d = int(np.prod(modes))
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    if hermitian:
        m = (m + m.conj().T) / 2
    return tm.fold(m, modes)


def test_identity_unfold_is_eye():
    assert np.array_equal(tm.unfold(tm.identity([2])), np.eye(2))
    assert np.array_equal(tm.unfold(tm.identity([2, 3])), np.eye(6))


def test_identity_entries_are_mode_deltas():
    ident = tm.identity([2, 3])
    for i1 in range(2):
        for i2 in range(3):
            for j1 in range(2):
                for j2 in range(3):
                    want = 1.0 if (i1 == j1 and i2 == j2) else 0.0
                    assert ident.data[i1, i2, j1, j2] == want


def test_identity_is_two_sided_unit():
    x = random_tensor([2, 2], seed=5)
    ident = tm.identity([2, 2])
    assert tm.allclose(tm.einstein_product(ident, x), x, tol=1e-13)
    assert tm.allclose(tm.einstein_product(x, ident), x, tol=1e-13)


def test_zero_tensor():
    z = tm.zero([3])
    assert np.array_equal(tm.unfold(z), np.zeros((3, 3)))
    x = random_tensor([3], seed=1)
    assert tm.allclose(z + x, x, tol=0.0)
    assert tm.trace(z) == 0


def test_scalar_product_case():
    two = tm.fold(np.array([[2.0]]), [1])
    three = tm.fold(np.array([[3.0]]), [1])
    assert tm.unfold(two @ three)[0, 0] == pytest.approx(6.0)


@pytest.mark.parametrize("modes", [[2], [3], [2, 2]])
def test_einstein_product_matches_oracles(modes):
    x = random_tensor(modes, seed=10)
    y = random_tensor(modes, seed=11)
    fast = tm.einstein_product(x, y)
    slow = naive_einstein_product(x, y)
    assert np.max(np.abs(fast.data - slow)) <= 1e-13
    assert np.max(np.abs(tm.unfold(fast) - tm.unfold(x) @ tm.unfold(y))) <= 1e-13


def test_product_shape_mismatch():
    with pytest.raises(tm.ShapeMismatchError):
        tm.einstein_product(random_tensor([2], 0), random_tensor([3], 0))


def test_conjugate_transpose_definition():
    data = np.zeros((2, 2), dtype=complex)
    data[0, 1] = 1j
    x = tm.fold(data, [2])
    xh = tm.conjugate_transpose(x)
    assert xh.data[1, 0] == -1j
    real_diag = tm.from_diagonal([1.0, -2.0], [2])
    assert tm.allclose(tm.conjugate_transpose(real_diag), real_diag, tol=0.0)


def test_conjugate_transpose_is_involution():
    x = random_tensor([2, 2], seed=3)
    assert tm.allclose(tm.conjugate_transpose(tm.conjugate_transpose(x)), x, tol=0.0)
    assert np.max(np.abs(tm.conjugate_transpose(x).data - naive_conjugate_transpose(x))) == 0.0


def test_trace_values():
    assert tm.trace(tm.identity([2, 3])) == pytest.approx(6.0)
    x = random_tensor([2, 2], seed=7)
    assert tm.trace(x) == pytest.approx(naive_trace(x))


def test_trace_is_cyclic():
    x = random_tensor([2, 2], seed=8)
    y = random_tensor([2, 2], seed=9)
    lhs = tm.trace(x @ y)
    rhs = tm.trace(y @ x)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_inner_product_values():
    ident = tm.identity([2])
    assert tm.inner_product(ident, ident) == pytest.approx(2.0)
    x = random_tensor([2, 2], seed=12)
    y = random_tensor([2, 2], seed=13)
    assert tm.inner_product(x, y) == pytest.approx(naive_inner_product(x, y))
    assert tm.inner_product(x, y) == pytest.approx(np.conj(tm.inner_product(y, x)))


def test_inner_product_is_gram():
    x = random_tensor([2, 2], seed=14)
    val = tm.inner_product(x, x)
    assert abs(val.imag) <= 1e-12
    assert val.real >= 0
    assert tm.inner_product(tm.zero([2, 2]), tm.zero([2, 2])) == 0


@given(seed=st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_fold_unfold_round_trip(seed):
    x = random_tensor([2, 2], seed=seed)
    assert np.array_equal(tm.fold(tm.unfold(x), x.shape).data, x.data)


def test_unfold_is_algebra_isomorphism():
    x = random_tensor([2, 2], seed=20)
    y = random_tensor([2, 2], seed=21)
    prod = tm.unfold(tm.einstein_product(x, y))
    assert np.max(np.abs(prod - tm.unfold(x) @ tm.unfold(y))) <= 1e-12
    assert np.max(np.abs(tm.unfold(tm.conjugate_transpose(x)) - tm.unfold(x).conj().T)) == 0
    assert tm.trace(x) == pytest.approx(np.trace(tm.unfold(x)))


def test_fold_dimension_mismatch():
    with pytest.raises(tm.ShapeMismatchError):
        tm.fold(np.eye(3), [2])


def test_inverse():
    ident = tm.identity([2, 2])
    assert tm.allclose(tm.inverse(ident), ident, tol=1e-14)
    four = tm.fold(np.array([[4.0]]), [1])
    assert tm.unfold(tm.inverse(four))[0, 0] == pytest.approx(0.25)
    rng = np.random.default_rng(31)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    pd = tm.fold(g @ g.conj().T / 4 + 0.1 * np.eye(4), [2, 2])
    resid = tm.einstein_product(pd, tm.inverse(pd)) - tm.identity([2, 2])
    assert tm.frobenius_norm(resid) <= 1e-10


def test_inverse_singular_raises_with_witness():
    sing = tm.from_diagonal([1.0, 0.0], [2])
    with pytest.raises(tm.SingularTensorError) as err:
        tm.inverse(sing)
    assert err.value.smallest_singular_value == pytest.approx(0.0)


def test_hermitian_and_unitary_predicates():
    ident = tm.identity([2])
    assert tm.is_hermitian(ident) and tm.is_unitary(ident)
    refl = tm.from_diagonal([1.0, -1.0], [2])
    assert tm.is_hermitian(refl) and tm.is_unitary(refl)
    h = tm.unfold(tm.identity([2])).astype(complex)
    h[0, 1] += 1e-3j  # skew perturbation
    assert not tm.is_hermitian(tm.fold(h, [2]), tol=1e-8)


def test_entries_must_be_finite():
    bad = np.full((2, 2), np.nan, dtype=complex)
    with pytest.raises(tm.TensorError):
        tm.fold(bad, [2])


def test_shape_validation():
    with pytest.raises(tm.TensorError):
        tm.Shape((0, 2))
    with pytest.raises(tm.TensorError):
        tm.Shape(())
    assert tm.Shape((2, 3)).unfold_dim == 6
