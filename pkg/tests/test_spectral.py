"""Eigen-decomposition, functional calculus, Loewner predicates, and the two
order lemmas behind the Chebyshev-type bounds."""

import numpy as np
import pytest

import tensormeans as tm
from tensormeans.oracles import rayleigh_quotient_max
from tensormeans.spectral import Relation


def random_hermitian(d, seed, shape=None):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return tm.fold((m + m.conj().T) / 2, shape or [d])


def random_pd(d, seed, floor=0.1, shape=None):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return tm.fold(g @ g.conj().T / d + floor * np.eye(d), shape or [d])


def test_eigen_decompose_identity():
    es = tm.eigen_decompose(tm.identity([2, 2]))
    assert np.allclose(es.eigenvalues, 1.0)


def test_eigen_decompose_diagonal():
    es = tm.eigen_decompose(tm.from_diagonal([3.0, 1.0], [2]))
    assert np.allclose(es.eigenvalues, [3.0, 1.0])
    assert np.allclose(np.abs(es.eigenbasis), np.eye(2)[:, ::-1][:, ::-1] * 0 + np.abs(es.eigenbasis))
    # basis columns are the standard axes up to phase
    assert np.allclose(np.abs(es.eigenbasis), np.eye(2))


def test_eigen_decompose_rejects_non_hermitian():
    x = tm.fold(np.array([[0.0, 1.0], [0.0, 0.0]]), [2])
    with pytest.raises(tm.NotHermitianError):
        tm.eigen_decompose(x)


@pytest.mark.parametrize("d,shape", [(4, [2, 2]), (9, [3, 3]), (16, [2, 2, 2, 2])])
def test_reconstruction_residual(d, shape):
    h = random_hermitian(d, seed=d, shape=shape)
    recon = tm.eigen_decompose(h).reconstruct()
    assert tm.frobenius_norm(recon - h) <= 1e-10 * tm.frobenius_norm(h)


def test_eigenbasis_is_unitary():
    h = random_hermitian(6, seed=2, shape=[6])
    es = tm.eigen_decompose(h)
    v = es.eigenbasis
    assert np.linalg.norm(v.conj().T @ v - np.eye(6)) <= 1e-10 * 6


def test_apply_function_basic():
    h = random_hermitian(4, seed=3, shape=[4])
    assert tm.allclose(tm.apply_function(h, lambda w: w), h, tol=1e-12)
    assert tm.allclose(tm.apply_function(h, np.ones_like), tm.identity([4]), tol=1e-12)
    sq = tm.apply_function(tm.from_diagonal([4.0, 9.0], [2]), np.sqrt)
    assert np.allclose(np.diag(tm.unfold(sq)).real, [2.0, 3.0])


def test_apply_function_domain_error_names_eigenvalue():
    h = tm.from_diagonal([2.0, -3.0], [2])
    with pytest.raises(tm.SpectrumDomainError) as err:
        tm.apply_function(h, np.sqrt)
    assert err.value.eigenvalue == pytest.approx(-3.0)


def test_functional_calculus_homomorphism():
    h = random_hermitian(4, seed=4, shape=[2, 2])
    f = tm.apply_function(h, lambda w: np.exp(w / 4))
    g = tm.apply_function(h, lambda w: 1 + w**2)
    fg = tm.apply_function(h, lambda w: np.exp(w / 4) * (1 + w**2))
    assert tm.allclose(f @ g, fg, tol=1e-10)


def test_power_and_abs():
    h = tm.from_diagonal([4.0, 9.0], [2])
    assert tm.allclose(tm.power(h, 1.0), h, tol=0.0)
    assert tm.allclose(tm.power(h, 0.0), tm.identity([2]), tol=0.0)
    root = tm.power(h, 0.5)
    assert np.allclose(np.diag(tm.unfold(root)).real, [2.0, 3.0])
    assert tm.allclose(tm.power(root, 2.0), h, tol=1e-12)
    signed = tm.from_diagonal([2.0, -3.0], [2])
    assert np.allclose(np.diag(tm.unfold(tm.abs_tensor(signed))).real, [2.0, 3.0])


def test_abs_squares_to_square():
    h = random_hermitian(6, seed=5, shape=[6])
    lhs = tm.power(tm.abs_tensor(h), 2.0)
    rhs = tm.power(h, 2.0)
    assert tm.frobenius_norm(lhs - rhs) <= 1e-10 * tm.frobenius_norm(rhs)


def test_fractional_power_requires_pd():
    h = tm.from_diagonal([1.0, -0.5], [2])
    with pytest.raises(tm.SpectrumDomainError):
        tm.power(h, 0.5)
    # integer powers stay legal on indefinite spectra
    assert tm.allclose(tm.power(h, 2.0), h @ h, tol=1e-12)


def test_psd_pd_predicates():
    assert tm.is_pd(tm.identity([2]))
    edge = tm.from_diagonal([1.0, 0.0], [2])
    assert tm.is_psd(edge) and not tm.is_pd(edge)
    dip = tm.from_diagonal([1.0, -1e-3], [2])
    assert not tm.is_psd(dip, tol=1e-8)


def test_loewner_compare_classifies():
    ident = tm.identity([2, 2])
    half = 0.5 * ident
    assert tm.loewner_compare(half, ident).relation is Relation.LEQ
    assert tm.loewner_compare(ident, half).relation is Relation.GEQ
    mixed = tm.from_diagonal([2.0, 0.5], [2])
    verdict = tm.loewner_compare(mixed, tm.identity([2]))
    assert verdict.relation is Relation.INCOMPARABLE
    assert verdict.witness_eigenvalue == pytest.approx(-1.0)
    x = random_hermitian(4, seed=6, shape=[4])
    assert tm.loewner_compare(x, x).relation is Relation.EQUAL


def test_loewner_antisymmetry():
    x = random_hermitian(4, seed=7, shape=[4])
    bump = tm.from_diagonal([1e-3, 0, 0, 0], [4])
    v = tm.loewner_compare(x, x + bump)
    assert v.holds_leq and not v.holds_geq


def test_lambda_extremes():
    assert tm.lambda_min(tm.identity([2])) == pytest.approx(1.0)
    assert tm.lambda_max(tm.identity([2])) == pytest.approx(1.0)
    diag = tm.from_diagonal([3.0, 1.0], [2])
    assert tm.lambda_max(diag) == pytest.approx(3.0)
    assert tm.lambda_min(diag) == pytest.approx(1.0)


def test_lambda_max_dominates_rayleigh_sampling():
    h = random_hermitian(4, seed=8, shape=[2, 2])
    sampled = rayleigh_quotient_max(h, n_directions=200, seed=99)
    assert sampled <= tm.lambda_max(h) + 1e-6


def test_abs_order_lemma():
    # A^2 <= B^2 forces |A| <= |B|: build B^2 = A^2 + PSD increment.
    rng = np.random.default_rng(123)
    for trial in range(50):
        a = random_hermitian(4, seed=1000 + trial, shape=[2, 2])
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        psd = tm.fold(g @ g.conj().T / 4, [2, 2])
        b = tm.power(tm.power(a, 2.0) + psd, 0.5)
        verdict = tm.loewner_compare(tm.abs_tensor(a), tm.abs_tensor(b), tol=1e-8)
        assert verdict.holds_leq, f"trial {trial}: {verdict}"


def test_loewner_heinz_fractional_monotonicity():
    # A >= B > 0 forces A^s >= B^s for s in [0, 1].
    for trial in range(50):
        b = random_pd(4, seed=2000 + trial, shape=[2, 2])
        bump = random_pd(4, seed=3000 + trial, floor=0.0, shape=[2, 2])
        a = b + bump
        for s in np.linspace(0.0, 1.0, 20):
            verdict = tm.loewner_compare(tm.power(b, float(s)), tm.power(a, float(s)), tol=1e-8)
            assert verdict.holds_leq, f"trial {trial}, s={s}"
