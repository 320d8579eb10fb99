"""Kantorovich constants, dyadic decomposition, Z sequences, ratio spectra,
sandwich factors and psi caps."""

import numpy as np
import pytest

import tensormeans as tm
from tensormeans.oracles import diagonal_ratio_extremes


def random_pd(d, seed, shape=None, floor=0.1):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return tm.fold(g @ g.conj().T / d + floor * np.eye(d), shape or [d])


def test_kantorovich_known_values():
    assert tm.kantorovich(1, 2, 2) == pytest.approx(1.125, abs=1e-12)
    assert tm.kantorovich(1, 4, 2) == pytest.approx(1.5625, abs=1e-12)
    # K(1,2,3) = (7/9)^3 * 3
    assert tm.kantorovich(1, 2, 3) == pytest.approx((7.0 / 9.0) ** 3 * 3.0, abs=1e-12)


def test_kantorovich_tends_to_one():
    assert tm.kantorovich(1.0, 1.0001, 2.0) - 1.0 <= 1e-8


def test_kantorovich_validation():
    for bad in [(2, 1, 2), (0, 1, 2), (-1, 1, 2), (1, 2, 1), (1, 2, 0.5)]:
        with pytest.raises(tm.TensorError):
            tm.kantorovich(*bad)


def test_kantorovich_at_least_one_on_grid():
    for m in (0.1, 0.5, 1.0):
        for ratio in (1.5, 3.0, 10.0):
            for p in (1.5, 2.0, 4.0):
                assert tm.kantorovich(m, m * ratio, p) >= 1.0


def test_decompose_q():
    assert tm.decompose_q(1.0) == tm.DyadicDecomposition(1.0, 0, 1.0)
    assert tm.decompose_q(6.0) == tm.DyadicDecomposition(6.0, 2, 1.5)
    two = tm.decompose_q(2.0)
    assert (two.n, two.q0) == (1, 1.0)  # powers of two take the larger n
    with pytest.raises(tm.TensorError):
        tm.decompose_q(0.5)
    for q in (1.0, 1.3, 2.0, 3.7, 8.0, 11.5):
        dec = tm.decompose_q(q)
        assert 1.0 <= dec.q0 < 2.0
        assert 2.0**dec.n * dec.q0 == pytest.approx(q, rel=1e-12)


def test_z_sequence_identity_base():
    y = random_pd(4, 1, shape=[2, 2])
    zs = tm.z_sequence(tm.identity([2, 2]), y, 1)
    assert tm.frobenius_norm(zs[0] - y) <= 1e-10 * tm.frobenius_norm(y)
    assert tm.frobenius_norm(zs[1] - y @ y) <= 1e-9 * tm.frobenius_norm(y @ y)


def test_z_sequence_scalar():
    zs = tm.z_sequence(tm.from_diagonal([4.0], [1]), tm.from_diagonal([9.0], [1]), 0)
    assert tm.unfold(zs[0])[0, 0].real == pytest.approx(2.25)


def test_z_sequence_commuting_diagonal():
    x = tm.from_diagonal([1.0, 4.0], [2])
    y = tm.from_diagonal([2.0, 1.0], [2])
    zs = tm.z_sequence(x, y, 2)
    for k, z in enumerate(zs):
        expo = 2.0**k
        want = np.array([(2.0 / 1.0) ** expo, (1.0 / 4.0) ** expo])
        assert np.allclose(np.diag(tm.unfold(z)).real, want, rtol=1e-9)


def test_z_sequence_matches_direct_powers():
    x = random_pd(4, 2, shape=[4], floor=0.2)
    y = random_pd(4, 3, shape=[4], floor=0.2)
    zs = tm.z_sequence(x, y, 2)
    for k, z in enumerate(zs):
        e = 2.0 ** (k - 1)
        xm = tm.unfold(tm.power(x, -e))
        direct = xm @ tm.unfold(tm.power(y, 2.0**k)) @ xm
        assert np.linalg.norm(tm.unfold(z) - direct) <= 1e-9 * np.linalg.norm(direct)


def test_z_sequence_rescale_invariance():
    x = random_pd(4, 4, shape=[2, 2])
    y = random_pd(4, 5, shape=[2, 2])
    zs = tm.z_sequence(x, y, 1)
    zs_scaled = tm.z_sequence(3.7 * x, 3.7 * y, 1)
    for z, zs_ in zip(zs, zs_scaled):
        assert tm.frobenius_norm(z - zs_) <= 1e-9 * tm.frobenius_norm(z)


def test_ratio_spectrum_examples():
    f_pow = tm.get_connection("power", alpha=0.5)
    z = random_pd(4, 6, shape=[4], floor=0.2)
    ext = tm.ratio_spectrum(f_pow, 3.0, z)
    assert ext.min == pytest.approx(1.0, abs=1e-12)
    assert ext.max == pytest.approx(1.0, abs=1e-12)
    arith = tm.get_connection("arithmetic")
    ext = tm.ratio_spectrum(arith, 2.0, tm.from_diagonal([4.0, 1.0], [2]))
    assert ext.min == pytest.approx(1.0)
    assert ext.max == pytest.approx(1.36)
    ident = tm.identity([2])
    ext = tm.ratio_spectrum(arith, 2.0, ident)
    assert (ext.min, ext.max) == (pytest.approx(1.0), pytest.approx(1.0))


def test_ratio_spectrum_matches_diagonal_oracle():
    arith = tm.get_connection("arithmetic")
    diag = [0.3, 1.7, 5.0]
    got = tm.ratio_spectrum(arith, 2.5, tm.from_diagonal(diag, [3]))
    want = diagonal_ratio_extremes(arith, 2.5, diag)
    assert got.min == pytest.approx(want[0], rel=1e-12)
    assert got.max == pytest.approx(want[1], rel=1e-12)


def test_acute_prod():
    assert tm.acute_prod([]) == 1.0
    assert tm.acute_prod([2.0, 3.0]) == 6.0
    assert tm.acute_prod([0.5]) == 0.5


def test_sandwich_factors_power_is_exactly_one():
    f = tm.get_connection("power", alpha=0.5)
    x = random_pd(4, 7, shape=[2, 2])
    y = random_pd(4, 8, shape=[2, 2])
    for q in (0.5, 1.0, 2.0, 6.0):
        fac = tm.sandwich_factors(q, f, x, y)
        for val in (fac.lower, fac.upper, fac.composed_lower, fac.composed_upper):
            assert abs(val - 1.0) <= 1e-12


def test_sandwich_factors_q1_is_unit():
    arith = tm.get_connection("arithmetic")
    x = random_pd(4, 9, shape=[4])
    y = random_pd(4, 10, shape=[4])
    fac = tm.sandwich_factors(1.0, arith, x, y)
    assert fac.lower == pytest.approx(1.0, abs=1e-12)
    assert fac.upper == pytest.approx(1.0, abs=1e-12)


def test_sandwich_factors_commuting_example():
    arith = tm.get_connection("arithmetic")
    fac = tm.sandwich_factors(
        2.0, arith, tm.identity([2]), tm.from_diagonal([4.0, 1.0], [2])
    )
    assert fac.lower == pytest.approx(1.0)
    assert fac.upper == pytest.approx(1.36)
    assert fac.composed_upper == pytest.approx(1.36)
    assert len(fac.levels) == 2
    assert fac.levels[1].composition_power == pytest.approx(1.0)


def test_sandwich_factors_bracket_for_convex():
    arith = tm.get_connection("arithmetic")
    for seed in range(5):
        x = random_pd(4, 20 + seed, shape=[2, 2])
        y = random_pd(4, 30 + seed, shape=[2, 2])
        for q in (1.5, 2.0, 4.0):
            fac = tm.sandwich_factors(q, arith, x, y)
            assert fac.lower >= 1.0 - 1e-10
            assert fac.lower <= fac.upper
            assert fac.upper <= tm.psi_cap_product(q, arith, x, y) + 1e-10


def test_psi_cap_examples():
    f = tm.get_connection("power", alpha=0.5)
    z = random_pd(4, 11, shape=[4], floor=0.2)
    assert tm.psi_cap(3.0, f, z) == pytest.approx(1.0, abs=1e-12)
    arith = tm.get_connection("arithmetic")
    assert tm.psi_cap(2.0, arith, tm.from_diagonal([4.0, 1.0], [2])) == pytest.approx(1.36)
    assert tm.psi_cap(2.0, arith, tm.identity([2])) == pytest.approx(1.0)


def test_kantorovich_pair():
    t = tm.from_diagonal([0.5, 1.0], [2])
    pair = tm.kantorovich_pair(t, 2.0)
    assert pair.k1 == pytest.approx(1.0)  # exponent q-1 = 1 -> convention
    assert pair.k2 == pytest.approx((7.0 / 9.0) ** 3 * 3.0, rel=1e-12)
    flat = tm.kantorovich_pair(tm.identity([2]), 3.0)
    assert (flat.k1, flat.k2) == (1.0, 1.0)
    assert "degenerate" in flat.regime_note
    with pytest.raises(tm.TensorError):
        tm.kantorovich_pair(t, 0.5)
    assert pair.k1 >= 1.0 and pair.k2 >= 1.0
