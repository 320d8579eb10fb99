"""Seeded samplers: determinism, spectrum floors, conditioning, and the
ensemble moments."""

import numpy as np
import pytest

import tensormeans as tm
from tensormeans.sampling import SamplerSpec, SeedStream, sample_loewner_chain


def spec(modes=(2, 2), ensemble="wishart", floor=0.05, normalization="none", connection=None):
    return SamplerSpec(
        shape=list(modes),
        ensemble=ensemble,
        spectrum_floor=floor,
        normalization=normalization,
        connection=connection,
    )


def test_same_stream_is_bit_identical():
    s = spec()
    a = tm.sample_pd(s, SeedStream(42, 7))
    b = tm.sample_pd(s, SeedStream(42, 7))
    assert np.array_equal(a.data, b.data)
    c = tm.sample_pd(s, SeedStream(42, 8))
    assert not np.array_equal(a.data, c.data)


def test_streams_are_order_independent():
    s = spec()
    forward = [tm.sample_pd(s, SeedStream(1, i)) for i in range(5)]
    backward = [tm.sample_pd(s, SeedStream(1, i)) for i in reversed(range(5))]
    for x, y in zip(forward, reversed(backward)):
        assert np.array_equal(x.data, y.data)


@pytest.mark.parametrize("ensemble", ["wishart", "diag_uniform", "two_atom", "exp_diag"])
def test_samples_are_pd_with_floor(ensemble):
    s = spec(ensemble=ensemble, floor=0.05)
    for i in range(20):
        x = tm.sample_pd(s, SeedStream(3, i))
        assert tm.is_hermitian(x)
        assert tm.lambda_min(x) >= 0.05 - 1e-12


def test_two_atom_entries():
    s = spec(modes=(2, 2), ensemble="two_atom", floor=0.05)
    x = tm.sample_pd(s, SeedStream(5, 0))
    diag = np.diag(tm.unfold(x)).real
    assert set(np.round(diag, 12)) <= {0.05, 1.0}


def test_wishart_mean_trace():
    s = spec(modes=(2, 2), floor=0.05)
    n = 10_000
    traces = np.array(
        [tm.trace(tm.sample_pd(s, SeedStream(11, i))).real / 4 for i in range(n)]
    )
    se = traces.std(ddof=1) / np.sqrt(n)
    assert abs(traces.mean() - 1.05) <= 3 * se


def test_conditioned_pair_pins_extreme_eigenvalue():
    f = tm.get_connection("arithmetic")
    geq = spec(normalization="mean_geq_identity", connection="arithmetic")
    leq = spec(normalization="mean_leq_identity", connection="arithmetic")
    for i in range(10):
        x, y = tm.sample_pair_conditioned(geq, f, SeedStream(21, i))
        mean = tm.perspective_mean(x, y, f).value
        assert tm.lambda_min(mean) == pytest.approx(1.0, abs=1e-9)
        assert tm.loewner_compare(tm.identity(mean.shape), mean).holds_leq
        x, y = tm.sample_pair_conditioned(leq, f, SeedStream(22, i))
        mean = tm.perspective_mean(x, y, f).value
        assert tm.lambda_max(mean) == pytest.approx(1.0, abs=1e-9)
        assert tm.loewner_compare(mean, tm.identity(mean.shape)).holds_leq


def test_scalar_conditioning_divides_by_the_mean():
    f = tm.get_connection("power", alpha=0.5)
    s = spec(modes=(1,), ensemble="exp_diag", floor=0.1,
             normalization="mean_geq_identity", connection="power")
    x, y = tm.sample_pair_conditioned(s, f, SeedStream(31, 4))
    xv = tm.unfold(x)[0, 0].real
    yv = tm.unfold(y)[0, 0].real
    assert np.sqrt(xv * yv) == pytest.approx(1.0, abs=1e-12)


def test_rescaling_leaves_ratio_spectrum_unchanged():
    f = tm.get_connection("arithmetic")
    s = spec(normalization="mean_geq_identity", connection="arithmetic")
    x, y = tm.sample_pair_conditioned(s, f, SeedStream(41, 0))
    before = tm.ratio_spectrum(f, 2.0, tm.z_sequence(x, y, 0)[0])
    x2, y2 = 3.5 * x, 3.5 * y
    after = tm.ratio_spectrum(f, 2.0, tm.z_sequence(x2, y2, 0)[0])
    assert before.min == pytest.approx(after.min, rel=1e-9)
    assert before.max == pytest.approx(after.max, rel=1e-9)


def test_loewner_chain_is_ordered():
    s = spec()
    for i in range(10):
        x, y, z = sample_loewner_chain(s, SeedStream(51, i))
        assert tm.loewner_compare(x, y).holds_leq
        assert tm.loewner_compare(y, z).holds_leq


def test_conditioned_sampler_requires_mode():
    f = tm.get_connection("arithmetic")
    with pytest.raises(tm.TensorError):
        tm.sample_pair_conditioned(spec(), f, SeedStream(0, 0))


def test_spec_validation():
    with pytest.raises(tm.TensorError):
        SamplerSpec(shape=[2], ensemble="bogus")
    with pytest.raises(tm.TensorError):
        SamplerSpec(shape=[2], normalization="mean_geq_identity")
    with pytest.raises(tm.TensorError):
        SamplerSpec(shape=[2], spectrum_floor=-0.1)
