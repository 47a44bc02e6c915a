import numpy as np
import pytest
from scipy.special import ndtr

from polarcat.channel import (AwgnSpec, RayleighSpec, bpsk, db_to_linear, discretize_rayleigh,
                              linear_to_db, make_rng, noise_variance, transmit)


def test_snr_conventions():
    assert noise_variance(0.0) == 1.0
    assert noise_variance(10.0) == pytest.approx(0.1)
    assert db_to_linear(3.0) == pytest.approx(1.9952623)
    assert linear_to_db(db_to_linear(7.5)) == pytest.approx(7.5)
    assert bpsk([0, 1]).tolist() == [1.0, -1.0]


def test_awgn_llr_moments():
    snr_db = 2.0
    s2 = noise_variance(snr_db)
    llr, realized = transmit(np.zeros(400_000, dtype=np.uint8), AwgnSpec(snr_db), 1)
    assert realized == snr_db
    # consistent Gaussian LLR: mean 2/s2, variance 4/s2
    assert llr.mean() == pytest.approx(2 / s2, rel=0.01)
    assert llr.var() == pytest.approx(4 / s2, rel=0.01)
    assert (llr < 0).mean() == pytest.approx(ndtr(-1 / np.sqrt(s2)), rel=0.03)


def test_transmit_is_seeded():
    bits = np.random.default_rng(0).integers(0, 2, 64)
    a, _ = transmit(bits, AwgnSpec(1.0), 42)
    b, _ = transmit(bits, AwgnSpec(1.0), 42)
    c, _ = transmit(bits, AwgnSpec(1.0), 43)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    with pytest.raises(ValueError):
        transmit(np.array([]), AwgnSpec(1.0), 0)


def test_child_streams_are_independent_of_order():
    x = make_rng(5, 3).random(4)
    assert np.array_equal(x, make_rng(5, 3).random(4))
    assert not np.array_equal(x, make_rng(5, 4).random(4))
    g = np.random.default_rng(1)
    assert make_rng(g) is g


def test_rayleigh_block_fading_power():
    spec = discretize_rayleigh(6.0, 8)
    rng = np.random.default_rng(11)
    snrs = np.array([transmit(np.zeros(4, dtype=np.uint8), spec, rng)[1] for _ in range(20_000)])
    lin = db_to_linear(snrs) / db_to_linear(6.0)
    assert lin.mean() == pytest.approx(1.0, rel=0.03)
    assert np.median(lin) == pytest.approx(np.log(2), rel=0.05)


def test_rayleigh_llr_scaling_within_frame():
    spec = discretize_rayleigh(20.0, 4)
    llr, snr_db = transmit(np.zeros(200_000, dtype=np.uint8), spec, 3)
    amp2 = db_to_linear(snr_db - 20.0)
    s2 = noise_variance(20.0)
    assert llr.mean() == pytest.approx(2 * amp2 / s2, rel=0.01)


def test_two_state_discretization_closed_form():
    spec = discretize_rayleigh(0.0, 2)
    means = db_to_linear(spec.state_snr_db)
    assert means[0] == pytest.approx(1 - np.log(2))
    assert means[1] == pytest.approx(1 + np.log(2))
    assert spec.state_prob == (0.5, 0.5)


@pytest.mark.parametrize("states", [1, 3, 16, 64])
def test_discretization_preserves_mean(states):
    spec = discretize_rayleigh(7.0, states)
    assert spec.states == states
    assert sum(spec.state_prob) == pytest.approx(1.0)
    mean = np.dot(spec.state_prob, db_to_linear(spec.state_snr_db))
    assert mean == pytest.approx(db_to_linear(7.0), rel=1e-9)


def test_rayleigh_spec_validation():
    with pytest.raises(ValueError):
        RayleighSpec(0.0, (1.0, 2.0), (0.5, 0.4))
    with pytest.raises(ValueError):
        RayleighSpec(0.0, (2.0, 1.0), (0.5, 0.5))
    with pytest.raises(ValueError):
        RayleighSpec(0.0, (), ())
    with pytest.raises(ValueError):
        discretize_rayleigh(0.0, 0)
