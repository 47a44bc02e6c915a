import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarcat.analysis import (Scenario, analyze_scheme, fsr_fec_assisted, fsr_lower_bound,
                               fsr_sc_baseline, info_eps, log_p_x, p_x, throughput,
                               throughput_fading)
from polarcat.bch import UsageError, bch_codes, bch_construct
from polarcat.channel import discretize_rayleigh
from polarcat.frame import ConcatenatedScheme
from polarcat.polar import ga_analyze, polar_construct


def p_x_brute(eps, n, t):
    total = 0.0
    for pattern in itertools.product([0, 1], repeat=n):
        w = sum(pattern)
        if w <= t:
            total += eps ** w * (1 - eps) ** (n - w)
    return total


def test_p_x_reference_value():
    assert p_x(0.1, 7, 1) == pytest.approx(0.8503056, abs=1e-7)


@given(st.floats(0.0, 1.0), st.integers(0, 7))
def test_p_x_matches_enumeration(eps, t):
    assert p_x(eps, 7, t) == pytest.approx(p_x_brute(eps, 7, t), abs=1e-12)


def test_p_x_edges():
    assert p_x(0.3, 7, 7) == 1.0
    assert p_x(0.0, 15, 2) == 1.0
    assert p_x(0.2, 15, 0) == pytest.approx(0.8 ** 15)
    assert np.allclose(p_x(np.array([0.1, 0.2]), 7, 1), [p_x(0.1, 7, 1), p_x(0.2, 7, 1)])
    with pytest.raises(UsageError):
        p_x(0.1, 7, 8)
    # tiny eps stays accurate in the log domain
    assert log_p_x(1e-12, 511, 1) == pytest.approx(-math.comb(511, 2) * 1e-24, rel=1e-3)


def test_fsr_is_product_over_info_channels():
    s = ConcatenatedScheme(polar_construct(8, 5, 3.0), bch_construct(4, 2), 2)
    eps = info_eps(s)
    ref = np.prod([sum(math.comb(15, j) * e ** j * (1 - e) ** (15 - j) for j in range(3))
                   for e in eps]) ** 2
    assert fsr_fec_assisted(s, eps) == pytest.approx(ref, rel=1e-12)
    assert info_eps(s).tolist() == ga_analyze(8, 3.0)[1][s.polar.info_positions].tolist()
    with pytest.raises(UsageError):
        fsr_fec_assisted(s, eps[:-1])


def test_sc_baseline_formula():
    s = ConcatenatedScheme(polar_construct(16, 8, 4.0), bch_construct(5, 1), 1)
    eps = info_eps(s)
    assert fsr_sc_baseline(s, eps) == pytest.approx(np.prod(1 - eps) ** 31, rel=1e-12)


def test_lower_bound_on_random_schemes():
    rng = np.random.default_rng(2024)
    codes = [c for m in range(3, 8) for c in bch_codes(m)]
    for _ in range(1000):
        n_p = int(2 ** rng.integers(1, 9))
        k_p = int(rng.integers(1, n_p + 1))
        snr = float(rng.uniform(-2, 8))
        s = ConcatenatedScheme(polar_construct(n_p, k_p, snr), codes[rng.integers(len(codes))],
                               int(rng.integers(1, 4)))
        eps = info_eps(s)
        assert fsr_lower_bound(s, eps.max()) <= fsr_fec_assisted(s, eps) * (1 + 1e-12)


def test_underflow_flag():
    s = ConcatenatedScheme(polar_construct(512, 512, -5.0), bch_construct(9, 1), 1)
    rep = analyze_scheme(s, -5.0)
    assert rep.fsr == 0.0 and rep.underflow


def test_fsr_grows_with_snr():
    s = ConcatenatedScheme(polar_construct(32, 16, 2.0), bch_construct(5, 2), 1)
    values = [analyze_scheme(s, snr).fsr for snr in (0, 1, 2, 3, 4)]
    assert values == sorted(values)


def test_throughput_scenarios():
    s = ConcatenatedScheme(polar_construct(4, 3, 5.0), bch_construct(6, 3), 1)   # 252 / 135
    assert throughput(s, 0.9) == pytest.approx(45 / 63 * 3 / 4 * 0.9)
    assert throughput(s, 0.9, Scenario.PHY, l_phy=256) == pytest.approx(135 * 0.9 / 256)
    assert throughput(s, 0.9, "mac", l_mac=128) == pytest.approx(128 * 0.9 / 252)
    with pytest.raises(UsageError):
        throughput(s, 0.9, "phy", l_phy=200)
    with pytest.raises(UsageError):
        throughput(s, 0.9, "mac", l_mac=200)


def test_reference_design_closed_form():
    # (4,3) polar with (63,45) BCH at 5 dB in a 256-bit PHY frame
    s = ConcatenatedScheme(polar_construct(4, 3, 5.0), bch_construct(6, 3), 1)
    rep = analyze_scheme(s, 5.0, "phy", l_phy=256)
    assert rep.throughput == pytest.approx(0.5057, abs=5e-4)
    assert rep.fsr_lower_bound <= rep.fsr
    assert rep.fsr_sc_baseline < rep.fsr


def test_fading_average_of_states():
    s = ConcatenatedScheme(polar_construct(8, 4, 6.0), bch_construct(4, 2), 1)
    spec = discretize_rayleigh(6.0, 4)
    ref = sum(p * s.rate * fsr_fec_assisted(s, info_eps(s, g))
              for g, p in zip(spec.state_snr_db, spec.state_prob))
    assert throughput_fading(s, spec) == pytest.approx(ref)
    assert throughput_fading(s, spec) < analyze_scheme(s, 6.0).throughput
