import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarcat.bch import OuterCode, UsageError, bch_construct, bch_encode
from polarcat.frame import (ConcatenatedScheme, decode_frames, frame_decode_fec_assisted,
                            frame_decode_sc_baseline, frame_encode, outer_matrix, pack_frame,
                            segment_sizes, unpack_frame)
from polarcat.polar import polar_construct, polar_transform


def scheme(n_p=8, k_p=5, m=3, t=1, beta=1, snr=3.0):
    return ConcatenatedScheme(polar_construct(n_p, k_p, snr), bch_construct(m, t), beta)


def clean_llrs(bits):
    return 12.0 * (1 - 2.0 * np.asarray(bits, dtype=float))


def test_lengths_and_rate():
    s = scheme(16, 10, 4, 2, beta=3)
    assert s.l_phy == 3 * 15 * 16
    assert s.l_mac == 3 * 7 * 10
    assert s.n_cw == 45
    assert s.rate == pytest.approx(7 / 15 * 10 / 16)
    assert s.describe()["L_PHY"] == 720
    with pytest.raises(UsageError):
        ConcatenatedScheme(s.polar, s.outer, 0)


def test_segment_sizes_front_loaded():
    s = scheme(beta=3)
    assert segment_sizes(s, 60) == [20, 20, 20]
    assert segment_sizes(s, 50) == [17, 17, 16]
    assert segment_sizes(s, 0) == [0, 0, 0]
    with pytest.raises(UsageError):
        segment_sizes(s, 61)


def test_layout_against_explicit_construction():
    s = scheme(8, 5, 3, 1)
    payload = np.random.default_rng(0).integers(0, 2, s.l_mac).astype(np.uint8)
    msg = payload.reshape(4, 5)                       # row-major k_o x k_p
    cols = np.stack([bch_encode(s.outer, msg[:, v]) for v in range(5)], axis=1)   # n_o x k_p
    assert np.array_equal(outer_matrix(s, payload)[0, 0], cols)
    blocks = []
    for z in range(7):
        u = np.zeros(8, dtype=np.uint8)
        u[s.polar.info_positions] = cols[z]
        blocks.append(polar_transform(u))
    assert np.array_equal(frame_encode(s, payload), np.concatenate(blocks))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(4, 3, 3, 1, 1), (8, 5, 4, 2, 2), (16, 9, 3, 1, 3), (8, 8, 4, 1, 1)]),
       st.integers(0, 2 ** 32 - 1), st.floats(0.0, 1.0))
def test_noiseless_round_trip(params, seed, fill):
    n_p, k_p, m, t, beta = params
    s = scheme(n_p, k_p, m, t, beta)
    length = int(round(fill * s.l_mac))
    payload = np.random.default_rng(seed).integers(0, 2, (3, length)).astype(np.uint8)
    llrs = clean_llrs(frame_encode(s, payload))
    out, ok = frame_decode_fec_assisted(s, llrs, length)
    assert np.array_equal(out, payload) and ok.all()
    assert np.array_equal(frame_decode_sc_baseline(s, llrs, length), payload)


def test_single_frame_shapes():
    s = scheme()
    payload = np.ones(s.l_mac, dtype=np.uint8)
    tx = frame_encode(s, payload)
    assert tx.shape == (s.l_phy,)
    out, ok = frame_decode_fec_assisted(s, clean_llrs(tx))
    assert out.shape == payload.shape and ok.shape == (1, s.polar.k_p)


def test_outer_code_repairs_an_erased_block():
    # a whole polar block erased gives at most one error per column
    s = scheme(16, 9, 4, 2)
    rng = np.random.default_rng(4)
    payload = rng.integers(0, 2, (50, s.l_mac)).astype(np.uint8)
    llrs = clean_llrs(frame_encode(s, payload))
    llrs[:, 3 * 16:4 * 16] = rng.normal(0, 0.3, (50, 16))
    llrs[:, 9 * 16:10 * 16] *= -1                     # and one block flipped outright
    out, ok = frame_decode_fec_assisted(s, llrs)
    assert np.array_equal(out, payload) and ok.all()
    assert not np.array_equal(frame_decode_sc_baseline(s, llrs), payload)


def test_genie_mode_and_raw_columns():
    s = scheme(8, 6, 3, 1)
    rng = np.random.default_rng(2)
    payload = rng.integers(0, 2, (30, s.l_mac)).astype(np.uint8)
    tx = frame_encode(s, payload)
    llrs = clean_llrs(tx) * 0.2 + rng.normal(0, 1.5, tx.shape)
    truth = outer_matrix(s, payload)
    genie = decode_frames(s, llrs, mode="genie", genie=truth)
    assert np.array_equal(genie.columns, truth)
    assert np.array_equal(genie.payload, payload)
    fec = decode_frames(s, llrs, mode="fec")
    assert fec.raw_columns.shape == truth.shape
    with pytest.raises(UsageError):
        decode_frames(s, llrs, mode="genie")
    with pytest.raises(UsageError):
        decode_frames(s, llrs, mode="list")
    with pytest.raises(UsageError):
        decode_frames(s, llrs[:, :-1])


def test_identity_outer_is_plain_sc():
    polar = polar_construct(8, 4, 4.0)
    s = ConcatenatedScheme(polar, OuterCode.identity(5))
    assert s.l_phy == 40 and s.l_mac == 20
    payload = np.random.default_rng(1).integers(0, 2, 20).astype(np.uint8)
    assert np.array_equal(frame_decode_sc_baseline(s, clean_llrs(frame_encode(s, payload))), payload)


@given(st.lists(st.integers(0, 1), max_size=200))
def test_pack_round_trip(bits):
    data = pack_frame(bits)
    assert len(data) == (len(bits) + 7) // 8
    assert unpack_frame(data, len(bits)).tolist() == bits


def test_pack_is_msb_first():
    assert pack_frame([1, 0, 0, 0, 0, 0, 0, 1, 1]) == bytes([0x81, 0x80])
    with pytest.raises(UsageError):
        unpack_frame(b"\x00", 9)
