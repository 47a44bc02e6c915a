import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarcat.bch import (OuterCode, UsageError, bch_codes, bch_construct, bch_correct,
                          bch_correct_batch, bch_encode, syndromes_zero)
from polarcat.galois import poly_from_bits, poly_mod

# (n, k) for t = 1, 2, 3, ... from standard BCH tables
KNOWN = {
    4: {1: 11, 2: 7, 3: 5},
    5: {1: 26, 2: 21, 3: 16, 5: 11, 7: 6},
    6: {1: 57, 2: 51, 3: 45, 4: 39, 5: 36, 6: 30, 7: 24, 10: 18, 11: 16, 13: 10, 15: 7},
    8: {1: 247, 2: 239, 9: 187, 11: 171},
    9: {15: 376, 17: 367},
}


def all_messages(k):
    return np.array(list(itertools.product([0, 1], repeat=k)), dtype=np.uint8)


def as_poly(word):
    # position i carries x^(n-1-i)
    return poly_from_bits(word[::-1])


def test_hamming_7_4():
    code = bch_construct(3, 1)
    assert code.key == (7, 4, 1)
    assert code.generator_poly == 0b1011
    assert code.rate == pytest.approx(4 / 7)


@pytest.mark.parametrize("m, table", KNOWN.items())
def test_dimensions_match_tables(m, table):
    for t, k in table.items():
        code = bch_construct(m, t)
        assert code is not None and code.k_o == k, (m, t)


def test_known_generator_15_7():
    assert bch_construct(4, 2).generator_poly == 0b111010001


def test_search_bound_and_lift():
    assert bch_construct(3, 2) is None
    assert bch_construct(5, 8) is None
    assert bch_construct(5, 8, lift_bound=True) is None      # k < 2
    assert all(c.t_o < 2 ** 4 for c in bch_codes(6))
    # past 2^(m-2) - 1 every narrow-sense code collapses to k = 1
    for m in range(3, 8):
        assert [c.key for c in bch_codes(m, True)] == [c.key for c in bch_codes(m)]
    assert bch_construct(2, 1) is None


@pytest.mark.parametrize("m, t", [(3, 1), (4, 2), (4, 3), (5, 3)])
def test_codewords_are_systematic_multiples_of_g(m, t):
    code = bch_construct(m, t)
    msgs = all_messages(code.k_o) if code.k_o <= 11 else np.random.default_rng(0).integers(0, 2, (500, code.k_o))
    words = bch_encode(code, msgs)
    assert np.array_equal(words[:, :code.k_o], msgs)
    for w in words[:64]:
        assert poly_mod(as_poly(w), code.generator_poly) == 0
    assert syndromes_zero(code, words).all()


@pytest.mark.parametrize("m, t, d", [(3, 1, 3), (4, 2, 5), (4, 3, 7)])
def test_minimum_distance(m, t, d):
    code = bch_construct(m, t)
    words = bch_encode(code, all_messages(code.k_o))
    weights = words.sum(axis=1)
    assert weights[weights > 0].min() == d


@pytest.mark.parametrize("m, t", [(3, 1), (4, 2)])
def test_exhaustive_t_error_correction(m, t):
    code = bch_construct(m, t)
    n = code.n_o
    patterns = [np.zeros(n, dtype=np.uint8)]
    for w in range(1, t + 1):
        for pos in itertools.combinations(range(n), w):
            e = np.zeros(n, dtype=np.uint8)
            e[list(pos)] = 1
            patterns.append(e)
    for c in bch_encode(code, all_messages(code.k_o)):
        for e in patterns:
            out, count, ok = bch_correct(code, c ^ e)
            assert ok and count == e.sum()
            assert np.array_equal(out, c)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(5, 3), (6, 5), (7, 9), (8, 11)]), st.data())
def test_random_correctable_patterns(mt, data):
    code = bch_construct(*mt)
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
    c = bch_encode(code, rng.integers(0, 2, code.k_o))
    w = data.draw(st.integers(0, code.t_o))
    e = np.zeros(code.n_o, dtype=np.uint8)
    e[rng.choice(code.n_o, w, replace=False)] = 1
    out, count, ok = bch_correct(code, c ^ e)
    assert ok and count == w and np.array_equal(out, c)


def test_beyond_t_never_claims_a_non_codeword():
    code = bch_construct(5, 2)
    rng = np.random.default_rng(3)
    words = bch_encode(code, rng.integers(0, 2, (400, code.k_o)))
    for c in words:
        e = np.zeros(code.n_o, dtype=np.uint8)
        e[rng.choice(code.n_o, 5, replace=False)] = 1
        out, _, ok = bch_correct(code, c ^ e)
        if ok:
            assert syndromes_zero(code, out[None])[0]
        else:
            assert np.array_equal(out, c ^ e)


def test_batch_matches_single():
    code = bch_construct(6, 3)
    rng = np.random.default_rng(9)
    words = bch_encode(code, rng.integers(0, 2, (200, code.k_o)))
    noisy = words ^ (rng.random(words.shape) < 0.04).astype(np.uint8)
    out, counts, ok = bch_correct_batch(code, noisy)
    for i in range(len(noisy)):
        o, c, s = bch_correct(code, noisy[i])
        assert np.array_equal(out[i], o) and counts[i] == c and ok[i] == s


def test_identity_code_passes_words_through():
    code = OuterCode.identity(9)
    assert code.key == (9, 9, 0)
    msg = np.random.default_rng(1).integers(0, 2, (5, 9)).astype(np.uint8)
    assert np.array_equal(bch_encode(code, msg), msg)
    out, _, ok = bch_correct_batch(code, msg)
    assert np.array_equal(out, msg) and ok.all()


def test_length_errors():
    code = bch_construct(3, 1)
    with pytest.raises(UsageError):
        bch_encode(code, [1, 0, 1])
    with pytest.raises(UsageError):
        bch_correct(code, [0] * 6)
    with pytest.raises(UsageError):
        bch_correct_batch(code, np.zeros(7))


def test_large_code_decodes_quickly():
    import time
    code = bch_construct(9, 15)
    rng = np.random.default_rng(0)
    c = bch_encode(code, rng.integers(0, 2, code.k_o))
    e = np.zeros(code.n_o, dtype=np.uint8)
    e[rng.choice(code.n_o, 15, replace=False)] = 1
    t0 = time.perf_counter()
    out, count, ok = bch_correct(code, c ^ e)
    assert ok and count == 15 and np.array_equal(out, c)
    assert time.perf_counter() - t0 < 1.0
