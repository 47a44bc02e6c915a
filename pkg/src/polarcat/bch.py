"""Binary primitive BCH codes: construction, systematic encoding and
Berlekamp-Massey / Chien-search decoding.

Bit layout: codeword position ``i`` carries the coefficient of
``x**(n_o - 1 - i)``, so the systematic message occupies positions
``0 .. k_o - 1`` and the parity the tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field as dc_field
from functools import lru_cache

import numpy as np

from .galois import GaloisField, field_new, poly_degree, poly_lcm, poly_mod


class UsageError(ValueError):
    """Raised when an operation receives inputs of the wrong shape."""


@dataclass(frozen=True, eq=False)
class OuterCode:
    n_o: int
    k_o: int
    t_o: int
    generator_poly: int
    field: GaloisField | None = dc_field(repr=False)
    # (k_o, n_o - k_o) parity part of the systematic generator matrix
    parity_matrix: np.ndarray = dc_field(repr=False, compare=False)
    # (n_o, t_o * m) binary check matrix for the odd syndromes
    check_matrix: np.ndarray = dc_field(repr=False, compare=False)

    @property
    def rate(self) -> float:
        return self.k_o / self.n_o

    @property
    def m(self) -> int | None:
        return None if self.field is None else self.field.m

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.n_o, self.k_o, self.t_o)

    def __eq__(self, other):
        if not isinstance(other, OuterCode):
            return NotImplemented
        return self.key == other.key and self.generator_poly == other.generator_poly

    def __hash__(self):
        return hash((self.key, self.generator_poly))

    @classmethod
    def identity(cls, n: int) -> "OuterCode":
        """Uncoded (n, n, 0) container: every word is a codeword.

        Lets the plain-SC frame reuse the concatenated layout with
        ``N_cw = n`` blocks and no parity.
        """
        if n < 1:
            raise UsageError("identity code needs n >= 1")
        return cls(n, n, 0, 1, None,
                   np.zeros((n, 0), dtype=np.uint8),
                   np.zeros((n, 0), dtype=np.uint8))


def _parity_matrix(n: int, k: int, g: int) -> np.ndarray:
    r = n - k
    P = np.zeros((k, r), dtype=np.uint8)
    for i in range(k):
        # message position i is x^(k-1-i); shifted by r then reduced mod g
        rem = poly_mod(1 << (k - 1 - i + r), g)
        for d in range(r):
            # parity position k + j holds degree r - 1 - j
            P[i, r - 1 - d] = (rem >> d) & 1
    return P


def _check_matrix(gf: GaloisField, n: int, t: int) -> np.ndarray:
    m = gf.m
    H = np.zeros((n, t * m), dtype=np.uint8)
    for i in range(n):
        deg = n - 1 - i
        for s, j in enumerate(range(1, 2 * t, 2)):
            e = gf.alpha_pow(j * deg)
            for b in range(m):
                H[i, s * m + b] = (e >> b) & 1
    return H


@lru_cache(maxsize=None)
def bch_construct(m: int, t_o: int, lift_bound: bool = False) -> OuterCode | None:
    """Narrow-sense primitive BCH code of length 2^m - 1 correcting ``t_o`` errors.

    Returns None when no usable code exists: ``k_o < 2``, or ``t_o`` is
    outside ``1 .. 2^(m-2) - 1`` (the search bound; ``lift_bound`` drops the
    upper limit).
    """
    if m < 3 or t_o < 1:
        return None
    if not lift_bound and t_o >= 2 ** (m - 2):
        return None
    gf = field_new(m)
    n = gf.order
    if 2 * t_o >= n:
        return None
    g = 1
    for power in range(1, 2 * t_o + 1):
        g = poly_lcm(g, gf.minimal_polynomial(power % n))
    k = n - poly_degree(g)
    if k < 2:
        return None
    return OuterCode(n, k, t_o, g, gf, _parity_matrix(n, k, g), _check_matrix(gf, n, t_o))


def bch_codes(m: int, lift_bound: bool = False) -> list[OuterCode]:
    """All valid codes of length 2^m - 1 over the t_o search range."""
    t_max = 2 ** (m - 1) if lift_bound else 2 ** (m - 2)
    codes = []
    for t in range(1, t_max):
        code = bch_construct(m, t, lift_bound)
        if code is not None:
            codes.append(code)
    return codes


def bch_encode(code: OuterCode, message) -> np.ndarray:
    """Systematic encoding; accepts a single message or a (batch, k_o) array."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1:] != (code.k_o,):
        raise UsageError(f"message length must be {code.k_o}, got {msg.shape[-1:]}")
    parity = (msg.astype(np.int64) @ code.parity_matrix) & 1
    return np.concatenate([msg & 1, parity.astype(np.uint8)], axis=-1)


def syndromes_zero(code: OuterCode, words: np.ndarray) -> np.ndarray:
    """Boolean mask of words whose syndromes all vanish."""
    if code.t_o == 0:
        return np.ones(words.shape[:-1], dtype=bool)
    s = (words.astype(np.int64) @ code.check_matrix) & 1
    return ~s.any(axis=-1)


def _syndromes(code: OuterCode, word) -> list[int]:
    gf = code.field
    n = code.n_o
    positions = [n - 1 - i for i in np.flatnonzero(word)]
    out = []
    for j in range(1, 2 * code.t_o + 1):
        s = 0
        for deg in positions:
            s ^= gf.alpha_pow(j * deg)
        out.append(s)
    return out


def _berlekamp_massey(gf: GaloisField, synd: list[int]) -> list[int]:
    """Error-locator polynomial (coefficients lowest degree first)."""
    lam = [1]
    prev = [1]
    L = 0
    shift = 1
    b = 1
    for r, s in enumerate(synd):
        d = s
        for i in range(1, L + 1):
            if i < len(lam):
                d ^= gf.mul(lam[i], synd[r - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.div(d, b)
        upd = lam + [0] * max(0, len(prev) + shift - len(lam))
        for i, p in enumerate(prev):
            upd[i + shift] ^= gf.mul(coef, p)
        if 2 * L <= r:
            prev, lam = lam, upd
            L = r + 1 - L
            b = d
            shift = 1
        else:
            lam = upd
            shift += 1
    while len(lam) > 1 and lam[-1] == 0:
        lam.pop()
    return lam


def _decode_one(code: OuterCode, word: np.ndarray) -> tuple[np.ndarray, int, bool]:
    gf = code.field
    n = code.n_o
    synd = _syndromes(code, word)
    if not any(synd):
        return word.copy(), 0, True
    lam = _berlekamp_massey(gf, synd)
    nu = len(lam) - 1
    if nu > code.t_o:
        return word.copy(), 0, False
    # Chien search: error at degree d iff lam(alpha^-d) == 0
    positions = []
    for d in range(n):
        x = gf.alpha_pow(-d)
        acc = 0
        xp = 1
        for c in lam:
            acc ^= gf.mul(c, xp)
            xp = gf.mul(xp, x)
        if acc == 0:
            positions.append(n - 1 - d)
    if len(positions) != nu:
        return word.copy(), 0, False
    out = word.copy()
    out[positions] ^= 1
    return out, nu, True


def bch_correct(code: OuterCode, received) -> tuple[np.ndarray, int, bool]:
    """Hard-decision bounded-distance decoding of one word.

    On failure the received word is returned unchanged with ``success=False``.
    """
    word = np.asarray(received, dtype=np.uint8) & 1
    if word.shape != (code.n_o,):
        raise UsageError(f"received length must be {code.n_o}, got {word.shape}")
    if code.t_o == 0:
        return word.copy(), 0, True
    return _decode_one(code, word)


def bch_correct_batch(code: OuterCode, words) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decode a (batch, n_o) array; only words with nonzero syndromes hit BM."""
    words = np.asarray(words, dtype=np.uint8) & 1
    if words.ndim != 2 or words.shape[1] != code.n_o:
        raise UsageError(f"expected (batch, {code.n_o}) array, got {words.shape}")
    out = words.copy()
    counts = np.zeros(len(words), dtype=np.int64)
    success = np.ones(len(words), dtype=bool)
    if code.t_o == 0:
        return out, counts, success
    for idx in np.flatnonzero(~syndromes_zero(code, words)):
        out[idx], counts[idx], success[idx] = _decode_one(code, words[idx])
    return out, counts, success
