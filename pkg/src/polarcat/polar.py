"""Polar codes: encoding, Gaussian-approximation construction and a pausable
successive-cancellation (SC) decoder.

Indices are 0-based in the Python API. ``w`` lists bit channels from most to
least degraded; the frozen set is ``w[:n_p - k_p]``.

The decoder works on a batch of codewords that share one code, so a whole
frame (or many frames) can be advanced in lockstep one bit position at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr

from .bch import UsageError
from .channel import noise_variance

LLR_CLIP = 300.0


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=None)
def bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


def polar_transform(u) -> np.ndarray:
    """Return ``G_n^T u`` with ``G_n = B_n F^{(x)i}`` over the last axis."""
    x = np.array(u, dtype=np.uint8) & 1
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise UsageError("n_p must be a power of two")
    half = 1
    while half < n:
        v = x.reshape(x.shape[:-1] + (n // (2 * half), 2, half))
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return x[..., bit_reversal(n)]


# -- Gaussian approximation ------------------------------------------------

_PHI_A, _PHI_B, _PHI_C = 0.4527, 0.86, 0.0218


def log_phi(x):
    """log of the fitted phi(x); phi(0) = 1."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    low = (x > 0) & (x <= 10)
    high = x > 10
    out[low] = -_PHI_A * x[low] ** _PHI_B + _PHI_C
    xh = x[high]
    out[high] = 0.5 * np.log(np.pi / xh) - xh / 4 + np.log1p(-10.0 / (7.0 * xh))
    return out


def phi(x):
    return np.exp(log_phi(x))


def _log_phi_high(x):
    return 0.5 * np.log(np.pi / x) - x / 4 + np.log1p(-10.0 / (7.0 * x))


_LOG_PHI_LOW_10 = -_PHI_A * 10.0 ** _PHI_B + _PHI_C


def phi_inverse_log(log_target, tol=1e-12):
    """Solve ``log_phi(x) = log_target``.

    The fit jumps up slightly at x = 10, so a few targets have a root on each
    branch. The low branch (closed form, x <= 10) is used wherever it reaches
    the target, the high branch (x > 10) otherwise. Both pieces are strictly
    decreasing.
    """
    t = np.asarray(log_target, dtype=np.float64)
    out = np.zeros_like(t)
    low = t >= _LOG_PHI_LOW_10
    out[low] = (np.maximum(_PHI_C - t[low], 0.0) / _PHI_A) ** (1.0 / _PHI_B)
    high = ~low & np.isfinite(t)
    out[~low & ~np.isfinite(t)] = np.inf
    if high.any():
        th = t[high]
        x = np.maximum(10.0, -4.0 * th)
        # log phi is convex and decreasing for x >= 10, so Newton iterates
        # clamped at 10 approach the root monotonically from the left
        for _ in range(100):
            f = _log_phi_high(x) - th
            d = -0.5 / x - 0.25 + 10.0 / (7.0 * x * x - 10.0 * x)
            nxt = np.maximum(x - f / d, 10.0)
            done = np.abs(nxt - x) <= tol * x
            x = nxt
            if done.all():
                break
        out[high] = x
    return out


def phi_inverse(y, tol=1e-12):
    with np.errstate(divide="ignore"):
        return phi_inverse_log(np.log(y), tol)


def _check_node_mean(x):
    """Mean LLR after the check-node (odd/f) combination of two iid means x."""
    lp = log_phi(x)
    # log(1 - (1 - phi)^2) = log(phi) + log(2 - phi)
    target = lp + np.log(2.0 - np.exp(lp))
    return phi_inverse_log(target)


def ga_mean_llrs(n_p: int, snr_db: float) -> np.ndarray:
    """Mean LLR of every bit channel, natural order."""
    if not is_power_of_two(n_p):
        raise UsageError("n_p must be a power of two")
    z = np.array([2.0 / noise_variance(snr_db)])
    while z.size < n_p:
        nxt = np.empty(2 * z.size)
        nxt[0::2] = _check_node_mean(z)
        nxt[1::2] = 2.0 * z
        z = nxt
    return z


@lru_cache(maxsize=4096)
def _ga_cached(n_p: int, snr_db: float) -> tuple[np.ndarray, np.ndarray]:
    eps = ndtr(-np.sqrt(ga_mean_llrs(n_p, snr_db) / 2.0))
    w = np.argsort(-eps, kind="stable")
    eps.setflags(write=False)
    w.setflags(write=False)
    return w, eps


def ga_analyze(n_p: int, snr_db: float) -> tuple[np.ndarray, np.ndarray]:
    """Degradation order ``w`` (most degraded first) and per-channel error
    probabilities ``eps`` (natural order), conditioned on correct past bits.

    Ties in ``eps`` keep ascending index order. Results are memoized per
    ``(n_p, snr_db)`` and returned read-only.
    """
    return _ga_cached(int(n_p), float(snr_db))


# -- code ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolarCode:
    n_p: int
    k_p: int
    w: np.ndarray
    eps: np.ndarray
    frozen_values: np.ndarray
    snr_db: float | None = None

    def __post_init__(self):
        if not is_power_of_two(self.n_p) or self.n_p < 2:
            raise UsageError("n_p must be a power of two (>= 2)")
        if not 0 <= self.k_p <= self.n_p:
            raise UsageError(f"k_p must be in [0, {self.n_p}]")
        if sorted(np.asarray(self.w).tolist()) != list(range(self.n_p)):
            raise UsageError("w must be a permutation of range(n_p)")
        mask = np.zeros(self.n_p, dtype=bool)
        mask[self.w[: self.n_p - self.k_p]] = True
        object.__setattr__(self, "frozen_mask", mask)
        values = np.asarray(self.frozen_values, dtype=np.uint8).reshape(-1) & 1
        fv = np.zeros(self.n_p, dtype=np.uint8)
        if values.size == self.n_p:
            fv[mask] = values[mask]
        elif values.size == mask.sum():
            fv[np.flatnonzero(mask)] = values
        else:
            raise UsageError("frozen_values must have length n_p or n_p - k_p")
        object.__setattr__(self, "frozen_values", fv)

    @property
    def rate(self) -> float:
        return self.k_p / self.n_p

    @property
    def frozen_set(self) -> np.ndarray:
        return np.sort(self.w[: self.n_p - self.k_p])

    @property
    def message_positions(self) -> np.ndarray:
        """Information set in reliability order (message bit j -> this[j])."""
        return np.asarray(self.w[self.n_p - self.k_p:])

    @property
    def info_positions(self) -> np.ndarray:
        """Information set in natural (SC decoding) order."""
        return np.flatnonzero(~self.frozen_mask)

    def __repr__(self):
        return f"PolarCode(n_p={self.n_p}, k_p={self.k_p}, frozen={self.frozen_set.tolist()})"


def polar_construct(n_p: int, k_p: int, snr_db: float) -> PolarCode:
    """Freeze the ``n_p - k_p`` most degraded channels (GA at ``snr_db``) to 0."""
    if not is_power_of_two(n_p) or n_p < 2:
        raise UsageError("n_p must be a power of two")
    if not 0 <= k_p <= n_p:
        raise UsageError(f"k_p must be in [0, {n_p}]")
    w, eps = ga_analyze(n_p, snr_db)
    return PolarCode(n_p, k_p, w, eps, np.zeros(n_p, dtype=np.uint8), snr_db)


def assemble_u(code: PolarCode, message, positions=None) -> np.ndarray:
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1:] != (code.k_p,):
        raise UsageError(f"message length must be {code.k_p}, got {msg.shape[-1:]}")
    if positions is None:
        positions = code.message_positions
    u = np.broadcast_to(code.frozen_values, msg.shape[:-1] + (code.n_p,)).copy()
    u[..., positions] = msg & 1
    return u


def polar_encode(code: PolarCode, message) -> np.ndarray:
    """Encode ``k_p`` message bits (or a batch) into ``n_p`` coded bits.

    Message bit ``j`` goes to bit channel ``w[n_p - k_p + j]``.
    """
    return polar_transform(assemble_u(code, message))


# -- SC decoder ------------------------------------------------------------

def f_combine(a, b):
    """Exact check-node LLR combine 2*atanh(tanh(a/2) tanh(b/2)), log form."""
    return (np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))


def g_combine(a, b, u):
    return b + (1.0 - 2.0 * u) * a


def _sc_tree(llr):
    """Generator over leaves: yields each bit's LLR (batch,), receives the
    decided bits, returns the re-encoded partial sums of this subtree."""
    m = llr.shape[1]
    if m == 1:
        bit = yield llr[:, 0]
        return bit[:, None]
    h = m // 2
    a, b = llr[:, :h], llr[:, h:]
    left = yield from _sc_tree(f_combine(a, b))
    right = yield from _sc_tree(g_combine(a, b, left))
    return np.concatenate([left ^ right, right], axis=1)


class ScDecoderState:
    """Incremental SC decoder over a batch of received words.

    Bits are decided in natural order by :meth:`decode_next`. The latest
    decision stays uncommitted until the next call, so :meth:`override`
    can replace it before it feeds later bits.
    """

    def __init__(self, code: PolarCode, channel_llrs):
        llrs = np.asarray(channel_llrs, dtype=np.float64)
        self.single = llrs.ndim == 1
        llrs = np.atleast_2d(llrs)
        if llrs.shape[-1] != code.n_p or llrs.ndim != 2:
            raise UsageError(f"channel_llrs must have length {code.n_p}")
        self.code = code
        self.batch = llrs.shape[0]
        llrs = np.clip(llrs, -LLR_CLIP, LLR_CLIP)[:, bit_reversal(code.n_p)]
        self._tree = _sc_tree(llrs)
        self._leaf_llr = None
        self._pending = None
        self.next_bit = 0
        self.decisions = np.zeros((self.batch, code.n_p), dtype=np.uint8)
        self.codeword = None

    def _out(self, bits):
        return int(bits[0]) if self.single else bits

    def decode_next(self):
        """Decide the next bit; returns ``(bit_index, bits, was_frozen)``."""
        code = self.code
        i = self.next_bit
        if i >= code.n_p:
            raise UsageError("all bits already decoded")
        llr = next(self._tree) if i == 0 else self._tree.send(self._pending)
        self._leaf_llr = llr
        if code.frozen_mask[i]:
            bits = np.full(self.batch, code.frozen_values[i], dtype=np.uint8)
        else:
            bits = (llr < 0).astype(np.uint8)
        self.decisions[:, i] = bits
        self._pending = bits
        self.next_bit = i + 1
        if self.next_bit == code.n_p:
            self._commit_last()
        return i, self._out(bits.copy()), bool(code.frozen_mask[i])

    def _commit_last(self):
        try:
            self._tree.send(self._pending)
        except StopIteration as stop:
            # re-encoded estimate in transmitted order
            self.codeword = stop.value[:, bit_reversal(self.code.n_p)]
        else:  # pragma: no cover
            raise RuntimeError("SC tree did not terminate")

    def override(self, bit_index: int, corrected_bits):
        """Replace the decision at the most recently decided info position."""
        if bit_index != self.next_bit - 1 or bit_index < 0:
            raise UsageError("only the most recently decided bit can be overridden")
        if self.code.frozen_mask[bit_index]:
            raise UsageError("cannot override a frozen position")
        bits = np.broadcast_to(np.asarray(corrected_bits, dtype=np.uint8) & 1, (self.batch,)).copy()
        self.decisions[:, bit_index] = bits
        self._pending = bits
        if self.next_bit == self.code.n_p:
            # last bit: the tree already finished, rebuild the partial sums
            self.codeword = polar_transform(self.decisions)

    @property
    def last_llr(self):
        """LLR seen by the most recent decision."""
        if self._leaf_llr is None:
            return None
        return float(self._leaf_llr[0]) if self.single else self._leaf_llr.copy()

    def message(self) -> np.ndarray:
        if self.next_bit != self.code.n_p:
            raise UsageError("decoding not finished")
        msg = self.decisions[:, self.code.message_positions]
        return msg[0] if self.single else msg


def sc_init(code: PolarCode, channel_llrs) -> ScDecoderState:
    return ScDecoderState(code, channel_llrs)


def sc_decode_next(state: ScDecoderState, code: PolarCode | None = None):
    return state.decode_next()


def sc_override(state: ScDecoderState, code: PolarCode | None, bit_index: int, corrected_bit):
    state.override(bit_index, corrected_bit)


def sc_decode(code: PolarCode, channel_llrs, genie_u=None):
    """Run SC to the end; returns the message estimate(s).

    With ``genie_u`` (true input vectors), every info decision is replaced by
    the true bit before it feeds later bits.
    """
    state = ScDecoderState(code, channel_llrs)
    genie = None if genie_u is None else np.atleast_2d(np.asarray(genie_u, dtype=np.uint8))
    for _ in range(code.n_p):
        i, _, frozen = state.decode_next()
        if genie is not None and not frozen:
            state.override(i, genie[:, i])
    return state.message()


def genie_bit_errors(n_p: int, channel_llrs, u) -> np.ndarray:
    """Per-channel raw decision errors (batch, n_p) of a genie-aided SC pass.

    Every position is treated as unfrozen; after each decision the true bit
    is fed back, so errors are conditioned on a correct past.
    """
    w = np.arange(n_p)
    code = PolarCode(n_p, n_p, w, np.zeros(n_p), np.zeros(n_p, dtype=np.uint8))
    u = np.atleast_2d(np.asarray(u, dtype=np.uint8))
    state = ScDecoderState(code, channel_llrs)
    errors = np.zeros((state.batch, n_p), dtype=bool)
    for _ in range(n_p):
        i, bits, _ = state.decode_next()
        errors[:, i] = np.atleast_1d(bits) != u[:, i]
        state.override(i, u[:, i])
    return errors
