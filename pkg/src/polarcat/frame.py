"""Concatenated polar/BCH frames: construction and the two frame decoders.

Layout of one super-segment (``beta`` of them per frame, back to back):

* the payload slice is zero-padded to ``k_o * k_p`` bits and written row-major
  into a ``k_o x k_p`` matrix (payload bit ``j`` -> row ``j // k_p``, column
  ``j % k_p``);
* every column is BCH-encoded to ``n_o`` bits, giving an ``n_o x k_p`` matrix;
* row ``z`` fills the information positions of polar block ``z`` in natural
  order (column ``v`` -> ``v``-th info position), and each block is
  polar-encoded. Blocks are transmitted in row order.

Frames serialize as packed bits, most significant bit first
(:func:`pack_frame` / :func:`unpack_frame`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bch import OuterCode, UsageError, bch_correct_batch, bch_encode
from .polar import PolarCode, ScDecoderState, polar_transform


@dataclass(frozen=True)
class ConcatenatedScheme:
    polar: PolarCode
    outer: OuterCode
    beta: int = 1

    def __post_init__(self):
        if self.beta < 1:
            raise UsageError("beta must be >= 1")

    @property
    def l_phy(self) -> int:
        return self.beta * self.outer.n_o * self.polar.n_p

    @property
    def l_mac(self) -> int:
        return self.beta * self.outer.k_o * self.polar.k_p

    @property
    def n_cw(self) -> int:
        return self.beta * self.outer.n_o

    @property
    def rate(self) -> float:
        return self.outer.rate * self.polar.rate

    def describe(self) -> dict:
        return {
            "n_p": self.polar.n_p, "k_p": self.polar.k_p,
            "n_o": self.outer.n_o, "k_o": self.outer.k_o, "t_o": self.outer.t_o,
            "beta": self.beta, "L_PHY": self.l_phy, "L_MAC": self.l_mac,
        }


def segment_sizes(scheme: ConcatenatedScheme, payload_len: int) -> list[int]:
    """Payload bits carried by each super-segment (front-loaded halves)."""
    cap = scheme.outer.k_o * scheme.polar.k_p
    if payload_len > scheme.beta * cap:
        raise UsageError(f"payload of {payload_len} bits exceeds capacity {scheme.beta * cap}")
    per = math.ceil(payload_len / scheme.beta) if payload_len else 0
    sizes = []
    left = payload_len
    for _ in range(scheme.beta):
        take = min(per, left)
        sizes.append(take)
        left -= take
    return sizes


def _to_matrix(scheme: ConcatenatedScheme, payload: np.ndarray) -> np.ndarray:
    """(frames, L) payload -> (frames, beta, k_o, k_p) zero-padded matrices."""
    k_o, k_p = scheme.outer.k_o, scheme.polar.k_p
    frames = payload.shape[0]
    out = np.zeros((frames, scheme.beta, k_o * k_p), dtype=np.uint8)
    start = 0
    for j, size in enumerate(segment_sizes(scheme, payload.shape[1])):
        out[:, j, :size] = payload[:, start:start + size]
        start += size
    return out.reshape(frames, scheme.beta, k_o, k_p)


def _from_matrix(scheme: ConcatenatedScheme, mats: np.ndarray, payload_len: int) -> np.ndarray:
    frames = mats.shape[0]
    flat = mats.reshape(frames, scheme.beta, -1)
    parts = [flat[:, j, :size] for j, size in enumerate(segment_sizes(scheme, payload_len))]
    return np.concatenate(parts, axis=1)


def outer_matrix(scheme: ConcatenatedScheme, payload) -> np.ndarray:
    """Outer-extended ``n_o x k_p`` matrices, shape (frames, beta, n_o, k_p)."""
    payload = np.atleast_2d(np.asarray(payload, dtype=np.uint8) & 1)
    msg = _to_matrix(scheme, payload)
    cols = np.swapaxes(msg, -1, -2)              # (F, beta, k_p, k_o)
    coded = bch_encode(scheme.outer, cols)       # (F, beta, k_p, n_o)
    return np.swapaxes(coded, -1, -2)


def frame_encode(scheme: ConcatenatedScheme, payload) -> np.ndarray:
    """Encode one payload (1-D) or a batch (frames, L) into L_PHY-bit frames."""
    single = np.ndim(payload) == 1
    ext = outer_matrix(scheme, payload)
    code = scheme.polar
    u = np.broadcast_to(code.frozen_values, ext.shape[:-1] + (code.n_p,)).copy()
    u[..., code.info_positions] = ext
    frames = polar_transform(u).reshape(ext.shape[0], -1)
    return frames[0] if single else frames


@dataclass
class FrameDecodeResult:
    payload: np.ndarray        # (frames, L)
    success: np.ndarray        # (frames, beta, k_p) outer-decode flags
    raw_columns: np.ndarray    # (frames, beta, n_o, k_p) decisions before correction
    columns: np.ndarray        # (frames, beta, n_o, k_p) bits fed back to SC


def _decode(scheme: ConcatenatedScheme, channel_llrs, payload_len, mode, genie=None) -> FrameDecodeResult:
    code, outer = scheme.polar, scheme.outer
    llrs = np.atleast_2d(np.asarray(channel_llrs, dtype=np.float64))
    if llrs.shape[1] != scheme.l_phy:
        raise UsageError(f"expected {scheme.l_phy} LLRs per frame, got {llrs.shape[1]}")
    frames = llrs.shape[0]
    if payload_len is None:
        payload_len = scheme.beta * outer.k_o * code.k_p
    groups = frames * scheme.beta
    state = ScDecoderState(code, llrs.reshape(groups * outer.n_o, code.n_p))
    raw = np.zeros((groups, outer.n_o, code.k_p), dtype=np.uint8)
    fed = np.zeros_like(raw)
    ok = np.ones((groups, code.k_p), dtype=bool)
    if genie is not None:
        genie = np.asarray(genie, dtype=np.uint8).reshape(groups, outer.n_o, code.k_p)
    v = 0
    for _ in range(code.n_p):
        i, bits, frozen = state.decode_next()
        if frozen:
            continue
        col = bits.reshape(groups, outer.n_o)
        raw[:, :, v] = col
        if mode == "fec":
            col, _, ok[:, v] = bch_correct_batch(outer, col)
        elif mode == "genie":
            col = genie[:, :, v]
        if mode != "sc":
            state.override(i, col.reshape(-1))
        fed[:, :, v] = col
        v += 1
    mats = fed[:, :outer.k_o, :].reshape(frames, scheme.beta, outer.k_o, code.k_p)
    shape = (frames, scheme.beta, outer.n_o, code.k_p)
    return FrameDecodeResult(_from_matrix(scheme, mats, payload_len),
                             ok.reshape(frames, scheme.beta, code.k_p),
                             raw.reshape(shape), fed.reshape(shape))


def decode_frames(scheme: ConcatenatedScheme, channel_llrs, payload_len=None,
                  mode: str = "fec", genie=None) -> FrameDecodeResult:
    """Batch decoder behind both public decoders.

    ``mode`` is ``"fec"`` (outer-corrected columns fed back), ``"sc"`` (plain
    SC per block) or ``"genie"`` (true columns from ``genie``, an
    ``outer_matrix`` result, fed back).
    """
    if mode not in ("fec", "sc", "genie"):
        raise UsageError(f"unknown decode mode {mode!r}")
    if mode == "genie" and genie is None:
        raise UsageError("genie mode needs the transmitted outer matrix")
    return _decode(scheme, channel_llrs, payload_len, mode, genie)


def frame_decode_fec_assisted(scheme: ConcatenatedScheme, channel_llrs, payload_len=None):
    """Lockstep SC decoding of all blocks with outer correction of every
    information column. Returns ``(payload, success_flags)``."""
    single = np.ndim(channel_llrs) == 1
    res = _decode(scheme, channel_llrs, payload_len, "fec")
    if single:
        return res.payload[0], res.success[0]
    return res.payload, res.success


def frame_decode_sc_baseline(scheme: ConcatenatedScheme, channel_llrs, payload_len=None):
    """Independent SC decoding of every block; outer parity is ignored."""
    single = np.ndim(channel_llrs) == 1
    res = _decode(scheme, channel_llrs, payload_len, "sc")
    return res.payload[0] if single else res.payload


def pack_frame(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8) & 1).tobytes()


def unpack_frame(data: bytes, length: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if bits.size < length:
        raise UsageError("not enough bytes for the requested frame length")
    return bits[:length]
