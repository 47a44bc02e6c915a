"""Monte Carlo frame-success measurement for the concatenated decoders.

Frame ``i`` of a run draws its payload and channel realization from its own
stream ``SeedSequence(seed, spawn_key=(i,))``, so counts do not depend on how
frames are chunked or how many worker processes share the work.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bch import UsageError
from .channel import AwgnSpec, ChannelSpec, RayleighSpec, make_rng, transmit
from .frame import ConcatenatedScheme, decode_frames, frame_encode, outer_matrix
from .polar import genie_bit_errors, polar_transform

Z95 = 1.959963984540054
CHUNK = 256
ROUND = 8  # chunks between stop-rule checks


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class SimPlan:
    scheme: ConcatenatedScheme
    channel: ChannelSpec
    decoder: str = "fec"            # "fec", "sc" or "genie"
    frames: int = 10_000
    seed: int = 0
    stop_rule: str = "fixed"        # "fixed" or "ci"
    ci_target: float = 0.05         # relative half-width for stop_rule="ci"
    payload_len: int | None = None
    l_phy_budget: int | None = None  # measured T = L_MAC FSR / budget when set
    workers: int = 1

    def __post_init__(self):
        if self.frames < 1:
            raise UsageError("frames must be >= 1")
        if self.decoder not in ("fec", "sc", "genie"):
            raise UsageError(f"unknown decoder {self.decoder!r}")
        if self.stop_rule not in ("fixed", "ci"):
            raise UsageError(f"unknown stop rule {self.stop_rule!r}")
        if not 0 < self.ci_target < 1:
            raise UsageError("ci_target must be in (0, 1)")

    @property
    def payload_bits(self) -> int:
        return self.scheme.l_mac if self.payload_len is None else self.payload_len


@dataclass
class SimResult:
    frames: int
    successes: int
    fsr: float
    ci_lo: float
    ci_hi: float
    throughput: float
    column_failures: np.ndarray     # outer-decode failures per info column
    column_raw_errors: np.ndarray   # pre-correction bit errors per info column
    column_raw_bits: np.ndarray     # bits observed under correct earlier feedback
    block_failures: int             # polar blocks with any raw info-bit error
    wall_clock: float
    truncated: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def eps_measured(self) -> np.ndarray:
        """Raw per-info-column bit error rate, counted only where every earlier
        column was fed back correctly (so it estimates the genie-aided rate)."""
        return self.column_raw_errors / np.maximum(self.column_raw_bits, 1)

    @property
    def p_cw_measured(self) -> float:
        blocks = self.meta.get("blocks_per_frame", 1) * self.frames
        return 1.0 - self.block_failures / blocks


def _frame_inputs(plan: SimPlan, start: int, stop: int):
    payloads, rngs = [], []
    for i in range(start, stop):
        rng = make_rng(plan.seed, i)
        payloads.append(rng.integers(0, 2, plan.payload_bits, dtype=np.uint8))
        rngs.append(rng)
    return np.array(payloads).reshape(stop - start, plan.payload_bits), rngs


def _run_chunk(args):
    plan, start, stop = args
    scheme = plan.scheme
    payload, rngs = _frame_inputs(plan, start, stop)
    tx = frame_encode(scheme, payload)
    llrs = np.stack([transmit(tx[j], plan.channel, rngs[j])[0] for j in range(len(rngs))])
    truth = outer_matrix(scheme, payload)
    res = decode_frames(scheme, llrs, plan.payload_bits, plan.decoder,
                        genie=truth if plan.decoder == "genie" else None)
    ok = (res.payload == payload).all(axis=1)
    raw_err = res.raw_columns != truth                     # (F, beta, n_o, k_p)
    fed_ok = (res.columns == truth).all(axis=2)            # (F, beta, k_p)
    prefix = np.ones_like(fed_ok)
    prefix[..., 1:] = np.logical_and.accumulate(fed_ok, axis=-1)[..., :-1]
    n_o = truth.shape[2]
    return (int(ok.sum()), stop - start,
            (~res.success).sum(axis=(0, 1)),
            (raw_err.sum(axis=2) * prefix).sum(axis=(0, 1)),
            prefix.sum(axis=(0, 1)) * n_o,
            int(raw_err.any(axis=3).sum()))


def run_sim(plan: SimPlan) -> SimResult:
    t0 = time.perf_counter()
    k_p = plan.scheme.polar.k_p
    succ = done = blocks_bad = 0
    col_fail = np.zeros(k_p, dtype=np.int64)
    col_raw = np.zeros(k_p, dtype=np.int64)
    col_bits = np.zeros(k_p, dtype=np.int64)
    # ci rule: keep going in rounds up to 100x the frame budget
    limit = plan.frames if plan.stop_rule == "fixed" else plan.frames * 100
    truncated = False
    pool = ProcessPoolExecutor(max_workers=plan.workers) if plan.workers > 1 else None
    try:
        while done < limit:
            step = min(limit - done, plan.frames if plan.stop_rule == "fixed" else CHUNK * ROUND)
            tasks = [(plan, s, min(s + CHUNK, done + step)) for s in range(done, done + step, CHUNK)]
            parts = pool.map(_run_chunk, tasks) if pool else map(_run_chunk, tasks)
            for ok, n, cf, cr, cb, bb in parts:
                succ += ok
                done += n
                col_fail += cf
                col_raw += cr
                col_bits += cb
                blocks_bad += bb
            if plan.stop_rule == "ci" and done >= plan.frames:
                lo, hi = wilson_interval(succ, done)
                p = succ / done
                if p > 0 and (hi - lo) / 2 <= plan.ci_target * p:
                    break
        else:
            truncated = plan.stop_rule == "ci"
    finally:
        if pool:
            pool.shutdown()
    fsr = succ / done
    lo, hi = wilson_interval(succ, done)
    s = plan.scheme
    if plan.l_phy_budget is None:
        thr = s.rate * fsr
    else:
        thr = plan.payload_bits * fsr / plan.l_phy_budget
    meta = {"seed": plan.seed, "decoder": plan.decoder, "blocks_per_frame": s.n_cw,
            "scheme": s.describe(), "channel": channel_dict(plan.channel)}
    return SimResult(done, succ, fsr, lo, hi, thr, col_fail, col_raw, col_bits, blocks_bad,
                     time.perf_counter() - t0, truncated, meta)


def channel_dict(spec: ChannelSpec) -> dict:
    if isinstance(spec, AwgnSpec):
        return {"kind": "awgn", "snr_db": spec.snr_db}
    return {"kind": "rayleigh", "avg_snr_db": spec.avg_snr_db, "states": spec.states}


def channel_snr(spec: ChannelSpec) -> float:
    return spec.snr_db if isinstance(spec, AwgnSpec) else spec.avg_snr_db


ROW_FIELDS = ("snr_db", "fsr", "ci_lo", "ci_hi", "throughput", "frames", "seed")


def result_row(plan: SimPlan, res: SimResult) -> dict:
    return {"snr_db": channel_snr(plan.channel), "fsr": res.fsr, "ci_lo": res.ci_lo,
            "ci_hi": res.ci_hi, "throughput": res.throughput, "frames": res.frames,
            "seed": plan.seed}


def sweep(plans) -> list[tuple[SimPlan, SimResult]]:
    """Run plans in order; one (plan, result) pair per grid point."""
    return [(plan, run_sim(plan)) for plan in plans]


def genie_channel_errors(n_p: int, channel: ChannelSpec, trials: int, seed: int = 0,
                         batch: int = 50_000) -> np.ndarray:
    """Genie-aided per-bit-channel error rates of SC decoding (natural order)."""
    rng = make_rng(seed)
    errors = np.zeros(n_p, dtype=np.int64)
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        u = rng.integers(0, 2, (m, n_p), dtype=np.uint8)
        x = polar_transform(u)
        llrs = np.stack([transmit(x[j], channel, rng)[0] for j in range(m)]) \
            if isinstance(channel, RayleighSpec) else transmit(x, channel, rng)[0]
        errors += genie_bit_errors(n_p, llrs, u).sum(axis=0)
        done += m
    return errors / trials
