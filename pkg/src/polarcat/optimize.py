"""Exhaustive search for throughput-optimal polar/BCH concatenations.

Every search walks polar lengths x BCH codes x k_p (and beta where the
scenario leaves it free) and evaluates the closed-form FSR from GA error
probabilities. For one (n_p, outer code) pair the whole k_p sweep is a
single vectorized cumulative sum over the reliability order.

Ties in the objective are broken by a fixed total order, so results do not
depend on iteration order or worker count:
maximize T, then smaller beta, smaller L_PHY, larger k_p, smaller n_p,
smaller n_o, smaller t_o. The target-FSR search minimizes L_PHY, then
prefers higher T, smaller n_p, smaller n_o, larger k_p, smaller t_o.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np

from .analysis import log_p_x
from .bch import OuterCode, UsageError, bch_codes
from .channel import RayleighSpec
from .frame import ConcatenatedScheme
from .polar import ga_analyze, is_power_of_two, polar_construct

N_O_MIN = 7
MAX_M = 9


@dataclass(frozen=True)
class FixedPolarLength:
    n_p: int
    n_o_max: int = 511
    name = "fixed-np"


@dataclass(frozen=True)
class ConstrainedPhy:
    l_phy: int
    n_o_min: int = N_O_MIN
    n_p: int | None = None          # pin the polar length (None searches all)
    name = "phy"


@dataclass(frozen=True)
class ConstrainedMac:
    l_mac: int
    n_p_max: int = 512
    n_o_max: int = 511
    name = "mac"


@dataclass(frozen=True)
class TargetFsr:
    fsr_target: float
    l_mac: int
    n_p_max: int = 512
    n_o_max: int = 511
    name = "target-fsr"


@dataclass(frozen=True)
class Fading:
    inner: Union[FixedPolarLength, ConstrainedPhy]
    spec: RayleighSpec
    name = "fading"


DesignConstraint = Union[FixedPolarLength, ConstrainedPhy, ConstrainedMac, TargetFsr, Fading]


@dataclass
class SearchOptions:
    fsr_mode: str = "exact"         # "exact" or "bound"
    lift_t_bound: bool = False      # allow t_o >= 2^(m-2)
    all_betas: bool = False         # phy: also try every beta below the maximum
    record: bool = False            # keep every evaluated candidate
    workers: int = 1


@dataclass
class DesignResult:
    scenario: dict
    snr_db: float
    feasible: bool
    scheme: ConcatenatedScheme | None = None
    fsr: float = 0.0
    throughput: float = 0.0
    objective: float = 0.0
    degenerate: bool = False        # best design has T = 0 (FSR underflow)
    candidates_evaluated: int = 0
    candidates: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        out = {
            "scenario": self.scenario, "snr_db": self.snr_db, "feasible": self.feasible,
            "fsr": self.fsr, "throughput": self.throughput, "objective": self.objective,
            "degenerate": self.degenerate, "candidates_evaluated": self.candidates_evaluated,
        }
        out["design"] = None if self.scheme is None else self.scheme.describe()
        return out


def scenario_dict(constraint: DesignConstraint) -> dict:
    if isinstance(constraint, Fading):
        return {"name": "fading", "inner": scenario_dict(constraint.inner),
                "avg_snr_db": constraint.spec.avg_snr_db, "states": constraint.spec.states}
    return {"name": constraint.name, **asdict(constraint)}


# -- search spaces ---------------------------------------------------------

def polar_lengths(constraint: DesignConstraint) -> list[int]:
    if isinstance(constraint, Fading):
        return polar_lengths(constraint.inner)
    if isinstance(constraint, FixedPolarLength):
        return [constraint.n_p]
    if isinstance(constraint, ConstrainedPhy):
        if constraint.n_p is not None:
            return [constraint.n_p] if constraint.n_p * constraint.n_o_min <= constraint.l_phy else []
        if constraint.l_phy < constraint.n_o_min:
            return []
        top = int(math.floor(math.log2(constraint.l_phy / constraint.n_o_min)))
        return [2 ** i for i in range(1, top + 1)]
    top = int(math.floor(math.log2(constraint.n_p_max)))
    return [2 ** i for i in range(1, top + 1)]


def outer_lengths(n_p: int, constraint: DesignConstraint) -> list[int]:
    if isinstance(constraint, Fading):
        return outer_lengths(n_p, constraint.inner)
    if isinstance(constraint, ConstrainedPhy):
        # largest j with 2^j - 1 <= l_phy / n_p
        top = (constraint.l_phy // n_p + 1).bit_length() - 1
    else:
        top = int(math.floor(math.log2(constraint.n_o_max + 1)))
    return [2 ** j - 1 for j in range(3, min(top, MAX_M) + 1)]


def enumerate_outer_codes(n_p: int, constraint: DesignConstraint,
                          lift_t_bound: bool = False) -> list[OuterCode]:
    """Every BCH code admitted for polar length ``n_p`` (possibly empty)."""
    codes = []
    for n_o in outer_lengths(n_p, constraint):
        codes.extend(bch_codes(n_o.bit_length(), lift_t_bound))
    return codes


# -- evaluation ------------------------------------------------------------

def _log_fsr_by_kp(eps: np.ndarray, w: np.ndarray, code: OuterCode, mode: str) -> np.ndarray:
    """log FSR (beta = 1) for k_p = 1..n_p; info set = last k_p entries of w."""
    lp = log_p_x(eps[w], code.n_o, code.t_o)
    n = lp.size
    k = np.arange(1, n + 1)
    if mode == "bound":
        return k * lp[n - k]
    if mode != "exact":
        raise UsageError(f"unknown fsr mode {mode!r}")
    return np.cumsum(lp[::-1])


def _block(n_p: int, code: OuterCode, constraint, snr_db: float, opts: SearchOptions):
    """All candidates of one (n_p, outer code) pair as column arrays."""
    inner = constraint.inner if isinstance(constraint, Fading) else constraint
    w, eps = ga_analyze(n_p, snr_db)
    k = np.arange(1, n_p + 1)
    n_o, k_o = code.n_o, code.k_o
    if isinstance(inner, ConstrainedPhy):
        beta_max = inner.l_phy // (n_p * n_o)
        betas = range(1, beta_max + 1) if opts.all_betas else [beta_max]
        beta = np.concatenate([np.full(n_p, b) for b in betas])
        k = np.tile(k, len(betas))
    elif isinstance(inner, FixedPolarLength):
        beta = np.ones(n_p, dtype=np.int64)
    else:
        beta = -(-inner.l_mac // (k_o * k))

    if isinstance(constraint, Fading):
        T = np.zeros(k.size)
        fsr = np.zeros(k.size)
        for s_db, prob in zip(constraint.spec.state_snr_db, constraint.spec.state_prob):
            _, eps_s = ga_analyze(n_p, s_db)
            lf = _log_fsr_by_kp(eps_s, w, code, opts.fsr_mode)[k - 1]
            f = np.exp(beta * lf)
            fsr += prob * f
            T += prob * _objective_T(inner, n_p, k, code, beta, f)
    else:
        lf = _log_fsr_by_kp(eps, w, code, opts.fsr_mode)[k - 1]
        fsr = np.exp(beta * lf)
        T = _objective_T(inner, n_p, k, code, beta, fsr)
    l_phy = beta * n_o * n_p
    return k, beta, l_phy, fsr, T


def _objective_T(inner, n_p, k, code, beta, fsr):
    if isinstance(inner, FixedPolarLength):
        return (code.k_o / code.n_o) * (k / n_p) * fsr
    if isinstance(inner, ConstrainedPhy):
        return beta * code.k_o * k * fsr / inner.l_phy
    return inner.l_mac * fsr / (beta * code.n_o * n_p)


def _search_polar(args):
    n_p, constraint, snr_db, opts = args
    best = None
    count = 0
    rows = []
    target = isinstance(constraint, TargetFsr)
    for code in enumerate_outer_codes(n_p, constraint, opts.lift_t_bound):
        k, beta, l_phy, fsr, T = _block(n_p, code, constraint, snr_db, opts)
        count += k.size
        if opts.record:
            rows.extend(
                {"n_p": n_p, "k_p": int(kk), "n_o": code.n_o, "k_o": code.k_o, "t_o": code.t_o,
                 "beta": int(b), "L_PHY": int(lp), "fsr": float(f), "T": float(t)}
                for kk, b, lp, f, t in zip(k, beta, l_phy, fsr, T))
        if target:
            ok = fsr >= constraint.fsr_target
            if constraint.fsr_target >= 1.0:
                # eps_b > 0 at any finite SNR, so FSR < 1 exactly
                ok[:] = False
            if not ok.any():
                continue
            idx = np.flatnonzero(ok)
            i = idx[np.lexsort((-k[idx], -T[idx], l_phy[idx]))[0]]
            key = (int(l_phy[i]), -float(T[i]), n_p, code.n_o, -int(k[i]), code.t_o)
        else:
            i = np.lexsort((-k, l_phy, beta, -T))[0]
            key = (-float(T[i]), int(beta[i]), int(l_phy[i]), -int(k[i]), n_p, code.n_o, code.t_o)
        cand = (key, n_p, int(k[i]), code, int(beta[i]), float(fsr[i]), float(T[i]))
        if best is None or cand[0] < best[0]:
            best = cand
    return best, count, rows


def find_optimal(constraint: DesignConstraint, snr_db: float, options: SearchOptions | None = None) -> DesignResult:
    """Exhaustive search for ``constraint`` at ``snr_db`` (average SNR for fading)."""
    opts = options or SearchOptions()
    if isinstance(constraint, Fading):
        snr_db = constraint.spec.avg_snr_db
    if isinstance(constraint, TargetFsr) and not 0.0 <= constraint.fsr_target <= 1.0:
        raise UsageError("fsr_target must lie in [0, 1]")
    tasks = [(n_p, constraint, float(snr_db), opts) for n_p in polar_lengths(constraint)]
    if opts.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            parts = list(pool.map(_search_polar, tasks))
    else:
        parts = [_search_polar(t) for t in tasks]

    result = DesignResult(scenario_dict(constraint), float(snr_db), feasible=False)
    result.candidates_evaluated = sum(p[1] for p in parts)
    if opts.record:
        result.candidates = [row for p in parts for row in p[2]]
    bests = [p[0] for p in parts if p[0] is not None]
    if not bests:
        return result
    key, n_p, k_p, code, beta, fsr, T = min(bests, key=lambda c: c[0])
    scheme = ConcatenatedScheme(polar_construct(n_p, k_p, snr_db), code, beta)
    result.feasible = True
    result.scheme = scheme
    result.fsr = fsr
    result.throughput = T
    result.objective = float(scheme.l_phy) if isinstance(constraint, TargetFsr) else T
    result.degenerate = T == 0.0
    if not check_design(constraint, result):  # pragma: no cover
        raise AssertionError("search returned a design violating its constraint")
    return result


def check_design(constraint: DesignConstraint, result: DesignResult) -> bool:
    """Independent re-check that a returned scheme satisfies its constraint."""
    if not result.feasible:
        return True
    s = result.scheme
    inner = constraint.inner if isinstance(constraint, Fading) else constraint
    if isinstance(inner, FixedPolarLength):
        return s.polar.n_p == inner.n_p and s.beta == 1 and s.outer.n_o <= inner.n_o_max
    if isinstance(inner, ConstrainedPhy):
        return s.l_phy <= inner.l_phy and inner.n_p in (None, s.polar.n_p)
    if isinstance(inner, ConstrainedMac):
        return s.l_mac >= inner.l_mac
    return s.l_mac >= inner.l_mac and result.fsr >= inner.fsr_target and inner.fsr_target < 1.0


def design_fixed_polar(n_p: int, snr_db: float, n_o_max: int = 511, **kw) -> DesignResult:
    return find_optimal(FixedPolarLength(n_p, n_o_max), snr_db, SearchOptions(**kw))


def design_constrained_phy(l_phy: int, snr_db: float, n_o_min: int = N_O_MIN,
                           n_p: int | None = None, **kw) -> DesignResult:
    return find_optimal(ConstrainedPhy(l_phy, n_o_min, n_p), snr_db, SearchOptions(**kw))


def design_constrained_mac(l_mac: int, snr_db: float, **kw) -> DesignResult:
    return find_optimal(ConstrainedMac(l_mac), snr_db, SearchOptions(**kw))


def design_target_fsr(snr_db: float, fsr_target: float, l_mac: int, **kw) -> DesignResult:
    return find_optimal(TargetFsr(fsr_target, l_mac), snr_db, SearchOptions(**kw))


def design_fading(inner: Union[FixedPolarLength, ConstrainedPhy], spec: RayleighSpec, **kw) -> DesignResult:
    return find_optimal(Fading(inner, spec), spec.avg_snr_db, SearchOptions(**kw))


def design_sc_baseline(n_p: int, n_cw: int, snr_db: float) -> DesignResult:
    """Rate-optimized plain SC: ``n_cw`` independent blocks, no outer code.

    Maximizes r_p (prod over info bits of (1 - eps_b)) ** n_cw over k_p.
    """
    if not is_power_of_two(n_p) or n_p < 2:
        raise UsageError("n_p must be a power of two")
    if n_cw < 1:
        raise UsageError("n_cw must be >= 1")
    w, eps = ga_analyze(n_p, snr_db)
    with np.errstate(divide="ignore"):
        log_pcw = np.cumsum(np.log1p(-eps[w])[::-1])
    k = np.arange(1, n_p + 1)
    fsr = np.exp(n_cw * log_pcw)
    T = k / n_p * fsr
    i = np.lexsort((-k, -T))[0]
    outer = OuterCode.identity(n_cw)
    scheme = ConcatenatedScheme(polar_construct(n_p, int(k[i]), snr_db), outer, 1)
    scen = {"name": "sc-baseline", "n_p": n_p, "n_cw": n_cw}
    return DesignResult(scen, float(snr_db), True, scheme, float(fsr[i]), float(T[i]),
                        float(T[i]), bool(T[i] == 0.0), n_p)
