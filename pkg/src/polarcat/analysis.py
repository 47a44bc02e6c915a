"""Closed-form frame-success and throughput predictors built on GA error
probabilities."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import bdtrc

from .bch import UsageError
from .channel import RayleighSpec
from .frame import ConcatenatedScheme
from .polar import ga_analyze

LOG_FLOOR = -700.0


class Scenario(str, enum.Enum):
    UNCONSTRAINED = "unconstrained"
    PHY = "phy"
    MAC = "mac"


def log_p_x(eps, n_o: int, t_o: int):
    """log P(at most t_o errors among n_o Bernoulli(eps) bits)."""
    eps = np.asarray(eps, dtype=np.float64)
    if t_o >= n_o:
        return np.zeros_like(eps)
    tail = bdtrc(t_o, n_o, np.clip(eps, 0.0, 1.0))
    with np.errstate(divide="ignore"):
        return np.log1p(-tail)


def p_x(eps, n_o: int, t_o: int):
    """Probability that a length-``n_o`` column holds at most ``t_o`` errors."""
    if not 0 <= t_o <= n_o:
        raise UsageError("need 0 <= t_o <= n_o")
    out = np.exp(log_p_x(eps, n_o, t_o))
    return float(out) if np.ndim(out) == 0 else out


def _finish(log_fsr: float) -> tuple[float, bool]:
    if log_fsr < LOG_FLOOR:
        return 0.0, True
    return float(np.exp(log_fsr)), False


def info_eps(scheme: ConcatenatedScheme, snr_db: float | None = None) -> np.ndarray:
    """GA error probabilities of the scheme's information channels."""
    code = scheme.polar
    if snr_db is None:
        if code.snr_db is None:
            raise UsageError("no SNR given and the polar code carries none")
        snr_db = code.snr_db
    _, eps = ga_analyze(code.n_p, snr_db)
    return eps[code.info_positions]


def log_fsr_fec_assisted(scheme, eps_by_info_bit) -> float:
    eps = np.asarray(eps_by_info_bit, dtype=np.float64)
    if eps.size != scheme.polar.k_p:
        raise UsageError(f"need {scheme.polar.k_p} eps values, got {eps.size}")
    return float(scheme.beta * log_p_x(eps, scheme.outer.n_o, scheme.outer.t_o).sum())


def fsr_fec_assisted(scheme, eps_by_info_bit) -> float:
    """FSR = (prod over info bits of P_x(eps_b)) ** beta."""
    return _finish(log_fsr_fec_assisted(scheme, eps_by_info_bit))[0]


def fsr_lower_bound(scheme, eps_worst: float) -> float:
    """Every info channel replaced by the least reliable one."""
    lp = float(log_p_x(eps_worst, scheme.outer.n_o, scheme.outer.t_o))
    return _finish(scheme.beta * scheme.polar.k_p * lp)[0]


def fsr_sc_baseline(scheme, eps_by_info_bit) -> float:
    """(prod (1 - eps_b)) ** N_cw with N_cw = beta * n_o."""
    eps = np.asarray(eps_by_info_bit, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_pcw = float(np.log1p(-eps).sum())
    return _finish(scheme.n_cw * log_pcw)[0]


def throughput(scheme: ConcatenatedScheme, fsr: float, scenario=Scenario.UNCONSTRAINED,
               l_phy: int | None = None, l_mac: int | None = None) -> float:
    """Effective throughput under ``scenario``.

    unconstrained: r_o r_p FSR; phy: beta k_o k_p FSR / L_PHY (budget);
    mac: L_MAC FSR / (beta n_o n_p).
    """
    scenario = Scenario(scenario)
    if scenario is Scenario.UNCONSTRAINED:
        return scheme.rate * fsr
    if scenario is Scenario.PHY:
        budget = scheme.l_phy if l_phy is None else l_phy
        if scheme.l_phy > budget:
            raise UsageError(f"scheme needs {scheme.l_phy} bits, budget is {budget}")
        return scheme.l_mac * fsr / budget
    payload = scheme.l_mac if l_mac is None else l_mac
    if scheme.l_mac < payload:
        raise UsageError(f"scheme carries {scheme.l_mac} bits, {payload} required")
    return payload * fsr / scheme.l_phy


@dataclass(frozen=True)
class ThroughputReport:
    snr_db: float
    eps: tuple[float, ...]
    fsr: float
    fsr_lower_bound: float
    fsr_sc_baseline: float
    throughput: float
    underflow: bool


def analyze_scheme(scheme: ConcatenatedScheme, snr_db: float, scenario=Scenario.UNCONSTRAINED,
                   l_phy=None, l_mac=None) -> ThroughputReport:
    eps = info_eps(scheme, snr_db)
    fsr, underflow = _finish(log_fsr_fec_assisted(scheme, eps))
    worst = float(eps.max()) if eps.size else 0.0
    return ThroughputReport(
        float(snr_db), tuple(float(e) for e in eps), fsr,
        fsr_lower_bound(scheme, worst), fsr_sc_baseline(scheme, eps),
        throughput(scheme, fsr, scenario, l_phy, l_mac), underflow)


def throughput_fading(scheme: ConcatenatedScheme, spec: RayleighSpec, scenario=Scenario.UNCONSTRAINED,
                      l_phy=None, l_mac=None) -> float:
    """Sum over states of Pr{s} * T(state mean SNR); information set fixed."""
    total = 0.0
    for snr_db, prob in zip(spec.state_snr_db, spec.state_prob):
        fsr = fsr_fec_assisted(scheme, info_eps(scheme, snr_db))
        total += prob * throughput(scheme, fsr, scenario, l_phy, l_mac)
    return total
