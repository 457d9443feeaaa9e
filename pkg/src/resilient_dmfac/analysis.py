"""Feasibility conditions, closed-form UUB bounds and empirical rates from traces."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .engine import SimTrace, leader_omega
from .topology import CommGraph, max_row_gain
from .twin_layer import MfacGains


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class ConditionReport:
    tl_gain_value: float
    tl_gain_pass: bool
    beta_bound: float
    beta_pass: bool
    cpl_gain_value: float
    cpl_gain_pass: bool

    @property
    def all_pass(self) -> bool:
        return self.tl_gain_pass and self.beta_pass and self.cpl_gain_pass


def beta_threshold(alpha1: float, alpha2: float) -> float:
    """Largest DoS rate beta for which the switched error recursion still contracts."""
    return -math.log(alpha1) / (math.log(alpha2) - math.log(alpha1))


def check_conditions(b_t: float, b_c: float, tl_gains: MfacGains, cpl_gains: MfacGains,
                     graph: CommGraph, alpha1: float, alpha2: float,
                     beta: float) -> ConditionReport:
    if not 0 < alpha1 < 1:
        raise AnalysisError(f"alpha1 must lie in (0, 1), got {alpha1}")
    if not alpha2 > 1:
        raise AnalysisError(f"alpha2 must exceed 1, got {alpha2}")
    if not 0 < beta < 1:
        raise AnalysisError(f"beta must lie in (0, 1), got {beta}")
    tl_value = b_t * tl_gains.gamma * max_row_gain(graph) / (2.0 * math.sqrt(tl_gains.lam))
    bound = beta_threshold(alpha1, alpha2)
    cpl_value = cpl_gains.gamma * b_c / (2.0 * math.sqrt(cpl_gains.lam))
    return ConditionReport(
        tl_gain_value=tl_value, tl_gain_pass=tl_value < 1,
        beta_bound=bound, beta_pass=beta < bound < 1,
        cpl_gain_value=cpl_value, cpl_gain_pass=0 < cpl_value < 1,
    )


def compute_bt(M: float, beta: float, alpha1: float, alpha2: float, omega: float) -> float:
    """Twin-layer ultimate bound on max_i |e~_i| for a DoS budget (M, beta)."""
    la1, la2 = math.log(alpha1), math.log(alpha2)
    rate = la1 + beta * (la2 - la1)
    if rate >= 0:
        raise AnalysisError(
            f"bound undefined: ln(alpha1) + beta*(ln(alpha2) - ln(alpha1)) = {rate:g} >= 0")
    return math.exp((la2 - la1) * M) / (1.0 - math.exp(rate)) * omega


def compute_b(bt: float, b_c: float, d_bar: float, alpha: float, omega: float) -> float:
    """Cyber-physical ultimate bound B = B_t + (2 b_c d_bar + alpha*Omega)/(1 - alpha)."""
    if not 0 < alpha < 1:
        raise AnalysisError(f"alpha must lie in (0, 1), got {alpha}")
    return bt + (2.0 * b_c * d_bar + alpha * omega) / (1.0 - alpha)


def _max_abs(errors: np.ndarray) -> np.ndarray:
    return np.max(np.abs(errors), axis=1)


def _max_ratio(emax, mask, floor):
    ks = np.flatnonzero(mask[:-1] & (emax[:-1] > floor))
    if ks.size == 0:
        return None, 0
    return float(np.max(emax[ks + 1] / emax[ks])), int(ks.size)


def estimate_rates(trace: SimTrace, floor: Optional[float] = None) -> tuple:
    """Empirical contraction (clean steps) and expansion (attacked steps) rates of e~_max.

    Only steps with ``e~_max(k) > floor`` count; the default floor is ten times
    the largest leader increment, which keeps the additive leader-motion term
    from dominating the ratio.
    """
    if floor is None:
        floor = 10.0 * leader_omega(trace)
    emax = _max_abs(trace.etl)
    clean = trace.psi == 1
    alpha1, n1 = _max_ratio(emax, clean, floor)
    alpha2, n2 = _max_ratio(emax, ~clean, floor)
    if alpha1 is None or alpha2 is None:
        raise AnalysisError(
            f"too few qualifying steps above floor {floor:g}: {n1} clean, {n2} attacked")
    return alpha1, alpha2


def estimate_cpl_rate(trace: SimTrace, floor: Optional[float] = None) -> float:
    """Contraction rate of the cyber-physical error max_i |e_i| over all steps."""
    if floor is None:
        floor = 10.0 * leader_omega(trace)
    emax = _max_abs(trace.e)
    alpha, n = _max_ratio(emax, np.ones(trace.n_steps, dtype=bool), floor)
    if alpha is None:
        raise AnalysisError(f"no step has max |e_i| above floor {floor:g}")
    return alpha


def measure_uub(trace: SimTrace, transient_cut: int) -> tuple:
    """(sup max_i |e~_i|, sup max_i |e_i|) over steps k >= transient_cut."""
    if not 0 <= transient_cut < trace.n_steps:
        raise AnalysisError(f"transient cut {transient_cut} outside trace of {trace.n_steps} steps")
    return (float(np.max(_max_abs(trace.etl[transient_cut:]))),
            float(np.max(_max_abs(trace.e[transient_cut:]))))


def default_transient_cut(trace: SimTrace, margin: int = 50) -> int:
    """Step after the last DoS interval plus ``margin`` (``margin`` when DoS-free)."""
    attacked = np.flatnonzero(trace.psi[1:] == 0) + 1
    end = int(attacked[-1]) + 1 if attacked.size else 0
    return min(end + margin, trace.n_steps - 1)


@dataclass
class BoundReport:
    omega: float
    alpha1: float
    alpha2: float
    alpha_cpl: float
    bt_analytic: float
    b_analytic: float
    bt_observed: float
    b_observed: float
    transient_cut: int
    bt_within_analytic: bool
    b_within_analytic: bool

    def as_dict(self) -> dict:
        return asdict(self)


def bound_report(trace: SimTrace, M: float, beta: float, b_c: float, d_bar: float,
                 transient_cut: Optional[int] = None, margin: int = 50) -> BoundReport:
    """Observed versus analytic bounds for one run.

    Rates that cannot be estimated, or that make a closed form undefined, are
    reported as NaN / infinite bounds rather than raised.
    """
    omega = leader_omega(trace)
    cut = default_transient_cut(trace, margin) if transient_cut is None else transient_cut
    bt_obs, b_obs = measure_uub(trace, cut)
    try:
        alpha1, alpha2 = estimate_rates(trace)
    except AnalysisError:
        alpha1 = alpha2 = math.nan
    try:
        alpha_cpl = estimate_cpl_rate(trace)
    except AnalysisError:
        alpha_cpl = math.nan
    try:
        bt = compute_bt(M, beta, alpha1, alpha2, omega)
    except (AnalysisError, ValueError):
        bt = math.inf
    if math.isnan(bt):
        bt = math.inf
    try:
        b = compute_b(bt, b_c, d_bar, alpha_cpl, omega)
    except AnalysisError:
        b = math.inf
    return BoundReport(omega=omega, alpha1=alpha1, alpha2=alpha2, alpha_cpl=alpha_cpl,
                       bt_analytic=bt, b_analytic=b, bt_observed=bt_obs, b_observed=b_obs,
                       transient_cut=cut, bt_within_analytic=bt_obs <= bt,
                       b_within_analytic=b_obs <= b)


def format_report(report) -> str:
    """Flat ``key = value`` text, one entry per line."""
    items = asdict(report)
    lines = []
    for key, value in items.items():
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = format(value, ".17g")
        else:
            text = str(value)
        lines.append(f"{key} = {text}")
    if isinstance(report, ConditionReport):
        lines.append(f"all_pass = {'true' if report.all_pass else 'false'}")
    return "\n".join(lines) + "\n"
