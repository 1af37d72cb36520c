"""PF, MLWDF and EXP/PF metrics plus the per-TTI RB-pair allocation loop.

All three schedulers rank backlogged flows per RB-pair with a metric of
the form scalar_i * r_i(rb), where r_i(rb) is the flow's achievable rate
on that RB-pair and scalar_i collects the per-flow terms:

    PF       scalar = 1 / R_i
    MLWDF    scalar = a_i * W_i / R_i
    EXP/PF   scalar = exp((a_i*W_i - aw_bar) / (1 + sqrt(aw_bar))) / R_i   (realtime)
             scalar = w / (M * R_i)                                        (non-realtime)

R_i is the exponentially averaged served rate, W_i the head-of-line
delay, a_i = -log(delta_i)/tau_i. The allocation loop walks RB-pairs in
index order, grants each to the argmax flow (ties to the lowest flow id)
and drains that flow's backlog by the RB-pair capacity, so a flow
emptied mid-TTI stops competing for the remaining RB-pairs.
"""

import math

import numpy as np

from .accel import select_kernel
from .traffic import QosParams

ALGORITHMS = ("pf", "mlwdf", "exppf")


def pf_metric(achievable_rate_bps: float, avg_rate_bps: float) -> float:
    """Rate-normalized PF priority r_i/R_i."""
    return achievable_rate_bps / avg_rate_bps


def update_avg_rate(avg_rate_bps: float, served_rate_bps: float, window_ttis: int) -> float:
    """One moving-average step; served_rate is 0 for a TTI without service."""
    w = 1.0 / window_ttis
    return (1.0 - w) * avg_rate_bps + w * served_rate_bps


def mlwdf_alpha(qos: QosParams, log_base: str = "e") -> float:
    """QoS weight a_i = -log(delta_i)/tau_i; natural log by default."""
    log = math.log(qos.max_hol_violation_prob)
    if log_base == "10":
        log /= math.log(10.0)
    elif log_base != "e":
        raise ValueError(f"unknown log base {log_base!r} (use 'e' or '10')")
    return -log / qos.delay_threshold_s


def mlwdf_metric(achievable_rate_bps: float, avg_rate_bps: float,
                 hol_delay_s: float, alpha: float) -> float:
    """Delay-weighted PF priority a_i * W_i * r_i / R_i."""
    return alpha * hol_delay_s * achievable_rate_bps / avg_rate_bps


def compute_aw_bar(aw_products) -> float:
    """Mean of a_i*W_i over the realtime flows with queued data; 0 if none."""
    products = list(aw_products)
    if not products:
        return 0.0
    return float(sum(products)) / len(products)


def exppf_rt_scalar(aw_product: float, aw_bar: float) -> float:
    return math.exp((aw_product - aw_bar) / (1.0 + math.sqrt(aw_bar)))


def exppf_metric(achievable_rate_bps: float, avg_rate_bps: float, is_realtime: bool,
                 hol_delay_s: float, alpha: float, aw_bar: float,
                 w: float, avg_buffer_packets: float) -> float:
    """EXP/PF priority; realtime flows use the exponential branch, others w/M."""
    ratio = achievable_rate_bps / avg_rate_bps
    if is_realtime:
        return exppf_rt_scalar(alpha * hol_delay_s, aw_bar) * ratio
    return w / max(avg_buffer_packets, 1.0) * ratio


def exppf_update_w(w: float, epsilon: float, k_const: float,
                   w_max_hol_s: float, tau_max_s: float) -> float:
    """Adapt the non-realtime weight w(t) from the worst realtime HOL delay."""
    if w_max_hol_s > tau_max_s:
        w = w - epsilon
    elif w_max_hol_s < tau_max_s:
        w = w + epsilon / k_const
    return max(w, epsilon)


def _allocate_numpy(scalars, rates_bits, queue_bits):
    n_flows, n_rbs = rates_bits.shape
    grants = np.full(n_rbs, -1, dtype=np.int64)
    served = np.zeros(n_flows, dtype=np.int64)
    remaining = queue_bits.copy()
    for rb in range(n_rbs):
        rates_rb = rates_bits[:, rb]
        eligible = (remaining > 0) & (rates_rb > 0)
        if not eligible.any():
            continue
        metric = np.where(eligible, scalars * rates_rb, -1.0)
        best = int(np.argmax(metric))  # first max -> lowest flow id on ties
        grants[rb] = best
        take = min(int(rates_rb[best]), int(remaining[best]))
        remaining[best] -= take
        served[best] += take
    return grants, served


def _allocate_loop(scalars, rates_bits, queue_bits):
    n_flows, n_rbs = rates_bits.shape
    grants = np.full(n_rbs, -1, dtype=np.int64)
    served = np.zeros(n_flows, dtype=np.int64)
    remaining = queue_bits.copy()
    for rb in range(n_rbs):
        best = -1
        best_metric = -1.0
        for f in range(n_flows):
            if remaining[f] > 0 and rates_bits[f, rb] > 0:
                metric = scalars[f] * rates_bits[f, rb]
                if metric > best_metric:
                    best_metric = metric
                    best = f
        if best >= 0:
            grants[rb] = best
            take = rates_bits[best, rb]
            if remaining[best] < take:
                take = remaining[best]
            remaining[best] -= take
            served[best] += take
    return grants, served


allocate_rb_pairs = select_kernel(_allocate_loop, _allocate_numpy)


class CellSchedulerState:
    """Per-cell EXP/PF bookkeeping (w weight and smoothed buffer occupancy)."""

    def __init__(self, epsilon: float = 0.02, k_const: float = 10.0,
                 w_init: float = 1.0, window_ttis: int = 1000):
        self.epsilon = epsilon
        self.k_const = k_const
        self.w = w_init
        self.window_ttis = window_ttis
        self.avg_buffer_packets = 0.0  # M(t)

    def update(self, w_max_hol_s: float, tau_max_s: float, queued_packets: int) -> None:
        self.w = exppf_update_w(self.w, self.epsilon, self.k_const, w_max_hol_s, tau_max_s)
        step = 1.0 / self.window_ttis
        self.avg_buffer_packets = (1.0 - step) * self.avg_buffer_packets + step * queued_packets


def metric_scalars(algorithm: str, avg_rates_bps: np.ndarray, hol_delays_s: np.ndarray,
                   alphas: np.ndarray, is_realtime: np.ndarray, has_data: np.ndarray,
                   cell_state: CellSchedulerState) -> np.ndarray:
    """Per-flow scalar metric factors for one cell and TTI.

    The per-RB metric is scalars * rate(rb); the achievable rate carries
    the r_i term, so only 1/R_i and the delay weights live here.
    """
    inv_r = 1.0 / avg_rates_bps
    if algorithm == "pf":
        return inv_r
    aw = alphas * hol_delays_s
    if algorithm == "mlwdf":
        return aw * inv_r
    if algorithm == "exppf":
        rt_queued = is_realtime & has_data
        aw_bar = compute_aw_bar(aw[rt_queued])
        denom = 1.0 + math.sqrt(aw_bar)
        scalars = np.where(is_realtime,
                           np.exp((aw - aw_bar) / denom),
                           cell_state.w / max(cell_state.avg_buffer_packets, 1.0))
        return scalars * inv_r
    raise ValueError(f"unknown scheduling algorithm {algorithm!r}")


def schedule_tti(scalars: np.ndarray, rates_bits: np.ndarray,
                 queue_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Allocate one cell's RB-pairs for one TTI.

    rates_bits is (n_flows, n_rbs). Returns (grants, served_bits):
    grants[rb] is the granted flow index or -1 for an idle RB-pair;
    served_bits[f] is the backlog drained per flow.
    """
    n_flows, n_rbs = rates_bits.shape
    if n_flows == 0:
        return np.full(n_rbs, -1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return allocate_rb_pairs(
        np.ascontiguousarray(scalars, dtype=np.float64),
        np.ascontiguousarray(rates_bits, dtype=np.int64),
        np.ascontiguousarray(queue_bits, dtype=np.int64),
    )
