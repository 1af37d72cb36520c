"""Run metrics: throughput, packet loss ratio, fairness and delay statistics.

Counters are exact integer bit sums per flow, so the conservation
identity arrived == transmitted + discarded + buffered can be asserted
at every TTI. Reported figures follow the evaluation conventions:
throughput aggregates all traffic, while PLR, delay and fairness are
reported for the video class.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FlowCounters:
    kind: str
    arrived_bits: int = 0       # psize
    transmitted_bits: int = 0   # ptransmit
    discarded_bits: int = 0     # pdiscard
    delay_sum_s: float = 0.0    # over fully transmitted packets
    delay_count: int = 0
    max_delay_s: float = 0.0

    @property
    def mean_delay_s(self) -> float:
        return self.delay_sum_s / self.delay_count if self.delay_count else 0.0


@dataclass
class MetricsAccumulator:
    window_s: float                      # T of the rate formulas
    flows: dict[int, FlowCounters] = field(default_factory=dict)
    handovers: int = 0

    def register_flow(self, flow_id: int, kind: str) -> None:
        self.flows[flow_id] = FlowCounters(kind)

    def on_arrival(self, flow_id: int, bits: int) -> None:
        self.flows[flow_id].arrived_bits += bits

    def on_discard(self, flow_id: int, bits: int) -> None:
        self.flows[flow_id].discarded_bits += bits

    def on_service(self, flow_id: int, bits: int, completed_delays_s) -> None:
        c = self.flows[flow_id]
        c.transmitted_bits += bits
        for d in completed_delays_s:
            c.delay_sum_s += d
            c.delay_count += 1
            if d > c.max_delay_s:
                c.max_delay_s = d

    def select(self, kind: str | None = None) -> list[FlowCounters]:
        if kind is None:
            return list(self.flows.values())
        return [c for c in self.flows.values() if c.kind == kind]


def throughput(acc: MetricsAccumulator, kind: str | None = None) -> float:
    """Aggregate transmitted bits over the measurement window, in bits/s."""
    return sum(c.transmitted_bits for c in acc.select(kind)) / acc.window_s


def plr(acc: MetricsAccumulator, kind: str | None = None) -> float:
    """Discarded over arrived bits; 0 when nothing arrived."""
    counters = acc.select(kind)
    arrived = sum(c.arrived_bits for c in counters)
    if arrived == 0:
        return 0.0
    return sum(c.discarded_bits for c in counters) / arrived


def fairness_spread(acc: MetricsAccumulator, kind: str | None = "video",
                   denominator: str = "arrived") -> float:
    """1 - (max - min transmitted across flows) / total arrived (or transmitted).

    Value is 1 exactly when every flow moved the same number of bits; the
    denominator variant is a config switch because the source formula is
    ambiguous between arrived and transmitted totals.
    """
    counters = acc.select(kind)
    if not counters:
        return 1.0
    transmitted = [c.transmitted_bits for c in counters]
    if denominator == "arrived":
        total = sum(c.arrived_bits for c in counters)
    elif denominator == "transmitted":
        total = sum(transmitted)
    else:
        raise ValueError(f"unknown fairness denominator {denominator!r}")
    if total == 0:
        return 1.0
    return 1.0 - (max(transmitted) - min(transmitted)) / total


def jain_index(per_flow_throughputs) -> float:
    """Jain's fairness (sum x)^2 / (n * sum x^2); 1 for an all-equal or empty vector."""
    x = np.asarray(list(per_flow_throughputs), dtype=float)
    if x.size == 0:
        return 1.0
    if np.any(x < 0):
        raise ValueError("throughputs must be non-negative")
    sum_sq = float(np.sum(x * x))
    if sum_sq == 0.0:
        return 1.0
    s = float(np.sum(x))
    return s * s / (x.size * sum_sq)


def delay_stats(acc: MetricsAccumulator, kind: str | None = "video") -> float:
    """Mean queuing delay in seconds of fully transmitted packets of a class."""
    counters = acc.select(kind)
    total = sum(c.delay_sum_s for c in counters)
    count = sum(c.delay_count for c in counters)
    return total / count if count else 0.0


def per_flow_throughputs(acc: MetricsAccumulator, kind: str | None = "video") -> list[float]:
    return [c.transmitted_bits / acc.window_s for c in acc.select(kind)]


def summarize(acc: MetricsAccumulator, fairness_denominator: str = "arrived") -> dict:
    """The per-run summary row consumed by the CSV writer and the sweep harness."""
    all_counters = acc.select()
    return {
        "throughput_bps_total": throughput(acc),
        "throughput_bps_video": throughput(acc, "video"),
        "plr_video": plr(acc, "video"),
        "delay_ms_video_mean": 1000.0 * delay_stats(acc, "video"),
        "fairness_eq11_video": fairness_spread(acc, "video", fairness_denominator),
        "jain_video": jain_index(per_flow_throughputs(acc, "video")),
        "handovers": acc.handovers,
        "dropped_bits": sum(c.discarded_bits for c in all_counters),
        "transmitted_bits": sum(c.transmitted_bits for c in all_counters),
        "arrived_bits": sum(c.arrived_bits for c in all_counters),
    }
