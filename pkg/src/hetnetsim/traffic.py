"""Downlink traffic sources and per-flow eNB buffers.

Two workload sources: VoIP (8.4 kbps during exponential ON periods,
one 21-byte packet every 20 ms) and video (25 fps, deterministic GOP-like
frame-size cycle averaging 1210 bytes, i.e. 242 kbps, segmented into
packets of at most 1500 bytes). A constant-bit-rate source exists for
capacity tests and non-realtime scheduling paths.

Packets are buffered FIFO per flow at the serving eNB, carry arrival
timestamps, and are discarded once their delay budget expires.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

MAX_SEGMENT_BYTES = 1500

# Frame-size cycle in bytes: one large I-style frame then five smaller ones,
# chosen so the cycle mean is exactly 1210 bytes -> 242 kbps at 25 fps.
VIDEO_FRAME_CYCLE_BYTES = (2420, 968, 968, 968, 968, 968)


@dataclass
class QosParams:
    delay_threshold_s: float          # tau: HOL delay budget
    max_hol_violation_prob: float     # delta in (0, 1)
    is_realtime: bool = True

    def __post_init__(self):
        if not (self.delay_threshold_s > 0.0):
            raise ValueError(f"delay threshold must be positive, got {self.delay_threshold_s}")
        if not (0.0 < self.max_hol_violation_prob < 1.0):
            raise ValueError(f"HOL violation probability must lie in (0, 1), got {self.max_hol_violation_prob}")


class PacketDescriptor:
    __slots__ = ("flow_id", "size_bits", "arrival_time", "deadline", "remaining_bits")

    def __init__(self, flow_id: int, size_bits: int, arrival_time: float, deadline: float):
        self.flow_id = flow_id
        self.size_bits = size_bits
        self.arrival_time = arrival_time
        self.deadline = deadline
        self.remaining_bits = size_bits

    def __repr__(self):
        return (f"PacketDescriptor(flow={self.flow_id}, size={self.size_bits}b, "
                f"t={self.arrival_time:.3f}, deadline={self.deadline:.3f})")


class VoipSource:
    """Exponential ON/OFF talk-spurt model; packets only during ON."""

    def __init__(self, flow_id: int, rng: np.random.Generator, tti_s: float,
                 packet_bytes: int = 21, period_s: float = 0.02,
                 on_mean_s: float = 3.0, off_mean_s: float = 3.0):
        self.flow_id = flow_id
        self.packet_bits = packet_bytes * 8
        self.period_ttis = max(1, round(period_s / tti_s))
        self._rng = rng
        self._on_mean = on_mean_s
        self._off_mean = off_mean_s
        # stationary start: ON with probability on/(on+off)
        self.is_on = bool(rng.random() < on_mean_s / (on_mean_s + off_mean_s))
        self._next_toggle = rng.exponential(on_mean_s if self.is_on else off_mean_s)

    def _advance(self, t: float):
        while self._next_toggle <= t:
            self.is_on = not self.is_on
            self._next_toggle += self._rng.exponential(self._on_mean if self.is_on else self._off_mean)

    def generate(self, tti_index: int, t: float, deadline_s: float) -> list[PacketDescriptor]:
        if tti_index % self.period_ttis != 0:
            return []  # the ON/OFF state machine catches up at the next emission instant
        self._advance(t)
        if not self.is_on:
            return []
        return [PacketDescriptor(self.flow_id, self.packet_bits, t, t + deadline_s)]


class VideoSource:
    """Fixed-rate frame generator with deterministic frame-size cycle."""

    def __init__(self, flow_id: int, tti_s: float, fps: float = 25.0,
                 frame_cycle_bytes=VIDEO_FRAME_CYCLE_BYTES):
        self.flow_id = flow_id
        self.frame_period_ttis = max(1, round(1.0 / fps / tti_s))
        self.frame_cycle_bits = tuple(int(b) * 8 for b in frame_cycle_bytes)
        self._frame_index = 0

    def generate(self, tti_index: int, t: float, deadline_s: float) -> list[PacketDescriptor]:
        if tti_index % self.frame_period_ttis != 0:
            return []
        frame_bits = self.frame_cycle_bits[self._frame_index % len(self.frame_cycle_bits)]
        self._frame_index += 1
        return segment_frame(self.flow_id, frame_bits, t, t + deadline_s)


class CbrSource:
    """Constant bit rate source; one packet per TTI whenever credit allows."""

    def __init__(self, flow_id: int, rate_kbps: float, tti_s: float, packet_bytes: int = 1500):
        self.flow_id = flow_id
        self.packet_bits = packet_bytes * 8
        self._bits_per_tti = rate_kbps * 1000.0 * tti_s
        self._credit = 0.0

    def generate(self, tti_index: int, t: float, deadline_s: float) -> list[PacketDescriptor]:
        self._credit += self._bits_per_tti
        out = []
        while self._credit >= self.packet_bits:
            self._credit -= self.packet_bits
            out.append(PacketDescriptor(self.flow_id, self.packet_bits, t, t + deadline_s))
        return out


def segment_frame(flow_id: int, frame_bits: int, t: float, deadline: float) -> list[PacketDescriptor]:
    """Split a frame into transport packets of at most MAX_SEGMENT_BYTES."""
    limit = MAX_SEGMENT_BYTES * 8
    packets = []
    remaining = frame_bits
    while remaining > 0:
        size = min(remaining, limit)
        packets.append(PacketDescriptor(flow_id, size, t, deadline))
        remaining -= size
    return packets


def load_video_trace(path) -> tuple[int, ...]:
    """Frame sizes in bytes, one per line, played at the configured fps."""
    sizes = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            size = int(line)
            if size <= 0:
                raise ValueError(f"non-positive frame size in trace: {size}")
            sizes.append(size)
    if not sizes:
        raise ValueError(f"video trace {path} contains no frames")
    return tuple(sizes)


@dataclass
class PerFlowSchedState:
    """Moving-average rate bookkeeping shared by all three schedulers."""

    avg_rate_bps: float               # R_i(t)
    last_served_bps: float = 0.0      # r_i(t-1): 0 unless served at t-1
    window_ttis: int = 1000           # t_c


class FlowQueue:
    """FIFO eNB buffer for one flow plus its QoS and scheduler state."""

    def __init__(self, flow_id: int, ue_id: int, kind: str, qos: QosParams,
                 source, sched: PerFlowSchedState):
        self.flow_id = flow_id
        self.ue_id = ue_id
        self.kind = kind
        self.qos = qos
        self.source = source
        self.sched = sched
        self.packets: deque[PacketDescriptor] = deque()
        self.queued_bits = 0

    def hol_delay(self, now: float) -> float:
        """Age of the oldest buffered packet; 0 for an empty queue."""
        if not self.packets:
            return 0.0
        return now - self.packets[0].arrival_time

    def enqueue(self, packets: list[PacketDescriptor]) -> int:
        """Append packets in arrival order; returns the enqueued bit count."""
        bits = 0
        for p in packets:
            self.packets.append(p)
            bits += p.size_bits
        self.queued_bits += bits
        return bits

    def drop_expired(self, now: float) -> int:
        """Discard every packet whose deadline has passed; returns dropped bits."""
        dropped = 0
        q = self.packets
        while q and q[0].deadline < now:
            dropped += q.popleft().remaining_bits
        # expiry is FIFO-ordered only per deadline class; with per-flow constant
        # thresholds the front packets are always the oldest, so one pass suffices
        self.queued_bits -= dropped
        return dropped

    def drain(self, budget_bits: int, now: float) -> tuple[int, list[float]]:
        """Serve up to budget_bits FIFO; returns (bits served, completed-packet delays)."""
        served = 0
        delays = []
        q = self.packets
        while budget_bits > 0 and q:
            head = q[0]
            take = min(budget_bits, head.remaining_bits)
            head.remaining_bits -= take
            served += take
            budget_bits -= take
            if head.remaining_bits == 0:
                delays.append(now - head.arrival_time)
                q.popleft()
        self.queued_bits -= served
        return served, delays
