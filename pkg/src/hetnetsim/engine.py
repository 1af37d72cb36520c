"""The per-TTI simulation loop.

Every 1 ms TTI runs the same fixed cycle: traffic generation, mobility
and handover, channel sampling into per-RB SNR reports, expiry drops,
per-cell scheduling with queue service, then scheduler-state and metric
updates. A run is a pure function of its RunConfig: the root seed is
split into independent per-domain substreams (placement, mobility,
shadowing, fading, traffic) so disabling one model never perturbs the
draws of another.

Fading streams are evaluated directly at absolute time, so the engine
only computes gains for UEs that currently have backlogged flows; the
skipped evaluations cannot change any result.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import channel, metrics, scheduler, topology, traffic
from .config import TTI_S, RunConfig

# SeedSequence domain tags
_PLACEMENT, _MOBILITY, _SHADOW, _FADING, _TRAFFIC = range(5)

VIDEO = "video"
VOIP = "voip"
CBR = "cbr"


class ConservationError(AssertionError):
    """Byte bookkeeping went out of balance; indicates an engine bug."""


@dataclass
class RunResult:
    config: RunConfig
    summary: dict
    per_flow: list[dict]
    cells: list[topology.CellSite]
    accumulator: metrics.MetricsAccumulator
    tti_trace: list[tuple] = field(default_factory=list)


class Simulation:
    """Mutable state of one run; step() advances exactly one TTI."""

    def __init__(self, cfg: RunConfig):
        cfg.validate()
        self.cfg = cfg
        self.cells = cfg.cells()
        self.n_cells = len(self.cells)
        self.tti = 0
        self.noise_mw = float(channel.dbm_to_mw(channel.noise_dbm_per_rbpair(cfg.noise_figure_db)))
        # total eNB power is spread over the whole carrier: per-RB-pair PSD
        self.rb_split_db = 10.0 * np.log10(cfg.n_rb_pairs)
        self._cell_x = np.array([c.x_m for c in self.cells])
        self._cell_y = np.array([c.y_m for c in self.cells])
        self._cell_tx = np.array([c.tx_power_dbm for c in self.cells])

        n = cfg.n_users
        if cfg.ue_positions is not None:
            self.xs = np.array([p[0] for p in cfg.ue_positions], dtype=float)
            self.ys = np.array([p[1] for p in cfg.ue_positions], dtype=float)
            self.headings = np.zeros(n)
        else:
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _PLACEMENT]))
            ues = topology.place_users(n, self.cells, rng, cfg.ue_speed_mps,
                                       cfg.hotspot_macro_fraction)
            self.xs = np.array([u.x_m for u in ues])
            self.ys = np.array([u.y_m for u in ues])
            self.headings = np.array([u.heading_rad for u in ues])
        self.mobility_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _MOBILITY]))

        self.shadow = channel.ShadowingMap(cfg.seed, _SHADOW, n, self.n_cells,
                                           cfg.shadow_sigma_db if cfg.shadowing_enabled else 0.0,
                                           cfg.shadow_redraw_m)
        self.fading = None
        if cfg.fading_enabled and n > 0:
            from .fading import JakesFading, doppler_frequency_hz
            self.fading = JakesFading(cfg.seed, _FADING, n, cfg.n_rb_pairs,
                                      doppler_frequency_hz(cfg.ue_speed_mps, cfg.carrier_hz),
                                      cfg.fading_oscillators)

        self.flows = self._build_flows()
        self.n_flows = len(self.flows)
        self.acc = metrics.MetricsAccumulator(window_s=cfg.flow_duration_s)
        for f in self.flows:
            self.acc.register_flow(f.flow_id, f.kind)
        self.alphas = np.array([scheduler.mlwdf_alpha(f.qos, cfg.mlwdf_log_base)
                                for f in self.flows])
        self.is_rt = np.array([f.qos.is_realtime for f in self.flows], dtype=bool)
        self.flow_tau = np.array([f.qos.delay_threshold_s for f in self.flows])
        self.flow_ue = np.array([f.ue_id for f in self.flows], dtype=np.int64)
        self.avg_rates = np.full(self.n_flows, cfg.r_init_bps)
        self.cell_state = [scheduler.CellSchedulerState(cfg.exppf_epsilon, cfg.exppf_k,
                                                        cfg.exppf_w_init, cfg.tc_ttis)
                           for _ in self.cells]
        self.serving = self._initial_attachment()
        self._members = self._build_members()
        self.tti_trace: list[tuple] = []
        self.max_cell_bits = cfg.n_rb_pairs * int(channel.MCS_RATE_BITS[-1])

    def _build_flows(self) -> list[traffic.FlowQueue]:
        cfg = self.cfg
        flows = []
        if cfg.traffic_profile == "cbr":
            for ue in range(cfg.n_users):
                qos = traffic.QosParams(cfg.cbr_tau_s, 0.005, cfg.cbr_realtime)
                src = traffic.CbrSource(ue, cfg.cbr_rate_kbps, TTI_S, cfg.cbr_packet_bytes)
                flows.append(traffic.FlowQueue(ue, ue, CBR, qos, src,
                                               traffic.PerFlowSchedState(cfg.r_init_bps,
                                                                         window_ttis=cfg.tc_ttis)))
            return flows
        frame_cycle = traffic.VIDEO_FRAME_CYCLE_BYTES
        if cfg.video_trace:
            frame_cycle = traffic.load_video_trace(cfg.video_trace)
        for ue in range(cfg.n_users):
            vid_id, voip_id = 2 * ue, 2 * ue + 1
            flows.append(traffic.FlowQueue(
                vid_id, ue, VIDEO,
                traffic.QosParams(cfg.video_tau_s, cfg.video_delta, True),
                traffic.VideoSource(vid_id, TTI_S, cfg.video_fps, frame_cycle),
                traffic.PerFlowSchedState(cfg.r_init_bps, window_ttis=cfg.tc_ttis)))
            voip_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _TRAFFIC, voip_id]))
            flows.append(traffic.FlowQueue(
                voip_id, ue, VOIP,
                traffic.QosParams(cfg.voip_tau_s, cfg.voip_delta, True),
                traffic.VoipSource(voip_id, voip_rng, TTI_S, cfg.voip_packet_bytes,
                                   cfg.voip_period_s, cfg.voip_on_mean_s, cfg.voip_off_mean_s),
                traffic.PerFlowSchedState(cfg.r_init_bps, window_ttis=cfg.tc_ttis)))
        return flows

    def _rx_total_dbm(self) -> np.ndarray:
        d_km = np.hypot(self.xs[:, None] - self._cell_x[None, :],
                        self.ys[:, None] - self._cell_y[None, :]) / 1000.0
        return (self._cell_tx[None, :] - channel.pathloss_db_array(d_km)
                - self.cfg.penetration_db - self.shadow.values_db)

    def _initial_attachment(self) -> np.ndarray:
        if self.cfg.n_users == 0:
            return np.zeros(0, dtype=np.int64)
        return np.argmax(self._rx_total_dbm(), axis=1).astype(np.int64)

    def _build_members(self) -> list[np.ndarray]:
        cell_of_flow = self.serving[self.flow_ue] if self.n_flows else np.zeros(0, dtype=np.int64)
        return [np.nonzero(cell_of_flow == c)[0] for c in range(self.n_cells)]

    def step(self) -> None:
        """One full TTI cycle; the clock advances exactly one TTI."""
        cfg = self.cfg
        t = self.tti * TTI_S
        flows = self.flows

        # 1. traffic arrival at the serving eNB
        if t < cfg.flow_duration_s:
            for f in flows:
                pkts = f.source.generate(self.tti, t, f.qos.delay_threshold_s)
                if pkts:
                    self.acc.on_arrival(f.flow_id, f.enqueue(pkts))

        # 2. mobility, shadowing refresh, handover
        if cfg.n_users > 0:
            if cfg.mobility_enabled:
                step_m = topology.move_all(self.xs, self.ys, self.headings, cfg.ue_speed_mps,
                                           TTI_S, cfg.macro_radius_m, self.mobility_rng)
                self.shadow.account_movement(np.full(cfg.n_users, step_m))
            rx_total = self._rx_total_dbm()
            rows = np.arange(cfg.n_users)
            best = np.argmax(rx_total, axis=1)
            switch = (best != self.serving) & (
                rx_total[rows, best] > rx_total[rows, self.serving] + cfg.handover_hysteresis_db)
            if switch.any():
                self.serving[switch] = best[switch]
                self.acc.handovers += int(switch.sum())
                self._members = self._build_members()
        else:
            rx_total = np.zeros((0, self.n_cells))

        # 3. deadline expiry before scheduling
        for f in flows:
            if f.packets:
                dropped = f.drop_expired(t)
                if dropped:
                    self.acc.on_discard(f.flow_id, dropped)

        queue_bits = np.fromiter((f.queued_bits for f in flows), np.int64, self.n_flows)
        hol = np.fromiter((f.hol_delay(t) for f in flows), np.float64, self.n_flows)

        # 4. channel reports for UEs with backlog: per-RB achievable bits
        rates = self._rate_grid(rx_total, queue_bits)

        # 5. per-cell scheduling and service
        served_all = np.zeros(self.n_flows, dtype=np.int64)
        has_data = queue_bits > 0
        for c in range(self.n_cells):
            members = self._members[c]
            if members.size == 0 or not has_data[members].any():
                continue
            scalars = scheduler.metric_scalars(
                cfg.scheduler, self.avg_rates[members], hol[members], self.alphas[members],
                self.is_rt[members], has_data[members], self.cell_state[c])
            grants, served = scheduler.schedule_tti(
                scalars, rates[self.flow_ue[members]], queue_bits[members])
            for local_idx in np.nonzero(served)[0]:
                flow = flows[members[local_idx]]
                bits, delays = flow.drain(int(served[local_idx]), t)
                served_all[members[local_idx]] = bits
                self.acc.on_service(flow.flow_id, bits, delays)
            if cfg.conservation_check and served.sum() > self.max_cell_bits:
                raise ConservationError("cell served more bits than the RB-pair budget allows")
            if cfg.trace_ttis:
                self.tti_trace.append((self.tti, c, int(served.sum()),
                                       int(queue_bits[members].sum() - served.sum()),
                                       int(has_data[members].sum())))

        # 6. state updates: averaged rate per flow, then EXP/PF cell tracking
        w = 1.0 / cfg.tc_ttis
        np.multiply(self.avg_rates, 1.0 - w, out=self.avg_rates)
        self.avg_rates += (w / TTI_S) * served_all
        if cfg.scheduler == "exppf":
            self._update_cell_states(queue_bits, hol)

        if cfg.conservation_check:
            self._check_conservation()
        self.tti += 1

    def _sinr_grid(self, rx_total: np.ndarray, ue_idx: np.ndarray) -> np.ndarray:
        """Per-RB-pair SINR (dB) toward the serving cell for the selected UEs."""
        per_rb_dbm = rx_total[ue_idx] - self.rb_split_db
        per_rb_mw = channel.dbm_to_mw(per_rb_dbm)
        serving_mw = per_rb_mw[np.arange(ue_idx.size), self.serving[ue_idx]]
        interference_mw = per_rb_mw.sum(axis=1) - serving_mw
        if self.fading is not None:
            gains = self.fading.gains_linear_for_ues(self.tti * TTI_S, ue_idx)
            serving_grid = serving_mw[:, None] * gains
        else:
            serving_grid = np.repeat(serving_mw[:, None], self.cfg.n_rb_pairs, axis=1)
        return 10.0 * np.log10(serving_grid / (interference_mw[:, None] + self.noise_mw))

    def _rate_grid(self, rx_total: np.ndarray, queue_bits: np.ndarray) -> np.ndarray:
        """Achievable bits per TTI per RB-pair; rows stay zero for idle UEs."""
        cfg = self.cfg
        rates = np.zeros((cfg.n_users, cfg.n_rb_pairs), dtype=np.int64)
        if cfg.n_users == 0:
            return rates
        active_ue = np.zeros(cfg.n_users, dtype=bool)
        active_ue[self.flow_ue[queue_bits > 0]] = True
        idx = np.nonzero(active_ue)[0]
        if idx.size == 0:
            return rates
        rates[idx] = channel.snr_to_rate_bits(self._sinr_grid(rx_total, idx))
        return rates

    def link_states(self) -> list[channel.LinkState]:
        """Idealized per-UE channel reports for the current TTI."""
        if self.cfg.n_users == 0:
            return []
        idx = np.arange(self.cfg.n_users)
        sinr = self._sinr_grid(self._rx_total_dbm(), idx)
        return [channel.LinkState(int(ue), int(self.serving[ue]), tuple(sinr[ue]))
                for ue in idx]

    def _update_cell_states(self, queue_bits: np.ndarray, hol: np.ndarray) -> None:
        """EXP/PF w(t) from the worst pre-service realtime HOL; M(t) from the
        post-service buffer occupancy."""
        lengths = np.fromiter((len(f.packets) for f in self.flows), np.int64, self.n_flows)
        for c in range(self.n_cells):
            members = self._members[c]
            if members.size == 0:
                continue
            rt = members[self.is_rt[members]]
            if rt.size == 0:
                continue
            backlogged = rt[queue_bits[rt] > 0]
            w_max = float(hol[backlogged].max()) if backlogged.size else 0.0
            tau_max = float(self.flow_tau[rt].max())
            self.cell_state[c].update(w_max, tau_max, int(lengths[members].sum()))

    def _check_conservation(self) -> None:
        for f in self.flows:
            c = self.acc.flows[f.flow_id]
            if c.arrived_bits != c.transmitted_bits + c.discarded_bits + f.queued_bits:
                raise ConservationError(
                    f"flow {f.flow_id} at TTI {self.tti}: arrived {c.arrived_bits} != "
                    f"tx {c.transmitted_bits} + drop {c.discarded_bits} + queued {f.queued_bits}")

    def run(self) -> RunResult:
        started = time.perf_counter()
        for _ in range(self.cfg.n_ttis):
            self.step()
        wall = time.perf_counter() - started
        for i, f in enumerate(self.flows):  # expose final scheduler state per flow
            f.sched.avg_rate_bps = float(self.avg_rates[i])
        summary = metrics.summarize(self.acc, self.cfg.fairness_denominator)
        summary.update(scenario=self.cfg.scenario, algorithm=self.cfg.scheduler,
                       users=self.cfg.n_users, seed=self.cfg.seed, wall_time_s=wall)
        per_flow = [{
            "flow_id": f.flow_id, "ue_id": f.ue_id, "kind": f.kind,
            "arrived_bits": self.acc.flows[f.flow_id].arrived_bits,
            "transmitted_bits": self.acc.flows[f.flow_id].transmitted_bits,
            "discarded_bits": self.acc.flows[f.flow_id].discarded_bits,
            "mean_delay_ms": 1000.0 * self.acc.flows[f.flow_id].mean_delay_s,
        } for f in self.flows]
        return RunResult(self.cfg, summary, per_flow, self.cells, self.acc, self.tti_trace)


def tti_step(sim: Simulation) -> Simulation:
    """Advance a simulation by one TTI (module-level alias of Simulation.step)."""
    sim.step()
    return sim


def run_simulation(cfg: RunConfig) -> RunResult:
    """Execute a full run; bit-identical output for identical config and seed."""
    return Simulation(cfg).run()
