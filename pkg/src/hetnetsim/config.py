"""Run and sweep configuration: defaults, JSON loading and validation.

Defaults reproduce the evaluation setup: 30 s simulations with 20 s
flows, 10 MHz / 50 RB-pairs, a 49 dBm macro of 1 km radius with two
30 dBm picos of 0.1 km on its edge, users at 3 km/h each carrying one
VoIP (8.4 kbps ON/OFF) and one video (242 kbps) flow.
"""

import dataclasses
import json
from dataclasses import dataclass, field

from .channel import InvalidGeometryError
from .scheduler import ALGORITHMS
from .topology import build_scenario

SCENARIOS = ("macro", "hetnet")
TRAFFIC_PROFILES = ("mixed", "cbr")

TTI_S = 0.001
SLOT_S = 0.0005


class ConfigError(ValueError):
    """A configuration file or override set that cannot produce a valid run."""


@dataclass
class RunConfig:
    scenario: str = "hetnet"
    scheduler: str = "pf"
    n_users: int = 10
    seed: int = 1

    sim_duration_s: float = 30.0
    flow_duration_s: float = 20.0

    # radio
    n_rb_pairs: int = 50
    macro_power_dbm: float = 49.0
    macro_radius_m: float = 1000.0
    pico_power_dbm: float = 30.0
    pico_radius_m: float = 100.0
    n_picos: int = 2
    pico_ring_fraction: float = 0.9
    carrier_hz: float = 2.0e9
    noise_figure_db: float = 9.0
    penetration_db: float = 10.0
    shadow_sigma_db: float = 10.0
    shadow_redraw_m: float = 50.0
    shadowing_enabled: bool = True
    fading_enabled: bool = True
    fading_oscillators: int = 8

    # users and mobility
    ue_speed_kmh: float = 3.0
    mobility_enabled: bool = True
    hotspot_macro_fraction: float = 0.5
    handover_hysteresis_db: float = 1.0
    ue_positions: list | None = None   # explicit [x, y] pins, overrides placement

    # traffic
    traffic_profile: str = "mixed"
    voip_packet_bytes: int = 21
    voip_period_s: float = 0.02
    voip_on_mean_s: float = 3.0
    voip_off_mean_s: float = 3.0
    voip_tau_s: float = 0.1
    voip_delta: float = 0.005
    video_fps: float = 25.0
    video_trace: str | None = None
    video_tau_s: float = 0.1
    video_delta: float = 0.005
    cbr_rate_kbps: float = 50000.0
    cbr_packet_bytes: int = 1500
    cbr_tau_s: float = 10.0
    cbr_realtime: bool = False

    # scheduler constants
    tc_ttis: int = 1000
    r_init_bps: float = 1.0
    exppf_epsilon: float = 0.02
    exppf_k: float = 10.0
    exppf_w_init: float = 1.0
    mlwdf_log_base: str = "e"

    # reporting
    fairness_denominator: str = "arrived"
    conservation_check: bool = False
    trace_ttis: bool = False

    @property
    def ue_speed_mps(self) -> float:
        return self.ue_speed_kmh / 3.6

    @property
    def n_ttis(self) -> int:
        return round(self.sim_duration_s / TTI_S)

    def validate(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.scheduler not in ALGORITHMS:
            raise ConfigError(f"scheduler must be one of {ALGORITHMS}, got {self.scheduler!r}")
        if self.traffic_profile not in TRAFFIC_PROFILES:
            raise ConfigError(f"traffic_profile must be one of {TRAFFIC_PROFILES}")
        if self.n_users < 0:
            raise ConfigError("n_users must be non-negative")
        if self.sim_duration_s <= 0 or self.flow_duration_s <= 0:
            raise ConfigError("durations must be positive")
        if self.n_rb_pairs < 1:
            raise ConfigError("need at least one RB-pair")
        if self.pico_radius_m >= self.macro_radius_m:
            raise ConfigError("pico radius must be smaller than the macro radius")
        if not 0.0 <= self.hotspot_macro_fraction <= 1.0:
            raise ConfigError("hotspot_macro_fraction must lie in [0, 1]")
        for name in ("voip_delta", "video_delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie strictly between 0 and 1, got {v}")
        for name in ("voip_tau_s", "video_tau_s", "cbr_tau_s"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.tc_ttis < 1:
            raise ConfigError("tc_ttis must be at least 1")
        if self.r_init_bps <= 0.0:
            raise ConfigError("r_init_bps must be positive")
        if self.mlwdf_log_base not in ("e", "10"):
            raise ConfigError("mlwdf_log_base must be 'e' or '10'")
        if self.fairness_denominator not in ("arrived", "transmitted"):
            raise ConfigError("fairness_denominator must be 'arrived' or 'transmitted'")
        if self.fading_oscillators < 8:
            raise ConfigError("fading_oscillators must be at least 8")
        if self.ue_positions is not None:
            if len(self.ue_positions) != self.n_users:
                raise ConfigError("ue_positions must list one [x, y] per user")
            for p in self.ue_positions:
                if len(p) != 2:
                    raise ConfigError("each pinned position must be [x, y] in meters")
        try:
            self.cells()
        except InvalidGeometryError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def cells(self):
        return build_scenario(
            self.scenario, self.n_picos, self.macro_power_dbm, self.macro_radius_m,
            self.pico_power_dbm, self.pico_radius_m, self.pico_ring_fraction)

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = dict(data)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**merged).validate()


@dataclass
class SweepSpec:
    """Grid of runs: every (scenario, algorithm, user count) with several seeds."""

    user_counts: list[int] = field(default_factory=lambda: [10, 20, 30, 40, 50, 60, 70, 80])
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    scenarios: list[str] = field(default_factory=lambda: list(SCENARIOS))
    runs_per_point: int = 5
    root_seed: int = 1
    base: RunConfig = field(default_factory=RunConfig)

    def validate(self) -> "SweepSpec":
        if self.runs_per_point < 1:
            raise ConfigError("runs_per_point must be at least 1")
        if not self.user_counts or any(u < 0 for u in self.user_counts):
            raise ConfigError("user_counts must be non-empty and non-negative")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r} in sweep")
        for s in self.scenarios:
            if s not in SCENARIOS:
                raise ConfigError(f"unknown scenario {s!r} in sweep")
        return self

    def points(self):
        """Run configs in grid order; seeds are root_seed + run index."""
        for scenario in self.scenarios:
            for algorithm in self.algorithms:
                for users in self.user_counts:
                    for run in range(self.runs_per_point):
                        yield dataclasses.replace(
                            self.base, scenario=scenario, scheduler=algorithm,
                            n_users=users, seed=self.root_seed + run).validate()


_SWEEP_KEYS = ("user_counts", "algorithms", "scenarios", "runs_per_point", "root_seed")


def load_config(path: str | None, **overrides) -> RunConfig:
    """RunConfig from a JSON file (or pure defaults) plus CLI overrides."""
    data = _read_json(path)
    data.pop("sweep", None)
    return RunConfig.from_dict(data, **overrides)


def load_sweep(path: str | None, **overrides) -> SweepSpec:
    """SweepSpec from the 'sweep' section of a JSON config; other keys feed the base run."""
    data = _read_json(path)
    sweep_data = data.pop("sweep", {})
    unknown = set(sweep_data) - set(_SWEEP_KEYS)
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    base = RunConfig.from_dict(data)
    spec = SweepSpec(base=base, **sweep_data)
    for k, v in overrides.items():
        if v is not None:
            setattr(spec, k, v)
    return spec.validate()


def _read_json(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return data
