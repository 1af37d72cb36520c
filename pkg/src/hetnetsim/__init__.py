"""System-level LTE downlink simulator for macro and macro+pico scenarios."""

from .config import RunConfig, SweepSpec, load_config, load_sweep
from .engine import RunResult, Simulation, run_simulation

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "SweepSpec",
    "load_config",
    "load_sweep",
    "RunResult",
    "Simulation",
    "run_simulation",
    "__version__",
]
