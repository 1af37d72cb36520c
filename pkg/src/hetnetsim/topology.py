"""Cell layout, user placement, mobility and serving-cell selection.

One macro cell at the origin (1 km radius, 49 dBm) optionally surrounded
by low-power picos (0.1 km, 30 dBm) placed on the macro edge at 0.9 of
the macro radius so the whole pico disc stays inside the macro disc.

Users move in straight lines at constant 3 km/h; on touching the macro
boundary the heading is redrawn uniformly over the inward half-circle.
Serving-cell choice follows maximum received power with a hysteresis
margin against ping-pong handovers.
"""

from dataclasses import dataclass

import numpy as np

from .channel import InvalidGeometryError, pathloss_db_array

MACRO = "macro"
PICO = "pico"


@dataclass(frozen=True)
class CellSite:
    cell_id: int
    kind: str                  # MACRO or PICO
    x_m: float
    y_m: float
    tx_power_dbm: float
    radius_m: float


@dataclass
class UePosition:
    ue_id: int
    x_m: float
    y_m: float
    heading_rad: float
    speed_mps: float


def build_scenario(kind: str, n_picos: int = 2, macro_power_dbm: float = 49.0,
                   macro_radius_m: float = 1000.0, pico_power_dbm: float = 30.0,
                   pico_radius_m: float = 100.0, pico_center_fraction: float = 0.9) -> list[CellSite]:
    """Cell list for a scenario: macro at the origin, picos evenly spaced in angle."""
    cells = [CellSite(0, MACRO, 0.0, 0.0, macro_power_dbm, macro_radius_m)]
    if kind == "macro":
        return cells
    if kind != "hetnet":
        raise ValueError(f"unknown scenario kind {kind!r} (use 'macro' or 'hetnet')")
    if n_picos < 1:
        raise InvalidGeometryError("hetnet scenario needs at least one pico cell")
    ring_m = pico_center_fraction * macro_radius_m
    if ring_m + pico_radius_m > macro_radius_m:
        raise InvalidGeometryError(
            f"pico discs poke outside the macro disc (ring {ring_m} m + radius {pico_radius_m} m)")
    if n_picos > 1:
        # adjacent pico centers must be at least two pico radii apart
        spacing = 2.0 * ring_m * np.sin(np.pi / n_picos)
        if spacing < 2.0 * pico_radius_m:
            raise InvalidGeometryError(f"{n_picos} picos of {pico_radius_m} m overlap on the ring")
    for i in range(n_picos):
        angle = 2.0 * np.pi * i / n_picos
        cells.append(CellSite(1 + i, PICO, ring_m * np.cos(angle), ring_m * np.sin(angle),
                              pico_power_dbm, pico_radius_m))
    return cells


def _uniform_disc(rng: np.random.Generator, n: int, cx: float, cy: float, radius: float):
    r = radius * np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    return cx + r * np.cos(theta), cy + r * np.sin(theta)


def _apportion(n: int, fractions: list[float]) -> list[int]:
    """Largest-remainder split of n into integer counts matching fractions."""
    ideal = [n * f for f in fractions]
    counts = [int(v) for v in ideal]
    leftover = n - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: ideal[i] - counts[i], reverse=True)
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def place_users(n_users: int, cells: list[CellSite], rng: np.random.Generator,
                speed_mps: float, macro_fraction: float = 0.5) -> list[UePosition]:
    """Drop users: uniform over the macro disc, with pico-disc hotspots in hetnets.

    In a hetnet, macro_fraction of the users sample the macro disc and the
    rest split evenly across the pico discs (deterministic largest-remainder
    counts, so 40 users with 2 picos give the 20/10/10 split).
    """
    macro = cells[0]
    picos = [c for c in cells if c.kind == PICO]
    if picos:
        per_pico = (1.0 - macro_fraction) / len(picos)
        counts = _apportion(n_users, [macro_fraction] + [per_pico] * len(picos))
    else:
        counts = [n_users]
    ues = []
    ue_id = 0
    for cell, count in zip([macro] + picos, counts):
        xs, ys = _uniform_disc(rng, count, cell.x_m, cell.y_m, cell.radius_m)
        headings = rng.uniform(0.0, 2.0 * np.pi, count)
        for x, y, h in zip(xs, ys, headings):
            ues.append(UePosition(ue_id, float(x), float(y), float(h), speed_mps))
            ue_id += 1
    return ues


def move_ue(ue: UePosition, dt_s: float, macro_radius_m: float, rng: np.random.Generator) -> None:
    """Advance one UE one step; redraw the heading inward after boundary contact."""
    step = ue.speed_mps * dt_s
    ue.x_m += step * np.cos(ue.heading_rad)
    ue.y_m += step * np.sin(ue.heading_rad)
    if ue.x_m * ue.x_m + ue.y_m * ue.y_m >= macro_radius_m * macro_radius_m:
        inward = np.arctan2(-ue.y_m, -ue.x_m)
        ue.heading_rad = inward + rng.uniform(-np.pi / 2.0, np.pi / 2.0)


def move_all(xs: np.ndarray, ys: np.ndarray, headings: np.ndarray, speed_mps: float,
             dt_s: float, macro_radius_m: float, rng: np.random.Generator) -> float:
    """Vectorized mobility step for the engine; returns the per-UE displacement."""
    step = speed_mps * dt_s
    xs += step * np.cos(headings)
    ys += step * np.sin(headings)
    outside = xs * xs + ys * ys >= macro_radius_m * macro_radius_m
    n_out = int(outside.sum())
    if n_out:
        inward = np.arctan2(-ys[outside], -xs[outside])
        headings[outside] = inward + rng.uniform(-np.pi / 2.0, np.pi / 2.0, n_out)
    return step


def rx_power_dbm(cells: list[CellSite], xs: np.ndarray, ys: np.ndarray,
                 shadow_db: np.ndarray, penetration_db: float) -> np.ndarray:
    """Total received power (n_ues, n_cells) from tx power minus all losses."""
    cx = np.array([c.x_m for c in cells])
    cy = np.array([c.y_m for c in cells])
    tx = np.array([c.tx_power_dbm for c in cells])
    d_km = np.hypot(xs[:, None] - cx[None, :], ys[:, None] - cy[None, :]) / 1000.0
    return tx[None, :] - pathloss_db_array(d_km) - penetration_db - shadow_db


def best_server(rx_dbm_row: np.ndarray, serving: int, hysteresis_db: float = 1.0) -> int:
    """Keep the serving cell unless another beats it by the hysteresis margin."""
    best = int(np.argmax(rx_dbm_row))
    if best != serving and rx_dbm_row[best] > rx_dbm_row[serving] + hysteresis_db:
        return best
    return serving
