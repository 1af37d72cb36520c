"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` to see the lines as they
complete. Criteria 6-10 share one desk-scale result grid (5 s flows,
3 seeds, users in {10, 40, 70} plus the 60-user delay point) computed
once per session.
"""

import dataclasses
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from hetnetsim import channel, scheduler
from hetnetsim.config import RunConfig
from hetnetsim.engine import run_simulation
from hetnetsim.traffic import QosParams

SEEDS = (1, 2, 3)
USER_POINTS = (10, 40, 70)
DELAY_POINT = 60


def criterion(num: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {num:>2}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_rate_table_consistency():
    started = time.perf_counter()
    want = {1.7: 168, 3.7: 224, 4.5: 252, 7.2: 336, 9.5: 448, 10.7: 504, 14.8: 672, 16.1: 756}
    ok = len(channel.MCS_TABLE) == 8
    for row in channel.MCS_TABLE:
        ok &= channel.rb_pair_rate_bits(row) == row.rate_kbps_per_rbpair == want[row.min_snr_db]
    elapsed = time.perf_counter() - started
    criterion(1, ok and elapsed < 1.0,
              f"8 MCS rows reproduce published rates exactly ({elapsed:.3f}s)")


def test_criterion_2_metric_formula_oracles():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        r = float(rng.uniform(1e3, 1e6))
        avg = float(rng.uniform(1.0, 1e6))
        tau = float(rng.uniform(0.02, 1.0))
        delta = float(rng.uniform(1e-4, 0.5))
        hol = float(rng.uniform(0.0, 0.3))
        aw_bar = float(rng.uniform(0.0, 20.0))
        w = float(rng.uniform(0.02, 2.0))
        m_buf = float(rng.uniform(0.0, 50.0))
        alpha = scheduler.mlwdf_alpha(QosParams(tau, delta))
        # brute force: the formulas written out longhand
        bf_alpha = -math.log(delta) / tau
        bf_pf = r / avg
        bf_ml = bf_alpha * hol * r / avg
        bf_rt = math.exp((bf_alpha * hol - aw_bar) / (1.0 + math.sqrt(aw_bar))) * r / avg
        bf_nrt = w / max(m_buf, 1.0) * r / avg
        for got, ref in (
            (alpha, bf_alpha),
            (scheduler.pf_metric(r, avg), bf_pf),
            (scheduler.mlwdf_metric(r, avg, hol, alpha), bf_ml),
            (scheduler.exppf_metric(r, avg, True, hol, alpha, aw_bar, w, m_buf), bf_rt),
            (scheduler.exppf_metric(r, avg, False, hol, alpha, aw_bar, w, m_buf), bf_nrt),
        ):
            worst = max(worst, abs(got - ref) / abs(ref) if ref else abs(got - ref))
    elapsed = time.perf_counter() - started
    criterion(2, worst < 1e-12 and elapsed < 5.0,
              f"1000 random metric evaluations, worst relative error {worst:.2e} ({elapsed:.1f}s)")


def test_criterion_3_conservation_over_randomized_runs():
    started = time.perf_counter()
    rng = np.random.default_rng(7)
    failures = []
    for i in range(100):
        cfg = RunConfig(
            scenario=("macro", "hetnet")[int(rng.integers(2))],
            scheduler=("pf", "mlwdf", "exppf")[int(rng.integers(3))],
            n_users=int(rng.integers(1, 21)),
            seed=int(rng.integers(1, 10_000)),
            sim_duration_s=2.0, flow_duration_s=2.0,
            conservation_check=True,  # engine asserts the identity at every TTI
        )
        try:
            run_simulation(cfg)
        except AssertionError as exc:
            failures.append((i, str(exc)))
    elapsed = time.perf_counter() - started
    criterion(3, not failures and elapsed < 120.0,
              f"arrived == transmitted + discarded + buffered in 100 random 2s runs "
              f"({elapsed:.0f}s){'; ' + repr(failures[:2]) if failures else ''}")


def test_criterion_4_scheduler_contracts():
    rng = np.random.default_rng(99)
    violations = []
    for trial in range(400):
        n_flows = int(rng.integers(1, 16))
        n_rbs = int(rng.integers(1, 51))
        scalars = rng.random(n_flows) + 1e-9
        rates = rng.integers(0, 757, size=(n_flows, n_rbs)).astype(np.int64)
        queues = rng.integers(0, 40_000, size=n_flows).astype(np.int64)
        grants, served = scheduler.schedule_tti(scalars, rates, queues)
        again, served2 = scheduler.schedule_tti(scalars, rates, queues)
        if grants.tolist() != again.tolist() or served.tolist() != served2.tolist():
            violations.append((trial, "not deterministic"))
        for factor in (0.5, 2.0, 4096.0):  # powers of two: exact fp scaling
            g2, s2 = scheduler.schedule_tti(scalars * factor, rates, queues)
            if g2.tolist() != grants.tolist() or s2.tolist() != served.tolist():
                violations.append((trial, f"argmax not scale-invariant x{factor}"))
        for f in range(n_flows):
            if served[f] > queues[f]:
                violations.append((trial, "served beyond queue"))
            if queues[f] == 0 and (grants == f).any():
                violations.append((trial, "granted RB to empty queue"))
            if served[f] > rates[f][grants == f].sum():
                violations.append((trial, "served beyond granted capacity"))
        for rb in range(n_rbs):
            if grants[rb] >= 0 and rates[grants[rb], rb] == 0:
                violations.append((trial, "granted zero-rate RB"))
    # deadline-respecting service: no completed packet older than its budget
    for seed in SEEDS:
        cfg = RunConfig(scenario="hetnet", scheduler="mlwdf", n_users=12, seed=seed,
                        sim_duration_s=2.0, flow_duration_s=2.0)
        result = run_simulation(cfg)
        for counters in result.accumulator.flows.values():
            budget = 0.1  # both mixed-profile classes carry tau = 0.1 s
            if counters.max_delay_s > budget + 1e-9:
                violations.append((seed, f"packet served {counters.max_delay_s:.4f}s after arrival"))
    criterion(4, not violations,
              f"argmax scaling, RB exclusivity, queue/deadline discipline over randomized TTIs "
              f"({'0 violations' if not violations else violations[:3]})")


def test_criterion_5_single_user_capacity_oracle():
    started = time.perf_counter()
    # 100 m from the macro with a clean channel puts every RB-pair on the top
    # MCS row, so the cell drains 50 x 756 bits per TTI into a saturating flow
    tx_rb = 49.0 - 10.0 * np.log10(50)
    snr = tx_rb - channel.pathloss_db(0.1) - 10.0 - channel.noise_dbm_per_rbpair(9.0)
    expected_bps = 50 * channel.snr_to_mcs(snr).rate_kbps_per_rbpair * 1000
    worst = 0.0
    for algo in ("pf", "mlwdf", "exppf"):
        cfg = RunConfig(scenario="macro", scheduler=algo, n_users=1, seed=1,
                        sim_duration_s=10.0, flow_duration_s=10.0,
                        fading_enabled=False, shadowing_enabled=False,
                        mobility_enabled=False, ue_positions=[[100.0, 0.0]],
                        traffic_profile="cbr", cbr_rate_kbps=60_000.0, cbr_tau_s=15.0)
        got = run_simulation(cfg).summary["throughput_bps_total"]
        worst = max(worst, abs(got - expected_bps) / expected_bps)
    elapsed = time.perf_counter() - started
    criterion(5, worst <= 0.01 and elapsed < 30.0,
              f"static-UE throughput within {worst * 100:.2f}% of 50 x {expected_bps // 50000} kbps "
              f"({elapsed:.0f}s)")


# ---------------------------------------------------------------------------
# criteria 6-10: desk-scale trend grid


def _trend_point(args):
    scenario, algo, users, seed = args
    cfg = RunConfig(scenario=scenario, scheduler=algo, n_users=users, seed=seed,
                    sim_duration_s=5.0, flow_duration_s=5.0)
    return args, run_simulation(cfg).summary


@pytest.fixture(scope="module")
def trend_grid():
    points = [(sc, al, u, sd)
              for sc in ("macro", "hetnet")
              for al in ("pf", "mlwdf", "exppf")
              for u in USER_POINTS
              for sd in SEEDS]
    points += [(sc, al, DELAY_POINT, sd)
               for sc in ("macro", "hetnet")
               for al in ("mlwdf", "exppf")
               for sd in SEEDS]
    started = time.perf_counter()
    with ProcessPoolExecutor(max_workers=2) as pool:
        results = dict(pool.map(_trend_point, points))
    print(f"\n[trend grid: {len(points)} desk-scale runs in {time.perf_counter() - started:.0f}s]")
    return results


def _mean(grid, scenario, algo, users, key):
    return statistics.mean(grid[(scenario, algo, users, s)][key] for s in SEEDS)


def test_criterion_6_hetnet_throughput_gain(trend_grid):
    hetnet = _mean(trend_grid, "hetnet", "mlwdf", 40, "throughput_bps_total")
    macro = _mean(trend_grid, "macro", "mlwdf", 40, "throughput_bps_total")
    ratio = hetnet / macro
    criterion(6, 1.8 <= ratio <= 3.5,
              f"throughput gain hetnet/macro at 40 users = {ratio:.3f} "
              f"({hetnet / 1e6:.2f} / {macro / 1e6:.2f} Mbps), required [1.8, 3.5]")


def test_criterion_7_plr_reduction(trend_grid):
    details = []
    ok = True
    for algo in ("mlwdf", "exppf"):
        hetnet = _mean(trend_grid, "hetnet", algo, 70, "plr_video")
        macro = _mean(trend_grid, "macro", algo, 70, "plr_video")
        ok &= hetnet <= 0.5 * macro
        details.append(f"{algo}: {hetnet:.4f} vs 0.5x{macro:.4f}")
    criterion(7, ok, f"video PLR at 70 users halves with picos ({'; '.join(details)})")


def test_criterion_8_delay_reduction(trend_grid):
    details = []
    ok = True
    for algo in ("mlwdf", "exppf"):
        hetnet = _mean(trend_grid, "hetnet", algo, DELAY_POINT, "delay_ms_video_mean")
        macro = _mean(trend_grid, "macro", algo, DELAY_POINT, "delay_ms_video_mean")
        ok &= hetnet <= 0.7 * macro
        details.append(f"{algo}: {hetnet:.2f}ms vs 0.7x{macro:.2f}ms")
    criterion(8, ok, f"video delay at 60 users drops below 0.7x ({'; '.join(details)})")


def test_criterion_9_algorithm_ordering(trend_grid):
    ordered_points = 0
    details = []
    for users in USER_POINTS:
        plr = {a: _mean(trend_grid, "hetnet", a, users, "plr_video")
               for a in ("mlwdf", "exppf", "pf")}
        ordered = plr["mlwdf"] <= plr["exppf"] <= plr["pf"]
        ordered_points += ordered
        details.append(f"@{users}: {plr['mlwdf']:.4f}/{plr['exppf']:.4f}/{plr['pf']:.4f}"
                       f"{'' if ordered else ' (unordered)'}")
    criterion(9, ordered_points >= 2,
              f"hetnet video PLR ordered mlwdf<=exppf<=pf at {ordered_points}/3 points "
              f"({'; '.join(details)})")


def test_criterion_10_fairness_floor(trend_grid):
    worst = 1.0
    worst_at = ""
    for scenario in ("macro", "hetnet"):
        for algo in ("pf", "mlwdf", "exppf"):
            for users in (10, 40):
                f = _mean(trend_grid, scenario, algo, users, "fairness_eq11_video")
                if f < worst:
                    worst, worst_at = f, f"{scenario}/{algo}@{users}"
    criterion(10, worst >= 0.8,
              f"video fairness >= 0.8 at <= 40 users in both scenarios "
              f"(worst {worst:.3f} at {worst_at})")
