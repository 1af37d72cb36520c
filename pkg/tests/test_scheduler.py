import math

import numpy as np
import pytest

from hetnetsim import scheduler
from hetnetsim.traffic import QosParams


class TestPfMetric:
    def test_direct_ratio(self):
        assert scheduler.pf_metric(504_000.0, 100_000.0) == pytest.approx(5.04)

    def test_zero_rate_gives_zero(self):
        assert scheduler.pf_metric(0.0, 123.0) == 0.0

    def test_equal_averages_rank_by_rate(self):
        rates = [100.0, 900.0, 500.0]
        metrics = [scheduler.pf_metric(r, 250.0) for r in rates]
        assert int(np.argmax(metrics)) == int(np.argmax(rates))


class TestAvgRateUpdate:
    def test_served_step(self):
        assert scheduler.update_avg_rate(100_000.0, 504_000.0, 1000) == pytest.approx(100_404.0)

    def test_unserved_decay(self):
        assert scheduler.update_avg_rate(200.0, 0.0, 1000) == pytest.approx(0.999 * 200.0)

    def test_converges_to_fixed_service_rate(self):
        # geometric series: R_t -> c as (1 - 1/tc)^t vanishes
        r, c, tc = 1.0, 336_000.0, 200
        for _ in range(20 * tc):
            r = scheduler.update_avg_rate(r, c, tc)
        assert r == pytest.approx(c, rel=1e-8)


class TestMlwdf:
    def test_alpha_value(self):
        qos = QosParams(0.1, 0.005)
        assert scheduler.mlwdf_alpha(qos) == pytest.approx(52.98317366548036)

    def test_alpha_unit_case(self):
        qos = QosParams(1.0, 1.0 / math.e)
        assert scheduler.mlwdf_alpha(qos) == pytest.approx(1.0)

    def test_alpha_monotonic_in_qos(self):
        deltas = np.linspace(0.001, 0.5, 40)
        alphas = [scheduler.mlwdf_alpha(QosParams(0.1, float(d))) for d in deltas]
        assert all(a > b for a, b in zip(alphas, alphas[1:]))
        taus = np.linspace(0.05, 1.0, 40)
        alphas = [scheduler.mlwdf_alpha(QosParams(float(t), 0.005)) for t in taus]
        assert all(a > b for a, b in zip(alphas, alphas[1:]))

    def test_log10_variant(self):
        qos = QosParams(0.1, 0.005)
        assert scheduler.mlwdf_alpha(qos, "10") == pytest.approx(
            scheduler.mlwdf_alpha(qos) / math.log(10.0))

    def test_metric_product(self):
        alpha = scheduler.mlwdf_alpha(QosParams(0.1, 0.005))
        got = scheduler.mlwdf_metric(504_000.0, 100_000.0, 0.05, alpha)
        assert got == pytest.approx(13.3518, abs=1e-3)

    def test_zero_hol_gives_zero(self):
        assert scheduler.mlwdf_metric(504.0, 100.0, 0.0, 52.98) == 0.0

    def test_larger_hol_wins(self):
        alpha = 52.98
        low = scheduler.mlwdf_metric(504.0, 100.0, 0.02, alpha)
        high = scheduler.mlwdf_metric(504.0, 100.0, 0.08, alpha)
        assert high > low


class TestExpPf:
    def test_single_flow_reduces_to_pf(self):
        # a_i W_i equal to the mean makes the exponent vanish
        got = scheduler.exppf_metric(504.0, 100.0, True, 0.1, 50.0, 5.0, 1.0, 1.0)
        assert got == pytest.approx(5.04)

    def test_two_flow_example(self):
        # aw products {6, 4} -> mean 5; the leader gains exp(1/(1+sqrt(5)))
        aw_bar = scheduler.compute_aw_bar([6.0, 4.0])
        assert aw_bar == 5.0
        got = scheduler.exppf_metric(2.0, 1.0, True, 1.0, 6.0, aw_bar, 1.0, 1.0)
        assert got == pytest.approx(2.0 * math.exp(1.0 / (1.0 + math.sqrt(5.0))))
        assert got / 2.0 == pytest.approx(1.3623, abs=2e-3)

    def test_nrt_branch(self):
        got = scheduler.exppf_metric(2.0, 1.0, False, 0.0, 0.0, 0.0, 1.0, 4.0)
        assert got == pytest.approx(0.5)

    def test_nrt_empty_buffer_divisor_floored(self):
        got = scheduler.exppf_metric(2.0, 1.0, False, 0.0, 0.0, 0.0, 1.0, 0.0)
        assert got == pytest.approx(2.0)

    def test_aw_bar_cases(self):
        assert scheduler.compute_aw_bar([2.0, 4.0]) == 3.0
        assert scheduler.compute_aw_bar([7.5]) == 7.5
        assert scheduler.compute_aw_bar([]) == 0.0

    def test_w_updates(self):
        assert scheduler.exppf_update_w(1.0, 0.02, 10.0, 0.05, 0.1) == pytest.approx(1.002)
        assert scheduler.exppf_update_w(1.0, 0.02, 10.0, 0.2, 0.1) == pytest.approx(0.98)
        assert scheduler.exppf_update_w(1.0, 0.02, 10.0, 0.1, 0.1) == 1.0

    def test_w_clamped_at_epsilon(self):
        w = 0.03
        for _ in range(10):
            w = scheduler.exppf_update_w(w, 0.02, 10.0, 0.2, 0.1)
        assert w == 0.02


def alloc(scalars, rates, queues):
    return scheduler.schedule_tti(np.asarray(scalars, dtype=float),
                                  np.asarray(rates, dtype=np.int64),
                                  np.asarray(queues, dtype=np.int64))


class TestAllocation:
    def test_lone_backlogged_flow_takes_everything(self):
        grants, served = alloc([1.0, 1.0], [[100] * 3, [100] * 3], [1000, 0])
        assert grants.tolist() == [0, 0, 0]
        assert served.tolist() == [300, 0]

    def test_flow_stops_competing_once_drained(self):
        grants, served = alloc([1.0, 0.5], [[100] * 3, [100] * 3], [150, 1000])
        assert grants.tolist() == [0, 0, 1]
        assert served.tolist() == [150, 100]

    def test_tie_breaks_to_lowest_flow_id(self):
        grants, served = alloc([2.0, 2.0], [[100, 100], [100, 100]], [10_000, 10_000])
        assert grants.tolist() == [0, 0]

    def test_per_rb_argmax_oracle(self):
        # metric matrix {{5,1},{2,6}} via unit scalars and integer rates
        grants, served = alloc([1.0, 1.0], [[5, 1], [2, 6]], [10_000, 10_000])
        assert grants.tolist() == [0, 1]
        assert served.tolist() == [5, 6]

    def test_zero_rate_flow_excluded(self):
        grants, served = alloc([1.0, 1.0], [[0, 0], [7, 7]], [100, 100])
        assert grants.tolist() == [1, 1]
        assert served.tolist() == [0, 14]

    def test_empty_cell_allocates_nothing(self):
        grants, served = alloc(np.zeros(0), np.zeros((0, 4)), np.zeros(0))
        assert grants.tolist() == [-1, -1, -1, -1]
        assert served.size == 0

    def test_all_queues_empty_allocates_nothing(self):
        grants, served = alloc([1.0, 1.0], [[9, 9], [9, 9]], [0, 0])
        assert grants.tolist() == [-1, -1]
        assert served.tolist() == [0, 0]

    def test_scale_invariance_power_of_two(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n_flows, n_rbs = rng.integers(1, 12), rng.integers(1, 20)
            scalars = rng.random(n_flows) + 0.01
            rates = rng.integers(0, 757, size=(n_flows, n_rbs))
            queues = rng.integers(0, 5000, size=n_flows)
            base_grants, base_served = alloc(scalars, rates, queues)
            for factor in (0.25, 2.0, 1024.0):
                grants, served = alloc(scalars * factor, rates, queues)
                assert grants.tolist() == base_grants.tolist()
                assert served.tolist() == base_served.tolist()

    def test_never_serves_beyond_queue_or_capacity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n_flows, n_rbs = rng.integers(1, 10), rng.integers(1, 15)
            scalars = rng.random(n_flows)
            rates = rng.integers(0, 757, size=(n_flows, n_rbs))
            queues = rng.integers(0, 3000, size=n_flows)
            grants, served = alloc(scalars, rates, queues)
            for f in range(n_flows):
                granted = grants == f
                assert served[f] <= queues[f]
                assert served[f] <= rates[f][granted].sum()
                if queues[f] == 0:
                    assert not granted.any()
            # one flow per RB is structural; granted RBs carry positive rate
            for rb, f in enumerate(grants):
                if f >= 0:
                    assert rates[f, rb] > 0

    def test_pf_equals_mlwdf_when_delay_weights_equal(self):
        rng = np.random.default_rng(99)
        avg = rng.random(6) * 1e5 + 1.0
        rates = rng.integers(0, 757, size=(6, 10))
        queues = rng.integers(1, 9999, size=6)
        state = scheduler.CellSchedulerState()
        hol = np.full(6, 0.05)
        alphas = np.full(6, 52.98)
        pf = scheduler.metric_scalars("pf", avg, hol, alphas, np.ones(6, bool),
                                      queues > 0, state)
        ml = scheduler.metric_scalars("mlwdf", avg, hol, alphas, np.ones(6, bool),
                                      queues > 0, state)
        g1, s1 = alloc(pf, rates, queues)
        g2, s2 = alloc(ml, rates, queues)
        assert g1.tolist() == g2.tolist()
        assert s1.tolist() == s2.tolist()

    def test_kernel_pair_agree(self):
        rng = np.random.default_rng(5)
        scalars = rng.random(8)
        rates = rng.integers(0, 757, size=(8, 25)).astype(np.int64)
        queues = rng.integers(0, 4000, size=8).astype(np.int64)
        g_np, s_np = scheduler._allocate_numpy(scalars, rates, queues)
        g_loop, s_loop = scheduler._allocate_loop(scalars, rates, queues)
        assert g_np.tolist() == g_loop.tolist()
        assert s_np.tolist() == s_loop.tolist()


class TestMetricScalars:
    def test_brute_force_oracle_all_algorithms(self):
        # scalar * rate must equal the written-out metric formulas
        rng = np.random.default_rng(123)
        state = scheduler.CellSchedulerState()
        state.w = 0.7
        state.avg_buffer_packets = 3.0
        for _ in range(200):
            n = int(rng.integers(1, 9))
            avg = rng.random(n) * 5e5 + 1.0
            hol = rng.random(n) * 0.2
            alphas = rng.random(n) * 60.0 + 1.0
            is_rt = rng.random(n) < 0.7
            has_data = rng.random(n) < 0.9
            rate = rng.random(n) * 7e5
            pf = scheduler.metric_scalars("pf", avg, hol, alphas, is_rt, has_data, state)
            ml = scheduler.metric_scalars("mlwdf", avg, hol, alphas, is_rt, has_data, state)
            ep = scheduler.metric_scalars("exppf", avg, hol, alphas, is_rt, has_data, state)
            aw_bar = scheduler.compute_aw_bar(
                [a * h for a, h, rt, hd in zip(alphas, hol, is_rt, has_data) if rt and hd])
            for i in range(n):
                assert pf[i] * rate[i] == pytest.approx(
                    scheduler.pf_metric(rate[i], avg[i]), rel=1e-12)
                assert ml[i] * rate[i] == pytest.approx(
                    scheduler.mlwdf_metric(rate[i], avg[i], hol[i], alphas[i]), rel=1e-12)
                assert ep[i] * rate[i] == pytest.approx(
                    scheduler.exppf_metric(rate[i], avg[i], bool(is_rt[i]), hol[i],
                                           alphas[i], aw_bar, state.w,
                                           state.avg_buffer_packets), rel=1e-12)

    def test_unknown_algorithm_rejected(self):
        state = scheduler.CellSchedulerState()
        with pytest.raises(ValueError):
            scheduler.metric_scalars("wrr", np.ones(1), np.zeros(1), np.ones(1),
                                     np.ones(1, bool), np.ones(1, bool), state)
