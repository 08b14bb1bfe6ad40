"""Acceptance battery.

One test per acceptance criterion, each at its stated tolerance, each
printing a single pass/fail line (run with ``pytest -v -s`` to see them).
Stochastic criteria use the fixed seeds baked into :mod:`railsim.suite`,
so every run is deterministic.

Known red: ``test_c08b_npath_increments_decrease_as_specified`` asserts
diminishing absolute throughput increments for n equal paths.  The model
multiplies throughput by p**-0.5 per added path, so absolute increments
grow geometrically; the check is kept as specified and fails by design
of the model rather than by a defect in the implementation.
"""

import math

import numpy as np

from railsim import suite
from railsim.metrics import downtime_combine
from railsim.quality import TcpPathSet, mos, tcp_throughput_rail, tcp_throughput_single


def _report(name: str) -> None:
    print(f"[acceptance] {name}: PASS")


# ---------------------------------------------------------------------------


def test_c01_downtime_table_exact():
    expected = {0.10: 0.01, 0.02: 0.0004, 0.005: 0.000025, 0.001: 0.000001}
    for both_bad, want in expected.items():
        got = downtime_combine(both_bad, both_bad)
        assert abs(got - want) <= 1e-12 * want, (both_bad, got)
    _report("C01 downtime table exact")


def test_c02_loss_squaring_within_three_sigma():
    points = suite.loss_sweep()
    assert [p.rate for p in points] == [round(0.01 * k, 2) for k in range(1, 21)]
    for pt in points:
        n = pt.count
        assert n == 100_000
        sigma_single = math.sqrt(pt.rate * (1 - pt.rate) / n)
        p2 = pt.rate * pt.rate
        sigma_rail = math.sqrt(p2 * (1 - p2) / n)
        for measured in pt.measured_single:
            assert abs(measured - pt.rate) <= 3 * sigma_single, pt
        assert abs(pt.measured_rail - p2) <= 3 * sigma_rail, pt
    _report("C02 loss squaring (single ~ p, replicated ~ p^2)")


def test_c03_delay_cdf_dominance_exact():
    results = suite.cdf_dominance_runs()
    assert len(results) == 50
    worst = max(v for _, v in results)
    assert worst <= 0.0, f"survival bound exceeded by {worst}"
    _report("C03 delay-CDF dominance at every sample point")


def test_c04_no_reordering_when_paths_in_order():
    results = suite.ordering_runs()
    assert len(results) == 100
    considered = [ok for in_order, ok in results if in_order]
    assert len(considered) >= 90  # the check must not be vacuous
    assert all(considered), "sorted paths produced unsorted forwarding"
    _report(f"C04 in-order paths never reordered ({len(considered)}/100 runs applicable)")


def test_c05_fast_path_loss_translates_to_single_gap():
    res = suite.fast_path_loss_check()
    assert res["plain_stats"].out_of_order_count == 1
    assert res["plain_stats"].gaps == {1: 1}
    assert res["held_stats"].out_of_order_count == 0
    assert res["held_order"] == sorted(res["held_order"])
    assert res["held_delivered"] == res["count"]  # late, never dropped
    _report("C05 forced fast-path loss: one gap-1 reorder; hold mode repairs it")


def test_c06_burst_metrics_dominated_in_every_cell():
    cells = suite.burst_grid()
    assert len(cells) == 25
    for c in cells:
        assert c.rail.lost_in_burst <= c.single.lost_in_burst, c
        assert c.rail.num_bursts <= c.single.num_bursts, c
        assert c.rail.avg_burst <= c.single.avg_burst, c
        assert c.rail.max_burst <= c.single.max_burst, c
    _report("C06 burst metrics dominated on the full rate x correlation grid")


def test_c07_tcp_always_better_with_spot_and_range():
    rtt1 = 10.0
    for p in np.logspace(-4, -1, 20):
        for ratio in np.linspace(1.0, 10.0, 10):
            pred = tcp_throughput_rail(
                TcpPathSet.of([(float(p), rtt1), (float(p), rtt1 * ratio)]))
            assert pred.throughput > tcp_throughput_single(float(p), rtt1)
            assert pred.throughput > tcp_throughput_single(float(p), rtt1 * ratio)

    spot = tcp_throughput_rail(TcpPathSet.of([(0.01, 10.0), (0.01, 100.0)]))
    speedup = spot.throughput / tcp_throughput_single(0.01, 10.0)
    assert abs(speedup - 9.18181818181818) <= 1e-6

    # practical region: loss 1-3%, RTT ratio up to 10 -> 4x to 10x benefit
    speedups = [r["speedup"] for r in suite.tcp_practical_region()]
    assert min(speedups) >= 4.0 - 1e-9
    assert max(speedups) <= 10.0 + 1e-9
    _report("C07 TCP fact-1 grid, spot ratio 9.1818, practical range [4, 10]")


def _npath_series(p: float) -> list[float]:
    return [tcp_throughput_rail(TcpPathSet.of([(p, 100.0)] * n)).throughput
            for n in range(1, 6)]


def test_c08a_npath_monotone_and_two_path_identity():
    for p in (0.001, 0.01, 0.05):
        series = _npath_series(p)
        assert all(b > a for a, b in zip(series, series[1:])), (p, series)
        # independent evaluation of the explicit two-path formula
        e_rtt = (100.0 * (1 - p) + 100.0 * p * (1 - p)) / (1 - p * p)
        t2 = 1.22 / ((e_rtt / 1000.0) * math.sqrt(p * p))
        assert abs(series[1] - t2) <= 1e-12 * t2
    _report("C08a n-path throughput strictly increasing; n=2 matches the "
            "two-path formula to 1e-12")


def test_c08b_npath_increments_decrease_as_specified():
    for p in (0.001, 0.01, 0.05):
        series = _npath_series(p)
        increments = [b - a for a, b in zip(series, series[1:])]
        assert all(y < x for x, y in zip(increments, increments[1:])), (
            f"p={p}: throughput increments {increments} grow (each added "
            f"path multiplies throughput by p**-0.5 = {p ** -0.5:.4g}), so "
            "absolute increments cannot decrease under this model"
        )
    _report("C08b n-path increments strictly decreasing")


def test_c09_mos_dominance_and_loss_monotonicity():
    runs = suite.mos_dominance_runs()
    assert len(runs) == 20
    assert runs[0].deadlines == tuple(range(50, 401, 10))
    for run in runs:
        for i in range(len(run.deadlines)):
            best_single = max(run.mos_paths[0][i], run.mos_paths[1][i])
            assert run.mos_rail[i] >= best_single - 1e-9, (run.label, i)
    for delay in (0.0, 100.0, 250.0, 400.0):
        values = [mos(k / 200.0, delay).mos for k in range(0, 201)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    _report("C09 replicated MOS dominates both paths; MOS nonincreasing in loss")


def test_c10_padding_reduces_jitter_without_dropping():
    res = suite.padding_check()
    assert res.std_with < res.std_without, res
    assert res.delivered_with == res.delivered_without, res
    _report(f"C10 padding cut delay std {res.std_without:.2f} -> "
            f"{res.std_with:.2f} ms at identical delivery")


def test_c11_reports_are_byte_identical_across_reruns(tmp_path):
    first, gates_a = suite.run_paper_suite()
    second, gates_b = suite.run_paper_suite()
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    files_a = first.write(dir_a)
    files_b = second.write(dir_b)
    assert [p.name for p in files_a] == [p.name for p in files_b]
    for pa, pb in zip(files_a, files_b):
        assert pa.read_bytes() == pb.read_bytes(), pa.name
    assert [g.name for g in gates_a] == [g.name for g in gates_b]
    assert all(g.passed == h.passed for g, h in zip(gates_a, gates_b))
    _report(f"C11 {len(files_a)} report files byte-identical across re-runs")
