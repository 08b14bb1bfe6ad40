"""Loss combination, E-model MOS, playout curves and the TCP model."""

import math

import numpy as np
import pytest

from railsim.engine import Scenario, TrafficSpec, simulate
from railsim.errors import DomainError
from railsim.pathsim import LOST, DelayModel, Outcome, PathSpec
from railsim.quality import (EModelParams, TcpPathSet, effective_loss, mos,
                             mos_curve, optimal_playout, path_mos_curve,
                             rail_loss_independent, rail_loss_shared,
                             rail_mos_curve, tcp_fact1_check,
                             tcp_throughput_rail, tcp_throughput_single)


# ---------------------------------------------------------------------------
# loss combination


def test_independent_loss_multiplies():
    assert rail_loss_independent([0.1, 0.1]) == pytest.approx(0.01)
    assert rail_loss_independent([0.37]) == 0.37


def test_independent_loss_decreasing_returns():
    one = rail_loss_independent([0.1])
    two = rail_loss_independent([0.1, 0.1])
    three = rail_loss_independent([0.1, 0.1, 0.1])
    assert three == pytest.approx(0.001)
    assert one - two == pytest.approx(0.09)
    assert two - three == pytest.approx(0.009)


def test_independent_loss_symmetric_and_bounded():
    assert rail_loss_independent([0.3, 0.05]) == rail_loss_independent([0.05, 0.3])
    assert rail_loss_independent([0.3, 0.05]) <= 0.05
    # raising any path's own loss raises the combination
    assert rail_loss_independent([0.3, 0.05]) > rail_loss_independent([0.2, 0.05])


def test_independent_loss_strictly_drops_per_added_path():
    rng = np.random.default_rng(17)
    for _ in range(100):
        rates = list(rng.uniform(0.01, 0.9, size=rng.integers(1, 5)))
        extra = float(rng.uniform(0.01, 0.99))
        assert rail_loss_independent(rates + [extra]) < rail_loss_independent(rates)


def test_independent_loss_errors():
    with pytest.raises(DomainError):
        rail_loss_independent([])
    with pytest.raises(DomainError):
        rail_loss_independent([0.5, 1.2])


def test_shared_loss_reduces_to_independent():
    assert rail_loss_shared(0.0, [0.1, 0.1]) == pytest.approx(0.01)


def test_shared_loss_dominates_perfect_paths():
    assert rail_loss_shared(0.37, [0.0, 0.0]) == pytest.approx(0.37)


def test_shared_loss_combination():
    assert rail_loss_shared(0.01, [0.1, 0.1]) == pytest.approx(1 - 0.99 * 0.99)


def test_shared_loss_errors():
    with pytest.raises(DomainError):
        rail_loss_shared(1.5, [0.1])


# ---------------------------------------------------------------------------
# effective loss


def test_effective_loss_all_on_time_is_zero():
    assert effective_loss(0.0, [10.0, 20.0, 30.0], deadline=50.0) == 0.0


def test_effective_loss_counts_late_arrivals():
    assert effective_loss(0.0, [100.0, 200.0, 300.0], 150.0) == pytest.approx(2 / 3)


def test_effective_loss_total_network_loss():
    assert effective_loss(1.0, [], 100.0) == 1.0
    assert effective_loss(1.0, [50.0], 100.0) == 1.0


def test_effective_loss_combines_both_terms():
    # half lost in the network, half of the rest late
    assert effective_loss(0.5, [10.0, 999.0], 100.0) == pytest.approx(0.75)


def test_effective_loss_accepts_outcomes_and_none():
    samples = [Outcome(10.0), LOST, None, Outcome(500.0)]
    assert effective_loss(0.0, samples, 100.0) == pytest.approx(0.5)


def test_effective_loss_empty_with_partial_loss_is_error():
    with pytest.raises(DomainError):
        effective_loss(0.5, [], 100.0)
    with pytest.raises(DomainError):
        effective_loss(0.0, [10.0], -1.0)


# ---------------------------------------------------------------------------
# E-model


def test_mos_perfect_operating_point():
    score = mos(0.0, 0.0)
    assert score.r_factor == pytest.approx(93.2)
    assert score.mos == pytest.approx(4.409285824, abs=1e-6)


def test_mos_total_loss_floors_at_one():
    score = mos(1.0, 0.0)
    assert score.r_factor == pytest.approx(93.2 - 9500.0 / 104.3, abs=1e-9)
    assert score.mos == 1.0


def test_mos_monotone_in_delay_and_loss():
    for loss in (0.0, 0.02, 0.1):
        values = [mos(loss, d).mos for d in range(0, 500, 10)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    for delay in (0.0, 150.0, 300.0):
        values = [mos(l / 100, delay).mos for l in range(0, 101)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_mos_bounds_and_caps():
    assert mos(0.0, 10_000.0).mos == 1.0
    high = mos(0.0, 0.0, EModelParams(r_base=150.0))
    assert high.r_factor == 100.0 and high.mos == 4.5
    for loss in (0.0, 0.5, 1.0):
        s = mos(loss, 123.0)
        assert 0.0 <= s.r_factor <= 100.0
        assert 1.0 <= s.mos <= 5.0


def test_mos_delay_knee_increases_slope():
    p = EModelParams()
    below = mos(0.0, 170.0).r_factor - mos(0.0, 160.0).r_factor
    above = mos(0.0, 260.0).r_factor - mos(0.0, 250.0).r_factor
    assert below == pytest.approx(-10 * p.delay_slope_low)
    assert above == pytest.approx(-10 * (p.delay_slope_low + p.delay_slope_high))


def test_mos_rejects_bad_inputs():
    with pytest.raises(DomainError):
        mos(-0.1, 10.0)
    with pytest.raises(DomainError):
        mos(0.1, -10.0)


# ---------------------------------------------------------------------------
# playout curves


def test_curve_optimum_sits_at_smallest_deadline_covering_the_delay():
    deadlines = list(range(50, 401, 10))
    points = mos_curve(100, [80.0] * 100, deadlines, end_system_delay=0.0)
    by_deadline = {p.deadline: p for p in points}
    assert by_deadline[70].effective_loss == 1.0
    assert by_deadline[80].effective_loss == 0.0
    assert optimal_playout(points) == 80.0


def test_curve_identical_streams_identical_scores():
    deadlines = range(50, 201, 50)
    a = mos_curve(50, [60.0] * 45, deadlines, 40.0)
    b = mos_curve(50, [60.0] * 45, deadlines, 40.0)
    assert a == b


def test_optimal_playout_breaks_ties_low():
    points = mos_curve(10, [30.0] * 10, [100, 200, 300], 0.0)
    scores = [p.score.mos for p in points]
    assert scores[0] == scores[1] == scores[2]
    assert optimal_playout(points) == 100.0


def test_replication_curve_dominates_single_path():
    sim = simulate(Scenario(
        paths=[PathSpec("a", delay=DelayModel("paretonormal", mean=90.0, stddev=35.0)),
               PathSpec("b", delay=DelayModel("paretonormal", mean=90.0, stddev=35.0))],
        traffic=TrafficSpec(count=2000), seed=404,
    ))
    deadlines = list(range(50, 401, 10))
    rail = rail_mos_curve(sim, deadlines, end_system_delay=40.0)
    singles = [path_mos_curve(sim, i, deadlines, 40.0) for i in (0, 1)]
    for i in range(len(deadlines)):
        best_single = max(singles[0][i].score.mos, singles[1][i].score.mos)
        assert rail[i].score.mos >= best_single - 1e-9


def test_curve_empty_deadlines_is_error():
    with pytest.raises(DomainError):
        mos_curve(10, [10.0], [], 0.0)


# ---------------------------------------------------------------------------
# TCP model


def test_single_path_formula_value():
    assert tcp_throughput_single(0.01, 100.0) == pytest.approx(122.0, rel=1e-12)


def test_quadrupling_loss_halves_throughput():
    t1 = tcp_throughput_single(0.005, 80.0)
    t4 = tcp_throughput_single(0.02, 80.0)
    assert t4 == pytest.approx(t1 / 2, rel=1e-12)


def test_single_path_domain_errors():
    for p, rtt in ((0.0, 100.0), (1.0, 100.0), (0.01, 0.0), (-0.1, 10.0)):
        with pytest.raises(DomainError):
            tcp_throughput_single(p, rtt)


def test_rail_symmetric_paths():
    pred = tcp_throughput_rail(TcpPathSet.of([(0.01, 100.0), (0.01, 100.0)]))
    assert pred.expected_rtt == pytest.approx(100.0, rel=1e-12)
    assert pred.throughput == pytest.approx(1220.0, rel=1e-12)


def test_rail_matches_explicit_two_path_formula():
    p1, p2, rtt1, rtt2 = 0.02, 0.005, 40.0, 90.0
    pred = tcp_throughput_rail(TcpPathSet.of([(p1, rtt1), (p2, rtt2)]))
    e_rtt = (rtt1 * (1 - p1) + rtt2 * p1 * (1 - p2)) / (1 - p1 * p2)
    expected = 1.22 / ((e_rtt / 1000.0) * math.sqrt(p1 * p2))
    assert pred.expected_rtt == pytest.approx(e_rtt, rel=1e-12)
    assert pred.throughput == pytest.approx(expected, rel=1e-12)


def test_rail_expected_rtt_between_path_rtts():
    rng = np.random.default_rng(5)
    for _ in range(200):
        p1, p2 = rng.uniform(0.001, 0.5, size=2)
        rtt1 = rng.uniform(5.0, 200.0)
        rtt2 = rtt1 + rng.uniform(0.0, 300.0)
        pred = tcp_throughput_rail(TcpPathSet.of([(p1, rtt1), (p2, rtt2)]))
        assert rtt1 - 1e-9 <= pred.expected_rtt <= rtt2 + 1e-9


def test_rail_single_path_degenerates_to_single_formula():
    pred = tcp_throughput_rail(TcpPathSet.of([(0.03, 55.0)]))
    assert pred.expected_rtt == pytest.approx(55.0, rel=1e-12)
    assert pred.throughput == pytest.approx(tcp_throughput_single(0.03, 55.0),
                                            rel=1e-12)


def test_rail_speedup_matches_ratio_formula():
    # equal loss on both paths: T/T1 = (1/sqrt(p)) * (1+p) / (1 + p*rtt2/rtt1)
    for p in (1e-4, 1e-3, 0.01, 0.05):
        for ratio in (1.0, 2.0, 5.0, 10.0):
            rtt1 = 10.0
            pred = tcp_throughput_rail(TcpPathSet.of([(p, rtt1), (p, rtt1 * ratio)]))
            got = pred.throughput / tcp_throughput_single(p, rtt1)
            expected = (1 / math.sqrt(p)) * (1 + p) / (1 + p * ratio)
            assert got == pytest.approx(expected, rel=1e-12)


def test_rail_spot_value():
    pred = tcp_throughput_rail(TcpPathSet.of([(0.01, 10.0), (0.01, 100.0)]))
    speedup = pred.throughput / tcp_throughput_single(0.01, 10.0)
    assert speedup == pytest.approx(101.0 / 11.0, abs=1e-6)


def test_fact1_check_examples():
    assert tcp_fact1_check(TcpPathSet.of([(0.01, 10.0), (0.01, 100.0)])) == (True, True)
    assert tcp_fact1_check(TcpPathSet.of([(0.04, 70.0), (0.04, 70.0)])) == (True, True)


def test_fact1_holds_across_grid():
    for p in np.logspace(-4, -1, 20):
        for ratio in np.linspace(1.0, 10.0, 10):
            pair = TcpPathSet.of([(float(p), 10.0), (float(p), 10.0 * ratio)])
            assert tcp_fact1_check(pair) == (True, True)


def test_pathset_validation():
    with pytest.raises(DomainError):
        TcpPathSet.of([])
    with pytest.raises(DomainError):
        TcpPathSet.of([(0.0, 10.0)])
    with pytest.raises(DomainError):
        TcpPathSet.of([(0.5, -1.0)])
    from railsim.quality import TcpPath
    with pytest.raises(DomainError):
        TcpPathSet((TcpPath(0.1, 100.0), TcpPath(0.1, 10.0)))  # unsorted
    # .of() sorts by RTT
    ps = TcpPathSet.of([(0.1, 100.0), (0.2, 10.0)])
    assert [p.rtt for p in ps.paths] == [10.0, 100.0]


def test_fact1_requires_two_paths():
    with pytest.raises(DomainError):
        tcp_fact1_check(TcpPathSet.of([(0.1, 10.0)]))
