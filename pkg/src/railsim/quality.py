"""Application-level quality models.

Voice quality uses the additive R-factor model: a base rating is reduced
by an equipment/loss impairment and a delay impairment, then mapped to a
1..5 MOS scale.  The loss impairment uses the standard G.711 constants by
default; every constant lives in :class:`EModelParams` so other codec
tables can be dropped in.  TCP throughput uses the inverse-square-root
loss law, extended to a replicated path set via the product of loss rates
and the expected RTT of the first successful copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .pathsim import Outcome

TCP_CONSTANT = 1.22  # packets-per-RTT rule-of-thumb coefficient


@dataclass
class EModelParams:
    r_base: float = 93.2
    codec_ie: float = 0.0        # G.711 equipment impairment
    codec_bpl: float = 4.3       # G.711 packet-loss robustness
    delay_knee: float = 177.3    # ms; extra slope beyond this one-way delay
    delay_slope_low: float = 0.024   # R units per ms
    delay_slope_high: float = 0.11   # R units per ms past the knee


G711 = EModelParams()


@dataclass(frozen=True, slots=True)
class QualityScore:
    r_factor: float
    mos: float


# ---------------------------------------------------------------------------
# loss combination


def _check_prob(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be in [0, 1], got {value}")


def rail_loss_independent(rates: Sequence[float]) -> float:
    """Loss of a replicated packet over independent paths: every copy must
    be lost, so the rates multiply."""
    if not rates:
        raise DomainError("need at least one loss rate")
    out = 1.0
    for r in rates:
        _check_prob(r, "loss rate")
        out *= r
    return out


def rail_loss_shared(p_shared: float, own_rates: Sequence[float]) -> float:
    """Loss when all paths cross a common segment with loss ``p_shared``.

    Delivery needs the shared segment to pass the packet and at least one
    independent segment to deliver its copy:
    loss = 1 - (1 - p_shared) * (1 - prod(own_rates)).
    """
    _check_prob(p_shared, "p_shared")
    return 1.0 - (1.0 - p_shared) * (1.0 - rail_loss_independent(own_rates))


# ---------------------------------------------------------------------------
# E-model


def _delivered(delay_samples) -> np.ndarray:
    vals = []
    for d in delay_samples:
        if d is None:
            continue
        if isinstance(d, Outcome):
            if d.lost:
                continue
            d = d.delay_ms
        d = float(d)
        if math.isnan(d):
            continue
        vals.append(d)
    return np.asarray(vals, dtype=np.float64)


def effective_loss(network_loss: float, delay_samples: Iterable, deadline: float) -> float:
    """Total loss seen by the application: network loss plus delivered
    packets that miss the playout deadline."""
    _check_prob(network_loss, "network_loss")
    if deadline < 0:
        raise DomainError(f"deadline must be >= 0, got {deadline}")
    delivered = _delivered(delay_samples)
    if delivered.size == 0:
        if network_loss < 1.0:
            raise DomainError("no delivered samples but network_loss < 1")
        return 1.0
    late = float(np.count_nonzero(delivered > deadline)) / delivered.size
    return network_loss + (1.0 - network_loss) * late


def mos(loss: float, one_way_delay: float, params: EModelParams = G711) -> QualityScore:
    """R-factor and MOS for a (loss, one-way delay) operating point.

    R = r_base - Ie_eff(loss) - Id(delay), clamped to [0, 100], then
    mapped through the standard cubic to MOS in [1, 4.5].
    """
    _check_prob(loss, "loss")
    if one_way_delay < 0:
        raise DomainError(f"one_way_delay must be >= 0, got {one_way_delay}")
    loss_pct = 100.0 * loss
    ie_eff = params.codec_ie + (95.0 - params.codec_ie) * loss_pct / (
        loss_pct + params.codec_bpl
    )
    id_delay = params.delay_slope_low * one_way_delay + params.delay_slope_high * max(
        0.0, one_way_delay - params.delay_knee
    )
    r = min(100.0, max(0.0, params.r_base - ie_eff - id_delay))
    raw = 1.0 + 0.035 * r + 7e-6 * r * (r - 60.0) * (100.0 - r)
    return QualityScore(r_factor=r, mos=min(4.5, max(1.0, raw)))


# ---------------------------------------------------------------------------
# playout curves


@dataclass(frozen=True, slots=True)
class MosPoint:
    deadline: float             # network-delay playout deadline (ms)
    one_way: float              # end-system + deadline budget (ms)
    effective_loss: float
    representative_delay: float  # end-system + mean on-time delay (ms)
    score: QualityScore


def mos_curve(n_sent: int, delivered_delays_ms, deadlines: Iterable[float],
              end_system_delay: float, params: EModelParams = G711) -> list[MosPoint]:
    """MOS across a range of playout deadlines for one delivery stream.

    Loss combines network loss with late arrivals; the delay fed to the
    model is the end-system budget plus the mean delay of packets that
    were delivered on time (the population that actually plays out).
    """
    deadlines = list(deadlines)
    if not deadlines:
        raise DomainError("deadline range is empty")
    if end_system_delay < 0:
        raise DomainError("end_system_delay must be >= 0")
    delivered = _delivered(delivered_delays_ms)
    if n_sent < 1:
        raise DomainError("n_sent must be >= 1")
    network_loss = 1.0 - delivered.size / n_sent
    points = []
    for d in deadlines:
        eff = (1.0 if delivered.size == 0
               else effective_loss(network_loss, delivered, d))
        on_time = delivered[delivered <= d] if delivered.size else delivered
        if on_time.size:
            rep = end_system_delay + float(np.mean(np.minimum(on_time, d)))
        else:
            rep = end_system_delay + d  # nothing plays out; MOS floors on loss
        points.append(MosPoint(
            deadline=float(d),
            one_way=end_system_delay + float(d),
            effective_loss=min(1.0, eff),
            representative_delay=rep,
            score=mos(min(1.0, eff), rep, params),
        ))
    return points


def optimal_playout(points: Sequence[MosPoint]) -> float:
    """Deadline with the highest MOS; ties go to the smallest deadline."""
    if not points:
        raise DomainError("no curve points")
    best = max(points, key=lambda p: (p.score.mos, -p.deadline))
    return best.deadline


def rail_mos_curve(sim, deadlines, end_system_delay: float,
                   params: EModelParams = G711) -> list[MosPoint]:
    """Curve for the replicated stream as released to the LAN."""
    return mos_curve(sim.scenario.traffic.count, sim.forwarded_delays_ms(),
                     deadlines, end_system_delay, params)


def path_mos_curve(sim, path_index: int, deadlines, end_system_delay: float,
                   params: EModelParams = G711) -> list[MosPoint]:
    """Curve a single path would have produced on its own, computed from
    the same per-path outcome stream as the replicated run."""
    delays = sim.per_path_outcomes[path_index].delivered_delays()
    return mos_curve(sim.scenario.traffic.count, delays, deadlines,
                     end_system_delay, params)


# ---------------------------------------------------------------------------
# TCP throughput


@dataclass(frozen=True, slots=True)
class TcpPath:
    loss_rate: float
    rtt: float  # ms


@dataclass
class TcpPathSet:
    """Paths ordered by ascending RTT, each with loss in (0, 1)."""

    paths: tuple[TcpPath, ...]

    def __post_init__(self):
        if not self.paths:
            raise DomainError("need at least one path")
        for p in self.paths:
            if not 0.0 < p.loss_rate < 1.0:
                raise DomainError(f"loss rate must be in (0, 1), got {p.loss_rate}")
            if p.rtt <= 0:
                raise DomainError(f"rtt must be > 0, got {p.rtt}")
        rtts = [p.rtt for p in self.paths]
        if rtts != sorted(rtts):
            raise DomainError("paths must be sorted by ascending RTT")

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]]) -> "TcpPathSet":
        """Build from (loss, rtt_ms) pairs, sorting by RTT."""
        return cls(tuple(TcpPath(loss, rtt)
                         for loss, rtt in sorted(pairs, key=lambda x: x[1])))


@dataclass(frozen=True, slots=True)
class TcpPrediction:
    expected_rtt: float  # ms
    throughput: float    # packets / s


def tcp_throughput_single(p: float, rtt: float) -> float:
    """Long-lived TCP throughput over one path: 1.22 / (RTT * sqrt(p))."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"loss rate must be in (0, 1), got {p}")
    if rtt <= 0:
        raise DomainError(f"rtt must be > 0, got {rtt}")
    return TCP_CONSTANT / ((rtt / 1000.0) * math.sqrt(p))


def tcp_throughput_rail(paths: TcpPathSet) -> TcpPrediction:
    """Replication makes TCP see a virtual path whose loss is the product
    of the per-path rates and whose RTT is the expectation over the first
    successful copy: copy i counts when all faster copies were lost and
    copy i was not."""
    ps = [p.loss_rate for p in paths.paths]
    rtts = [p.rtt for p in paths.paths]
    prod_all = math.prod(ps)
    denom = 1.0 - prod_all
    e_rtt = 0.0
    prefix = 1.0
    for rtt_i, p_i in zip(rtts, ps):
        e_rtt += rtt_i * prefix * (1.0 - p_i) / denom
        prefix *= p_i
    throughput = TCP_CONSTANT / ((e_rtt / 1000.0) * math.sqrt(prod_all))
    return TcpPrediction(expected_rtt=e_rtt, throughput=throughput)


def tcp_fact1_check(paths: TcpPathSet) -> tuple[bool, bool]:
    """Is the replicated throughput above each single path's throughput?"""
    if len(paths.paths) != 2:
        raise DomainError("fact-1 check takes exactly two paths")
    t = tcp_throughput_rail(paths).throughput
    t1 = tcp_throughput_single(paths.paths[0].loss_rate, paths.paths[0].rtt)
    t2 = tcp_throughput_single(paths.paths[1].loss_rate, paths.paths[1].rtt)
    return t > t1, t > t2
