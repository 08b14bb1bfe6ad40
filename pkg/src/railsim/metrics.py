"""Network-level statistics: empirical delay CDFs and their two-path
composition, burst-loss statistics, reordering statistics and downtime
combination.  Pure functions over immutable inputs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError


class DelayCdf:
    """Empirical step-function CDF over delay samples (no smoothing)."""

    def __init__(self, samples: Iterable[float]):
        arr = np.sort(np.asarray(list(samples) if not isinstance(samples, np.ndarray)
                                 else samples, dtype=np.float64))
        if arr.size == 0:
            raise DomainError("empirical CDF needs at least one sample")
        arr.setflags(write=False)
        self._samples = arr

    @property
    def sorted_samples(self) -> np.ndarray:
        return self._samples

    @property
    def n(self) -> int:
        return int(self._samples.size)

    def __call__(self, t: float) -> float:
        """Fraction of samples <= t."""
        return float(np.searchsorted(self._samples, t, side="right")) / self.n

    def quantile(self, q: float) -> float:
        """Smallest sample x with F(x) >= q (inverse CDF, no interpolation)."""
        if not 0.0 < q <= 1.0:
            raise DomainError(f"quantile level must be in (0, 1], got {q}")
        idx = min(self.n - 1, max(0, math.ceil(q * self.n) - 1))
        return float(self._samples[idx])


def empirical_cdf(delays: Iterable[float]) -> DelayCdf:
    return DelayCdf(delays)


CdfLike = Callable[[float], float]


def rail_cdf(f1: CdfLike, f2: CdfLike, t: float) -> float:
    """Delay CDF of the first-arriving copy over two paths:
    1 - (1 - F1(t)) * (1 - F2(t))."""
    return 1.0 - (1.0 - f1(t)) * (1.0 - f2(t))


@dataclass
class BurstStats:
    """Loss burstiness; a burst is a maximal run of >= 2 consecutive losses.

    ``max_burst`` reports the longest loss run of any length, so an
    isolated loss still shows up there.
    """

    lost_in_burst: int = 0
    num_bursts: int = 0
    avg_burst: float = 0.0
    max_burst: int = 0


def burst_stats(loss_sequence: Iterable[bool]) -> BurstStats:
    runs: list[int] = []
    cur = 0
    for lost in loss_sequence:
        if lost:
            cur += 1
        elif cur:
            runs.append(cur)
            cur = 0
    if cur:
        runs.append(cur)
    bursts = [r for r in runs if r >= 2]
    lost_in_burst = sum(bursts)
    num_bursts = len(bursts)
    return BurstStats(
        lost_in_burst=lost_in_burst,
        num_bursts=num_bursts,
        avg_burst=lost_in_burst / num_bursts if num_bursts else 0.0,
        max_burst=max(runs, default=0),
    )


@dataclass
class ReorderStats:
    """Out-of-order forwards; the gap of a late packet is the distance to
    the highest seq already forwarded when it went out."""

    out_of_order_count: int = 0
    gaps: dict[int, int] = field(default_factory=dict)


def reorder_stats(forwarded_order: Sequence[int]) -> ReorderStats:
    gaps: dict[int, int] = {}
    count = 0
    high: int | None = None
    for seq in forwarded_order:
        if high is not None and seq < high:
            g = high - seq
            gaps[g] = gaps.get(g, 0) + 1
            count += 1
        elif high is None or seq > high:
            high = seq
    return ReorderStats(out_of_order_count=count, gaps=gaps)


def downtime_combine(bad_fraction_1: float, bad_fraction_2: float) -> float:
    """Fraction of time both links are bad at once (independent failures)."""
    for v in (bad_fraction_1, bad_fraction_2):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"bad-time fraction must be in [0, 1], got {v}")
    return bad_fraction_1 * bad_fraction_2
