"""Per-path packet outcomes: parametric loss/delay models and recorded traces.

Every path owns an independent RNG stream derived from the scenario seed,
so a (path spec, seed) pair always reproduces the same outcome sequence
regardless of how many packets are drawn or whether they are drawn one at
a time or in bulk.  Randomness is consumed in fixed-size chunks with a
fixed draw order per chunk; the sequential recurrences (sticky loss,
AR(1) delay) run through the kernel backend.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np

from ._backend import ar1_scan, sticky_scan
from .errors import ConfigurationError, TraceParseError, TraceRangeError

# Randomness is drawn in whole chunks of this size so that packet i sees
# the same draws no matter how many packets a run asks for.
CHUNK = 65536

_MASK64 = (1 << 64) - 1
_PATH_STREAM = 1
_SHARED_STREAM = 2

DELAY_KINDS = ("constant", "normal", "paretonormal", "trace")


def stream_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Independent generator for one (seed, stream kind, index) triple."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, stream, index])
    return np.random.default_rng(ss)


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    return stream_rng(seed, _PATH_STREAM, path_index)


def shared_rng(seed: int, segment_index: int) -> np.random.Generator:
    return stream_rng(seed, _SHARED_STREAM, segment_index)


# ---------------------------------------------------------------------------
# outcome of one copy on one path


@dataclass(frozen=True, slots=True)
class Outcome:
    """One copy on one path: delivered after ``delay_ms``, or lost (None)."""

    delay_ms: float | None = None

    @property
    def lost(self) -> bool:
        return self.delay_ms is None


LOST = Outcome()


# ---------------------------------------------------------------------------
# model types


@dataclass
class LossModel:
    """Bernoulli loss with optional first-order stickiness.

    With probability ``correlation`` a packet repeats the previous loss
    outcome, otherwise it draws fresh with probability ``rate``.  The
    stationary loss rate of this process is ``rate`` for any correlation.
    """

    rate: float = 0.0
    correlation: float = 0.0


@dataclass
class DelayModel:
    """One-way delay model for a path.

    kind is one of constant | normal | paretonormal | trace.  The
    paretonormal is a mixture: with weight ``pareto_weight`` the centred
    deviate comes from a Pareto tail (shape ``pareto_alpha``, scale 1,
    recentred to zero mean), otherwise from a standard normal; the deviate
    is scaled by ``stddev`` and added to ``mean``.  ``correlation`` applies
    an AR(1) filter to the pre-clamp deviates; samples are clamped to >= 0.
    """

    kind: str = "constant"
    mean: float = 0.0
    stddev: float = 0.0
    correlation: float = 0.0
    trace: "Trace | None" = None
    pareto_alpha: float = 2.0
    pareto_weight: float = 0.25


@dataclass
class SharedSegmentSpec:
    """A network segment common to several paths; its per-packet loss
    outcome is sampled once and applied to every path that references it."""

    id: str
    loss: LossModel = field(default_factory=LossModel)


@dataclass
class PathSpec:
    """One emulated WAN path."""

    id: str
    loss: LossModel = field(default_factory=LossModel)
    delay: DelayModel = field(default_factory=DelayModel)
    shared: str | None = None


def validate_loss_model(m: LossModel, where: str = "loss") -> list[str]:
    problems = []
    if not 0.0 <= m.rate <= 1.0:
        problems.append(f"{where}.rate: must be in [0, 1], got {m.rate}")
    if not 0.0 <= m.correlation < 1.0:
        problems.append(f"{where}.correlation: must be in [0, 1), got {m.correlation}")
    return problems


def validate_delay_model(m: DelayModel, where: str = "delay") -> list[str]:
    problems = []
    if m.kind not in DELAY_KINDS:
        problems.append(f"{where}.kind: unknown kind {m.kind!r}")
    if m.mean < 0:
        problems.append(f"{where}.mean: must be >= 0, got {m.mean}")
    if m.stddev < 0:
        problems.append(f"{where}.stddev: must be >= 0, got {m.stddev}")
    if not 0.0 <= m.correlation < 1.0:
        problems.append(f"{where}.correlation: must be in [0, 1), got {m.correlation}")
    if m.kind == "trace" and m.trace is None:
        problems.append(f"{where}.trace: kind 'trace' requires a trace")
    if m.pareto_alpha <= 1.0:
        problems.append(f"{where}.pareto_alpha: must be > 1, got {m.pareto_alpha}")
    if not 0.0 <= m.pareto_weight <= 1.0:
        problems.append(f"{where}.pareto_weight: must be in [0, 1]")
    return problems


def _check(problems: list[str]) -> None:
    if problems:
        raise ConfigurationError("; ".join(problems))


# ---------------------------------------------------------------------------
# recorded traces


@dataclass
class Trace:
    """Recorded per-packet one-way delays; delay None marks a lost packet."""

    entries: list[tuple[int, float | None]]

    def __post_init__(self):
        if not self.entries:
            raise TraceParseError("empty trace")
        self._by_seq = {seq: d for seq, d in self.entries}
        self._delay_ms = np.array(
            [math.nan if d is None else d for _, d in self.entries], dtype=np.float64
        )
        self._lost = np.isnan(self._delay_ms)

    def __len__(self) -> int:
        return len(self.entries)

    def outcome(self, seq: int) -> Outcome:
        if seq not in self._by_seq:
            raise TraceRangeError(f"seq {seq} not present in trace")
        d = self._by_seq[seq]
        return LOST if d is None else Outcome(d)

    def replay_window(self, start: int, n: int) -> tuple[np.ndarray, np.ndarray, bool]:
        """Positional replay of packets [start, start+n), wrapping around.

        Returns (lost bool[n], delay_ms float[n], wrapped).
        """
        idx = (start + np.arange(n, dtype=np.int64)) % len(self.entries)
        return self._lost[idx], self._delay_ms[idx], start + n > len(self.entries)

    def replay(self, n: int) -> tuple[np.ndarray, np.ndarray, bool]:
        return self.replay_window(0, n)


def load_trace(source: str | IO[str]) -> Trace:
    """Parse a trace: one ``seq,delay_ms`` pair per line.

    ``#`` starts a comment, blank lines are skipped, delay 0 marks a lost
    packet, sequence numbers must be strictly increasing.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    entries: list[tuple[int, float | None]] = []
    prev_seq = None
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise TraceParseError(f"expected 'seq,delay_ms', got {line!r}", lineno)
        try:
            seq = int(parts[0])
            delay = float(parts[1])
        except ValueError:
            raise TraceParseError(f"malformed entry {line!r}", lineno) from None
        if delay < 0:
            raise TraceParseError(f"negative delay {delay}", lineno)
        if prev_seq is not None and seq <= prev_seq:
            raise TraceParseError("non-monotone seq", lineno)
        prev_seq = seq
        entries.append((seq, None if delay == 0 else delay))
    if not entries:
        raise TraceParseError("empty trace")
    return Trace(entries)


def trace_outcome(trace: Trace, seq: int) -> Outcome:
    """Outcome recorded for ``seq``: LOST for 0-delay entries."""
    return trace.outcome(seq)


# ---------------------------------------------------------------------------
# sampling streams


class _Buffered:
    """take(n) over a chunk producer, carrying leftovers between calls."""

    def __init__(self):
        self._leftover: tuple[np.ndarray, ...] | None = None

    def _produce(self) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def _take(self, n: int) -> tuple[np.ndarray, ...]:
        parts: list[tuple[np.ndarray, ...]] = []
        got = 0
        if self._leftover is not None:
            parts.append(self._leftover)
            got = len(self._leftover[0])
            self._leftover = None
        while got < n:
            chunk = self._produce()
            parts.append(chunk)
            got += len(chunk[0])
        cols = tuple(np.concatenate(c) for c in zip(*parts))
        if got > n:
            self._leftover = tuple(c[n:] for c in cols)
        return tuple(c[:n] for c in cols)


class LossStream(_Buffered):
    """Chunked sampler for one LossModel."""

    def __init__(self, model: LossModel, rng: np.random.Generator):
        super().__init__()
        _check(validate_loss_model(model))
        self.model = model
        self._rng = rng
        self._state = -1

    def _produce(self):
        u_repeat = self._rng.random(CHUNK)
        u_fresh = self._rng.random(CHUNK)
        out, self._state = sticky_scan(
            u_fresh, u_repeat, self.model.rate, self.model.correlation, self._state
        )
        return (out,)

    def take(self, n: int) -> np.ndarray:
        """Next ``n`` loss outcomes as a bool array (True = lost)."""
        return self._take(n)[0].astype(bool)


class PathStream(_Buffered):
    """Chunked sampler producing (lost, delay) columns for one path.

    The per-chunk draw order is fixed (loss draws, then delay draws), so
    outcome i is independent of the total number of packets requested.
    Only the path's own loss process is sampled here; shared-segment loss
    is combined by the caller.
    """

    def __init__(self, spec: PathSpec, rng: np.random.Generator):
        super().__init__()
        _check(validate_loss_model(spec.loss, f"path {spec.id}: loss"))
        _check(validate_delay_model(spec.delay, f"path {spec.id}: delay"))
        self.spec = spec
        self._rng = rng
        self._loss_state = -1
        self._ar_prev = 0.0
        self._ar_has = False
        self._pos = 0  # packets produced so far (drives trace replay)
        self._consumed = 0
        self.wrapped = False  # True once a trace replay had to wrap around

    def _delay_chunk(self) -> np.ndarray:
        d = self.spec.delay
        if d.kind == "constant":
            return np.full(CHUNK, float(d.mean))
        if d.kind == "normal":
            eps = d.stddev * self._rng.standard_normal(CHUNK)
        else:  # paretonormal
            u_mix = self._rng.random(CHUNK)
            z = self._rng.standard_normal(CHUNK)
            u_par = 1.0 - self._rng.random(CHUNK)  # (0, 1], keeps the tail finite
            pareto = u_par ** (-1.0 / d.pareto_alpha)
            pareto_mean = d.pareto_alpha / (d.pareto_alpha - 1.0)
            eps = d.stddev * np.where(u_mix < d.pareto_weight, pareto - pareto_mean, z)
        x, self._ar_prev = ar1_scan(eps, d.correlation, self._ar_prev, self._ar_has)
        self._ar_has = True
        return np.maximum(d.mean + x, 0.0)

    def _produce(self) -> tuple[np.ndarray, np.ndarray]:
        u_repeat = self._rng.random(CHUNK)
        u_fresh = self._rng.random(CHUNK)
        own_lost, self._loss_state = sticky_scan(
            u_fresh, u_repeat, self.spec.loss.rate, self.spec.loss.correlation,
            self._loss_state,
        )
        lost = own_lost.astype(bool)
        if self.spec.delay.kind == "trace":
            t_lost, delay, _ = self.spec.delay.trace.replay_window(self._pos, CHUNK)
            lost = lost | t_lost
        else:
            delay = self._delay_chunk()
        self._pos += CHUNK
        return lost, delay

    def take(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Next ``n`` packets as (lost bool[n], delay_ms float[n]).

        The delay column is populated for every packet; entries where
        ``lost`` is True are ignored downstream.
        """
        cols = self._take(n)
        self._consumed += n
        if self.spec.delay.kind == "trace":
            self.wrapped = self.wrapped or self._consumed > len(self.spec.delay.trace)
        return cols


class SharedSegmentState:
    """Streaming loss sampler for one shared segment."""

    def __init__(self, spec: SharedSegmentSpec, seed: int, segment_index: int = 0):
        self.spec = spec
        self._stream = LossStream(spec.loss, shared_rng(seed, segment_index))

    def sample(self) -> Outcome:
        """Loss outcome of the next packet on the shared segment."""
        lost = bool(self._stream.take(1)[0])
        return LOST if lost else Outcome(0.0)


class PathState:
    """Per-run, per-packet sampling state for one path."""

    def __init__(self, spec: PathSpec, seed: int, path_index: int = 0):
        self.spec = spec
        self._stream = PathStream(spec, path_rng(seed, path_index))

    def next_outcome(self, shared_outcomes: Mapping[str, object] | None = None) -> Outcome:
        shared_lost = False
        if self.spec.shared is not None:
            if shared_outcomes is None or self.spec.shared not in shared_outcomes:
                raise ConfigurationError(
                    f"path {self.spec.id}: missing shared outcome for "
                    f"segment {self.spec.shared!r}"
                )
            res = shared_outcomes[self.spec.shared]
            shared_lost = res.lost if isinstance(res, Outcome) else bool(res)
        lost, delay = self._stream.take(1)
        if shared_lost or bool(lost[0]):
            return LOST
        return Outcome(float(delay[0]))


def sample_outcome(path_state: PathState,
                   shared_outcomes: Mapping[str, object] | None = None) -> Outcome:
    """Outcome of the next packet on a path.

    A packet is lost when the referenced shared segment lost it or the
    path's own loss process fired; otherwise it is delivered with a delay
    drawn from the path's delay model.
    """
    return path_state.next_outcome(shared_outcomes)
