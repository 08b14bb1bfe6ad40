"""Edge-device datapath: encapsulation, replication over all links,
duplicate suppression at the receiver, and release-time policies
(delay padding, optional reorder removal)."""

from __future__ import annotations

import enum
import heapq
import struct
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigurationError

# Wire format: sender id (u64 BE), sequence number (u64 BE), payload
# length (u16 BE), payload bytes.
_HEADER = struct.Struct(">QQH")
HEADER_SIZE = _HEADER.size
_U64_MAX = (1 << 64) - 1

DEFAULT_DEDUP_WINDOW = 4096


@dataclass(frozen=True, slots=True)
class RailHeader:
    """Encapsulation header carried by every replicated copy."""

    sender_id: int
    seq: int


def encode_packet(header: RailHeader, payload: bytes = b"") -> bytes:
    if not 0 <= header.sender_id <= _U64_MAX:
        raise ConfigurationError(f"sender_id out of range: {header.sender_id}")
    if not 0 <= header.seq <= _U64_MAX:
        raise ConfigurationError(f"seq out of range: {header.seq}")
    if len(payload) > 0xFFFF:
        raise ConfigurationError(f"payload too large: {len(payload)} bytes")
    return _HEADER.pack(header.sender_id, header.seq, len(payload)) + payload


def decode_packet(buf: bytes) -> tuple[RailHeader, bytes]:
    if len(buf) < HEADER_SIZE:
        raise ConfigurationError(f"short packet: {len(buf)} < {HEADER_SIZE} bytes")
    sender_id, seq, length = _HEADER.unpack_from(buf)
    payload = buf[HEADER_SIZE:HEADER_SIZE + length]
    if len(payload) != length:
        raise ConfigurationError("truncated payload")
    return RailHeader(sender_id, seq), payload


def replicate(packet_seq: int, sender_id: int,
              active_paths: Sequence[str]) -> list[tuple[str, RailHeader]]:
    """One copy per active path, all carrying the same (sender, seq)."""
    if not active_paths:
        raise ConfigurationError("replicate: no active paths")
    header = RailHeader(sender_id, packet_seq)
    return [(path_id, header) for path_id in active_paths]


class Decision(enum.Enum):
    FORWARD = "forward"
    SUPPRESS = "suppress"


class DedupState:
    """Sliding-window duplicate filter over sequence numbers.

    Remembers the last ``window`` forwarded seqs; the first copy of a seq
    is forwarded, later copies are suppressed.  A copy arriving after its
    seq was evicted from the window is forwarded again (the simulation
    engine counts these window-miss duplicates).
    """

    def __init__(self, window: int = DEFAULT_DEDUP_WINDOW):
        if window < 1:
            raise ConfigurationError(f"dedup window must be >= 1, got {window}")
        self.window = window
        self.highest_forwarded: int | None = None
        self._seen: set[int] = set()
        self._order: deque[int] = deque()

    @property
    def seen(self) -> frozenset[int]:
        return frozenset(self._seen)

    def observe(self, seq: int) -> bool:
        """True if this copy should be forwarded; updates the window."""
        if seq in self._seen:
            return False
        self._seen.add(seq)
        self._order.append(seq)
        if len(self._order) > self.window:
            self._seen.discard(self._order.popleft())
        if self.highest_forwarded is None or seq > self.highest_forwarded:
            self.highest_forwarded = seq
        return True


def on_wan_arrival(state: DedupState, header: RailHeader,
                   arrival_time: float) -> Decision:
    """Receiver-side decision for one copy arriving from the WAN."""
    return Decision.FORWARD if state.observe(header.seq) else Decision.SUPPRESS


@dataclass
class PaddingConfig:
    """Delay padding: hold early copies so the one-way delay presented to
    the LAN is a roughly constant ``target_one_way`` (never drops)."""

    enabled: bool = False
    target_one_way: float = 0.0  # ms; also the reorder-removal hold timeout


def padding_release(arrival_time: float, rail_delay: float,
                    cfg: PaddingConfig) -> float:
    """Release time for a packet that arrived with one-way delay ``rail_delay``.

    Below the target the packet waits out the difference; at or above it
    the packet goes straight out (late packets are never dropped).
    """
    if arrival_time < 0 or rail_delay < 0:
        raise ConfigurationError(
            f"negative padding input: arrival={arrival_time}, delay={rail_delay}"
        )
    if not cfg.enabled:
        return arrival_time
    if cfg.target_one_way < 0:
        raise ConfigurationError(f"negative padding target: {cfg.target_one_way}")
    if rail_delay < cfg.target_one_way:
        return arrival_time + (cfg.target_one_way - rail_delay)
    return arrival_time


def reorder_hold_schedule(ready: Iterable[tuple[int, int]], timeout_ns: int,
                          window: int = DEFAULT_DEDUP_WINDOW,
                          first_seq: int = 0) -> list[tuple[int, int]]:
    """Reorder-removal release schedule.

    ``ready`` is the (time_ns, seq) stream of packets as they become
    forwardable, sorted by time (ties by seq).  A packet is held until
    every smaller seq has been released or declared lost, where a missing
    seq is declared lost once some held packet above it has waited
    ``timeout_ns``.  Nothing is ever dropped: a copy arriving after its
    gap timed out is released immediately (late, possibly out of order).
    Returns the (release_ns, seq) events in emission order.
    """
    released: list[tuple[int, int]] = []
    buffered: dict[int, int] = {}
    deadlines: list[tuple[int, int]] = []
    next_expected = first_seq
    ready = list(ready)
    i, n = 0, len(ready)
    inf = 1 << 62
    while i < n or deadlines:
        t_ready = ready[i][0] if i < n else inf
        t_dead = deadlines[0][0] if deadlines else inf
        if t_ready <= t_dead:
            t, s = ready[i]
            i += 1
            if s < next_expected or s in buffered:
                # duplicate, or straggler whose gap already timed out
                released.append((t, s))
                continue
            buffered[s] = t
            heapq.heappush(deadlines, (t + timeout_ns, s))
            while next_expected in buffered:
                released.append((t, next_expected))
                del buffered[next_expected]
                next_expected += 1
            if len(buffered) > window:
                # memory bound: give up on the oldest gap
                s_min = min(buffered)
                released.append((t, s_min))
                del buffered[s_min]
                next_expected = s_min + 1
                while next_expected in buffered:
                    released.append((t, next_expected))
                    del buffered[next_expected]
                    next_expected += 1
        else:
            dl, s = heapq.heappop(deadlines)
            if s not in buffered:
                continue  # already released
            for m in sorted(k for k in buffered if k <= s):
                released.append((dl, m))
                del buffered[m]
            next_expected = s + 1
            while next_expected in buffered:
                released.append((dl, next_expected))
                del buffered[next_expected]
                next_expected += 1
    return released
