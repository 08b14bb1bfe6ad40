"""railsim: deterministic simulation and quality models for packet
replication over redundant WAN links.

A sender-side edge device replicates every packet over all configured
paths; the receiver-side device forwards the first copy of each sequence
number, suppresses later copies and can pad early packets to a constant
one-way delay.  The package simulates that datapath over parametric or
trace-driven path models and evaluates the result with network metrics,
a VoIP MOS model and a TCP throughput model.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .engine import (ForwardRecord, Scenario, SimResult, TrafficSpec,
                     load_scenario, run_sweep, simulate)
from .errors import (ConfigurationError, DomainError, RailSimError,
                     TraceParseError, TraceRangeError, ValidationError)
from .metrics import (BurstStats, DelayCdf, ReorderStats, burst_stats,
                      downtime_combine, empirical_cdf, rail_cdf, reorder_stats)
from .pathsim import (LOST, DelayModel, LossModel, Outcome, PathSpec,
                      PathState, SharedSegmentSpec, Trace, load_trace,
                      sample_outcome, trace_outcome)
from .quality import (G711, EModelParams, MosPoint, QualityScore, TcpPath,
                      TcpPathSet, TcpPrediction, effective_loss, mos,
                      mos_curve, optimal_playout, path_mos_curve,
                      rail_loss_independent, rail_loss_shared, rail_mos_curve,
                      tcp_fact1_check, tcp_throughput_rail,
                      tcp_throughput_single)
from .railedge import (DedupState, Decision, PaddingConfig, RailHeader,
                       decode_packet, encode_packet, on_wan_arrival,
                       padding_release, replicate)

__all__ = [name for name in dir() if not name.startswith("_")]
