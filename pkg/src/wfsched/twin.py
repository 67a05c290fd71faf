"""Deterministic stand-in for the cluster digital twin.

Carbon intensity comes from a replayed trace rather than a forecaster, and
anomaly detection is a pair of hard thresholds applied to one telemetry
snapshot.  Nothing here learns or samples; the same inputs always give the
same cluster and the same intensity curve.

Trace CSV: ``time_seconds,intensity_g_per_kwh`` per line, optional header.
Snapshot CSV: ``node,load,temperature,power`` per line, optional header.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field

from .errors import EmptyClusterError, TraceError
from .model import ClusterSpec


@dataclass(frozen=True)
class CarbonTrace:
    """Piecewise-constant, right-continuous intensity in g CO2 / kWh.

    The value at ``t`` is that of the last breakpoint with time <= t; the
    final value holds forever.
    """

    breakpoints: tuple[tuple[float, float], ...]
    _times: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        bps = tuple((float(t), float(v)) for t, v in self.breakpoints)
        if not bps:
            raise TraceError("trace needs at least one breakpoint")
        if bps[0][0] != 0.0:
            raise TraceError("trace must start at time 0")
        for (t0, _), (t1, _) in zip(bps, bps[1:]):
            if not t1 > t0:
                raise TraceError(f"trace times must be strictly ascending ({t0} then {t1})")
        for t, v in bps:
            if not (math.isfinite(t) and math.isfinite(v)):
                raise TraceError("trace values must be finite")
            if v < 0:
                raise TraceError(f"negative intensity {v} at t={t}")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "_times", tuple(t for t, _ in bps))

    @classmethod
    def constant(cls, intensity: float) -> CarbonTrace:
        return cls(((0.0, intensity),))

    def integrate(self, start: float, end: float) -> float:
        """Exact integral of intensity over [start, end), in (g/kWh)*s."""
        if end <= start:
            return 0.0
        bps = self.breakpoints
        i = bisect.bisect_right(self._times, start) - 1
        total = 0.0
        lo = start
        while True:
            hi = bps[i + 1][0] if i + 1 < len(bps) else math.inf
            if end <= hi:
                return total + bps[i][1] * (end - lo)
            total += bps[i][1] * (hi - lo)
            lo = hi
            i += 1


ZERO_TRACE = CarbonTrace.constant(0.0)


def _rows(text: str) -> list[list[str]]:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows:
        try:
            float(rows[0][1 if len(rows[0]) > 1 else 0])
        except ValueError:
            rows = rows[1:]
    return rows


def load_trace(text: str) -> CarbonTrace:
    bps = []
    for n, row in enumerate(_rows(text), 1):
        if len(row) != 2:
            raise TraceError(f"trace line {n}: expected 'time,intensity'")
        try:
            bps.append((float(row[0]), float(row[1])))
        except ValueError as exc:
            raise TraceError(f"trace line {n}: {exc}") from exc
    return CarbonTrace(tuple(bps))


def dump_trace(trace: CarbonTrace) -> str:
    return "".join(f"{t!r},{v!r}\n" for t, v in trace.breakpoints)


def intensity_at(trace: CarbonTrace, t: float) -> float:
    if t < 0:
        raise TraceError(f"negative time {t}")
    i = bisect.bisect_right(trace._times, t) - 1
    return trace.breakpoints[i][1]


@dataclass(frozen=True)
class NodeReading:
    load: float
    temperature: float
    power_reading: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.load <= 1.0:
            raise TraceError(f"load {self.load} outside [0, 1]")


@dataclass(frozen=True)
class TelemetrySnapshot:
    readings: dict[str, NodeReading]
    timestamp: float = 0.0


def load_snapshot(text: str, timestamp: float = 0.0) -> TelemetrySnapshot:
    readings: dict[str, NodeReading] = {}
    for n, row in enumerate(_rows(text), 1):
        if len(row) != 4:
            raise TraceError(f"snapshot line {n}: expected 'node,load,temperature,power'")
        node = row[0].strip()
        if node in readings:
            raise TraceError(f"snapshot line {n}: duplicate node {node!r}")
        try:
            readings[node] = NodeReading(float(row[1]), float(row[2]), float(row[3]))
        except ValueError as exc:
            raise TraceError(f"snapshot line {n}: {exc}") from exc
    return TelemetrySnapshot(readings, timestamp)


@dataclass(frozen=True)
class AnomalyPolicy:
    temp_limit: float = 90.0
    load_limit: float = 1.0

    def __post_init__(self) -> None:
        if not self.temp_limit > 0:
            raise TraceError("temp_limit must be positive")
        if not 0.0 < self.load_limit <= 1.0:
            raise TraceError("load_limit must lie in (0, 1]")

    def is_anomalous(self, reading: NodeReading) -> bool:
        return reading.temperature > self.temp_limit or reading.load > self.load_limit


def check_snapshot(cluster: ClusterSpec, snapshot: TelemetrySnapshot) -> None:
    unknown = set(snapshot.readings) - set(cluster.node_by_id)
    if unknown:
        raise TraceError(f"snapshot mentions unknown nodes {sorted(unknown)}")


def filter_nodes(
    cluster: ClusterSpec, snapshot: TelemetrySnapshot, policy: AnomalyPolicy
) -> ClusterSpec:
    """Drop nodes whose reading breaches the policy.

    Nodes without a reading are presumed healthy.  Readings for nodes not in
    ``cluster`` are ignored so that filtering is idempotent; use
    :func:`check_snapshot` to reject them up front.
    """
    keep = tuple(
        n
        for n in cluster.nodes
        if n.id not in snapshot.readings or not policy.is_anomalous(snapshot.readings[n.id])
    )
    if not keep:
        raise EmptyClusterError("every node was excluded as anomalous")
    if len(keep) == len(cluster.nodes):
        return cluster
    return ClusterSpec(keep, cluster.bandwidth)
