"""Discrete-event simulation of request arrivals and departures."""

from __future__ import annotations

import csv
import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .embedding import EmbeddingAlgorithm, EmbeddingOutcome
from .errors import EmptySample
from .pso import FitnessWeights
from .substrate import SubstrateNetwork
from .workload import VirtualRequest

DEPARTURE = "departure"
ARRIVAL = "arrival"
# departures sort first at equal timestamps so freed resources are reusable
_ORDER = {DEPARTURE: 0, ARRIVAL: 1}

CSV_COLUMNS = ("time", "acceptance_rate", "avg_cost", "avg_delay", "comprehensive_cost")
NAN = float("nan")


@dataclass(frozen=True, order=True)
class SimEvent:
    time: float
    priority: int
    seq: int
    kind: str = field(compare=False)
    request: VirtualRequest = field(compare=False)


@dataclass
class EventRecord:
    time: float
    event: str
    request: int
    outcome: str
    cost: float
    delay: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "time": self.time,
                "event": self.event,
                "request": self.request,
                "outcome": self.outcome,
                "cost": self.cost,
                "delay": self.delay,
            },
            separators=(",", ":"),
        )


@dataclass
class MetricsSeries:
    time: list[float] = field(default_factory=list)
    acceptance_rate: list[float] = field(default_factory=list)
    avg_cost: list[float] = field(default_factory=list)
    avg_delay: list[float] = field(default_factory=list)
    comprehensive_cost: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.time)

    def rows(self) -> Iterable[tuple[float, ...]]:
        return zip(self.time, self.acceptance_rate, self.avg_cost, self.avg_delay, self.comprehensive_cost)

    def last(self) -> dict[str, float]:
        return dict(zip(CSV_COLUMNS, list(self.rows())[-1])) if self.time else {}

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for row in self.rows():
                w.writerow([fmt(x) for x in row])


def fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.6f}"


def outcome_index(o: EmbeddingOutcome, weights: FitnessWeights) -> float:
    cn = weights.cost_norm if weights.cost_norm is not None else o.cost_norm
    dn = weights.delay_norm if weights.delay_norm is not None else o.delay_norm
    return weights.alpha * o.cost / cn + weights.beta * o.delay / dn


def compute_comprehensive_cost(outcomes: Sequence[EmbeddingOutcome], weights: FitnessWeights) -> float:
    """Mean weighted cost/delay index over accepted outcomes."""
    accepted = [o for o in outcomes if o.accepted]
    if not accepted:
        raise EmptySample("no accepted outcomes")
    return sum(outcome_index(o, weights) for o in accepted) / len(accepted)


@dataclass
class SimulationResult:
    metrics: MetricsSeries
    events: list[EventRecord]
    outcomes: list[EmbeddingOutcome]
    pending_departures: int

    def write_events(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for e in self.events:
                fh.write(e.to_json() + "\n")


def _check_ledger(net: SubstrateNetwork) -> None:
    for n in net.nodes.values():
        assert 0 <= n.cpu_available <= n.cpu_capacity, f"node {n.id} ledger out of bounds"
    for ln in net.links.values():
        assert 0 <= ln.bw_available <= ln.bw_capacity, f"link {ln.key} ledger out of bounds"


def run(
    net: SubstrateNetwork,
    workload: Sequence[VirtualRequest],
    algorithm: EmbeddingAlgorithm,
    sampling: float = 1.0,
    horizon: float | None = None,
    weights: FitnessWeights | None = None,
    check_invariants: bool = False,
) -> SimulationResult:
    """Replay ``workload`` against ``net`` up to ``horizon``.

    Metrics are cumulative from t=0 and sampled at ``0, sampling, 2*sampling, ...``
    up to and including ``horizon``. Departures scheduled after the horizon stay
    pending, so their resources remain allocated on return.
    """
    if sampling <= 0:
        raise ValueError("sampling interval must be positive")
    weights = weights or getattr(algorithm, "weights", None) or FitnessWeights()
    if horizon is None:
        horizon = math.ceil(max((r.arrival_time for r in workload), default=0.0))

    queue: list[SimEvent] = []
    seq = 0
    for r in workload:
        heapq.heappush(queue, SimEvent(r.arrival_time, _ORDER[ARRIVAL], seq, ARRIVAL, r))
        seq += 1

    live: dict[int, EmbeddingOutcome] = {}
    outcomes: list[EmbeddingOutcome] = []
    events: list[EventRecord] = []
    metrics = MetricsSeries()
    arrived = accepted = 0
    sum_cost = sum_delay = sum_index = 0.0

    steps = int(round(horizon / sampling))
    for k in range(steps + 1):
        t = min(k * sampling, horizon)
        while queue and queue[0].time <= t:
            ev = heapq.heappop(queue)
            req = ev.request
            if ev.kind == DEPARTURE:
                out = live.pop(req.id)
                for rc in out.receipts:
                    net.release(rc)
                events.append(EventRecord(ev.time, DEPARTURE, req.id, "released", out.cost, out.delay))
            else:
                arrived += 1
                out = algorithm.embed(req, net)
                outcomes.append(out)
                if out.accepted:
                    accepted += 1
                    sum_cost += out.cost
                    sum_delay += out.delay
                    sum_index += outcome_index(out, weights)
                    live[req.id] = out
                    heapq.heappush(
                        queue, SimEvent(req.departure_time, _ORDER[DEPARTURE], seq, DEPARTURE, req)
                    )
                    seq += 1
                events.append(
                    EventRecord(
                        ev.time, ARRIVAL, req.id, "accepted" if out.accepted else "rejected", out.cost, out.delay
                    )
                )
            if check_invariants:
                _check_ledger(net)
        metrics.time.append(t)
        metrics.acceptance_rate.append(accepted / arrived if arrived else NAN)
        metrics.avg_cost.append(sum_cost / accepted if accepted else NAN)
        metrics.avg_delay.append(sum_delay / accepted if accepted else NAN)
        metrics.comprehensive_cost.append(sum_index / accepted if accepted else NAN)

    pending = sum(1 for ev in queue if ev.kind == DEPARTURE)
    return SimulationResult(metrics, events, outcomes, pending)
