"""Global controller: request partitioning, pseudo-topology assembly and
per-domain embedding request generation.

All functions here are pure; controller "messages" are plain dataclasses
passed in-process.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import MissingUpload, NoPath
from .floyd import ShortestPaths, floyd_all_pairs
from .substrate import LinkKey, SubstrateLink, link_key
from .workload import VirtualLink, VirtualNode, VirtualRequest


@dataclass(frozen=True)
class IncidentLink:
    neighbor: int
    bw_demand: int
    neighbor_domains: tuple[int, ...]


@dataclass(frozen=True)
class CellSubgraph:
    center: VirtualNode
    incident_links: tuple[IncidentLink, ...]


@dataclass(frozen=True)
class NodeInfo:
    node: int
    domain: int
    unit_price: int
    cpu_available: int
    delay: int


@dataclass(frozen=True)
class Aggregate:
    """Least-price in-domain path summary. ``bottleneck`` is the smallest bw_available on it."""

    price: int
    delay: int
    bottleneck: int


@dataclass(frozen=True)
class InterLinkInfo:
    u: int
    v: int
    unit_price: int
    delay: int
    bw_available: int


@dataclass
class DomainUpload:
    """What one local controller reports. ``None`` aggregates mean unreachable."""

    domain: int
    candidates: dict[int, list[NodeInfo]]
    candidate_to_boundary: dict[tuple[int, int], Aggregate | None]
    candidate_to_candidate: dict[tuple[int, int], Aggregate | None]
    boundary_info: list[NodeInfo]
    boundary_to_boundary: dict[tuple[int, int], Aggregate | None]
    interdomain_links: list[InterLinkInfo] = field(default_factory=list)


CAND_BOUNDARY = "cand-boundary"
CAND_CAND = "cand-cand"
BOUNDARY_BOUNDARY = "boundary-boundary"
INTER = "inter"


@dataclass(frozen=True)
class PseudoEdge:
    u: int
    v: int
    price: int
    delay: int
    bottleneck: int
    kind: str

    def feasible(self, bw: int) -> bool:
        return self.bottleneck >= bw


@dataclass
class PseudoTopology:
    vertices: dict[int, NodeInfo]
    boundary: set[int]
    edges: dict[tuple[int, int], PseudoEdge]
    candidates: dict[int, list[int]]
    price_weight: float = 0.3
    delay_weight: float = 0.3
    _routes: dict[int, ShortestPaths] = field(default_factory=dict, repr=False)

    def weight(self, e: PseudoEdge) -> float:
        return self.price_weight * e.price + self.delay_weight * e.delay

    def routes(self, bw: int) -> ShortestPaths:
        """Floyd over pseudo-edges able to carry ``bw``; cached per demand."""
        sp = self._routes.get(bw)
        if sp is None:
            sp = floyd_all_pairs(
                sorted(self.vertices),
                ((e.u, e.v, self.weight(e)) for e in self.edges.values() if e.feasible(bw)),
            )
            self._routes[bw] = sp
        return sp

    def edge(self, u: int, v: int) -> PseudoEdge:
        return self.edges[link_key(u, v)]

    def domain_of(self, node: int) -> int:
        return self.vertices[node].domain


@dataclass
class EmbeddingRequest:
    domain: int
    node_assignments: list[tuple[int, int, int]] = field(default_factory=list)
    intradomain_link_demands: list[tuple[tuple[int, int], int]] = field(default_factory=list)
    interdomain_link_demands: list[tuple[LinkKey, int]] = field(default_factory=list)


def partition_request(req: VirtualRequest) -> list[CellSubgraph]:
    by_id = {n.id: n for n in req.nodes}
    incident: dict[int, list[IncidentLink]] = defaultdict(list)
    for l in req.links:
        incident[l.u].append(IncidentLink(l.v, l.bw_demand, by_id[l.v].candidate_domains))
        incident[l.v].append(IncidentLink(l.u, l.bw_demand, by_id[l.u].candidate_domains))
    return [CellSubgraph(n, tuple(incident[n.id])) for n in req.nodes]


def assemble_pseudo_topology(
    uploads: Iterable[DomainUpload],
    interdomain: Iterable[SubstrateLink | InterLinkInfo],
    required_domains: Iterable[int] = (),
    price_weight: float = 0.3,
    delay_weight: float = 0.3,
) -> PseudoTopology:
    """Merge local uploads into one cross-domain solver graph.

    Aggregates are copied from the uploads as-is. Inter-domain links are taken
    from ``interdomain`` when both endpoints are known boundary vertices.
    """
    uploads = list(uploads)
    got = {u.domain for u in uploads}
    for d in required_domains:
        if d not in got:
            raise MissingUpload(d)

    vertices: dict[int, NodeInfo] = {}
    boundary: set[int] = set()
    edges: dict[tuple[int, int], PseudoEdge] = {}
    candidates: dict[int, list[int]] = defaultdict(list)

    def put(a: int, b: int, agg: Aggregate | None, kind: str) -> None:
        if agg is None or a == b:
            return
        key = link_key(a, b)
        old = edges.get(key)
        if old is None or (agg.price, agg.delay) < (old.price, old.delay):
            edges[key] = PseudoEdge(key[0], key[1], agg.price, agg.delay, agg.bottleneck, kind)

    for up in sorted(uploads, key=lambda u: u.domain):
        for info in up.boundary_info:
            vertices[info.node] = info
            boundary.add(info.node)
        for vid in sorted(up.candidates):
            for info in up.candidates[vid]:
                vertices.setdefault(info.node, info)
                candidates[vid].append(info.node)
        for (a, b), agg in sorted(up.boundary_to_boundary.items()):
            put(a, b, agg, BOUNDARY_BOUNDARY)
        for (a, b), agg in sorted(up.candidate_to_boundary.items()):
            put(a, b, agg, CAND_BOUNDARY)
        for (a, b), agg in sorted(up.candidate_to_candidate.items()):
            put(a, b, agg, CAND_CAND)

    for ln in interdomain:
        if ln.u in boundary and ln.v in boundary:
            bw = ln.bw_available
            key = link_key(ln.u, ln.v)
            edges[key] = PseudoEdge(key[0], key[1], ln.unit_price, ln.delay, bw, INTER)

    return PseudoTopology(
        vertices=vertices,
        boundary=boundary,
        edges=edges,
        candidates=dict(candidates),
        price_weight=price_weight,
        delay_weight=delay_weight,
    )


def route_virtual_links(
    assignment: Mapping[int, int], req: VirtualRequest, topo: PseudoTopology
) -> dict[VirtualLink, list[int] | None]:
    """Least-weight feasible pseudo-path per virtual link (``None`` when none exists)."""
    out: dict[VirtualLink, list[int] | None] = {}
    for l in req.links:
        out[l] = topo.routes(l.bw_demand).path(assignment[l.u], assignment[l.v])
    return out


def generate_embedding_requests(
    assignment: Mapping[int, int], req: VirtualRequest, topo: PseudoTopology
) -> list[EmbeddingRequest]:
    """Split a solved node assignment into one request per touched domain."""
    used = list(assignment.values())
    if len(set(used)) != len(used):
        raise ValueError("two virtual nodes assigned to the same substrate node")
    for n in req.nodes:
        if assignment[n.id] not in topo.candidates.get(n.id, ()):
            raise ValueError(f"virtual node {n.id} assigned to a non-candidate {assignment[n.id]}")

    per_domain: dict[int, EmbeddingRequest] = {}

    def bucket(d: int) -> EmbeddingRequest:
        if d not in per_domain:
            per_domain[d] = EmbeddingRequest(d)
        return per_domain[d]

    for n in req.nodes:
        s = assignment[n.id]
        bucket(topo.domain_of(s)).node_assignments.append((n.id, s, n.cpu_demand))

    for l, path in route_virtual_links(assignment, req, topo).items():
        if path is None:
            raise NoPath((l.u, l.v))
        for a, b in zip(path, path[1:]):
            da, db = topo.domain_of(a), topo.domain_of(b)
            if da == db:
                bucket(da).intradomain_link_demands.append(((a, b), l.bw_demand))
            else:
                key = link_key(a, b)
                # inter-domain demand is booked once, by the lower endpoint's domain
                bucket(topo.domain_of(key[0])).interdomain_link_demands.append((key, l.bw_demand))
    return [per_domain[d] for d in sorted(per_domain)]
