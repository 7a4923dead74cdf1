"""Per-domain logic: estimated mapping cost, candidate selection, upload
construction and final physical mapping with in-domain Floyd routing."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import InsufficientResources, NoFeasibleCandidate
from .floyd import ShortestPaths, floyd_all_pairs
from .global_controller import (
    Aggregate,
    CellSubgraph,
    DomainUpload,
    EmbeddingRequest,
    InterLinkInfo,
    NodeInfo,
)
from .substrate import (
    EmbeddingPlan,
    LinkDemand,
    NodeDemand,
    Receipt,
    SubstrateLink,
    SubstrateNetwork,
    link_key,
)


def domain_paths(
    net: SubstrateNetwork,
    domain: int,
    weight: Callable[[SubstrateLink], float] = lambda ln: ln.unit_price,
    min_bw: int = 0,
) -> ShortestPaths:
    """Floyd over one domain's intra links carrying at least ``min_bw``."""
    return floyd_all_pairs(
        net.domain_nodes(domain),
        ((ln.u, ln.v, weight(ln)) for ln in net.intra_links(domain) if ln.bw_available >= min_bw),
    )


def path_links(net: SubstrateNetwork, path: Sequence[int]) -> list[SubstrateLink]:
    return [net.link(a, b) for a, b in zip(path, path[1:])]


def aggregate(net: SubstrateNetwork, sp: ShortestPaths, a: int, b: int) -> Aggregate | None:
    path = sp.path(a, b)
    if path is None:
        return None
    links = path_links(net, path)
    return Aggregate(
        price=sum(ln.unit_price for ln in links),
        delay=sum(ln.delay for ln in links),
        bottleneck=min((ln.bw_available for ln in links), default=1 << 62),
    )


@dataclass(frozen=True)
class PreCost:
    node_term: float
    link_term: float

    @property
    def total(self) -> float:
        return self.node_term + self.link_term


def exit_boundaries(net: SubstrateNetwork, domain: int) -> dict[int, list[int]]:
    """For each neighbouring domain, this domain's boundary nodes directly linked to it."""
    out: dict[int, set[int]] = {}
    for ln in net.interdomain_links():
        for mine, theirs in ((ln.u, ln.v), (ln.v, ln.u)):
            if net.nodes[mine].domain == domain:
                out.setdefault(net.nodes[theirs].domain, set()).add(mine)
    return {m: sorted(s) for m, s in out.items()}


def compute_precost(
    subgraph: CellSubgraph,
    net: SubstrateNetwork,
    domain: int,
    node: int,
    price_paths: ShortestPaths | None = None,
    exits: dict[int, list[int]] | None = None,
) -> PreCost | None:
    """Estimated average cost of hosting ``subgraph.center`` on ``node``.

    Returns ``None`` when a needed boundary is unreachable from ``node``.
    """
    if price_paths is None:
        price_paths = domain_paths(net, domain)
    if exits is None:
        exits = exit_boundaries(net, domain)
    sn = net.nodes[node]
    node_term = subgraph.center.cpu_demand * sn.unit_price
    boundaries = net.boundary_nodes(domain)

    total = 0.0
    combos = 0
    for inc in subgraph.incident_links:
        for m in inc.neighbor_domains:
            combos += 1
            if m == domain:
                c = 0.0
            elif m in exits:
                reach = [price_paths.dist(node, b) for b in exits[m] if price_paths.reachable(node, b)]
                if not reach:
                    return None
                c = min(reach)
            else:
                reach = [price_paths.dist(node, b) for b in boundaries if price_paths.reachable(node, b)]
                if not reach:
                    return None
                c = sum(reach) / len(reach)
            total += inc.bw_demand * c
    link_term = total / combos if combos else 0.0
    return PreCost(float(node_term), link_term)


@dataclass
class CandidateSelection:
    domain: int
    candidates: dict[int, list[int]]
    precosts: dict[tuple[int, int], PreCost] = field(default_factory=dict)
    marked: set[int] = field(default_factory=set)


def _relevant(subgraphs: Iterable[CellSubgraph], domain: int) -> list[CellSubgraph]:
    return sorted(
        (sg for sg in subgraphs if domain in sg.center.candidate_domains),
        key=lambda sg: sg.center.id,
    )


def select_candidates(
    subgraphs: Iterable[CellSubgraph],
    net: SubstrateNetwork,
    domain: int,
    per_domain: int = 2,
    price_paths: ShortestPaths | None = None,
    strict: bool = True,
) -> CandidateSelection:
    """Pick the ``per_domain`` cheapest unmarked feasible nodes for each virtual node.

    Virtual nodes are served in id order; a node claimed by one is marked and
    skipped for the rest, unless every feasible node is already marked, in
    which case the best marked one is shared. With ``strict=False`` a virtual
    node left without candidates is simply omitted instead of raising.
    """
    if price_paths is None:
        price_paths = domain_paths(net, domain)
    exits = exit_boundaries(net, domain)
    sel = CandidateSelection(domain, {})
    for sg in _relevant(subgraphs, domain):
        vid = sg.center.id
        ranked = []
        for k in net.domain_nodes(domain):
            if net.nodes[k].cpu_available < sg.center.cpu_demand:
                continue
            pc = compute_precost(sg, net, domain, k, price_paths, exits)
            if pc is None:
                continue
            sel.precosts[(vid, k)] = pc
            ranked.append((pc.total, k))
        ranked.sort()
        chosen = []
        for _, k in ranked:
            if len(chosen) == per_domain:
                break
            if k not in sel.marked:
                sel.marked.add(k)
                chosen.append(k)
        if not chosen and ranked:
            chosen = [ranked[0][1]]
        if chosen:
            sel.candidates[vid] = chosen
        elif strict:
            raise NoFeasibleCandidate(vid, domain)
    return sel


def hops_to_boundary(net: SubstrateNetwork, domain: int) -> dict[int, int]:
    """BFS hop count from each domain node to its nearest boundary node."""
    dist = {b: 0 for b in net.boundary_nodes(domain)}
    q = deque(sorted(dist))
    adj: dict[int, list[int]] = {n: [] for n in net.domain_nodes(domain)}
    for ln in net.intra_links(domain):
        adj[ln.u].append(ln.v)
        adj[ln.v].append(ln.u)
    while q:
        x = q.popleft()
        for y in sorted(adj[x]):
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def select_nearest_boundary(
    subgraphs: Iterable[CellSubgraph],
    net: SubstrateNetwork,
    domain: int,
    per_domain: int = 2,
    price_paths: ShortestPaths | None = None,
    strict: bool = True,
) -> CandidateSelection:
    """Candidate rule of the boundary-proximity baseline: fewest hops to a boundary node."""
    hops = hops_to_boundary(net, domain)
    order = sorted(hops, key=lambda n: (hops[n], n))
    sel = CandidateSelection(domain, {})
    for sg in _relevant(subgraphs, domain):
        fits = [k for k in order if net.nodes[k].cpu_available >= sg.center.cpu_demand]
        chosen = [k for k in fits if k not in sel.marked][:per_domain]
        sel.marked.update(chosen)
        if not chosen and fits:
            chosen = fits[:1]
        if chosen:
            sel.candidates[sg.center.id] = chosen
        elif strict:
            raise NoFeasibleCandidate(sg.center.id, domain)
    return sel


def _info(net: SubstrateNetwork, k: int) -> NodeInfo:
    n = net.nodes[k]
    return NodeInfo(k, n.domain, n.unit_price, n.cpu_available, n.delay)


def build_upload(
    selection: CandidateSelection | None,
    net: SubstrateNetwork,
    domain: int,
    min_bw: int = 0,
    price_paths: ShortestPaths | None = None,
) -> DomainUpload:
    """Summarise the domain for the global controller.

    Aggregates follow least-price paths over links with at least ``min_bw``
    available. A domain without candidates still reports its boundary part so
    that traffic can transit it.
    """
    if price_paths is None:
        price_paths = domain_paths(net, domain, min_bw=min_bw)
    boundaries = net.boundary_nodes(domain)
    cands = {} if selection is None else selection.candidates
    cand_nodes = sorted({k for ks in cands.values() for k in ks})

    c2b = {(c, b): aggregate(net, price_paths, c, b) for c in cand_nodes for b in boundaries if c != b}
    c2c = {(a, b): aggregate(net, price_paths, a, b) for a, b in itertools.combinations(cand_nodes, 2)}
    b2b = {(a, b): aggregate(net, price_paths, a, b) for a, b in itertools.combinations(boundaries, 2)}
    inter = [
        InterLinkInfo(ln.u, ln.v, ln.unit_price, ln.delay, ln.bw_available)
        for ln in net.interdomain_links()
        if net.nodes[ln.u].domain == domain or net.nodes[ln.v].domain == domain
    ]
    return DomainUpload(
        domain=domain,
        candidates={vid: [_info(net, k) for k in ks] for vid, ks in sorted(cands.items())},
        candidate_to_boundary=c2b,
        candidate_to_candidate=c2c,
        boundary_info=[_info(net, b) for b in boundaries],
        boundary_to_boundary=b2b,
        interdomain_links=inter,
    )


@dataclass
class DomainMapping:
    receipt: Receipt
    cost: int
    delay: int
    paths: list[list[int]]


def map_physical(
    request: EmbeddingRequest,
    net: SubstrateNetwork,
    price_weight: float = 0.3,
    delay_weight: float = 0.3,
) -> DomainMapping:
    """Place one domain's share of an embedding; all or nothing.

    Intra-domain demands are expanded through transit nodes along the current
    least ``price_weight*price + delay_weight*delay`` path.
    """
    d = request.domain
    node_demands: list[NodeDemand] = []
    link_demands: list[LinkDemand] = []
    cost = 0
    delay = 0
    for _vid, s, cpu in request.node_assignments:
        sn = net.nodes[s]
        if sn.domain != d:
            raise ValueError(f"node {s} is not in domain {d}")
        node_demands.append(NodeDemand(s, cpu))
        cost += cpu * sn.unit_price
        delay += cpu * sn.delay

    def w(ln: SubstrateLink) -> float:
        return price_weight * ln.unit_price + delay_weight * ln.delay

    routes: dict[int, ShortestPaths] = {}
    paths = []
    for (a, b), bw in request.intradomain_link_demands:
        if bw not in routes:
            routes[bw] = domain_paths(net, d, w, min_bw=bw)
        path = routes[bw].path(a, b)
        if path is None:
            raise InsufficientResources((a, b), bw, 0)
        paths.append(path)
        for ln in path_links(net, path):
            link_demands.append(LinkDemand(ln.key, bw))
            cost += bw * ln.unit_price
            delay += ln.delay
    for key, bw in request.interdomain_link_demands:
        ln = net.links.get(link_key(*key))
        if ln is None:
            raise InsufficientResources(key, bw, 0)
        link_demands.append(LinkDemand(ln.key, bw))
        cost += bw * ln.unit_price
        delay += ln.delay

    receipt = net.allocate(EmbeddingPlan(tuple(node_demands), tuple(link_demands)))
    return DomainMapping(receipt, cost, delay, paths)
