"""Comparison algorithms, rebuilt from their one-paragraph descriptions.

These are simplified renditions behind the same handle as MP-VNE; they do not
reproduce the cited designs (bidding, auctions, demand-matrix decomposition).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingOutcome, HierarchicalPSO, rejected, vne_pso
from .errors import InsufficientResources
from .floyd import ShortestPaths, floyd_all_pairs
from .local_controller import domain_paths, path_links
from .pso import FitnessWeights, SwarmConfig
from .substrate import EmbeddingPlan, LinkDemand, NodeDemand, SubstrateNetwork
from .workload import VirtualRequest


class BaselineKind(str, enum.Enum):
    MC_VNM = "mc-vnm"
    VNE_PSO = "vne-pso"
    LID_VNE = "lid-vne"


def global_price_paths(net: SubstrateNetwork, min_bw: int = 0) -> ShortestPaths:
    return floyd_all_pairs(
        sorted(net.nodes),
        ((ln.u, ln.v, ln.unit_price) for ln in net.links.values() if ln.bw_available >= min_bw),
    )


def _finish(
    req: VirtualRequest,
    net: SubstrateNetwork,
    placement: dict[int, int],
    paths: dict[tuple[int, int], list[int]],
    norms: tuple[float, float],
) -> EmbeddingOutcome:
    node_demands = tuple(NodeDemand(placement[n.id], n.cpu_demand) for n in req.nodes)
    link_demands = []
    for l in req.links:
        for ln in path_links(net, paths[(l.u, l.v)]):
            link_demands.append(LinkDemand(ln.key, l.bw_demand))
    plan = EmbeddingPlan(node_demands, tuple(link_demands))
    try:
        receipt = net.allocate(plan)
    except InsufficientResources as exc:
        return rejected(req, f"InsufficientResources: {exc}", norms)
    return EmbeddingOutcome(req.id, True, net.plan_cost(receipt), net.plan_delay(receipt), [receipt], *norms)


def _allowed(req: VirtualRequest, net: SubstrateNetwork) -> dict[int, list[int]]:
    return {
        n.id: [
            k
            for d in n.candidate_domains
            for k in net.domain_nodes(d)
            if net.nodes[k].cpu_available >= n.cpu_demand
        ]
        for n in req.nodes
    }


def embed_mc_vnm(req: VirtualRequest, net: SubstrateNetwork, weights: FitnessWeights | None = None) -> EmbeddingOutcome:
    """Link-first greedy: repeatedly commit the cheapest remaining virtual link.

    Kruskal-style ordering over (virtual link, substrate path) options, priced
    by link unit price only; endpoint placements fall out of the chosen paths.
    """
    weights = weights or FitnessWeights()
    norms = weights.norms(req, net.scales())
    min_bw = max((l.bw_demand for l in req.links), default=0)
    sp = global_price_paths(net, min_bw)
    allowed = _allowed(req, net)
    placement: dict[int, int] = {}
    used: set[int] = set()
    paths: dict[tuple[int, int], list[int]] = {}
    pending = list(req.links)

    def options(v: int) -> list[int]:
        if v in placement:
            return [placement[v]]
        return [k for k in allowed[v] if k not in used]

    while pending:
        best = None
        for li, l in enumerate(pending):
            A, B = options(l.u), options(l.v)
            if not A or not B:
                continue
            sub = sp.matrix[np.ix_([sp.index[a] for a in A], [sp.index[b] for b in B])].copy()
            sub[np.equal.outer(np.array(A), np.array(B))] = np.inf
            flat = int(np.argmin(sub))
            price = sub.flat[flat]
            if np.isfinite(price) and (best is None or price < best[0]):
                best = (price, li, A[flat // len(B)], B[flat % len(B)])
        if best is None:
            return rejected(req, "no feasible substrate path for remaining virtual links", norms)
        _, li, a, b = best
        l = pending.pop(li)
        for v, s in ((l.u, a), (l.v, b)):
            if v not in placement:
                placement[v] = s
                used.add(s)
        paths[(l.u, l.v)] = sp.path(a, b)

    for n in req.nodes:
        if n.id not in placement:
            opts = sorted(options(n.id), key=lambda k: (net.nodes[k].unit_price, k))
            if not opts:
                return rejected(req, f"no feasible node for virtual node {n.id}", norms)
            placement[n.id] = opts[0]
            used.add(opts[0])
    return _finish(req, net, placement, paths, norms)


def domain_quote(net: SubstrateNetwork, domain: int) -> float:
    """A domain's advertised price: mean node unit price."""
    nodes = net.domain_nodes(domain)
    return sum(net.nodes[k].unit_price for k in nodes) / len(nodes)


def embed_lid_vne(req: VirtualRequest, net: SubstrateNetwork, weights: FitnessWeights | None = None) -> EmbeddingOutcome:
    """Quote-driven placement: cheapest-quote domain per node, then greedy in-domain choices."""
    weights = weights or FitnessWeights()
    norms = weights.norms(req, net.scales())
    quotes = {d: domain_quote(net, d) for d in net.domains}
    min_bw = max((l.bw_demand for l in req.links), default=0)

    placement: dict[int, int] = {}
    used: set[int] = set()
    for n in sorted(req.nodes, key=lambda n: n.id):
        d = min(n.candidate_domains, key=lambda d: (quotes[d], d))
        opts = [k for k in net.domain_nodes(d) if k not in used and net.nodes[k].cpu_available >= n.cpu_demand]
        if not opts:
            return rejected(req, f"domain {d} cannot host virtual node {n.id}", norms)
        k = min(opts, key=lambda k: (net.nodes[k].unit_price, k))
        placement[n.id] = k
        used.add(k)

    local: dict[int, ShortestPaths] = {}
    cross: ShortestPaths | None = None
    paths: dict[tuple[int, int], list[int]] = {}
    for l in req.links:
        a, b = placement[l.u], placement[l.v]
        da, db = net.nodes[a].domain, net.nodes[b].domain
        if da == db:
            if da not in local:
                local[da] = domain_paths(net, da, min_bw=min_bw)
            path = local[da].path(a, b)
        else:
            if cross is None:
                cross = global_price_paths(net, min_bw)
            path = cross.path(a, b)
        if path is None:
            return rejected(req, f"no path for virtual link {(l.u, l.v)}", norms)
        paths[(l.u, l.v)] = path
    return _finish(req, net, placement, paths, norms)


@dataclass
class FunctionAlgorithm:
    name: str
    fn: object
    weights: FitnessWeights

    def embed(self, req: VirtualRequest, net: SubstrateNetwork) -> EmbeddingOutcome:
        return self.fn(req, net, self.weights)


def mc_vnm(swarm: SwarmConfig | None = None, seed: int = 0) -> FunctionAlgorithm:
    return FunctionAlgorithm("mc-vnm", embed_mc_vnm, (swarm or SwarmConfig()).weights)


def lid_vne(swarm: SwarmConfig | None = None, seed: int = 0) -> FunctionAlgorithm:
    return FunctionAlgorithm("lid-vne", embed_lid_vne, (swarm or SwarmConfig()).weights)


def embed_vne_pso(req: VirtualRequest, net: SubstrateNetwork, swarm: SwarmConfig | None = None, seed: int = 0):
    return vne_pso(swarm, seed).embed(req, net)
