"""Embedding algorithm handle and the hierarchical MP-VNE pipeline."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

import numpy as np

from .errors import InsufficientResources, NoFeasibleAssignment, NoPath, VNEError
from .global_controller import (
    EmbeddingRequest,
    PseudoTopology,
    assemble_pseudo_topology,
    generate_embedding_requests,
    partition_request,
)
from .local_controller import (
    build_upload,
    domain_paths,
    map_physical,
    select_candidates,
    select_nearest_boundary,
)
from .pso import FitnessWeights, SwarmConfig, solve
from .substrate import Receipt, SubstrateNetwork
from .workload import VirtualRequest

log = logging.getLogger(__name__)


@dataclass
class EmbeddingOutcome:
    request_id: int
    accepted: bool
    cost: float = 0.0
    delay: float = 0.0
    receipts: list[Receipt] = field(default_factory=list)
    cost_norm: float = 1.0
    delay_norm: float = 1.0
    reason: str = ""


class EmbeddingAlgorithm(Protocol):
    name: str

    def embed(self, req: VirtualRequest, net: SubstrateNetwork) -> EmbeddingOutcome: ...


def sub_seed(*parts: int) -> int:
    """Stable 63-bit seed from a tuple of integers."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(2, np.uint64)[0] >> np.uint64(1))


def rejected(req: VirtualRequest, reason: str, norms: tuple[float, float] = (1.0, 1.0)) -> EmbeddingOutcome:
    return EmbeddingOutcome(req.id, False, cost_norm=norms[0], delay_norm=norms[1], reason=reason)


def commit_domain_requests(
    requests: list[EmbeddingRequest],
    net: SubstrateNetwork,
    weights: FitnessWeights,
) -> tuple[list[Receipt], int, int]:
    """Run every domain's physical mapping; undo all of them if any fails."""
    receipts: list[Receipt] = []
    cost = 0
    delay = 0
    try:
        for er in requests:
            m = map_physical(er, net, weights.alpha, weights.beta)
            receipts.append(m.receipt)
            cost += m.cost
            delay += m.delay
    except InsufficientResources:
        for r in reversed(receipts):
            net.release(r)
        raise
    return receipts, cost, delay


Selector = Callable[..., object]


class HierarchicalPSO:
    """Global/local controller pipeline solved by discrete PSO.

    ``selector`` picks per-domain candidates; MP-VNE uses the estimated
    mapping cost, the VNE-PSO baseline swaps in boundary proximity.
    """

    def __init__(
        self,
        swarm: SwarmConfig | None = None,
        seed: int = 0,
        selector: Selector = select_candidates,
        candidates_per_domain: int = 2,
        name: str = "mp-vne",
    ):
        self.swarm = swarm or SwarmConfig()
        self.seed = seed
        self.selector = selector
        self.candidates_per_domain = candidates_per_domain
        self.name = name
        self.last_topology: PseudoTopology | None = None

    @property
    def weights(self) -> FitnessWeights:
        return self.swarm.weights

    def build_topology(self, req: VirtualRequest, net: SubstrateNetwork) -> PseudoTopology:
        subgraphs = partition_request(req)
        min_bw = max((l.bw_demand for l in req.links), default=0)
        referenced = sorted({d for n in req.nodes for d in n.candidate_domains})
        uploads = []
        for d in net.domains:
            price_paths = domain_paths(net, d, min_bw=min_bw)
            sel = None
            if d in referenced:
                sel = self.selector(
                    subgraphs,
                    net,
                    d,
                    per_domain=self.candidates_per_domain,
                    price_paths=price_paths,
                    strict=False,
                )
            uploads.append(build_upload(sel, net, d, min_bw=min_bw, price_paths=price_paths))
        return assemble_pseudo_topology(
            uploads,
            net.interdomain_links(),
            required_domains=referenced,
            price_weight=self.weights.alpha,
            delay_weight=self.weights.beta,
        )

    def embed(self, req: VirtualRequest, net: SubstrateNetwork) -> EmbeddingOutcome:
        norms = self.weights.norms(req, net.scales())
        topo = self.build_topology(req, net)
        self.last_topology = topo
        cfg = replace(self.swarm, rng_seed=sub_seed(self.seed, req.id))
        try:
            result = solve(req, topo, cfg, net.scales())
            domain_reqs = generate_embedding_requests(result.best_assignment, req, topo)
            receipts, cost, delay = commit_domain_requests(domain_reqs, net, self.weights)
        except (NoFeasibleAssignment, NoPath, InsufficientResources) as exc:
            log.debug("%s rejected request %d: %s", self.name, req.id, exc)
            return rejected(req, f"{type(exc).__name__}: {exc}", norms)
        return EmbeddingOutcome(req.id, True, cost, delay, receipts, norms[0], norms[1])


def mp_vne(swarm: SwarmConfig | None = None, seed: int = 0) -> HierarchicalPSO:
    return HierarchicalPSO(swarm, seed, select_candidates, name="mp-vne")


def vne_pso(swarm: SwarmConfig | None = None, seed: int = 0) -> HierarchicalPSO:
    swarm = replace(swarm or SwarmConfig(), mutation_probability=0.0)
    return HierarchicalPSO(swarm, seed, select_nearest_boundary, name="vne-pso")
