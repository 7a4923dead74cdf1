"""Multi-domain substrate network: model, random generator, resource ledger.

Node ids are global integers; domains are ``0..domain_count-1``. Links are
undirected and keyed by the sorted endpoint pair ``(u, v)`` with ``u < v``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import (
    AlreadyReleased,
    ConfigError,
    GenerationError,
    InsufficientResources,
    UnknownReceipt,
)

LinkKey = tuple[int, int]
Range = tuple[int, int]

INTRA = "intra"
INTER = "inter"


def link_key(u: int, v: int) -> LinkKey:
    return (u, v) if u < v else (v, u)


@dataclass
class SubstrateNode:
    id: int
    domain: int
    cpu_capacity: int
    unit_price: int
    delay: int
    is_boundary: bool = False
    cpu_available: int = -1

    def __post_init__(self):
        if self.cpu_available < 0:
            self.cpu_available = self.cpu_capacity


@dataclass
class SubstrateLink:
    u: int
    v: int
    kind: str
    bw_capacity: int
    unit_price: int
    delay: int
    bw_available: int = -1

    def __post_init__(self):
        if self.u > self.v:
            self.u, self.v = self.v, self.u
        if self.bw_available < 0:
            self.bw_available = self.bw_capacity

    @property
    def key(self) -> LinkKey:
        return (self.u, self.v)

    def other(self, n: int) -> int:
        return self.v if n == self.u else self.u


@dataclass(frozen=True)
class NodeDemand:
    node: int
    cpu: int


@dataclass(frozen=True)
class LinkDemand:
    link: LinkKey
    bw: int


@dataclass(frozen=True)
class EmbeddingPlan:
    """Concrete demands to place on the substrate.

    One ``LinkDemand`` per traversal: a virtual link routed over three
    substrate links contributes three entries, each carrying its bandwidth.
    """

    node_demands: tuple[NodeDemand, ...] = ()
    link_demands: tuple[LinkDemand, ...] = ()


@dataclass
class Receipt:
    id: int
    node_demands: tuple[NodeDemand, ...]
    link_demands: tuple[LinkDemand, ...]
    released: bool = False


def _check_range(name: str, r: Range) -> None:
    if len(r) != 2 or r[0] > r[1]:
        raise ConfigError(name, f"empty interval {r!r}")
    if r[0] <= 0:
        raise ConfigError(name, f"lower bound must be positive, got {r[0]}")


@dataclass(frozen=True)
class GenerationConfig:
    domain_count: int = 4
    nodes_per_domain: int = 30
    boundary_nodes_per_domain: int = 2
    node_cpu_range: Range = (100, 300)
    node_price_range: Range = (1, 10)
    node_delay_range: Range = (1, 10)
    link_bw_range: Range = (1000, 3000)
    link_price_range: Range = (1, 10)
    link_delay_range: Range = (1, 10)
    interdomain_price_range: Range = (5, 15)
    interdomain_delay_range: Range = (10, 30)
    connectivity: float = 0.5
    rng_seed: int = 0
    max_attempts: int = 100

    def __post_init__(self):
        for name in ("domain_count", "nodes_per_domain", "boundary_nodes_per_domain"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be >= 1")
        if self.boundary_nodes_per_domain > self.nodes_per_domain:
            raise ConfigError("boundary_nodes_per_domain", "exceeds nodes_per_domain")
        for name in (
            "node_cpu_range",
            "node_price_range",
            "node_delay_range",
            "link_bw_range",
            "link_price_range",
            "link_delay_range",
            "interdomain_price_range",
            "interdomain_delay_range",
        ):
            _check_range(name, tuple(getattr(self, name)))
        if not 0 < self.connectivity <= 1:
            raise ConfigError("connectivity", "must be in (0, 1]")


class SubstrateNetwork:
    """The physical network G^s plus its available-resource ledger.

    Mutation through :meth:`allocate`/:meth:`release` is single-writer.
    """

    def __init__(self, domains: Iterable[int], nodes: Iterable[SubstrateNode], links: Iterable[SubstrateLink]):
        self.domains: list[int] = list(domains)
        self.nodes: dict[int, SubstrateNode] = {}
        self.links: dict[LinkKey, SubstrateLink] = {}
        self.adjacency: dict[int, list[int]] = defaultdict(list)
        self._domain_nodes: dict[int, list[int]] = {d: [] for d in self.domains}
        for n in nodes:
            self.nodes[n.id] = n
            self._domain_nodes[n.domain].append(n.id)
        for ln in links:
            self._add_link(ln)
        for d in self._domain_nodes:
            self._domain_nodes[d].sort()
        self._receipts: dict[int, Receipt] = {}
        self._next_receipt = 0

    def _add_link(self, ln: SubstrateLink) -> None:
        if ln.u == ln.v:
            raise ValueError(f"self-loop on node {ln.u}")
        if ln.key in self.links:
            raise ValueError(f"duplicate link {ln.key}")
        same = self.nodes[ln.u].domain == self.nodes[ln.v].domain
        if same != (ln.kind == INTRA):
            raise ValueError(f"link {ln.key} kind {ln.kind} disagrees with endpoint domains")
        self.links[ln.key] = ln
        self.adjacency[ln.u].append(ln.v)
        self.adjacency[ln.v].append(ln.u)

    # -- topology queries -------------------------------------------------

    def domain_nodes(self, domain: int) -> list[int]:
        return self._domain_nodes[domain]

    def boundary_nodes(self, domain: int) -> list[int]:
        return [n for n in self._domain_nodes[domain] if self.nodes[n].is_boundary]

    def intra_links(self, domain: int) -> list[SubstrateLink]:
        return [
            ln
            for ln in self.links.values()
            if ln.kind == INTRA and self.nodes[ln.u].domain == domain
        ]

    def interdomain_links(self) -> list[SubstrateLink]:
        return [ln for ln in self.links.values() if ln.kind == INTER]

    def link(self, u: int, v: int) -> SubstrateLink:
        return self.links[link_key(u, v)]

    def adjacent_domains(self, domain: int) -> set[int]:
        out = set()
        for ln in self.interdomain_links():
            du, dv = self.nodes[ln.u].domain, self.nodes[ln.v].domain
            if du == domain:
                out.add(dv)
            elif dv == domain:
                out.add(du)
        return out

    def ledger_snapshot(self) -> tuple[dict[int, int], dict[LinkKey, int]]:
        return (
            {i: n.cpu_available for i, n in self.nodes.items()},
            {k: ln.bw_available for k, ln in self.links.items()},
        )

    def at_full_capacity(self) -> bool:
        return all(n.cpu_available == n.cpu_capacity for n in self.nodes.values()) and all(
            ln.bw_available == ln.bw_capacity for ln in self.links.values()
        )

    @property
    def outstanding_receipts(self) -> int:
        return sum(not r.released for r in self._receipts.values())

    # -- ledger -----------------------------------------------------------

    def allocate(self, plan: EmbeddingPlan) -> Receipt:
        """Decrement available resources for ``plan``; all or nothing."""
        cpu_need: dict[int, int] = defaultdict(int)
        bw_need: dict[LinkKey, int] = defaultdict(int)
        for nd in plan.node_demands:
            cpu_need[nd.node] += nd.cpu
        for ld in plan.link_demands:
            bw_need[link_key(*ld.link)] += ld.bw
        for node_id, need in cpu_need.items():
            avail = self.nodes[node_id].cpu_available
            if need > avail:
                raise InsufficientResources(node_id, need, avail)
        for key, need in bw_need.items():
            if key not in self.links:
                raise InsufficientResources(key, need, 0)
            avail = self.links[key].bw_available
            if need > avail:
                raise InsufficientResources(key, need, avail)
        for node_id, need in cpu_need.items():
            self.nodes[node_id].cpu_available -= need
        for key, need in bw_need.items():
            self.links[key].bw_available -= need
        receipt = Receipt(
            self._next_receipt,
            tuple(plan.node_demands),
            tuple(LinkDemand(link_key(*ld.link), ld.bw) for ld in plan.link_demands),
        )
        self._receipts[receipt.id] = receipt
        self._next_receipt += 1
        return receipt

    def release(self, receipt: Receipt) -> None:
        own = self._receipts.get(receipt.id)
        if own is None or own is not receipt:
            raise UnknownReceipt(f"receipt {receipt.id} was not issued by this network")
        if own.released:
            raise AlreadyReleased(f"receipt {receipt.id} already released")
        for nd in own.node_demands:
            self.nodes[nd.node].cpu_available += nd.cpu
        for ld in own.link_demands:
            self.links[ld.link].bw_available += ld.bw
        own.released = True

    # -- accounting -------------------------------------------------------

    def plan_cost(self, demands: EmbeddingPlan | Receipt) -> int:
        """Mapping cost: sum of cpu x node price plus bw x link price per traversal."""
        node_part = sum(nd.cpu * self.nodes[nd.node].unit_price for nd in demands.node_demands)
        link_part = sum(ld.bw * self.links[link_key(*ld.link)].unit_price for ld in demands.link_demands)
        return node_part + link_part

    def plan_delay(self, demands: EmbeddingPlan | Receipt) -> int:
        node_part = sum(nd.cpu * self.nodes[nd.node].delay for nd in demands.node_demands)
        link_part = sum(self.links[link_key(*ld.link)].delay for ld in demands.link_demands)
        return node_part + link_part

    def scales(self) -> "NetworkScales":
        return NetworkScales(
            max_node_price=max(n.unit_price for n in self.nodes.values()),
            max_link_price=max((ln.unit_price for ln in self.links.values()), default=1),
            max_node_delay=max(n.delay for n in self.nodes.values()),
            max_link_delay=max((ln.delay for ln in self.links.values()), default=1),
        )

    # -- equality / export -----------------------------------------------

    def structure(self) -> tuple:
        """Hashable description used for determinism checks."""
        nodes = tuple(
            (n.id, n.domain, n.cpu_capacity, n.cpu_available, n.unit_price, n.delay, n.is_boundary)
            for n in sorted(self.nodes.values(), key=lambda n: n.id)
        )
        links = tuple(
            (ln.u, ln.v, ln.kind, ln.bw_capacity, ln.bw_available, ln.unit_price, ln.delay)
            for ln in sorted(self.links.values(), key=lambda ln: ln.key)
        )
        return (tuple(self.domains), nodes, links)

    def to_dot(self) -> str:
        lines = ["graph substrate {", "  node [shape=circle];"]
        for d in self.domains:
            lines.append(f"  subgraph cluster_{d} {{")
            lines.append(f'    label="domain {d}";')
            for nid in self.domain_nodes(d):
                n = self.nodes[nid]
                shape = ", shape=doublecircle, style=bold" if n.is_boundary else ""
                lines.append(f'    n{nid} [label="{nid}|{n.cpu_capacity}|{n.unit_price}|{n.delay}"{shape}];')
            lines.append("  }")
        for ln in sorted(self.links.values(), key=lambda ln: ln.key):
            style = ", style=dashed" if ln.kind == INTER else ""
            lines.append(f'  n{ln.u} -- n{ln.v} [label="{ln.bw_capacity}|{ln.unit_price}|{ln.delay}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NetworkScales:
    """Network-wide maxima used to normalise cost and delay terms."""

    max_node_price: int
    max_link_price: int
    max_node_delay: int
    max_link_delay: int


def _uniform(rng: np.random.Generator, r: Range) -> int:
    return int(rng.integers(r[0], r[1], endpoint=True))


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n <= 1:
        return True
    adj: dict[int, list[int]] = defaultdict(list)
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def generate_substrate(cfg: GenerationConfig) -> SubstrateNetwork:
    """Random multi-domain substrate; a pure function of ``cfg`` (seed included)."""
    rng = np.random.default_rng(cfg.rng_seed)
    nodes: list[SubstrateNode] = []
    links: list[SubstrateLink] = []
    boundary: dict[int, list[int]] = {}

    for d in range(cfg.domain_count):
        base = d * cfg.nodes_per_domain
        ids = list(range(base, base + cfg.nodes_per_domain))
        chosen = rng.choice(cfg.nodes_per_domain, size=cfg.boundary_nodes_per_domain, replace=False)
        bset = {base + int(i) for i in chosen}
        boundary[d] = sorted(bset)
        for nid in ids:
            nodes.append(
                SubstrateNode(
                    id=nid,
                    domain=d,
                    cpu_capacity=_uniform(rng, cfg.node_cpu_range),
                    unit_price=_uniform(rng, cfg.node_price_range),
                    delay=_uniform(rng, cfg.node_delay_range),
                    is_boundary=nid in bset,
                )
            )
        for attempt in range(cfg.max_attempts):
            pairs = [
                (i, j)
                for i, j in itertools.combinations(range(cfg.nodes_per_domain), 2)
                if rng.random() < cfg.connectivity
            ]
            if _connected(cfg.nodes_per_domain, pairs):
                break
        else:
            raise GenerationError(cfg.rng_seed, d, cfg.max_attempts)
        for i, j in pairs:
            links.append(
                SubstrateLink(
                    base + i,
                    base + j,
                    INTRA,
                    bw_capacity=_uniform(rng, cfg.link_bw_range),
                    unit_price=_uniform(rng, cfg.link_price_range),
                    delay=_uniform(rng, cfg.link_delay_range),
                )
            )

    inter: set[LinkKey] = set()
    if cfg.domain_count > 1:
        order = [int(x) for x in rng.permutation(cfg.domain_count)]
        for pos in range(1, len(order)):
            d = order[pos]
            e = order[int(rng.integers(pos))]
            a = boundary[d][int(rng.integers(len(boundary[d])))]
            b = boundary[e][int(rng.integers(len(boundary[e])))]
            inter.add(link_key(a, b))
        all_boundary = [b for d in range(cfg.domain_count) for b in boundary[d]]
        domain_of = {b: d for d in boundary for b in boundary[d]}
        for a, b in itertools.combinations(all_boundary, 2):
            if domain_of[a] == domain_of[b] or (a, b) in inter:
                continue
            if rng.random() < cfg.connectivity:
                inter.add((a, b))
        # every boundary node must actually reach another domain
        touched = {x for k in inter for x in k}
        for a in all_boundary:
            if a not in touched:
                others = [b for b in all_boundary if domain_of[b] != domain_of[a]]
                b = others[int(rng.integers(len(others)))]
                inter.add(link_key(a, b))
                touched.update((a, b))
        for a, b in sorted(inter):
            links.append(
                SubstrateLink(
                    a,
                    b,
                    INTER,
                    bw_capacity=_uniform(rng, cfg.link_bw_range),
                    unit_price=_uniform(rng, cfg.interdomain_price_range),
                    delay=_uniform(rng, cfg.interdomain_delay_range),
                )
            )

    return SubstrateNetwork(range(cfg.domain_count), nodes, links)
