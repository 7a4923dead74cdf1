"""Virtual network requests and the Poisson arrival workload."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class VirtualNode:
    id: int
    cpu_demand: int
    candidate_domains: tuple[int, ...]

    def __post_init__(self):
        if self.cpu_demand <= 0:
            raise ValueError(f"virtual node {self.id}: cpu_demand must be positive")
        if not self.candidate_domains:
            raise ValueError(f"virtual node {self.id}: no candidate domains")


@dataclass(frozen=True)
class VirtualLink:
    u: int
    v: int
    bw_demand: int

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError("virtual link endpoints must differ")
        if self.bw_demand <= 0:
            raise ValueError("bw_demand must be positive")
        if self.u > self.v:
            a, b = self.v, self.u
            object.__setattr__(self, "u", a)
            object.__setattr__(self, "v", b)


@dataclass(frozen=True)
class VirtualRequest:
    id: int
    nodes: tuple[VirtualNode, ...]
    links: tuple[VirtualLink, ...]
    arrival_time: float = 0.0
    lifetime: float = 1.0

    def __post_init__(self):
        if self.lifetime <= 0:
            raise ValueError(f"request {self.id}: lifetime must be positive")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError(f"request {self.id}: duplicate virtual node ids")
        if not _is_connected(ids, [(l.u, l.v) for l in self.links]):
            raise ValueError(f"request {self.id}: virtual graph is disconnected")

    def node(self, vid: int) -> VirtualNode:
        for n in self.nodes:
            if n.id == vid:
                return n
        raise KeyError(vid)

    @property
    def departure_time(self) -> float:
        return self.arrival_time + self.lifetime

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "arrival": self.arrival_time,
            "lifetime": self.lifetime,
            "nodes": [
                {"id": n.id, "cpu": n.cpu_demand, "domains": list(n.candidate_domains)} for n in self.nodes
            ],
            "links": [{"u": l.u, "v": l.v, "bw": l.bw_demand} for l in self.links],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "VirtualRequest":
        return cls(
            id=int(rec["id"]),
            arrival_time=float(rec["arrival"]),
            lifetime=float(rec["lifetime"]),
            nodes=tuple(
                VirtualNode(int(n["id"]), int(n["cpu"]), tuple(int(d) for d in n["domains"])) for n in rec["nodes"]
            ),
            links=tuple(VirtualLink(int(l["u"]), int(l["v"]), int(l["bw"])) for l in rec["links"]),
        )


def _components(ids: Sequence[int], edges: Iterable[tuple[int, int]]) -> list[set[int]]:
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for i in ids:
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())


def _is_connected(ids: Sequence[int], edges) -> bool:
    return len(ids) <= 1 or len(_components(ids, edges)) == 1


@dataclass(frozen=True)
class WorkloadConfig:
    node_count: int = 6
    cpu_demand_range: tuple[int, int] = (1, 10)
    bw_demand_range: tuple[int, int] = (1, 10)
    candidate_domains_per_node: int = 2
    connectivity: float = 0.5
    arrival_rate: float = 10.0  # expected arrivals per 100 time units
    mean_lifetime: float = 1000.0
    horizon: float = 100.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.node_count < 1:
            raise ConfigError("node_count", "must be >= 1")
        if self.candidate_domains_per_node < 1:
            raise ConfigError("candidate_domains_per_node", "must be >= 1")
        for name in ("cpu_demand_range", "bw_demand_range"):
            lo, hi = getattr(self, name)
            if lo <= 0 or lo > hi:
                raise ConfigError(name, f"invalid interval {(lo, hi)!r}")
        if not 0 < self.connectivity <= 1:
            raise ConfigError("connectivity", "must be in (0, 1]")
        for name in ("arrival_rate", "mean_lifetime", "horizon"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be positive")


def generate_request(
    rid: int,
    cfg: WorkloadConfig,
    domains: Sequence[int],
    rng: np.random.Generator,
    arrival_time: float = 0.0,
    lifetime: float = 1.0,
) -> VirtualRequest:
    k = cfg.candidate_domains_per_node
    nodes = []
    for i in range(cfg.node_count):
        picks = rng.choice(len(domains), size=k, replace=False)
        cands = tuple(sorted(domains[int(p)] for p in picks))
        cpu = int(rng.integers(cfg.cpu_demand_range[0], cfg.cpu_demand_range[1], endpoint=True))
        nodes.append(VirtualNode(i, cpu, cands))
    ids = list(range(cfg.node_count))
    edges = [(a, b) for a, b in itertools.combinations(ids, 2) if rng.random() < cfg.connectivity]
    comps = _components(ids, edges)
    while len(comps) > 1:
        # join two components with a uniformly chosen cross pair
        comp_of = {x: ci for ci, c in enumerate(comps) for x in c}
        cross = [(a, b) for a, b in itertools.combinations(ids, 2) if comp_of[a] != comp_of[b]]
        edges.append(cross[int(rng.integers(len(cross)))])
        comps = _components(ids, edges)
    links = tuple(
        VirtualLink(a, b, int(rng.integers(cfg.bw_demand_range[0], cfg.bw_demand_range[1], endpoint=True)))
        for a, b in sorted(edges)
    )
    return VirtualRequest(rid, tuple(nodes), links, arrival_time, lifetime)


def generate_workload(cfg: WorkloadConfig, domains: Sequence[int]) -> list[VirtualRequest]:
    """Requests arriving as a Poisson process over ``[0, horizon)``, sorted by arrival."""
    domains = list(domains)
    if cfg.candidate_domains_per_node > len(domains):
        raise ConfigError("candidate_domains_per_node", f"exceeds domain count {len(domains)}")
    rng = np.random.default_rng(cfg.rng_seed)
    rate = cfg.arrival_rate / 100.0
    out: list[VirtualRequest] = []
    t = 0.0
    while True:
        t += float(rng.exponential(1.0 / rate))
        if t >= cfg.horizon:
            break
        lifetime = float(rng.exponential(cfg.mean_lifetime))
        if lifetime <= 0:
            lifetime = np.finfo(float).tiny
        out.append(generate_request(len(out), cfg, domains, rng, t, lifetime))
    return out


def dump_workload(path: str | Path, requests: Iterable[VirtualRequest]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in requests:
            fh.write(json.dumps(r.to_record(), separators=(",", ":")) + "\n")


def load_workload(path: str | Path) -> list[VirtualRequest]:
    with open(path, encoding="utf-8") as fh:
        reqs = [VirtualRequest.from_record(json.loads(line)) for line in fh if line.strip()]
    return sorted(reqs, key=lambda r: (r.arrival_time, r.id))
