import itertools

import pytest

from mpvne.substrate import INTER, INTRA, GenerationConfig, SubstrateLink, SubstrateNetwork, SubstrateNode


def make_net(nodes, links):
    """Hand-built substrate.

    nodes: (id, domain, cpu, price, delay, is_boundary)
    links: (u, v, bw, price, delay)
    """
    ns = [SubstrateNode(i, d, cpu, price, delay, b) for i, d, cpu, price, delay, b in nodes]
    dom = {n.id: n.domain for n in ns}
    ls = [
        SubstrateLink(u, v, INTRA if dom[u] == dom[v] else INTER, bw, price, delay)
        for u, v, bw, price, delay in links
    ]
    return SubstrateNetwork(sorted({n.domain for n in ns}), ns, ls)


def simple_paths(adj, src, dst):
    """Every simple path from src to dst (exhaustive DFS)."""
    out = []
    stack = [(src, [src])]
    while stack:
        x, path = stack.pop()
        if x == dst:
            out.append(path)
            continue
        for y in adj.get(x, ()):
            if y not in path:
                stack.append((y, path + [y]))
    return out


def brute_force_dist(n, edges, src, dst):
    """Least path weight by enumerating all simple paths; ``inf`` if none."""
    if src == dst:
        return 0
    w = {}
    adj = {}
    for u, v, wt in edges:
        key = (min(u, v), max(u, v))
        w[key] = min(w.get(key, wt), wt)
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    best = float("inf")
    for p in simple_paths(adj, src, dst):
        best = min(best, sum(w[(min(a, b), max(a, b))] for a, b in zip(p, p[1:])))
    return best


@pytest.fixture
def small_cfg():
    return GenerationConfig(domain_count=3, nodes_per_domain=6, boundary_nodes_per_domain=1, rng_seed=7)


@pytest.fixture
def default_cfg():
    return GenerationConfig(rng_seed=11)


def toy_topology(rng, n_vnodes, n_cands, extra=2, edge_p=0.6):
    """Random pseudo-topology plus a connected request over it.

    Returns (request, topology); every virtual node gets ``n_cands`` private
    candidate vertices and ``extra`` relay vertices are added.
    """
    from mpvne.global_controller import NodeInfo, PseudoEdge, PseudoTopology
    from mpvne.workload import VirtualLink, VirtualNode, VirtualRequest

    vertices = {}
    candidates = {}
    vid = 0
    for v in range(n_vnodes):
        candidates[v] = []
        for _ in range(n_cands):
            vertices[vid] = NodeInfo(vid, 0, rng.randint(1, 10), rng.randint(5, 10), rng.randint(1, 10))
            candidates[v].append(vid)
            vid += 1
    for _ in range(extra):
        vertices[vid] = NodeInfo(vid, 0, 1, 0, 1)
        vid += 1
    edges = {}
    for a, b in itertools.combinations(sorted(vertices), 2):
        if rng.random() < edge_p:
            edges[(a, b)] = PseudoEdge(a, b, rng.randint(1, 10), rng.randint(1, 10), rng.randint(5, 20), "cand-cand")
    nodes = tuple(VirtualNode(v, rng.randint(1, 5), (0,)) for v in range(n_vnodes))
    pairs = {(v - 1, v) for v in range(1, n_vnodes)}
    pairs |= {(a, b) for a, b in itertools.combinations(range(n_vnodes), 2) if rng.random() < 0.3}
    links = tuple(VirtualLink(a, b, rng.randint(1, 10)) for a, b in sorted(pairs))
    topo = PseudoTopology(vertices, set(), edges, candidates)
    return VirtualRequest(0, nodes, links), topo


def exhaustive_best(req, topo, evaluator):
    """Best fitness over every candidate combination."""
    vids = [n.id for n in req.nodes]
    best = None
    for combo in itertools.product(*(topo.candidates[v] for v in vids)):
        f = evaluator(dict(zip(vids, combo)))
        if best is None or f.value < best[0].value:
            best = (f, combo)
    return best
