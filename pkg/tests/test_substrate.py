import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_net
from mpvne.errors import (
    AlreadyReleased,
    ConfigError,
    GenerationError,
    InsufficientResources,
    UnknownReceipt,
)
from mpvne.substrate import (
    INTER,
    INTRA,
    EmbeddingPlan,
    GenerationConfig,
    LinkDemand,
    NodeDemand,
    generate_substrate,
)


def domain_graph_connected(net):
    edges = {(net.nodes[l.u].domain, net.nodes[l.v].domain) for l in net.interdomain_links()}
    seen = {net.domains[0]}
    frontier = [net.domains[0]]
    while frontier:
        d = frontier.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == d and y not in seen:
                    seen.add(y)
                    frontier.append(y)
    return seen == set(net.domains)


def test_default_sized_network(default_cfg):
    net = generate_substrate(default_cfg)
    assert len(net.nodes) == 120
    assert sum(n.is_boundary for n in net.nodes.values()) == 8
    for d in net.domains:
        assert len(net.boundary_nodes(d)) == 2


def test_generated_invariants(default_cfg):
    cfg = default_cfg
    net = generate_substrate(cfg)
    assert domain_graph_connected(net)
    for n in net.nodes.values():
        assert cfg.node_cpu_range[0] <= n.cpu_capacity <= cfg.node_cpu_range[1]
        assert cfg.node_price_range[0] <= n.unit_price <= cfg.node_price_range[1]
        assert cfg.node_delay_range[0] <= n.delay <= cfg.node_delay_range[1]
        assert n.cpu_available == n.cpu_capacity
    for ln in net.links.values():
        assert ln.u < ln.v
        same = net.nodes[ln.u].domain == net.nodes[ln.v].domain
        assert (ln.kind == INTRA) == same
        if ln.kind == INTER:
            assert net.nodes[ln.u].is_boundary and net.nodes[ln.v].is_boundary
            assert cfg.interdomain_price_range[0] <= ln.unit_price <= cfg.interdomain_price_range[1]
            assert cfg.interdomain_delay_range[0] <= ln.delay <= cfg.interdomain_delay_range[1]
        else:
            assert cfg.link_price_range[0] <= ln.unit_price <= cfg.link_price_range[1]
    # every boundary node actually carries an inter-domain link
    touched = {x for ln in net.interdomain_links() for x in ln.key}
    assert all(b in touched for d in net.domains for b in net.boundary_nodes(d))


def test_two_node_full_connectivity():
    net = generate_substrate(GenerationConfig(domain_count=1, nodes_per_domain=2, boundary_nodes_per_domain=1, connectivity=1.0))
    assert len(net.intra_links(0)) == 1
    assert net.interdomain_links() == []


def test_generation_is_deterministic(small_cfg):
    assert generate_substrate(small_cfg).structure() == generate_substrate(small_cfg).structure()
    other = GenerationConfig(**{**small_cfg.__dict__, "rng_seed": small_cfg.rng_seed + 1})
    assert generate_substrate(other).structure() != generate_substrate(small_cfg).structure()


def test_generation_failure_reports_seed_and_domain():
    cfg = GenerationConfig(domain_count=1, nodes_per_domain=12, boundary_nodes_per_domain=1, connectivity=0.01, rng_seed=5, max_attempts=3)
    with pytest.raises(GenerationError) as exc:
        generate_substrate(cfg)
    assert exc.value.seed == 5 and exc.value.domain == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"connectivity": 0.0},
        {"connectivity": 1.5},
        {"node_cpu_range": (0, 10)},
        {"link_bw_range": (10, 5)},
        {"boundary_nodes_per_domain": 31},
    ],
)
def test_invalid_generation_config(kwargs):
    with pytest.raises(ConfigError):
        GenerationConfig(**kwargs)


@pytest.fixture
def line_net():
    # 0 -- 1 -- 2 in one domain
    return make_net(
        [(0, 0, 10, 1, 1, True), (1, 0, 10, 2, 1, False), (2, 0, 8, 3, 1, False)],
        [(0, 1, 5, 1, 1), (1, 2, 5, 2, 1)],
    )


def test_allocate_decrements(line_net):
    line_net.allocate(EmbeddingPlan((NodeDemand(0, 4),), ()))
    assert line_net.nodes[0].cpu_available == 6


def test_allocate_is_atomic(line_net):
    before = line_net.ledger_snapshot()
    plan = EmbeddingPlan((NodeDemand(1, 3), NodeDemand(0, 11)), (LinkDemand((0, 1), 1),))
    with pytest.raises(InsufficientResources) as exc:
        line_net.allocate(plan)
    assert exc.value.element == 0
    assert line_net.ledger_snapshot() == before


def test_allocate_aggregates_repeated_demands(line_net):
    # two traversals of the same link must fit together
    with pytest.raises(InsufficientResources):
        line_net.allocate(EmbeddingPlan((), (LinkDemand((0, 1), 3), LinkDemand((1, 0), 3))))


def test_allocate_release_inverse(line_net):
    before = line_net.ledger_snapshot()
    r = line_net.allocate(EmbeddingPlan((NodeDemand(2, 8),), (LinkDemand((1, 2), 5),)))
    assert line_net.nodes[2].cpu_available == 0
    line_net.release(r)
    assert line_net.ledger_snapshot() == before
    with pytest.raises(AlreadyReleased):
        line_net.release(r)


def test_release_foreign_receipt(line_net):
    other = make_net([(0, 0, 10, 1, 1, True)], [])
    r = other.allocate(EmbeddingPlan((NodeDemand(0, 1),), ()))
    with pytest.raises(UnknownReceipt):
        line_net.release(r)


def test_plan_cost_and_delay(line_net):
    plan = EmbeddingPlan((NodeDemand(2, 4),), (LinkDemand((0, 1), 2), LinkDemand((1, 2), 2)))
    assert line_net.plan_cost(plan) == 4 * 3 + 2 * 1 + 2 * 2
    assert line_net.plan_delay(plan) == 4 * 1 + 1 + 1


def _ops(net):
    node_ids = sorted(net.nodes)
    link_ids = sorted(net.links)
    demand = st.tuples(
        st.lists(st.tuples(st.sampled_from(node_ids), st.integers(1, 60)), max_size=4),
        st.lists(st.tuples(st.sampled_from(link_ids), st.integers(1, 900)), max_size=4),
    )
    return st.lists(st.one_of(st.tuples(st.just("alloc"), demand), st.tuples(st.just("release"), st.integers(0, 50))), max_size=40)


_NET = generate_substrate(GenerationConfig(domain_count=2, nodes_per_domain=5, boundary_nodes_per_domain=1, rng_seed=3))


@settings(max_examples=150, deadline=None)
@given(_ops(_NET))
def test_ledger_replay_conservation_and_safety(ops):
    net = generate_substrate(GenerationConfig(domain_count=2, nodes_per_domain=5, boundary_nodes_per_domain=1, rng_seed=3))
    cpu0, bw0 = net.ledger_snapshot()
    cpu, bw = dict(cpu0), dict(bw0)  # independent replay ledger
    live = []
    for op, arg in ops:
        if op == "alloc":
            nodes, links = arg
            plan = EmbeddingPlan(tuple(NodeDemand(n, c) for n, c in nodes), tuple(LinkDemand(l, b) for l, b in links))
            need_cpu, need_bw = {}, {}
            for n, c in nodes:
                need_cpu[n] = need_cpu.get(n, 0) + c
            for l, b in links:
                need_bw[l] = need_bw.get(l, 0) + b
            fits = all(cpu[n] >= c for n, c in need_cpu.items()) and all(bw[l] >= b for l, b in need_bw.items())
            try:
                r = net.allocate(plan)
            except InsufficientResources:
                assert not fits
            else:
                assert fits
                for n, c in need_cpu.items():
                    cpu[n] -= c
                for l, b in need_bw.items():
                    bw[l] -= b
                live.append((r, need_cpu, need_bw))
        elif live:
            r, need_cpu, need_bw = live.pop(arg % len(live))
            net.release(r)
            for n, c in need_cpu.items():
                cpu[n] += c
            for l, b in need_bw.items():
                bw[l] += b
        assert net.ledger_snapshot() == (cpu, bw)
        for n in net.nodes.values():
            assert 0 <= n.cpu_available <= n.cpu_capacity
        for ln in net.links.values():
            assert 0 <= ln.bw_available <= ln.bw_capacity
    for r, _, _ in live:
        net.release(r)
    assert net.ledger_snapshot() == (cpu0, bw0)
    assert net.at_full_capacity()


def test_dot_export(small_cfg):
    net = generate_substrate(small_cfg)
    dot = net.to_dot()
    assert dot.count("subgraph cluster_") == 3
    assert dot.count('[label="') - dot.count(" -- ") == len(net.nodes)
    assert dot.count("style=dashed") == len(net.interdomain_links())
    n0 = net.nodes[0]
    assert f'n0 [label="0|{n0.cpu_capacity}|{n0.unit_price}|{n0.delay}"' in dot
    ln = sorted(net.links.values(), key=lambda l: l.key)[0]
    assert f'n{ln.u} -- n{ln.v} [label="{ln.bw_capacity}|{ln.unit_price}|{ln.delay}"' in dot
    assert dot.count("doublecircle") == 3
