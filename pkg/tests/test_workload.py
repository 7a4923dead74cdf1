import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpvne.errors import ConfigError
from mpvne.workload import (
    VirtualLink,
    VirtualNode,
    VirtualRequest,
    WorkloadConfig,
    dump_workload,
    generate_request,
    generate_workload,
    load_workload,
)

DOMAINS = [0, 1, 2, 3]


def connected(req):
    ids = {n.id for n in req.nodes}
    seen = {req.nodes[0].id}
    changed = True
    while changed:
        changed = False
        for l in req.links:
            if (l.u in seen) != (l.v in seen):
                seen |= {l.u, l.v}
                changed = True
    return seen == ids


def test_default_sized_requests():
    wl = generate_workload(WorkloadConfig(rng_seed=1, arrival_rate=200), DOMAINS)
    assert wl
    for r in wl:
        assert len(r.nodes) == 6
        for n in r.nodes:
            assert 1 <= n.cpu_demand <= 10
            assert len(n.candidate_domains) == 2 == len(set(n.candidate_domains))
            assert set(n.candidate_domains) <= set(DOMAINS)
        for l in r.links:
            assert 1 <= l.bw_demand <= 10
        assert connected(r)


def test_complete_graph_at_full_connectivity():
    cfg = WorkloadConfig(node_count=3, connectivity=1.0)
    r = generate_request(0, cfg, DOMAINS, np.random.default_rng(0))
    assert len(r.links) == 3


def test_lifetime_mean_converges():
    # ~10,000 requests in 100 time units; sample mean within 3% of 1000
    cfg = WorkloadConfig(node_count=1, arrival_rate=10_000, mean_lifetime=1000, rng_seed=4)
    wl = generate_workload(cfg, DOMAINS)
    assert 9_500 < len(wl) < 10_500
    assert abs(np.mean([r.lifetime for r in wl]) - 1000) / 1000 < 0.03


def test_interarrival_rate():
    cfg = WorkloadConfig(node_count=1, arrival_rate=10, horizon=200_000, rng_seed=9)
    wl = generate_workload(cfg, DOMAINS)
    # rate 0.1 per time unit -> ~20,000 arrivals; Poisson sd ~141
    assert abs(len(wl) - 20_000) < 600


def test_arrivals_increase_within_horizon():
    wl = generate_workload(WorkloadConfig(rng_seed=2, arrival_rate=100), DOMAINS)
    times = [r.arrival_time for r in wl]
    assert all(a < b for a, b in zip(times, times[1:]))
    assert all(0 < t < 100 for t in times)
    assert [r.id for r in wl] == list(range(len(wl)))


def test_seed_determinism():
    cfg = WorkloadConfig(rng_seed=33, arrival_rate=50)
    assert generate_workload(cfg, DOMAINS) == generate_workload(cfg, DOMAINS)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 8), st.floats(0.05, 1.0))
def test_generated_requests_are_connected(seed, n, p):
    cfg = WorkloadConfig(node_count=n, connectivity=p)
    r = generate_request(0, cfg, DOMAINS, np.random.default_rng(seed))
    assert connected(r)
    pairs = [(l.u, l.v) for l in r.links]
    assert len(pairs) == len(set(pairs))


def test_jsonl_round_trip(tmp_path):
    wl = generate_workload(WorkloadConfig(rng_seed=5, arrival_rate=40), DOMAINS)
    path = tmp_path / "w.jsonl"
    dump_workload(path, wl)
    assert load_workload(path) == wl
    assert len(path.read_text().splitlines()) == len(wl)


def test_request_validation():
    with pytest.raises(ValueError):
        VirtualRequest(0, (VirtualNode(0, 1, (0,)), VirtualNode(1, 1, (0,))), ())
    with pytest.raises(ValueError):
        VirtualLink(1, 1, 3)
    with pytest.raises(ValueError):
        VirtualNode(0, 0, (0,))
    with pytest.raises(ConfigError):
        generate_workload(WorkloadConfig(candidate_domains_per_node=5), DOMAINS)
