import json
import re
import subprocess
import sys

import pytest

from mpvne.cli import main
from mpvne.config import ExperimentConfig
from mpvne.errors import ConfigError
from mpvne.substrate import GenerationConfig
from mpvne.workload import load_workload

HEADER = "time,acceptance_rate,avg_cost,avg_delay,comprehensive_cost"


def write_cfg(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_config_round_trip(tmp_path, capsys):
    cfg = ExperimentConfig(algorithms=("mc-vnm", "lid-vne"), seeds=(3, 5), horizon=40)
    assert ExperimentConfig.from_dict(json.loads(cfg.to_json())) == cfg
    out = tmp_path / "c.json"
    assert main(["config", "--config", write_cfg(tmp_path / "in.json", cfg.to_dict()), "--out", str(out)]) == 0
    assert ExperimentConfig.load(out) == cfg


def test_defaults_match_reference_setup(capsys):
    assert main(["config"]) == 0
    d = json.loads(capsys.readouterr().out)
    g = d["generation"]
    assert (g["domain_count"], g["nodes_per_domain"], g["boundary_nodes_per_domain"]) == (4, 30, 2)
    assert g["node_cpu_range"] == [100, 300] and g["link_bw_range"] == [1000, 3000]
    assert g["interdomain_price_range"] == [5, 15] and g["interdomain_delay_range"] == [10, 30]
    w = d["workload"]
    assert w["node_count"] == 6 and w["cpu_demand_range"] == [1, 10] and w["mean_lifetime"] == 1000
    assert d["swarm"]["particle_count"] == 10 and d["swarm"]["iterations"] == 50
    assert d["weights"]["alpha"] == 0.3 and d["weights"]["gamma"] == 0.4


@pytest.mark.parametrize(
    "data, field",
    [
        ({"generation": {"bogus": 1}}, "generation.bogus"),
        ({"swarm": {"iterations": "many"}}, "swarm.iterations"),
        ({"weights": {"alpha": 0.9}}, "weights.alpha+beta+gamma"),
        ({"extra": 1}, "extra"),
        ({"generation": {"connectivity": 2.0}}, "generation.connectivity"),
    ],
)
def test_bad_config_names_the_field(data, field):
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_dict(data)
    assert exc.value.field == field


def test_exit_code_2_on_bad_config(tmp_path, capsys):
    rc = main(["run", "--config", write_cfg(tmp_path / "c.json", {"generation": {"bogus": 1}})])
    assert rc == 2
    assert "generation.bogus" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_exit_code_3_on_generation_failure(tmp_path, capsys):
    data = {"generation": {"nodes_per_domain": 30, "connectivity": 0.01}, "horizon": 2}
    rc = main(["run", "--config", write_cfg(tmp_path / "c.json", data), "--out", str(tmp_path / "o")])
    assert rc == 3
    assert "runtime failure" in capsys.readouterr().err


def small(tmp_path, **extra):
    data = {"horizon": 30, "generation": {"nodes_per_domain": 8}, "workload": {"arrival_rate": 50}, "swarm": {"iterations": 10}}
    data.update(extra)
    return write_cfg(tmp_path / "c.json", data)


def test_single_run_csv(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--config", small(tmp_path), "--out", str(out)]) == 0
    lines = (out / "mp-vne_seed0.csv").read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 1 + 31
    assert (out / "mp-vne_seed0.events.jsonl").exists() and (out / "summary.csv").exists()


def test_all_algorithms_ten_seeds(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = small(tmp_path, horizon=10)
    assert main(["run", "--config", cfg, "--algorithm", "all", "--seeds", "10", "--out", str(out)]) == 0
    csvs = sorted(p.name for p in out.glob("*_seed*.csv"))
    assert len(csvs) == 40
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("algorithm,time,acceptance_rate_mean,acceptance_rate_std")
    assert len(summary) == 1 + 4 * 11


def test_rerun_is_byte_identical(tmp_path, capsys):
    cfg = small(tmp_path)
    for name in ("a", "b"):
        assert main(["run", "--config", cfg, "--algorithm", "all", "--seeds", "2", "--out", str(tmp_path / name)]) == 0
    for p in sorted((tmp_path / "a").iterdir()):
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name


def test_dump_topology(tmp_path, capsys):
    dot = tmp_path / "t.dot"
    data = {"generation": {"domain_count": 3, "nodes_per_domain": 5, "boundary_nodes_per_domain": 1}}
    assert main(["run", "--config", write_cfg(tmp_path / "c.json", data), "--dump-topology", str(dot), "--dry-run"]) == 0
    text = dot.read_text()
    assert text.count("subgraph cluster_") == 3
    assert len(re.findall(r"^\s*n\d+ \[label=", text, re.M)) == 15
    assert not (tmp_path / "results").exists()


def test_single_domain_topology_has_no_inter_edges(tmp_path, capsys):
    dot = tmp_path / "t.dot"
    data = {
        "generation": {"domain_count": 1, "nodes_per_domain": 6, "boundary_nodes_per_domain": 1},
        "workload": {"candidate_domains_per_node": 1},
    }
    assert main(["run", "--config", write_cfg(tmp_path / "c.json", data), "--dump-topology", str(dot), "--dry-run"]) == 0
    assert "style=dashed" not in dot.read_text()


def test_dump_then_replay_workload(tmp_path, capsys):
    wl = tmp_path / "w.jsonl"
    cfg = small(tmp_path)
    assert main(["run", "--config", cfg, "--dump-workload", str(wl), "--dry-run"]) == 0
    reqs = load_workload(wl)
    assert reqs
    out = tmp_path / "o"
    assert main(["run", "--config", cfg, "--replay-workload", str(wl), "--out", str(out)]) == 0
    events = [json.loads(x) for x in (out / "mp-vne_seed0.events.jsonl").read_text().splitlines()]
    assert {e["request"] for e in events if e["event"] == "arrival"} == {r.id for r in reqs if r.arrival_time <= 30}
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert main(["run", "--config", cfg, "--replay-workload", str(bad), "--out", str(out)]) == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mpvne.cli", "config"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["generation"]["domain_count"] == GenerationConfig().domain_count
