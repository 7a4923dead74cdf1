"""Experiment configuration and its JSON file format.

The file mirrors :class:`ExperimentConfig`: top-level run settings plus one
object per component (``generation``, ``workload``, ``swarm``, ``weights``).
Per-component ``rng_seed`` and the workload horizon are not stored; they are
derived from the seed list and the top-level ``horizon``. Missing keys take the
reference defaults, unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .pso import FitnessWeights, SwarmConfig
from .substrate import GenerationConfig
from .workload import WorkloadConfig

ALGORITHM_NAMES = ("mp-vne", "vne-pso", "mc-vnm", "lid-vne")
_DERIVED = {"rng_seed", "horizon", "weights", "max_attempts"}


@dataclass(frozen=True)
class ExperimentConfig:
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    algorithms: tuple[str, ...] = ("mp-vne",)
    seeds: tuple[int, ...] = (0,)
    horizon: float = 100.0
    sampling: float = 1.0
    out: str = "results"

    def __post_init__(self):
        for a in self.algorithms:
            if a not in ALGORITHM_NAMES:
                raise ConfigError("algorithms", f"unknown algorithm {a!r}")
        if not self.algorithms:
            raise ConfigError("algorithms", "at least one algorithm required")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds", "duplicate seeds")
        if self.horizon <= 0:
            raise ConfigError("horizon", "must be positive")
        if self.sampling <= 0:
            raise ConfigError("sampling", "must be positive")
        if self.workload.candidate_domains_per_node > self.generation.domain_count:
            raise ConfigError("workload.candidate_domains_per_node", "exceeds generation.domain_count")

    @property
    def weights(self) -> FitnessWeights:
        return self.swarm.weights

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithms": list(self.algorithms),
            "seeds": list(self.seeds),
            "horizon": self.horizon,
            "sampling": self.sampling,
            "out": self.out,
            "generation": _section(self.generation),
            "workload": _section(self.workload),
            "swarm": _section(self.swarm),
            "weights": _section(self.swarm.weights),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected a JSON object")
        known = {"algorithms", "seeds", "horizon", "sampling", "out", "generation", "workload", "swarm", "weights"}
        for k in data:
            if k not in known:
                raise ConfigError(k, "unknown key")
        top: dict[str, Any] = {}
        if "algorithms" in data:
            algs = data["algorithms"]
            if isinstance(algs, str):
                algs = [algs]
            top["algorithms"] = tuple(_typed("algorithms[]", a, str) for a in algs)
        if "seeds" in data:
            top["seeds"] = tuple(_typed("seeds[]", s, int) for s in data["seeds"])
        for k in ("horizon", "sampling"):
            if k in data:
                top[k] = float(_typed(k, data[k], float))
        if "out" in data:
            top["out"] = _typed("out", data["out"], str)
        weights = _build(FitnessWeights, "weights", data.get("weights", {}))
        swarm = _build(SwarmConfig, "swarm", data.get("swarm", {}), weights=weights)
        return cls(
            generation=_build(GenerationConfig, "generation", data.get("generation", {})),
            workload=_build(WorkloadConfig, "workload", data.get("workload", {})),
            swarm=swarm,
            **top,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("--config", f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _section(obj) -> dict[str, Any]:
    out = {}
    for f in fields(obj):
        if f.name in _DERIVED:
            continue
        v = getattr(obj, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def _typed(path: str, value: Any, kind: type) -> Any:
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise ConfigError(path, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _build(cls, prefix: str, data: Any, **extra):
    if not isinstance(data, dict):
        raise ConfigError(prefix, "expected an object")
    allowed = {f.name: f for f in fields(cls) if f.name not in _DERIVED}
    kwargs: dict[str, Any] = {}
    for k, v in data.items():
        path = f"{prefix}.{k}"
        if k not in allowed:
            raise ConfigError(path, "unknown key")
        default = allowed[k].default
        if default is dataclasses.MISSING:
            default = None
        if isinstance(default, tuple):
            if not isinstance(v, list) or len(v) != 2:
                raise ConfigError(path, "expected a [low, high] pair")
            kwargs[k] = tuple(_typed(f"{path}[]", x, int) for x in v)
        elif isinstance(default, bool):
            kwargs[k] = _typed(path, v, bool)
        elif isinstance(default, int):
            kwargs[k] = _typed(path, v, int)
        elif isinstance(default, float) or default is None:
            if v is None:
                kwargs[k] = None
            else:
                kwargs[k] = float(_typed(path, v, float))
        else:
            kwargs[k] = v
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{prefix}.{exc.field}", str(exc).split(": ", 1)[-1]) from None
