"""Name -> factory registry for the embedding algorithms."""

from __future__ import annotations

from typing import Callable

from .baselines import lid_vne, mc_vnm
from .embedding import EmbeddingAlgorithm, mp_vne, vne_pso
from .pso import SwarmConfig

Factory = Callable[[SwarmConfig, int], EmbeddingAlgorithm]

ALGORITHMS: dict[str, Factory] = {
    "mp-vne": mp_vne,
    "vne-pso": vne_pso,
    "mc-vnm": mc_vnm,
    "lid-vne": lid_vne,
}


def make_algorithm(name: str, swarm: SwarmConfig | None = None, seed: int = 0) -> EmbeddingAlgorithm:
    try:
        factory = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return factory(swarm or SwarmConfig(), seed)
