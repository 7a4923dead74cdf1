"""All-pairs least-weight paths (Floyd-Warshall) with path reconstruction."""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

import numpy as np


class ShortestPaths:
    """Result of :func:`floyd_all_pairs`. Unreachable pairs have ``inf`` distance."""

    def __init__(self, vertices: Sequence[Hashable], dist: np.ndarray, nxt: np.ndarray):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.matrix = dist
        self._next = nxt

    def dist(self, u, v) -> float:
        return float(self.matrix[self.index[u], self.index[v]])

    def reachable(self, u, v) -> bool:
        return bool(np.isfinite(self.matrix[self.index[u], self.index[v]]))

    def path(self, u, v) -> list | None:
        """Vertex sequence from ``u`` to ``v`` inclusive, or ``None`` if unreachable."""
        i, j = self.index[u], self.index[v]
        if not np.isfinite(self.matrix[i, j]):
            return None
        out = [self.vertices[i]]
        while i != j:
            i = int(self._next[i, j])
            out.append(self.vertices[i])
        return out


def floyd_all_pairs(vertices: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable, float]]) -> ShortestPaths:
    """Undirected all-pairs shortest paths.

    ``edges`` yields ``(u, v, weight)`` with nonnegative weights; parallel edges
    keep the lightest. Relaxation is strict, so among equal-weight paths the one
    found first (lowest intermediate index) is kept.
    """
    vertices = list(vertices)
    idx = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    dist = np.full((n, n), np.inf)
    nxt = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0.0)
    for i in range(n):
        nxt[i, i] = i
    for u, v, w in edges:
        if w < 0:
            raise ValueError(f"negative edge weight {w} on ({u!r}, {v!r})")
        i, j = idx[u], idx[v]
        if i == j:
            continue
        if w < dist[i, j]:
            dist[i, j] = dist[j, i] = w
            nxt[i, j] = j
            nxt[j, i] = i
    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        better = via < dist
        if better.any():
            dist = np.where(better, via, dist)
            nxt = np.where(better, nxt[:, k, None], nxt)
    return ShortestPaths(vertices, dist, nxt)
