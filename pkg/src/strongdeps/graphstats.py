"""Small-world statistics of dependency graphs."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import asdict, dataclass

from .graph import DiGraph, detransitivise

__all__ = ["GraphStats", "detransitivise", "format_stats_table", "small_world_stats"]

ROW_LABELS = (
    ("vertices", "Vertices"),
    ("edges", "Edges"),
    ("average_degree", "Average degree"),
    ("clustering", "Clustering coeff."),
    ("average_distance", "Average distance"),
    ("wcc_count", "Components (WCCs)"),
    ("largest_wcc", "Largest WCC"),
    ("density", "Density"),
)


@dataclass(frozen=True)
class GraphStats:
    vertices: int = 0
    edges: int = 0
    average_degree: float = 0.0
    clustering: float = 0.0
    average_distance: float = 0.0
    wcc_count: int = 0
    largest_wcc: int = 0
    density: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def _undirected(graph: DiGraph) -> dict:
    und = {v: set() for v in graph.vertices}
    for u in graph.vertices:
        for w in graph.successors(u):
            und[u].add(w)
            und[w].add(u)
    return und


def _components(und: dict) -> list[list]:
    seen: set = set()
    comps = []
    for root in und:
        if root in seen:
            continue
        seen.add(root)
        comp = [root]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in und[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def _clustering(und: dict) -> float:
    total = 0.0
    for v, nbrs in und.items():
        k = len(nbrs)
        if k < 2:
            continue
        links = sum(len(und[a] & nbrs) for a in nbrs) / 2
        total += 2 * links / (k * (k - 1))
    return total / len(und)


def _distance_sum(und: dict, source) -> int:
    dist = {source: 0}
    queue = deque([source])
    total = 0
    while queue:
        v = queue.popleft()
        d = dist[v] + 1
        for w in und[v]:
            if w not in dist:
                dist[w] = d
                total += d
                queue.append(w)
    return total


def small_world_stats(
    graph: DiGraph, max_exact: int = 50_000, n_samples: int = 2000, seed: int = 0
) -> GraphStats:
    """Clustering, distances and components on the undirected support.

    The average distance is the mean over ordered pairs of the largest
    weakly connected component; above ``max_exact`` vertices it is
    estimated from ``n_samples`` BFS sources drawn with ``seed``.
    """
    n = len(graph)
    if n == 0:
        return GraphStats()
    m = graph.num_edges
    und = _undirected(graph)
    comps = _components(und)
    largest = max(comps, key=len)
    size = len(largest)
    if size < 2:
        avg = 0.0
    else:
        sources = largest
        if size > max_exact:
            order = {v: i for i, v in enumerate(graph.vertices)}
            ordered = sorted(largest, key=order.__getitem__)
            sources = random.Random(seed).sample(ordered, n_samples)
        avg = sum(_distance_sum(und, s) for s in sources) / (len(sources) * (size - 1))
    return GraphStats(
        vertices=n,
        edges=m,
        average_degree=m / n,
        clustering=_clustering(und),
        average_distance=avg,
        wcc_count=len(comps),
        largest_wcc=size,
        density=m / (n * (n - 1)) if n > 1 else 0.0,
    )


def _fmt(value) -> str:
    if isinstance(value, int):
        return f"{value:,}".replace(",", " ")
    if value and abs(value) < 0.01:
        return f"{value:.2g}"
    return f"{value:.2f}"


def format_stats_table(columns: dict[str, GraphStats]) -> str:
    """Aligned text table: one row per statistic, one column per graph."""
    header = [""] + list(columns)
    rows = [header]
    for key, label in ROW_LABELS:
        rows.append([label] + [_fmt(getattr(s, key)) for s in columns.values()])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for j, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append(" | ".join(cells).rstrip())
        if j == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
