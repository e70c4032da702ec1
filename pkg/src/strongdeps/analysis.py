"""Impact sets, sensitivity and strong dominance over a strong dependency graph."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .graph import DiGraph, StrongDepGraph, strongly_connected_components, transitive_reduction
from .model import InputError

__all__ = [
    "CorrelationStats",
    "DominanceCluster",
    "DominanceEdge",
    "DominanceGraph",
    "RemovabilityReport",
    "SensitivityRecord",
    "correlation_stats",
    "direct_sensitivity",
    "dominance_clusters",
    "dominance_graph",
    "impact_set",
    "rank_sensitivity",
    "relative_dominance",
    "removability_check",
    "sensitivity",
    "sensitivity_table",
    "strong_dominance",
    "strong_successors",
]


@dataclass(frozen=True)
class SensitivityRecord:
    package: object
    direct: int
    strong: int
    installable: bool = True

    @property
    def delta(self) -> int:
        return self.strong - self.direct


@dataclass(frozen=True)
class DominanceEdge:
    """``dominator`` strongly dominates ``dominated`` up to ``z`` percent."""

    dominator: object
    dominated: object
    z: Fraction

    @property
    def strict(self) -> bool:
        return self.z == 0


@dataclass(frozen=True)
class CorrelationStats:
    spearman_rho: float
    pearson_r: float
    direct_mean: float
    direct_std: float
    strong_mean: float
    strong_std: float
    delta_mean: float
    delta_std: float
    # k -> percentage of packages whose delta lies within k standard deviations
    delta_within: dict[int, float] = field(default_factory=dict)


def _vertex(G: DiGraph, p):
    if p not in G:
        raise InputError(f"unknown vertex {p}")
    return p


def impact_set(p, G: StrongDepGraph) -> frozenset:
    """Packages that strongly depend on ``p``, plus ``p`` itself.

    Empty for an uninstallable ``p``: it is not even a dependency of itself.
    """
    _vertex(G, p)
    if not G.is_installable(p):
        return frozenset()
    return frozenset(G.predecessors(p)) | {p}


def strong_successors(p, G: StrongDepGraph) -> frozenset:
    return frozenset(G.successors(_vertex(G, p)))


def sensitivity(p, G: StrongDepGraph) -> int:
    """``|impact_set(p)| - 1``, clamped to 0 for uninstallable packages."""
    return max(0, len(impact_set(p, G)) - 1)


def direct_sensitivity(p, DG: DiGraph) -> int:
    return DG.in_degree(_vertex(DG, p))


def sensitivity_table(G: StrongDepGraph, DG: DiGraph) -> list[SensitivityRecord]:
    """One record per vertex of ``G``, in vertex order."""
    return [
        SensitivityRecord(v, direct_sensitivity(v, DG), sensitivity(v, G), G.is_installable(v))
        for v in G.vertices
    ]


def rank_sensitivity(records: Iterable[SensitivityRecord], by: str = "delta", label=str) -> list[SensitivityRecord]:
    """Sort by ``delta`` or ``strong`` (descending), ties by label."""
    if by not in ("delta", "strong"):
        raise ValueError(f"unknown ranking key {by!r}")
    if by == "delta":
        return sorted(records, key=lambda r: (-r.delta, -r.strong, label(r.package)))
    return sorted(records, key=lambda r: (-r.strong, -r.delta, label(r.package)))


def correlation_stats(records: list[SensitivityRecord]) -> CorrelationStats:
    """Spearman/Pearson correlation of direct vs strong, plus moments.

    Standard deviations are population ones.  A correlation is NaN when a
    column is constant.
    """
    if len(records) < 2:
        raise InputError("correlation needs at least 2 records")
    direct = np.array([r.direct for r in records], dtype=float)
    strong = np.array([r.strong for r in records], dtype=float)
    delta = strong - direct
    constant = np.ptp(direct) == 0 or np.ptp(strong) == 0
    if constant:
        rho = r = math.nan
    else:
        rho = float(stats.spearmanr(direct, strong)[0])
        r = float(stats.pearsonr(direct, strong)[0])
    mean, std = float(delta.mean()), float(delta.std())
    within = {k: float(np.mean(np.abs(delta - mean) <= k * std) * 100) for k in (1, 2, 3)}
    return CorrelationStats(
        rho,
        r,
        float(direct.mean()),
        float(direct.std()),
        float(strong.mean()),
        float(strong.std()),
        mean,
        std,
        within,
    )


def _uncovered(p, q, G: StrongDepGraph) -> tuple[int, int]:
    is_p = impact_set(p, G)
    is_q = impact_set(q, G)
    return len(is_q - G.successors(p) - is_p), len(is_p)


def strong_dominance(p, q, G: StrongDepGraph) -> bool:
    """``p ⇒ q`` and ``Is(q) \\ Cons(p) ⊆ Is(p)``."""
    _vertex(G, p), _vertex(G, q)
    if not G.is_installable(p):
        return False
    if p != q and q not in G.successors(p):
        return False
    return _uncovered(p, q, G)[0] == 0


def relative_dominance(p, q, G: StrongDepGraph) -> Fraction | None:
    """Share (percent of ``|Is(p)|``) of ``q``'s impact set not explained by ``p``.

    ``None`` unless ``p ⇒ q``.
    """
    _vertex(G, p), _vertex(G, q)
    if not G.is_installable(p):
        return None
    if p != q and q not in G.successors(p):
        return None
    missing, size = _uncovered(p, q, G)
    return Fraction(100 * missing, size)


@dataclass
class DominanceGraph:
    """Dominance edges with mutually dominating packages merged.

    ``classes`` maps each node (the first member in vertex order) to all
    members; ``edges`` is the transitive reduction between nodes, each edge
    carrying the member pair of smallest ``z``; ``relation`` keeps every
    dominance pair found before merging and reduction.
    """

    classes: dict[object, tuple]
    edges: list[DominanceEdge]
    relation: list[DominanceEdge]
    node_of: dict[object, object]

    def node_edges(self) -> list[tuple[object, object, DominanceEdge]]:
        return [(self.node_of[e.dominator], self.node_of[e.dominated], e) for e in self.edges]


def dominance_graph(G: StrongDepGraph, fuzz=0, among: Iterable | None = None) -> DominanceGraph:
    """All pairs ``p ⇒ q`` with relative dominance ``z <= fuzz``, reduced.

    ``among`` restricts both ends to a vertex subset (e.g. the top-N most
    sensitive packages).
    """
    fuzz = Fraction(fuzz)
    if fuzz < 0:
        raise ValueError("fuzz must be >= 0")
    order = {v: i for i, v in enumerate(G.vertices)}
    keep = set(G.vertices) if among is None else set(among)
    for v in keep:
        _vertex(G, v)
    impact = {v: impact_set(v, G) for v in keep}
    relation = []
    for p in G.vertices:
        if p not in keep or not G.is_installable(p):
            continue
        cons_p, is_p = G.successors(p), impact[p]
        for q in sorted(cons_p & keep, key=order.__getitem__):
            z = Fraction(100 * len(impact[q] - cons_p - is_p), len(is_p))
            if z <= fuzz:
                relation.append(DominanceEdge(p, q, z))

    support = DiGraph(sorted({v for e in relation for v in (e.dominator, e.dominated)}, key=order.__getitem__))
    for e in relation:
        support.add_edge(e.dominator, e.dominated)
    classes: dict = {}
    node_of: dict = {}
    for comp in strongly_connected_components(support):
        rep = comp[0]
        classes[rep] = tuple(comp)
        for v in comp:
            node_of[v] = rep
    condensed = DiGraph(sorted(classes, key=order.__getitem__))
    best: dict[tuple, DominanceEdge] = {}
    for e in relation:
        a, b = node_of[e.dominator], node_of[e.dominated]
        if a == b:
            continue
        condensed.add_edge(a, b)
        cur = best.get((a, b))
        if cur is None or e.z < cur.z:
            best[(a, b)] = e
    reduced = transitive_reduction(condensed)
    edges = [best[(a, b)] for a, b in reduced.edges()]
    classes = {rep: classes[rep] for rep in condensed.vertices}
    return DominanceGraph(classes, edges, relation, node_of)


@dataclass(frozen=True)
class DominanceCluster:
    members: frozenset
    roots: tuple
    nodes: tuple

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def trivial(self) -> bool:
        return self.size <= 2


def dominance_clusters(edges: DominanceGraph | Iterable[DominanceEdge]) -> list[DominanceCluster]:
    """Weakly connected components of a dominance graph, largest first.

    ``roots`` are the component's undominated nodes.  Clusters of at most
    two packages are flagged ``trivial``.
    """
    if isinstance(edges, DominanceGraph):
        pairs = [(a, b) for a, b, _ in edges.node_edges()]
        members_of = edges.classes
    else:
        pairs = [(e.dominator, e.dominated) for e in edges]
        members_of = {}
    nodes: dict = {}
    for a, b in pairs:
        nodes.setdefault(a, None)
        nodes.setdefault(b, None)
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups: dict = {}
    for v in nodes:
        groups.setdefault(find(v), []).append(v)
    dominated = {b for _, b in pairs}
    out = []
    for group in groups.values():
        members = frozenset(m for v in group for m in members_of.get(v, (v,)))
        roots = tuple(v for v in group if v not in dominated)
        out.append(DominanceCluster(members, roots, tuple(group)))
    out.sort(key=lambda c: -c.size)
    return out


@dataclass(frozen=True)
class RemovabilityReport:
    package: object
    removable: bool
    co_removal: frozenset


def removability_check(p, G: StrongDepGraph) -> RemovabilityReport:
    """Removable in isolation iff nothing strongly depends on ``p``.

    Otherwise ``co_removal`` is the set that has to go with it.
    """
    co = impact_set(p, G) | {p}
    return RemovabilityReport(p, len(co) == 1, frozenset(co))
