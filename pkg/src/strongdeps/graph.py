"""Directed graph containers and the closure / reduction algorithms."""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping

from .model import InputError, PackageId

__all__ = [
    "DiGraph",
    "StrongDepGraph",
    "detransitivise",
    "is_transitively_closed",
    "strongly_connected_components",
    "transitive_closure",
    "transitive_reduction",
]


class DiGraph:
    """Simple directed graph without self-loops; vertex order is preserved."""

    def __init__(self, vertices: Iterable[Hashable] = (), edges: Iterable[tuple] = ()):
        self._succ: dict = {v: set() for v in vertices}
        self._invalidate()
        for u, v in edges:
            self.add_edge(u, v)

    def _invalidate(self):
        self._pred: dict | None = None

    @classmethod
    def from_adjacency(cls, adj: Mapping) -> DiGraph:
        g = cls(adj)
        for u, vs in adj.items():
            for v in vs:
                g.add_edge(u, v)
        return g

    def add_vertex(self, v):
        self._succ.setdefault(v, set())
        self._invalidate()

    def add_edge(self, u, v):
        if u == v:
            return
        self._succ.setdefault(u, set()).add(v)
        self._succ.setdefault(v, set())
        self._invalidate()

    @property
    def vertices(self) -> tuple:
        return tuple(self._succ)

    def __contains__(self, v) -> bool:
        return v in self._succ

    def __len__(self) -> int:
        return len(self._succ)

    def successors(self, v) -> set:
        try:
            return self._succ[v]
        except KeyError:
            raise InputError(f"unknown vertex {v}") from None

    def predecessors(self, v) -> set:
        if self._pred is None:
            pred: dict = {u: set() for u in self._succ}
            for u, vs in self._succ.items():
                for w in vs:
                    pred[w].add(u)
            self._pred = pred
        try:
            return self._pred[v]
        except KeyError:
            raise InputError(f"unknown vertex {v}") from None

    def in_degree(self, v) -> int:
        return len(self.predecessors(v))

    def edges(self) -> Iterator[tuple]:
        """Edges in vertex order, successors sorted by vertex order."""
        order = {v: i for i, v in enumerate(self._succ)}
        for u, vs in self._succ.items():
            for v in sorted(vs, key=order.__getitem__):
                yield u, v

    def edge_set(self) -> set[tuple]:
        return {(u, v) for u, vs in self._succ.items() for v in vs}

    @property
    def num_edges(self) -> int:
        return sum(len(vs) for vs in self._succ.values())

    def adjacency(self) -> dict:
        return {u: set(vs) for u, vs in self._succ.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self._succ == other._succ

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self)} vertices, {self.num_edges} edges)"


class StrongDepGraph(DiGraph):
    """Transitively closed strong dependency graph with installability flags."""

    def __init__(self, vertices=(), edges=(), uninstallable: Iterable = ()):
        super().__init__(vertices, edges)
        self.uninstallable = frozenset(uninstallable)
        for v in self.uninstallable:
            self.add_vertex(v)

    def _invalidate(self):
        super()._invalidate()
        self._names: dict[str, int] | None = None

    def is_installable(self, v) -> bool:
        if v not in self:
            raise InputError(f"unknown vertex {v}")
        return v not in self.uninstallable

    def label(self, v) -> str:
        """Bare package name when unambiguous among the vertices."""
        if isinstance(v, PackageId):
            if not v.version or self._name_count().get(v.name, 0) == 1:
                return v.name
            return str(v)
        return str(v)

    def _name_count(self) -> dict[str, int]:
        if self._names is None:
            counts: dict[str, int] = {}
            for v in self._succ:
                if isinstance(v, PackageId):
                    counts[v.name] = counts.get(v.name, 0) + 1
            self._names = counts
        return self._names

    def by_name(self, name: str):
        """Vertex for ``name`` (or ``name=version``)."""
        matches = [v for v in self.vertices if self.label(v) == name or str(v) == name]
        if not matches:
            matches = [v for v in self.vertices if isinstance(v, PackageId) and v.name == name]
        if len(matches) != 1:
            raise InputError(f"{'ambiguous' if matches else 'unknown'} package {name}")
        return matches[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StrongDepGraph):
            return NotImplemented
        return self._succ == other._succ and self.uninstallable == other.uninstallable


def strongly_connected_components(graph: DiGraph) -> list[list]:
    """Tarjan's algorithm, iterative; components come out sinks first."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    order = {v: i for i, v in enumerate(graph.vertices)}
    counter = 0
    for root in graph.vertices:
        if root in index:
            continue
        work = [(root, iter(sorted(graph.successors(root), key=order.__getitem__)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(graph.successors(w), key=order.__getitem__))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort(key=order.__getitem__)
                out.append(comp)
    return out


def transitive_closure(graph: DiGraph) -> DiGraph:
    """Closure by one reachability sweep per vertex; no self-loops."""
    closed = {}
    for comp in strongly_connected_components(graph):
        # sinks first, so every successor outside the component is done
        reach: set = set()
        members = set(comp)
        for v in comp:
            for w in graph.successors(v):
                if w not in members:
                    reach.add(w)
                    reach |= closed[w]
        if len(comp) > 1:
            reach |= members
        for v in comp:
            closed[v] = reach
    edges = ((v, w) for v in graph.vertices for w in closed[v])
    if isinstance(graph, StrongDepGraph):
        return StrongDepGraph(graph.vertices, edges, graph.uninstallable)
    return DiGraph(graph.vertices, edges)


def is_transitively_closed(graph: DiGraph) -> bool:
    for u in graph.vertices:
        su = graph.successors(u)
        for v in su:
            for w in graph.successors(v):
                if w != u and w not in su:
                    return False
    return True


def _sort_key(v):
    return (v.name, v.version) if isinstance(v, PackageId) else (str(type(v)), v)


def detransitivise(graph: DiGraph) -> DiGraph:
    """A minimal graph with the same transitive closure as ``graph``.

    Strongly connected components are collapsed, the (acyclic) condensation
    is reduced, and each component is re-expanded as a cycle over its
    members in sorted order.  Condensation edges connect the first members
    (sorted) of their components.
    """
    if not is_transitively_closed(graph):
        raise InputError("graph is not transitively closed")
    comps = strongly_connected_components(graph)
    comp_of = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    heads = [min(comp, key=_sort_key) for comp in comps]
    out = DiGraph(graph.vertices)
    for i, comp in enumerate(comps):
        if len(comp) > 1:
            ring = sorted(comp, key=_sort_key)
            for a, b in zip(ring, ring[1:] + ring[:1]):
                out.add_edge(a, b)
        # closed graph: a component's successors are those of any member
        targets = {comp_of[w] for w in graph.successors(comp[0])} - {i}
        indirect: set = set()
        for t in targets:
            indirect |= {comp_of[w] for w in graph.successors(comps[t][0])} - {t}
        for t in sorted(targets - indirect):
            out.add_edge(heads[i], heads[t])
    return out


def transitive_reduction(dag: DiGraph) -> DiGraph:
    """Drop every edge ``u -> v`` that is implied by a longer path.

    ``dag`` must be acyclic; the reduction is then unique.
    """
    comps = strongly_connected_components(dag)
    if any(len(c) > 1 for c in comps):
        raise InputError("transitive reduction needs an acyclic graph")
    reach: dict = {}
    out = DiGraph(dag.vertices)
    for (v,) in comps:
        # sinks first: reach of every successor is already known
        succ = dag.successors(v)
        implied: set = set()
        for w in succ:
            implied |= reach[w]
        for w in succ:
            if w not in implied:
                out.add_edge(v, w)
        reach[v] = implied | succ
    return out
