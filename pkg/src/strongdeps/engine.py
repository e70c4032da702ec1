"""Direct and strong dependency graphs of a repository."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor

from .graph import DiGraph, StrongDepGraph, strongly_connected_components, transitive_closure
from .model import PackageId, Repository
from .sat import Encoding, PackageSolver, neg, pos

__all__ = [
    "conjunctive_closure",
    "direct_dependency_graph",
    "strong_dependencies",
    "strong_dependencies_naive",
]

log = logging.getLogger(__name__)


def direct_dependency_graph(repo: Repository) -> DiGraph:
    """Edge ``p -> q`` whenever ``q`` satisfies a predicate of ``p``'s depends."""
    graph = DiGraph(repo.ids)
    for pkg in repo:
        for clause in pkg.depends:
            for target in repo.clause_targets(clause):
                graph.add_edge(pkg.id, target)
    return graph


def _conjunctive_graph(repo: Repository) -> DiGraph:
    graph = DiGraph(repo.ids)
    for pkg in repo:
        for clause in pkg.depends:
            targets = repo.clause_targets(clause)
            if len(targets) == 1:
                graph.add_edge(pkg.id, targets[0])
    return graph


def conjunctive_closure(repo: Repository) -> set[tuple[PackageId, PackageId]]:
    """Pairs connected by a path of single-target dependency clauses.

    Each pair is a strong dependency whenever its source is installable.
    """
    return transitive_closure(_conjunctive_graph(repo)).edge_set()


def strong_dependencies_naive(repo: Repository) -> StrongDepGraph:
    """One SAT query per ordered pair; the reference for the fast path."""
    solver = PackageSolver(repo)
    edges = []
    broken = []
    for p in repo.ids:
        if not solver.is_installable(p):
            broken.append(p)
            continue
        for q in repo.ids:
            if q != p and solver.can_install_without(p, q) is None:
                edges.append((p, q))
    return StrongDepGraph(repo.ids, edges, broken)


class _Worker:
    """Per-process state: one solver plus the successor sets found so far."""

    def __init__(self, repo: Repository, encoding: Encoding, conj: dict[int, set[int]]):
        self.solver = PackageSolver(repo, encoding).solver
        self.conj = conj
        self.cons: dict[int, set[int]] = {}

    def successors(self, v: int) -> set[int] | None:
        solver, cons = self.solver, self.cons
        model = solver.solve([pos(v)])
        if model is None:
            return None
        # unit-propagated and conjunctive consequences of v need no query
        found = set(solver.implied) | self.conj.get(v, set())
        for q in list(found):
            found.update(cons.get(q, ()))
        alive = set(model)
        for q in sorted(model):
            if q == v or q in found or q not in alive:
                continue
            witness = solver.solve([pos(v), neg(q)])
            if witness is None:
                found.add(q)
                found.update(cons.get(q, ()))
            else:
                # q is absent from witness; so is every non-dependency of v it omits
                alive.intersection_update(witness)
        found.discard(v)
        cons[v] = found
        return found

    def run(self, batch: list[int]) -> list[tuple[int, set[int] | None]]:
        return [(v, self.successors(v)) for v in batch]


_state: _Worker | None = None


def _init_worker(repo, encoding, conj):
    global _state
    _state = _Worker(repo, encoding, conj)


def _run_batch(batch):
    return _state.run(batch)


def _processing_order(repo: Repository) -> list[int]:
    # dependencies before dependents lets successor sets be reused
    index = {pid: i for i, pid in enumerate(repo.ids)}
    comps = strongly_connected_components(direct_dependency_graph(repo))
    return [index[pid] for comp in comps for pid in comp]


def strong_dependencies(repo: Repository, n_jobs: int = 1) -> StrongDepGraph:
    """Strong dependency graph via install sets and conjunctive seeding.

    For each installable ``p``: seed with conjunctive dependencies, take
    one installation ``S`` of ``p`` and query only the members of ``S``
    not already known.  Any counter-example installation found on the way
    prunes the remaining candidates.  The result equals
    :func:`strong_dependencies_naive` and does not depend on ``n_jobs``.
    """
    if n_jobs < 1:
        raise ValueError("n_jobs must be >= 1")
    ids = repo.ids
    index = {pid: i for i, pid in enumerate(ids)}
    encoding = Encoding(repo)
    conj: dict[int, set[int]] = {}
    for p, q in conjunctive_closure(repo):
        conj.setdefault(index[p], set()).add(index[q])
    order = _processing_order(repo)

    results: list[tuple[int, set[int] | None]] = []
    if n_jobs == 1 or len(order) < 2:
        results = _Worker(repo, encoding, conj).run(order)
    else:
        # contiguous slices keep dependency chains within one worker
        size = -(-len(order) // n_jobs)
        batches = [order[i : i + size] for i in range(0, len(order), size)]
        with ProcessPoolExecutor(
            max_workers=n_jobs, initializer=_init_worker, initargs=(repo, encoding, conj)
        ) as pool:
            for part in pool.map(_run_batch, batches):
                results.extend(part)

    edges = []
    broken = []
    for v, succ in sorted(results):
        if succ is None:
            broken.append(ids[v])
        else:
            edges.extend((ids[v], ids[w]) for w in sorted(succ))
    graph = StrongDepGraph(ids, edges, broken)
    closed = transitive_closure(graph)
    if closed.num_edges != graph.num_edges:
        log.debug("closure pass added %d edges", closed.num_edges - graph.num_edges)
    log.info(
        "strong dependencies: %d vertices, %d edges, %d uninstallable",
        len(closed),
        closed.num_edges,
        len(broken),
    )
    return closed
