"""Propositional encoding of a repository and an in-process CDCL solver.

Each package is a boolean variable (index = load order).  The encoding
holds three clause families:

* ``¬p ∨ t1 ∨ … ∨ tk`` for every dependency clause of ``p`` (the ``ti``
  are all packages matching some predicate of the clause),
* ``¬p ∨ ¬q`` for every explicit conflict, and
* ``¬p ∨ ¬q`` for every pair of versions of the same name.

Every clause contains a negative literal, so the all-false assignment (the
empty installation) is a model.  The solver exploits this: it only branches
on unsatisfied dependency clauses of installed packages and completes any
remaining variables with ``False``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from itertools import combinations

from .model import InputError, Installation, PackageId, Repository

__all__ = [
    "Encoding",
    "NotInstallable",
    "PackageSolver",
    "Solver",
    "install",
    "is_installable",
    "strong_dependency_query",
]


class NotInstallable(ValueError):
    """The package has no healthy installation in the repository."""

    def __init__(self, pid: PackageId):
        super().__init__(f"{pid} is not installable")
        self.package = pid


def pos(v: int) -> int:
    return v << 1


def neg(v: int) -> int:
    return (v << 1) | 1


class Encoding:
    """Immutable clause set for a repository; shareable between solvers."""

    def __init__(self, repo: Repository):
        self.ids = repo.ids
        self.num_vars = len(self.ids)
        index = {pid: i for i, pid in enumerate(self.ids)}
        clauses: list[tuple[int, ...]] = []
        heads: list[list[tuple[int, ...]]] = [[] for _ in self.ids]
        for v, pkg in enumerate(repo):
            for clause in pkg.depends:
                targets = tuple(index[t] for t in repo.clause_targets(clause))
                if v in targets:
                    continue
                clauses.append((neg(v),) + tuple(pos(t) for t in targets))
                heads[v].append(targets)
        pairs: set[tuple[int, int]] = set()
        for v, pid in enumerate(self.ids):
            for other in repo.conflict_targets(pid):
                w = index[other]
                pairs.add((min(v, w), max(v, w)))
        for name in repo.names:
            versions = sorted(index[pid] for pid in repo.versions_of(name))
            pairs.update(combinations(versions, 2))
        clauses.extend((neg(a), neg(b)) for a, b in sorted(pairs))
        self.clauses = tuple(clauses)
        self.heads = tuple(tuple(h) for h in heads)
        self._index = index

    def var(self, pid: PackageId) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise InputError(f"unknown package {pid}") from None

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_index", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._index = {pid: i for i, pid in enumerate(self.ids)}

    def to_dimacs(self) -> str:
        lines = [f"c {i + 1} {pid}" for i, pid in enumerate(self.ids)]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        for clause in self.clauses:
            lits = [(-(lit >> 1) - 1) if lit & 1 else (lit >> 1) + 1 for lit in clause]
            lines.append(" ".join(map(str, lits)) + " 0")
        return "\n".join(lines) + "\n"


class Solver:
    """CDCL solver over an :class:`Encoding`, queried under assumptions.

    Learnt clauses are consequences of the encoding alone (assumptions are
    decisions), so they are kept across queries.  Branching picks the first
    unsatisfied dependency clause of an installed package (trail order) and
    installs its lowest-indexed open target; everything never reached this
    way stays uninstalled.
    """

    def __init__(self, encoding: Encoding, max_learnts: int = 20000):
        n = encoding.num_vars
        self.num_vars = n
        self.heads = encoding.heads
        self.max_learnts = max_learnts
        self.val = [0] * (2 * n)  # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * n
        self.reason: list[list[int] | None] = [None] * n
        self.seen = [False] * n
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * n)]
        self.learnts: list[list[int]] = []
        self.implied: list[int] = []
        self.ok = True
        self._scan = 0
        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0}
        for clause in encoding.clauses:
            self._add_clause(list(clause))

    def _add_clause(self, c: list[int]):
        if len(c) == 1:
            lit = c[0]
            if self.val[lit] == -1:
                self.ok = False
            elif self.val[lit] == 0:
                self._assign(lit, None)
            return
        self.watches[c[0]].append(c)
        self.watches[c[1]].append(c)

    def _assign(self, lit: int, reason):
        v = lit >> 1
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        val, reason = self.val, self.reason
        stop = self.trail_lim[lvl]
        for lit in self.trail[stop:]:
            val[lit] = val[lit ^ 1] = 0
            reason[lit >> 1] = None
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        self._scan = 0

    def _propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        level, reason = self.level, self.reason
        cur = len(self.trail_lim)
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if val[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1]].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return c
                    v = first >> 1
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[v] = cur
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        return None

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        idx = len(trail) - 1
        p = -1
        while True:
            for q in confl if p < 0 else confl[1:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            counter -= 1
            if counter <= 0:
                break
        learnt[0] = p ^ 1
        for q in learnt[1:]:
            seen[q >> 1] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _reduce(self):
        dead = {id(c) for c in self.learnts}
        self.watches = [[c for c in ws if id(c) not in dead] for ws in self.watches]
        self.learnts = []

    def _pick(self) -> int | None:
        val, heads, trail = self.val, self.heads, self.trail
        i = self._scan
        while i < len(trail):
            lit = trail[i]
            if not lit & 1:
                for targets in heads[lit >> 1]:
                    choice = -1
                    for t in targets:
                        s = val[t << 1]
                        if s == 1:
                            break
                        if s == 0 and choice < 0:
                            choice = t
                    else:
                        if choice >= 0:
                            self._scan = i
                            return pos(choice)
            i += 1
        self._scan = i
        return None

    def solve(self, assumptions: Sequence[int] = ()) -> list[int] | None:
        """Return the true variables of a model, or ``None`` if UNSAT."""
        self.stats["solves"] += 1
        self._cancel_until(0)
        self._scan = 0
        if not self.ok:
            return None
        if len(self.learnts) > self.max_learnts:
            self._reduce()
        self.implied = []
        n_assumptions = len(assumptions)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                if not self.trail_lim:
                    self.ok = False
                    return None
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self.learnts.append(learnt)
                    self._assign(learnt[0], learnt)
                continue
            lvl = len(self.trail_lim)
            if lvl < n_assumptions:
                a = assumptions[lvl]
                state = self.val[a]
                if state == -1:
                    return None
                self.trail_lim.append(len(self.trail))
                if state == 0:
                    self._assign(a, None)
                continue
            if lvl == n_assumptions:
                self.implied = [lit >> 1 for lit in self.trail if not lit & 1]
            lit = self._pick()
            if lit is None:
                return [lit >> 1 for lit in self.trail if not lit & 1]
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)


class PackageSolver:
    """Package-level queries over one repository, sharing learnt clauses.

    Answers depend only on the repository; the particular installation
    returned by :meth:`install` may vary with the query history.
    """

    def __init__(self, repo: Repository, encoding: Encoding | None = None):
        self.repo = repo
        self.encoding = encoding if encoding is not None else Encoding(repo)
        self.solver = Solver(self.encoding)

    def var(self, pid: PackageId) -> int:
        return self.encoding.var(pid)

    def _model(self, assumptions) -> Installation | None:
        model = self.solver.solve(assumptions)
        if model is None:
            return None
        ids = self.encoding.ids
        return Installation(frozenset(ids[v] for v in model))

    def is_installable(self, p: PackageId) -> bool:
        return self.solver.solve([pos(self.var(p))]) is not None

    def install(self, p: PackageId) -> Installation:
        inst = self._model([pos(self.var(p))])
        if inst is None:
            raise NotInstallable(p)
        return inst

    def can_install_without(self, p: PackageId, q: PackageId) -> Installation | None:
        """A healthy installation containing ``p`` but not ``q``, if any."""
        return self._model([pos(self.var(p)), neg(self.var(q))])

    def strongly_depends(self, p: PackageId, q: PackageId) -> bool:
        if p == q:
            self.var(p)
            return True
        if not self.is_installable(p):
            raise NotInstallable(p)
        return self.can_install_without(p, q) is None


def _check(repo: Repository, pids: Iterable[PackageId]):
    for pid in pids:
        if pid not in repo:
            raise InputError(f"unknown package {pid}")


def is_installable(p: PackageId, repo: Repository) -> bool:
    _check(repo, [p])
    return PackageSolver(repo).is_installable(p)


def install(p: PackageId, repo: Repository) -> Installation:
    """A healthy installation containing ``p``; deterministic per repository."""
    _check(repo, [p])
    return PackageSolver(repo).install(p)


def strong_dependency_query(p: PackageId, q: PackageId, repo: Repository) -> bool:
    """True iff every healthy installation containing ``p`` contains ``q``.

    Raises :class:`NotInstallable` when ``p`` has no healthy installation.
    """
    _check(repo, [p, q])
    if p == q:
        return True
    return PackageSolver(repo).strongly_depends(p, q)
