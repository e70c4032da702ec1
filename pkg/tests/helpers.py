"""Random repository generators and brute-force oracles for the test suite.

The oracles here deliberately avoid the library's matching and encoding
code: they re-derive predicate matching from the raw package fields and
enumerate every subset of the repository.
"""

from __future__ import annotations

import random
from itertools import product

from strongdeps.model import Package, PackageId, PackagePredicate, Repository, VersionConstraint
from strongdeps.parser import format_dependency_field
from strongdeps.version import version_compare

RELS = {
    "<<": lambda c: c < 0,
    "<=": lambda c: c <= 0,
    "=": lambda c: c == 0,
    ">=": lambda c: c >= 0,
    ">>": lambda c: c > 0,
}


def repo_from_spec(spec: dict) -> Repository:
    """``{"p": {"depends": [["q"], ["r", "s"]], "conflicts": [...], "provides": [...]}}``."""
    pkgs = []
    for key, fields in spec.items():
        name, _, version = key.partition("=")
        depends = tuple(
            tuple(PackagePredicate(t) for t in clause) for clause in fields.get("depends", ())
        )
        conflicts = tuple(PackagePredicate(t) for t in fields.get("conflicts", ()))
        pkgs.append(
            Package(PackageId(name, version or "1"), depends, conflicts, tuple(fields.get("provides", ())))
        )
    return Repository(pkgs)


def random_repository(rng: random.Random, max_packages: int = 12) -> Repository:
    """Small repository with disjunctions, conflicts, provides and versions."""
    n = rng.randint(1, max_packages)
    n_names = max(1, n - rng.randint(0, min(3, n - 1)))
    names = [f"n{i}" for i in range(n_names)]
    features = ["v0", "v1"]
    ids = [PackageId(names[i], "1") for i in range(n_names)]
    while len(ids) < n:
        name = rng.choice(names)
        version = str(len([p for p in ids if p.name == name]) + 1)
        ids.append(PackageId(name, version))
    rng.shuffle(ids)

    def pred():
        r = rng.random()
        if r < 0.12:
            return PackagePredicate(rng.choice(features))
        if r < 0.22:
            return PackagePredicate("missing")
        name = rng.choice(names)
        if rng.random() < 0.2:
            return PackagePredicate(name, VersionConstraint(rng.choice(list(RELS)), rng.choice("123")))
        return PackagePredicate(name)

    pkgs = []
    for pid in ids:
        depends = []
        for _ in range(rng.choice([0, 0, 1, 1, 2, 2, 3])):
            width = rng.choice([1, 1, 1, 2, 2, 3])
            depends.append(tuple(pred() for _ in range(width)))
        conflicts = tuple(pred() for _ in range(rng.choice([0, 0, 0, 0, 1, 1, 2])))
        provides = tuple(rng.sample(features, rng.choice([0, 0, 0, 0, 1])))
        pkgs.append(Package(pid, tuple(depends), conflicts, provides))
    return Repository(pkgs)


def packages_text(repo: Repository) -> str:
    out = []
    for pkg in repo:
        lines = [f"Package: {pkg.name}", f"Version: {pkg.version}"]
        if pkg.depends:
            lines.append("Depends: " + format_dependency_field(pkg.depends))
        if pkg.conflicts:
            lines.append("Conflicts: " + ", ".join(map(str, pkg.conflicts)))
        if pkg.provides:
            lines.append("Provides: " + ", ".join(pkg.provides))
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n"


def _satisfies(pred: PackagePredicate, pkg: Package) -> bool:
    if pred.name == pkg.name:
        if pred.constraint is None:
            return True
        c = version_compare(pkg.version, pred.constraint.version)
        return RELS[pred.constraint.relation](c)
    return pred.constraint is None and pred.name in pkg.provides


def healthy_installations(repo: Repository) -> list[frozenset[PackageId]]:
    """Every healthy installation, by enumerating all 2^n subsets (bitmasks)."""
    pkgs = list(repo)
    n = len(pkgs)
    clause_masks = []
    conflict_masks = []
    same_name = []
    for i, p in enumerate(pkgs):
        cm = []
        for clause in p.depends:
            m = 0
            for j, q in enumerate(pkgs):
                if any(_satisfies(pred, q) for pred in clause):
                    m |= 1 << j
            cm.append(m)
        clause_masks.append(cm)
        m = 0
        for j, q in enumerate(pkgs):
            if j != i and any(_satisfies(pred, q) for pred in p.conflicts):
                m |= 1 << j
        conflict_masks.append(m)
        m = 0
        for j, q in enumerate(pkgs):
            if j != i and q.name == p.name:
                m |= 1 << j
        same_name.append(m)
    out = []
    for mask in range(1 << n):
        ok = True
        for i in range(n):
            if not mask >> i & 1:
                continue
            if mask & (conflict_masks[i] | same_name[i]):
                ok = False
                break
            if any(not (mask & m) for m in clause_masks[i]):
                ok = False
                break
        if ok:
            out.append(frozenset(pkgs[i].id for i in range(n) if mask >> i & 1))
    return out


def oracle_strong_edges(repo: Repository) -> tuple[set[tuple[PackageId, PackageId]], set[PackageId]]:
    """(strong dependency edges, installable packages) by enumeration."""
    healthy = healthy_installations(repo)
    installable = set()
    edges = set()
    for p in repo.ids:
        with_p = [inst for inst in healthy if p in inst]
        if not with_p:
            continue
        installable.add(p)
        common = frozenset.intersection(*with_p)
        edges.update((p, q) for q in common if q != p)
    return edges, installable


def all_subsets(items):
    items = list(items)
    for bits in product([False, True], repeat=len(items)):
        yield {x for x, b in zip(items, bits) if b}


def synthetic_repository(n: int = 1000, seed: int = 0) -> Repository:
    """Layered desk-scale repository: ~5 dependency clauses per package.

    Targets are drawn from lower-numbered packages with a strong bias toward
    a small core, about a third of the clauses are disjunctions (some via
    virtual packages) and a few packages conflict with each other.
    """
    rng = random.Random(seed)
    ids = [PackageId(f"pkg{i:04d}", f"1.{i % 7}-{1 + i % 3}") for i in range(n)]
    n_virtual = 12
    pkgs = []
    for i, pid in enumerate(ids):
        depends = []
        if i > 0:
            seen = set()
            for _ in range(rng.randint(3, 7)):
                width = 1 if rng.random() < 0.65 else rng.choice([2, 2, 3])
                clause = []
                for _ in range(width):
                    if width > 1 and rng.random() < 0.15:
                        clause.append(PackagePredicate(f"virt{rng.randrange(n_virtual)}"))
                        continue
                    j = int(i * rng.random() ** 2.5)
                    target = ids[j]
                    constraint = None
                    if rng.random() < 0.1:
                        constraint = VersionConstraint(">=", "1.0")
                    clause.append(PackagePredicate(target.name, constraint))
                key = tuple(clause)
                if key not in seen:
                    seen.add(key)
                    depends.append(key)
        conflicts = ()
        if i > n // 2 and rng.random() < 0.05:
            # leaf-level conflicts only, so most of the repository stays installable
            conflicts = (PackagePredicate(ids[rng.randrange(n // 2, i)].name),)
        provides = ()
        if i > 5 and i % 9 == 0:
            provides = (f"virt{rng.randrange(n_virtual)}",)
        pkgs.append(Package(pid, tuple(depends), conflicts, provides))
    return Repository(pkgs)
