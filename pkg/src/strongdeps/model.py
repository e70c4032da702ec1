"""Core package-universe types: packages, predicates, repositories."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import NamedTuple

from .version import version_compare

__all__ = [
    "RELATIONS",
    "InputError",
    "Installation",
    "Package",
    "PackageId",
    "PackagePredicate",
    "Repository",
    "VersionConstraint",
    "is_healthy",
]

RELATIONS = ("<<", "<=", "=", ">=", ">>")


class InputError(ValueError):
    """Raised when a query references something the repository lacks."""


class PackageId(NamedTuple):
    name: str
    version: str

    def __str__(self) -> str:
        return f"{self.name}={self.version}" if self.version else self.name


@dataclass(frozen=True)
class VersionConstraint:
    relation: str
    version: str

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    def admits(self, version: str) -> bool:
        c = version_compare(version, self.version)
        return {
            "<<": c < 0,
            "<=": c <= 0,
            "=": c == 0,
            ">=": c >= 0,
            ">>": c > 0,
        }[self.relation]

    def __str__(self) -> str:
        return f"({self.relation} {self.version})"


@dataclass(frozen=True)
class PackagePredicate:
    """A package name, optionally restricted to some versions.

    Unversioned predicates are also satisfied by any package providing the
    name; versioned ones only by real packages of that name.
    """

    name: str
    constraint: VersionConstraint | None = None

    def __str__(self) -> str:
        if self.constraint is None:
            return self.name
        return f"{self.name} {self.constraint}"


Clause = tuple[PackagePredicate, ...]


@dataclass(frozen=True)
class Package:
    id: PackageId
    depends: tuple[Clause, ...] = ()
    conflicts: tuple[PackagePredicate, ...] = ()
    provides: tuple[str, ...] = ()

    def __post_init__(self):
        name = self.id.name
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"invalid package name {name!r}")
        if any(len(clause) == 0 for clause in self.depends):
            raise ValueError(f"{self.id}: empty dependency clause")

    @property
    def name(self) -> str:
        return self.id.name

    @property
    def version(self) -> str:
        return self.id.version


class Repository:
    """An immutable, indexed set of packages.

    Package order is load order; every derived enumeration (matching,
    SAT variables, graph vertices) follows it.
    """

    def __init__(self, packages: Iterable[Package] = ()):
        by_id: dict[PackageId, Package] = {}
        for pkg in packages:
            # re-insertion keeps the later definition at the original slot
            by_id[pkg.id] = pkg
        self._packages = tuple(by_id.values())
        self._by_id = by_id
        self._index = {pid: i for i, pid in enumerate(by_id)}
        names: dict[str, list[PackageId]] = {}
        provides: dict[str, list[PackageId]] = {}
        for pkg in self._packages:
            names.setdefault(pkg.name, []).append(pkg.id)
            for feature in dict.fromkeys(pkg.provides):
                provides.setdefault(feature, []).append(pkg.id)
        self._names = {k: tuple(v) for k, v in names.items()}
        self._provides = {k: tuple(v) for k, v in provides.items()}
        self._match_cache: dict[PackagePredicate, tuple[PackageId, ...]] = {}
        self.diagnostics: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self._packages)

    def __iter__(self):
        return iter(self._packages)

    def __contains__(self, pid) -> bool:
        return pid in self._by_id

    def __getitem__(self, pid: PackageId) -> Package:
        try:
            return self._by_id[pid]
        except KeyError:
            raise InputError(f"unknown package {pid}") from None

    def __getstate__(self):
        return {"packages": self._packages, "diagnostics": self.diagnostics}

    def __setstate__(self, state):
        self.__init__(state["packages"])
        self.diagnostics = state["diagnostics"]

    @property
    def packages(self) -> tuple[Package, ...]:
        return self._packages

    @property
    def ids(self) -> tuple[PackageId, ...]:
        return tuple(self._by_id)

    def index(self, pid: PackageId) -> int:
        try:
            return self._index[pid]
        except KeyError:
            raise InputError(f"unknown package {pid}") from None

    def versions_of(self, name: str) -> tuple[PackageId, ...]:
        return self._names.get(name, ())

    def providers_of(self, feature: str) -> tuple[PackageId, ...]:
        return self._provides.get(feature, ())

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def lookup(self, name: str) -> PackageId:
        """Resolve ``name`` or ``name=version`` to a single package id."""
        if "=" in name:
            pname, version = name.split("=", 1)
            pid = PackageId(pname, version)
            if pid not in self._by_id:
                raise InputError(f"unknown package {name}")
            return pid
        ids = self._names.get(name, ())
        if not ids:
            raise InputError(f"unknown package {name}")
        if len(ids) > 1:
            raise InputError(f"ambiguous package name {name}: {len(ids)} versions")
        return ids[0]

    def label(self, pid: PackageId) -> str:
        """Short display label: the bare name when it is unique."""
        if len(self._names.get(pid.name, ())) == 1:
            return pid.name
        return str(pid)

    def matches(self, pred: PackagePredicate) -> tuple[PackageId, ...]:
        """All packages satisfying ``pred``, in load order."""
        hit = self._match_cache.get(pred)
        if hit is not None:
            return hit
        found = [
            pid
            for pid in self._names.get(pred.name, ())
            if pred.constraint is None or pred.constraint.admits(pid.version)
        ]
        if pred.constraint is None:
            found.extend(self._provides.get(pred.name, ()))
        hit = tuple(sorted(set(found), key=self._index.__getitem__))
        self._match_cache[pred] = hit
        return hit

    def clause_targets(self, clause: Clause) -> tuple[PackageId, ...]:
        """Packages satisfying at least one predicate of ``clause``."""
        seen: dict[PackageId, None] = {}
        for pred in clause:
            for pid in self.matches(pred):
                seen[pid] = None
        return tuple(sorted(seen, key=self._index.__getitem__))

    def conflict_targets(self, pid: PackageId) -> tuple[PackageId, ...]:
        """Packages ``pid`` explicitly conflicts with, itself excluded."""
        out: dict[PackageId, None] = {}
        for pred in self[pid].conflicts:
            for other in self.matches(pred):
                if other != pid:
                    out[other] = None
        return tuple(out)


@dataclass(frozen=True)
class Installation:
    members: frozenset[PackageId] = field(default_factory=frozenset)

    @classmethod
    def of(cls, repo: Repository, members: Iterable) -> Installation:
        """Build an installation, resolving names and validating ids."""
        out = set()
        for m in members:
            pid = m if isinstance(m, PackageId) else repo.lookup(m)
            if pid not in repo:
                raise InputError(f"unknown package {pid}")
            out.add(pid)
        return cls(frozenset(out))

    def __contains__(self, pid) -> bool:
        return pid in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def is_healthy(inst: Installation | Iterable[PackageId], repo: Repository) -> bool:
    """True iff every dependency holds and no conflict holds inside ``inst``."""
    members = inst.members if isinstance(inst, Installation) else frozenset(inst)
    for pid in members:
        if pid not in repo:
            raise InputError(f"unknown package {pid}")
    names: set[str] = set()
    for pid in members:
        if pid.name in names:
            return False
        names.add(pid.name)
    for pid in members:
        pkg = repo[pid]
        for clause in pkg.depends:
            if not any(t in members for t in repo.clause_targets(clause)):
                return False
        if any(t in members for t in repo.conflict_targets(pid)):
            return False
    return True
