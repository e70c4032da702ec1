"""Upgrade risk on a local installation, and forced upgrades between releases."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .analysis import impact_set
from .graph import StrongDepGraph
from .model import InputError, Installation

__all__ = [
    "RiskReport",
    "UpgradePlan",
    "forced_upgrades",
    "installation_impact_set",
    "read_name_list",
    "upgrade_risk",
    "upgrade_risk_report",
]


@dataclass(frozen=True)
class UpgradePlan:
    touched: frozenset = field(default_factory=frozenset)

    def validate(self, inst: Installation):
        missing = [p for p in self.touched if p not in inst]
        if missing:
            raise InputError("plan touches packages not installed: " + ", ".join(sorted(map(str, missing))))


def installation_impact_set(p, G: StrongDepGraph, inst: Installation) -> frozenset:
    """Installed packages that strongly depend on ``p`` (and ``p`` itself).

    An under-approximation: a package installed because it was picked among
    alternatives does not count, as strong dependencies ignore that choice.
    """
    if p not in inst:
        raise InputError(f"{p} is not installed")
    return impact_set(p, G) & inst.members


def upgrade_risk(plan: UpgradePlan, G: StrongDepGraph, inst: Installation) -> int:
    plan.validate(inst)
    return sum(len(installation_impact_set(p, G, inst)) for p in plan.touched)


@dataclass(frozen=True)
class RiskReport:
    impacts: dict  # package -> installation impact set size
    total: int

    def as_dict(self, label=str) -> dict:
        return {
            "packages": {label(p): n for p, n in self.impacts.items()},
            "total": self.total,
        }


def upgrade_risk_report(plan: UpgradePlan, G: StrongDepGraph, inst: Installation) -> RiskReport:
    plan.validate(inst)
    order = {v: i for i, v in enumerate(G.vertices)}
    impacts = {
        p: len(installation_impact_set(p, G, inst)) for p in sorted(plan.touched, key=order.__getitem__)
    }
    return RiskReport(impacts, sum(impacts.values()))


def _name(v) -> str:
    return v.name if hasattr(v, "name") else str(v)


def _vertex_by_name(G: StrongDepGraph) -> dict[str, list]:
    out: dict[str, list] = {}
    for v in G.vertices:
        out.setdefault(_name(v), []).append(v)
    return out


def forced_upgrades(
    old_G: StrongDepGraph,
    new_G: StrongDepGraph,
    targets: Iterable[str],
    previous: Iterable[str] | None = None,
) -> set[str]:
    """Names newly strongly required by ``targets`` in the new snapshot.

    Packages are matched across snapshots by name only.  The successors of
    the targets in the new graph are diffed against those of ``previous``
    in the old graph (default: the same names; a name absent from the old
    graph contributes nothing).  Passing ``previous=["apache"]`` with
    ``targets=["apache2"]`` evaluates a switch between alternatives.
    """
    targets = list(targets)
    new_by_name = _vertex_by_name(new_G)
    old_by_name = _vertex_by_name(old_G)
    missing = [t for t in targets if t not in new_by_name]
    if missing:
        raise InputError("targets not in the new snapshot: " + ", ".join(missing))

    def succ_names(G, by_name, names):
        out: set[str] = set()
        for name in names:
            for v in by_name.get(name, ()):
                out.update(map(_name, G.successors(v)))
        return out

    if previous is not None:
        return succ_names(new_G, new_by_name, targets) - succ_names(old_G, old_by_name, previous)
    forced: set[str] = set()
    for t in targets:
        forced |= succ_names(new_G, new_by_name, [t]) - succ_names(old_G, old_by_name, [t])
    return forced


def read_name_list(text: str) -> list[str]:
    """Names one per line; blank lines and ``#`` comments are skipped."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out
