"""``strongdeps`` command line.

Exit status: 0 on success, 2 on input errors (unparsable metadata, unknown
packages, bad flags), 3 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import (
    DominanceGraph,
    correlation_stats,
    dominance_clusters,
    dominance_graph,
    rank_sensitivity,
    sensitivity_table,
)
from .engine import direct_dependency_graph, strong_dependencies
from .formats import (
    dominance_to_dot,
    graph_to_csv,
    graph_to_dot,
    graph_to_json,
    read_graph,
    sensitivity_to_csv,
)
from .graph import StrongDepGraph, detransitivise
from .graphstats import format_stats_table, small_world_stats
from .model import InputError, Installation, Repository
from .parser import ParseError, parse_repository
from .sat import Encoding
from .upgrade import UpgradePlan, forced_upgrades, read_name_list, upgrade_risk_report
from .validation import check_fuzz, check_n_jobs

log = logging.getLogger("strongdeps")

COMMANDS = ("strongdeps", "sensitivity", "dominance", "stats", "risk", "forced")


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    fuzz: Fraction = Fraction(5)
    jobs: int = 1
    format: str | None = None
    output: str | None = None
    extra: dict = field(default_factory=dict)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser, formats: tuple[str, ...], jobs: bool = True):
    p.add_argument("-f", "--format", choices=formats, default=formats[0], help=f"output format (default {formats[0]})")
    p.add_argument("-o", "--output", metavar="FILE", help="write to FILE instead of standard output")
    if jobs:
        p.add_argument("-j", "--jobs", type=int, default=1, metavar="N", help="worker processes (-1: all CPUs)")
    p.add_argument("-v", "--verbose", action="store_true", help="progress messages on standard error")


def _graph_option(p: argparse.ArgumentParser):
    p.add_argument(
        "--graph",
        metavar="FILE",
        help="reuse a strong dependency graph written by 'strongdeps' (dot, csv or json) instead of recomputing it",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="strongdeps",
        description="Strong dependencies between packages of a Debian-style repository.",
        epilog="With a file as first argument, 'strongdeps' is implied: strongdeps Packages.gz",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("strongdeps", help="compute the strong dependency graph")
    p.add_argument("packages", help="Packages file (plain or gzip)")
    _common(p, ("dot", "csv", "json"))
    p.add_argument("--dimacs", metavar="FILE", help="also dump the CNF encoding in DIMACS format")

    p = sub.add_parser("sensitivity", help="rank packages by strong vs direct sensitivity")
    p.add_argument("packages")
    _common(p, ("csv", "table", "json"))
    _graph_option(p)
    p.add_argument("--sort", choices=("delta", "strong"), default="delta", help="ranking key (default delta)")
    p.add_argument("--top", type=int, metavar="N", help="only the first N rows")

    p = sub.add_parser("dominance", help="relative strong dominance graph")
    p.add_argument("packages")
    _common(p, ("dot", "json"))
    _graph_option(p)
    p.add_argument("--fuzz", default="5", help="dominance threshold in percent (default 5)")
    p.add_argument("--top", type=int, metavar="N", help="restrict to the N most sensitive packages (by delta)")
    p.add_argument(
        "--min-cluster-size",
        type=int,
        default=1,
        metavar="K",
        help="drop dominance clusters with fewer than K packages (3 keeps non-trivial clusters only)",
    )

    p = sub.add_parser("stats", help="sensitivity correlation and small-world statistics")
    p.add_argument("packages")
    _common(p, ("table", "json"))
    _graph_option(p)

    p = sub.add_parser("risk", help="upgrade risk of a plan on a local installation")
    p.add_argument("packages")
    p.add_argument("--installed", required=True, metavar="FILE", help="installed packages, one per line")
    p.add_argument("--plan", required=True, metavar="FILE", help="packages touched by the upgrade, one per line")
    _common(p, ("json", "table"))
    _graph_option(p)

    p = sub.add_parser("forced", help="packages newly strongly required after a release upgrade")
    p.add_argument("old", help="Packages file of the current release")
    p.add_argument("new", help="Packages file of the next release")
    p.add_argument("targets", nargs="+", help="package names to upgrade")
    p.add_argument("--previous", nargs="+", metavar="NAME", help="compare against these names in the old release")
    _common(p, ("table", "json"))
    return parser


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _read_text(path: str) -> str:
    return _read_bytes(path).decode("utf-8")


def _load_repo(path: str) -> Repository:
    log.info("parsing %s", path)
    repo = parse_repository(_read_bytes(path))
    log.info("%d packages", len(repo))
    return repo


def _strong_graph(args, repo: Repository) -> StrongDepGraph:
    if getattr(args, "graph", None):
        G = read_graph(_read_text(args.graph))

        def resolve(v):
            # csv labels carry no version when the name is unique
            return v if v in repo else repo.lookup(v.name if not v.version else str(v))

        edges = [(resolve(u), resolve(v)) for u, v in G.edges()]
        broken = [resolve(v) for v in G.vertices if not G.is_installable(v)]
        # re-key to the repository order and add isolated packages
        return StrongDepGraph(repo.ids, edges, broken)
    return strong_dependencies(repo, n_jobs=check_n_jobs(args.jobs))


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for j, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    def clean(x):
        if isinstance(x, float) and math.isnan(x):
            return None
        if isinstance(x, dict):
            return {str(k): clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x

    return json.dumps(clean(obj), indent=1) + "\n"


def cmd_strongdeps(args) -> int:
    repo = _load_repo(args.packages)
    if args.dimacs:
        with open(args.dimacs, "w") as fh:
            fh.write(Encoding(repo).to_dimacs())
    G = strong_dependencies(repo, n_jobs=check_n_jobs(args.jobs))
    broken = len(G.uninstallable)
    print(f"{len(G)} vertices, {G.num_edges} edges, {broken} uninstallable", file=sys.stderr)
    writers = {"dot": graph_to_dot, "csv": graph_to_csv, "json": graph_to_json}
    _emit(args, writers[args.format](G))
    return 0


def cmd_sensitivity(args) -> int:
    repo = _load_repo(args.packages)
    G = _strong_graph(args, repo)
    records = rank_sensitivity(sensitivity_table(G, direct_dependency_graph(repo)), by=args.sort, label=G.label)
    if args.top is not None:
        records = records[: args.top]
    if args.format == "csv":
        _emit(args, sensitivity_to_csv(records, label=G.label))
    elif args.format == "table":
        rows = [[G.label(r.package), r.direct, r.strong, r.delta] for r in records]
        _emit(args, _table(["package", "direct", "strong", "delta"], rows))
    else:
        rows = [
            {"package": G.label(r.package), "direct": r.direct, "strong": r.strong, "delta": r.delta}
            for r in records
        ]
        _emit(args, _json(rows))
    return 0


def _filter_clusters(dom: DominanceGraph, min_size: int) -> DominanceGraph:
    if min_size <= 1:
        return dom
    keep = set()
    for c in dominance_clusters(dom):
        if c.size >= min_size:
            keep.update(c.nodes)
    classes = {rep: members for rep, members in dom.classes.items() if rep in keep}
    edges = [e for e in dom.edges if dom.node_of[e.dominator] in keep]
    return DominanceGraph(classes, edges, dom.relation, dom.node_of)


def cmd_dominance(args) -> int:
    fuzz = check_fuzz(args.fuzz)
    repo = _load_repo(args.packages)
    G = _strong_graph(args, repo)
    among = None
    if args.top is not None:
        ranked = rank_sensitivity(sensitivity_table(G, direct_dependency_graph(repo)), label=G.label)
        among = [r.package for r in ranked[: args.top]]
    dom = dominance_graph(G, fuzz, among=among)
    # a node with no edge at all is not part of any cluster
    linked = {n for a, b, _ in dom.node_edges() for n in (a, b)}
    dom = DominanceGraph({k: v for k, v in dom.classes.items() if k in linked}, dom.edges, dom.relation, dom.node_of)
    dom = _filter_clusters(dom, args.min_cluster_size)
    log.info("%d dominance nodes, %d edges", len(dom.classes), len(dom.edges))
    if args.format == "dot":
        _emit(args, dominance_to_dot(dom, label=G.label))
    else:
        payload = {
            "nodes": [[G.label(m) for m in members] for members in dom.classes.values()],
            "edges": [
                {
                    "dominator": G.label(e.dominator),
                    "dominated": G.label(e.dominated),
                    "z": float(e.z),
                }
                for e in dom.edges
            ],
        }
        _emit(args, _json(payload))
    return 0


def cmd_stats(args) -> int:
    repo = _load_repo(args.packages)
    G = _strong_graph(args, repo)
    DG = direct_dependency_graph(repo)
    records = sensitivity_table(G, DG)
    corr = correlation_stats(records) if len(records) >= 2 else None
    columns = {
        "Direct": small_world_stats(DG),
        "Strong": small_world_stats(detransitivise(G)),
        "Strong (closed)": small_world_stats(G),
    }
    if args.format == "json":
        payload = {
            "packages": len(repo),
            "correlation": None if corr is None else corr.__dict__,
            "graphs": {k: v.as_dict() for k, v in columns.items()},
        }
        _emit(args, _json(payload))
        return 0
    out = [f"Packages: {len(repo)}\n"]
    if corr is not None:
        rows = [
            ["Spearman rho", f"{corr.spearman_rho:.2f}"],
            ["Pearson r", f"{corr.pearson_r:.2f}"],
            ["Direct mean / std", f"{corr.direct_mean:.2f} / {corr.direct_std:.2f}"],
            ["Strong mean / std", f"{corr.strong_mean:.2f} / {corr.strong_std:.2f}"],
            ["Delta mean / std", f"{corr.delta_mean:.2f} / {corr.delta_std:.2f}"],
        ]
        rows += [[f"Delta within {k} std", f"{v:.1f}%"] for k, v in corr.delta_within.items()]
        out.append(_table(["Sensitivity", "value"], rows))
    out.append(format_stats_table(columns))
    _emit(args, "\n".join(out))
    return 0


def cmd_risk(args) -> int:
    repo = _load_repo(args.packages)
    inst = Installation.of(repo, read_name_list(_read_text(args.installed)))
    plan = UpgradePlan(frozenset(repo.lookup(n) for n in read_name_list(_read_text(args.plan))))
    G = _strong_graph(args, repo)
    report = upgrade_risk_report(plan, G, inst)
    if args.format == "json":
        _emit(args, _json(report.as_dict(G.label)))
    else:
        rows = [[G.label(p), n] for p, n in report.impacts.items()] + [["total", report.total]]
        _emit(args, _table(["package", "impact"], rows))
    return 0


def cmd_forced(args) -> int:
    old_G = strong_dependencies(_load_repo(args.old), n_jobs=check_n_jobs(args.jobs))
    new_G = strong_dependencies(_load_repo(args.new), n_jobs=check_n_jobs(args.jobs))
    forced = sorted(forced_upgrades(old_G, new_G, args.targets, previous=args.previous))
    if args.format == "json":
        _emit(args, _json({"targets": args.targets, "forced": forced}))
    else:
        _emit(args, "".join(f"{n}\n" for n in forced))
    return 0


HANDLERS = {
    "strongdeps": cmd_strongdeps,
    "sensitivity": cmd_sensitivity,
    "dominance": cmd_dominance,
    "stats": cmd_stats,
    "risk": cmd_risk,
    "forced": cmd_forced,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in COMMANDS and not argv[0].startswith("-"):
        argv.insert(0, "strongdeps")
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="strongdeps: %(message)s",
        stream=sys.stderr,
    )
    try:
        return HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"strongdeps: parse error: {exc}", file=sys.stderr)
        return 2
    except (InputError, ValueError) as exc:
        print(f"strongdeps: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"strongdeps: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
