"""Strong dependencies between packages of a Debian-style repository.

``p`` strongly depends on ``q`` when ``p`` is installable and every healthy
installation containing ``p`` also contains ``q``.
"""

from .analysis import (
    CorrelationStats,
    DominanceCluster,
    DominanceEdge,
    DominanceGraph,
    RemovabilityReport,
    SensitivityRecord,
    correlation_stats,
    direct_sensitivity,
    dominance_clusters,
    dominance_graph,
    impact_set,
    rank_sensitivity,
    relative_dominance,
    removability_check,
    sensitivity,
    sensitivity_table,
    strong_dominance,
    strong_successors,
)
from .engine import (
    conjunctive_closure,
    direct_dependency_graph,
    strong_dependencies,
    strong_dependencies_naive,
)
from .estimator import StrongDependencyAnalyzer
from .graph import DiGraph, StrongDepGraph, detransitivise, transitive_closure, transitive_reduction
from .graphstats import GraphStats, small_world_stats
from .model import (
    InputError,
    Installation,
    Package,
    PackageId,
    PackagePredicate,
    Repository,
    VersionConstraint,
    is_healthy,
)
from .parser import ParseError, parse_dependency_field, parse_repository
from .sat import NotInstallable, PackageSolver, install, is_installable, strong_dependency_query
from .upgrade import UpgradePlan, forced_upgrades, installation_impact_set, upgrade_risk, upgrade_risk_report
from .version import VersionError, version_compare

__version__ = "0.1.0"
