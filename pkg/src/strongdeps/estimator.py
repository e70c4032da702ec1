from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analysis import (
    correlation_stats,
    dominance_graph,
    rank_sensitivity,
    sensitivity_table,
)
from .engine import direct_dependency_graph, strong_dependencies
from .graph import detransitivise
from .graphstats import small_world_stats
from .validation import check_fuzz, check_n_jobs, check_package_ids, check_repository


class StrongDependencyAnalyzer(TransformerMixin, BaseEstimator):
    """Strong dependency analysis of a package repository.

    ``fit`` takes a repository (a :class:`~strongdeps.model.Repository`,
    Packages bytes/text or a file path) and computes the direct and strong
    dependency graphs.  ``transform`` maps package names to rows of
    ``[direct sensitivity, strong sensitivity, delta]``.

    Parameters
    ----------
    n_jobs : int
        Worker processes for the strong dependency computation (-1: all CPUs).
    fuzz : number
        Relative dominance threshold, in percent, used by :meth:`dominance`.
    rank_by : {"delta", "strong"}
        Ordering used by :meth:`ranking`.
    """

    def __init__(self, n_jobs=1, fuzz=5, rank_by="delta"):
        self.n_jobs = n_jobs
        self.fuzz = fuzz
        self.rank_by = rank_by

    def fit(self, X, y=None):
        n_jobs = check_n_jobs(self.n_jobs)
        check_fuzz(self.fuzz)
        if self.rank_by not in ("delta", "strong"):
            raise ValueError(f"rank_by must be 'delta' or 'strong', got {self.rank_by!r}")
        repo = check_repository(X)
        self.repository_ = repo
        self.direct_graph_ = direct_dependency_graph(repo)
        self.strong_graph_ = strong_dependencies(repo, n_jobs=n_jobs)
        self.sensitivity_ = sensitivity_table(self.strong_graph_, self.direct_graph_)
        self.n_packages_ = len(repo)
        return self

    def transform(self, X):
        check_is_fitted(self, "strong_graph_")
        ids = check_package_ids(X, self.repository_)
        by_id = {r.package: r for r in self.sensitivity_}
        return np.array([[by_id[p].direct, by_id[p].strong, by_id[p].delta] for p in ids], dtype=np.int64).reshape(
            -1, 3
        )

    def get_feature_names_out(self, input_features=None):
        return np.array(["direct", "strong", "delta"], dtype=object)

    def ranking(self, top=None):
        check_is_fitted(self, "strong_graph_")
        ranked = rank_sensitivity(self.sensitivity_, by=self.rank_by, label=self.strong_graph_.label)
        return ranked if top is None else ranked[:top]

    def correlation(self):
        check_is_fitted(self, "strong_graph_")
        return correlation_stats(self.sensitivity_)

    def dominance(self, top=None):
        """Dominance graph at ``fuzz``, optionally among the ``top`` ranked packages."""
        check_is_fitted(self, "strong_graph_")
        among = None if top is None else [r.package for r in self.ranking(top)]
        return dominance_graph(self.strong_graph_, check_fuzz(self.fuzz), among=among)

    def graph_stats(self):
        check_is_fitted(self, "strong_graph_")
        return {
            "direct": small_world_stats(self.direct_graph_),
            "strong (detransitivised)": small_world_stats(detransitivise(self.strong_graph_)),
            "strong (closed)": small_world_stats(self.strong_graph_),
        }
