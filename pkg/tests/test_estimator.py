import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from helpers import packages_text, repo_from_spec
from strongdeps.estimator import StrongDependencyAnalyzer
from strongdeps.model import InputError
from strongdeps.validation import check_fuzz, check_n_jobs, check_repository

CHAIN = {"a": {"depends": [["b"]]}, "b": {"depends": [["c"]]}, "c": {}}


def test_params_and_clone():
    est = StrongDependencyAnalyzer(n_jobs=2, fuzz=10)
    assert est.get_params() == {"n_jobs": 2, "fuzz": 10, "rank_by": "delta"}
    other = clone(est).set_params(fuzz=0)
    assert other.fuzz == 0 and est.fuzz == 10


def test_fit_transform():
    repo = repo_from_spec(CHAIN)
    est = StrongDependencyAnalyzer().fit(repo)
    out = est.transform(["c", "a"])
    assert out.tolist() == [[1, 2, 1], [0, 0, 0]]
    assert out.dtype == np.int64
    assert list(est.get_feature_names_out()) == ["direct", "strong", "delta"]
    assert est.ranking(1)[0].package.name == "c"
    assert len(est.dominance().relation) == 3
    assert est.graph_stats()["strong (closed)"].edges == 3
    assert est.correlation().spearman_rho == pytest.approx(3**0.5 / 2)


def test_fit_accepts_text_bytes_and_path(tmp_path):
    text = packages_text(repo_from_spec(CHAIN))
    path = tmp_path / "Packages"
    path.write_text(text)
    for X in (text, text.encode(), str(path), path):
        est = StrongDependencyAnalyzer().fit(X)
        assert est.strong_graph_.num_edges == 3


def test_not_fitted_and_bad_params():
    with pytest.raises(NotFittedError):
        StrongDependencyAnalyzer().transform(["a"])
    with pytest.raises(ValueError):
        StrongDependencyAnalyzer(fuzz=-1).fit(repo_from_spec(CHAIN))
    with pytest.raises(ValueError):
        StrongDependencyAnalyzer(rank_by="x").fit(repo_from_spec(CHAIN))
    est = StrongDependencyAnalyzer().fit(repo_from_spec(CHAIN))
    with pytest.raises(InputError):
        est.transform(["zzz"])


def test_validation_helpers():
    assert check_n_jobs(None) == 1
    assert check_n_jobs(-1) >= 1
    with pytest.raises(ValueError):
        check_n_jobs(0)
    assert check_fuzz(0.5) * 2 == 1
    with pytest.raises(TypeError):
        check_repository(42)
    with pytest.raises(FileNotFoundError):
        check_repository("/no/such/file")
