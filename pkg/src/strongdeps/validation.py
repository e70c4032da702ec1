"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import os
from collections.abc import Iterable
from fractions import Fraction

from .model import InputError, PackageId, Repository
from .parser import parse_repository


def check_repository(X) -> Repository:
    """Accept a Repository, raw Packages bytes, or a path to a Packages file."""
    if isinstance(X, Repository):
        return X
    if isinstance(X, (bytes, bytearray)):
        return parse_repository(bytes(X))
    if isinstance(X, (str, os.PathLike)):
        if isinstance(X, str) and ("\n" in X or not os.path.exists(X)):
            if "Package:" in X or not X.strip():
                return parse_repository(X)
            raise FileNotFoundError(X)
        with open(X, "rb") as fh:
            return parse_repository(fh.read())
    if hasattr(X, "read"):
        return parse_repository(X.read())
    raise TypeError(f"expected a Repository, Packages data or a path, got {type(X).__name__}")


def check_package_ids(packages: Iterable, repo: Repository) -> list[PackageId]:
    """Resolve names (``name`` or ``name=version``) and ids against ``repo``."""
    if isinstance(packages, (str, PackageId)):
        packages = [packages]
    out = []
    for p in packages:
        if isinstance(p, PackageId):
            if p not in repo:
                raise InputError(f"unknown package {p}")
            out.append(p)
        else:
            out.append(repo.lookup(str(p)))
    return out


def check_fuzz(fuzz) -> Fraction:
    try:
        value = Fraction(str(fuzz)) if isinstance(fuzz, float) else Fraction(fuzz)
    except (TypeError, ValueError):
        raise ValueError(f"invalid fuzz {fuzz!r}") from None
    if value < 0:
        raise ValueError("fuzz must be >= 0")
    return value


def check_n_jobs(n_jobs) -> int:
    if n_jobs is None:
        return 1
    n = int(n_jobs)
    if n == -1:
        return os.cpu_count() or 1
    if n < 1:
        raise ValueError("n_jobs must be >= 1 (or -1 for all CPUs)")
    return n
