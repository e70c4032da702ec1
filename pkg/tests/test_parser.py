import gzip

import pytest
from hypothesis import given, strategies as st

from helpers import packages_text, random_repository
from strongdeps.engine import direct_dependency_graph
from strongdeps.model import PackageId, PackagePredicate, VersionConstraint
from strongdeps.parser import (
    ParseError,
    format_dependency_field,
    iter_stanzas,
    parse_dependency_field,
    parse_repository,
)

POSTFIX = """\
Package: postfix
Version: 2.5.5-1.1
Depends: libc6 (>= 2.7-1), libdb4.6, ssl-cert,
  libsasl2-2, libssl0.9.8 (>= 0.9.8f-5),
  debconf (>= 0.5) | debconf-2.0,
  netbase, adduser (>= 3.48), dpkg (>= 1.8.3),
  lsb-base (>= 3.0-6)
Conflicts: libnss-db (<< 2.2-3), smail,
  mail-transport-agent, postfix-tls
Provides: mail-transport-agent, postfix-tls
"""


def P(name, rel=None, version=None):
    return PackagePredicate(name, VersionConstraint(rel, version) if rel else None)


def test_postfix_stanza():
    repo = parse_repository(POSTFIX)
    (pkg,) = repo.packages
    assert pkg.id == PackageId("postfix", "2.5.5-1.1")
    assert len(pkg.depends) == 10
    assert pkg.depends[5] == (P("debconf", ">=", "0.5"), P("debconf-2.0"))
    assert pkg.depends[0] == (P("libc6", ">=", "2.7-1"),)
    assert len(pkg.conflicts) == 4
    assert pkg.conflicts[0] == P("libnss-db", "<<", "2.2-3")
    assert pkg.provides == ("mail-transport-agent", "postfix-tls")


def test_postfix_direct_out_degree():
    targets = [
        "libc6 2.7-1", "libdb4.6 1", "ssl-cert 1", "libsasl2-2 1", "libssl0.9.8 0.9.8g-1",
        "debconf 1.5", "cdebconf 0.1", "netbase 1", "adduser 3.50", "dpkg 1.14", "lsb-base 3.2",
    ]
    stanzas = [POSTFIX]
    for t in targets:
        name, version = t.split()
        extra = "Provides: debconf-2.0\n" if name == "cdebconf" else ""
        stanzas.append(f"Package: {name}\nVersion: {version}\n{extra}")
    repo = parse_repository("\n".join(stanzas))
    DG = direct_dependency_graph(repo)
    postfix = PackageId("postfix", "2.5.5-1.1")
    # one match per predicate, plus the provider of debconf-2.0
    assert len(DG.successors(postfix)) == 11


def test_empty_input():
    assert len(parse_repository(b"")) == 0
    assert len(parse_repository("\n\n")) == 0


@pytest.mark.parametrize(
    "text,expected",
    [
        ("q, r", ((P("q"),), (P("r"),))),
        ("", ()),
        ("q | r", ((P("q"), P("r")),)),
        ("a, b | c (<< 2)", ((P("a"),), (P("b"), P("c", "<<", "2")))),
        ("  a(>=1:2.0~rc1)  ,b", ((P("a", ">=", "1:2.0~rc1"),), (P("b"),))),
    ],
)
def test_dependency_field(text, expected):
    assert parse_dependency_field(text) == expected


def test_legacy_relations_read_as_inclusive():
    assert parse_dependency_field("a (< 2), b (> 1)") == ((P("a", "<=", "2"),), (P("b", ">=", "1"),))


@pytest.mark.parametrize(
    "text,column",
    [
        ("a (>= 1", 8),
        ("a, , b", 4),
        ("a (~= 1)", 4),
        ("a | ", 5),
        ("a)", 2),
    ],
)
def test_errors_carry_column(text, column):
    with pytest.raises(ParseError) as info:
        parse_dependency_field(text)
    assert info.value.column == column


@pytest.mark.parametrize("text", ["libc6:any", "libc6 [i386]", "a (>= 1) [amd64]", "a <!nocheck>"])
def test_arch_qualifiers_rejected(text):
    with pytest.raises(ParseError, match="not supported"):
        parse_dependency_field(text)


def test_error_reports_line_in_file():
    text = "Package: a\nVersion: 1\n\nPackage: b\nVersion: 1\nDepends: x,\n  (y\n"
    with pytest.raises(ParseError) as info:
        parse_repository(text)
    assert info.value.line == 7


def test_missing_fields_skipped_with_diagnostic(caplog):
    text = "Package: a\nVersion: 1\n\nPackage: b\n\nVersion: 3\n"
    repo = parse_repository(text)
    assert repo.ids == (PackageId("a", "1"),)
    assert len(repo.diagnostics) == 2


def test_duplicates_last_wins():
    text = "Package: a\nVersion: 1\nDepends: b\n\nPackage: b\nVersion: 1\n\nPackage: a\nVersion: 1\n"
    repo = parse_repository(text)
    assert repo[PackageId("a", "1")].depends == ()
    assert len(repo) == 2
    assert any("duplicate" in d for d in repo.diagnostics)


def test_pre_depends_merged_and_unknown_fields_ignored():
    text = (
        "Package: a\nVersion: 1\nPre-Depends: dpkg\nDepends: b\n"
        "Recommends: c\nSuggests: d\nX-Thing: \xe9t\xe9\n"
    )
    (pkg,) = parse_repository(text.encode("latin-1")).packages
    assert pkg.depends == ((P("dpkg"),), (P("b"),))


def test_gzip_and_plain_agree():
    plain = parse_repository(POSTFIX.encode())
    packed = parse_repository(gzip.compress(POSTFIX.encode()))
    assert plain.packages == packed.packages


def test_case_insensitive_fields_and_continuations():
    stanzas = list(iter_stanzas("package: a\nVERSION: 1\ndepends: b,\n c\n"))
    assert stanzas[0].get("Depends") == "b,\n c"
    (pkg,) = parse_repository("package: a\nVERSION: 1\ndepends: b,\n c\n").packages
    assert len(pkg.depends) == 2


_name = st.from_regex(r"[a-z0-9][a-z0-9+.\-]{0,6}", fullmatch=True)
_ver = st.from_regex(r"[0-9][0-9a-z.+~]{0,4}(-[0-9a-z.+~]{1,3})?", fullmatch=True)
_pred = st.builds(
    lambda n, c: PackagePredicate(n, c),
    _name,
    st.one_of(st.none(), st.builds(VersionConstraint, st.sampled_from(["<<", "<=", "=", ">=", ">>"]), _ver)),
)
_formula = st.lists(st.lists(_pred, min_size=1, max_size=3).map(tuple), max_size=5).map(tuple)


@given(_formula)
def test_round_trip(formula):
    assert parse_dependency_field(format_dependency_field(formula)) == formula


def test_repository_round_trip():
    import random

    rng = random.Random(7)
    for _ in range(50):
        repo = random_repository(rng)
        again = parse_repository(packages_text(repo))
        assert again.packages == repo.packages
