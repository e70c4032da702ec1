"""Reader for the Debian ``Packages`` format (RFC-822-like stanzas)."""

from __future__ import annotations

import gzip
import io
import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass

from .model import Clause, Package, PackageId, PackagePredicate, Repository, VersionConstraint
from .version import VersionError, parse_version

__all__ = [
    "ParseError",
    "Stanza",
    "format_dependency_field",
    "iter_stanzas",
    "parse_conflicts_field",
    "parse_dependency_field",
    "parse_provides_field",
    "parse_repository",
]

log = logging.getLogger(__name__)

# "<" and ">" are the obsolete spellings of "<=" and ">=" found in old archives
_RELOPS = {"<<": "<<", "<=": "<=", "=": "=", ">=": ">=", ">>": ">>", "<": "<=", ">": ">="}
_TOKEN = re.compile(
    r"""\s*(?:
        (?P<name>[A-Za-z0-9][A-Za-z0-9+.\-_]*)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<comma>,)
      | (?P<bar>\|)
      | (?P<arch>[:\[\]!])
      | (?P<other>\S)
    )""",
    re.VERBOSE,
)
_RELOP = re.compile(r"\s*(<<|<=|>=|>>|=|<|>)")
_VERSION = re.compile(r"\s*([^\s()]+)")


class ParseError(ValueError):
    """Malformed metadata; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass
class Stanza:
    """One paragraph: field names are matched case-insensitively."""

    fields: dict[str, tuple[str, str, int]]  # lowercased -> (name, value, line)
    line: int

    def get(self, name: str, default: str | None = None) -> str | None:
        hit = self.fields.get(name.lower())
        return default if hit is None else hit[1]

    def line_of(self, name: str) -> int:
        return self.fields[name.lower()][2]

    def __contains__(self, name: str) -> bool:
        return name.lower() in self.fields


def _decode(data: bytes) -> str:
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        # latin-1 never fails; only ignored free-text fields carry such bytes
        return data.decode("latin-1")


def iter_stanzas(text: str) -> Iterator[Stanza]:
    fields: dict[str, tuple[str, str, int]] = {}
    start = 0
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            if fields:
                yield Stanza(fields, start)
            fields, current = {}, None
            continue
        if line.startswith("#") and current is None:
            continue
        if line[0] in " \t":
            if current is None:
                raise ParseError("continuation line outside a field", lineno)
            name, value, at = fields[current]
            fields[current] = (name, value + "\n" + line, at)
            continue
        if ":" not in line:
            raise ParseError(f"expected 'Field: value', got {line!r}", lineno)
        name, value = line.split(":", 1)
        if not fields:
            start = lineno
        current = name.strip().lower()
        fields[current] = (name.strip(), value.strip(), lineno)
    if fields:
        yield Stanza(fields, start)


def _position(text: str, offset: int, line: int | None) -> tuple[int | None, int]:
    before = text[:offset]
    nl = before.count("\n")
    col = offset - (before.rfind("\n") + 1) + 1
    return (None if line is None else line + nl), col


class _Lexer:
    def __init__(self, text: str, line: int | None):
        self.text = text
        self.line = line
        self.pos = 0
        self._peeked: tuple[str, str, int] | None = None

    def error(self, message: str, offset: int | None = None):
        line, col = _position(self.text, self.pos if offset is None else offset, self.line)
        return ParseError(message, line, col)

    def peek(self) -> tuple[str, str, int]:
        if self._peeked is None:
            m = _TOKEN.match(self.text, self.pos)
            if m is None:
                self._peeked = ("eof", "", len(self.text))
            else:
                kind = m.lastgroup
                self._peeked = (kind, m.group(kind), m.start(kind))
                self._end = m.end()
        return self._peeked

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != "eof":
            self.pos = self._end
        self._peeked = None
        return tok

    def relop_version(self) -> VersionConstraint:
        m = _RELOP.match(self.text, self.pos)
        if m is None:
            bad = (self.text[self.pos :].split() or [""])[0]
            raise self.error(f"unknown relation {bad!r}")
        self.pos = m.end()
        relation = _RELOPS[m.group(1)]
        m = _VERSION.match(self.text, self.pos)
        if m is None:
            raise self.error("missing version")
        try:
            parse_version(m.group(1))
        except VersionError as exc:
            raise self.error(str(exc), m.start(1)) from None
        self.pos = m.end()
        if self.next()[0] != "rparen":
            raise self.error("unbalanced parentheses: expected ')'")
        return VersionConstraint(relation, m.group(1))


def _predicate(lex: _Lexer) -> PackagePredicate:
    kind, value, at = lex.next()
    if kind != "name":
        if kind in ("comma", "bar", "eof"):
            raise lex.error("empty predicate", at)
        if kind == "rparen":
            raise lex.error("unbalanced parentheses: unexpected ')'", at)
        raise lex.error(f"unexpected {value!r}", at)
    constraint = None
    nk, nv, nat = lex.peek()
    if nk == "arch":
        raise lex.error(f"architecture qualifiers are not supported ({nv!r})", nat)
    if nk == "lparen":
        lex.next()
        constraint = lex.relop_version()
        nk, nv, nat = lex.peek()
        if nk == "arch":
            raise lex.error(f"architecture restrictions are not supported ({nv!r})", nat)
    elif nk == "other" and nv == "<":
        raise lex.error("build profiles are not supported", nat)
    return PackagePredicate(value, constraint)


def parse_dependency_field(text: str, line: int | None = None) -> tuple[Clause, ...]:
    """Parse ``a, b | c (<< 2)`` into CNF: ``((a,), (b, c<<2))``."""
    lex = _Lexer(text, line)
    if lex.peek()[0] == "eof":
        return ()
    clauses: list[Clause] = []
    while True:
        preds = [_predicate(lex)]
        while lex.peek()[0] == "bar":
            lex.next()
            preds.append(_predicate(lex))
        clauses.append(tuple(preds))
        kind, value, at = lex.next()
        if kind == "eof":
            return tuple(clauses)
        if kind != "comma":
            if kind == "rparen":
                raise lex.error("unbalanced parentheses: unexpected ')'", at)
            raise lex.error(f"expected ',' or '|', got {value!r}", at)


def parse_conflicts_field(text: str, line: int | None = None) -> tuple[PackagePredicate, ...]:
    clauses = parse_dependency_field(text, line)
    for clause in clauses:
        if len(clause) > 1:
            raise ParseError("alternatives are not allowed in Conflicts", line)
    return tuple(c[0] for c in clauses)


def parse_provides_field(text: str, line: int | None = None) -> tuple[str, ...]:
    """Provided feature names; any version qualifier is dropped."""
    return tuple(p.name for p in parse_conflicts_field(text, line))


def format_dependency_field(clauses) -> str:
    return ", ".join(" | ".join(str(p) for p in clause) for clause in clauses)


def _to_package(stanza: Stanza) -> Package | None:
    name, version = stanza.get("Package"), stanza.get("Version")
    if not name or not version:
        return None
    try:
        parse_version(version)
    except VersionError as exc:
        raise ParseError(str(exc), stanza.line_of("Version")) from None
    depends: list[Clause] = []
    for field in ("Pre-Depends", "Depends"):
        if field in stanza:
            depends.extend(parse_dependency_field(stanza.get(field), stanza.line_of(field)))
    conflicts: tuple[PackagePredicate, ...] = ()
    if "Conflicts" in stanza:
        conflicts = parse_conflicts_field(stanza.get("Conflicts"), stanza.line_of("Conflicts"))
    provides: tuple[str, ...] = ()
    if "Provides" in stanza:
        provides = parse_provides_field(stanza.get("Provides"), stanza.line_of("Provides"))
    return Package(PackageId(name, version), tuple(depends), conflicts, provides)


def parse_repository(data: bytes | str | io.IOBase) -> Repository:
    """Build a :class:`Repository` from a (possibly gzipped) Packages file.

    Stanzas lacking ``Package`` or ``Version`` are skipped; the
    resulting repository's ``diagnostics`` lists them, as well as
    duplicate ``(name, version)`` stanzas (the last one wins).
    """
    if hasattr(data, "read"):
        data = data.read()
    text = _decode(data) if isinstance(data, bytes) else data
    packages: dict[PackageId, Package] = {}
    diagnostics: list[str] = []
    for stanza in iter_stanzas(text):
        pkg = _to_package(stanza)
        if pkg is None:
            diagnostics.append(f"line {stanza.line}: stanza without Package/Version skipped")
            continue
        if pkg.id in packages:
            diagnostics.append(f"line {stanza.line}: duplicate {pkg.id}, keeping the last one")
            del packages[pkg.id]
        packages[pkg.id] = pkg
    for msg in diagnostics:
        log.warning(msg)
    repo = Repository(packages.values())
    repo.diagnostics = tuple(diagnostics)
    return repo
