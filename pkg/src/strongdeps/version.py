"""Debian version string comparison.

Versions have the form ``[epoch:]upstream[-revision]``.  Comparison follows
the dpkg algorithm: epochs numerically, then upstream and revision by
alternating non-digit / digit runs, where ``~`` sorts before everything
(including the end of the string) and letters sort before non-letters.
"""

from __future__ import annotations

import functools
import re

__all__ = ["VersionError", "parse_version", "version_compare", "version_key"]

_UPSTREAM_RE = re.compile(r"^[A-Za-z0-9.+~:-]+$")
_REVISION_RE = re.compile(r"^[A-Za-z0-9.+~]+$")


class VersionError(ValueError):
    """Raised for a malformed version string."""

    def __init__(self, version: str, reason: str):
        super().__init__(f"invalid version {version!r}: {reason}")
        self.version = version


@functools.lru_cache(maxsize=65536)
def parse_version(version: str) -> tuple[int, str, str]:
    """Split ``version`` into ``(epoch, upstream, revision)``."""
    if not isinstance(version, str):
        raise VersionError(str(version), "not a string")
    text = version.strip()
    if not text or any(c.isspace() for c in text):
        raise VersionError(version, "empty or contains whitespace")
    epoch = 0
    if ":" in text:
        head, text = text.split(":", 1)
        if not head.isdigit():
            raise VersionError(version, "epoch is not a number")
        epoch = int(head)
    revision = ""
    if "-" in text:
        text, revision = text.rsplit("-", 1)
        if not _REVISION_RE.match(revision):
            raise VersionError(version, "bad revision")
    if not text:
        raise VersionError(version, "empty upstream version")
    # dpkg only warns when upstream does not start with a digit
    if not _UPSTREAM_RE.match(text):
        raise VersionError(version, "bad upstream version")
    return epoch, text, revision


def _order(c: str) -> int:
    if c == "~":
        return -1
    if c.isdigit():
        return 0
    if c.isalpha():
        return ord(c)
    return ord(c) + 256


def _verrevcmp(a: str, b: str) -> int:
    i = j = 0
    la, lb = len(a), len(b)
    while i < la or j < lb:
        first_diff = 0
        while (i < la and not a[i].isdigit()) or (j < lb and not b[j].isdigit()):
            ac = _order(a[i]) if i < la else 0
            bc = _order(b[j]) if j < lb else 0
            if ac != bc:
                return ac - bc
            i += 1
            j += 1
        while i < la and a[i] == "0":
            i += 1
        while j < lb and b[j] == "0":
            j += 1
        while i < la and a[i].isdigit() and j < lb and b[j].isdigit():
            if not first_diff:
                first_diff = ord(a[i]) - ord(b[j])
            i += 1
            j += 1
        if i < la and a[i].isdigit():
            return 1
        if j < lb and b[j].isdigit():
            return -1
        if first_diff:
            return first_diff
    return 0


def version_compare(a: str, b: str) -> int:
    """Compare two Debian versions; returns -1, 0 or 1."""
    ea, ua, ra = parse_version(a)
    eb, ub, rb = parse_version(b)
    if ea != eb:
        return -1 if ea < eb else 1
    r = _verrevcmp(ua, ub) or _verrevcmp(ra, rb)
    return (r > 0) - (r < 0)


version_key = functools.cmp_to_key(version_compare)
