"""On-disk formats: quadruple records and the key=value run manifest."""
from __future__ import annotations

import os
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, Iterator, List, NamedTuple, TextIO, Tuple

__all__ = [
    "Entry",
    "format_entry",
    "parse_entry",
    "write_entries",
    "read_entries",
    "iter_entries",
    "parse_int",
    "read_manifest",
    "write_manifest",
    "fsync_file",
]


class Entry(NamedTuple):
    """A candidate quadruple (a, b, c, d) with d the regular extension of {a, b, c}."""

    a: int
    b: int
    c: int
    d: int


def format_entry(e: Tuple[int, int, int, int]) -> str:
    return f"{e[0]} {e[1]} {e[2]} {e[3]}\n"


def parse_entry(line: str) -> Entry:
    parts = line.split()
    if len(parts) != 4:
        raise ValueError(f"expected four integers, got {line!r}")
    return Entry(*(int(p) for p in parts))


def iter_entries(fh: TextIO) -> Iterator[Entry]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            yield parse_entry(line)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None


def read_entries(path: str) -> List[Entry]:
    with open(path, encoding="ascii") as fh:
        return list(iter_entries(fh))


def write_entries(path: str, entries: Iterable[Tuple[int, int, int, int]]) -> int:
    """Write records atomically; returns the number written."""
    tmp = f"{path}.tmp"
    n = 0
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        for e in entries:
            fh.write(format_entry(e))
            n += 1
        fsync_file(fh)
    os.replace(tmp, path)
    return n


def parse_int(text: str) -> int:
    """Parse ``"1300000000"`` or ``"1.3e9"`` exactly; non-integral values are rejected."""
    try:
        value = Decimal(text.strip().replace("_", ""))
    except InvalidOperation:
        raise ValueError(f"not a number: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


def fsync_file(fh) -> None:
    fh.flush()
    os.fsync(fh.fileno())


def read_manifest(path: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            out[key.strip()] = value.strip()
    return out


def write_manifest(path: str, fields: Dict[str, object]) -> None:
    """Atomic, fsync'd rewrite of a key=value manifest (insertion order kept)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in fields.items():
            fh.write(f"{key}={value}\n")
        fsync_file(fh)
    os.replace(tmp, path)
    dirfd = os.open(os.path.dirname(os.path.abspath(path)), os.O_RDONLY)
    try:
        os.fsync(dirfd)
    finally:
        os.close(dirfd)
