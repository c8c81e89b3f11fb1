"""Line-oriented cluster, class and config files, and the CSV writer."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

from .constellation import Cluster, PhysicalNode
from .errors import DomainError, ParseError
from .workload import Interval, TaskClass


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _number(value, key, no, source):
    try:
        x = float(value)
    except ValueError:
        raise ParseError(f"{key}={value!r} is not a number", no, source) from None
    if x != x or x in (float("inf"), float("-inf")):
        raise ParseError(f"{key}={value!r} is not finite", no, source)
    return x


def parse_interval(value, key="interval", no=None, source=None) -> Interval:
    """``lo:hi``, or a single number for a zero-width interval."""
    parts = value.split(":")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise ParseError(f"{key}={value!r} is not an interval lo:hi", no, source)
    lo, hi = (_number(p.strip(), key, no, source) for p in parts)
    try:
        return Interval(lo, hi)
    except DomainError as e:
        raise ParseError(f"{key}: {e}", no, source) from None


def parse_cluster(text: str, source="<cluster>", label=None) -> Cluster:
    """Parse ``node <id> [relay] cs=<Flops/s> [bw=<MB/s>]`` lines."""
    relay, neighbors, seen = None, [], set()
    for no, line in _lines(text):
        tokens = line.split()
        if tokens[0] != "node" or len(tokens) < 3:
            raise ParseError(f"expected 'node <id> cs=... [bw=...]', got {line!r}", no, source)
        node_id, is_relay, fields = tokens[1], False, {}
        if node_id in seen:
            raise ParseError(f"duplicate node id {node_id!r}", no, source)
        seen.add(node_id)
        for tok in tokens[2:]:
            if tok == "relay":
                is_relay = True
                continue
            key, sep, value = tok.partition("=")
            if not sep or key not in ("cs", "bw") or key in fields:
                raise ParseError(f"unexpected token {tok!r}", no, source)
            fields[key] = _number(value, key, no, source)
        if "cs" not in fields:
            raise ParseError(f"node {node_id!r} has no cs=", no, source)
        if is_relay and "bw" in fields:
            raise ParseError("the relay has no ISL to itself; drop bw=", no, source)
        if not is_relay and "bw" not in fields:
            raise ParseError(f"neighbor {node_id!r} needs bw=", no, source)
        try:
            node = PhysicalNode(fields["cs"], fields.get("bw"), node_id)
        except DomainError as e:
            raise ParseError(str(e), no, source) from None
        if is_relay:
            if relay is not None:
                raise ParseError("more than one relay", no, source)
            relay = node
        else:
            neighbors.append(node)
    if relay is None:
        raise ParseError("no node flagged 'relay'", None, source)
    return Cluster(relay, tuple(neighbors), label or str(source))


def load_cluster(path) -> Cluster:
    path = Path(path)
    return parse_cluster(path.read_text(), source=str(path), label=path.stem)


_CLASS_KEYS = ("gamma", "beta", "L", "ci")


def parse_classes(text: str, source="<classes>") -> list[TaskClass]:
    """Parse ``class <name> gamma=lo:hi beta=lo:hi L=lo:hi ci=lo:hi`` lines.

    Names may not contain spaces; use ``_`` (rendered as a space).
    """
    classes, seen = [], set()
    for no, line in _lines(text):
        tokens = line.split()
        if tokens[0] != "class" or len(tokens) < 2:
            raise ParseError(f"expected 'class <name> key=lo:hi ...', got {line!r}", no, source)
        name = tokens[1].replace("_", " ")
        if name in seen:
            raise ParseError(f"duplicate class {name!r}", no, source)
        seen.add(name)
        fields = {}
        for tok in tokens[2:]:
            key, sep, value = tok.partition("=")
            if not sep or key not in _CLASS_KEYS or key in fields:
                raise ParseError(f"unexpected token {tok!r}", no, source)
            fields[key] = parse_interval(value, key, no, source)
        missing = [k for k in _CLASS_KEYS if k not in fields]
        if missing:
            raise ParseError(f"class {name!r} missing {', '.join(missing)}", no, source)
        try:
            classes.append(TaskClass(name, fields["L"], fields["ci"], fields["gamma"], fields["beta"]))
        except DomainError as e:
            raise ParseError(str(e), no, source) from None
    if not classes:
        raise ParseError("no classes defined", None, source)
    return classes


def load_classes(path) -> list[TaskClass]:
    path = Path(path)
    return parse_classes(path.read_text(), source=str(path))


def parse_config(text: str, source="<config>") -> dict[str, tuple[str, int]]:
    """Flat ``key = value`` pairs; values keep their line number for errors."""
    out = {}
    for no, line in _lines(text):
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ParseError(f"expected 'key = value', got {line!r}", no, source)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", no, source)
        out[key] = (value, no)
    return out


def fmt(value) -> str:
    """Fixed CSV rendering: integers as-is, floats to 6 significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    """Write atomically: a failed write leaves no partial file behind."""
    path = Path(path)
    text = csv_text(header, rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
