"""Edge-list parsing and serialization, plus the bundled benchmark networks.

File format (UTF-8, line oriented):

    # comment — ignored, as are blank lines
    node NAME           optional pre-declaration; fixes node order
    NAME -> NAME        one directed edge per line

Names match ``[A-Za-z0-9_.-]+``.  Nodes not declared with a ``node`` line are
created in first-appearance order.  Duplicate edges, re-declarations, and
cycles are errors.  Ten real-world benchmark structures from the bnlearn
network repository ship under ``data/``.
"""

from __future__ import annotations

import re
from importlib import resources

from .dag import Dag, DagError

_NAME = r"[A-Za-z0-9_.-]+"
_NODE_RE = re.compile(rf"^node\s+({_NAME})$")
_EDGE_RE = re.compile(rf"^({_NAME})\s*->\s*({_NAME})$")

BUNDLED = (
    "alarm",
    "barley",
    "child",
    "ecoli70",
    "insurance",
    "magic-irri",
    "magic-niab",
    "mehra",
    "mildew",
    "water",
)


class ParseError(DagError):
    """A malformed edge-list file; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_edge_list(text: str) -> Dag:
    """Parse edge-list text into a Dag.

    Node indices follow declaration/first-appearance order, which downstream
    iteration orders (and therefore test counts) depend on; bundled files are
    frozen for that reason.
    """
    order: list[str] = []
    index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()

    def intern(name: str) -> int:
        i = index.get(name)
        if i is None:
            i = index[name] = len(order)
            order.append(name)
        return i

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _NODE_RE.match(line)
        if m:
            name = m.group(1)
            if name in index:
                raise ParseError(line_no, f"node {name!r} already declared")
            intern(name)
            continue
        m = _EDGE_RE.match(line)
        if m:
            t, h = m.group(1), m.group(2)
            if t == h:
                raise ParseError(line_no, f"self-loop on {t!r}")
            e = (intern(t), intern(h))
            if e in seen_edges:
                raise ParseError(line_no, f"duplicate edge {t} -> {h}")
            seen_edges.add(e)
            edges.append(e)
            continue
        raise ParseError(line_no, f"unrecognized syntax: {raw.strip()!r}")

    if not order:
        raise ParseError(0, "no nodes defined")
    # Dag construction performs the acyclicity check and names a back edge
    return Dag(n=len(order), edges=frozenset(edges), names=tuple(order))


def serialize(dag: Dag) -> str:
    """Canonical edge-list text; parsing it back reproduces the graph exactly
    (same node order, hence same indices)."""
    lines = [f"node {name}" for name in dag.names]
    for t, h in sorted(dag.edges):
        lines.append(f"{dag.names[t]} -> {dag.names[h]}")
    return "\n".join(lines) + "\n"


def load_file(path) -> Dag:
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f.read())


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise DagError(
            f"unknown bundled network {name!r}; available: {', '.join(BUNDLED)}"
        )
    return (
        resources.files("p3pc").joinpath("data", f"{name}.dag").read_text("utf-8")
    )


def load_bundled(name: str) -> Dag:
    """One of the ten bundled benchmark networks, by name."""
    return parse_edge_list(bundled_text(name))
