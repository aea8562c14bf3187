"""Immutable DAG representation, Erdős-Rényi generation, and trail enumeration.

Nodes are dense integer indices ``0..n-1``.  For generated graphs the index
order is the label order: an edge can only point from a smaller index to a
larger one.  Ingested graphs may have edges in either index direction but must
be acyclic.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Optional

import numpy as np


class DagError(ValueError):
    """Raised for structurally invalid graphs or malformed graph parameters."""


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph over nodes ``0..n-1``.

    Immutable after construction; adjacency views are computed lazily and
    cached, so instances are cheap to share across threads and runs.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise DagError(f"node count must be >= 1, got {self.n}")
        if not isinstance(self.edges, frozenset):
            object.__setattr__(self, "edges", frozenset(self.edges))
        for t, h in self.edges:
            if t == h:
                raise DagError(f"self-loop on node {t}")
            if not (0 <= t < self.n and 0 <= h < self.n):
                raise DagError(f"edge ({t}, {h}) out of range for n={self.n}")
        if not self.names:
            object.__setattr__(
                self, "names", tuple(f"v{i + 1}" for i in range(self.n))
            )
        if len(self.names) != self.n:
            raise DagError("names length must equal node count")
        if len(set(self.names)) != self.n:
            raise DagError("node names must be unique")
        self._check_acyclic()

    def _check_acyclic(self):
        ts = graphlib.TopologicalSorter()
        for i in range(self.n):
            ts.add(i)
        for t, h in self.edges:
            ts.add(h, t)
        try:
            ts.prepare()
        except graphlib.CycleError as exc:
            cycle = exc.args[1]
            raise DagError(
                f"graph contains a cycle: back edge "
                f"{self.names[cycle[1]]} -> {self.names[cycle[0]]}"
            ) from None

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """children[v] = sorted tuple of heads of edges leaving v."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for t, h in self.edges:
            out[t].append(h)
        return tuple(tuple(sorted(c)) for c in out)

    @cached_property
    def parents(self) -> tuple[tuple[int, ...], ...]:
        """parents[v] = sorted tuple of tails of edges entering v."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for t, h in self.edges:
            out[h].append(t)
        return tuple(tuple(sorted(p)) for p in out)

    @cached_property
    def in_degree(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parents)

    def name_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DagError(f"unknown node name {name!r}") from None

    def has_edge(self, tail: int, head: int) -> bool:
        return (tail, head) in self.edges

    def skeleton_edges(self) -> frozenset[tuple[int, int]]:
        """Undirected edge set as (min, max) pairs."""
        return frozenset((min(t, h), max(t, h)) for t, h in self.edges)

    def __repr__(self):  # the frozenset default is unreadable in test output
        return f"Dag(n={self.n}, m={len(self.edges)})"


def generate_er(n: int, p: float, seed) -> Dag:
    """Sample an Erdős-Rényi DAG: edge i->j present with probability p for i<j.

    Exactly C(n, 2) uniform draws are consumed, in (i, j) lexicographic order,
    so a fixed seed always yields the same graph regardless of p and partial
    replays stay aligned.
    """
    if n < 1:
        raise DagError(f"node count must be >= 1, got {n}")
    if not (0.0 <= p <= 1.0):
        raise DagError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    draws = rng.random(comb(n, 2))
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if draws[k] < p:
                edges.append((i, j))
            k += 1
    return Dag(n=n, edges=frozenset(edges))


@dataclass(frozen=True)
class Trail:
    """An alternating node/edge walk with all *edges* distinct.

    ``nodes`` is the visited sequence u_0..u_l and ``edges`` the l traversed
    directed edges; edge i connects nodes i-1 and i in either direction.  Nodes
    may repeat where edge-distinctness permits (the definition constrains
    edges, not nodes); enumerate_trails offers a node-simple mode for callers
    that need plain paths.
    """

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.edges) + 1 or not self.edges:
            raise DagError("trail must contain l >= 1 edges and l + 1 nodes")
        if len(set(self.edges)) != len(self.edges):
            raise DagError("trail edges must be distinct")
        for i, (t, h) in enumerate(self.edges):
            if {t, h} != {self.nodes[i], self.nodes[i + 1]}:
                raise DagError(f"edge {i} does not connect nodes {i} and {i + 1}")

    @property
    def length(self) -> int:
        return len(self.edges)

    @cached_property
    def collider_positions(self) -> frozenset[int]:
        """Positions i in 1..l-1 where node i is the head of both incident edges."""
        out = []
        for i in range(1, len(self.nodes) - 1):
            v = self.nodes[i]
            if self.edges[i - 1][1] == v and self.edges[i][1] == v:
                out.append(i)
        return frozenset(out)

    @cached_property
    def colliders(self) -> frozenset[int]:
        """Node ids occurring at a collider position."""
        return frozenset(self.nodes[i] for i in self.collider_positions)

    def reversed(self) -> "Trail":
        return Trail(self.nodes[::-1], self.edges[::-1])


def enumerate_trails(
    dag: Dag,
    a: int,
    b: int,
    max_len: int,
    node_simple: bool = False,
    limit: Optional[int] = None,
) -> list[Trail]:
    """All trails from a to b with length <= max_len, by depth-first search.

    Edge-distinctness is enforced with an explicit used-edge set; with
    ``node_simple=True`` intermediate nodes may not repeat either (endpoints
    included), which restricts the result to ordinary paths.  ``limit`` caps
    the number of returned trails (a safety valve for dense graphs); ``None``
    means no cap.
    """
    if a == b:
        raise DagError("trail endpoints must differ")
    if max_len < 1:
        raise DagError(f"max_len must be >= 1, got {max_len}")
    if not (0 <= a < dag.n and 0 <= b < dag.n):
        raise DagError("endpoint out of range")

    children, parents = dag.children, dag.parents
    out: list[Trail] = []
    used: set[tuple[int, int]] = set()
    node_path = [a]
    edge_path: list[tuple[int, int]] = []
    on_path = bytearray(dag.n)
    on_path[a] = 1

    def step(u: int):
        if limit is not None and len(out) >= limit:
            return
        for w in children[u]:
            _try(u, w, (u, w))
        for w in parents[u]:
            _try(u, w, (w, u))

    def _try(u: int, w: int, e: tuple[int, int]):
        if e in used:
            return
        if node_simple and on_path[w]:
            return
        used.add(e)
        node_path.append(w)
        edge_path.append(e)
        on_path[w] += 1
        if w == b and (limit is None or len(out) < limit):
            out.append(Trail(tuple(node_path), tuple(edge_path)))
        if len(edge_path) < max_len:
            # a trail may pass *through* an endpoint and end there later (only
            # edges must be distinct), so the walk continues past b; without
            # this, the a->b and b->a trail sets would not be reversals of
            # each other.  In node-simple mode revisits are excluded anyway.
            step(w)
        used.discard(e)
        node_path.pop()
        edge_path.pop()
        on_path[w] -= 1

    step(a)
    return out


def is_blocked(trail: Trail, s: frozenset[int] | set[int]) -> bool:
    """Occurrence-wise blocking rule without the descendant clause.

    A trail is blocked by ``s`` iff some intermediate occurrence is a
    non-collider in ``s`` or a collider outside ``s``.  This is the literal
    per-trail rule used in the large-set screening analysis; the dsep module's
    oracle (which does apply the descendant rule) is the authoritative CI
    decision.
    """
    ends = {trail.nodes[0], trail.nodes[-1]}
    if ends & set(s):
        raise DagError("conditioning set must exclude the trail endpoints")
    cpos = trail.collider_positions
    for i in range(1, len(trail.nodes) - 1):
        v = trail.nodes[i]
        if i in cpos:
            if v not in s:
                return True
        elif v in s:
            return True
    return False


def collider_nodes(dag: Dag) -> frozenset[int]:
    """Nodes that are colliders on some trail: exactly those with in-degree >= 2."""
    return frozenset(v for v in range(dag.n) if dag.in_degree[v] >= 2)
