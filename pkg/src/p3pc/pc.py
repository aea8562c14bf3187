"""PC skeleton search with exact test accounting.

The adjacency phase of PC: starting from an undirected graph (complete, or
seeded by the pre-processing screen), repeatedly try to separate adjacent
pairs with conditioning sets of growing size, deleting edges as independencies
are found.  Iteration order is pinned so that test counts are reproducible:

* levels run l = 0, 1, 2, ... and stop when no ordered adjacent pair (a, b)
  has |adj(a) \\ {b}| >= l;
* ordered pairs iterate lexicographically by index — both (a, b) and (b, a)
  are attempted, each drawing candidate sets from its own side's adjacency;
* size-l subsets of adj(a) \\ {b} iterate in lexicographic combination order
  over the candidates sorted by index;
* candidate sets are read from an adjacency snapshot fixed at the start of
  each level, while deletions take effect immediately for skipping pairs
  already separated — so within a level the work done for a pair does not
  depend on which other pairs were separated first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .dag import DagError
from .dsep import CountingOracle


class Skeleton:
    """Mutable undirected adjacency over n nodes plus separating-set records.

    ``sepsets`` maps an unordered pair (as an index-sorted tuple) to the
    conditioning set that separated it.  Pairs absent from the initial
    adjacency never get an entry.
    """

    __slots__ = ("n", "_adj", "sepsets")

    def __init__(self, n: int, edges=(), sepsets=None):
        if n < 1:
            raise DagError(f"node count must be >= 1, got {n}")
        self.n = n
        self._adj: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            self.add_edge(a, b)
        self.sepsets: dict[tuple[int, int], frozenset[int]] = dict(sepsets or {})

    def add_edge(self, a: int, b: int):
        if a == b:
            raise DagError("no self-adjacency")
        if not (0 <= a < self.n and 0 <= b < self.n):
            raise DagError(f"edge ({a}, {b}) out of range")
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, a: int, b: int):
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def neighbors(self, a: int) -> list[int]:
        return sorted(self._adj[a])

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (a, b) for a in range(self.n) for b in self._adj[a] if a < b
        )

    def edge_count(self) -> int:
        return sum(len(s) for s in self._adj) // 2

    def copy(self) -> "Skeleton":
        return Skeleton(self.n, self.edge_set(), self.sepsets)

    def __eq__(self, other):
        return (
            isinstance(other, Skeleton)
            and self.n == other.n
            and self.edge_set() == other.edge_set()
        )

    def __repr__(self):
        return f"Skeleton(n={self.n}, m={self.edge_count()})"


def complete_skeleton(n: int) -> Skeleton:
    """The complete undirected graph on n nodes, no sepsets."""
    sk = Skeleton(n)
    for a in range(n):
        for b in range(a + 1, n):
            sk.add_edge(a, b)
    return sk


@dataclass
class PcReport:
    skeleton: Skeleton
    tests_performed: int
    max_level_reached: int = field(default=0)


def pc_skeleton(oracle: CountingOracle, initial: Skeleton) -> PcReport:
    """Run the PC adjacency search from ``initial`` against ``oracle``.

    ``initial`` is not mutated.  ``tests_performed`` is the oracle counter
    delta for this call; ``max_level_reached`` is the largest level at which
    at least one query was issued (-1 if none were).
    """
    if initial.n != oracle.dag.n:
        raise DagError(
            f"skeleton has {initial.n} nodes but oracle DAG has {oracle.dag.n}"
        )
    sk = initial.copy()
    adj = sk._adj
    start = oracle.checkpoint()
    query = oracle.query

    level = 0
    max_level = -1
    while True:
        any_eligible = False
        snapshot = [sorted(s) for s in adj]
        for a in range(sk.n):
            for b in snapshot[a]:
                if b not in adj[a]:  # removed earlier in this same pass
                    continue
                cand = [v for v in snapshot[a] if v != b]
                if len(cand) < level:
                    continue
                any_eligible = True
                max_level = level
                for s in combinations(cand, level):
                    if query(a, b, s):
                        sk.remove_edge(a, b)
                        sk.sepsets[(a, b) if a < b else (b, a)] = frozenset(s)
                        break
        if not any_eligible:
            break
        level += 1

    return PcReport(
        skeleton=sk,
        tests_performed=oracle.checkpoint() - start,
        max_level_reached=max_level,
    )
