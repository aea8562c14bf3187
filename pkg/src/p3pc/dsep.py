"""Exact conditional-independence oracle via d-separation, with query counting.

Every CI decision in this package is answered graphically: ``a`` and ``b`` are
conditionally independent given ``S`` exactly when they are d-separated in the
ground-truth DAG.  The oracle counts each query it answers, which is the
measurement every experiment reports.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .dag import Dag, DagError


@dataclass(frozen=True)
class CiQuery:
    """A single conditional-independence question: a independent of b given s?"""

    a: int
    b: int
    s: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.s, frozenset):
            object.__setattr__(self, "s", frozenset(self.s))
        if self.a == self.b:
            raise DagError("query endpoints must differ")
        if self.a in self.s or self.b in self.s:
            raise DagError("conditioning set must exclude the queried pair")

    def validate_against(self, dag: Dag):
        for v in (self.a, self.b, *self.s):
            if not (0 <= v < dag.n):
                raise DagError(f"node {v} out of range for n={dag.n}")


def _separated(dag: Dag, a: int, b: int, s) -> bool:
    """Reachability core: True iff no active trail connects a and b given s.

    Two phases: mark the ancestors of s (these activate colliders), then walk
    (node, direction) states breadth-first — "up" states may turn anywhere
    outside s, "down" states continue down outside s and may turn up at
    ancestors of s.  Linear in nodes + edges per query.
    """
    n = dag.n
    children = dag.children
    parents = dag.parents

    in_s = bytearray(n)
    for v in s:
        in_s[v] = 1
    if in_s[a] or in_s[b]:
        raise DagError("conditioning set must exclude the queried pair")

    # ancestors of s, including s itself
    anc = bytearray(n)
    stack = [v for v in s]
    while stack:
        v = stack.pop()
        if not anc[v]:
            anc[v] = 1
            stack.extend(parents[v])

    # states are v*2 (travelling up, i.e. arrived from a child or the start)
    # and v*2+1 (travelling down, arrived from a parent)
    seen = bytearray(2 * n)
    seen[a * 2] = 1
    frontier = [a * 2]
    push = frontier.append
    while frontier:
        state = frontier.pop()
        v, down = divmod(state, 2)
        if v == b:
            return False
        if not down:
            if in_s[v]:
                continue
            for w in parents[v]:
                if not seen[w * 2]:
                    seen[w * 2] = 1
                    push(w * 2)
            for w in children[v]:
                if not seen[w * 2 + 1]:
                    seen[w * 2 + 1] = 1
                    push(w * 2 + 1)
        else:
            if not in_s[v]:
                for w in children[v]:
                    if not seen[w * 2 + 1]:
                        seen[w * 2 + 1] = 1
                        push(w * 2 + 1)
            if anc[v]:
                for w in parents[v]:
                    if not seen[w * 2]:
                        seen[w * 2] = 1
                        push(w * 2)
    return True


def d_separated(dag: Dag, query, b=None, s=None) -> bool:
    """True iff the pair is d-separated in ``dag`` given the conditioning set.

    Accepts either a CiQuery (``d_separated(dag, q)``) or the unpacked form
    ``d_separated(dag, a, b, s)``.
    """
    if isinstance(query, CiQuery):
        query.validate_against(dag)
        return _separated(dag, query.a, query.b, query.s)
    a = query
    if b is None:
        raise DagError("missing second endpoint")
    s = () if s is None else s
    q = CiQuery(a, b, frozenset(s))
    q.validate_against(dag)
    return _separated(dag, q.a, q.b, q.s)


class CountingOracle:
    """Answers CI queries against a fixed DAG, counting every query issued.

    The counter increases by exactly one per ``query`` call and is safe to
    update from concurrent workers.  With ``memo=True`` repeated identical
    queries are answered from a cache — the counter still advances, so
    reported test counts are unaffected; memoization only saves recomputation.
    """

    def __init__(self, dag: Dag, memo: bool = False, log_queries: bool = False):
        self.dag = dag
        self._count = 0
        self._lock = threading.Lock()
        self._cache: dict | None = {} if memo else None
        self.query_log: list | None = [] if log_queries else None

    @property
    def queries_issued(self) -> int:
        return self._count

    def checkpoint(self) -> int:
        """Current counter value; callers subtract checkpoints to get deltas."""
        return self._count

    def query(self, a, b=None, s=()) -> bool:
        """Answer a ⊥ b | s and count it.  Also accepts a CiQuery."""
        if isinstance(a, CiQuery):
            a, b, s = a.a, a.b, a.s
        with self._lock:
            self._count += 1
            if self.query_log is not None:
                self.query_log.append((a, b, tuple(s)))
        if self._cache is None:
            return _separated(self.dag, a, b, s)
        key = (a, b, s) if type(s) is tuple else (a, b, tuple(sorted(s)))
        if key[0] > key[1]:
            key = (b, a, key[2])
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        ans = _separated(self.dag, a, b, s)
        with self._lock:
            self._cache[key] = ans
        return ans


def query(oracle: CountingOracle, q: CiQuery) -> bool:
    """Functional form of CountingOracle.query."""
    return oracle.query(q)
