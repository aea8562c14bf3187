"""Closed-form evaluators and numeric validators for the random-DAG analysis.

Three quantitative claims about Erdős-Rényi DAGs are implemented and checked
numerically:

1. every conditioning set of size n - 4 blocks every node-simple trail of
   length >= 7 (a counting consequence of colliders never being adjacent);
2. the expected number of node-distinct trails with k intermediate nodes
   between a fixed pair is k! * C(n-2, k) * p^(k+1), with a geometric upper
   bound p * (1 + (pn) + ... + (pn)^J);
3. the expected number of nodes that can act as colliders is
   sum_i P(Bin(i-1, p) >= 2), about 0.104 n at p = 1/n.

The binomial sum in (3) is the authoritative form; an algebraic "closed form"
of it circulates that does not match the sum, so it is provided separately and
the residual is reported rather than silently corrected.
"""

from __future__ import annotations

import graphlib
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial, sqrt

import numpy as np

from .dag import Dag, DagError, generate_er


@dataclass(frozen=True)
class ErParams:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise DagError(f"n must be >= 1, got {self.n}")
        if not (0.0 <= self.p <= 1.0):
            raise DagError(f"p must be in [0, 1], got {self.p}")


def expected_trails_upto(params: ErParams, max_len: int) -> float:
    """Expected number of node-distinct trails of length <= max_len between a
    fixed pair: sum over k = 0..max_len-1 of k! * C(n-2, k) * p^(k+1).

    Each term picks the k intermediate nodes, orders them, and pays p for each
    of the k+1 consecutive connections (each a distinct node pair, hence an
    independent edge coin regardless of orientation).
    """
    n, p = params.n, params.p
    if not (1 <= max_len <= n - 1):
        raise DagError(f"max_len must be in [1, n-1], got {max_len}")
    return sum(
        factorial(k) * comb(n - 2, k) * p ** (k + 1) for k in range(max_len)
    )


@dataclass(frozen=True)
class TrailsBound:
    geometric: float
    loose: float | None  # max_len * n^(max_len-1) * p^max_len, when p >= 1/n


def trails_bound(params: ErParams, max_len: int = 7) -> TrailsBound:
    """Geometric upper bound p * sum_{j=0}^{max_len-1} (pn)^j on the expected
    trail count, since k! * C(n-2, k) <= n^k.

    At p = 1/n the geometric form equals max_len / n.  The looser power form
    (7 n^6 p^7 for max_len 7) only holds once pn >= 1 and is None otherwise.
    The exact expectation is re-checked against the bound on every call.
    """
    n, p = params.n, params.p
    geometric = p * sum((p * n) ** j for j in range(max_len))
    loose = max_len * n ** (max_len - 1) * p ** max_len if p * n >= 1.0 else None
    if max_len <= n - 1:
        exact = expected_trails_upto(params, max_len)
        if exact > geometric * (1 + 1e-12) + 1e-12:
            raise AssertionError(
                f"exact expectation {exact} exceeds geometric bound {geometric}"
            )
    return TrailsBound(geometric=geometric, loose=loose)


def collider_probability(i: int, p: float) -> float:
    """P(node with label index i has >= 2 parents) = P(Bin(i-1, p) >= 2)."""
    if i < 1:
        raise DagError(f"label index must be >= 1, got {i}")
    if not (0.0 <= p <= 1.0):
        raise DagError(f"p must be in [0, 1], got {p}")
    if i <= 2:
        return 0.0
    q = 1.0 - p
    return max(0.0, 1.0 - q ** (i - 1) - (i - 1) * p * q ** (i - 2))


def expected_colliders(params: ErParams) -> float:
    """Expected number of potential-collider nodes: sum_{i=3}^{n} P(Bin(i-1,p) >= 2).

    Tends to (3/e - 1) * n ≈ 0.1036 n at p = 1/n.
    """
    if params.n < 3:
        return 0.0
    return sum(collider_probability(i, params.p) for i in range(3, params.n + 1))


def colliders_closed_form(params: ErParams) -> float:
    """The circulated algebraic form n(1-p)^n - (1-p)^n + 2((1-p)^n - 1)/p + n - p^2 + 1.

    Kept verbatim for comparison: it does *not* reproduce the binomial sum
    (see closed_form_residual); expected_colliders is the authoritative value.
    """
    n, p = params.n, params.p
    if p <= 0.0:
        raise DagError("closed form requires p > 0")
    q = 1.0 - p
    return n * q**n - q**n + 2.0 * (q**n - 1.0) / p + n - p**2 + 1.0


def closed_form_residual(params: ErParams) -> float:
    """colliders_closed_form minus expected_colliders (nonzero in general)."""
    return colliders_closed_form(params) - expected_colliders(params)


# ---------------------------------------------------------------------------
# Monte-Carlo estimators


@dataclass(frozen=True)
class McEstimate:
    mean: float
    se: float
    reps: int

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.mean - target) <= k * max(self.se, 1e-12)


def _count_simple_trails(dag: Dag, a: int, b: int, max_lens: tuple[int, ...]) -> tuple[int, ...]:
    """Count node-simple trails a..b for several length cutoffs in one DFS."""
    children, parents = dag.children, dag.parents
    top = max(max_lens)
    counts = [0] * len(max_lens)
    on_path = bytearray(dag.n)
    on_path[a] = 1

    def walk(u, depth):
        for w in children[u]:
            _go(w, depth)
        for w in parents[u]:
            _go(w, depth)

    def _go(w, depth):
        if on_path[w]:
            return
        d = depth + 1
        if w == b:
            for i, ml in enumerate(max_lens):
                if d <= ml:
                    counts[i] += 1
            return
        if d < top:
            on_path[w] = 1
            walk(w, d)
            on_path[w] = 0

    walk(a, 0)
    return tuple(counts)


def mc_trail_count(
    n: int, p: float, max_len, reps: int, seed=0
) -> "McEstimate | tuple[McEstimate, ...]":
    """Monte-Carlo mean count of node-simple trails between the first and last
    node over fresh ER draws.  ``max_len`` may be a tuple to share draws."""
    lens = (max_len,) if isinstance(max_len, int) else tuple(max_len)
    totals = np.zeros((reps, len(lens)), dtype=np.int64)
    for r in range(reps):
        dag = generate_er(n, p, (seed, r))
        totals[r] = _count_simple_trails(dag, 0, n - 1, lens)
    out = []
    for i in range(len(lens)):
        col = totals[:, i]
        mean = float(col.mean())
        se = float(col.std(ddof=1) / sqrt(reps)) if reps > 1 else float("inf")
        out.append(McEstimate(mean=mean, se=se, reps=reps))
    return out[0] if isinstance(max_len, int) else tuple(out)


def mc_collider_count(n: int, p: float, reps: int, seed=0) -> McEstimate:
    """Monte-Carlo mean of the number of nodes with in-degree >= 2."""
    counts = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        dag = generate_er(n, p, (seed, r))
        counts[r] = sum(1 for d in dag.in_degree if d >= 2)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / sqrt(reps)) if reps > 1 else float("inf")
    return McEstimate(mean=mean, se=se, reps=reps)


# ---------------------------------------------------------------------------
# Long-trail blocking verification


@dataclass
class Statement1Result:
    """Outcome of the long-trail blocking check.

    ``verified`` means every inspected node-simple trail of length >= min_len
    is blocked by every conditioning set of size n - deficit.  A breached step
    budget yields ``inconclusive`` (never a false "verified").
    """

    verified: bool
    inconclusive: bool
    counterexample: dict | None
    pairs_checked: int = 0
    completions_checked: int = 0
    pruned_subtrees: int = 0
    explicit_set_checks: int = 0
    steps: int = 0

    def __bool__(self):
        return self.verified and not self.inconclusive


def _descendant_masks(dag: Dag) -> list[int]:
    """masks[v] = bitmask of strict descendants of v."""
    ts = graphlib.TopologicalSorter(
        {v: dag.children[v] for v in range(dag.n)}
    )
    order = list(ts.static_order())  # children before parents
    masks = [0] * dag.n
    for v in order:
        m = 0
        for c in dag.children[v]:
            m |= (1 << c) | masks[c]
        masks[v] = m
    return masks


def _trail_blocked(interior, coll_flags, s_mask, desc) -> bool:
    """Standard per-trail rule: blocked iff some non-collider occurrence is in
    the set or some collider occurrence has neither itself nor a descendant in
    it."""
    for v, is_coll in zip(interior, coll_flags):
        bit = (s_mask >> v) & 1
        if is_coll:
            if not bit and not (desc[v] & s_mask):
                return True
        elif bit:
            return True
    return False


def check_statement1(
    dag: Dag,
    min_len: int = 7,
    max_len: int | None = None,
    pairs=None,
    deficit: int = 4,
    exhaustive_sets: bool = False,
    step_budget: int | None = None,
) -> Statement1Result:
    """Verify that every size-(n - deficit) set blocks every node-simple trail
    of length >= min_len between the given pairs (default: all pairs).

    A set of that size omits only deficit - 2 non-endpoint nodes, so any trail
    carrying >= deficit - 1 distinct non-collider intermediates is blocked by
    every such set; the search prunes a branch as soon as that many
    non-collider positions are fixed, which keeps the scan exhaustive without
    enumerating sets.  Trails that finish below the threshold (impossible for
    node-simple trails when min_len >= 2 * (deficit - 1) + 1, since colliders
    cannot sit adjacent) fall back to explicitly enumerating every candidate
    set.  ``exhaustive_sets=True`` disables the pruning shortcut and checks
    every set against every completed trail — slow, for cross-validation.
    """
    n = dag.n
    if n < min_len + 2:
        raise DagError(
            f"need n >= {min_len + 2} for a length-{min_len} trail plus "
            f"excluded endpoints, got n={n}"
        )
    if deficit < 2 or n - deficit < 0:
        raise DagError(f"deficit must be in [2, n], got {deficit}")
    if max_len is None:
        max_len = n - 1
    threshold = deficit - 1
    desc = _descendant_masks(dag)
    children, parents = dag.children, dag.parents
    all_pairs = pairs if pairs is not None else [
        (a, b) for a in range(n) for b in range(a + 1, n)
    ]

    res = Statement1Result(verified=True, inconclusive=False, counterexample=None)

    def check_completion(a, b, interior, coll_flags) -> bool:
        """Explicit enumeration of every size-(n - deficit) set; True if all block."""
        cand = [v for v in range(n) if v != a and v != b]
        full = sum(1 << v for v in cand)
        for excl in combinations(cand, deficit - 2):
            s_mask = full
            for v in excl:
                s_mask ^= 1 << v
            res.explicit_set_checks += 1
            if not _trail_blocked(interior, coll_flags, s_mask, desc):
                res.verified = False
                res.counterexample = {
                    "pair": (a, b),
                    "interior": list(interior),
                    "colliders": [v for v, f in zip(interior, coll_flags) if f],
                    "excluded": list(excl),
                }
                return False
        return True

    for a, b in all_pairs:
        res.pairs_checked += 1
        on_path = bytearray(n)
        on_path[a] = 1
        interior: list[int] = []
        coll_flags: list[bool] = []

        # DFS over (node, arrived-via-head-at-node); a node's interior status
        # becomes fixed the moment the walk leaves it.
        def extend(u, in_head, depth, ncount):
            if res.counterexample or res.inconclusive:
                return
            res.steps += 1
            if step_budget is not None and res.steps > step_budget:
                res.inconclusive = True
                return
            for w in children[u]:
                _leave(u, w, in_head, False, depth, ncount)
            for w in parents[u]:
                _leave(u, w, in_head, True, depth, ncount)

        def _leave(u, w, in_head, next_heads_u, depth, ncount):
            if on_path[w] or res.counterexample or res.inconclusive:
                return
            u_is_collider = in_head and next_heads_u
            if u != a:
                interior.append(u)
                coll_flags.append(u_is_collider)
                if not u_is_collider:
                    ncount += 1
            d = depth + 1
            if w == b:
                if d >= min_len:
                    res.completions_checked += 1
                    if ncount < threshold or exhaustive_sets:
                        check_completion(a, b, interior, coll_flags)
            elif d < max_len:
                if not exhaustive_sets and ncount >= threshold:
                    res.pruned_subtrees += 1
                else:
                    on_path[w] = 1
                    extend(w, not next_heads_u, d, ncount)
                    on_path[w] = 0
            if u != a:
                interior.pop()
                coll_flags.pop()

        extend(a, True, 0, 0)
        if res.counterexample or res.inconclusive:
            break

    if res.counterexample:
        res.verified = False
    return res
