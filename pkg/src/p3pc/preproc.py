"""Large-conditioning-set pre-processing screen, and the combined pipeline.

For every variable pair the screen runs one marginal test and then up to c1
tests on uniformly random conditioning sets of size n - c2 drawn from the
remaining variables, stopping at the first independence.  The result is a
binary matrix p (0 = pair separable) that seeds the PC search, which then
only has to resolve the pairs the screen left connected.

Each pair's random draws come from an RNG stream derived from (seed, a, b)
alone, so pair order — and therefore parallel execution — cannot change the
result, and sets are drawn lazily so RNG consumption always matches the tests
actually performed.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dag import DagError
from .dsep import CountingOracle
from .pc import Skeleton, complete_skeleton, pc_skeleton
from .reports import RunReport


class ConfigError(DagError):
    """Invalid pre-processing parameters."""


@dataclass(frozen=True)
class PreprocConfig:
    """Screen parameters: c1 random large sets per pair, each of size n - c2."""

    c1: int = 3
    c2: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.c1 < 1:
            raise ConfigError(f"c1 must be >= 1, got {self.c1}")
        if self.c2 < 2:
            raise ConfigError(f"c2 must be >= 2, got {self.c2}")


@dataclass(frozen=True)
class PairDecision:
    """Outcome for one pair: which set (if any) separated it, at what cost.

    ``source`` is -1 when the marginal test separated the pair, the draw index
    in 0..c1-1 when a random large set did, and None when nothing did.
    """

    separating_set: frozenset[int] | None
    source: int | None
    tests_used: int


@dataclass
class PreprocResult:
    p: np.ndarray  # n x n uint8, symmetric, unit diagonal
    tests_performed: int
    decisions: dict[tuple[int, int], PairDecision]


def _pair_rng(seed, a: int, b: int) -> np.random.Generator:
    # hash-derived per-pair stream: stable across platforms and independent of
    # the order in which pairs are processed
    digest = hashlib.sha256(f"{seed}:{a}:{b}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "big"))


def _decide_pair(oracle: CountingOracle, cfg: PreprocConfig, a: int, b: int) -> PairDecision:
    n = oracle.dag.n
    if oracle.query(a, b, ()):
        return PairDecision(frozenset(), -1, 1)
    m = n - cfg.c2
    if m == 0:
        # degenerate size-0 draws: each re-asks the marginal question
        for t in range(cfg.c1):
            if oracle.query(a, b, ()):
                return PairDecision(frozenset(), t, 2 + t)
        return PairDecision(None, None, 1 + cfg.c1)
    rng = _pair_rng(cfg.seed, a, b)
    cand = np.array([v for v in range(n) if v != a and v != b])
    for t in range(cfg.c1):
        draw = rng.choice(cand, size=m, replace=False)
        s = tuple(int(v) for v in np.sort(draw))
        if oracle.query(a, b, s):
            return PairDecision(frozenset(s), t, 2 + t)
    return PairDecision(None, None, 1 + cfg.c1)


def preprocess(oracle: CountingOracle, cfg: PreprocConfig, jobs: int = 1) -> PreprocResult:
    """Run the screen over all pairs in lexicographic order.

    With ``jobs > 1`` pairs are decided by a thread pool sharing the (locked)
    oracle; per-pair RNG streams make the outcome identical to the sequential
    one, bit for bit.
    """
    n = oracle.dag.n
    if not (2 <= cfg.c2 <= n):
        raise ConfigError(f"c2 must satisfy 2 <= c2 <= n, got c2={cfg.c2}, n={n}")
    start = oracle.checkpoint()
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            decided = list(
                pool.map(lambda ab: _decide_pair(oracle, cfg, *ab), pairs)
            )
    else:
        decided = [_decide_pair(oracle, cfg, a, b) for a, b in pairs]

    p = np.ones((n, n), dtype=np.uint8)
    decisions: dict[tuple[int, int], PairDecision] = {}
    for (a, b), dec in zip(pairs, decided):
        decisions[(a, b)] = dec
        if dec.separating_set is not None:
            p[a, b] = p[b, a] = 0
    return PreprocResult(
        p=p,
        tests_performed=oracle.checkpoint() - start,
        decisions=decisions,
    )


def seed_skeleton(pre: PreprocResult) -> Skeleton:
    """Skeleton whose edges are exactly the pairs the screen could not separate."""
    n = pre.p.shape[0]
    sk = Skeleton(n)
    for a in range(n):
        for b in range(a + 1, n):
            if pre.p[a, b]:
                sk.add_edge(a, b)
    for (a, b), dec in pre.decisions.items():
        if dec.separating_set is not None:
            sk.sepsets[(a, b)] = dec.separating_set
    return sk


def run_p3pc(
    oracle: CountingOracle,
    cfg: PreprocConfig,
    dag_id: str = "dag",
    jobs: int = 1,
) -> RunReport:
    """Screen, then PC from the seeded skeleton; counts come from one counter."""
    t0 = time.perf_counter()
    pre = preprocess(oracle, cfg, jobs=jobs)
    report = pc_skeleton(oracle, seed_skeleton(pre))
    return RunReport(
        dag=dag_id,
        algorithm="p3pc",
        seed=cfg.seed,
        c1=cfg.c1,
        c2=cfg.c2,
        preproc_tests=pre.tests_performed,
        pc_tests=report.tests_performed,
        total_tests=pre.tests_performed + report.tests_performed,
        skeleton_edges=report.skeleton.edge_count(),
        wall_time=time.perf_counter() - t0,
        skeleton=report.skeleton,
    )


def run_pc_alone(oracle: CountingOracle, dag_id: str = "dag") -> RunReport:
    """Plain PC from the complete graph, reported in the same shape."""
    t0 = time.perf_counter()
    report = pc_skeleton(oracle, complete_skeleton(oracle.dag.n))
    return RunReport(
        dag=dag_id,
        algorithm="pc",
        seed=None,
        c1=None,
        c2=None,
        preproc_tests=0,
        pc_tests=report.tests_performed,
        total_tests=report.tests_performed,
        skeleton_edges=report.skeleton.edge_count(),
        wall_time=time.perf_counter() - t0,
        skeleton=report.skeleton,
    )
