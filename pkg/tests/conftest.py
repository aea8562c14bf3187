from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from p3pc.dag import generate_er

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=60,
)
settings.load_profile("suite")


@st.composite
def er_dags(draw, min_n=2, max_n=8):
    """Random ER DAG, shrinkable through (n, p-index, seed)."""
    n = draw(st.integers(min_n, max_n))
    p = draw(st.sampled_from([0.15, 0.3, 0.5, 0.8]))
    seed = draw(st.integers(0, 2**32 - 1))
    return generate_er(n, p, seed)


@st.composite
def dags_with_pair(draw, min_n=2, max_n=8):
    dag = draw(er_dags(min_n=min_n, max_n=max_n))
    a = draw(st.integers(0, dag.n - 1))
    b = draw(st.integers(0, dag.n - 1).filter(lambda x: x != a))
    return dag, a, b


def small_dag_corpus(count=40, max_n=6, seed0=0):
    """Deterministic list of small DAGs across densities."""
    out = []
    k = 0
    while len(out) < count:
        n = 2 + k % (max_n - 1)
        p = (0.15, 0.35, 0.6, 0.9)[k % 4]
        out.append(generate_er(n, p, seed0 + k))
        k += 1
    return out


# --- acceptance reporting ---------------------------------------------------

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one line per acceptance criterion for the terminal summary."""

    def record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((name, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        verdict = "PASS" if ok else "FAIL"
        line = f"{verdict}  {name}"
        if detail:
            line += f"  [{detail}]"
        tr.write_line(line, green=ok, red=not ok)
