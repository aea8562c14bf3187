"""Per-run test-count records and their CSV/JSON rendering.

A RunReport captures one algorithm execution on one DAG.  CSV output is
byte-stable: fields are rendered with fixed formatting and wall time is kept
out of both emitted formats (it is the only nondeterministic field).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

CSV_HEADER = (
    "dag,algorithm,seed,c1,c2,preproc_tests,pc_tests,total_tests,"
    "skeleton_edges,ratio"
)

CSV_FIELDS = (
    "dag",
    "algorithm",
    "seed",
    "c1",
    "c2",
    "preproc_tests",
    "pc_tests",
    "total_tests",
    "skeleton_edges",
    "ratio",
)


@dataclass
class RunReport:
    """Counts for one run: algorithm is "pc", "p3pc", or "summary".

    ``ratio`` is this run's total tests divided by the plain-PC total for the
    same DAG (None when not applicable, e.g. for the pc row itself); for a
    summary row it is the mean proportion over the seeds and the count fields
    hold column sums, so the proportion can be recomputed from the rows.
    ``wall_time`` is informational only and never serialized.
    """

    dag: str
    algorithm: str
    seed: int | None
    c1: int | None
    c2: int | None
    preproc_tests: int
    pc_tests: int
    total_tests: int
    skeleton_edges: int
    wall_time: float = 0.0
    ratio: float | None = None
    skeleton: object | None = None  # final Skeleton; in-memory only, never serialized

    def __post_init__(self):
        if self.total_tests != self.preproc_tests + self.pc_tests:
            raise ValueError("total_tests must equal preproc_tests + pc_tests")
        if self.algorithm == "pc" and self.preproc_tests != 0:
            raise ValueError("plain pc performs no pre-processing tests")

    def csv_row(self) -> str:
        cells = []
        for name in CSV_FIELDS:
            v = getattr(self, name)
            if v is None:
                cells.append("")
            elif name == "ratio":
                cells.append(f"{v:.6f}")
            else:
                cells.append(str(v))
        return ",".join(cells)

    def as_dict(self) -> dict:
        d = {name: getattr(self, name) for name in CSV_FIELDS}
        if d["ratio"] is not None:
            d["ratio"] = round(d["ratio"], 6)
        return d


def summarize(dag_id: str, pc_report: RunReport, p3pc_reports: list[RunReport]) -> RunReport:
    """Summary row: count sums over the per-seed runs, mean proportion vs pc."""
    if not p3pc_reports:
        raise ValueError("summary requires at least one per-seed run")
    mean_ratio = sum(r.total_tests for r in p3pc_reports) / (
        len(p3pc_reports) * pc_report.total_tests
    )
    return RunReport(
        dag=dag_id,
        algorithm="summary",
        seed=None,
        c1=p3pc_reports[0].c1,
        c2=p3pc_reports[0].c2,
        preproc_tests=sum(r.preproc_tests for r in p3pc_reports),
        pc_tests=sum(r.pc_tests for r in p3pc_reports),
        total_tests=sum(r.total_tests for r in p3pc_reports),
        skeleton_edges=pc_report.skeleton_edges,
        ratio=mean_ratio,
    )


def render_csv(rows: list[RunReport]) -> str:
    return "\n".join([CSV_HEADER, *(r.csv_row() for r in rows)]) + "\n"


def render_json(rows: list[RunReport], summary: dict | None = None) -> str:
    payload: dict = {"rows": [r.as_dict() for r in rows]}
    if summary is not None:
        payload["summary"] = summary
    return json.dumps(payload, indent=2) + "\n"
