"""Conditional-independence test budgets for PC skeleton recovery.

The package pairs an order-faithful PC skeleton search with a cheap
pre-processing screen that tries a handful of very large conditioning sets
per node pair before PC starts.  Everything runs against an exact
d-separation oracle on a known DAG, so the only measured quantity is the
number of oracle queries.
"""

from .dag import (
    Dag,
    DagError,
    Trail,
    collider_nodes,
    enumerate_trails,
    generate_er,
    is_blocked,
)
from .dsep import CiQuery, CountingOracle, d_separated
from .ingest import (
    BUNDLED,
    ParseError,
    bundled_text,
    load_bundled,
    load_file,
    parse_edge_list,
    serialize,
)
from .pc import PcReport, Skeleton, complete_skeleton, pc_skeleton
from .preproc import (
    ConfigError,
    PairDecision,
    PreprocConfig,
    PreprocResult,
    preprocess,
    run_p3pc,
    run_pc_alone,
    seed_skeleton,
)
from .reports import RunReport, render_csv, render_json, summarize
from .theory import (
    ErParams,
    McEstimate,
    Statement1Result,
    TrailsBound,
    check_statement1,
    closed_form_residual,
    colliders_closed_form,
    collider_probability,
    expected_colliders,
    expected_trails_upto,
    mc_collider_count,
    mc_trail_count,
    trails_bound,
)

__all__ = [
    "BUNDLED",
    "CiQuery",
    "ConfigError",
    "CountingOracle",
    "Dag",
    "DagError",
    "ErParams",
    "McEstimate",
    "PairDecision",
    "ParseError",
    "PcReport",
    "PreprocConfig",
    "PreprocResult",
    "RunReport",
    "Skeleton",
    "Statement1Result",
    "Trail",
    "TrailsBound",
    "bundled_text",
    "check_statement1",
    "closed_form_residual",
    "collider_nodes",
    "collider_probability",
    "colliders_closed_form",
    "complete_skeleton",
    "d_separated",
    "enumerate_trails",
    "expected_colliders",
    "expected_trails_upto",
    "generate_er",
    "is_blocked",
    "load_bundled",
    "load_file",
    "mc_collider_count",
    "mc_trail_count",
    "parse_edge_list",
    "pc_skeleton",
    "preprocess",
    "render_csv",
    "render_json",
    "run_p3pc",
    "run_pc_alone",
    "seed_skeleton",
    "serialize",
    "summarize",
    "trails_bound",
]

__version__ = "0.1.0"
