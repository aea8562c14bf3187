"""Command-line experiment harness.

Subcommands: ``compare`` (screened vs plain PC on named DAGs), ``sweep``
(random-DAG grid emitting a scatter of test counts), ``theory`` (formula
evaluations, Monte-Carlo checks, and the long-trail blocking verdict),
``gen`` (write a random DAG as an edge-list file), and ``dsep`` (one-off
d-separation query).  CSV output is byte-identical across re-runs with the
same arguments; parallel and sequential runs produce identical reports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

from .dag import DagError, generate_er
from .dsep import CountingOracle, d_separated
from .ingest import BUNDLED, load_bundled, load_file, serialize
from .preproc import PreprocConfig, run_p3pc, run_pc_alone
from .reports import RunReport, render_csv, render_json, summarize
from .theory import (
    ErParams,
    McEstimate,
    check_statement1,
    closed_form_residual,
    expected_colliders,
    expected_trails_upto,
    mc_collider_count,
    mc_trail_count,
    trails_bound,
)


def _derived_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _load_source(src: str, default_seed: int):
    """A DAG source: bundled network name, file path, or er:n=..,p=..|m=..[,seed=..]
    (m = expected edges per node, converted to p = m*n / C(n,2))."""
    if src.startswith("er:"):
        kv = {}
        for part in src[3:].split(","):
            k, _, v = part.partition("=")
            kv[k.strip()] = v.strip()
        try:
            n = int(kv["n"])
            if "p" in kv:
                p = float(kv["p"])
            elif "m" in kv:
                p = min(1.0, float(kv["m"]) * n / comb(n, 2))
            else:
                raise KeyError("p")
            seed = int(kv.get("seed", default_seed))
        except KeyError as exc:
            raise DagError(f"generator spec {src!r} missing key {exc}") from None
        except ValueError as exc:
            raise DagError(f"bad generator spec {src!r}: {exc}") from None
        return f"er-n{n}-p{p:g}-s{seed}", generate_er(n, p, seed)
    if src in BUNDLED:
        return src, load_bundled(src)
    path = Path(src)
    if path.exists():
        return path.stem, load_file(path)
    raise DagError(
        f"unknown DAG source {src!r} (not a bundled network, file, or er: spec)"
    )


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- compare ---------------------------------------------------------------


def _p3pc_task(args_tuple):
    dag, cfg, dag_id = args_tuple
    oracle = CountingOracle(dag, memo=True)
    return run_p3pc(oracle, cfg, dag_id=dag_id)


def cmd_compare(args) -> int:
    rows: list[RunReport] = []
    summary: dict[str, float] = {}
    for src in args.network:
        dag_id, dag = _load_source(src, args.seed)
        oracle = CountingOracle(dag, memo=True)
        pc_row = run_pc_alone(oracle, dag_id)
        cfgs = [
            PreprocConfig(c1=args.c1, c2=args.c2, seed=args.seed + k)
            for k in range(args.seeds)
        ]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                runs = list(pool.map(_p3pc_task, [(dag, c, dag_id) for c in cfgs]))
        else:
            runs = [run_p3pc(oracle, c, dag_id=dag_id) for c in cfgs]
        for r in runs:
            r.ratio = r.total_tests / pc_row.total_tests
        summary_row = summarize(dag_id, pc_row, runs)
        summary[dag_id] = round(summary_row.ratio, 6)
        rows.extend([pc_row, *runs, summary_row])
    if args.format == "json":
        _emit(render_json(rows, summary={"mean_ratio": summary}), args.out)
    else:
        _emit(render_csv(rows), args.out)
    return 0


# --- sweep -----------------------------------------------------------------


def _sweep_task(args_tuple):
    n, label, p, rep, base_seed, c1, c2 = args_tuple
    dag = generate_er(n, p, _derived_seed("sweep-dag", base_seed, n, label, rep))
    dag_id = f"er-n{n}-{label}-r{rep}"
    oracle = CountingOracle(dag, memo=True)
    pc_row = run_pc_alone(oracle, dag_id)
    cfg = PreprocConfig(
        c1=c1, c2=c2, seed=_derived_seed("sweep-pre", base_seed, n, label, rep)
    )
    p3_row = run_p3pc(oracle, cfg, dag_id=dag_id)
    p3_row.ratio = p3_row.total_tests / pc_row.total_tests
    return pc_row, p3_row


def cmd_sweep(args) -> int:
    ns = [int(x) for x in args.n.split(",")]
    if args.p:
        combos = [
            (n, f"p{float(px):g}", float(px), f"p={float(px):g}")
            for n in ns
            for px in args.p.split(",")
        ]
    else:
        combos = []
        for n in ns:
            for mx in args.multiplier.split(","):
                m = float(mx)
                # edge multiplier m targets about m*n edges
                combos.append((n, f"m{m:g}", min(1.0, m * n / comb(n, 2)), f"m={m:g}"))
    tasks = [
        (n, label, p, rep, args.seed, args.c1, args.c2)
        for (n, label, p, bucket) in combos
        for rep in range(args.reps)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_task, tasks, chunksize=8))
    else:
        results = [_sweep_task(t) for t in tasks]

    rows: list[RunReport] = []
    for pc_row, p3_row in results:
        rows.extend((pc_row, p3_row))

    below = sum(1 for pc_row, p3 in results if p3.total_tests < pc_row.total_tests)
    buckets: dict[str, list[float]] = {}
    i = 0
    for _n, _label, _p, bucket in combos:
        for _ in range(args.reps):
            buckets.setdefault(bucket, []).append(results[i][1].ratio)
            i += 1
    bucket_means = {k: sum(v) / len(v) for k, v in buckets.items()}
    summary = {
        "points": len(results),
        "below_diagonal": below,
        "below_diagonal_frac": round(below / len(results), 6),
        "mean_ratio_by_bucket": {k: round(v, 6) for k, v in bucket_means.items()},
    }
    if args.format == "json":
        _emit(render_json(rows, summary=summary), args.out)
    else:
        _emit(render_csv(rows), args.out)
        print(
            f"# below diagonal: {below}/{len(results)} "
            f"({summary['below_diagonal_frac']:.3f})",
            file=sys.stderr,
        )
        for k, v in bucket_means.items():
            print(f"# mean ratio {k}: {v:.4f}", file=sys.stderr)
    return 0


# --- theory ----------------------------------------------------------------


def _fmt_mc(est: McEstimate) -> str:
    return f"{est.mean:.4f} ± {est.se:.4f} (n={est.reps})"


def cmd_theory(args) -> int:
    ns = [int(x) for x in args.n.split(",")]
    ps = [float(x) for x in args.p.split(",")]
    reps = args.mc_reps
    report: dict = {"grid": [], "colliders_limit": {}, "statement1": {}}
    for n in ns:
        for p in ps:
            params = ErParams(n, p)
            entry = {
                "n": n,
                "p": p,
                "expected_trails_len6": expected_trails_upto(params, 6),
                "trails_bound_len7": trails_bound(params, 7).geometric,
                "expected_colliders": expected_colliders(params),
                "closed_form_residual": closed_form_residual(params) if p > 0 else None,
            }
            if reps > 0:
                est = mc_trail_count(n, p, 6, reps, seed=args.seed)
                entry["mc_trails_len6"] = {"mean": est.mean, "se": est.se}
                estc = mc_collider_count(n, p, reps, seed=args.seed)
                entry["mc_colliders"] = {"mean": estc.mean, "se": estc.se}
            report["grid"].append(entry)
    ncol = args.colliders_n
    params = ErParams(ncol, 1.0 / ncol)
    ec = expected_colliders(params)
    report["colliders_limit"] = {
        "n": ncol,
        "p": f"1/{ncol}",
        "expected": ec,
        "per_node": ec / ncol,
    }
    verdicts = []
    for k in range(args.s1_dags):
        dag = generate_er(args.s1_n, args.s1_p, (args.seed, k))
        verdicts.append(bool(check_statement1(dag)))
    report["statement1"] = {
        "dags": args.s1_dags,
        "n": args.s1_n,
        "p": args.s1_p,
        "all_verified": all(verdicts),
    }
    if args.format == "json":
        _emit(json.dumps(report, indent=2, default=float) + "\n", args.out)
        return 0
    lines = []
    for e in report["grid"]:
        lines.append(
            f"n={e['n']} p={e['p']:g}: E[trails<=6]={e['expected_trails_len6']:.5f}"
            f" bound={e['trails_bound_len7']:.5f}"
            f" E[colliders]={e['expected_colliders']:.5f}"
        )
        if "mc_trails_len6" in e:
            t, c = e["mc_trails_len6"], e["mc_colliders"]
            lines.append(
                f"    MC trails {t['mean']:.4f}±{t['se']:.4f}"
                f"  MC colliders {c['mean']:.4f}±{c['se']:.4f}"
            )
        if e["closed_form_residual"] is not None:
            lines.append(
                f"    closed-form residual {e['closed_form_residual']:+.5f}"
            )
    cl = report["colliders_limit"]
    lines.append(
        f"colliders at p=1/n, n={cl['n']}: {cl['expected']:.3f}"
        f" ({cl['per_node']:.6f} per node)"
    )
    s1 = report["statement1"]
    lines.append(
        f"long-trail blocking on {s1['dags']} DAGs (n={s1['n']}, p={s1['p']:g}): "
        + ("verified" if s1["all_verified"] else "FAILED")
    )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# --- gen / dsep ------------------------------------------------------------


def cmd_gen(args) -> int:
    dag = generate_er(args.n, args.p, args.seed)
    _emit(serialize(dag), args.out)
    return 0


def cmd_dsep(args) -> int:
    _, dag = _load_source(args.dag, args.seed)
    a = dag.name_index(args.a)
    b = dag.name_index(args.b)
    given = frozenset(
        dag.name_index(x) for x in args.given.split(",") if x
    ) if args.given else frozenset()
    sep = d_separated(dag, a, b, given)
    if args.format == "json":
        _emit(
            json.dumps(
                {"a": args.a, "b": args.b, "given": sorted(dag.names[v] for v in given),
                 "d_separated": sep},
                indent=2,
            )
            + "\n",
            args.out,
        )
    else:
        _emit(("d-separated" if sep else "d-connected") + "\n", args.out)
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("--c1", type=int, default=3, help="random large sets per pair")
    common.add_argument("--c2", type=int, default=4, help="set size deficit (size n-c2)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common.add_argument("--out", default=None, help="write output to file instead of stdout")

    ap = argparse.ArgumentParser(
        prog="p3pc",
        description="PC skeleton search with a large-conditioning-set screen, "
        "measured against an exact d-separation oracle.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "compare",
        parents=[common],
        help="screened vs plain PC on one or more DAGs",
        epilog="bundled networks: " + ", ".join(BUNDLED),
    )
    p.add_argument("network", nargs="+", help="bundled name, file path, or er:n=..,p=..")
    p.add_argument("--seeds", type=int, default=20, help="number of screen seeds")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", parents=[common], help="random-DAG test-count scatter")
    p.add_argument("--n", default="10,15,20,25", help="comma list of node counts")
    p.add_argument(
        "--multiplier", default="0.5,1,1.5,2", help="comma list of edge multipliers"
    )
    p.add_argument("--p", default=None, help="comma list of edge probabilities (overrides --multiplier)")
    p.add_argument("--reps", type=int, default=100, help="replicates per grid cell")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("theory", parents=[common], help="formula checks and verdicts")
    p.add_argument("--n", default="8,10,12")
    p.add_argument("--p", default="0.1,0.2,0.3")
    p.add_argument("--mc-reps", type=int, default=500, dest="mc_reps")
    p.add_argument("--colliders-n", type=int, default=2000, dest="colliders_n")
    p.add_argument("--s1-dags", type=int, default=3, dest="s1_dags")
    p.add_argument("--s1-n", type=int, default=12, dest="s1_n")
    p.add_argument("--s1-p", type=float, default=0.4, dest="s1_p")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("gen", parents=[common], help="emit a random DAG edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dsep", parents=[common], help="one-off d-separation query")
    p.add_argument("--dag", required=True, help="bundled name, file path, or er: spec")
    p.add_argument("--a", required=True, help="first node name")
    p.add_argument("--b", required=True, help="second node name")
    p.add_argument("--given", default="", help="comma list of conditioning node names")
    p.set_defaults(func=cmd_dsep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DagError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
