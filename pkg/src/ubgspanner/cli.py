"""Command line: ``gen`` instances, ``run`` an engine with verification,
``bench`` a size sweep.

Exit codes: 0 success, 1 certificate failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
import time
from pathlib import Path

from .distsim import SimConfig, run_distributed
from .geometry import (BandPolicy, GenerationError, UbgInstance, UsageError,
                       generate_instance)
from .greedy_baseline import seq_greedy
from .relaxed_greedy import run_relaxed_greedy
from .validation import check_alpha, check_positive_int, check_stretch
from .verify import check_degree, report_passed, verification_report, weight_ratio

ALGOS = ("seq-greedy", "relaxed", "dist")
BENCH_COLUMNS = ("size", "seed", "algo", "t", "max_degree", "weight_ratio",
                 "rounds_total", "rounds_nonempty_phases", "phases", "ms_elapsed")

EXIT_OK, EXIT_CERT, EXIT_USAGE = 0, 1, 2


def _write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True) + "\n", encoding="utf-8")


def _sibling(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(p.stem + suffix)


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------

def build_spanner(inst: UbgInstance, algo: str, t: float, seed: int = 0):
    """Run one engine; returns (edges, spanner JSON document, transcript or None)."""
    if algo == "seq-greedy":
        edges = sorted(seq_greedy(inst.graph(), check_stretch(t, strict=False)))
        doc = {"t": t, "algo": algo, "params": {}, "edges": [list(e) for e in edges],
               "phases": []}
        return edges, doc, None
    t = check_stretch(t)
    if algo == "relaxed":
        res = run_relaxed_greedy(inst, t)
        doc = res.to_dict()
        doc["algo"] = algo
        return res.edges, doc, None
    if algo == "dist":
        cfg = SimConfig(inst, t, seed=seed)
        tr = run_distributed(cfg)
        doc = {"t": t, "algo": algo, "params": cfg.params.to_dict(),
               "edges": [list(e) for e in tr.edges],
               "phases": [{k: p[k] for k in ("i", "bin_size", "queries", "added", "removed")}
                          for p in tr.phases]}
        return tr.edges, doc, tr
    raise UsageError(f"unknown algorithm {algo!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    n = check_positive_int(args.n, "n")
    d = check_positive_int(args.d, "d", 2)
    inst = generate_instance(n, d, check_alpha(args.alpha), BandPolicy.parse(args.policy),
                             args.seed)
    inst.save(args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        inst = UbgInstance.load(args.input)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read instance {args.input}: {exc}") from None
    edges, doc, transcript = build_spanner(inst, args.algo, args.t, args.seed)
    report = verification_report(inst, edges, args.t)
    _write_json(args.report or _sibling(args.out, ".report.json"), report)
    if transcript is not None:
        _write_json(args.transcript or _sibling(args.out, ".transcript.json"),
                    transcript.to_dict())
    if not report_passed(report):
        spanner = report["spanner"]
        print(f"certificate failed: stretch {spanner['value']} at edge "
              f"{spanner['witness']}", file=sys.stderr)
        return EXIT_CERT
    _write_json(args.out, doc)
    return EXIT_OK


def bench_cell(size: int, seed: int, algo: str, t: float, d: int, alpha: float,
               policy: str) -> dict:
    inst = generate_instance(size, d, alpha, policy, seed)
    start = time.perf_counter()
    edges, doc, tr = build_spanner(inst, algo, t, seed)
    elapsed = (time.perf_counter() - start) * 1000.0
    row = {"size": size, "seed": seed, "algo": algo, "t": t,
           "max_degree": check_degree(edges), "weight_ratio": weight_ratio(inst, edges),
           "rounds_total": "", "rounds_nonempty_phases": "", "phases": "",
           "ms_elapsed": elapsed}
    if algo != "seq-greedy":
        row["phases"] = sum(1 for p in doc["phases"] if p["bin_size"])
    if tr is not None:
        row["rounds_total"] = tr.rounds_total
        row["rounds_nonempty_phases"] = tr.rounds_nonempty_phases
        row["phases"] = len(tr.phases) + (1 if tr.rounds_by_step["short_edges"] else 0)
    return row


def _median_row(rows: list[dict]) -> dict:
    out = {"size": rows[0]["size"], "seed": "median", "algo": rows[0]["algo"],
           "t": rows[0]["t"]}
    for col in BENCH_COLUMNS[4:]:
        vals = [r[col] for r in rows if r[col] != ""]
        out[col] = statistics.median(vals) if vals else ""
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def cmd_bench(args) -> int:
    sizes = [check_positive_int(s, "size") for s in args.sizes.split(",") if s]
    algos = [a for a in args.algo.split(",") if a]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algorithm {a!r}")
    seeds = check_positive_int(args.seeds, "seeds")
    t = check_stretch(args.t)
    alpha = check_alpha(args.alpha)
    BandPolicy.parse(args.policy)
    rows = []
    for size in sizes:
        for algo in algos:
            cells = [bench_cell(size, s, algo, t, args.d, alpha, args.policy)
                     for s in range(1, seeds + 1)]
            rows.extend(cells if args.per_seed else [_median_row(cells)])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        if not args.timing:
            row["ms_elapsed"] = ""
        writer.writerow([_fmt(row[c]) for c in BENCH_COLUMNS])
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubgspanner",
        description="Spanners of quasi unit ball graphs: generate, run, benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an alpha-UBG instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--alpha", type=float, default=1.0)
    gen.add_argument("--policy", default="all",
                     help="band-edge policy: all, none or bernoulli:p")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="build and certify a spanner")
    run.add_argument("--algo", choices=ALGOS, required=True)
    run.add_argument("--t", type=float, required=True)
    run.add_argument("--input", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--report", help="verification report path "
                                      "(default: <out stem>.report.json)")
    run.add_argument("--transcript", help="simulator transcript path for --algo dist "
                                          "(default: <out stem>.transcript.json)")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="median metrics over seeds per size")
    bench.add_argument("--sizes", default="50,100,200,400")
    bench.add_argument("--seeds", type=int, default=10)
    bench.add_argument("--t", type=float, default=1.5)
    bench.add_argument("--algo", default="relaxed,dist",
                       help="comma-separated subset of " + ",".join(ALGOS))
    bench.add_argument("--d", type=int, default=2)
    bench.add_argument("--alpha", type=float, default=0.7)
    bench.add_argument("--policy", default="all")
    bench.add_argument("--out", help="CSV path (default: stdout)")
    bench.add_argument("--per-seed", action="store_true",
                       help="one row per seed instead of per-size medians")
    bench.add_argument("--timing", action="store_true",
                       help="fill ms_elapsed (makes output run-dependent)")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
