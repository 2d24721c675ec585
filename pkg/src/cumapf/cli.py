"""Command-line front end: ``cumapf {solve,gen,bench,validate,lb,oracle,refine-log,genmap}``.

Exit codes: 0 ok, 2 invalid instance or usage, 3 validation failure,
4 planner internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .bench import (
    run_bench, summarize, worker_count, write_long, write_records, write_summary,
)
from .core import InvalidInstanceError, Plan, PlannerError, validate_plan
from .graph import load_map
from .instances import (
    GeneratorSpec, generate, load_instance, random_map_text,
    resolve_map_path, save_instance,
)
from .lowerbound import instance_lb

EXIT_OK, EXIT_INVALID, EXIT_VALIDATION, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("cumapf")


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_solve(args) -> int:
    from .lacam import lacam_search
    from .pull import plan

    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        return _fail(EXIT_INVALID, str(exc))
    try:
        if args.algo == "lacam":
            result = lacam_search(instance, args.time_limit / 1000.0, seed=args.seed)
            if result.plan is None:
                return _fail(EXIT_INTERNAL, "lacam found no plan within the time limit")
            p = result.plan
            status = f" status={result.status}"
        else:
            p = plan(instance, args.algo)
            status = ""
    except PlannerError as exc:
        return _fail(EXIT_INTERNAL, str(exc))
    _write(args.out, p.to_json())
    lb = instance_lb(instance)
    print(f"makespan={p.makespan} lb={lb} ratio={p.makespan / max(lb, 1):.4f}{status}")
    if args.validate:
        report = validate_plan(instance, p)
        if not report.ok:
            print(report.summary(), file=sys.stderr)
            return EXIT_VALIDATION
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.map:
        if args.agents is None:
            return _fail(EXIT_INVALID, "--agents is required with --map")
        try:
            path = resolve_map_path(args.map)
            graph = load_map(path)
        except (FileNotFoundError, ValueError) as exc:
            return _fail(EXIT_INVALID, str(exc))
        if not 1 <= args.agents <= graph.vertex_count:
            return _fail(EXIT_INVALID, f"--agents must be in [1, {graph.vertex_count}]")
        spec = GeneratorSpec("random", n=args.agents, seed=args.seed)
        instance = generate(spec, graph, index=args.index, map_path=args.map)
    elif args.tight:
        spec = GeneratorSpec("tight", k=args.tight[0], ell=args.tight[1])
        instance = generate(spec)
    else:
        spec = GeneratorSpec("grid3", k=args.grid3)
        instance = generate(spec)
    save_instance(instance, args.out)
    print(f"wrote {args.out}: n={instance.n} |V|={instance.graph.vertex_count}")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_bench(args) -> int:
    algos = [a for a in args.algos.split(",") if a]
    bad = [a for a in algos if a not in ("pull", "single", "lacam")]
    if bad:
        return _fail(EXIT_INVALID, f"unknown algorithms: {','.join(bad)}")
    try:
        map_path = str(resolve_map_path(args.map))
    except FileNotFoundError as exc:
        return _fail(EXIT_INVALID, str(exc))
    out = Path(args.out)
    records: list = []
    code = EXIT_OK
    try:
        run_bench(map_path, _int_list(args.agents), args.per, algos, args.seed,
                  workers=worker_count(args.threads), timing=not args.no_timing,
                  time_limit_s=args.time_limit / 1000.0, on_record=records.append)
    except PlannerError as exc:
        code = _fail(EXIT_INTERNAL, str(exc))
    except AssertionError as exc:
        code = _fail(EXIT_VALIDATION, str(exc))
    except ValueError as exc:
        code = _fail(EXIT_INVALID, str(exc))
    # whatever finished before a failure is still written
    with open(out, "w", encoding="utf-8", newline="") as fh:
        write_records(records, fh)
    rows = summarize(records)
    with open(out.with_suffix(".summary.csv"), "w", encoding="utf-8", newline="") as fh:
        write_summary(rows, fh)
    with open(out.with_suffix(".long.csv"), "w", encoding="utf-8", newline="") as fh:
        write_long(records, fh)
    for row in rows:
        print(f"{row['map']} n={row['n']} {row['algo']}: ratio mean={row['ratio_mean']:.3f} "
              f"IQR=[{row['ratio_p25']:.3f}, {row['ratio_p75']:.3f}]")
    return code


def cmd_validate(args) -> int:
    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        return _fail(EXIT_INVALID, str(exc))
    try:
        p = Plan.from_json(Path(args.plan).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError) as exc:
        return _fail(EXIT_INVALID, f"cannot read plan: {exc}")
    report = validate_plan(instance, p)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_lb(args) -> int:
    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        return _fail(EXIT_INVALID, str(exc))
    print(instance_lb(instance))
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import OracleLimitError, optimal_makespan

    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        return _fail(EXIT_INVALID, str(exc))
    try:
        makespan, p = optimal_makespan(instance, args.max_agents, args.max_vertices, args.max_states)
    except OracleLimitError as exc:
        return _fail(EXIT_INVALID, str(exc))
    print(f"makespan={makespan}")
    if args.out:
        _write(args.out, p.to_json())
    return EXIT_OK


def refine_aggregate(logs: list[list[tuple]], lb: int, time_limit_ms: float, buckets: int = 20):
    """Per time bucket, the fraction of trials whose best ratio is at most each observed ratio."""
    ratios = sorted({m / max(lb, 1) for lg in logs for (_, _, m, _) in lg})
    rows = []
    for b in range(1, buckets + 1):
        t = time_limit_ms * b / buckets
        bests = []
        for lg in logs:
            seen = [m for (_, ms, m, _) in lg if ms <= t]
            bests.append(min(seen) / max(lb, 1) if seen else None)
        for r in ratios:
            frac = sum(1 for x in bests if x is not None and x <= r) / len(logs)
            rows.append((repr(t), repr(r), repr(frac)))
    return rows


def cmd_refine_log(args) -> int:
    from .lacam import OPTIMAL, lacam_search

    if args.trials < 1:
        return _fail(EXIT_INVALID, "--trials must be at least 1")
    if args.time_limit <= 0:
        return _fail(EXIT_INVALID, "--time-limit must be positive")
    try:
        instance = load_instance(args.instance)
    except InvalidInstanceError as exc:
        return _fail(EXIT_INVALID, str(exc))
    lb = instance_lb(instance)
    logs = []
    optimal = 0
    out = Path(args.out)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("trial", "iteration", "elapsed_ms", "best_makespan", "status"))
        for trial in range(args.trials):
            res = lacam_search(instance, args.time_limit / 1000.0, seed=args.seed + trial)
            logs.append(res.stats.log)
            optimal += res.status == OPTIMAL
            for it, ms, m, st in res.stats.log:
                w.writerow((trial, it, f"{ms:.3f}", m, st))
    with open(out.with_suffix(".agg.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("elapsed_ms", "ratio", "fraction"))
        w.writerows(refine_aggregate(logs, lb, args.time_limit))
    print(f"trials={args.trials} optimal_proved={optimal} lb={lb}")
    return EXIT_OK


def cmd_genmap(args) -> int:
    text = random_map_text(args.height, args.width, args.obstacles, args.seed)
    _write(args.out, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cumapf", description="Connected unlabeled MAPF toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="plan one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", required=True, choices=("pull", "single", "lacam"))
    s.add_argument("--time-limit", type=float, default=10_000.0, help="milliseconds (lacam)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--validate", action="store_true")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate an instance file")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--map")
    src.add_argument("--tight", type=int, nargs=2, metavar=("K", "L"))
    src.add_argument("--grid3", type=int, metavar="K")
    g.add_argument("--agents", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--index", type=int, default=0, help="instance index within the seed's batch")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run a seeded benchmark batch")
    b.add_argument("--map", required=True)
    b.add_argument("--agents", required=True, help="comma-separated agent counts")
    b.add_argument("--per", type=int, default=25)
    b.add_argument("--algos", default="pull,single")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--time-limit", type=float, default=10_000.0, help="milliseconds (lacam)")
    b.add_argument("--no-timing", action="store_true", help="leave timing columns empty")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="check a plan against an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--plan", required=True)
    v.set_defaults(func=cmd_validate)

    lb = sub.add_parser("lb", help="print the bottleneck-matching lower bound")
    lb.add_argument("--instance", required=True)
    lb.set_defaults(func=cmd_lb)

    o = sub.add_parser("oracle", help="exact optimum for tiny instances")
    o.add_argument("--instance", required=True)
    o.add_argument("--out")
    o.add_argument("--max-agents", type=int, default=4)
    o.add_argument("--max-vertices", type=int, default=25)
    o.add_argument("--max-states", type=int, default=500_000)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("refine-log", help="multi-seed anytime refinement logs")
    r.add_argument("--instance", required=True)
    r.add_argument("--trials", type=int, required=True)
    r.add_argument("--time-limit", type=float, required=True, help="milliseconds per trial")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_refine_log)

    m = sub.add_parser("genmap", help="write a random H x W map with a connected free region")
    m.add_argument("--height", type=int, required=True)
    m.add_argument("--width", type=int, required=True)
    m.add_argument("--obstacles", type=float, default=0.2)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_genmap)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
