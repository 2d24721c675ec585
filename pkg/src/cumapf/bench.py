"""Benchmark harness: seeded instance batches, records, summaries.

Records CSV columns are fixed (``RECORD_FIELDS``); floats are written with
``repr`` so that reading a records file back reproduces the summary exactly.
Quartiles use linear interpolation between closest ranks (numpy's default).
"""

from __future__ import annotations

import csv
import io
import os
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .core import validate_plan
from .graph import Graph, load_map, multi_source_distance
from .instances import gen_random
from .lowerbound import instance_lb
from .pull import plan as pull_plan

RECORD_FIELDS = (
    "map", "n", "seed", "index", "algo", "makespan", "lb", "ratio",
    "plan_time_ms", "step_time_ms", "steps",
)
SUMMARY_FIELDS = (
    "map", "n", "algo", "count",
    "ratio_mean", "ratio_p25", "ratio_p75",
    "time_mean", "time_p25", "time_p75",
    "step_time_mean", "step_time_p25", "step_time_p75",
)


@dataclass
class BenchRecord:
    map: str
    n: int
    seed: int
    index: int
    algo: str
    makespan: int
    lb: int
    ratio: float
    plan_time_ms: float | None
    step_time_ms: float | None
    steps: int


def ratio(makespan: int, lb: int) -> float:
    return makespan / max(lb, 1)


def solve_timed(instance, algo: str, time_limit_s: float = 10.0, seed: int = 0):
    """Run one planner; returns ``(plan, seconds)`` with preprocessing excluded."""
    dist = multi_source_distance(instance.graph, instance.targets)
    if algo == "lacam":
        from .lacam import lacam_search

        t0 = time.perf_counter()
        result = lacam_search(instance, time_limit_s, seed=seed, dist_to_T=dist)
        elapsed = time.perf_counter() - t0
        if result.plan is None:
            raise RuntimeError("lacam found no plan within the budget")
        return result.plan, elapsed
    t0 = time.perf_counter()
    p = pull_plan(instance, algo, dist)
    return p, time.perf_counter() - t0


def run_instance(
    graph: Graph, map_id: str, n: int, seed: int, index: int, algos: Sequence[str],
    timing: bool = True, time_limit_s: float = 10.0,
) -> list[BenchRecord]:
    instance = gen_random(graph, n, seed, index)
    lb = instance_lb(instance)
    out = []
    for algo in algos:
        p, secs = solve_timed(instance, algo, time_limit_s, seed)
        report = validate_plan(instance, p)
        if not report.ok:
            raise AssertionError(f"{algo} produced an invalid plan:\n{report.summary()}")
        steps = p.makespan
        plan_ms = secs * 1000.0
        out.append(BenchRecord(
            map=map_id, n=n, seed=seed, index=index, algo=algo,
            makespan=p.makespan, lb=lb, ratio=ratio(p.makespan, lb),
            plan_time_ms=plan_ms if timing else None,
            step_time_ms=(plan_ms / max(steps, 1)) if timing else None,
            steps=steps,
        ))
    return out


_WORKER_GRAPH: dict[str, Graph] = {}


def _job(args) -> list[BenchRecord]:
    map_path, map_id, n, seed, index, algos, timing, limit = args
    graph = _WORKER_GRAPH.get(map_path)
    if graph is None:
        graph = _WORKER_GRAPH[map_path] = load_map(map_path)
    return run_instance(graph, map_id, n, seed, index, algos, timing, limit)


def worker_count(flag: int | None = None) -> int:
    env = os.environ.get("CUMAPF_THREADS")
    if env:
        return max(1, int(env))
    return max(1, flag or 1)


def run_bench(
    map_path: str, agents: Iterable[int], per: int, algos: Sequence[str], seed: int,
    workers: int = 1, timing: bool = True, time_limit_s: float = 10.0,
    on_record=None,
) -> list[BenchRecord]:
    """Generate ``per`` instances for every agent count and run every algorithm.

    Records come back in (n, index, algo) order whatever the worker count.
    """
    map_id = os.path.splitext(os.path.basename(map_path))[0]
    jobs = [(str(map_path), map_id, n, seed, i, tuple(algos), timing, time_limit_s)
            for n in agents for i in range(per)]
    records: list[BenchRecord] = []
    if workers <= 1:
        for job in jobs:
            batch = _job(job)
            records.extend(batch)
            if on_record:
                for r in batch:
                    on_record(r)
        return records
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for batch in pool.map(_job, jobs):
            records.extend(batch)
            if on_record:
                for r in batch:
                    on_record(r)
    return records


# -- CSV ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_records(records: Iterable[BenchRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RECORD_FIELDS)
    for r in records:
        d = asdict(r)
        w.writerow([_fmt(d[k]) for k in RECORD_FIELDS])


def read_records(fh) -> list[BenchRecord]:
    types = {f.name: f.type for f in fields(BenchRecord)}
    out = []
    for row in csv.DictReader(fh):
        kw = {}
        for k in RECORD_FIELDS:
            raw = row[k]
            t = types[k]
            if t == "int":
                kw[k] = int(raw)
            elif t == "str":
                kw[k] = raw
            else:
                kw[k] = None if raw == "" else float(raw)
        out.append(BenchRecord(**kw))
    return out


def _stats(values: Sequence[float | None]) -> tuple[float, float, float] | None:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    arr = np.asarray(vals, dtype=float)
    p25, p75 = np.percentile(arr, [25, 75], method="linear")
    return float(sum(vals) / len(vals)), float(p25), float(p75)


def summarize(records: Sequence[BenchRecord]) -> list[dict]:
    groups: dict[tuple[str, int, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.map, r.n, r.algo), []).append(r)
    rows = []
    for (map_id, n, algo), rs in groups.items():
        row: dict = {"map": map_id, "n": n, "algo": algo, "count": len(rs)}
        for prefix, attr in (("ratio", "ratio"), ("time", "plan_time_ms"),
                             ("step_time", "step_time_ms")):
            s = _stats([getattr(r, attr) for r in rs])
            for suffix, val in zip(("mean", "p25", "p75"), s or (None, None, None)):
                row[f"{prefix}_{suffix}"] = val
        rows.append(row)
    return rows


def write_summary(rows: Iterable[dict], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for row in rows:
        w.writerow([_fmt(row[k]) for k in SUMMARY_FIELDS])


def write_long(records: Iterable[BenchRecord], fh) -> None:
    """Plot-ready long format: one ``(map, n, algo, index, metric, value)`` row per metric."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("map", "n", "algo", "index", "metric", "value"))
    for r in records:
        for metric in ("ratio", "makespan", "plan_time_ms", "step_time_ms"):
            val = getattr(r, metric)
            if val is not None:
                w.writerow((r.map, r.n, r.algo, r.index, metric, _fmt(val)))


def summary_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    write_summary(rows, buf)
    return buf.getvalue()
