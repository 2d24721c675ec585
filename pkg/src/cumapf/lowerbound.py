"""Bottleneck-matching lower bound on the makespan.

Ignoring conflicts and connectivity, some assignment of starts to targets has
to be realized, so no plan beats the minimum over perfect matchings of the
longest matched start-target distance.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .graph import Graph, multi_source_distance


@dataclass(frozen=True)
class BipartiteDistanceTable:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    d: tuple[tuple[int, ...], ...]


def distance_table(graph: Graph, starts: Sequence[int], targets: Sequence[int]) -> BipartiteDistanceTable:
    if len(starts) != len(targets):
        raise ValueError(f"|S|={len(starts)} differs from |T|={len(targets)}")
    rows, cols = tuple(starts), tuple(targets)
    by_col = [multi_source_distance(graph, [t]).dist for t in cols]
    d = tuple(tuple(col[s] for col in by_col) for s in rows)
    return BipartiteDistanceTable(rows, cols, d)


def has_perfect_matching(d: Sequence[Sequence[int]], threshold: int) -> bool:
    """Kuhn's augmenting paths on the graph of entries ``<= threshold``."""
    n = len(d)
    allowed = [[j for j, x in enumerate(row) if x <= threshold] for row in d]
    match_col = [-1] * n
    match_row = [-1] * n
    # greedy start keeps most augmentations trivial
    for i in range(n):
        for j in allowed[i]:
            if match_col[j] < 0:
                match_col[j] = i
                match_row[i] = j
                break
    for i in range(n):
        if match_row[i] >= 0:
            continue
        if not allowed[i]:
            return False
        if not _augment(i, allowed, match_row, match_col, n):
            return False
    return True


def _augment(root: int, allowed, match_row, match_col, n) -> bool:
    # iterative DFS over alternating paths
    seen = [False] * n
    stack = [(root, iter(allowed[root]))]
    via: list[int] = []
    while stack:
        i, it = stack[-1]
        for j in it:
            if seen[j]:
                continue
            seen[j] = True
            k = match_col[j]
            if k < 0:
                via.append(j)
                for (row, _), col in zip(stack, via):
                    match_row[row] = col
                    match_col[col] = row
                return True
            via.append(j)
            stack.append((k, iter(allowed[k])))
            break
        else:
            stack.pop()
            if via:
                via.pop()
    return False


def bottleneck_value(d: Sequence[Sequence[int]]) -> int:
    n = len(d)
    if any(len(row) != n for row in d):
        raise ValueError("distance table must be square")
    if n == 0:
        return 0
    values = sorted({x for row in d for x in row})
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if has_perfect_matching(d, values[mid]):
            hi = mid
        else:
            lo = mid + 1
    return values[lo]


def bottleneck_lb(table: BipartiteDistanceTable) -> int:
    return bottleneck_value(table.d)


def instance_lb(instance) -> int:
    return bottleneck_lb(distance_table(instance.graph, instance.starts, instance.targets))
