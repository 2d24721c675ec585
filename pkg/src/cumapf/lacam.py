"""Constraint-aware PULL and an anytime, eventually optimal configuration search.

The search is a LaCAM*-style DFS over configurations.  Each high-level node
keeps a queue of low-level constraint nodes that fix the next move of agents
``0, 1, ...`` in turn; popping one calls :func:`constrained_step` with those
constraints.  Meeting a known configuration again records the edge and
relaxes depths Dijkstra-style, so once every constraint of every node is spent
the best goal depth is the optimal makespan.

High-level states are keyed by the unordered vertex set: agents are
interchangeable, so the successor sets of a state do not depend on its
labeling.  The agent-level plan is rebuilt from the set chain at the end.
Nodes whose depth plus the bottleneck lower bound cannot beat the incumbent
are dropped.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from collections.abc import Collection, Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import Configuration, Instance, Plan
from .graph import DistanceField, Graph, is_connected_set, multi_source_distance
from .lowerbound import bottleneck_value
from .oracle import relabel_set_path
from .pull import StepState, run_generator

log = logging.getLogger(__name__)

OPTIMAL = "optimal-proved"
BEST_KNOWN = "best-known"
NONE = "none"


class ConstraintError(ValueError):
    """A constraint names an unknown agent, repeats one, or leaves its neighbourhood."""


def _check_constraints(graph: Graph, q_from: Sequence[int], constraints) -> None:
    seen: set[int] = set()
    for i, v in constraints:
        if not 0 <= i < len(q_from):
            raise ConstraintError(f"unknown agent {i}")
        if i in seen:
            raise ConstraintError(f"agent {i} constrained twice")
        seen.add(i)
        u = q_from[i]
        if v != u and v not in graph.adj[u]:
            raise ConstraintError(f"agent {i} cannot reach {v} from {u} in one step")


def constrained_step(
    graph: Graph,
    dist_to_T: DistanceField,
    q_from: Configuration | Sequence[int],
    targets: Collection[int],
    constraints: Sequence[tuple[int, int]] = (),
) -> Configuration | None:
    """PULL with some agents' next vertices fixed in advance; ``None`` on failure.

    An unreserved agent sitting on a vertex claimed by a constrained agent gets
    top chain-start priority so that it tends to be pulled away.  The result is
    rejected if disconnected or if a vertex conflict survives; swap conflicts
    are resolved by exchanging the two agents' targets.
    """
    q = tuple(q_from)
    _check_constraints(graph, q, constraints)
    state = StepState(graph, q, dist_to_T)
    for i, v in constraints:
        state.assign(i, v)
    claimed = {state.q_cur[j] for j in state.reserved}
    sentinel = graph.vertex_count
    for i, u in enumerate(q):
        if i not in state.reserved and u in claimed:
            state.priority[u] = sentinel
    run_generator(state, targets)
    out = state.q_cur
    if not is_connected_set(graph, set(out)):
        return None
    if len(set(out)) != len(out):
        return None
    _resolve_swaps(q, out)
    return Configuration(out)


def _resolve_swaps(q_from: Sequence[int], out: list[int]) -> None:
    where = {u: i for i, u in enumerate(q_from)}
    changed = True
    rounds = 0
    while changed and rounds <= len(out):
        changed = False
        rounds += 1
        for i, u in enumerate(q_from):
            v = out[i]
            if v == u:
                continue
            j = where.get(v)
            if j is not None and j > i and out[j] == u:
                out[i], out[j] = out[j], out[i]
                changed = True


@dataclass
class LowNode:
    who: tuple[int, ...] = ()
    where: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.who)


@dataclass(eq=False)
class HighLevelNode:
    config: Configuration
    key: tuple[int, ...]
    g: int
    h: int
    parent: HighLevelNode | None = None
    constraint_tree: deque = field(default_factory=lambda: deque([LowNode()]))
    neighbors: dict[tuple[int, ...], HighLevelNode] = field(default_factory=dict)


@dataclass
class SearchStats:
    iterations: int = 0
    generated: int = 0
    failures: int = 0
    revisits: int = 0
    elapsed_ms: float = 0.0
    log: list[tuple[int, float, int, str]] = field(default_factory=list)


@dataclass
class SearchResult:
    plan: Plan | None
    status: str
    stats: SearchStats

    @property
    def makespan(self) -> int | None:
        return None if self.plan is None else self.plan.makespan


class _Heuristic:
    """Bottleneck lower bound from a configuration to T, cached per vertex set."""

    def __init__(self, graph: Graph, targets: Sequence[int]) -> None:
        self.cols = [multi_source_distance(graph, [t]).dist for t in targets]
        self.cache: dict[tuple[int, ...], int] = {}

    def __call__(self, key: tuple[int, ...]) -> int:
        h = self.cache.get(key)
        if h is None:
            h = bottleneck_value([[col[s] for col in self.cols] for s in key])
            self.cache[key] = h
        return h


def lacam_search(
    instance: Instance,
    time_budget: float,
    seed: int = 0,
    max_iterations: int | None = None,
    dist_to_T: DistanceField | None = None,
) -> SearchResult:
    """Anytime search; ``time_budget`` is in seconds.

    Status is ``optimal-proved`` when the search space is exhausted with a
    solution, ``best-known`` when the budget ran out after one was found.
    The refinement log holds ``(iteration, elapsed_ms, best_makespan, status)``.
    """
    if time_budget <= 0:
        raise ValueError("time budget must be positive")
    t0 = time.perf_counter()
    graph = instance.graph
    targets = instance.target_set
    dist = dist_to_T or multi_source_distance(graph, targets)
    heuristic = _Heuristic(graph, sorted(targets))
    rng = np.random.default_rng(seed)
    goal_key = tuple(sorted(targets))
    stats = SearchStats()
    n = instance.n

    def candidates(v: int) -> list[int]:
        opts = [v, *graph.adj[v]]
        ties = rng.random(len(opts))
        order = sorted(range(len(opts)), key=lambda k: (dist.dist[opts[k]], ties[k], opts[k]))
        return [opts[k] for k in order]

    root_cfg = Configuration(instance.starts)
    root = HighLevelNode(root_cfg, root_cfg.key(), 0, heuristic(root_cfg.key()))
    explored: dict[tuple[int, ...], HighLevelNode] = {root.key: root}
    open_: list[HighLevelNode] = [root]
    goal: HighLevelNode | None = None
    best = None

    def now_ms() -> float:
        return (time.perf_counter() - t0) * 1000.0

    def note(status: str) -> None:
        nonlocal best
        if goal is not None and (best is None or goal.g < best):
            best = goal.g
            entry = (stats.iterations, now_ms(), best, status)
            stats.log.append(entry)
            log.debug("iteration=%d elapsed_ms=%.1f best=%d", *entry[:3])

    timed_out = False
    while open_:
        if time.perf_counter() - t0 >= time_budget or (
            max_iterations is not None and stats.iterations >= max_iterations
        ):
            timed_out = True
            break
        stats.iterations += 1
        node = open_[-1]
        if goal is None and node.key == goal_key:
            goal = node
            note(BEST_KNOWN)
        if goal is not None and node.g + node.h >= goal.g:
            open_.pop()
            continue
        if not node.constraint_tree:
            open_.pop()
            continue
        low = node.constraint_tree.popleft()
        if low.depth < n:
            i = low.depth
            for v in candidates(node.config[i]):
                node.constraint_tree.append(LowNode(low.who + (i,), low.where + (v,)))
        nxt = constrained_step(graph, dist, node.config.positions, targets,
                               list(zip(low.who, low.where)))
        stats.generated += 1
        if nxt is None:
            stats.failures += 1
            continue
        key = nxt.key()
        if key == node.key:
            continue
        known = explored.get(key)
        if known is not None:
            stats.revisits += 1
            node.neighbors[key] = known
            _rewire(node, goal, open_)
            open_.append(known)
        else:
            child = HighLevelNode(nxt, key, node.g + 1, heuristic(key), parent=node)
            node.neighbors[key] = child
            explored[key] = child
            open_.append(child)
        note(BEST_KNOWN)

    if goal is None:
        status = NONE
    elif timed_out:
        status = BEST_KNOWN
    else:
        status = OPTIMAL
    stats.elapsed_ms = now_ms()
    if goal is not None:
        stats.log.append((stats.iterations, stats.elapsed_ms, goal.g, status))
    plan = None if goal is None else _extract(graph, instance, goal)
    return SearchResult(plan, status, stats)


def _rewire(start: HighLevelNode, goal: HighLevelNode | None, open_: list[HighLevelNode]) -> None:
    # unit-cost relaxation from the node that found the edge
    stack = [start]
    while stack:
        a = stack.pop()
        for b in a.neighbors.values():
            g = a.g + 1
            if g < b.g:
                b.g = g
                b.parent = a
                stack.append(b)
                if goal is not None and b.g + b.h < goal.g:
                    open_.append(b)


def _extract(graph: Graph, instance: Instance, goal: HighLevelNode) -> Plan:
    keys = []
    node: HighLevelNode | None = goal
    while node is not None:
        keys.append(node.key)
        node = node.parent
    keys.reverse()
    return relabel_set_path(graph, instance.starts, keys)
