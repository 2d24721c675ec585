"""The PULL configuration generator, the single-chain baseline and the planner loop.

One call of :func:`pull_step` produces the next configuration by repeatedly
pulling chains of agents toward unoccupied vertices.  A chain toward ``t``
starts at a non-cut vertex of ``G[Q ∪ {t}]`` that reaches ``t`` without
crossing agents already assigned this step, and every agent on the chain
shifts one hop along the BFS tree rooted at ``t``.
"""

from __future__ import annotations

from collections.abc import Callable, Collection, Iterable, Sequence
from dataclasses import dataclass, field

from .core import Configuration, Instance, Plan, PlannerError
from .graph import (
    DistanceField,
    Graph,
    articulation_points,
    bfs_parents,
    components_of,
    is_connected_set,
    min_pair_distance,
    multi_source_distance,
)

ALGORITHMS = ("pull", "single")


@dataclass
class GoalComponents:
    """Components of ``G[Q ∩ T]``, largest first."""

    parts: list[set[int]]

    @property
    def p_max(self) -> int:
        return len(self.parts[0]) if self.parts else 0


def goal_components(graph: Graph, config: Iterable[int], targets: Collection[int]) -> GoalComponents:
    return GoalComponents(components_of(graph, {v for v in config if v in targets}))


@dataclass
class StepState:
    """Working data of one generator call.

    ``q_cur`` holds the intermediate configuration.  ``holder`` maps each vertex
    occupied by a not-yet-reserved agent to that agent; ``occupied`` counts the
    agents on every vertex.  Without constraints both describe the same set, but
    a constrained agent may be placed on a vertex whose unreserved occupant has
    yet to leave, and then the vertex stays pullable through ``holder``.
    """

    graph: Graph
    q_from: tuple[int, ...]
    dist_to_T: DistanceField
    q_cur: list[int] = field(init=False)
    reserved: set[int] = field(default_factory=set)
    holder: dict[int, int] = field(init=False)
    occupied: dict[int, int] = field(init=False)
    priority: dict[int, int] = field(default_factory=dict)
    # trace of the most recent pull_chain call
    last_parent: dict[int, int] | None = None
    cut_set: set[int] | None = None
    candidates: set[int] | None = None
    chain_start: int | None = None

    def __post_init__(self) -> None:
        self.q_cur = list(self.q_from)
        self.holder = {v: i for i, v in enumerate(self.q_from)}
        self.occupied = dict.fromkeys(self.q_from, 1)

    def pri(self, v: int) -> int:
        p = self.priority.get(v)
        return self.dist_to_T.dist[v] if p is None else p

    def is_unoccupied(self, v: int) -> bool:
        return v not in self.occupied

    def _leave(self, v: int) -> None:
        c = self.occupied[v] - 1
        if c:
            self.occupied[v] = c
        else:
            del self.occupied[v]

    def _enter(self, v: int) -> None:
        self.occupied[v] = self.occupied.get(v, 0) + 1

    def reserve(self, i: int) -> None:
        """Freeze agent ``i`` where it currently stands."""
        if i in self.reserved:
            return
        self.reserved.add(i)
        v = self.q_cur[i]
        if self.holder.get(v) == i:
            del self.holder[v]

    def assign(self, i: int, v: int) -> None:
        """Reserve agent ``i`` and send it to ``v`` (constraint placement)."""
        if i in self.reserved:
            raise ValueError(f"agent {i} is already assigned")
        u = self.q_cur[i]
        if self.holder.get(u) == i:
            del self.holder[u]
        self.reserved.add(i)
        self._leave(u)
        self._enter(v)
        self.q_cur[i] = v

    def configuration(self) -> Configuration:
        return Configuration(self.q_cur)


def pull_chain(state: StepState, t: int, avoid: Collection[int] = ()) -> bool:
    """Try to pull a chain of unreserved agents toward ``t``.

    Returns whether a chain was committed.  Every moved agent is reserved.
    """
    if t in state.occupied:
        raise ValueError(f"target {t} is occupied")
    graph = state.graph
    holder = state.holder
    domain = set(holder)
    domain.add(t)
    parent = bfs_parents(graph, domain, t)
    state.last_parent = parent
    cand = [v for v in parent if v != t and v not in avoid]
    if not cand:
        state.cut_set = None
        state.candidates = set()
        state.chain_start = None
        return False
    occ = set(state.occupied)
    occ.add(t)
    cut = articulation_points(graph, occ)
    vs = [v for v in cand if v not in cut]
    state.cut_set = cut
    state.candidates = set(vs)
    if not vs:
        state.chain_start = None
        return False
    pri = state.pri
    cur = max(vs, key=lambda v: (pri(v), -v))
    state.chain_start = cur
    q_cur = state.q_cur
    reserved = state.reserved
    while cur != t:
        i = holder.pop(cur)
        nxt = parent[cur]
        q_cur[i] = nxt
        reserved.add(i)
        state._leave(cur)
        state._enter(nxt)
        cur = nxt
    return True


def sorted_frontier(graph: Graph, dist_to_T: DistanceField, q_from: Sequence[int]) -> list[int]:
    """``N(Q)`` sorted by distance to T, ties by vertex id, via bucket sort.

    For a connected Q every frontier distance lies in ``[d0 - 1, d0 + n]``
    where ``d0`` is the smallest distance of Q, so ``n + 2`` buckets suffice.
    """
    frontier = graph.neighborhood(q_from)
    dist = dist_to_T.dist
    d0 = min(dist[v] for v in q_from)
    lo = max(d0 - 1, 0)
    buckets: list[list[int]] = [[] for _ in range(d0 + len(q_from) - lo + 1)]
    overflow: list[int] = []
    for u in frontier:
        k = dist[u] - lo
        if k < len(buckets):
            buckets[k].append(u)
        else:  # only for a disconnected Q
            overflow.append(u)
    out: list[int] = []
    for b in buckets:
        b.sort()
        out.extend(b)
    overflow.sort(key=lambda u: (dist[u], u))
    out.extend(overflow)
    return out


def run_generator(state: StepState, targets: Collection[int], first_only: bool = False) -> StepState:
    """Top-level PULL control flow over a prepared :class:`StepState`.

    ``first_only`` stops after the first committed chain (the baseline).
    """
    graph = state.graph
    q_from = state.q_from
    from_agent = {v: i for i, v in enumerate(q_from)}
    reached = [v for v in q_from if v in targets]
    if reached:
        for part in components_of(graph, reached):
            for v in sorted(graph.neighborhood(part)):
                if v in targets and v not in state.occupied:
                    if pull_chain(state, v, part) and first_only:
                        return state
            for v in part:
                i = from_agent[v]
                if state.q_cur[i] == v:
                    state.reserve(i)
    for u in sorted_frontier(graph, state.dist_to_T, q_from):
        if u not in state.occupied:
            if pull_chain(state, u) and first_only:
                return state
    return state


def _check_from(graph: Graph, q_from: Sequence[int]) -> None:
    if not is_connected_set(graph, set(q_from)):
        raise ValueError("q_from is not connected")


def pull_step(
    graph: Graph,
    dist_to_T: DistanceField,
    q_from: Configuration | Sequence[int],
    targets: Collection[int],
) -> Configuration:
    q = tuple(q_from)
    _check_from(graph, q)
    return run_generator(StepState(graph, q, dist_to_T), targets).configuration()


def single_step(
    graph: Graph,
    dist_to_T: DistanceField,
    q_from: Configuration | Sequence[int],
    targets: Collection[int],
) -> Configuration:
    """Baseline generator: the same control flow, stopping after one chain."""
    q = tuple(q_from)
    _check_from(graph, q)
    return run_generator(StepState(graph, q, dist_to_T), targets, first_only=True).configuration()


StepFn = Callable[[Graph, DistanceField, Sequence[int], Collection[int]], Configuration]

_STEPS: dict[str, StepFn] = {"pull": pull_step, "single": single_step}


def plan(
    instance: Instance,
    algo: str = "pull",
    dist_to_T: DistanceField | None = None,
) -> Plan:
    """Iterate a step generator from S until the configuration equals T as a set."""
    try:
        step = _STEPS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}") from None
    graph = instance.graph
    targets = instance.target_set
    field_ = dist_to_T or multi_source_distance(graph, targets)
    d0, _, _ = min_pair_distance(graph, instance.starts, targets, field_)
    budget = d0 + instance.n - 1
    q = Configuration(instance.starts)
    steps = [q]
    while q.vertex_set() != targets:
        if len(steps) > budget:  # the next step would exceed the makespan bound
            raise PlannerError(f"{algo} exceeded the step budget of {budget}")
        q = step(graph, field_, q.positions, targets)
        steps.append(q)
    return Plan(steps)
