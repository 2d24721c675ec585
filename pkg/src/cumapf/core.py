"""Configurations, instances, plans and the plan validator.

The five validity conditions checked by :func:`validate_plan`:

1. the first step equals S and the last equals T, both as vertex sets;
2. every agent stays or moves to a neighbour between steps;
3. no two agents share a vertex;
4. no two agents exchange vertices across a step;
5. every step induces a connected subgraph.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

from .graph import Graph, is_connected_set


class InvalidInstanceError(ValueError):
    """The instance violates |S| = |T|, duplicate-freeness or connectivity."""


class PlannerError(RuntimeError):
    """A planner broke one of its own guarantees; always an implementation bug."""


@dataclass(frozen=True)
class Configuration:
    """Agent positions, ``positions[i]`` being the vertex of agent ``i``."""

    positions: tuple[int, ...]
    occupancy: dict[int, int] = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, positions: Iterable[int]) -> None:
        object.__setattr__(self, "positions", tuple(positions))
        object.__setattr__(self, "occupancy", {v: i for i, v in enumerate(self.positions)})

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, i: int) -> int:
        return self.positions[i]

    def __iter__(self):
        return iter(self.positions)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.positions)

    def key(self) -> tuple[int, ...]:
        """Unlabeled canonical form: the sorted vertex tuple."""
        return tuple(sorted(self.positions))

    def agent_at(self, v: int) -> int | None:
        return self.occupancy.get(v)

    def has_duplicates(self) -> bool:
        return len(self.occupancy) != len(self.positions)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    starts: tuple[int, ...]
    targets: tuple[int, ...]
    seed: int = 0
    map_path: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(self.starts))
        object.__setattr__(self, "targets", tuple(self.targets))
        n_vertices = self.graph.vertex_count
        for name, vs in (("starts", self.starts), ("targets", self.targets)):
            if not vs:
                raise InvalidInstanceError(f"{name} is empty")
            if len(set(vs)) != len(vs):
                raise InvalidInstanceError(f"{name} contains duplicate vertices")
            if any(not 0 <= v < n_vertices for v in vs):
                raise InvalidInstanceError(f"{name} has a vertex id out of range")
            if not is_connected_set(self.graph, set(vs)):
                raise InvalidInstanceError(f"{name} does not induce a connected subgraph")
        if len(self.starts) != len(self.targets):
            raise InvalidInstanceError(
                f"|S|={len(self.starts)} differs from |T|={len(self.targets)}"
            )

    @property
    def n(self) -> int:
        return len(self.starts)

    @property
    def target_set(self) -> frozenset[int]:
        return frozenset(self.targets)


@dataclass
class Plan:
    steps: list[Configuration]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a plan has at least one configuration")

    @property
    def makespan(self) -> int:
        return len(self.steps) - 1

    def to_json(self) -> str:
        data = {"makespan": self.makespan, "steps": [list(q.positions) for q in self.steps]}
        return json.dumps(data, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Plan:
        data = json.loads(text)
        plan = cls([Configuration(step) for step in data["steps"]])
        if "makespan" in data and data["makespan"] != plan.makespan:
            raise ValueError("makespan field disagrees with the step count")
        return plan


class Violation(NamedTuple):
    step: int
    condition: int
    agents: tuple[int, ...]
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def extend(self, other: ValidationReport) -> None:
        self.violations.extend(other.violations)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        lines = [f"step {v.step}: condition {v.condition}: {v.message}" for v in self.violations]
        return "\n".join(lines)


def _positions(q: Configuration | Sequence[int]) -> tuple[int, ...]:
    return q.positions if isinstance(q, Configuration) else tuple(q)


def is_connected_config(graph: Graph, config: Configuration | Sequence[int]) -> bool:
    pos = _positions(config)
    return is_connected_set(graph, set(pos))


def _vertex_conflicts(pos: tuple[int, ...], step: int) -> list[Violation]:
    seen: dict[int, int] = {}
    out = []
    for i, v in enumerate(pos):
        j = seen.setdefault(v, i)
        if j != i:
            out.append(Violation(step, 3, (j, i), f"agents {j} and {i} share vertex {v}"))
    return out


def validate_transition(
    graph: Graph,
    prev: Configuration | Sequence[int],
    nxt: Configuration | Sequence[int],
    step: int = 1,
) -> ValidationReport:
    """Check reachability, vertex and swap conflicts of one transition.

    ``step`` is the index of ``nxt`` in the plan and only labels violations.
    """
    a, b = _positions(prev), _positions(nxt)
    if len(a) != len(b):
        raise ValueError(f"agent count mismatch: {len(a)} vs {len(b)}")
    report = ValidationReport()
    adj = graph.adj
    for i, (u, v) in enumerate(zip(a, b)):
        if u != v and v not in adj[u]:
            report.violations.append(
                Violation(step, 2, (i,), f"agent {i} jumps from {u} to non-adjacent {v}")
            )
    report.violations.extend(_vertex_conflicts(b, step))
    where_prev: dict[int, int] = {}
    for i, u in enumerate(a):
        where_prev.setdefault(u, i)
    for i, (u, v) in enumerate(zip(a, b)):
        if u == v:
            continue
        j = where_prev.get(v)
        if j is not None and j > i and b[j] == u:
            report.violations.append(
                Violation(step, 4, (i, j), f"agents {i} and {j} swap {u} <-> {v}")
            )
    return report


def validate_plan(instance: Instance, plan: Plan) -> ValidationReport:
    graph = instance.graph
    report = ValidationReport()
    steps = [_positions(q) for q in plan.steps]
    n = instance.n
    for k, pos in enumerate(steps):
        if len(pos) != n:
            report.violations.append(
                Violation(k, 1, (), f"step has {len(pos)} agents, instance has {n}")
            )
            return report
    if set(steps[0]) != set(instance.starts):
        report.violations.append(Violation(0, 1, (), "first configuration differs from S"))
    if set(steps[-1]) != set(instance.targets):
        report.violations.append(
            Violation(len(steps) - 1, 1, (), "last configuration differs from T")
        )
    report.violations.extend(_vertex_conflicts(steps[0], 0))
    for k in range(1, len(steps)):
        report.extend(validate_transition(graph, steps[k - 1], steps[k], step=k))
    for k, pos in enumerate(steps):
        if not is_connected_set(graph, set(pos)):
            report.violations.append(Violation(k, 5, (), "configuration is disconnected"))
    report.violations.sort(key=lambda v: (v.step, v.condition))
    return report
