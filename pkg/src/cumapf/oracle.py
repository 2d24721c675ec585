"""Exact optimal makespan for tiny instances by BFS over connected vertex sets.

States are sorted vertex tuples.  A set ``B`` follows ``A`` when some
injective map sends every vertex of ``A`` to itself or a neighbour with image
``B``.  A map containing a 2-cycle ``u -> v, v -> u`` gives the same image
as one where both stay put, so swap conflicts never restrict which sets
follow each other; they are removed when an agent-level plan is rebuilt.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Collection, Sequence

from .core import Configuration, Instance, Plan
from .graph import Graph, is_connected_set

SetConfig = tuple[int, ...]


class OracleLimitError(RuntimeError):
    """The instance or the explored state space exceeds the configured caps."""


def _closed(graph: Graph, v: int) -> tuple[int, ...]:
    return (v, *graph.adj[v])


def realize_set_transition(
    graph: Graph, prev: Sequence[int], to: Collection[int]
) -> list[int] | None:
    """Swap-free agent moves taking positions ``prev`` onto the set ``to``.

    Returns the new positions (same agent order) or ``None`` when no
    one-hop perfect matching exists.
    """
    target = set(to)
    n = len(prev)
    if len(target) != n:
        raise ValueError("size mismatch between configuration and target set")
    options = [[w for w in _closed(graph, u) if w in target] for u in prev]
    # staying put first keeps matchings close to the identity
    owner: dict[int, int] = {}
    choice = [-1] * n
    for i, u in enumerate(prev):
        if u in target:
            owner[u] = i
            choice[i] = u
    for i in range(n):
        if choice[i] >= 0:
            continue
        if not _augment(i, options, owner, choice):
            return None
    # undo 2-cycles: both endpoints lie in prev and in to, so staying is valid
    where = {u: i for i, u in enumerate(prev)}
    out = list(choice)
    for i, u in enumerate(prev):
        v = out[i]
        if v == u:
            continue
        j = where.get(v)
        if j is not None and out[j] == u:
            out[i], out[j] = u, v
    return out


def _augment(root: int, options, owner: dict[int, int], choice: list[int]) -> bool:
    seen: set[int] = set()

    def visit(i: int) -> bool:
        for w in options[i]:
            if w in seen:
                continue
            seen.add(w)
            k = owner.get(w)
            if k is None or visit(k):
                owner[w] = i
                choice[i] = w
                return True
        return False

    return visit(root)


def valid_set_transition(graph: Graph, frm: Collection[int], to: Collection[int]) -> bool:
    if len(set(frm)) != len(set(to)):
        raise ValueError("size mismatch")
    return realize_set_transition(graph, sorted(frm), to) is not None


def successor_sets(graph: Graph, state: SetConfig) -> set[SetConfig]:
    """All connected sets reachable from ``state`` in one step."""
    n = len(state)
    out: set[SetConfig] = set()
    used: set[int] = set()
    picked: list[int] = []
    options = [_closed(graph, v) for v in state]

    def rec(k: int) -> None:
        if k == n:
            key = tuple(sorted(picked))
            if key not in out and is_connected_set(graph, set(picked)):
                out.add(key)
            return
        for w in options[k]:
            if w not in used:
                used.add(w)
                picked.append(w)
                rec(k + 1)
                picked.pop()
                used.discard(w)

    rec(0)
    return out


def optimal_makespan(
    instance: Instance,
    max_agents: int = 4,
    max_vertices: int = 25,
    max_states: int = 500_000,
) -> tuple[int, Plan]:
    graph = instance.graph
    if instance.n > max_agents or graph.vertex_count > max_vertices:
        raise OracleLimitError(
            f"instance (n={instance.n}, |V|={graph.vertex_count}) exceeds caps "
            f"(n<={max_agents}, |V|<={max_vertices})"
        )
    start: SetConfig = tuple(sorted(instance.starts))
    goal: SetConfig = tuple(sorted(instance.targets))
    parent: dict[SetConfig, SetConfig | None] = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if s == goal:
            break
        for nxt in sorted(successor_sets(graph, s)):
            if nxt not in parent:
                parent[nxt] = s
                if len(parent) > max_states:
                    raise OracleLimitError(f"more than {max_states} states explored")
                queue.append(nxt)
    else:
        raise RuntimeError("target set unreachable")  # excluded by completeness of PULL
    chain = [goal]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    chain.reverse()
    return len(chain) - 1, relabel_set_path(graph, instance.starts, chain)


def relabel_set_path(graph: Graph, starts: Sequence[int], sets: Sequence[Collection[int]]) -> Plan:
    """Turn a chain of vertex sets into an agent-level plan starting at ``starts``."""
    pos = list(starts)
    steps = [Configuration(pos)]
    for s in sets[1:]:
        nxt = realize_set_transition(graph, pos, s)
        if nxt is None:
            raise ValueError("consecutive sets are not one step apart")
        pos = nxt
        steps.append(Configuration(pos))
    return Plan(steps)
