import time

import pytest

from cumapf.core import Instance, PlannerError, validate_plan
from cumapf.graph import Graph, multi_source_distance
from cumapf.instances import gen_grid3, gen_random, gen_tight
from cumapf.pull import (
    StepState, goal_components, plan, pull_chain, pull_step, single_step, sorted_frontier,
)

from conftest import v


def names(g, vs):
    return {v(g, s) for s in vs}


class TestWorkedExample:
    def test_pull_step_output(self, worked):
        g, starts, targets, q_to = worked
        f = multi_source_distance(g, targets)
        assert pull_step(g, f, starts, set(targets)).positions == q_to

    def test_first_chain(self, worked):
        g, starts, targets, _ = worked
        state = StepState(g, starts, multi_source_distance(g, targets))
        ok = pull_chain(state, v(g, "v4-3"), names(g, ["v3-2", "v4-1", "v4-2"]))
        assert ok
        assert state.chain_start == v(g, "v1-2")
        assert state.reserved == {0, 2, 4, 6}
        assert {v(g, "v1-2"), v(g, "v2-1"), v(g, "v2-3")} <= state.candidates
        assert state.q_cur[0] == v(g, "v2-2")
        assert state.q_cur[6] == v(g, "v4-3")

    def test_second_chain_fails(self, worked):
        g, starts, targets, _ = worked
        state = StepState(g, starts, multi_source_distance(g, targets))
        part = names(g, ["v3-2", "v4-1", "v4-2"])
        pull_chain(state, v(g, "v4-3"), part)
        before = list(state.q_cur)
        assert not pull_chain(state, v(g, "v5-1"), part)
        assert state.candidates == set()
        assert state.q_cur == before

    def test_single_runs_only_first_chain(self, worked):
        g, starts, targets, _ = worked
        f = multi_source_distance(g, targets)
        out = single_step(g, f, starts, set(targets))
        for i in (1, 3, 5):
            assert out[i] == starts[i]
        assert out[6] == v(g, "v4-3")
        assert out[0] == v(g, "v2-2")

    def test_occupied_target_rejected(self, worked):
        g, starts, targets, _ = worked
        state = StepState(g, starts, multi_source_distance(g, targets))
        with pytest.raises(ValueError):
            pull_chain(state, starts[0])


def test_goal_is_fixed_point():
    g = Graph.grid(4, 4)
    inst = gen_random(g, 5, 1)
    f = multi_source_distance(g, inst.targets)
    tq = inst.targets
    assert pull_step(g, f, tq, inst.target_set).positions == tq
    assert single_step(g, f, tq, inst.target_set).positions == tq


def test_single_agent_advances_one_hop():
    g = Graph.grid(1, 6)
    f = multi_source_distance(g, [5])
    assert pull_step(g, f, [0], {5}).positions == (1,)
    assert plan(Instance(g, (0,), (5,))).makespan == 5


def test_disconnected_input_rejected():
    g = Graph.grid(1, 6)
    f = multi_source_distance(g, [4, 5])
    with pytest.raises(ValueError):
        pull_step(g, f, [0, 2], {4, 5})


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        plan(gen_tight(2, 2), "greedy")


def test_goal_components_largest_first(worked):
    g, starts, targets, _ = worked
    gc = goal_components(g, starts, set(targets))
    assert gc.p_max == 3
    assert goal_components(g, [0], {14}).p_max == 0


def test_frontier_sorted_by_distance_then_id():
    g = Graph.grid(6, 6)
    inst = gen_random(g, 7, 4)
    f = multi_source_distance(g, inst.targets)
    out = sorted_frontier(g, f, inst.starts)
    assert out == sorted(g.neighborhood(inst.starts), key=lambda u: (f.dist[u], u))


@pytest.mark.parametrize("k,ell", [(1, 1), (2, 3), (5, 4), (4, 1)])
def test_tight_family_makespan(k, ell):
    assert plan(gen_tight(k, ell)).makespan == k + ell


def test_grid3_blowup():
    for k in (4, 8, 16):
        assert plan(gen_grid3(k)).makespan >= k / 2


def test_plans_valid_and_deterministic():
    g = Graph.grid(10, 10)
    for idx in range(8):
        inst = gen_random(g, 12, 5, idx)
        for algo in ("pull", "single"):
            p = plan(inst, algo)
            assert validate_plan(inst, p).ok
            assert p.to_json() == plan(inst, algo).to_json()


def test_step_budget_guard(monkeypatch):
    import cumapf.pull as pull_mod

    monkeypatch.setitem(pull_mod._STEPS, "pull", lambda g, f, q, t: pull_mod.Configuration(q))
    with pytest.raises(PlannerError):
        plan(gen_tight(2, 2), "pull")


def test_worked_step_is_fast(worked):
    g, starts, targets, _ = worked
    f = multi_source_distance(g, targets)
    t0 = time.perf_counter()
    for _ in range(50):
        pull_step(g, f, starts, set(targets))
    assert (time.perf_counter() - t0) / 50 < 1e-3
