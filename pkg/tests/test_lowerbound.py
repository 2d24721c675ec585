import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from cumapf.core import Instance
from cumapf.graph import Graph
from cumapf.instances import gen_grid3, gen_random, gen_tight
from cumapf.lowerbound import (
    bottleneck_value, distance_table, has_perfect_matching, instance_lb,
)
from cumapf.pull import plan


def brute_bottleneck(d):
    n = len(d)
    return min(max(d[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def test_two_by_two():
    assert bottleneck_value([[1, 5], [5, 1]]) == 1
    assert bottleneck_value([[5, 1], [1, 5]]) == 1


def test_path_table():
    g = Graph.grid(1, 3)
    assert distance_table(g, [0], [2]).d == ((2,),)


def test_identity_is_zero():
    g = Graph.grid(4, 4)
    inst = Instance(g, (0, 1, 2), (0, 1, 2))
    assert instance_lb(inst) == 0


def test_grid3_table_and_value():
    for k in (3, 5, 8):
        inst = gen_grid3(k)
        table = distance_table(inst.graph, inst.starts, inst.targets)
        for i, s in enumerate(inst.starts):
            for j, t in enumerate(inst.targets):
                rs = inst.graph.coord(s)[0]
                rt = inst.graph.coord(table.cols[j])[0]
                assert table.d[i][j] == 2 + abs(rs - rt)
        assert instance_lb(inst) == 2


def test_tight_bound_is_below_optimum():
    inst = gen_tight(5, 4)
    assert instance_lb(inst) <= 9


def test_matching_threshold_monotone():
    d = [[3, 1, 4], [1, 5, 9], [2, 6, 5]]
    flags = [has_perfect_matching(d, th) for th in range(10)]
    assert flags == sorted(flags)
    assert flags.index(True) == brute_bottleneck(d)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 12), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_matches_permutation_enumeration(d):
    assert bottleneck_value(d) == brute_bottleneck(d)


def test_lb_never_exceeds_pull():
    g = Graph.grid(9, 9)
    for idx in range(15):
        inst = gen_random(g, 8, 11, idx)
        assert instance_lb(inst) <= plan(inst).makespan
