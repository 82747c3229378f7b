"""Strategy-enumeration backend, checked against hand walks and the oracle."""

import random

import pytest

from acgs.benchmarks import gen_figure1
from acgs.enumcheck import (
    check_simple_atl,
    combination_count,
    ctl_universal,
    normalize_abilities,
)
from acgs.errors import (
    AlgorithmInapplicable,
    StrategySpaceExceeded,
    UndecidableConfiguration,
)
from acgs.model import Cgs, prune
from acgs.oracle import oracle_simple_atl

from randgen import random_cgs

ALL = frozenset(("s0", "s1", "s2", "s3"))
Q = frozenset(("s0", "s1", "s2"))


def fig1(a1="IR", a2="ir"):
    m, _ = gen_figure1((a1, a2))
    return m


def b1_pruned():
    m = fig1()
    return prune(m, {"a2": {s: "b1" for s in m.states}})


# -- universal fixpoints ----------------------------------------------------------

def test_all_next_trivial_on_full_target():
    m = fig1()
    assert ctl_universal(m, ("X", ALL)) == set(ALL)


def test_all_next_on_pruned_graph():
    # under b1 the graph is s0>s1>s1, s2>s3>s0
    assert ctl_universal(b1_pruned(), ("X", {"s1"})) == {"s0", "s1"}


def test_all_until_misses_states_that_can_dodge():
    got = ctl_universal(b1_pruned(), ("U", ALL, ALL - Q))
    assert got == {"s2", "s3"}


def test_all_release_is_the_safety_set():
    assert ctl_universal(b1_pruned(), ("R", frozenset(), Q)) == {"s0", "s1"}


def test_until_needs_first_component_along_the_way():
    # s3 reaches s0 in one step, but stepping stones must satisfy T1
    m = b1_pruned()
    assert ctl_universal(m, ("U", {"s3"}, {"s0"})) == {"s0", "s3"}
    assert ctl_universal(m, ("U", frozenset(), {"s0"})) == {"s0"}


def test_rejects_malformed_goals():
    m = fig1()
    with pytest.raises(AlgorithmInapplicable):
        ctl_universal(m, ("W", ALL, ALL))
    with pytest.raises(AlgorithmInapplicable):
        ctl_universal(m, ("X", ALL, ALL))
    with pytest.raises(AlgorithmInapplicable):
        ctl_universal(m, "Xq")
    with pytest.raises(ValueError):
        ctl_universal(m, ("X", {"s9"}))


# -- ability normalization --------------------------------------------------------

def test_normalize_demotes_recall_inside_the_coalition():
    m = fig1("IR", "ir")
    got = normalize_abilities(m, ["a1"])
    assert got.ability == {"a1": "Ir", "a2": "ir"}


def test_normalize_leaves_outsiders_and_empty_coalitions_alone():
    m = fig1("IR", "ir")
    assert normalize_abilities(m, []) is m
    assert normalize_abilities(m, ["a2"]) is m


def test_normalize_rejects_recall_under_imperfection():
    m = fig1("IR", "iR")
    with pytest.raises(UndecidableConfiguration):
        normalize_abilities(m, ["a1"])


def test_normalize_rejects_unknown_agents():
    with pytest.raises(ValueError):
        normalize_abilities(fig1(), ["а1"])  # cyrillic lookalike


# -- coalition checking -----------------------------------------------------------

KEEP_Q = ("R", frozenset(), Q)


def test_keeping_q_depends_on_the_opponents_ability():
    assert check_simple_atl(fig1("IR", "ir"), ["a1"], KEEP_Q) == {"s0"}
    assert check_simple_atl(fig1("IR", "Ir"), ["a1"], KEEP_Q) == set()
    assert check_simple_atl(fig1("IR", "IR"), ["a1"], KEEP_Q) == set()


def test_empty_coalition_quantifies_over_opponents_only():
    assert check_simple_atl(fig1("IR", "ir"), [], KEEP_Q) == {"s0"}
    assert check_simple_atl(fig1("IR", "IR"), [], KEEP_Q) == set()


def test_observing_coalitions_reach_more():
    reach_s3 = ("U", ALL, frozenset({"s3"}))
    assert check_simple_atl(fig1("IR", "ir"), ["a2"], reach_s3) == {"s1", "s2", "s3"}
    assert check_simple_atl(fig1("IR", "Ir"), ["a2"], reach_s3) == set(ALL)
    assert check_simple_atl(fig1("IR", "IR"), ["a2"], reach_s3) == set(ALL)


def test_result_can_be_empty_and_x_goals_work():
    m = fig1("IR", "ir")
    assert check_simple_atl(m, ["a2"], ("X", frozenset({"s3"}))) == {"s1", "s2"}
    assert check_simple_atl(m, ["a1"], ("X", frozenset({"s3"}))) == set()


def test_budget_guard_reports_both_numbers():
    m = fig1("IR", "ir")
    with pytest.raises(StrategySpaceExceeded) as got:
        check_simple_atl(m, ["a2"], KEEP_Q, budget=1)
    assert "budget of 1" in str(got.value)


def test_combination_count_matches_the_enumerated_space():
    # a2 has classes {s0,s1,s2} and {s3}, two actions each: 4 strategies
    assert combination_count(fig1("IR", "ir"), ["a2"]) == 4
    # as opponent its perfect-information variant picks per state: 2^4
    assert combination_count(fig1("IR", "Ir"), ["a1"]) == 16
    assert combination_count(fig1("IR", "IR"), ["a1"]) == 1


def test_parallel_and_sequential_agree():
    rng = random.Random(424242)
    m = None
    while m is None or combination_count(m, m.agents[:1]) < 64:
        m = random_cgs(rng, max_states=6, abilities=("Ir", "ir"))
    coalition = m.agents[:1]
    body = ("U", frozenset(m.states), frozenset(m.states[:2]))
    assert (check_simple_atl(m, coalition, body, jobs=2)
            == check_simple_atl(m, coalition, body))


def test_agrees_with_the_exhaustive_oracle():
    rng = random.Random(62831)
    for _ in range(120):
        m = random_cgs(rng, max_states=5, max_agents=3)
        agents = list(m.agents)
        coalition = rng.sample(agents, rng.randrange(len(agents) + 1))
        shape = rng.choice(("X", "U", "R"))
        pick = lambda: frozenset(s for s in m.states if rng.random() < 0.5)
        body = ("X", pick()) if shape == "X" else (shape, pick(), pick())
        assert check_simple_atl(m, coalition, body) == \
            oracle_simple_atl(m, coalition, body), (m.states, coalition, body)
