"""Seeded random instances shared by the test modules.

Every generator takes an explicit random.Random so failures reproduce from
the seed alone. Model generation rejects drafts whose uniform strategy
spaces are too large for the enumeration paths the tests exercise.
"""

from __future__ import annotations

import itertools
import random
from typing import List, Optional, Sequence, Tuple

from acgs.formulas import (
    Atom,
    Next,
    Not,
    PAnd,
    PathFormula,
    PathState,
    PNot,
    Release,
    StateFormula,
    Until,
)
from acgs.model import Cgs, count_uniform_strategies
from acgs.paritygame import ParityGame

PROPS = ("p", "q", "r")


def random_parity_game(rng: random.Random, max_vertices: int = 10,
                       max_rank: int = 4) -> ParityGame:
    n = rng.randint(2, max_vertices)
    names = ["v%d" % i for i in range(n)]
    owner = {v: rng.randint(0, 1) for v in names}
    rank = {v: rng.randint(0, max_rank) for v in names}
    succ = {}
    for v in names:
        deg = rng.randint(1, min(3, n))
        succ[v] = tuple(rng.sample(names, deg))
    return ParityGame(owner=owner, rank=rank, succ=succ)


def random_lasso(rng: random.Random, props: Sequence[str] = PROPS,
                 max_stem: int = 3, max_loop: int = 3
                 ) -> Tuple[List[frozenset], List[frozenset]]:
    def letter() -> frozenset:
        return frozenset(p for p in props if rng.random() < 0.5)

    stem = [letter() for _ in range(rng.randint(0, max_stem))]
    loop = [letter() for _ in range(rng.randint(1, max_loop))]
    return stem, loop


def random_ltl(rng: random.Random, size: int,
               props: Sequence[str] = PROPS) -> PathFormula:
    if size <= 1:
        pick = rng.random()
        if pick < 0.1:
            return PathState(Atom("true") if rng.random() < 0.5 else Atom("false"))
        name = rng.choice(list(props))
        if pick < 0.4:
            return PathState(Not(Atom(name)))
        return PathState(Atom(name))
    shape = rng.choice(("not", "next", "and", "until", "release"))
    if shape == "not":
        return PNot(random_ltl(rng, size - 1, props))
    if shape == "next":
        return Next(random_ltl(rng, size - 1, props))
    lsize = rng.randint(1, size - 1)
    left = random_ltl(rng, lsize, props)
    right = random_ltl(rng, size - lsize, props)
    if shape == "and":
        return PAnd(left, right)
    if shape == "until":
        return Until(left, right)
    return Release(left, right)


def _random_partition(rng: random.Random, items: Sequence) -> List[tuple]:
    blocks = rng.randint(1, max(1, len(items) - 1))
    assign = {}
    for it in items:
        assign.setdefault(rng.randrange(blocks), []).append(it)
    return [tuple(v) for v in assign.values()]


def random_cgs(rng: random.Random, max_states: int = 6, max_agents: int = 3,
               abilities: Sequence[str] = ("IR", "Ir", "ir"),
               max_actions: int = 3, props: Sequence[str] = ("p", "q"),
               cap_product: int = 128) -> Cgs:
    while True:
        n = rng.randint(3, max_states)
        states = tuple("s%d" % i for i in range(n))
        agents = tuple("a%d" % (i + 1) for i in range(rng.randint(2, max_agents)))
        ability = {i: rng.choice(list(abilities)) for i in agents}
        actions = {}
        for i in agents:
            k = rng.randint(1, max_actions)
            actions[i] = tuple("%s_m%d" % (i, j) for j in range(k))

        obs = {}
        for i in agents:
            if ability[i] == "ir":
                blocks = _random_partition(rng, states)
                obs[i] = {s: b for b in blocks for s in b}

        protocol = {}
        for i in agents:
            if i in obs:
                per_block = {}
                for block in set(obs[i].values()):
                    size = rng.randint(1, len(actions[i]))
                    per_block[block] = tuple(rng.sample(actions[i], size))
                protocol[i] = {s: per_block[obs[i][s]] for s in states}
            else:
                protocol[i] = {}
                for s in states:
                    size = rng.randint(1, len(actions[i]))
                    protocol[i][s] = tuple(rng.sample(actions[i], size))

        memoryless = [i for i in agents if ability[i] in ("Ir", "ir")]
        m = Cgs(
            states=states,
            initial=frozenset({states[0]}),
            agents=agents,
            actions=actions,
            protocol=protocol,
            transitions={
                (s, joint): rng.choice(states)
                for s in states
                for joint in itertools.product(*(protocol[i][s] for i in agents))
            },
            labels={p: frozenset(s for s in states if rng.random() < 0.5)
                    for p in props},
            obs=obs,
            ability=ability,
        )
        if count_uniform_strategies(m, memoryless) <= cap_product:
            return m


def random_simple_coalition_formula(rng: random.Random, agents: Sequence[str],
                                    props: Sequence[str] = ("p", "q"),
                                    allow_empty: bool = True) -> str:
    lo = 0 if allow_empty else 1
    team = rng.sample(list(agents), rng.randint(lo, len(agents)))
    head = "<<%s>>" % ",".join(team)

    def literal() -> str:
        name = rng.choice(list(props))
        return "!" + name if rng.random() < 0.4 else name

    shape = rng.choice(("X", "F", "G", "U", "R"))
    if shape in ("X", "F", "G"):
        return "%s %s %s" % (head, shape, literal())
    return "%s (%s %s %s)" % (head, literal(), shape, literal())
