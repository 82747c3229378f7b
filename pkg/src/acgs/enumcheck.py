"""Coalition checking by strategy enumeration over pruned models.

Decides goals with one outermost temporal operator: each memoryless joint
strategy of the coalition is tried in turn, and one wins at a state if the
goal holds on every path from there in every model obtained by also fixing
the memoryless opponents. Perfect-information perfect-recall opponents are
never enumerated: once the memoryless agents are fixed, each path taken
separately is a behavior they could produce, so quantifying over all paths
of the pruned model already covers them.

Imperfect-information agents must act uniformly across observation classes,
so their strategy spaces are finite; perfect-information memoryless agents
are enumerated through the identity-observation rewrite in the model
module. The product of the two strategy-space sizes is guarded by a budget
because it grows exponentially with the number of observation classes.
"""

from __future__ import annotations

import itertools
import multiprocessing
from collections import deque
from typing import Any, Dict, List, Set, Tuple

from .errors import AlgorithmInapplicable, StrategySpaceExceeded, UndecidableConfiguration
from .model import (
    Cgs,
    as_uniform_memoryless,
    count_uniform_strategies,
    enumerate_uniform_strategies,
    prune,
)

STRATEGY_BUDGET = 10 ** 6

# forking pays off only when there are enough coalition strategies to split
PARALLEL_THRESHOLD = 64


def require_decidable(m: Cgs) -> None:
    """Refuse models where some agent mixes imperfect information with
    perfect recall; no algorithm can decide coalition goals for them."""
    for i in m.agents:
        if m.ability[i] == "iR":
            raise UndecidableConfiguration(
                "agent %r has imperfect information with perfect recall; "
                "coalition formulas over such models are undecidable" % (i,))


def normalize_abilities(m: Cgs, coalition) -> Cgs:
    """Demote perfect-recall coalition members to memoryless.

    For a goal with a single outermost temporal operator a winning
    perfect-information strategy can always be replaced by a memoryless
    one, so the demotion keeps the answer while making the coalition
    enumerable. Agents outside the coalition are untouched.
    """
    require_decidable(m)
    wanted = set(coalition)
    unknown = wanted - set(m.agents)
    if unknown:
        raise ValueError("unknown coalition agent(s): %s"
                         % ", ".join(repr(i) for i in sorted(unknown, key=str)))
    demoted = {i: "Ir" for i in wanted if m.ability[i] == "IR"}
    if not demoted:
        return m
    return m.with_ability({**m.ability, **demoted})


# -- universal fixpoints ----------------------------------------------------------

def _coerce_body(m: Cgs, body) -> tuple:
    if not (isinstance(body, tuple) and body and body[0] in ("X", "U", "R")):
        raise AlgorithmInapplicable(
            "goal must be an X, U or R operator over state sets, got %r" % (body,))
    want = 2 if body[0] == "X" else 3
    if len(body) != want:
        raise AlgorithmInapplicable(
            "%s goal takes %d state set(s), got %d" % (body[0], want - 1, len(body) - 1))
    known = set(m.states)
    args = []
    for arg in body[1:]:
        got = frozenset(arg)
        stray = got - known
        if stray:
            raise ValueError("goal mentions unknown state(s): %s"
                             % ", ".join(repr(s) for s in sorted(stray, key=str)))
        args.append(got)
    return (body[0], *args)


def ctl_universal(m: Cgs, body) -> Set[Any]:
    """States from which every protocol-conforming path meets the goal.

    The goal is ("X", T), ("U", T1, T2) or ("R", T1, T2) over state sets:
    all successors in T, all paths reach T2 through T1, or all paths stay
    in T2 unless T1 released them earlier.
    """
    return _universal(m, _coerce_body(m, body))


def _universal(m: Cgs, body: tuple) -> Set[Any]:
    succ = {s: m.succ_states(s) for s in m.states}
    if body[0] == "X":
        goal = body[1]
        return {s for s in m.states if all(t in goal for t in succ[s])}

    preds: Dict[Any, Set[Any]] = {s: set() for s in m.states}
    for s, targets in succ.items():
        for t in targets:
            preds[t].add(s)
    first, second = body[1], body[2]

    if body[0] == "U":
        # least fixpoint of Z = T2 or (T1 and all successors in Z), grown
        # by counting how many successors each state still waits for
        waiting = {s: len(succ[s]) for s in m.states}
        z = set(second)
        queue = deque(z)
        while queue:
            t = queue.popleft()
            for s in preds[t]:
                waiting[s] -= 1
                if waiting[s] == 0 and s in first and s not in z:
                    z.add(s)
                    queue.append(s)
        return z

    # greatest fixpoint of Z = T2 and (T1 or all successors in Z), shrunk
    # by propagating each removal to the predecessors that relied on it
    z = set(second)
    gone: Set[Any] = set()
    queue = deque()
    for s in z:
        if s not in first and any(t not in z for t in succ[s]):
            gone.add(s)
            queue.append(s)
    while queue:
        s = queue.popleft()
        z.discard(s)
        for p in preds[s]:
            if p in z and p not in gone and p not in first:
                gone.add(p)
                queue.append(p)
    return z


# -- enumeration ----------------------------------------------------------------

def _split(flat: Cgs, coalition) -> Tuple[List[Any], List[Any]]:
    wanted = set(coalition)
    team = [i for i in flat.agents if i in wanted]
    foes = [i for i in flat.agents if i not in wanted and flat.ability[i] == "ir"]
    return team, foes


def combination_count(m: Cgs, coalition) -> int:
    """Size of the strategy space check_simple_atl would enumerate."""
    flat = as_uniform_memoryless(normalize_abilities(m, coalition))
    team, foes = _split(flat, coalition)
    return (count_uniform_strategies(flat, team)
            * count_uniform_strategies(flat, foes))


def check_simple_atl(m: Cgs, coalition, body, budget: int = STRATEGY_BUDGET,
                     jobs: int = 1) -> Set[Any]:
    """States where the coalition can enforce the single-operator goal.

    The result is the union over the coalition's joint uniform strategies
    of the intersection over the memoryless opponents' strategies of the
    universal goal set on the doubly pruned model. `budget` bounds the
    number of (coalition, opponents) strategy pairs; `jobs` forks that many
    workers once the coalition side is large enough to be worth splitting.
    """
    flat = as_uniform_memoryless(normalize_abilities(m, coalition))
    checked = _coerce_body(flat, body)
    team, foes = _split(flat, coalition)
    mine_n = count_uniform_strategies(flat, team)
    combos = mine_n * count_uniform_strategies(flat, foes)
    if combos > budget:
        raise StrategySpaceExceeded(
            "%d strategy combinations exceed the budget of %d; the parity "
            "backend avoids the enumeration" % (combos, budget))
    if jobs > 1 and mine_n >= PARALLEL_THRESHOLD:
        parts = [(flat, team, foes, checked, k, jobs) for k in range(jobs)]
        with multiprocessing.Pool(jobs) as pool:
            return set().union(*pool.map(_strategy_slice, parts))
    return _strategy_slice((flat, team, foes, checked, 0, 1))


def _strategy_slice(args) -> Set[Any]:
    """Union of verdicts over every `stride`-th coalition strategy."""
    m, team, foes, body, offset, stride = args
    won: Set[Any] = set()
    everything = set(m.states)
    strategies = enumerate_uniform_strategies(m, team)
    for mine in itertools.islice(strategies, offset, None, stride):
        alive = everything - won
        if not alive:
            break
        for theirs in enumerate_uniform_strategies(m, foes):
            alive &= _universal(prune(m, {**mine, **theirs}), body)
            if not alive:
                break
        won |= alive
    return won
