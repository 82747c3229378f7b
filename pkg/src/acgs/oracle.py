"""Slow reference implementations used to cross-check the real algorithms.

Nothing here shares code with the production checking paths: LTL is
evaluated by definition-chasing on lasso words, and coalition formulas with
a single temporal operator are decided by enumerating strategy pairs and
then every simple lasso of the pruned structure. Everything is deliberately
capped to tiny inputs.
"""

from __future__ import annotations

import itertools
from typing import Any, Dict, FrozenSet, List, Sequence, Set, Tuple

from .formulas import (
    And,
    Atom,
    Next,
    Not,
    PAnd,
    PathState,
    PNot,
    Release,
    StateFormula,
    Until,
)
from .model import Cgs, as_uniform_memoryless, enumerate_uniform_strategies, prune


def eval_prop(f: StateFormula, props: FrozenSet[str]) -> bool:
    """Evaluate a propositional state formula against a label set."""
    if isinstance(f, Atom):
        if f.name == "true":
            return True
        if f.name == "false":
            return False
        return f.name in props
    if isinstance(f, Not):
        return not eval_prop(f.arg, props)
    if isinstance(f, And):
        return eval_prop(f.left, props) and eval_prop(f.right, props)
    raise ValueError("not a propositional formula: %r" % (f,))


def prop_states(m: Cgs, f: StateFormula) -> FrozenSet:
    return frozenset(s for s in m.states if eval_prop(f, m.label_set(s)))


# -- LTL on ultimately periodic words -------------------------------------------

def eval_ltl_on_lasso(p, stem: Sequence[FrozenSet[str]],
                      loop: Sequence[FrozenSet[str]]) -> bool:
    """Truth of a pure LTL path formula on the word stem · loop^ω.

    Positions are walked one orbit at a time: from any starting point the
    remaining word revisits only positions already inspected, so a single
    pass decides Until and Release.
    """
    if not loop:
        raise ValueError("lasso loop must be nonempty")
    seq = list(stem) + list(loop)
    back = len(stem)
    last = len(seq) - 1

    def nxt(i: int) -> int:
        return i + 1 if i < last else back

    def orbit(i: int) -> List[int]:
        seen: Set[int] = set()
        order = []
        while i not in seen:
            seen.add(i)
            order.append(i)
            i = nxt(i)
        return order

    memo: Dict[Tuple[Any, int], bool] = {}

    def ev(node, i: int) -> bool:
        key = (node, i)
        got = memo.get(key)
        if got is None:
            got = compute(node, i)
            memo[key] = got
        return got

    def compute(node, i: int) -> bool:
        if isinstance(node, PathState):
            return eval_prop(node.arg, seq[i])
        if isinstance(node, PNot):
            return not ev(node.arg, i)
        if isinstance(node, PAnd):
            return ev(node.left, i) and ev(node.right, i)
        if isinstance(node, Next):
            return ev(node.arg, nxt(i))
        if isinstance(node, Until):
            for j in orbit(i):
                if ev(node.right, j):
                    return True
                if not ev(node.left, j):
                    return False
            return False
        if isinstance(node, Release):
            for j in orbit(i):
                if not ev(node.right, j):
                    return False
                if ev(node.left, j):
                    return True
            return True
        raise ValueError("not a path formula: %r" % (node,))

    return ev(p, 0)


# -- coalition formulas with one temporal operator -------------------------------

def _lasso_states_ok(path: List, loop_at: int, body: tuple) -> bool:
    op = body[0]
    if op == "X":
        second = path[1] if len(path) > 1 else path[loop_at]
        return second in body[1]
    if op == "U":
        hold, target = body[1], body[2]
        for st in path:
            if st in target:
                return True
            if st not in hold:
                return False
        return False
    if op == "R":
        release, keep = body[1], body[2]
        for st in path:
            if st not in keep:
                return False
            if st in release:
                return True
        return True
    raise ValueError("unknown body operator %r" % (op,))


def _all_lassos_satisfy(m: Cgs, start, body: tuple) -> bool:
    path: List = []
    at: Dict[Any, int] = {}

    def dfs(u) -> bool:
        at[u] = len(path)
        path.append(u)
        try:
            for t in m.succ_states(u):
                j = at.get(t)
                if j is not None:
                    if not _lasso_states_ok(path, j, body):
                        return False
                elif not dfs(t):
                    return False
        finally:
            path.pop()
            del at[u]
        return True

    return dfs(start)


def oracle_simple_atl(m: Cgs, coalition, body: tuple,
                      max_states: int = 8) -> FrozenSet:
    """States satisfying a coalition modality over one temporal operator.

    `body` is ("X", T), ("U", T1, T2) or ("R", T1, T2) with state sets as
    operands. Decides by definition: some joint uniform strategy of the
    coalition such that under every joint uniform strategy of the
    memoryless opponents, every lasso of the doubly pruned structure
    satisfies the body. Simple lassos suffice: any violating play yields a
    violating simple lasso by splicing out cycles. Perfect-recall opponents
    are left unrestricted, which coincides with their semantics for perfect
    information and over-restricts imperfect-information recall (callers
    avoid the latter).
    """
    if len(m.states) > max_states:
        raise ValueError("oracle capped at %d states" % max_states)
    if body[0] not in ("X", "U", "R"):
        raise ValueError("unknown body operator %r" % (body[0],))
    wanted = set(coalition)
    ability = dict(m.ability)
    for i in wanted:
        if ability[i] == "iR":
            raise ValueError("cannot enumerate strategies of an iR agent")
        if ability[i] == "IR":
            # a single temporal goal never needs coalition memory
            ability[i] = "Ir"
    flat = as_uniform_memoryless(m.with_ability(ability))
    team = [i for i in flat.agents if i in wanted]
    foes = [i for i in flat.agents if i not in wanted and flat.ability[i] == "ir"]

    winning = set()
    for s in flat.states:
        for mine in enumerate_uniform_strategies(flat, team):
            good = True
            for theirs in enumerate_uniform_strategies(flat, foes):
                cut = prune(flat, {**mine, **theirs})
                if not _all_lassos_satisfy(cut, s, body):
                    good = False
                    break
            if good:
                winning.add(s)
                break
    return frozenset(winning)


# -- play prefixes under one fixed joint strategy --------------------------------

def outcome_prefixes(m: Cgs, start, strategy: Dict[Any, Dict[Any, Any]],
                     k: int, max_k: int = 8) -> Set[tuple]:
    """All k-state play prefixes when `strategy`'s agents follow it and the
    others play anything their ability allows.

    Within one play, a perfect-recall opponent never revisits a history, so
    perfect recall imposes no consistency constraint here regardless of
    information; memoryless opponents must repeat their choice whenever the
    same state (Ir) or the same observation class (ir) comes back.
    """
    if not 1 <= k <= max_k:
        raise ValueError("prefix length must be between 1 and %d" % max_k)
    out: Set[tuple] = set()

    def step(path: List, bindings: Dict) -> None:
        if len(path) == k:
            out.add(tuple(path))
            return
        u = path[-1]
        options = []
        for i in m.agents:
            proto = m.protocol_of(i, u)
            if i in strategy:
                act = strategy[i].get(u)
                if act is None or act not in proto:
                    raise ValueError("strategy of %r is unusable at %r" % (i, u))
                options.append(((act, None),))
            elif m.ability[i] in ("IR", "iR"):
                options.append(tuple((a, None) for a in proto))
            else:
                key = (i, u) if m.ability[i] == "Ir" else (i, m.observation(i, u))
                bound = bindings.get(key)
                if bound is not None:
                    options.append(((bound, None),) if bound in proto else ())
                else:
                    options.append(tuple((a, (key, a)) for a in proto))
        for combo in itertools.product(*options):
            joint = tuple(act for act, _ in combo)
            fresh = [kv for _, kv in combo if kv is not None]
            nxt = bindings
            if fresh:
                nxt = dict(bindings)
                nxt.update(fresh)
            step(path + [m.transitions[(u, joint)]], nxt)

    step([start], {})
    return out
