"""Coalition checking through parity games with opponent-knowledge tracking.

Goals given as full LTL may need coalition strategies with memory, so the
enumeration backend does not apply. Here the goal is compiled into a
deterministic parity automaton and the interaction becomes a turn-based
game. The protagonist opens by committing every imperfect-information
coalition member to one uniform strategy, then picks the actions of the
perfect-information members one step at a time; the antagonist resolves
everything else. Memoryless imperfect-information opponents cannot simply
play arbitrarily, though: once such an opponent has acted at an
observation class, all its later visits are bound to the same choice. The
game therefore carries knowledge sets: every uniform partial opponent
strategy consistent with the play so far travels along, and a move exists
only if some member of the set allows it. Vertex ranks repeat the rank the
automaton assigns to its current state, so the protagonist's winning
region is exactly the set of states satisfying the coalition formula.

Vertices are tuples. A full game built by `build_game` starts at
("init", s), fans out to ("pick", s, k) over the committed-strategy index
k, and continues through (k, ("k", s, p, G)) and (k, ("m", s, p, f, G))
alternations, where p is the automaton state, f the action picks of the
perfect-information members, and G the knowledge set. `check_simple_atlstar`
skips the two opening layers and solves one subgame per commitment,
stopping early for states already decided.
"""

from __future__ import annotations

import itertools
import multiprocessing
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .enumcheck import STRATEGY_BUDGET, require_decidable
from .formulas import PathFormula
from .ltl2dpa import Dpa, ltl_to_dpa
from .errors import StrategySpaceExceeded
from .model import (
    Cgs,
    as_uniform_memoryless,
    count_uniform_strategies,
    enumerate_uniform_strategies,
)
from .paritygame import ParityGame, solve

# a partial opponent strategy is a tuple of ((agent, class representative),
# action) pairs, sorted by agent and representative position; a knowledge
# set is a frozenset of them
EMPTY_KNOWLEDGE: FrozenSet[tuple] = frozenset({()})


class _Setup:
    """Preprocessed model and agent split shared by one checking run."""

    def __init__(self, m: Cgs, coalition):
        require_decidable(m)
        wanted = set(coalition)
        unknown = wanted - set(m.agents)
        if unknown:
            raise ValueError("unknown coalition agent(s): %s"
                             % ", ".join(repr(i) for i in sorted(unknown, key=str)))
        flat = as_uniform_memoryless(m)
        self.m = flat
        self.committed = [i for i in flat.agents
                          if i in wanted and flat.ability[i] == "ir"]
        self.stepwise = [i for i in flat.agents
                         if i in wanted and flat.ability[i] == "IR"]
        self.tracked = [i for i in flat.agents
                        if i not in wanted and flat.ability[i] == "ir"]
        self.rep = {}
        for i in self.tracked:
            for s in flat.states:
                self.rep[(i, s)] = min(flat.epistemic_class(i, s),
                                       key=flat.index.get)
        self._order = {i: k for k, i in enumerate(flat.agents)}

    def _place(self, kv) -> tuple:
        return (self._order[kv[0][0]], self.m.index[kv[0][1]])

    def canon(self, g: Dict[tuple, Any]) -> tuple:
        return tuple(sorted(g.items(), key=self._place))

    def commitments(self, budget: int) -> List[Dict[Any, Dict[Any, Any]]]:
        total = count_uniform_strategies(self.m, self.committed)
        if total > budget:
            raise StrategySpaceExceeded(
                "%d commitments for the coalition's imperfect-information "
                "members exceed the budget of %d" % (total, budget))
        return list(enumerate_uniform_strategies(self.m, self.committed))


def _successor_table(setup: _Setup, ftop: Dict[Any, Dict[Any, Any]],
                     picks: tuple, G: FrozenSet[tuple], s) -> Dict[Any, Set[tuple]]:
    """All moves out of one Move vertex: target state -> knowledge members.

    Every knowledge-set member is extended over the observation classes of
    the current state it has not committed at yet, each extension fixes the
    tracked opponents' actions, and the remaining agents range over their
    protocols. The returned sets are the successor knowledge sets, grouped
    by target state.
    """
    m = setup.m
    base = {}
    for i in setup.committed:
        base[i] = ftop[i][s]
    for i, a in zip(setup.stepwise, picks):
        base[i] = a
    out: Dict[Any, Set[tuple]] = {}
    for g in G:
        gd = dict(g)
        fixed = dict(base)
        fresh = []
        for i in setup.tracked:
            r = setup.rep[(i, s)]
            got = gd.get((i, r))
            if got is None:
                fresh.append((i, r))
            else:
                fixed[i] = got
        for choice in itertools.product(*(m.protocol_of(i, s) for i, _ in fresh)):
            grown = dict(gd)
            for key, a in zip(fresh, choice):
                grown[key] = a
                fixed[key[0]] = a
            member = setup.canon(grown)
            pools = [(fixed[i],) if i in fixed else m.protocol_of(i, s)
                     for i in m.agents]
            for joint in itertools.product(*pools):
                target = m.transitions[(s, joint)]
                out.setdefault(target, set()).add(member)
    return out


def commitment_count(m: Cgs, coalition) -> int:
    """How many subgames `check_simple_atlstar` would solve.

    One per joint uniform strategy of the coalition's imperfect-information
    members; perfect-information members pick actions inside the game and
    cost nothing here.
    """
    setup = _Setup(m, coalition)
    return count_uniform_strategies(setup.m, setup.committed)


def successor_knowledge(m: Cgs, s, f_top, f, G, target) -> FrozenSet[tuple]:
    """Knowledge set after moving from `s` to `target`, or empty.

    `f_top` maps each committed coalition agent to a state -> action table,
    `f` maps each perfect-information coalition agent to its action at `s`,
    and `G` holds the opponents' partial strategies, each as a mapping (or
    pair sequence) from (agent, state) to action. The result contains every
    uniform extension of a member of `G` that some protocol-conforming
    joint action consistent with all three takes to `target`.
    """
    coalition = set(f_top) | set(f)
    setup = _Setup(m, coalition)
    for i in f_top:
        if setup.m.ability[i] != "ir":
            raise ValueError("agent %r is not imperfect-information "
                             "memoryless; it cannot be committed" % (i,))
    for i in f:
        if i not in setup.stepwise:
            raise ValueError("agent %r is not a perfect-information "
                             "coalition member" % (i,))
    knowledge = frozenset(setup.canon(_as_partial(setup, g)) for g in G)
    picks = tuple(f[i] for i in setup.stepwise)
    table = _successor_table(setup, f_top, picks, knowledge, s)
    return frozenset(table.get(target, ()))


def _as_partial(setup: _Setup, g) -> Dict[tuple, Any]:
    """Normalize one partial strategy onto class representatives."""
    items = g.items() if isinstance(g, dict) else g
    out: Dict[tuple, Any] = {}
    for (i, s), a in items:
        r = setup.rep.get((i, s))
        if r is None:
            raise ValueError("agent %r is not a tracked opponent" % (i,))
        if out.setdefault((i, r), a) != a:
            raise ValueError("partial strategy of %r is not uniform at %r"
                             % (i, s))
    return out


def _expand(setup: _Setup, dpa: Dpa, ftop, seeds: Iterable[tuple]):
    """Breadth-first closure of subgame vertices from the seed knowledge
    vertices; returns the (owner, rank, succ) tables."""
    m = setup.m
    owner: Dict[Any, int] = {}
    rank: Dict[Any, int] = {}
    succ: Dict[Any, List] = {}
    queue = list(seeds)
    known = set(queue)
    while queue:
        v = queue.pop()
        kind, s, p = v[0], v[1], v[2]
        rank[v] = dpa.rank[p]
        if kind == "k":
            owner[v] = 0
            targets = [("m", s, p, picks, v[3]) for picks in
                       itertools.product(*(m.protocol_of(i, s)
                                           for i in setup.stepwise))]
        else:
            owner[v] = 1
            p2 = dpa.step(p, m.label_set(s))
            table = _successor_table(setup, ftop, v[3], v[4], s)
            targets = [("k", t, p2, frozenset(gs))
                       for t, gs in sorted(table.items(),
                                           key=lambda kv: m.index[kv[0]])]
        succ[v] = targets
        for w in targets:
            if w not in known:
                known.add(w)
                queue.append(w)
    return owner, rank, succ


def build_game(m: Cgs, coalition, dpa: Dpa, start,
               budget: int = STRATEGY_BUDGET) -> ParityGame:
    """The full game for deciding the goal at `start`; see the module
    docstring for the vertex layout. The entry vertex is ("init", start)."""
    setup = _Setup(m, coalition)
    if start not in setup.m.index:
        raise ValueError("unknown state %r" % (start,))
    owner: Dict[Any, int] = {("init", start): 0}
    rank: Dict[Any, int] = {("init", start): 0}
    succ: Dict[Any, List] = {("init", start): []}
    g0 = EMPTY_KNOWLEDGE
    for k, ftop in enumerate(setup.commitments(budget)):
        pick = ("pick", start, k)
        seed = ("k", start, dpa.initial, g0)
        owner[pick], rank[pick], succ[pick] = 1, 0, [(k, seed)]
        succ[("init", start)].append(pick)
        part = _expand(setup, dpa, ftop, [seed])
        for v, o in part[0].items():
            owner[(k, v)] = o
            rank[(k, v)] = part[1][v]
            succ[(k, v)] = [(k, w) for w in part[2][v]]
    return ParityGame(owner, rank, succ)


def check_simple_atlstar(m: Cgs, coalition, body: PathFormula, jobs: int = 1,
                         budget: int = STRATEGY_BUDGET,
                         telemetry: Optional[Dict[str, int]] = None) -> Set[Any]:
    """States where the coalition can enforce the pure-LTL goal.

    Solves one subgame per commitment of the coalition's imperfect-
    information members, over all still-undecided states at once, and
    unions the winners. `jobs` > 1 splits the commitments across worker
    processes, trading the early exit for parallelism. A `telemetry`
    dict gets its "games" and "vertices" entries bumped by the number
    of subgames solved and their total size.
    """
    setup = _Setup(m, coalition)
    dpa = ltl_to_dpa(body)
    ftops = setup.commitments(budget)
    if jobs > 1 and len(ftops) >= 2:
        share = [(setup, dpa, ftops[off::jobs], setup.m.states)
                 for off in range(min(jobs, len(ftops)))]
        with multiprocessing.Pool(len(share)) as pool:
            parts = pool.map(_wins_under, share)
    else:
        parts = []
        won: Set[Any] = set()
        for ftop in ftops:
            undecided = [s for s in setup.m.states if s not in won]
            if not undecided:
                break
            parts.append(_wins_under((setup, dpa, [ftop], undecided)))
            won |= parts[-1][0]
    if telemetry is not None:
        telemetry["games"] = telemetry.get("games", 0) + sum(p[1] for p in parts)
        telemetry["vertices"] = (telemetry.get("vertices", 0)
                                 + sum(p[2] for p in parts))
    return set().union(*(p[0] for p in parts)) if parts else set()


def _wins_under(args) -> Tuple[Set[Any], int, int]:
    setup, dpa, ftops, states = args
    won: Set[Any] = set()
    games = vertices = 0
    for ftop in ftops:
        seeds = {("k", s, dpa.initial, EMPTY_KNOWLEDGE): s for s in states
                 if s not in won}
        if not seeds:
            break
        game = ParityGame(*_expand(setup, dpa, ftop, seeds))
        games += 1
        vertices += len(game.owner)
        regions = solve(game)
        for v, s in seeds.items():
            if v in regions.win0:
                won.add(s)
    return won, games, vertices
