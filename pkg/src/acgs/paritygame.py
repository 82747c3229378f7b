"""Parity games: arena type, solvers, and a brute-force reference.

Convention throughout: min-parity. Player 0 wins an infinite play iff the
smallest rank occurring infinitely often is even. Both players have
positional optimal strategies, which is what the solvers return.

`solve` is the production solver (Zielonka's recursive algorithm with
strategy extraction). `solve_spm` recomputes the winning regions by lifting
small progress measures and serves as an independent cross-check; it does
not produce strategies. `brute_force_solve` enumerates positional
strategies outright and is only usable on tiny games.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import AcgsError, ParseError


class ParityGame:
    """Finite game arena. Every vertex needs at least one successor."""

    def __init__(self, owner: Dict[Any, int], rank: Dict[Any, int],
                 succ: Dict[Any, Iterable]):
        self.owner = dict(owner)
        self.rank = dict(rank)
        self.succ = {v: tuple(ws) for v, ws in succ.items()}
        for v in self.owner:
            if v not in self.rank or v not in self.succ:
                raise ValueError("vertex %r lacks a rank or successor list" % (v,))
            if self.owner[v] not in (0, 1):
                raise ValueError("vertex %r has owner %r" % (v, self.owner[v]))
            if not isinstance(self.rank[v], int) or self.rank[v] < 0:
                raise ValueError("vertex %r has bad rank %r" % (v, self.rank[v]))
            if not self.succ[v]:
                raise ValueError("vertex %r has no successors" % (v,))
        for v, ws in self.succ.items():
            if v not in self.owner:
                raise ValueError("successor list for unknown vertex %r" % (v,))
            for w in ws:
                if w not in self.owner:
                    raise ValueError("edge %r -> %r leaves the arena" % (v, w))
        self._preds: Optional[Dict[Any, Tuple]] = None

    def __len__(self):
        return len(self.owner)

    @property
    def preds(self) -> Dict[Any, Tuple]:
        if self._preds is None:
            table: Dict[Any, List] = {v: [] for v in self.owner}
            for v, ws in self.succ.items():
                for w in ws:
                    table[w].append(v)
            self._preds = {v: tuple(us) for v, us in table.items()}
        return self._preds


@dataclass
class WinningRegions:
    win0: FrozenSet
    win1: FrozenSet
    strategy0: Dict = field(default_factory=dict)
    strategy1: Dict = field(default_factory=dict)

    def winner(self, vertex) -> int:
        return 0 if vertex in self.win0 else 1


def _attract(g: ParityGame, player: int, targets: Set, region: Set):
    """Player's attractor to `targets` inside `region`, with move choices
    recorded for the player's newly attracted vertices."""
    attracted = set(targets)
    choices: Dict[Any, Any] = {}
    escape: Dict[Any, int] = {}
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in g.preds[v]:
            if u not in region or u in attracted:
                continue
            if g.owner[u] == player:
                attracted.add(u)
                choices[u] = v
                stack.append(u)
            else:
                left = escape.get(u)
                if left is None:
                    left = sum(1 for w in g.succ[u] if w in region)
                left -= 1
                escape[u] = left
                if left == 0:
                    attracted.add(u)
                    stack.append(u)
    return attracted, choices


def _zielonka(g: ParityGame, region: Set):
    if not region:
        return set(), set(), {}, {}
    d = min(g.rank[v] for v in region)
    alpha = d % 2
    targets = {v for v in region if g.rank[v] == d}
    area, into_targets = _attract(g, alpha, targets, region)
    sub_w0, sub_w1, sub_s0, sub_s1 = _zielonka(g, region - area)
    wins = (sub_w0, sub_w1)
    strats = (sub_s0, sub_s1)

    if not wins[1 - alpha]:
        mine = strats[alpha]
        mine.update(into_targets)
        for v in targets:
            if g.owner[v] == alpha and v not in mine:
                mine[v] = next(w for w in g.succ[v] if w in region)
        whole = set(region)
        if alpha == 0:
            return whole, set(), mine, strats[1]
        return set(), whole, strats[0], mine

    beta = 1 - alpha
    basin, into_basin = _attract(g, beta, wins[beta], region)
    rest_w0, rest_w1, rest_s0, rest_s1 = _zielonka(g, region - basin)
    rest_wins = (rest_w0, rest_w1)
    rest_strats = (rest_s0, rest_s1)

    theirs = dict(rest_strats[beta])
    theirs.update(strats[beta])
    theirs.update(into_basin)
    their_win = rest_wins[beta] | basin
    if beta == 0:
        return their_win, rest_wins[1], theirs, rest_strats[1]
    return rest_wins[0], their_win, rest_strats[0], theirs


def solve(g: ParityGame) -> WinningRegions:
    """Zielonka's algorithm with positional strategy extraction."""
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(g) + 200))
    try:
        w0, w1, s0, s1 = _zielonka(g, set(g.owner))
    finally:
        sys.setrecursionlimit(limit)
    return WinningRegions(frozenset(w0), frozenset(w1), s0, s1)


# -- progress measures ---------------------------------------------------------

def solve_spm(g: ParityGame) -> WinningRegions:
    """Winning regions by small progress measures (no strategies).

    Measures are tuples with one counter per odd rank, most significant
    first (smaller odd ranks matter more under min-parity); None is the top
    element. Visiting an even rank r resets every counter above r, visiting
    an odd rank r strictly increases the prefix up to r; a play consistent
    with bounded measures therefore cannot have an odd least recurring rank.
    """
    verts = list(g.owner)
    odd_ranks = sorted({g.rank[v] for v in verts if g.rank[v] % 2 == 1})
    caps = [sum(1 for v in verts if g.rank[v] == p) for p in odd_ranks]
    zero = tuple(0 for _ in odd_ranks)

    def prog(mu: Optional[tuple], r: int) -> Optional[tuple]:
        if mu is None:
            return None
        if r % 2 == 0:
            return tuple(mu[i] if p < r else 0 for i, p in enumerate(odd_ranks))
        keep = [i for i, p in enumerate(odd_ranks) if p <= r]
        vals = [mu[i] for i in keep]
        j = len(vals) - 1
        while j >= 0:
            if vals[j] < caps[keep[j]]:
                vals[j] += 1
                break
            vals[j] = 0
            j -= 1
        if j < 0:
            return None
        out = [0] * len(odd_ranks)
        for slot, i in enumerate(keep):
            out[i] = vals[slot]
        return tuple(out)

    def order(mu: Optional[tuple]):
        return (mu is None, mu)

    measure: Dict[Any, Optional[tuple]] = {v: zero for v in verts}
    pending = set(verts)
    while pending:
        v = pending.pop()
        options = [prog(measure[w], g.rank[v]) for w in g.succ[v]]
        pick = min(options, key=order) if g.owner[v] == 0 else max(options, key=order)
        if order(pick) > order(measure[v]):
            measure[v] = pick
            pending.update(g.preds[v])
    win0 = frozenset(v for v in verts if measure[v] is not None)
    return WinningRegions(win0, frozenset(v for v in verts if v not in win0))


# -- brute force ---------------------------------------------------------------

def sccs(vertices: Set, succ: Dict[Any, Tuple]) -> List[Set]:
    """Strongly connected components (iterative Tarjan) of the subgraph
    induced by `vertices`; edges outside the set are ignored."""
    index: Dict[Any, int] = {}
    low: Dict[Any, int] = {}
    on_stack: Set = set()
    stack: List = []
    out: List[Set] = []
    counter = itertools.count()

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter([w for w in succ.get(root, ()) if w in vertices]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, edges = work[-1]
            advanced = False
            for w in edges:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([u for u in succ.get(w, ()) if u in vertices])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    comp.add(u)
                    if u == v:
                        break
                out.append(comp)
    return out


def _on_cycle_with_min_parity(g: ParityGame, succ: Dict[Any, Tuple],
                              parity: int) -> Set:
    """Vertices lying on some cycle whose minimal rank has the given parity,
    in the subgraph described by `succ`."""
    hits: Set = set()
    for d in sorted({g.rank[v] for v in succ if g.rank[v] % 2 == parity}):
        region = {v for v in succ if g.rank[v] >= d}
        for comp in sccs(region, succ):
            if not any(g.rank[v] == d for v in comp):
                continue
            if len(comp) > 1 or any(v in succ.get(v, ()) for v in comp):
                hits |= comp
    return hits


def _can_reach(targets: Set, succ: Dict[Any, Tuple]) -> Set:
    preds: Dict[Any, List] = {v: [] for v in succ}
    for v, ws in succ.items():
        for w in ws:
            preds[w].append(v)
    seen = set(targets)
    queue = list(targets)
    while queue:
        v = queue.pop()
        for u in preds[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return seen


def brute_force_solve(g: ParityGame, max_vertices: int = 12,
                      max_strategies: int = 1 << 18) -> WinningRegions:
    """Enumerate positional strategies for each player separately.

    A vertex is winning for a player iff some positional strategy of theirs
    makes every cycle reachable from it carry the player's parity. The two
    enumerations must tile the arena exactly (positional determinacy); if
    they do not, one of the solvers involved is broken, so this raises.
    """
    verts = list(g.owner)
    if len(verts) > max_vertices:
        raise ValueError("brute force capped at %d vertices" % max_vertices)

    def survivors(player: int) -> Set:
        mine = [v for v in verts if g.owner[v] == player]
        combos = 1
        for v in mine:
            combos *= len(g.succ[v])
        if combos > max_strategies:
            raise ValueError("strategy space too large for brute force")
        good: Set = set()
        bad_parity = 1 - player
        for picks in itertools.product(*(g.succ[v] for v in mine)):
            chosen = dict(zip(mine, picks))
            succ = {v: (chosen[v],) if v in chosen else g.succ[v] for v in verts}
            bad = _on_cycle_with_min_parity(g, succ, bad_parity)
            doomed = _can_reach(bad, succ)
            good.update(v for v in verts if v not in doomed)
        return good

    win0 = survivors(0)
    win1 = survivors(1)
    if win0 & win1 or (win0 | win1) != set(verts):
        raise AcgsError("positional determinacy violated; solver bug")
    return WinningRegions(frozenset(win0), frozenset(win1))


# -- strategy audit ------------------------------------------------------------

def verify_winning_strategy(g: ParityGame, wr: WinningRegions) -> List[str]:
    """Check the solved regions and strategies against the game; returns a
    list of violation messages (empty when everything holds)."""
    out = []
    if wr.win0 & wr.win1 or (wr.win0 | wr.win1) != set(g.owner):
        out.append("regions do not partition the arena")
        return out
    for player, region, strat in ((0, wr.win0, wr.strategy0),
                                  (1, wr.win1, wr.strategy1)):
        bad_parity = 1 - player
        for v in region:
            if g.owner[v] == player:
                pick = strat.get(v)
                if pick is None:
                    out.append("player %d has no move at %r" % (player, v))
                elif pick not in g.succ[v]:
                    out.append("player %d move at %r is not an edge" % (player, v))
                elif pick not in region:
                    out.append("player %d move at %r leaves the region" % (player, v))
            else:
                for w in g.succ[v]:
                    if w not in region:
                        out.append("region of player %d is not closed at %r"
                                   % (player, v))
                        break
        if out:
            continue
        succ = {v: (strat[v],) if g.owner[v] == player else g.succ[v]
                for v in region}
        if _on_cycle_with_min_parity(g, succ, bad_parity):
            out.append("player %d strategy admits a losing cycle" % player)
    return out


# -- text format ---------------------------------------------------------------

def parse_game(text: str) -> ParityGame:
    """One vertex per line: `name owner rank succ,succ,...`; '#' comments."""
    owner: Dict[str, int] = {}
    rank: Dict[str, int] = {}
    succ: Dict[str, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError("line %d: expected 'name owner rank successors'"
                             % lineno)
        name, who, pri, edges = parts
        if name in owner:
            raise ParseError("line %d: duplicate vertex %r" % (lineno, name))
        if who not in ("0", "1") or not pri.isdigit():
            raise ParseError("line %d: owner must be 0/1 and rank a number"
                             % lineno)
        owner[name] = int(who)
        rank[name] = int(pri)
        succ[name] = tuple(e for e in edges.split(",") if e)
        if not succ[name]:
            raise ParseError("line %d: vertex %r has no successors" % (lineno, name))
    try:
        return ParityGame(owner, rank, succ)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def format_game(g: ParityGame) -> str:
    lines = []
    for v in g.owner:
        if not isinstance(v, str) or not v or any(c.isspace() or c == "," for c in v):
            raise ValueError("vertex %r has no text form; rename it" % (v,))
        lines.append("%s %d %d %s" % (v, g.owner[v], g.rank[v], ",".join(g.succ[v])))
    return "\n".join(lines) + "\n"
