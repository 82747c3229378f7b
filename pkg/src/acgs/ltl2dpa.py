"""Pure LTL to deterministic parity automata over label-set letters.

The pipeline is classical: negation normal form, then a demand-driven
tableau expansion gives a generalized Buchi automaton with one fairness set
per Until, degeneralization and trimming give a Buchi automaton, and a
determinization over history trees whose node names are canonically
compressed after every step emits parity ranks directly from node deaths
and collapses. Formulas whose only temporal operator is the outermost one
skip all of that and get a three-state automaton directly.

Letters are frozensets of proposition names: the letter for a position is
the set of propositions holding there. Acceptance everywhere is min-parity:
a run is accepting iff the smallest rank visited infinitely often is even.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import AlgorithmInapplicable
from .formulas import (
    And,
    Atom,
    Next,
    Not,
    PAnd,
    PathFormula,
    PathState,
    PNot,
    Release,
    Until,
    atoms_of_path,
    holds_in,
    normalize_single_temporal,
)

Letter = FrozenSet[str]


@dataclass
class Dpa:
    """Complete deterministic parity automaton.

    `delta` is total over states x letters(props); `rank[q]` is the parity
    rank of state q. Runs start at `initial` and read one letter per
    position of the word.
    """

    props: Tuple[str, ...]
    n: int
    initial: int
    delta: Dict[Tuple[int, Letter], int]
    rank: Tuple[int, ...]

    def letters(self) -> List[Letter]:
        return letters_over(self.props)

    def step(self, state: int, letter: Iterable[str]) -> int:
        return self.delta[(state, frozenset(letter) & frozenset(self.props))]


def letters_over(props: Sequence[str]) -> List[Letter]:
    out = []
    for r in range(len(props) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(props, r))
    return out


def dpa_accepts_lasso(d: Dpa, stem: Sequence[Iterable[str]],
                      loop: Sequence[Iterable[str]]) -> bool:
    """Run the automaton on stem · loop^ω and decide acceptance.

    The state at the start of each loop pass must repeat within n passes;
    the ranks seen between two occurrences of the same pass-start state are
    exactly the ranks seen infinitely often.
    """
    if not loop:
        raise ValueError("lasso loop must be nonempty")
    support = frozenset(d.props)
    rstem = [frozenset(l) & support for l in stem]
    rloop = [frozenset(l) & support for l in loop]
    q = d.initial
    for l in rstem:
        q = d.delta[(q, l)]
    seen: Dict[int, int] = {}
    mins: List[int] = []
    while q not in seen:
        seen[q] = len(mins)
        low = None
        for l in rloop:
            q = d.delta[(q, l)]
            r = d.rank[q]
            low = r if low is None or r < low else low
        mins.append(low)
    return min(mins[seen[q]:]) % 2 == 0


# -- direct constructions --------------------------------------------------------


def _sink_dpa(props: Tuple[str, ...], accepting: bool) -> Dpa:
    r = 0 if accepting else 1
    delta = {(0, l): 0 for l in letters_over(props)}
    return Dpa(props, 1, 0, delta, (r,))


def _first_letter_dpa(p: PathFormula, props: Tuple[str, ...]) -> Dpa:
    """A temporal-free formula only constrains the first position."""

    def ev(q: PathFormula, letter: Letter) -> bool:
        if isinstance(q, PathState):
            return holds_in(q.arg, letter)
        if isinstance(q, PNot):
            return not ev(q.arg, letter)
        if isinstance(q, PAnd):
            return ev(q.left, letter) and ev(q.right, letter)
        raise ValueError("formula is not temporal-free: %r" % (q,))

    delta = {}
    for l in letters_over(props):
        delta[(0, l)] = 1 if ev(p, l) else 2
        delta[(1, l)] = 1
        delta[(2, l)] = 2
    return Dpa(props, 3, 0, delta, (1, 0, 1))


def _single_temporal_dpa(shape: tuple, props: Tuple[str, ...]) -> Dpa:
    """Automata for one temporal operator over propositional operands.

    States: 0 waits/holds, 1 accepts forever, 2 rejects forever (plus a
    pre-state for X). Only the Release waiting state has even rank, since
    waiting forever is exactly how Release succeeds and Until fails.
    """
    letters = letters_over(props)
    delta: Dict[Tuple[int, Letter], int] = {}
    if shape[0] == "X":
        goal = shape[1]
        for l in letters:
            delta[(0, l)] = 1
            delta[(1, l)] = 2 if holds_in(goal, l) else 3
            delta[(2, l)] = 2
            delta[(3, l)] = 3
        return Dpa(props, 4, 0, delta, (1, 1, 0, 1))
    hold, target = shape[1], shape[2]
    if shape[0] == "U":
        for l in letters:
            delta[(0, l)] = 1 if holds_in(target, l) else \
                (0 if holds_in(hold, l) else 2)
            delta[(1, l)] = 1
            delta[(2, l)] = 2
        return Dpa(props, 3, 0, delta, (1, 0, 1))
    if shape[0] == "R":
        for l in letters:
            if not holds_in(target, l):
                delta[(0, l)] = 2
            elif holds_in(hold, l):
                delta[(0, l)] = 1
            else:
                delta[(0, l)] = 0
            delta[(1, l)] = 1
            delta[(2, l)] = 2
        return Dpa(props, 3, 0, delta, (0, 0, 1))
    raise ValueError("unknown shape %r" % (shape[0],))


# -- closure tableau -------------------------------------------------------------


def _flatten(p: PathFormula) -> PathFormula:
    """Push boolean structure of embedded state formulas to the path level,
    so that the only state formulas left are single atoms."""
    if isinstance(p, PathState):
        f = p.arg
        if isinstance(f, Atom):
            return p
        if isinstance(f, Not):
            return PNot(_flatten(PathState(f.arg)))
        if isinstance(f, And):
            return PAnd(_flatten(PathState(f.left)), _flatten(PathState(f.right)))
        raise ValueError("path formula is not pure LTL: %r" % (f,))
    if isinstance(p, PNot):
        return PNot(_flatten(p.arg))
    if isinstance(p, PAnd):
        return PAnd(_flatten(p.left), _flatten(p.right))
    if isinstance(p, Next):
        return Next(_flatten(p.arg))
    if isinstance(p, Until):
        return Until(_flatten(p.left), _flatten(p.right))
    if isinstance(p, Release):
        return Release(_flatten(p.left), _flatten(p.right))
    raise ValueError("not a path formula: %r" % (p,))


def _nnf(p: PathFormula, neg: bool = False) -> tuple:
    """Negation normal form as nested tuples: ("lit", name, negated),
    ("tt",), ("ff",), and ("and"|"or"|"X"|"U"|"R", ...) with negation pushed
    onto the literals by the usual dualities."""
    if isinstance(p, PathState):
        name = p.arg.name
        if name == "true":
            return ("ff",) if neg else ("tt",)
        if name == "false":
            return ("tt",) if neg else ("ff",)
        return ("lit", name, neg)
    if isinstance(p, PNot):
        return _nnf(p.arg, not neg)
    if isinstance(p, PAnd):
        a, b = _nnf(p.left, neg), _nnf(p.right, neg)
        return ("or", a, b) if neg else ("and", a, b)
    if isinstance(p, Next):
        return ("X", _nnf(p.arg, neg))
    if isinstance(p, Until):
        a, b = _nnf(p.left, neg), _nnf(p.right, neg)
        return ("R", a, b) if neg else ("U", a, b)
    if isinstance(p, Release):
        a, b = _nnf(p.left, neg), _nnf(p.right, neg)
        return ("U", a, b) if neg else ("R", a, b)
    raise ValueError("not a path formula: %r" % (p,))


def _until_subterms(f: tuple, out: Set[tuple]) -> None:
    if f[0] == "U":
        out.add(f)
    if f[0] in ("and", "or", "U", "R"):
        _until_subterms(f[1], out)
        _until_subterms(f[2], out)
    elif f[0] == "X":
        _until_subterms(f[1], out)


_INIT = "init"


def _tableau_nba(root: PathFormula):
    """Demand-driven tableau on the negation normal form, degeneralized on
    the fly: returns (states, initials, accepting, delta, letters) of a
    Buchi automaton, or None when no tableau node is reachable at all."""
    nroot = _nnf(_flatten(root))
    letters = letters_over(tuple(sorted(atoms_of_path(root))))

    # expansion: each pending node carries claims yet to split (new),
    # settled claims (old) and obligations for the next position (next)
    nodes: Dict[Tuple[FrozenSet[tuple], FrozenSet[tuple]], Set] = {}
    pending: List[Dict[str, Any]] = [
        {"incoming": {_INIT}, "new": {nroot}, "old": set(), "next": set()}
    ]
    while pending:
        nd = pending.pop()
        if len(nodes) > 20000:
            raise AlgorithmInapplicable("tableau too large")
        if not nd["new"]:
            key = (frozenset(nd["old"]), frozenset(nd["next"]))
            known = nodes.get(key)
            if known is not None:
                known |= nd["incoming"]
                continue
            nodes[key] = set(nd["incoming"])
            pending.append({"incoming": {key}, "new": set(nd["next"]),
                            "old": set(), "next": set()})
            continue
        f = min(nd["new"], key=repr)
        nd["new"].discard(f)
        tag = f[0]
        if tag == "ff":
            continue
        if tag == "tt":
            nd["old"].add(f)
            pending.append(nd)
            continue
        if tag == "lit":
            if ("lit", f[1], not f[2]) in nd["old"]:
                continue
            nd["old"].add(f)
            pending.append(nd)
            continue
        if f in nd["old"]:
            pending.append(nd)
            continue
        nd["old"].add(f)
        if tag == "and":
            nd["new"].update((f[1], f[2]))
            pending.append(nd)
        elif tag == "X":
            nd["next"].add(f[1])
            pending.append(nd)
        else:
            twin = {"incoming": set(nd["incoming"]), "new": set(nd["new"]),
                    "old": set(nd["old"]), "next": set(nd["next"])}
            if tag == "or":
                nd["new"].add(f[1])
                twin["new"].add(f[2])
            elif tag == "U":
                nd["new"].add(f[1])
                nd["next"].add(f)
                twin["new"].add(f[2])
            else:  # R
                nd["new"].add(f[2])
                nd["next"].add(f)
                twin["new"].update((f[1], f[2]))
            pending.append(nd)
            pending.append(twin)

    initial_nodes = [k for k, inc in nodes.items() if _INIT in inc]
    if not initial_nodes:
        return None

    def fits(key, letter: Letter) -> bool:
        return all((f[1] in letter) != f[2]
                   for f in key[0] if f[0] == "lit")

    # one fairness set per Until: the obligation is either absent or
    # fulfilled (its right-hand side claimed at this very node)
    untils: Set[tuple] = set()
    _until_subterms(nroot, untils)
    fair = [frozenset(k for k in nodes if u not in k[0] or u[2] in k[0])
            for u in sorted(untils, key=repr)]
    k_sets = len(fair) or 1
    if not fair:
        fair = [frozenset(nodes)]

    states = set()
    delta: Dict[Tuple[Any, Letter], FrozenSet] = {}
    start = (_INIT, 0)
    states.add(start)
    queue = [start]
    edges: Dict[Any, List] = {}
    for key, inc in nodes.items():
        for src in inc:
            edges.setdefault(src, []).append(key)
    while queue:
        q, i = queue.pop()
        j = (i + 1) % k_sets if (q != _INIT and q in fair[i]) else i
        for letter in letters:
            succs = frozenset((t, j) for t in edges.get(q, ())
                              if fits(t, letter))
            delta[((q, i), letter)] = succs
            for nxt in succs:
                if nxt not in states:
                    states.add(nxt)
                    queue.append(nxt)
    accepting = {(q, i) for (q, i) in states
                 if i == 0 and q != _INIT and q in fair[0]}
    return states, frozenset({start}), accepting, delta, letters


def _trim_nba(states, initials, accepting, delta, letters):
    """Keep only states that lie on a path from an initial state to an
    accepting cycle; returns None when no such path exists."""

    def forward(src: Set) -> Set:
        seen = set(src)
        queue = list(src)
        while queue:
            q = queue.pop()
            for l in letters:
                for t in delta.get((q, l), ()):
                    if t not in seen:
                        seen.add(t)
                        queue.append(t)
        return seen

    reach = forward(set(initials))
    preds: Dict[Any, Set] = {q: set() for q in reach}
    for q in reach:
        for l in letters:
            for t in delta.get((q, l), ()):
                if t in reach:
                    preds[t].add(q)

    live = set()
    for a in accepting:
        if a not in reach or a in live:
            continue
        if a in forward({t for l in letters for t in delta.get((a, l), ()) if t in reach}):
            live.add(a)
    if not live:
        return None
    useful = set(live)
    queue = list(live)
    while queue:
        q = queue.pop()
        for u in preds[q]:
            if u not in useful:
                useful.add(u)
                queue.append(u)

    keep = reach & useful
    new_init = frozenset(initials & keep)
    if not new_init:
        return None
    new_delta = {}
    for q in keep:
        for l in letters:
            new_delta[(q, l)] = frozenset(t for t in delta.get((q, l), ()) if t in keep)
    return keep, new_init, accepting & keep, new_delta


def _bisim_quotient(states, initials, accepting, delta, letters):
    """Coarsest forward bisimulation that respects acceptance."""
    block = {q: int(q in accepting) for q in states}
    while True:
        sigs = {}
        fresh: Dict[Any, int] = {}
        for q in states:
            sig = (block[q], tuple(frozenset(block[t] for t in delta[(q, l)])
                                   for l in letters))
            sigs[q] = fresh.setdefault(sig, len(fresh))
        if len(fresh) == len(set(block.values())):
            break
        block = sigs

    ids = sorted(set(block.values()))
    remap = {b: i for i, b in enumerate(ids)}
    n = len(ids)
    rep = {}
    for q in states:
        rep.setdefault(remap[block[q]], q)
    d = {}
    for b, q in rep.items():
        for l in letters:
            d[(b, l)] = frozenset(remap[block[t]] for t in delta[(q, l)])
    return (
        n,
        frozenset(remap[block[q]] for q in initials),
        frozenset(remap[block[q]] for q in accepting),
        d,
    )


# -- determinization -------------------------------------------------------------

# History trees are nested (name, label, children) tuples. Names are always
# the canonical 1..m in creation order (parents older than children, the
# root is 1), because every step ends by compressing the surviving names
# back down. That keeps the reachable tree count close to the number of
# tree SHAPES instead of shapes times name assignments, and it lets the
# step emit a min-parity rank directly: the oldest node that died this step
# is a bad event (odd rank), the oldest node whose children jointly covered
# it is a good event (even rank), and a node that is eventually stable and
# covered infinitely often keeps a stable small name forever.


def _piterman_step(tree, letter: Letter, delta, acc: FrozenSet[int],
                   neutral: int):
    """One transition of the history-tree automaton.

    Returns (successor tree or None, rank of this transition).
    """
    # flatten, moving every label one letter forward as we go
    info: Dict[int, list] = {}  # name -> [label, parent, child names]

    def walk(node, parent):
        name, label, kids = node
        moved = frozenset(q for p in label for q in delta.get((p, letter), ()))
        info[name] = [moved, parent, [k[0] for k in kids]]
        for k in kids:
            walk(k, name)

    walk(tree, None)

    # each node spawns a youngest child holding its runs that sit in an
    # accepting state right now; temporary names continue the sequence
    fresh = max(info) + 1
    for name in sorted(info):
        seed = info[name][0] & acc
        if seed:
            info[name][2].append(fresh)
            info[fresh] = [seed, name, []]
            fresh += 1

    # a run is owned by the oldest node tracking it: a state claimed by an
    # older node that is not an ancestor is dropped, and the same claim
    # then blocks the whole subtree when its nodes are processed
    owner: Dict[int, int] = {}
    anc: Dict[Optional[int], FrozenSet[int]] = {None: frozenset()}
    for name in sorted(info):
        label, parent, _ = info[name]
        above = anc[parent] | {parent} if parent is not None else frozenset()
        anc[name] = above
        kept = set()
        for q in label:
            holder = owner.get(q)
            if holder is None or holder in above:
                kept.add(q)
                owner[q] = name
        info[name][0] = frozenset(kept)

    # drop emptied nodes (their descendants are empty too); the oldest
    # casualty is the bad event of the step
    deadset = {name for name in info if not info[name][0]}
    e = min(deadset) if deadset else None
    if 1 in deadset:
        return None, 1
    for name in deadset:
        del info[name]
    for name in info:
        info[name][2] = [c for c in info[name][2] if c not in deadset]

    # a node whose children jointly cover it collapses its subtree; the
    # oldest such node is the good event
    flashes: List[int] = []

    def collapse(name):
        label, _, kids = info[name]
        if kids and label == frozenset(q for c in kids for q in info[c][0]):
            flashes.append(name)
            stack = list(kids)
            info[name][2] = []
            while stack:
                c = stack.pop()
                stack.extend(info[c][2])
                del info[c]
        else:
            for c in list(kids):
                collapse(c)

    collapse(1)
    f = min(flashes) if flashes else None

    # the transition is judged by the older of the two events, on the
    # names as they were before renaming; equal names cannot happen since
    # one node survived and the other did not
    if e is None and f is None:
        rank = neutral
    elif f is None or (e is not None and e < f):
        rank = 2 * e - 1
    else:
        rank = 2 * f

    remap = {old: i for i, old in enumerate(sorted(info), start=1)}

    def rebuild(name):
        return (remap[name], info[name][0],
                tuple(rebuild(c) for c in info[name][2]))

    return rebuild(1), rank


def _determinize(n: int, initials: FrozenSet[int], accepting: FrozenSet[int],
                 delta, letters: List[Letter], props: Tuple[str, ...]) -> Dpa:
    neutral = 2 * n + 1
    start = ((1, frozenset(initials), ()), neutral)
    id_of = {start: 0}
    order = [start]
    ddelta: Dict[Tuple[int, Letter], int] = {}
    queue = [start]
    while queue:
        st = queue.pop()
        tree = st[0]
        for l in letters:
            if tree is None:
                nxt = (None, 1)
            else:
                nxt = _piterman_step(tree, l, delta, accepting, neutral)
            if nxt not in id_of:
                id_of[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            ddelta[(id_of[st], l)] = id_of[nxt]
            if len(id_of) > 20000:
                raise AlgorithmInapplicable("determinization too large")
    return Dpa(props, len(order), 0, ddelta, tuple(st[1] for st in order))


# -- entry point -----------------------------------------------------------------

_CACHE: Dict[Tuple[PathFormula, Optional[Tuple[str, ...]]], Dpa] = {}


def ltl_to_dpa(p: PathFormula, props: Optional[Sequence[str]] = None) -> Dpa:
    """Deterministic parity automaton for a pure LTL path formula.

    `props` fixes the letter support (it must cover the formula's atoms);
    by default the formula's own atoms are used. Results are cached, so
    callers must treat them as immutable.
    """
    want = tuple(props) if props is not None else None
    key = (p, want)
    cached = _CACHE.get(key)
    if cached is not None:
        return cached

    used = atoms_of_path(p)
    if want is None:
        support: Tuple[str, ...] = tuple(sorted(used))
    else:
        missing = used - set(want)
        if missing:
            raise ValueError("letter support lacks %s" % ", ".join(sorted(missing)))
        support = want

    shape = normalize_single_temporal(p)
    if shape is not None:
        d = _single_temporal_dpa(shape, support)
    else:
        flat = _flatten(p)
        if not any(isinstance(f, (Next, Until, Release)) for f in _iter_nodes(flat)):
            d = _first_letter_dpa(flat, support)
        else:
            # determinize whichever polarity has the smaller automaton; a
            # negated result is complemented by shifting every rank, which
            # flips the parity of the minimum on every run
            own = tuple(sorted(used))
            lets = letters_over(own)
            d = None
            cands = []
            for cand, shift in ((flat, 0), (PNot(flat), 1)):
                nba = _tableau_nba(cand)
                trimmed = _trim_nba(*nba) if nba is not None else None
                if trimmed is None:
                    # this polarity is the empty language, so the answer
                    # is constant and nothing needs determinizing
                    d = _sink_dpa(support, accepting=bool(shift))
                    break
                cands.append((shift, _bisim_quotient(trimmed[0], trimmed[1],
                                                     trimmed[2], trimmed[3],
                                                     lets)))
            if d is None:
                shift, small = min(cands, key=lambda c: c[1][0])
                d = _moore_minimize(_determinize(*small, lets, own))
                if shift:
                    d = Dpa(d.props, d.n, d.initial, d.delta,
                            tuple(r + 1 for r in d.rank))
                if support != own:
                    d = _widen(d, support)
    _CACHE[key] = d
    return d


def _iter_nodes(p: PathFormula):
    yield p
    if isinstance(p, (PNot, Next)):
        yield from _iter_nodes(p.arg)
    elif isinstance(p, (PAnd, Until, Release)):
        yield from _iter_nodes(p.left)
        yield from _iter_nodes(p.right)


def _widen(d: Dpa, support: Tuple[str, ...]) -> Dpa:
    """Re-key a DPA onto a larger letter support."""
    inner = frozenset(d.props)
    delta = {}
    for l in letters_over(support):
        for q in range(d.n):
            delta[(q, l)] = d.delta[(q, l & inner)]
    return Dpa(support, d.n, d.initial, delta, d.rank)


def _moore_minimize(d: Dpa) -> Dpa:
    """Merge states with identical rank and behavior (Moore partition
    refinement). Sound for deterministic parity automata: merged states
    produce the same rank sequence on every word."""
    letters = d.letters()
    cls = list(d.rank)
    while True:
        fresh: Dict[tuple, int] = {}
        sig = [0] * d.n
        for q in range(d.n):
            s = (cls[q], tuple(cls[d.delta[(q, l)]] for l in letters))
            sig[q] = fresh.setdefault(s, len(fresh))
        if len(fresh) == len(set(cls)):
            break
        cls = sig
    m = len(set(cls))
    if m == d.n:
        return d
    order: Dict[int, int] = {}
    rep: Dict[int, int] = {}
    for q in range(d.n):
        if cls[q] not in order:
            order[cls[q]] = len(order)
            rep[order[cls[q]]] = q
    delta = {}
    rank = [0] * m
    for b, q in rep.items():
        rank[b] = d.rank[q]
        for l in letters:
            delta[(b, l)] = order[cls[d.delta[(q, l)]]]
    return Dpa(d.props, m, order[cls[d.initial]], delta, tuple(rank))


def format_dpa(d: Dpa) -> str:
    lines = ["props: %s" % (" ".join(d.props) if d.props else "(none)"),
             "states: %d  initial: %d" % (d.n, d.initial)]
    for q in range(d.n):
        lines.append("state %d rank %d" % (q, d.rank[q]))
        for l in d.letters():
            shown = "{%s}" % ",".join(sorted(l))
            lines.append("  %s -> %d" % (shown, d.delta[(q, l)]))
    return "\n".join(lines) + "\n"
