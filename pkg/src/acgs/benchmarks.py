"""Benchmark model generators.

Each generator returns a pair (model, formulas): a ready-to-check game
structure plus the formula strings conventionally asked about it. Abilities
are parameterizable everywhere; observation partitions are emitted only for
agents whose ability actually reads them (perfect-information agents get the
identity partition, as required for a well-formed model).
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Tuple

from .model import Cgs, PERFECT_INFO

Generated = Tuple[Cgs, List[str]]


def gen_figure1(abilities: Tuple[str, str] = ("IR", "ir")) -> Generated:
    """Two agents, four states: the second agent confuses s0, s1 and s2.

    Agent a1 only ever plays `a`; agent a2 picks b1 or b2. Whether a1 can
    keep `q` invariant from s0 depends entirely on a2's ability tag, which
    makes this the canonical smoke test for ability-sensitive checking.
    """
    states = ["s0", "s1", "s2", "s3"]
    trans = {
        ("s0", ("a", "b1")): "s1",
        ("s0", ("a", "b2")): "s2",
        ("s1", ("a", "b1")): "s1",
        ("s1", ("a", "b2")): "s3",
        ("s2", ("a", "b1")): "s3",
        ("s2", ("a", "b2")): "s2",
        ("s3", ("a", "b1")): "s0",
        ("s3", ("a", "b2")): "s0",
    }
    obs = {}
    if abilities[1] not in PERFECT_INFO:
        obs["a2"] = {"s0": "blur", "s1": "blur", "s2": "blur", "s3": "s3"}
    if abilities[0] not in PERFECT_INFO:
        obs["a1"] = {s: s for s in states}
    m = Cgs(
        states=states,
        initial=["s0"],
        agents=["a1", "a2"],
        actions={"a1": ["a"], "a2": ["b1", "b2"]},
        protocol={
            "a1": {s: ("a",) for s in states},
            "a2": {s: ("b1", "b2") for s in states},
        },
        transitions=trans,
        labels={"q": ["s0", "s1", "s2"]},
        obs=obs,
        ability={"a1": abilities[0], "a2": abilities[1]},
    )
    return m, ["<<a1>> G q"]


# ---------------------------------------------------------------------------
# dining cryptographers, with a payer who may lie about the coin comparison

_PHASES = ("i", "p1", "p2", "p3", "r1", "r2")


def gen_dining(n: int, abilities: Optional[Dict[str, str]] = None) -> Generated:
    """Ring of n cryptographers plus an employer environment.

    One round: the environment picks the payer, tosses every coin, the payer
    (if a cryptographer) announces the parity truthfully or flipped, then two
    rest steps close the round and the next one starts. The announcement
    parity of honest cryptographers telescopes away, so the `odd` bit is
    exactly the payer's lie bit. Cryptographer i observes its own coin, its
    left neighbour's coin, whether it paid, and the announced parity.

    By default c1 and c2 run uniform memoryless strategies (they are the ones
    whose lying power the formulas probe) and everyone else has perfect
    information and recall.
    """
    if n < 3:
        raise ValueError("need at least 3 cryptographers")
    crypts = ["c%d" % (i + 1) for i in range(n)]
    agents = ["e"] + crypts
    payers = ["e"] + crypts

    ability = {"e": "IR"}
    ability.update({c: "IR" for c in crypts})
    ability["c1"] = "ir"
    ability["c2"] = "ir"
    if abilities:
        ability.update(abilities)

    def name(phase, payer, coins, odd):
        return "%s_%s_%s_%d" % (phase, payer, coins, odd)

    coin_words = ["".join(bits) for bits in itertools.product("01", repeat=n)]
    states = []
    for coins in coin_words:
        states.append(name("i", "x", coins, 0))
        for p in payers:
            states.append(name("p1", p, coins, 0))
        for p in payers:
            states.append(name("p2", p, coins, 0))
        states.append(name("p3", "e", coins, 0))
        for c in crypts:
            states.append(name("p3", c, coins, 0))
            states.append(name("p3", c, coins, 1))
        for odd in (0, 1):
            states.append(name("r1", "x", coins, odd))
        for odd in (0, 1):
            states.append(name("r2", "x", coins, odd))

    picks = ["pick_%s" % p for p in payers]
    tosses = ["toss_%s" % w for w in coin_words]
    actions = {"e": ["tick"] + picks + tosses}
    for c in crypts:
        actions[c] = ["tick", "truth", "lie"]

    def split(s):
        phase, payer, coins, odd = s.split("_")
        return phase, payer, coins, int(odd)

    protocol = {i: {} for i in agents}
    trans = {}
    for s in states:
        phase, payer, coins, odd = split(s)
        if phase in ("i", "r2"):
            protocol["e"][s] = tuple(picks)
        elif phase == "p1":
            protocol["e"][s] = tuple(tosses)
        else:
            protocol["e"][s] = ("tick",)
        for c in crypts:
            if phase == "p2" and payer == c:
                protocol[c][s] = ("truth", "lie")
            else:
                protocol[c][s] = ("tick",)

    for s in states:
        phase, payer, coins, odd = split(s)
        for joint in itertools.product(*(protocol[i][s] for i in agents)):
            move = dict(zip(agents, joint))
            if phase in ("i", "r2"):
                tgt = name("p1", move["e"][len("pick_"):], coins, 0)
            elif phase == "p1":
                tgt = name("p2", payer, move["e"][len("toss_"):], 0)
            elif phase == "p2":
                bit = 1 if payer != "e" and move[payer] == "lie" else 0
                tgt = name("p3", payer, coins, bit)
            elif phase == "p3":
                tgt = name("r1", "x", coins, odd)
            else:
                tgt = name("r2", "x", coins, odd)
            trans[(s, joint)] = tgt

    labels: Dict[str, List[str]] = {"odd": []}
    for c in crypts:
        labels["%spaid" % c] = []
    for s in states:
        phase, payer, coins, odd = split(s)
        if phase == "p3" and odd == 1:
            labels["odd"].append(s)
        if payer in crypts:
            labels["%spaid" % payer].append(s)

    obs = {}
    for k, c in enumerate(crypts):
        if ability[c] in PERFECT_INFO:
            continue
        table = {}
        for s in states:
            phase, payer, coins, odd = split(s)
            table[s] = (phase, coins[k], coins[k - 1], payer == c, odd)
        obs[c] = table

    m = Cgs(
        states=states,
        initial=[name("i", "x", w, 0) for w in coin_words],
        agents=agents,
        actions=actions,
        protocol=protocol,
        transitions=trans,
        labels=labels,
        obs=obs,
        ability=ability,
    )

    formulas = []
    for i, c in enumerate(crypts):
        others = [d for d in crypts if d != c]
        some = " | ".join("%spaid" % d for d in others)
        none_known = " & ".join("!(K %s %spaid)" % (c, d) for d in others)
        formulas.append("<<>> G ((odd & !%spaid) -> ((K %s (%s)) & %s))"
                        % (c, c, some, none_known))
    return m, formulas


# ---------------------------------------------------------------------------
# castle workers

def gen_castle(workers: int, max_hp: int,
               abilities: Optional[Dict[str, str]] = None) -> Generated:
    """w castles, each kept by one worker, plus a timekeeper environment.

    Rounds last 4w phases; everyone acts at phase 0 and idles through the
    rest. A worker attacks a foreign castle, defends its own, or does
    nothing, and may not repeat an attack or a defence in two consecutive
    rounds (the stance component records the last round's action). A castle
    loses hit points equal to the surplus of attackers over defenders.
    Workers with an imperfect-information ability observe only the round
    phase and their own stance.
    """
    if workers < 2:
        raise ValueError("need at least 2 workers")
    if not 1 <= max_hp <= 9:
        raise ValueError("max_hp must be between 1 and 9")
    wnames = ["w%d" % (i + 1) for i in range(workers)]
    agents = wnames + ["e"]
    ability = {i: "IR" for i in agents}
    if abilities:
        ability.update(abilities)

    stance_values = []
    for i in range(workers):
        stance_values.append(("i",) + tuple(str(j + 1) for j in range(workers) if j != i)
                             + ("d", "n"))
    period = 4 * workers

    def name(hp, st, phase):
        return "h%s_t%s_p%d" % ("".join(map(str, hp)), "".join(st), phase)

    actions = {}
    for i in range(workers):
        actions[wnames[i]] = (["atk%d" % (j + 1) for j in range(workers) if j != i]
                              + ["def", "idle"])
    actions["e"] = ["tick"]

    def allowed(i, stance):
        # no attack or defence twice in a row; doing nothing is always fine
        out = []
        for a in actions[wnames[i]]:
            if a == "def" and stance == "d":
                continue
            if a.startswith("atk") and stance == a[len("atk"):]:
                continue
            out.append(a)
        return tuple(out)

    hp_range = range(max_hp + 1)
    states = []
    protocol = {i: {} for i in agents}
    trans = {}
    labels: Dict[str, List[str]] = {"allDefeated": []}
    for k in range(workers):
        labels["castle%dDefeated" % (k + 1)] = []

    for hp in itertools.product(hp_range, repeat=workers):
        for st in itertools.product(*stance_values):
            for phase in range(period):
                s = name(hp, st, phase)
                states.append(s)
                protocol["e"][s] = ("tick",)
                if phase == 0:
                    for i in range(workers):
                        protocol[wnames[i]][s] = allowed(i, st[i])
                else:
                    for i in range(workers):
                        protocol[wnames[i]][s] = ("idle",)
                for k in range(workers):
                    if hp[k] == 0:
                        labels["castle%dDefeated" % (k + 1)].append(s)
                if all(h == 0 for h in hp):
                    labels["allDefeated"].append(s)

    for hp in itertools.product(hp_range, repeat=workers):
        for st in itertools.product(*stance_values):
            for phase in range(period):
                s = name(hp, st, phase)
                if phase != 0:
                    tgt = name(hp, st, (phase + 1) % period)
                    joint = tuple(["idle"] * workers + ["tick"])
                    trans[(s, joint)] = tgt
                    continue
                for moves in itertools.product(*(allowed(i, st[i])
                                                 for i in range(workers))):
                    new_hp = []
                    for k in range(workers):
                        attackers = sum(1 for a in moves if a == "atk%d" % (k + 1))
                        defenders = 1 if moves[k] == "def" else 0
                        new_hp.append(max(0, hp[k] - max(0, attackers - defenders)))
                    new_st = tuple("d" if a == "def" else
                                   "n" if a == "idle" else a[len("atk"):]
                                   for a in moves)
                    tgt = name(tuple(new_hp), new_st, 1 % period)
                    trans[(s, tuple(moves) + ("tick",))] = tgt

    obs = {}
    for i in range(workers):
        if ability[wnames[i]] in PERFECT_INFO:
            continue
        table = {}
        for s in states:
            phase = int(s.rsplit("_p", 1)[1])
            stance = s.split("_t", 1)[1].split("_p", 1)[0][i]
            table[s] = (phase == 0, stance)
        obs[wnames[i]] = table

    init = name(tuple([max_hp] * workers), tuple(["i"] * workers), 0)
    m = Cgs(
        states=states,
        initial=[init],
        agents=agents,
        actions=actions,
        protocol=protocol,
        transitions=trans,
        labels=labels,
        obs=obs,
        ability=ability,
    )
    if workers >= 3:
        formulas = ["<<w1,w2>> F castle%dDefeated" % workers,
                    "<<w1,w2>> F allDefeated"]
    else:
        formulas = ["<<w1>> F castle2Defeated",
                    "<<w1,w2>> F allDefeated"]
    return m, formulas


# ---------------------------------------------------------------------------
# online bookstore
#
# Experimental reconstruction of a two-party trade protocol. Kept out of the
# hard benchmark set; state and action tallies (15/13 for the supplier,
# 12/7 for the purchaser) and the formula shapes are the fixed points.

_SUP_PROTO = {
    "idle": ("recv_order",),
    "considering": ("accept", "reject", "quit"),
    "accepted_note": ("notify_acc",),
    "rejecting": ("notify_rej",),
    "await_pay": ("recv_pay", "quit"),
    "got_payment": ("deliver", "refund", "quit"),
    "delivering": ("finish",),
    "refunding": ("finish",),
    "revoked_seen": ("ack_revoke",),
    "aborted": ("ack_quit",),
    "quit": ("finish",),
    "done_success": ("wait",),
    "done_refund": ("wait",),
    "done_reject": ("wait",),
    "done_revoked": ("wait",),
}

_PUR_PROTO = {
    "browsing": ("order", "wait", "quit"),
    "ordered": ("wait", "revoke", "quit"),
    "notified_acc": ("pay", "revoke", "quit"),
    "paid_wait": ("wait", "quit"),
    "got_good": ("recv",),
    "quitting": ("finish",),
    "term_done": ("finish",),
    "aborted": ("finish",),
    "done_success": ("wait",),
    "done_refund": ("wait",),
    "done_reject": ("wait",),
    "done_revoked": ("wait",),
}

_SUP_ACTIONS = ["recv_order", "accept", "reject", "notify_acc", "notify_rej",
                "recv_pay", "deliver", "refund", "finish", "ack_revoke",
                "ack_quit", "quit", "wait"]
_PUR_ACTIONS = ["order", "revoke", "pay", "recv", "quit", "finish", "wait"]


def _bookstore_step(sl: str, pl: str, sa: str, pa: str) -> Tuple[str, str]:
    # a purchaser quit always lands first, then a supplier quit, then a
    # revocation, then the regular protocol step
    if pl == "quitting":
        return "aborted", "term_done"
    if pa == "quit":
        return sl, "quitting"
    if sl in ("aborted",):
        return "aborted", "term_done"
    if sa == "quit":
        return "quit", "aborted"
    if pa == "revoke":
        return "revoked_seen", "done_revoked"
    if sl == "idle":
        return ("considering", "ordered") if pa == "order" else (sl, pl)
    if sl == "considering":
        return ("accepted_note" if sa == "accept" else "rejecting"), pl
    if sl == "accepted_note":
        return "await_pay", "notified_acc"
    if sl == "rejecting":
        return "done_reject", "done_reject"
    if sl == "await_pay":
        return ("got_payment", "paid_wait") if pa == "pay" else (sl, pl)
    if sl == "got_payment":
        if sa == "deliver":
            return "delivering", "got_good"
        return "refunding", "done_refund"
    if sl == "delivering":
        return "done_success", "done_success"
    if sl == "refunding":
        return "done_refund", "done_refund"
    if sl == "revoked_seen":
        return "done_revoked", "done_revoked"
    if sl == "quit":
        return sl, pl
    return sl, pl


def gen_bookstore(abilities: Tuple[str, str] = ("ir", "ir")) -> Generated:
    """Supplier and purchaser negotiating one trade.

    The purchaser orders, the supplier accepts or rejects, an accepted order
    is paid and then delivered or refunded; the purchaser may revoke a
    pending order and either side may walk away. Each side observes only its
    own local protocol state, which is what makes the supplier's knowledge
    of a completable trade ability-dependent.
    """
    start = ("idle", "browsing")
    states = [start]
    seen = {start}
    frontier = [start]
    trans = {}
    while frontier:
        sl, pl = frontier.pop()
        for sa in _SUP_PROTO[sl]:
            for pa in _PUR_PROTO[pl]:
                tgt = _bookstore_step(sl, pl, sa, pa)
                trans[(_bs_name(sl, pl), (sa, pa))] = _bs_name(*tgt)
                if tgt not in seen:
                    seen.add(tgt)
                    states.append(tgt)
                    frontier.append(tgt)

    names = [_bs_name(*g) for g in states]
    protocol = {
        "sup": {_bs_name(sl, pl): _SUP_PROTO[sl] for sl, pl in states},
        "pur": {_bs_name(sl, pl): _PUR_PROTO[pl] for sl, pl in states},
    }
    ended = {"done_success", "done_refund", "done_reject", "done_revoked"}
    live_sup = set(_SUP_PROTO) - {"aborted", "quit"}
    live_pur = set(_PUR_PROTO) - {"quitting", "term_done", "aborted"}
    labels = {
        "snp_no_t": [_bs_name(sl, pl) for sl, pl in states
                     if sl in live_sup and pl in live_pur],
        "trade_end": [_bs_name(sl, pl) for sl, pl in states if pl in ended],
        "trade_success": [_bs_name(sl, pl) for sl, pl in states
                          if pl == "done_success"],
    }
    obs = {}
    if abilities[0] not in PERFECT_INFO:
        obs["sup"] = {_bs_name(sl, pl): sl for sl, pl in states}
    if abilities[1] not in PERFECT_INFO:
        obs["pur"] = {_bs_name(sl, pl): pl for sl, pl in states}
    m = Cgs(
        states=names,
        initial=[_bs_name(*start)],
        agents=["sup", "pur"],
        actions={"sup": list(_SUP_ACTIONS), "pur": list(_PUR_ACTIONS)},
        protocol=protocol,
        transitions=trans,
        labels=labels,
        obs=obs,
        ability={"sup": abilities[0], "pur": abilities[1]},
    )
    formulas = [
        "<<>> G (snp_no_t -> (K sup (<<sup,pur>> F trade_end)))",
        "<<sup,pur>> (snp_no_t U (trade_end & !trade_success))",
    ]
    return m, formulas


def _bs_name(sl: str, pl: str) -> str:
    return "s_%s__p_%s" % (sl, pl)
