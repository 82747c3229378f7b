"""Concurrent game structures with per-agent ability annotations.

A model couples a finite concurrent game structure (states, agents, actions,
observation partitions, protocols, a deterministic transition table and a
propositional labeling) with an ability map that assigns every agent one of
four strategy classes, written as two-letter tags:

    IR  perfect information, perfect recall
    Ir  perfect information, memoryless
    iR  imperfect information, perfect recall
    ir  imperfect information, memoryless

The transition table is partial by design: it must be defined on exactly the
protocol-conforming joint actions and nowhere else.
"""

from __future__ import annotations

import itertools
import math
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .errors import AcgsError

ABILITIES = ("IR", "Ir", "iR", "ir")
PERFECT_INFO = frozenset(("IR", "Ir"))
PERFECT_RECALL = frozenset(("IR", "iR"))

# pi2 may replace an ability of pi1 only by one granting at least as much
# information and at least as much recall.
_UPGRADES = {
    "ir": frozenset(("ir", "Ir", "iR", "IR")),
    "Ir": frozenset(("Ir", "IR")),
    "iR": frozenset(("iR", "IR")),
    "IR": frozenset(("IR",)),
}


class Cgs:
    """Explicit-state concurrent game structure with an ability map.

    `obs` maps an agent to a per-state observation value; two states are
    indistinguishable for the agent iff their values are equal. Agents absent
    from `obs` observe the state itself (identity partition). `ability`
    defaults every unlisted agent to "IR".
    """

    def __init__(self, states, initial, agents, actions, protocol,
                 transitions, labels, obs=None, ability=None):
        self.states = list(states)
        self.index = {s: k for k, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise ValueError("duplicate state names")
        self.initial = set(initial)
        self.agents = list(agents)
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("duplicate agent names")
        self.actions = {i: list(actions.get(i, ())) for i in self.agents}
        self._action_index = {
            i: {a: k for k, a in enumerate(acts)}
            for i, acts in self.actions.items()
        }
        self.protocol = {
            i: {s: self._norm_choices(i, opts)
                for s, opts in protocol.get(i, {}).items()}
            for i in self.agents
        }
        self.transitions = transitions if isinstance(transitions, dict) else dict(transitions)
        self.labels = {p: set(v) for p, v in labels.items()}
        self.obs = {i: dict(table) for i, table in (obs or {}).items()}
        self.ability = {i: "IR" for i in self.agents}
        if ability:
            self.ability.update(ability)
        self._class_cache: Dict[Any, Dict[Any, frozenset]] = {}
        self._succ_cache: Dict[Any, Tuple] = {}
        self._state_labels: Optional[Dict[Any, frozenset]] = None

    def _norm_choices(self, agent, opts):
        # protocols are stored as tuples in action declaration order so that
        # every strategy enumeration is reproducible
        idx = self._action_index.get(agent, {})
        return tuple(sorted(set(opts), key=lambda a: (idx.get(a, len(idx)), str(a))))

    def _replace(self, **overrides) -> "Cgs":
        clone = object.__new__(Cgs)
        clone.__dict__.update(self.__dict__)
        clone._succ_cache = {}
        clone._class_cache = dict(self._class_cache)
        for name, value in overrides.items():
            setattr(clone, name, value)
        if "labels" in overrides:
            clone._state_labels = None
        if "obs" in overrides:
            clone._class_cache = {}
        return clone

    def __repr__(self):
        return "Cgs(%d states, agents=%r)" % (len(self.states), self.agents)

    # -- observation partitions -------------------------------------------

    def observation(self, agent, state):
        table = self.obs.get(agent)
        return table[state] if table is not None else state

    def _classes(self, agent) -> Dict[Any, frozenset]:
        got = self._class_cache.get(agent)
        if got is None:
            table = self.obs.get(agent)
            if table is None:
                got = {s: frozenset((s,)) for s in self.states}
            else:
                buckets: Dict[Any, list] = {}
                for s in self.states:
                    buckets.setdefault(table[s], []).append(s)
                got = {}
                for members in buckets.values():
                    block = frozenset(members)
                    for s in members:
                        got[s] = block
            self._class_cache[agent] = got
        return got

    def epistemic_class(self, agent, state) -> frozenset:
        """States the agent cannot tell apart from `state` (including it)."""
        if agent not in self.actions:
            raise ValueError("unknown agent %r" % (agent,))
        return self._classes(agent)[state]

    def class_blocks(self, agent) -> List[frozenset]:
        """Observation classes of one agent, ordered by first state occurrence."""
        classes = self._classes(agent)
        out, seen = [], set()
        for s in self.states:
            block = classes[s]
            if block not in seen:
                seen.add(block)
                out.append(block)
        return out

    # -- moves --------------------------------------------------------------

    def protocol_of(self, agent, state) -> tuple:
        return self.protocol[agent][state]

    def joint_actions(self, state) -> Iterator[tuple]:
        pools = [self.protocol[i][state] for i in self.agents]
        return itertools.product(*pools)

    def successors(self, state) -> Tuple[Tuple[tuple, Any], ...]:
        """All (joint action, target) pairs available at `state`."""
        got = self._succ_cache.get(state)
        if got is None:
            pairs = []
            for joint in self.joint_actions(state):
                try:
                    pairs.append((joint, self.transitions[(state, joint)]))
                except KeyError:
                    raise AcgsError(
                        "no transition from %r under joint action %r" % (state, joint))
            got = tuple(pairs)
            self._succ_cache[state] = got
        return got

    def succ_states(self, state) -> Tuple[Any, ...]:
        seen = {t for _, t in self.successors(state)}
        return tuple(sorted(seen, key=self.index.get))

    # -- labeling -----------------------------------------------------------

    def label_set(self, state) -> frozenset:
        if self._state_labels is None:
            table = {s: set() for s in self.states}
            for p, sts in self.labels.items():
                for s in sts:
                    table[s].add(p)
            self._state_labels = {s: frozenset(v) for s, v in table.items()}
        return self._state_labels[state]

    # -- derived models -------------------------------------------------------

    def with_ability(self, ability) -> "Cgs":
        new = {i: "IR" for i in self.agents}
        new.update(ability)
        return self._replace(ability=new)

    def with_labels(self, labels) -> "Cgs":
        return self._replace(labels={p: set(v) for p, v in labels.items()})


def validate(m: Cgs) -> List[str]:
    """Check structural well-formedness; returns a list of violation messages."""
    out = []
    sset = set(m.states)
    for s in m.initial:
        if s not in sset:
            out.append("initial state %r is not a state" % (s,))
    if not m.agents:
        out.append("no agents")
    for i in m.agents:
        if not m.actions.get(i):
            out.append("agent %r has no actions" % (i,))
    for i in m.agents:
        if m.ability[i] not in ABILITIES:
            out.append("agent %r has unknown ability %r" % (i, m.ability[i]))
    for i, table in m.obs.items():
        if i not in m.actions:
            out.append("observation table for unknown agent %r" % (i,))
            continue
        missing = sset - set(table)
        if missing:
            out.append("agent %r: observation undefined on %d state(s)" % (i, len(missing)))

    # protocols: total, nonempty, within the action alphabet, uniform across
    # observation classes
    acts_ok = True
    for i in m.agents:
        table = m.protocol.get(i, {})
        alphabet = set(m.actions.get(i, ()))
        for s in m.states:
            opts = table.get(s)
            if opts is None:
                out.append("agent %r: no protocol at state %r" % (i, s))
                acts_ok = False
            elif not opts:
                out.append("agent %r: empty protocol at state %r" % (i, s))
                acts_ok = False
            elif not set(opts) <= alphabet:
                out.append("agent %r: protocol at %r uses undeclared actions" % (i, s))
                acts_ok = False
    if acts_ok:
        for i in m.agents:
            if i not in m.obs:
                continue
            for block in m.class_blocks(i):
                opts = {m.protocol[i][s] for s in block}
                if len(opts) > 1:
                    out.append("agent %r: protocol not uniform on class %r"
                               % (i, tuple(sorted(block, key=m.index.get))))

    # perfect-information agents must distinguish all states
    for i in m.agents:
        if m.ability[i] in PERFECT_INFO and i in m.obs:
            if any(len(b) > 1 for b in m.class_blocks(i)):
                out.append("agent %r is %s-typed but has a non-identity observation"
                           % (i, m.ability[i]))

    # the transition table must cover exactly the conforming joint actions
    if acts_ok:
        expected = 0
        for s in m.states:
            combos = 1
            for i in m.agents:
                combos *= len(m.protocol[i][s])
            expected += combos
            for joint in m.joint_actions(s):
                tgt = m.transitions.get((s, joint))
                if tgt is None:
                    out.append("missing transition from %r under %r" % (s, joint))
                elif tgt not in sset:
                    out.append("transition from %r under %r leads to unknown state %r"
                               % (s, joint, tgt))
        if len(m.transitions) > expected:
            for (s, joint) in m.transitions:
                if s not in sset:
                    out.append("transition from unknown state %r" % (s,))
                elif (not len(joint) == len(m.agents)
                      or any(a not in m.protocol[i].get(s, ())
                             for i, a in zip(m.agents, joint))):
                    out.append("transition from %r under non-conforming %r" % (s, joint))

    for p, sts in m.labels.items():
        for s in sts:
            if s not in sset:
                out.append("label %r lists unknown state %r" % (p, s))
    return out


def group_relation(m: Cgs, agents, kind: str) -> Dict[Any, frozenset]:
    """Neighborhood map of a group indistinguishability relation.

    kind "E": union of the members' relations (not transitive in general),
    kind "D": intersection, kind "C": transitive closure of the union.
    """
    agents = list(agents)
    if not agents:
        raise ValueError("empty agent group")
    if kind not in ("E", "D", "C"):
        raise ValueError("kind must be one of E, D, C")
    tables = [m._classes(i) for i in agents]
    if kind == "D":
        out = {}
        for s in m.states:
            block = set(tables[0][s])
            for t in tables[1:]:
                block &= t[s]
            out[s] = frozenset(block)
        return out
    if kind == "E":
        return {s: frozenset().union(*(t[s] for t in tables)) for s in m.states}
    # common knowledge: connected components of the union relation
    parent = {s: s for s in m.states}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in tables:
        for s in m.states:
            root = find(s)
            for u in t[s]:
                ru = find(u)
                if ru != root:
                    parent[ru] = root
    comps: Dict[Any, set] = {}
    for s in m.states:
        comps.setdefault(find(s), set()).add(s)
    return {s: frozenset(comps[find(s)]) for s in m.states}


def coarser_than(pi1: Dict, pi2: Dict, coalition) -> bool:
    """True iff pi2 agrees with pi1 on the coalition and only upgrades others."""
    if set(pi1) != set(pi2):
        raise ValueError("ability maps cover different agents")
    for i in coalition:
        if pi1[i] != pi2[i]:
            return False
    return all(pi2[j] in _UPGRADES[pi1[j]] for j in pi1 if j not in set(coalition))


def _strategy_axes(m: Cgs, agents):
    agents = [i for i in m.agents if i in set(agents)]
    for i in agents:
        if m.ability[i] in PERFECT_RECALL:
            raise ValueError(
                "agent %r is %s-typed; only memoryless agents have finitely many "
                "strategies" % (i, m.ability[i]))
    axes = []
    for i in agents:
        for block in m.class_blocks(i):
            rep = min(block, key=m.index.get)
            axes.append((i, block, m.protocol[i][rep]))
    return axes


def count_uniform_strategies(m: Cgs, agents) -> int:
    """Number of joint uniform memoryless strategies for the given agents."""
    return math.prod(len(opts) for _, _, opts in _strategy_axes(m, agents))


def enumerate_uniform_strategies(m: Cgs, agents) -> Iterator[Dict[Any, Dict[Any, Any]]]:
    """Stream all joint uniform memoryless strategies for the given agents.

    Deterministic order: agents as declared, classes by first state
    occurrence, actions as declared. Each item maps agent -> state -> action.
    """
    axes = _strategy_axes(m, agents)
    ordered = [i for i in m.agents if i in set(agents)]
    for picks in itertools.product(*(opts for _, _, opts in axes)):
        strat: Dict[Any, Dict[Any, Any]] = {i: {} for i in ordered}
        for (i, block, _), act in zip(axes, picks):
            table = strat[i]
            for s in block:
                table[s] = act
        yield strat


def prune(m: Cgs, fixed: Dict[Any, Dict[Any, Any]]) -> Cgs:
    """Restrict each fixed agent's protocol to its chosen action everywhere."""
    proto = dict(m.protocol)
    for i, strat in fixed.items():
        proto[i] = {s: (strat[s],) for s in m.states}
    return m._replace(protocol=proto)


def as_uniform_memoryless(m: Cgs) -> Cgs:
    """View every Ir-typed agent as ir with an all-distinguishing observation.

    A perfect-information memoryless strategy is exactly a uniform strategy
    over the identity partition, so this is a semantics-preserving rewrite
    that lets one enumeration routine serve both ability tags.
    """
    demoted = [i for i in m.agents if m.ability[i] == "Ir"]
    if not demoted:
        return m
    ability = dict(m.ability)
    obs = dict(m.obs)
    for i in demoted:
        ability[i] = "ir"
        obs.pop(i, None)
    clone = m._replace(ability=ability, obs=obs)
    clone._class_cache = {i: v for i, v in m._class_cache.items() if i not in demoted}
    return clone
