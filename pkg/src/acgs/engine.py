"""Model-checking driver for state formulas over typed game structures.

Boolean and epistemic operators are evaluated bottom-up by direct set
computation; every coalition subformula hands its goal to one of the two
strategic backends. Embedded non-propositional state formulas inside a
goal are checked first and replaced by fresh propositions, so the
backends only ever see propositional goals.

The enumeration backend applies when the goal carries a single outermost
temporal operator and the strategy space fits the budget; the
parity-game reduction covers every pure-LTL goal. `algo="auto"` picks
between them per coalition subformula, `"enum"` and `"parity"` force
one side (`"enum"` fails on goals it cannot express).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, NamedTuple, Optional, Union

from .enumcheck import (
    STRATEGY_BUDGET,
    check_simple_atl,
    combination_count,
    require_decidable,
)
from .errors import AlgorithmInapplicable, UndecidableConfiguration
from .formulas import (
    And,
    Atom,
    Coalition,
    GroupKnows,
    Knows,
    Not,
    StateFormula,
    collect_state_subformulae,
    holds_in,
    normalize_single_temporal,
    parse_formula,
    substitute_state_subformulae,
    walk_state,
)
from .gamecheck import check_simple_atlstar, commitment_count
from .ltl2dpa import ltl_to_dpa
from .model import Cgs, group_relation

Formula = Union[str, StateFormula]

# auto dispatch sends a goal to the enumeration backend while its strategy
# profile count stays within this factor of the parity backend's subgame
# count (profiles are cheap, subgames are not)
ENUM_PREFERENCE = 4096


@dataclass
class McStats:
    """Work counters filled in by `mc` when passed as its `stats`."""

    coalitions: int = 0         # coalition subformulas evaluated (cache misses)
    enum_runs: int = 0
    enum_combinations: int = 0  # strategy combinations across enumeration runs
    parity_runs: int = 0
    parity_games: int = 0       # subgames solved across reduction runs
    game_vertices: int = 0      # total size of those subgames
    dpa_states: int = 0         # largest goal automaton built
    seconds: float = 0.0        # wall time inside the strategic backends


class Verdict(NamedTuple):
    sat: bool                   # every initial state satisfies the formula
    by_initial: Dict[Any, bool]
    states: FrozenSet[Any]


class _Eval:
    def __init__(self, m: Cgs, algo: str, budget: int, jobs: int,
                 stats: Optional[McStats]):
        self.m = m
        self.algo = algo
        self.budget = budget
        self.jobs = jobs
        self.stats = stats
        self.everything = frozenset(m.states)
        self.cache: Dict[StateFormula, FrozenSet[Any]] = {}

    def run(self, f: StateFormula) -> FrozenSet[Any]:
        got = self.cache.get(f)
        if got is None:
            got = self.cache[f] = self._eval(f)
        return got

    def _eval(self, f: StateFormula) -> FrozenSet[Any]:
        m = self.m
        if isinstance(f, Atom):
            if f.name == "true":
                return self.everything
            if f.name == "false":
                return frozenset()
            return frozenset(m.labels.get(f.name, ()))
        if isinstance(f, Not):
            return self.everything - self.run(f.arg)
        if isinstance(f, And):
            return self.run(f.left) & self.run(f.right)
        if isinstance(f, Knows):
            if f.agent not in m.agents:
                raise ValueError("unknown agent %r" % (f.agent,))
            inner = self.run(f.arg)
            return frozenset(s for s in m.states
                             if set(m.epistemic_class(f.agent, s)) <= inner)
        if isinstance(f, GroupKnows):
            for i in f.agents:
                if i not in m.agents:
                    raise ValueError("unknown agent %r" % (i,))
            rel = group_relation(m, f.agents, f.kind)
            inner = self.run(f.arg)
            return frozenset(s for s in m.states if rel[s] <= inner)
        if isinstance(f, Coalition):
            return self._coalition(f)
        raise TypeError("not a state formula: %r" % (f,))

    def _coalition(self, f: Coalition) -> FrozenSet[Any]:
        m = self.m
        require_decidable(m)
        for i in f.agents:
            if i not in m.agents:
                raise ValueError("unknown agent %r" % (i,))
        valuation = {g: self.run(g) for g in collect_state_subformulae(f.body)}
        ltl, fresh = substitute_state_subformulae(f.body, valuation)
        m2 = m.with_labels({**m.labels, **fresh}) if fresh else m

        shape = normalize_single_temporal(ltl)
        if shape is None and self.algo == "enum":
            raise AlgorithmInapplicable(
                "the enumeration backend needs a goal with a single "
                "outermost temporal operator over state formulas")
        combos = None
        use_enum = False
        if shape is not None and self.algo != "parity":
            combos = combination_count(m2, f.agents)
            if self.algo == "enum":
                use_enum = True
            elif combos <= self.budget:
                # Checking one strategy profile is far cheaper than solving
                # one subgame, so enumeration wins until the profile count
                # (inflated by treating every coalition member as
                # memoryless) dwarfs the subgame count.
                use_enum = combos <= (ENUM_PREFERENCE
                                      * commitment_count(m2, f.agents))
        began = time.perf_counter()
        telemetry: Optional[Dict[str, int]] = None
        if use_enum:
            sets = tuple(self._prop_states(m2, g) for g in shape[1:])
            got = frozenset(check_simple_atl(m2, f.agents, (shape[0], *sets),
                                             budget=self.budget,
                                             jobs=self.jobs))
        else:
            telemetry = {} if self.stats is not None else None
            got = frozenset(check_simple_atlstar(m2, f.agents, ltl,
                                                 jobs=self.jobs,
                                                 budget=self.budget,
                                                 telemetry=telemetry))
        if self.stats is not None:
            self.stats.coalitions += 1
            self.stats.seconds += time.perf_counter() - began
            if use_enum:
                self.stats.enum_runs += 1
                self.stats.enum_combinations += combos
            else:
                self.stats.parity_runs += 1
                self.stats.parity_games += telemetry.get("games", 0)
                self.stats.game_vertices += telemetry.get("vertices", 0)
                self.stats.dpa_states = max(self.stats.dpa_states,
                                            ltl_to_dpa(ltl).n)
        return got

    @staticmethod
    def _prop_states(m2: Cgs, g: StateFormula) -> FrozenSet[Any]:
        return frozenset(s for s in m2.states if holds_in(g, m2.label_set(s)))


def mc(m: Cgs, formula: Formula, algo: str = "auto",
       budget: int = STRATEGY_BUDGET, jobs: int = 1,
       stats: Optional[McStats] = None) -> FrozenSet[Any]:
    """The set of states of `m` satisfying the formula."""
    if algo not in ("auto", "enum", "parity"):
        raise ValueError("unknown algorithm %r" % (algo,))
    f = parse_formula(formula) if isinstance(formula, str) else formula
    return _Eval(m, algo, budget, jobs, stats).run(f)


def check(m: Cgs, formula: Formula, algo: str = "auto",
          budget: int = STRATEGY_BUDGET, jobs: int = 1,
          stats: Optional[McStats] = None) -> Verdict:
    """Model check against the initial states."""
    got = mc(m, formula, algo=algo, budget=budget, jobs=jobs, stats=stats)
    by_initial = {s: s in got for s in m.initial}
    return Verdict(all(by_initial.values()), by_initial, got)


def semantics_sigma(g: Cgs, sigma: str, formula: Formula, algo: str = "auto",
                    budget: int = STRATEGY_BUDGET, jobs: int = 1,
                    stats: Optional[McStats] = None) -> FrozenSet[Any]:
    """Evaluate under one ability type shared by all strategic agents.

    Every agent mentioned in a coalition gets ability `sigma`; everyone
    else is left unrestricted (perfect information and recall), so their
    behavior is quantified over all action choices. Unless `sigma` is
    "IR", evaluation per coalition only composes soundly when every
    coalition in the formula binds the same agents, and anything else is
    rejected.
    """
    if sigma == "iR":
        raise UndecidableConfiguration(
            "imperfect information with perfect recall makes strategic "
            "formulas undecidable")
    if sigma not in ("IR", "Ir", "ir"):
        raise ValueError("unknown ability type %r" % (sigma,))
    f = parse_formula(formula) if isinstance(formula, str) else formula
    coalitions = [node for node in walk_state(f) if isinstance(node, Coalition)]
    mentioned = frozenset(i for node in coalitions for i in node.agents)
    if sigma != "IR":
        for node in coalitions:
            if frozenset(node.agents) != mentioned:
                raise AlgorithmInapplicable(
                    "a shared ability type needs every coalition to bind "
                    "the same agents; %r differs" % (sorted(node.agents),))
    typed = g.with_ability({i: sigma for i in mentioned})
    return mc(typed, f, algo=algo, budget=budget, jobs=jobs, stats=stats)
