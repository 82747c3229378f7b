"""Plain-text serialization of game structures and formula lists.

Model files (`.acgs`) are built from `;`-terminated statements; `#` starts a
comment that runs to the end of the line. A complete example:

    agents: w1 w2 e;
    ability: w1=IR w2=ir e=IR;
    states: s0 s1 s2 s3;
    init: s0;
    label q: s0 s1 s2;
    actions w1: a b;
    actions w2: x;
    actions e: tick;
    obs w2: {s0 s1 s2};
    protocol w1: s0 {a b}, s1 {a};
    trans: s0 (a,x,tick) -> s1;

Conventions: an agent without an `obs` statement observes the state itself,
and states missing from its listed blocks are singleton classes; a state
missing from an agent's `protocol` statement allows all of that agent's
actions; agents missing from `ability` default to IR. Every conforming joint
action needs a `trans` entry.

Formula files (`.spec`) carry one formula per line, `#` comments allowed.
"""

from __future__ import annotations

import re
from typing import Dict, List, Tuple

from .errors import ParseError
from .model import ABILITIES, Cgs

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|->|[{}(),=:;]")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
                continue
            mat = _TOKEN.match(line, pos)
            if not mat:
                raise ParseError("line %d: unexpected character %r" % (lineno, ch))
            out.append((mat.group(), lineno))
            pos = mat.end()
    return out


class _Cursor:
    def __init__(self, tokens, lineno):
        self.toks = [t for t, _ in tokens]
        self.line = lineno
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ParseError("line %d: statement ended early" % self.line)
        if expected is not None and tok != expected:
            raise ParseError("line %d: expected %r, found %r" % (self.line, expected, tok))
        self.pos += 1
        return tok

    def ident(self, what="name"):
        tok = self.take()
        if not _IDENT.fullmatch(tok):
            raise ParseError("line %d: expected %s, found %r" % (self.line, what, tok))
        return tok

    def idents(self):
        out = []
        while self.peek() is not None and _IDENT.fullmatch(self.peek()):
            out.append(self.take())
        return out

    def done(self):
        if self.pos != len(self.toks):
            raise ParseError("line %d: trailing tokens after statement: %r"
                             % (self.line, self.toks[self.pos]))


def _statements(text: str):
    tokens = _tokenize(text)
    stmt: List[Tuple[str, int]] = []
    for tok, lineno in tokens:
        if tok == ";":
            if stmt:
                yield _Cursor(stmt, stmt[0][1])
                stmt = []
        else:
            stmt.append((tok, lineno))
    if stmt:
        raise ParseError("line %d: statement not terminated by ';'" % stmt[0][1])


def parse_model(text: str) -> Cgs:
    """Parse `.acgs` text into a game structure."""
    agents: List[str] = []
    states: List[str] = []
    init: List[str] = []
    ability: Dict[str, str] = {}
    labels: Dict[str, List[str]] = {}
    actions: Dict[str, List[str]] = {}
    obs_blocks: Dict[str, List[List[str]]] = {}
    proto_entries: Dict[str, Dict[str, List[str]]] = {}
    trans: Dict[Tuple[str, tuple], str] = {}
    seen = set()

    for cur in _statements(text):
        head = cur.take()
        if head in ("agents", "states", "init"):
            if head in seen:
                raise ParseError("line %d: duplicate '%s' statement" % (cur.line, head))
            seen.add(head)
            cur.take(":")
            names = cur.idents()
            cur.done()
            if head == "agents":
                agents = names
            elif head == "states":
                states = names
            else:
                init = names
        elif head == "ability":
            cur.take(":")
            while cur.peek() is not None:
                name = cur.ident("agent")
                cur.take("=")
                tag = cur.ident("ability tag")
                if tag not in ABILITIES:
                    raise ParseError("line %d: unknown ability %r" % (cur.line, tag))
                ability[name] = tag
            cur.done()
        elif head == "label":
            prop = cur.ident("proposition")
            if ("label", prop) in seen:
                raise ParseError("line %d: duplicate label %r" % (cur.line, prop))
            seen.add(("label", prop))
            cur.take(":")
            labels[prop] = cur.idents()
            cur.done()
        elif head == "actions":
            agent = cur.ident("agent")
            if ("actions", agent) in seen:
                raise ParseError("line %d: duplicate actions for %r" % (cur.line, agent))
            seen.add(("actions", agent))
            cur.take(":")
            actions[agent] = cur.idents()
            cur.done()
        elif head == "obs":
            agent = cur.ident("agent")
            blocks = obs_blocks.setdefault(agent, [])
            cur.take(":")
            while cur.peek() == "{":
                cur.take("{")
                blocks.append(cur.idents())
                cur.take("}")
            cur.done()
        elif head == "protocol":
            agent = cur.ident("agent")
            table = proto_entries.setdefault(agent, {})
            cur.take(":")
            while cur.peek() is not None:
                state = cur.ident("state")
                if state in table:
                    raise ParseError("line %d: duplicate protocol entry for %r"
                                     % (cur.line, state))
                cur.take("{")
                table[state] = cur.idents()
                cur.take("}")
                if cur.peek() == ",":
                    cur.take(",")
            cur.done()
        elif head == "trans":
            cur.take(":")
            while cur.peek() is not None:
                src = cur.ident("state")
                cur.take("(")
                joint = [cur.ident("action")]
                while cur.peek() == ",":
                    cur.take(",")
                    joint.append(cur.ident("action"))
                cur.take(")")
                cur.take("->")
                tgt = cur.ident("state")
                key = (src, tuple(joint))
                if key in trans:
                    raise ParseError("line %d: duplicate transition from %r under %r"
                                     % (cur.line, src, tuple(joint)))
                trans[key] = tgt
                if cur.peek() == ",":
                    cur.take(",")
            cur.done()
        else:
            raise ParseError("line %d: unknown statement %r" % (cur.line, head))

    for section, got in (("agents", agents), ("states", states)):
        if not got:
            raise ParseError("missing '%s' statement" % section)
    state_set = set(states)
    agent_set = set(agents)
    if len(state_set) != len(states):
        raise ParseError("duplicate names in 'states'")

    def check_states(names, context):
        for s in names:
            if s not in state_set:
                raise ParseError("%s refers to unknown state %r" % (context, s))

    check_states(init, "'init'")
    for name in list(ability) + list(actions) + list(obs_blocks) + list(proto_entries):
        if name not in agent_set:
            raise ParseError("statement refers to unknown agent %r" % name)
    for i in agents:
        if i not in actions:
            raise ParseError("agent %r has no 'actions' statement" % i)
    for prop, sts in labels.items():
        check_states(sts, "label %r" % prop)

    obs = {}
    for i, blocks in obs_blocks.items():
        covered = set()
        table = {}
        for k, block in enumerate(blocks):
            check_states(block, "obs for %r" % i)
            for s in block:
                if s in covered:
                    raise ParseError("obs for %r lists state %r twice" % (i, s))
                covered.add(s)
                table[s] = ("block", k)
        for s in states:
            if s not in covered:
                table[s] = ("state", s)
        obs[i] = table

    protocol = {}
    for i in agents:
        alphabet = actions[i]
        table = proto_entries.get(i, {})
        check_states(table, "protocol for %r" % i)
        for s, opts in table.items():
            for a in opts:
                if a not in alphabet:
                    raise ParseError("protocol for %r at %r uses unknown action %r"
                                     % (i, s, a))
        protocol[i] = {s: tuple(table.get(s, alphabet)) for s in states}

    for (src, joint), tgt in trans.items():
        check_states((src, tgt), "'trans'")
        if len(joint) != len(agents):
            raise ParseError("transition from %r has %d actions for %d agents"
                             % (src, len(joint), len(agents)))
        for i, a in zip(agents, joint):
            if a not in actions[i]:
                raise ParseError("transition from %r uses unknown action %r for %r"
                                 % (src, a, i))

    return Cgs(states, init, agents, actions, protocol, trans, labels,
               obs=obs, ability=ability)


def read_model(path: str) -> Cgs:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def _require_idents(names, what):
    for n in names:
        if not isinstance(n, str) or not _IDENT.fullmatch(n):
            raise ValueError("%s %r is not writable; rename to an identifier" % (what, n))


def write_model(m: Cgs) -> str:
    """Render a game structure as canonical `.acgs` text.

    State names are kept when they are identifiers and replaced by s0, s1, ...
    in declaration order otherwise. Output is deterministic, so writing the
    same model twice yields identical text.
    """
    _require_idents(m.agents, "agent")
    for i in m.agents:
        _require_idents(m.actions[i], "action")
    if all(isinstance(s, str) and _IDENT.fullmatch(s) for s in m.states):
        name = {s: s for s in m.states}
    else:
        name = {s: "s%d" % k for k, s in enumerate(m.states)}

    by_index = m.index.get
    lines = []
    lines.append("agents: %s;" % " ".join(m.agents))
    lines.append("ability: %s;" % " ".join("%s=%s" % (i, m.ability[i]) for i in m.agents))
    lines.append("states: %s;" % " ".join(name[s] for s in m.states))
    lines.append("init: %s;" % " ".join(name[s] for s in sorted(m.initial, key=by_index)))
    for p in sorted(m.labels, key=str):
        _require_idents([p], "proposition")
        sts = sorted(m.labels[p], key=by_index)
        lines.append("label %s: %s;" % (p, " ".join(name[s] for s in sts)))
    for i in m.agents:
        lines.append("actions %s: %s;" % (i, " ".join(m.actions[i])))
    for i in m.agents:
        if i not in m.obs:
            continue
        blocks = [b for b in m.class_blocks(i) if len(b) > 1]
        if not blocks:
            continue
        rendered = ("{%s}" % " ".join(name[s] for s in sorted(b, key=by_index))
                    for b in blocks)
        lines.append("obs %s: %s;" % (i, " ".join(rendered)))
    for i in m.agents:
        full = tuple(m.actions[i])
        entries = ["%s {%s}" % (name[s], " ".join(m.protocol[i][s]))
                   for s in m.states if m.protocol[i][s] != full]
        for k in range(0, len(entries), 6):
            lines.append("protocol %s: %s;" % (i, ", ".join(entries[k:k + 6])))
    for s in m.states:
        for joint in m.joint_actions(s):
            tgt = m.transitions.get((s, joint))
            if tgt is not None:
                lines.append("trans: %s (%s) -> %s;" % (name[s], ",".join(joint), name[tgt]))
    return "\n".join(lines) + "\n"


def parse_spec(text: str) -> List[str]:
    """Formula list: one formula per line, '#' comments, blanks ignored."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def write_spec(formulas) -> str:
    return "".join(f + "\n" for f in formulas)
