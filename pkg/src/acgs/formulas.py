"""Formula ASTs, concrete syntax, and classification predicates.

Two syntactic levels, mirrored by two groups of node types. State formulas:
atoms, negation, conjunction, individual and group knowledge, and the
coalition modality over a path body. Path formulas: an embedded state
formula, negation, conjunction, Next, Until, and Release (primitive, since
it is not expressible from Until under imperfect information).

Everything else is sugar and desugared by the parser:

    a | b      !( !a & !b )
    a -> b     !( a & !b )
    F a        true U a
    G a        !(true U !a)
    [[A]] a    !<<A>> !a

`true` and `false` are built-in atoms. The printer reconstructs F and G but
otherwise prints the core connectives, so printing can render a formula
differently from how it was written; parse(print(f)) always returns f for
any parser-produced AST.

Concrete syntax, loosest to tightest: `->`, `|`, `&`, infix `U`/`R` (both
right-associative), prefix operators (`!`, `X`, `F`, `G`, `K a`, `E {a,b}`,
`D {a,b}`, `C {a,b}`, `<<a,b>>`, `[[a,b]]`), atoms and parentheses. Operator
letters are reserved words, so an atom or agent cannot be named `X` or `R`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple, Union

from .errors import ParseError


# -- state level -------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "StateFormula"


@dataclass(frozen=True)
class And:
    left: "StateFormula"
    right: "StateFormula"


@dataclass(frozen=True)
class Knows:
    agent: str
    arg: "StateFormula"


@dataclass(frozen=True)
class GroupKnows:
    kind: str  # "E" somebody, "D" pooled, "C" common
    agents: Tuple[str, ...]
    arg: "StateFormula"


@dataclass(frozen=True)
class Coalition:
    agents: Tuple[str, ...]
    body: "PathFormula"


# -- path level --------------------------------------------------------------

@dataclass(frozen=True)
class PathState:
    arg: "StateFormula"


@dataclass(frozen=True)
class PNot:
    arg: "PathFormula"


@dataclass(frozen=True)
class PAnd:
    left: "PathFormula"
    right: "PathFormula"


@dataclass(frozen=True)
class Next:
    arg: "PathFormula"


@dataclass(frozen=True)
class Until:
    left: "PathFormula"
    right: "PathFormula"


@dataclass(frozen=True)
class Release:
    left: "PathFormula"
    right: "PathFormula"


StateFormula = Union[Atom, Not, And, Knows, GroupKnows, Coalition]
PathFormula = Union[PathState, PNot, PAnd, Next, Until, Release]

TRUE = Atom("true")
FALSE = Atom("false")

_RESERVED = frozenset(("X", "F", "G", "U", "R", "K", "E", "D", "C",
                       "true", "false"))


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"<<|>>|\[\[|\]\]|->|[A-Za-z_][A-Za-z0-9_]*|[(){},!&|]")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mat = _TOKEN.match(text, pos)
        if not mat:
            raise ParseError("column %d: unexpected character %r" % (pos + 1, text[pos]))
        out.append((mat.group(), pos))
        pos = mat.end()
    return out


class _Parser:
    """Recursive descent over path formulas; state formulas are recovered
    afterwards by `_tighten`."""

    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.pos >= len(self.toks):
            raise ParseError("formula ended early (expected %s)"
                             % (repr(expected) if expected else "more input"))
        tok, at = self.toks[self.pos]
        if expected is not None and tok != expected:
            raise ParseError("column %d: expected %r, found %r" % (at + 1, expected, tok))
        self.pos += 1
        return tok

    def name(self, what: str) -> str:
        if self.pos >= len(self.toks):
            raise ParseError("formula ended early (expected %s)" % what)
        tok, at = self.toks[self.pos]
        if not tok[0].isalpha() and tok[0] != "_":
            raise ParseError("column %d: expected %s, found %r" % (at + 1, what, tok))
        if tok in _RESERVED:
            raise ParseError("column %d: %r is a reserved word" % (at + 1, tok))
        self.pos += 1
        return tok

    def name_list(self, closer: str) -> Tuple[str, ...]:
        out: List[str] = []
        if self.peek() != closer:
            out.append(self.name("agent name"))
            while self.peek() == ",":
                self.take(",")
                out.append(self.name("agent name"))
        self.take(closer)
        return tuple(dict.fromkeys(out))

    # precedence climbing, loosest first

    def implies(self) -> PathFormula:
        lhs = self.disjunct()
        if self.peek() == "->":
            self.take("->")
            rhs = self.implies()
            return PNot(PAnd(lhs, PNot(rhs)))
        return lhs

    def disjunct(self) -> PathFormula:
        lhs = self.conjunct()
        while self.peek() == "|":
            self.take("|")
            rhs = self.conjunct()
            lhs = PNot(PAnd(PNot(lhs), PNot(rhs)))
        return lhs

    def conjunct(self) -> PathFormula:
        lhs = self.temporal()
        while self.peek() == "&":
            self.take("&")
            lhs = PAnd(lhs, self.temporal())
        return lhs

    def temporal(self) -> PathFormula:
        lhs = self.prefix()
        if self.peek() in ("U", "R"):
            op = self.take()
            rhs = self.temporal()
            return Until(lhs, rhs) if op == "U" else Release(lhs, rhs)
        return lhs

    def prefix(self) -> PathFormula:
        tok = self.peek()
        if tok is None:
            raise ParseError("formula ended early")
        if tok == "!":
            self.take()
            return PNot(self.prefix())
        if tok == "X":
            self.take()
            return Next(self.prefix())
        if tok == "F":
            self.take()
            return Until(PathState(TRUE), self.prefix())
        if tok == "G":
            self.take()
            return PNot(Until(PathState(TRUE), PNot(self.prefix())))
        if tok == "K":
            self.take()
            agent = self.name("agent name")
            return PathState(Knows(agent, self.state_arg("K")))
        if tok in ("E", "D", "C"):
            self.take()
            self.take("{")
            agents = self.name_list("}")
            if not agents:
                raise ParseError("%s needs at least one agent" % tok)
            return PathState(GroupKnows(tok, agents, self.state_arg(tok)))
        if tok == "<<":
            self.take()
            agents = self.name_list(">>")
            return PathState(Coalition(agents, self.prefix()))
        if tok == "[[":
            self.take()
            agents = self.name_list("]]")
            return PathState(Not(Coalition(agents, PNot(self.prefix()))))
        if tok == "(":
            self.take()
            inner = self.implies()
            self.take(")")
            return inner
        if tok == "true":
            self.take()
            return PathState(TRUE)
        if tok == "false":
            self.take()
            return PathState(FALSE)
        return PathState(Atom(self.name("proposition")))

    def state_arg(self, op: str) -> StateFormula:
        arg = _tighten(self.prefix())
        if not isinstance(arg, PathState):
            raise ParseError("argument of %s must be a state formula" % op)
        return arg.arg


def _tighten_state(f: StateFormula) -> StateFormula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(_tighten_state(f.arg))
    if isinstance(f, And):
        return And(_tighten_state(f.left), _tighten_state(f.right))
    if isinstance(f, Knows):
        return Knows(f.agent, _tighten_state(f.arg))
    if isinstance(f, GroupKnows):
        return GroupKnows(f.kind, f.agents, _tighten_state(f.arg))
    return Coalition(f.agents, _tighten(f.body))


def _tighten(p: PathFormula) -> PathFormula:
    """Fold maximal temporal-free subtrees into single embedded state nodes
    and cancel double path negations, recursing into coalition bodies."""
    if isinstance(p, PathState):
        return PathState(_tighten_state(p.arg))
    if isinstance(p, PNot):
        t = _tighten(p.arg)
        if isinstance(t, PathState):
            return PathState(Not(t.arg))
        if isinstance(t, PNot):
            return t.arg
        return PNot(t)
    if isinstance(p, PAnd):
        lt, rt = _tighten(p.left), _tighten(p.right)
        if isinstance(lt, PathState) and isinstance(rt, PathState):
            return PathState(And(lt.arg, rt.arg))
        return PAnd(lt, rt)
    if isinstance(p, Next):
        return Next(_tighten(p.arg))
    if isinstance(p, Until):
        return Until(_tighten(p.left), _tighten(p.right))
    return Release(_tighten(p.left), _tighten(p.right))


def parse_formula(text: str) -> StateFormula:
    """Parse concrete syntax into a desugared state-formula AST."""
    parser = _Parser(text)
    path = parser.implies()
    if parser.pos != len(parser.toks):
        tok, at = parser.toks[parser.pos]
        raise ParseError("column %d: trailing input %r" % (at + 1, tok))
    tight = _tighten(path)
    if not isinstance(tight, PathState):
        raise ParseError("temporal operator outside any coalition modality")
    return tight.arg


def parse_path_formula(text: str) -> PathFormula:
    """Parse a bare path formula (used for direct pipeline tests)."""
    parser = _Parser(text)
    path = parser.implies()
    if parser.pos != len(parser.toks):
        tok, at = parser.toks[parser.pos]
        raise ParseError("column %d: trailing input %r" % (at + 1, tok))
    return _tighten(path)


# -- printing ----------------------------------------------------------------

def format_state(f: StateFormula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + format_state(f.arg)
    if isinstance(f, And):
        return "(%s & %s)" % (format_state(f.left), format_state(f.right))
    if isinstance(f, Knows):
        return "K %s %s" % (f.agent, format_state(f.arg))
    if isinstance(f, GroupKnows):
        return "%s {%s} %s" % (f.kind, ",".join(f.agents), format_state(f.arg))
    if isinstance(f, Coalition):
        return "<<%s>> %s" % (",".join(f.agents), format_path(f.body))
    raise TypeError("not a state formula: %r" % (f,))


def _negated(p: PathFormula) -> PathFormula:
    if isinstance(p, PathState):
        if isinstance(p.arg, Not):
            return PathState(p.arg.arg)
        return PathState(Not(p.arg))
    if isinstance(p, PNot):
        return p.arg
    return PNot(p)


def format_path(p: PathFormula) -> str:
    if isinstance(p, PathState):
        return format_state(p.arg)
    if isinstance(p, PNot):
        inner = p.arg
        if isinstance(inner, Until) and inner.left == PathState(TRUE):
            return "G " + format_path(_negated(inner.right))
        return "!" + format_path(inner)
    if isinstance(p, PAnd):
        return "(%s & %s)" % (format_path(p.left), format_path(p.right))
    if isinstance(p, Next):
        return "X " + format_path(p.arg)
    if isinstance(p, Until):
        if p.left == PathState(TRUE):
            return "F " + format_path(p.right)
        return "(%s U %s)" % (format_path(p.left), format_path(p.right))
    if isinstance(p, Release):
        return "(%s R %s)" % (format_path(p.left), format_path(p.right))
    raise TypeError("not a path formula: %r" % (p,))


format_formula = format_state


# -- structure queries ---------------------------------------------------------

def walk_state(f: StateFormula) -> Iterator[StateFormula]:
    """All state subformulas, depth first, crossing into coalition bodies."""
    yield f
    if isinstance(f, (Not, Knows, GroupKnows)):
        yield from walk_state(f.arg)
    elif isinstance(f, And):
        yield from walk_state(f.left)
        yield from walk_state(f.right)
    elif isinstance(f, Coalition):
        for sub in _path_states(f.body):
            yield from walk_state(sub)


def _path_states(p: PathFormula) -> Iterator[StateFormula]:
    if isinstance(p, PathState):
        yield p.arg
    elif isinstance(p, (PNot, Next)):
        yield from _path_states(p.arg)
    else:
        yield from _path_states(p.left)
        yield from _path_states(p.right)


def normalize_single_temporal(p: PathFormula) -> Optional[tuple]:
    """Match a body that is one temporal operator over state operands.

    Negations are pushed through by duality (!X a = X !a, !(a U b) =
    !a R !b, and symmetrically), so the result is ("X", f), ("U", f1, f2) or
    ("R", f1, f2) with plain state formulas inside, or None when the body has
    deeper temporal structure.
    """

    def negate(f: StateFormula) -> StateFormula:
        if f == TRUE:
            return FALSE
        if f == FALSE:
            return TRUE
        if isinstance(f, Not):
            return f.arg
        return Not(f)

    def as_state(q: PathFormula, neg: bool) -> Optional[StateFormula]:
        if isinstance(q, PathState):
            return negate(q.arg) if neg else q.arg
        if isinstance(q, PNot):
            return as_state(q.arg, not neg)
        return None

    def go(q: PathFormula, neg: bool) -> Optional[tuple]:
        if isinstance(q, PNot):
            return go(q.arg, not neg)
        if isinstance(q, Next):
            arg = as_state(q.arg, neg)
            return None if arg is None else ("X", arg)
        if isinstance(q, (Until, Release)):
            lhs = as_state(q.left, neg)
            rhs = as_state(q.right, neg)
            if lhs is None or rhs is None:
                return None
            op = "U" if isinstance(q, Until) == (not neg) else "R"
            return (op, lhs, rhs)
        return None

    return go(p, False)


def is_propositional(f: StateFormula) -> bool:
    """No modal operator: just atoms under negation and conjunction."""
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return is_propositional(f.arg)
    if isinstance(f, And):
        return is_propositional(f.left) and is_propositional(f.right)
    return False


def holds_in(f: StateFormula, props: FrozenSet[str]) -> bool:
    """Truth of a propositional state formula under a set of labels."""
    if isinstance(f, Atom):
        if f.name == "true":
            return True
        if f.name == "false":
            return False
        return f.name in props
    if isinstance(f, Not):
        return not holds_in(f.arg, props)
    if isinstance(f, And):
        return holds_in(f.left, props) and holds_in(f.right, props)
    raise ValueError("cannot evaluate %r against a label set" % (f,))


def _is_ltl(p: PathFormula) -> bool:
    return all(is_propositional(sub) for sub in _path_states(p))


@dataclass(frozen=True)
class Classification:
    is_atl: bool
    is_simple_coalitions: bool
    is_positive: bool
    agents_of: frozenset


def classify(f: StateFormula) -> Classification:
    """Syntactic shape of a formula.

    is_atl: every coalition body reduces to a single temporal operator over
    state operands. is_simple_coalitions: every coalition body is pure LTL
    (atoms only inside). is_positive: simple, and under polarity tracking no
    coalition or knowledge operator occurs negated; this accepts exactly the
    formulas whose negations can be read as sitting on atoms once derived
    operators are reintroduced. agents_of: all agent names mentioned.
    """
    coalitions = [g for g in walk_state(f) if isinstance(g, Coalition)]
    is_atl = all(normalize_single_temporal(g.body) is not None for g in coalitions)
    is_simple = all(_is_ltl(g.body) for g in coalitions)

    agents: Set[str] = set()
    for g in walk_state(f):
        if isinstance(g, Coalition):
            agents.update(g.agents)
        elif isinstance(g, Knows):
            agents.add(g.agent)
        elif isinstance(g, GroupKnows):
            agents.update(g.agents)

    def pos_state(g: StateFormula, neg: bool) -> bool:
        if isinstance(g, Atom):
            return True
        if isinstance(g, Not):
            return pos_state(g.arg, not neg)
        if isinstance(g, And):
            return pos_state(g.left, neg) and pos_state(g.right, neg)
        if isinstance(g, (Knows, GroupKnows)):
            return not neg and pos_state(g.arg, False)
        return not neg and pos_path(g.body, False)

    def pos_path(q: PathFormula, neg: bool) -> bool:
        if isinstance(q, PathState):
            return pos_state(q.arg, neg)
        if isinstance(q, PNot):
            return pos_path(q.arg, not neg)
        if isinstance(q, Next):
            return pos_path(q.arg, neg)
        return pos_path(q.left, neg) and pos_path(q.right, neg)

    return Classification(
        is_atl=is_atl,
        is_simple_coalitions=is_simple,
        is_positive=is_simple and pos_state(f, False),
        agents_of=frozenset(agents),
    )


def atoms_of_path(p: PathFormula) -> Set[str]:
    out: Set[str] = set()

    def state(g):
        if isinstance(g, Atom):
            if g.name not in ("true", "false"):
                out.add(g.name)
        elif isinstance(g, Not):
            state(g.arg)
        elif isinstance(g, And):
            state(g.left)
            state(g.right)
        else:
            raise ValueError("path formula is not pure LTL: %r" % (g,))

    def path(q):
        if isinstance(q, PathState):
            state(q.arg)
        elif isinstance(q, (PNot, Next)):
            path(q.arg)
        else:
            path(q.left)
            path(q.right)

    path(p)
    return out


def collect_state_subformulae(p: PathFormula) -> List[StateFormula]:
    """Maximal modal embedded state formulas, first occurrence order.

    Propositional embeddings stay put: they need no model checking of their
    own, the path layer can evaluate them per state.
    """
    out: List[StateFormula] = []
    seen = set()
    for sub in _path_states(p):
        if not is_propositional(sub) and sub not in seen:
            seen.add(sub)
            out.append(sub)
    return out


def substitute_state_subformulae(
        p: PathFormula,
        valuation: Dict[StateFormula, frozenset],
) -> Tuple[PathFormula, Dict[str, frozenset]]:
    """Replace embedded non-atomic state formulas by fresh propositions.

    The valuation must give a state set for every such subformula. Returns
    the pure-LTL path formula and the labeling extension for the fresh
    propositions, named __sub0, __sub1, ... in first occurrence order.
    """
    names: Dict[StateFormula, str] = {}
    fresh: Dict[str, frozenset] = {}
    for sub in collect_state_subformulae(p):
        if sub not in valuation:
            raise ValueError("no valuation for embedded state formula %r"
                             % format_state(sub))
        prop = "__sub%d" % len(names)
        names[sub] = prop
        fresh[prop] = frozenset(valuation[sub])

    def rewrite(q: PathFormula) -> PathFormula:
        if isinstance(q, PathState):
            if is_propositional(q.arg):
                return q
            return PathState(Atom(names[q.arg]))
        if isinstance(q, PNot):
            return PNot(rewrite(q.arg))
        if isinstance(q, PAnd):
            return PAnd(rewrite(q.left), rewrite(q.right))
        if isinstance(q, Next):
            return Next(rewrite(q.arg))
        if isinstance(q, Until):
            return Until(rewrite(q.left), rewrite(q.right))
        return Release(rewrite(q.left), rewrite(q.right))

    return rewrite(p), fresh
