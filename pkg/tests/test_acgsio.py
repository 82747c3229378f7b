import pytest

from acgs.acgsio import parse_model, parse_spec, write_model, write_spec
from acgs.benchmarks import gen_bookstore, gen_castle, gen_dining, gen_figure1
from acgs.errors import ParseError

SAMPLE = """
# two workers and a timekeeper
agents: w1 w2 e;
ability: w1=IR w2=ir;
states: s0 s1;
init: s0;
label busy: s1;
actions w1: a b;
actions w2: x;
actions e: tick;
obs w2: {s0 s1};
protocol w1: s1 {a};
trans: s0 (a,x,tick) -> s1, s0 (b,x,tick) -> s0;
trans: s1 (a,x,tick) -> s0;
"""


def test_parse_sample():
    m = parse_model(SAMPLE)
    assert m.states == ["s0", "s1"]
    assert m.agents == ["w1", "w2", "e"]
    assert m.initial == {"s0"}
    assert m.ability == {"w1": "IR", "w2": "ir", "e": "IR"}
    assert m.labels == {"busy": {"s1"}}
    # protocol defaults to the whole alphabet where unlisted
    assert m.protocol_of("w1", "s0") == ("a", "b")
    assert m.protocol_of("w1", "s1") == ("a",)
    assert m.epistemic_class("w2", "s0") == {"s0", "s1"}
    assert m.epistemic_class("e", "s0") == {"s0"}
    assert m.transitions[("s0", ("b", "x", "tick"))] == "s0"


def same_model(a, b):
    assert a.states == b.states
    assert a.agents == b.agents
    assert a.initial == b.initial
    assert a.actions == b.actions
    assert a.ability == b.ability
    assert a.labels == b.labels
    assert a.protocol == b.protocol
    assert a.transitions == b.transitions
    for i in a.agents:
        assert a.class_blocks(i) == b.class_blocks(i)


@pytest.mark.parametrize("make", [
    lambda: gen_figure1()[0],
    lambda: gen_figure1(("Ir", "iR"))[0],
    lambda: gen_dining(3)[0],
    lambda: gen_bookstore()[0],
    lambda: gen_castle(2, 1)[0],
])
def test_round_trip(make):
    m = make()
    text = write_model(m)
    same_model(m, parse_model(text))
    assert write_model(parse_model(text)) == text


def test_write_renames_non_identifier_states():
    m = parse_model(SAMPLE)
    renamed = m._replace(
        states=["n 0", "n 1"],
        index={"n 0": 0, "n 1": 1},
        initial={"n 0"},
        protocol={i: {("n %d" % k): t["s%d" % k] for k in (0, 1)}
                  for i, t in m.protocol.items()},
        transitions={("n %s" % s[1:], j): "n %s" % t[1:]
                     for (s, j), t in m.transitions.items()},
        labels={"busy": {"n 1"}},
        obs={"w2": {"n 0": "b", "n 1": "b"}},
    )
    text = write_model(renamed)
    assert "n 0" not in text
    m2 = parse_model(text)
    assert m2.states == ["s0", "s1"]
    same_model(m2, parse_model(SAMPLE))


@pytest.mark.parametrize("snippet,complaint", [
    ("agents: a¢;", "unexpected character"),
    ("agents: a;", "missing 'states'"),
    ("states: s;", "missing 'agents'"),
    ("agents: a; states: s; actions a: x;\ntrans: s (x) -> t;", "unknown state"),
    ("agents: a; states: s s;", "duplicate names"),
    ("agents: a; states: s; agents: a;", "duplicate 'agents'"),
    ("agents: a; states: s; actions a: x; actions a: y;", "duplicate actions"),
    ("agents: a; states: s;", "no 'actions'"),
    ("agents: a; states: s; actions a: x; ability: a=zz;", "unknown ability"),
    ("agents: a; states: s; actions a: x; ability: b=IR;", "unknown agent"),
    ("agents: a; states: s; actions a: x; protocol a: s {y};", "unknown action"),
    ("agents: a; states: s; actions a: x; obs b: {s};", "unknown agent"),
    ("agents: a; states: s; actions a: x; obs a: {s s};", "twice"),
    ("agents: a; states: s; actions a: x;\n"
     "trans: s (x) -> s, s (x) -> s;", "duplicate transition"),
    ("agents: a b; states: s; actions a: x; actions b: y;\n"
     "trans: s (x) -> s;", "1 actions for 2 agents"),
    ("agents: a; states: s; actions a: x; trans: s (x) - s;", "unexpected character"),
    ("agents: a; states: s; actions a: x\n", "not terminated"),
    ("whatever: a;", "unknown statement"),
])
def test_parse_errors(snippet, complaint):
    with pytest.raises(ParseError, match=complaint):
        parse_model(snippet)


def test_write_refuses_non_identifier_actions():
    m = parse_model(SAMPLE)
    bad = m._replace(actions={"w1": ["a", "b!"], "w2": ["x"], "e": ["tick"]})
    with pytest.raises(ValueError, match="rename"):
        write_model(bad)


def test_spec_round_trip():
    text = "# header\n\n<<a1>> G q\n  [[a1]] X p  # tail\n"
    formulas = parse_spec(text)
    assert formulas == ["<<a1>> G q", "[[a1]] X p"]
    assert parse_spec(write_spec(formulas)) == formulas
