import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from oracles import MACHINE_REFERENCE, random_copyless, words
from regcomb import corpus
from regcomb import relang as rl
from regcomb.ccra import (Acra, Cascade, Ccra, CopylessError, LookaheadAutomaton, MachineError, Reg,
                          Stage, eval_acra, eval_cascade, eval_ccra, eval_update,
                          from_patches, identity_machine, is_normalized, load_machine, machine_to_dict,
                          machine_to_dot, machine_to_json, normalize, patches, regs_of,
                          reversal_machine, update_expr, validate_copyless)
from regcomb.monoid import BOT

FIXTURES = Path(__file__).parent / "fixtures"


def evaluate(m, w):
    return eval_acra(m, w) if isinstance(m, Acra) else eval_ccra(m, w)


@pytest.mark.parametrize("name", corpus.MACHINES)
def test_corpus_machines_against_hand_reference(name):
    m = corpus.machine(name)
    ref = MACHINE_REFERENCE[name]
    for w in words(m.alphabet, 7):
        assert evaluate(m, w) == ref(w), w


def test_frozen_machine_values():
    assert eval_ccra(corpus.machine("shuffle_sst"), "abab") == "ab"
    assert eval_ccra(corpus.machine("shuffle_sst"), "aab") is BOT
    assert eval_acra(corpus.machine("coffee_acra"), "CCSC#C") == 5
    assert eval_acra(corpus.machine("flow_acra"), "abeb") == 3
    assert eval_ccra(corpus.machine("two_state"), "aba") == "aabb"
    assert eval_ccra(corpus.machine("crossing"), "ab") == "ab#b"


def test_update_helpers():
    u = update_expr(["a", Reg("x"), "", "b", "c", Reg("y")])
    assert u == ("a", Reg("x"), "bc", Reg("y"))
    assert regs_of(u) == ("x", "y")
    assert patches(u, "") == ("a", "bc", "")
    assert from_patches(("x", "y"), ("a", "bc", "")) == u
    assert eval_update(u, {"x": "1", "y": "2"}, "") == "a1bc2"
    assert update_expr([0, Reg("x"), 2, 3]) == (Reg("x"), 5)


@pytest.mark.parametrize("name", ["shuffle_sst", "echo", "two_state", "crossing"])
def test_corpus_string_machines_are_copyless(name):
    assert validate_copyless(corpus.machine(name)) == []


@pytest.mark.parametrize("fixture,kind", [("bad_repeated_in_rhs", "repeated_in_rhs"),
                                          ("bad_shared_source", "shared_source")])
def test_copyless_violation_fixtures(fixture, kind):
    text = (FIXTURES / f"{fixture}.json").read_text()
    with pytest.raises(CopylessError) as info:
        load_machine(text)
    assert [v.kind for v in info.value.violations] == [kind]
    m = load_machine(text, check=False)
    assert [v.kind for v in validate_copyless(m)] == [kind]


def test_repeated_output_register():
    m = Ccra(["q"], "a", ["x"], "q", ["q"], {("q", "a"): "q"},
             {("q", "a"): {"x": update_expr([Reg("x"), "a"])}}, {"q": (Reg("x"), Reg("x"))})
    assert [v.kind for v in validate_copyless(m)] == ["repeated_in_output"]


def test_load_machine_errors():
    d = json.loads(corpus.corpus_path("echo.json").read_text())
    bad = dict(d, delta=d["delta"][:1])
    with pytest.raises(MachineError):
        load_machine(bad)
    with pytest.raises(MachineError):
        load_machine({k: v for k, v in d.items() if k != "nu"})
    bad = dict(d, delta=d["delta"] + [{"from": "q", "symbol": "a", "to": "q"}])
    with pytest.raises(MachineError):
        load_machine(bad)


def test_partial_machine_is_undefined_off_delta():
    m = Ccra(["q"], "ab", ["x"], "q", ["q"], {("q", "a"): "q"},
             {("q", "a"): {"x": update_expr([Reg("x"), "a"])}}, {"q": (Reg("x"),)})
    assert eval_ccra(m, "aa") == "aa"
    assert eval_ccra(m, "ab") is BOT
    with pytest.raises(MachineError):
        eval_ccra(m, "c")


@pytest.mark.parametrize("name", corpus.MACHINES)
def test_json_round_trip(name):
    m = corpus.machine(name)
    back = load_machine(machine_to_json(m))
    assert type(back) is type(m)
    assert machine_to_dict(back) == machine_to_dict(m)
    for w in words(m.alphabet, 5):
        assert evaluate(back, w) == evaluate(m, w)


def test_dot_output():
    dot = machine_to_dot(corpus.machine("shuffle_sst"))
    assert dot.startswith("digraph machine {") and dot.rstrip().endswith("}")
    assert dot.count("->") == 7  # six transitions plus the start arrow


def test_lookahead_labels():
    la = LookaheadAutomaton(rl.regex_to_dfa(rl.parse_regex("b*"), "ab"))
    d = la.dfa
    labels = la.labels("aab")
    assert [a for a, _ in labels] == ["a", "a", "b"]
    # the state attached to position i summarizes w[i+1:] read right to left
    assert [s for _, s in labels] == [d.run("ba"), d.run("b"), d.run("")]


def test_cascade_of_reversal_and_identity():
    sigma = ("a", "b")
    c = Cascade([Stage(reversal_machine(sigma)), Stage(identity_machine(sigma))])
    for w in words(sigma, 5):
        assert eval_cascade(c, w) == w[::-1]


@pytest.mark.parametrize("name", ["shuffle_sst", "crossing", "two_state", "echo"])
def test_normalize_corpus(name):
    m = corpus.machine(name)
    n = normalize(m)
    assert is_normalized(n)
    assert validate_copyless(n) == []
    for w in words(m.alphabet, 6):
        assert eval_ccra(n, w) == eval_ccra(m, w)


def test_crossing_is_not_normalized():
    assert not is_normalized(corpus.machine("crossing"))
    assert is_normalized(corpus.machine("echo"))


def test_normalize_rejects_copyful():
    m = load_machine((FIXTURES / "bad_shared_source.json").read_text(), check=False)
    with pytest.raises(CopylessError):
        normalize(m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_normalize_random(seed, nq, nr):
    m = random_copyless(random.Random(seed), nq, nr)
    assert validate_copyless(m) == []
    n = normalize(m)
    assert is_normalized(n) and validate_copyless(n) == []
    for w in words("ab", 5):
        assert eval_ccra(n, w) == eval_ccra(m, w)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_json_round_trip_random(seed):
    m = random_copyless(random.Random(seed), 2, 2)
    back = load_machine(machine_to_json(m))
    for w in words("ab", 4):
        assert eval_ccra(back, w) == eval_ccra(m, w)
