import re

import pytest
from hypothesis import given, settings, strategies as st

from regcomb import relang as rl

SIGMA = ("a", "b")


def regexes(max_leaves=6):
    leaf = st.sampled_from([rl.Sym("a"), rl.Sym("b"), rl.EPS, rl.AnySym()])
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(rl.Union, sub, sub),
            st.builds(rl.Concat, sub, sub),
            st.builds(rl.Star, sub),
        ),
        max_leaves=max_leaves,
    )


def py_pattern(r):
    # the fully parenthesized form is also a valid Python pattern over {a, b}
    return rl.regex_str(r).replace("[]", "(?!)")


def lang(d, n=5):
    return {w for w in rl.all_strings(d.alphabet, n) if d.accepts(w)}


@settings(max_examples=80, deadline=None)
@given(regexes())
def test_regex_to_dfa_matches_python_re(r):
    d = rl.regex_to_dfa(r, SIGMA)
    pat = re.compile(py_pattern(r))
    for w in rl.all_strings(SIGMA, 5):
        assert d.accepts(w) == bool(pat.fullmatch(w)), w


@settings(max_examples=60, deadline=None)
@given(regexes())
def test_print_parse_round_trip(r):
    assert rl.parse_regex(rl.regex_str(r)) == r
    assert rl.parse_regex(rl.regex_compact(r)) == r


@settings(max_examples=60, deadline=None)
@given(regexes())
def test_minimize_and_reverse(r):
    d = rl.regex_to_dfa(r, SIGMA)
    m = rl.minimize(d)
    assert len(m.delta) <= len(d.delta)
    assert lang(m) == lang(d)
    assert lang(rl.reverse_dfa(d)) == {w[::-1] for w in lang(d)}


@settings(max_examples=60, deadline=None)
@given(regexes(4), regexes(4))
def test_boolean_algebra(r1, r2):
    a, b = rl.regex_to_dfa(r1, SIGMA), rl.regex_to_dfa(r2, SIGMA)
    la, lb = lang(a), lang(b)
    assert lang(rl.dfa_algebra("union", a, b)) == la | lb
    assert lang(rl.dfa_algebra("intersect", a, b)) == la & lb
    assert lang(rl.dfa_algebra("difference", a, b)) == la - lb
    assert lang(rl.dfa_algebra("complement", a)) == set(rl.all_strings(SIGMA, 5)) - la


def _split_count(w, a, b):
    return sum(1 for i in range(len(w) + 1) if a.accepts(w[:i]) and b.accepts(w[i:]))


def _factorizations(w, d):
    if not w:
        return 1
    return sum(_factorizations(w[i:], d) for i in range(1, len(w) + 1) if d.accepts(w[:i]))


@settings(max_examples=60, deadline=None)
@given(regexes(4), regexes(4))
def test_unambiguous_concat_counts_splits(r1, r2):
    a, b = rl.regex_to_dfa(r1, SIGMA), rl.regex_to_dfa(r2, SIGMA)
    u = rl.unambiguous_concat_dfa(a, b)
    c = rl.concat_dfa(a, b)
    for w in rl.all_strings(SIGMA, 5):
        n = _split_count(w, a, b)
        assert u.accepts(w) == (n == 1)
        assert c.accepts(w) == (n >= 1)


@settings(max_examples=60, deadline=None)
@given(regexes(4))
def test_star_languages(r):
    d = rl.regex_to_dfa(r, SIGMA)
    u = rl.unambiguous_star_dfa(d)
    s = rl.star_dfa(d)
    for w in rl.all_strings(SIGMA, 5):
        n = _factorizations(w, d)
        assert u.accepts(w) == (n == 1)
        assert s.accepts(w) == (n >= 1)


@settings(max_examples=40, deadline=None)
@given(regexes(5))
def test_state_elimination_preserves_language(r):
    d = rl.minimize(rl.regex_to_dfa(r, SIGMA))
    back = rl.regex_to_dfa(rl.state_elimination(rl.trim_dfa_to_nfa(d)), SIGMA)
    assert rl.dfa_equivalent(d, back)


def test_parse_count_caps_at_two():
    r = rl.parse_regex("(a|aa)*")
    assert [rl.parse_count(r, "a" * n) for n in range(4)] == [1, 1, 2, 2]
    assert rl.parse_count(rl.parse_regex("a*b"), "ba") == 0


def test_nfa_ambiguity():
    amb = rl.regex_to_nfa(rl.parse_regex("a*a*"), SIGMA)
    ok = rl.regex_to_nfa(rl.parse_regex("a*b"), SIGMA)
    assert not rl.nfa_is_unambiguous(amb)
    assert rl.nfa_is_unambiguous(ok)


def test_regex_syntax_errors():
    for bad in ["(a", "a)", "*a", "a|*"]:
        with pytest.raises(rl.RegexSyntaxError):
            rl.parse_regex(bad)


def test_special_languages():
    assert lang(rl.dfa_empty(SIGMA)) == set()
    assert lang(rl.dfa_epsilon(SIGMA)) == {""}
    assert lang(rl.dfa_word("ab", SIGMA)) == {"ab"}
    assert "" not in lang(rl.dfa_nonempty(SIGMA))
    assert len(lang(rl.dfa_all(SIGMA), 3)) == 15
    assert rl.parse_regex("[]") == rl.EMPTY
    assert lang(rl.regex_to_dfa(rl.parse_regex("a?b"), SIGMA)) == {"b", "ab"}
