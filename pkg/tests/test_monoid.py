import pickle

import pytest
from hypothesis import given, strategies as st

from regcomb.monoid import (BOT, INT_MONOID, MonoidError, STR_MONOID, is_bottom, monoid_of, mplus,
                            parse_value, render, string_monoid)

strs = st.text(alphabet="ab#", max_size=6)
ints = st.integers(-50, 50)
values = st.one_of(strs, ints)
vals_or_bot = st.one_of(strs.map(lambda s: s), st.just(BOT))


def test_bottom_is_a_singleton():
    assert BOT is type(BOT)()
    assert pickle.loads(pickle.dumps(BOT)) is BOT
    assert is_bottom(BOT) and not is_bottom("")


def test_identities():
    assert STR_MONOID.identity == "" and not STR_MONOID.commutative
    assert INT_MONOID.identity == 0 and INT_MONOID.commutative
    assert monoid_of("ab") is STR_MONOID and monoid_of(-3) is INT_MONOID


def test_mixed_kinds_rejected():
    with pytest.raises(MonoidError):
        mplus("a", 1)
    with pytest.raises(MonoidError):
        monoid_of(True)


def test_string_monoid_alphabet():
    m = string_monoid("ab")
    assert m.contains("abba") and not m.contains("abc") and m.contains(BOT)
    assert not m.contains(3)


@given(strs, strs, strs)
def test_string_associative(a, b, c):
    assert mplus(mplus(a, b), c) == mplus(a, mplus(b, c))


@given(ints, ints)
def test_int_commutative(a, b):
    assert mplus(a, b) == mplus(b, a)


@given(st.one_of(values, st.just(BOT)))
def test_bottom_absorbs(v):
    if isinstance(v, int) or v is BOT:
        assert mplus(v, BOT) is BOT and mplus(BOT, v) is BOT
    else:
        assert mplus(BOT, v) is BOT and mplus(v, BOT) is BOT


@given(st.one_of(values, st.just(BOT)))
def test_render_round_trip(v):
    back = parse_value(render(v))
    assert back == v and type(back) is type(v)


def test_render_examples():
    assert render("ab") == '"ab"' and render(5) == "5" and render(BOT) == "bot"
    assert parse_value("ab", kind="str") == "ab"
    with pytest.raises(MonoidError):
        parse_value("x", kind="int")


def test_sum_of_values():
    assert STR_MONOID.sum(["a", "b", "c"]) == "abc"
    assert INT_MONOID.sum([]) == 0
    assert INT_MONOID.sum([1, BOT, 2]) is BOT
