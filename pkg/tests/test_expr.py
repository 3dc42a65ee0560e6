import pytest
from hypothesis import given, settings, strategies as st

from oracles import REFERENCE, brute, words
from regcomb import corpus
from regcomb import expr as ex
from regcomb.cli import SurfaceSyntaxError, parse_surface
from regcomb.monoid import BOT
from strategies import SIGMA, exprs


def ev_all(e, n):
    ev = ex.Evaluator(e)
    return {w: ev(e, w) for w in words(e.alphabet, n)}


# ---------------------------------------------------------------------------
# parser


def test_parse_examples():
    e = parse_surface("sum (a/1 |> b/0)")
    assert isinstance(e, ex.IterSum) and isinstance(e.body, ex.Choice)
    assert e.body.left.value == 1 and e.body.right.value == 0
    e = parse_surface("(a*b)/x (+) b*/y", monoid="str")
    assert isinstance(e, ex.SplitSum) and e.left.value == "x" and e.right.value == "y"
    e = parse_surface('let f = a*b/"x" in chain[a*b] f')
    assert isinstance(e, ex.ChainedSum) and e.body.value == "x"


def test_precedence():
    e = parse_surface("a/1 |> a/1 + b/2 (+) b/3")
    assert isinstance(e, ex.Choice)
    assert isinstance(e.right, ex.Sum) and isinstance(e.right.right, ex.SplitSum)
    e = parse_surface("a/1 (+) b/2 (<+) a/3")
    assert isinstance(e, ex.LeftSplitSum) and isinstance(e.left, ex.SplitSum)


@pytest.mark.parametrize("text", ["sum (a/1", "a/1 +", "a/", "let x = a/1 x", "(a/1))", "chain[a a/1"])
def test_syntax_errors_have_positions(text):
    with pytest.raises(SurfaceSyntaxError) as info:
        parse_surface(text)
    assert info.value.position >= 0


def test_unknown_name_and_alphabet_errors():
    with pytest.raises(SurfaceSyntaxError):
        parse_surface("sum g")
    with pytest.raises(SurfaceSyntaxError):
        parse_surface("c/1", alphabet="ab")


def test_mixed_monoids_rejected():
    with pytest.raises((SurfaceSyntaxError, ex.ExprError)):
        parse_surface('a/1 + b/"x"')


@pytest.mark.parametrize("name", corpus.EXPRESSIONS)
def test_corpus_print_parse_round_trip(name):
    e = corpus.expression(name)
    for share in (True, False):
        back = parse_surface(ex.to_surface(e, share=share), alphabet=e.alphabet)
        assert ev_all(back, 4) == ev_all(e, 4)
    assert parse_surface(ex.to_surface(e), alphabet=e.alphabet) == e


@settings(max_examples=80, deadline=None)
@given(exprs())
def test_random_print_parse_round_trip(e):
    back = parse_surface(ex.to_surface(e), alphabet=SIGMA, monoid="str")
    assert back == e


# ---------------------------------------------------------------------------
# semantics


@pytest.mark.parametrize("name", [n for n in corpus.EXPRESSIONS if n != "shuffle_pipeline"])
def test_corpus_against_hand_reference(name):
    e = corpus.expression(name)
    ref = REFERENCE[name]
    ev = ex.Evaluator(e)
    for w in words(e.alphabet, 7):
        assert ev(e, w) == ref(w), w


def test_frozen_values():
    # brute-force derived values, frozen
    c = corpus.expression
    assert ex.eval_naive(c("count_a"), "abab") == 2
    assert ex.eval_naive(c("copy"), "ab") == "abab"
    assert ex.eval_naive(c("reverse"), "ab") == "ba"
    assert ex.eval_naive(c("swap"), "ab#b") == "b#ab"
    assert ex.eval_naive(c("strip"), "ab#a") == "ab"
    assert ex.eval_naive(c("shuffle"), "abab") == "ab"
    assert ex.eval_naive(c("shuffle"), "aabababb") == "abbabb"  # m = (2, 1, 1, 0)
    assert ex.eval_naive(c("shuffle"), "ab") is BOT
    assert ex.eval_naive(c("coffee"), "CCSC#C") == 5
    assert ex.eval_naive(c("coffee"), "C#SCC#") == 4
    assert ex.eval_naive(c("indicator"), "aab") == 1
    assert ex.eval_naive(c("indicator"), "aba") == 0
    assert ex.eval_naive(c("swap"), "ab") is BOT


@settings(max_examples=120, deadline=None)
@given(exprs())
def test_evaluator_matches_brute_force(e):
    ev = ex.Evaluator(e)
    for w in words(SIGMA, 4):
        assert ev(e, w) == brute(e, w), w


@settings(max_examples=60, deadline=None)
@given(exprs(kind="int"))
def test_evaluator_matches_brute_force_int(e):
    ev = ex.Evaluator(e)
    for w in words(SIGMA, 4):
        assert ev(e, w) == brute(e, w), w


@settings(max_examples=80, deadline=None)
@given(exprs())
def test_domain_dfa_is_exact(e):
    d = ex.domain_dfa(e)
    ev = ex.Evaluator(e)
    for w in words(SIGMA, 5):
        assert d.accepts(w) == (ev(e, w) is not BOT), w


@settings(max_examples=80, deadline=None)
@given(exprs())
def test_push_reverse(e):
    r = ex.push_reverse(e)
    assert not any(isinstance(n, ex.Reverse) for n in ex.iter_nodes(r))
    assert ev_all(r, 4) == ev_all(e, 4)


@settings(max_examples=40, deadline=None)
@given(exprs(max_leaves=3, chained=False))
def test_lift_alphabet(e):
    big = ex.lift_alphabet(e, "ab#")
    ev, evb = ex.Evaluator(e), ex.Evaluator(big)
    for w in words("ab#", 4):
        want = ev(e, w) if "#" not in w else BOT
        assert evb(big, w) == want


@given(st.sampled_from(["a/1", "a/1 |> b/2", "sum a/1", "(a|b)*/3"]))
def test_sum_is_pointwise(text):
    f = parse_surface(text, alphabet="ab")
    g = ex.Sum(f, f)
    ev = ex.Evaluator(g)
    for w in words(SIGMA, 4):
        v = ex.eval_naive(f, w)
        assert ev(g, w) == (BOT if v is BOT else 2 * v)


def test_iter_on_empty_word_is_identity():
    assert ex.eval_naive(parse_surface("sum a/1"), "") == 0
    assert ex.eval_naive(parse_surface('sum a/"x"'), "") == ""
    # the empty word is never a piece, so an ambiguous body on e is harmless
    assert ex.eval_naive(parse_surface("sum (a|())/1", alphabet="ab"), "aa") == 2


def test_chained_needs_two_pieces():
    f = parse_surface('chain[a*b] (a|b)*/"x"')
    assert ex.eval_naive(f, "ab") is BOT
    assert ex.eval_naive(f, "abb") == "x"
    assert ex.eval_naive(f, "abbab") == "xx"


def test_compose_and_domain():
    e = corpus.expression("shuffle_pipeline")
    d = ex.domain_dfa(e)
    ev = ex.Evaluator(e)
    for w in words("ab", 6):
        assert d.accepts(w) == (ev(e, w) is not BOT)


def test_compose_type_errors():
    with pytest.raises(ex.ExprError):
        ex.Compose(parse_surface("sum a/1"), parse_surface("sum a/2"))
    with pytest.raises(ex.ExprError):
        ex.Compose(parse_surface('sum a/"a"', alphabet="a"), parse_surface('sum a/"b"', alphabet="a"))


def test_alphabet_mismatch():
    with pytest.raises(ex.ExprError):
        ex.Choice(parse_surface("a/1", alphabet="a"), parse_surface("a/1", alphabet="ab"))


def test_input_outside_alphabet():
    with pytest.raises(ex.ExprError):
        ex.eval_naive(parse_surface("sum a/1"), "b")


def test_size_and_operators():
    e = corpus.expression("shuffle")
    assert ex.operators_used(e) >= {"ChainedSum", "LeftSplitSum", "SplitSum", "IterSum", "Const"} or \
        {type(n).__name__ for n in ex.iter_nodes(e)} >= {"ChainedSum", "LeftSplitSum"}
    assert ex.expr_size(e) >= 9
    assert ex.contains_cascade_nodes(e)
    assert not ex.contains_cascade_nodes(corpus.expression("copy"))
