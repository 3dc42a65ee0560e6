"""Combinator expressions for cost functions and their reference semantics.

The evaluator follows the definitions literally: every split or decomposition
of the input is enumerated and the result is undefined (``BOT``) unless the
relevant decomposition exists and is unique.  Results are memoized per
(node, input) so large shared expression DAGs stay tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple, Union as TUnion

from . import relang as rl
from .monoid import BOT, MonoidError, mplus


class ExprError(Exception):
    pass


LangLike = TUnion[rl.Regex, rl.Dfa]


class FuncExpr:
    """Base class of expression nodes."""

    @property
    def alphabet(self) -> Tuple[str, ...]:
        raise NotImplementedError

    def children(self) -> Tuple["FuncExpr", ...]:
        return ()

    @cached_property
    def domain(self) -> rl.Dfa:
        return domain_dfa(self)

    def __str__(self):
        return to_surface(self)


def _alpha(symbols: Iterable) -> Tuple:
    return tuple(sorted(set(symbols)))


@dataclass(frozen=True, eq=True)
class Const(FuncExpr):
    """``lang / value``: the value on words of ``lang``, undefined elsewhere."""

    lang: LangLike
    value: object
    sigma: Tuple[str, ...]

    def __post_init__(self):
        if self.value is BOT:
            raise ExprError("a constant cannot be bottom")
        if isinstance(self.value, bool) or not isinstance(self.value, (str, int)):
            raise ExprError(f"unsupported constant {self.value!r}")
        object.__setattr__(self, "sigma", _alpha(self.sigma))
        if isinstance(self.lang, rl.Dfa) and set(self.lang.alphabet) != set(self.sigma):
            raise ExprError("constant language alphabet differs from the input alphabet")

    @property
    def alphabet(self):
        return self.sigma

    @cached_property
    def dfa(self) -> rl.Dfa:
        if isinstance(self.lang, rl.Dfa):
            return self.lang
        return rl.regex_to_dfa(self.lang, self.sigma)


class _Binary(FuncExpr):
    left: FuncExpr
    right: FuncExpr

    def __post_init__(self):
        if self.left.alphabet != self.right.alphabet:
            raise ExprError(
                f"{type(self).__name__}: operand alphabets differ "
                f"({''.join(self.left.alphabet)!r} vs {''.join(self.right.alphabet)!r})")

    @property
    def alphabet(self):
        return self.left.alphabet

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Choice(_Binary):
    """Left operand if defined, otherwise the right operand."""
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True, eq=True)
class Sum(_Binary):
    """Pointwise monoid sum of both operands."""
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True, eq=True)
class SplitSum(_Binary):
    """Unique split ``w = uv`` with left(u), right(v) defined; left(u) + right(v)."""
    left: FuncExpr
    right: FuncExpr


@dataclass(frozen=True, eq=True)
class LeftSplitSum(_Binary):
    """Like :class:`SplitSum` but the values are added as right(v) + left(u)."""
    left: FuncExpr
    right: FuncExpr


class _Unary(FuncExpr):
    body: FuncExpr

    @property
    def alphabet(self):
        return self.body.alphabet

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class IterSum(_Unary):
    """Unique decomposition into nonempty pieces with body defined; values
    added left to right.  The empty word maps to the identity."""
    body: FuncExpr


@dataclass(frozen=True, eq=True)
class LeftIterSum(_Unary):
    """As :class:`IterSum` with the piece values added right to left."""
    body: FuncExpr


@dataclass(frozen=True, eq=True)
class ChainedSum(_Unary):
    """Unique decomposition into at least two nonempty pieces of ``lang``;
    body applied to each pair of adjacent pieces, added left to right."""
    body: FuncExpr
    lang: LangLike

    @cached_property
    def lang_dfa(self) -> rl.Dfa:
        if isinstance(self.lang, rl.Dfa):
            return self.lang
        return rl.regex_to_dfa(self.lang, self.alphabet)


@dataclass(frozen=True, eq=True)
class LeftChainedSum(_Unary):
    """As :class:`ChainedSum` with the pair values added right to left."""
    body: FuncExpr
    lang: LangLike

    @cached_property
    def lang_dfa(self) -> rl.Dfa:
        if isinstance(self.lang, rl.Dfa):
            return self.lang
        return rl.regex_to_dfa(self.lang, self.alphabet)


@dataclass(frozen=True, eq=True)
class Reverse(_Unary):
    """The body applied to the reversed input."""
    body: FuncExpr


@dataclass(frozen=True, eq=True)
class Compose(FuncExpr):
    """``outer o inner``: feed the string produced by ``inner`` to ``outer``."""

    outer: FuncExpr
    inner: FuncExpr

    def __post_init__(self):
        out = output_symbols(self.inner)
        if output_kind(self.inner) != "str":
            raise ExprError("the inner function of a composition must produce strings")
        extra = out - set(self.outer.alphabet)
        if extra:
            raise ExprError(f"inner function emits symbols {sorted(extra)} outside the outer alphabet")

    @property
    def alphabet(self):
        return self.inner.alphabet

    def children(self):
        return (self.outer, self.inner)


# ---------------------------------------------------------------------------
# Derived forms


def zero_of(e: FuncExpr):
    return "" if output_kind(e) == "str" else 0


def restrict(f: FuncExpr, lang: LangLike) -> FuncExpr:
    """``f`` on words of ``lang``, undefined elsewhere."""
    return Sum(f, Const(lang, zero_of(f), f.alphabet))


def bottom(sigma: Iterable[str], zero=0) -> FuncExpr:
    """The everywhere-undefined function."""
    return Const(rl.EMPTY, zero, tuple(sigma))


def lshift(f: FuncExpr, lang: LangLike) -> FuncExpr:
    """Defined on ``w = uv`` (unique split) with ``u`` in dom f, ``v`` in lang; value f(u)."""
    return SplitSum(f, Const(lang, zero_of(f), f.alphabet))


def rshift(lang: LangLike, f: FuncExpr) -> FuncExpr:
    """Defined on ``w = uv`` (unique split) with ``u`` in lang, ``v`` in dom f; value f(v)."""
    return SplitSum(Const(lang, zero_of(f), f.alphabet), f)


def choice_all(items: List[FuncExpr], sigma, zero) -> FuncExpr:
    if not items:
        return bottom(sigma, zero)
    out = items[0]
    for it in items[1:]:
        out = Choice(out, it)
    return out


# ---------------------------------------------------------------------------
# Static information


def iter_nodes(e: FuncExpr):
    """Every distinct node object of the expression DAG once."""
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        stack.extend(n.children())


def output_kind(e: FuncExpr) -> str:
    """``"str"`` or ``"int"``: the monoid of the values produced by ``e``."""
    kinds = set()
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if isinstance(n, Const):
            kinds.add("str" if isinstance(n.value, str) else "int")
        elif isinstance(n, Compose):
            stack.append(n.outer)
        else:
            stack.extend(n.children())
    if len(kinds) > 1:
        raise MonoidError("expression mixes string and integer constants")
    if not kinds:
        raise ExprError("expression has no constants")
    return kinds.pop()


def output_symbols(e: FuncExpr) -> set:
    """Symbols that can occur in string values produced by ``e``."""
    out = set()
    for n in _nodes_outside_compose_inner(e):
        if isinstance(n, Const) and isinstance(n.value, str):
            out |= set(n.value)
    return out


def _nodes_outside_compose_inner(e: FuncExpr):
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        if isinstance(n, Compose):
            stack.append(n.outer)
        else:
            stack.extend(n.children())


def expr_size(e: FuncExpr) -> int:
    """Number of distinct nodes in the DAG."""
    return sum(1 for _ in iter_nodes(e))


def operators_used(e: FuncExpr) -> set:
    return {type(n).__name__ for n in iter_nodes(e)}


def contains_cascade_nodes(e: FuncExpr) -> bool:
    return any(isinstance(n, (ChainedSum, LeftChainedSum, Compose)) for n in iter_nodes(e))


# ---------------------------------------------------------------------------
# Reference evaluation


class Evaluator:
    """Memoizing evaluator.  Reuse one instance to share work across many
    inputs (bounded sweeps)."""

    def __init__(self, root: Optional[FuncExpr] = None):
        self._memo: Dict[Tuple[int, str], object] = {}
        self._zero: Dict[int, object] = {}
        self._keep: Dict[int, FuncExpr] = {}
        if root is not None:
            self._keep[id(root)] = root

    def __call__(self, e: FuncExpr, word: str):
        self._keep[id(e)] = e
        bad = set(word) - set(e.alphabet)
        if bad:
            raise ExprError(f"input symbols {sorted(bad)} not in alphabet {''.join(e.alphabet)!r}")
        return self.ev(e, word)

    def zero(self, e: FuncExpr):
        z = self._zero.get(id(e))
        if z is None:
            z = self._zero[id(e)] = zero_of(e)
        return z

    def ev(self, e: FuncExpr, s: str):
        key = (id(e), s)
        memo = self._memo
        if key in memo:
            return memo[key]
        v = self._compute(e, s)
        memo[key] = v
        return v

    def _compute(self, e: FuncExpr, s: str):
        ev = self.ev
        t = type(e)
        if t is Const:
            d = e.dfa
            q = d.start
            delta = d.delta
            for a in s:
                q = delta[q][a]
            return e.value if q in d.accepting else BOT
        if t is Choice:
            v = ev(e.left, s)
            return v if v is not BOT else ev(e.right, s)
        if t is Sum:
            v = ev(e.left, s)
            if v is BOT:
                return BOT
            return mplus(v, ev(e.right, s))
        if t is SplitSum or t is LeftSplitSum:
            found = None
            for k in range(len(s) + 1):
                lv = ev(e.left, s[:k])
                if lv is BOT:
                    continue
                rv = ev(e.right, s[k:])
                if rv is BOT:
                    continue
                if found is not None:
                    return BOT
                found = (lv, rv)
            if found is None:
                return BOT
            lv, rv = found
            return mplus(lv, rv) if t is SplitSum else mplus(rv, lv)
        if t is IterSum or t is LeftIterSum:
            if not s:
                return self.zero(e)
            n = len(s)
            count = [0] * (n + 1)
            value: List[object] = [None] * (n + 1)
            count[0] = 1
            right = t is IterSum
            for p in range(1, n + 1):
                c = 0
                val = None
                for m in range(p):
                    if not count[m]:
                        continue
                    v = ev(e.body, s[m:p])
                    if v is BOT:
                        continue
                    c += count[m]
                    if c == 1:
                        if m == 0:
                            val = v
                        else:
                            val = mplus(value[m], v) if right else mplus(v, value[m])
                    if c >= 2:
                        c = 2
                        break
                count[p] = c
                value[p] = val if c == 1 else None
            return value[n] if count[n] == 1 else BOT
        if t is ChainedSum or t is LeftChainedSum:
            pieces = _unique_decomposition(e.lang_dfa, s)
            if pieces is None or len(pieces) < 2:
                return BOT
            total = None
            for i in range(len(pieces) - 1):
                v = ev(e.body, pieces[i] + pieces[i + 1])
                if v is BOT:
                    return BOT
                if total is None:
                    total = v
                else:
                    total = mplus(total, v) if t is ChainedSum else mplus(v, total)
            return total
        if t is Reverse:
            return ev(e.body, s[::-1])
        if t is Compose:
            v = ev(e.inner, s)
            if v is BOT:
                return BOT
            if not isinstance(v, str):
                raise ExprError("inner function of a composition produced a non-string")
            return ev(e.outer, v)
        raise ExprError(f"unknown node {e!r}")


def _unique_decomposition(d: rl.Dfa, s: str) -> Optional[List[str]]:
    """The unique decomposition of ``s`` into nonempty words of ``d``, or None
    when there are none or several.  The empty word has the empty
    decomposition."""
    n = len(s)
    count = [0] * (n + 1)
    back = [-1] * (n + 1)
    count[0] = 1
    for m in range(n):
        if not count[m]:
            continue
        q = d.start
        for p in range(m + 1, n + 1):
            q = d.delta[q][s[p - 1]]
            if q in d.accepting:
                count[p] = min(2, count[p] + count[m])
                back[p] = m
    if count[n] != 1:
        return None
    pieces = []
    p = n
    while p > 0:
        m = back[p]
        pieces.append(s[m:p])
        p = m
    pieces.reverse()
    return pieces


def eval_naive(e: FuncExpr, word: str):
    """Value of ``e`` on ``word`` (``BOT`` when undefined)."""
    return Evaluator(e)(e, word)


# ---------------------------------------------------------------------------
# Domains


COMPOSE_DOMAIN_BOUND = 6


def domain_dfa(e: FuncExpr, bound: int = COMPOSE_DOMAIN_BOUND) -> rl.Dfa:
    """DFA of the words on which ``e`` is defined.

    Exact for every node except compositions, where the domain is computed
    exactly on words up to ``bound`` and approximated by the inner domain
    beyond that."""
    t = type(e)
    if t is Const:
        return rl.minimize(e.dfa)
    if t is Choice:
        return rl.dfa_algebra("union", e.left.domain, e.right.domain)
    if t is Sum:
        return rl.dfa_algebra("intersect", e.left.domain, e.right.domain)
    if t is SplitSum or t is LeftSplitSum:
        return rl.unambiguous_concat_dfa(e.left.domain, e.right.domain)
    if t is IterSum or t is LeftIterSum:
        return rl.unambiguous_star_dfa(e.body.domain)
    if t is ChainedSum or t is LeftChainedSum:
        return _chained_domain(e.body.domain, rl.minimize(e.lang_dfa))
    if t is Reverse:
        return rl.reverse_dfa(e.body.domain)
    if t is Compose:
        return _compose_domain(e, bound)
    raise ExprError(f"unknown node {e!r}")


def _chained_domain(dom: rl.Dfa, lang: rl.Dfa) -> rl.Dfa:
    sigma = lang.alphabet
    # NFA guessing the piece boundaries: (piece state, run over previous and
    # current piece, run over current piece, pieces so far capped at 2)
    index: Dict = {}
    edges = []
    todo = []

    def sid(k):
        if k not in index:
            index[k] = len(index)
            todo.append(k)
        return index[k]

    start = sid("init")
    while todo:
        k = todo.pop()
        i = index[k]
        for a in sigma:
            succ = []
            if k == "init":
                succ.append((lang.delta[lang.start][a], None, dom.delta[dom.start][a], 1))
            else:
                ql, pair, single, cnt = k
                succ.append((lang.delta[ql][a], None if pair is None else dom.delta[pair][a],
                             dom.delta[single][a], cnt))
                if ql in lang.accepting and (cnt == 1 or pair in dom.accepting):
                    succ.append((lang.delta[lang.start][a], dom.delta[single][a],
                                 dom.delta[dom.start][a], 2))
            for k2 in succ:
                edges.append((i, a, sid(k2)))
    acc = frozenset(index[k] for k in index
                    if k != "init" and k[3] == 2 and k[0] in lang.accepting and k[1] in dom.accepting)
    nfa = rl.Nfa(len(index), sigma, tuple(edges), frozenset({start}), acc)
    return rl.dfa_algebra("intersect", rl.determinize(nfa), rl.unambiguous_star_dfa(lang))


def _compose_domain(e: Compose, bound: int) -> rl.Dfa:
    inner = e.inner.domain
    ev = Evaluator(e)

    def step(k, a):
        if isinstance(k, str):
            w = k + a
            if len(w) <= bound:
                return w
            return ("long", inner.run(w))
        return ("long", inner.delta[k[1]][a])

    def accept(k):
        if isinstance(k, str):
            return ev.ev(e, k) is not BOT
        return k[1] in inner.accepting

    return rl.minimize(rl.build_dfa(e.alphabet, "", step, accept)[0])


# ---------------------------------------------------------------------------
# Reverse elimination


def push_reverse(e: FuncExpr) -> FuncExpr:
    """An equivalent expression without :class:`Reverse` nodes.  Reversal is
    pushed to the leaves (reversing constant languages), swaps split operands
    and flips iteration direction; at a composition it moves into the inner
    function."""
    memo: Dict[Tuple[int, bool], FuncExpr] = {}

    def go(n: FuncExpr, rev: bool) -> FuncExpr:
        key = (id(n), rev)
        if key in memo:
            return memo[key]
        t = type(n)
        if t is Reverse:
            out = go(n.body, not rev)
        elif t is Const:
            if not rev:
                out = n
            else:
                out = Const(rl.reverse_dfa(n.dfa), n.value, n.sigma)
        elif t in (Choice, Sum):
            out = t(go(n.left, rev), go(n.right, rev))
        elif t is SplitSum:
            out = LeftSplitSum(go(n.right, True), go(n.left, True)) if rev else \
                SplitSum(go(n.left, False), go(n.right, False))
        elif t is LeftSplitSum:
            out = SplitSum(go(n.right, True), go(n.left, True)) if rev else \
                LeftSplitSum(go(n.left, False), go(n.right, False))
        elif t in (IterSum, LeftIterSum):
            flip = {IterSum: LeftIterSum, LeftIterSum: IterSum}
            out = (flip[t] if rev else t)(go(n.body, rev))
        elif t in (ChainedSum, LeftChainedSum):
            flip = {ChainedSum: LeftChainedSum, LeftChainedSum: ChainedSum}
            if rev:
                out = flip[t](go(n.body, True), rl.reverse_dfa(n.lang_dfa))
            else:
                out = t(go(n.body, False), n.lang)
        elif t is Compose:
            out = Compose(go(n.outer, False), go(n.inner, rev))
        else:
            raise ExprError(f"unknown node {n!r}")
        memo[key] = out
        return out

    return go(e, False)


# ---------------------------------------------------------------------------
# Alphabet extension and the chained-sum pipeline


def lift_alphabet(e: FuncExpr, sigma: Iterable[str]) -> FuncExpr:
    """The same function over a larger input alphabet: undefined on every
    word using a new symbol."""
    sigma = _alpha(sigma)
    memo: Dict[int, FuncExpr] = {}

    def go(n: FuncExpr) -> FuncExpr:
        if id(n) in memo:
            return memo[id(n)]
        t = type(n)
        if t is Const:
            out = Const(rl.lift_dfa(n.dfa, sigma), n.value, sigma)
        elif t in (Choice, Sum, SplitSum, LeftSplitSum):
            out = t(go(n.left), go(n.right))
        elif t in (IterSum, LeftIterSum, Reverse):
            out = t(go(n.body))
        elif t in (ChainedSum, LeftChainedSum):
            out = t(go(n.body), rl.lift_dfa(n.lang_dfa, sigma))
        elif t is Compose:
            out = Compose(n.outer, go(n.inner))
        else:
            raise ExprError(f"unknown node {n!r}")
        memo[id(n)] = out
        return out

    return go(e)


def identity_expr(symbols: Iterable[str], sigma: Iterable[str]) -> FuncExpr:
    """Echo of words over ``symbols`` (a subset of the input alphabet)."""
    sigma = _alpha(sigma)
    atoms = [Const(rl.Sym(a), a, sigma) for a in sorted(set(symbols))]
    return IterSum(choice_all(atoms, sigma, ""))


def fresh_marker(sigma: Iterable[str], preferred: str = "@") -> str:
    used = set(sigma)
    if preferred not in used:
        return preferred
    for code in range(0x2460, 0x2500):
        if chr(code) not in used:
            return chr(code)
    raise ExprError("no fresh marker symbol available")


def chained_pipeline(e: FuncExpr, marker: Optional[str] = None) -> FuncExpr:
    """Rewrite a (left-)chained sum as a composition pipeline: copy every
    block as ``w@w@``, drop the first and last copies, insist on at least
    two blocks, then sum the body over the ``@``-terminated pairs."""
    if not isinstance(e, (ChainedSum, LeftChainedSum)):
        raise ExprError("chained_pipeline expects a chained sum")
    sigma = e.alphabet
    at = marker or fresh_marker(sigma)
    big = _alpha(sigma + (at,))
    lang = rl.minimize(e.lang_dfa)

    # copy_L : sigma* -> (sigma+@)*,  w |-> w@w@ on words of L
    id_s = identity_expr(sigma, sigma)
    mark = Const(rl.EPS, at, sigma)
    copy_l = restrict(Sum(SplitSum(id_s, mark), SplitSum(id_s, mark)), lang)
    stage1 = IterSum(copy_l)

    # drop_L over sigma+@
    lang_at = rl.concat_dfa(rl.lift_dfa(lang, big), rl.dfa_word((at,), big))
    id_b = identity_expr(sigma, big)
    pair = SplitSum(id_b, SplitSum(Const(rl.Sym(at), "", big),
                                   SplitSum(id_b, Const(rl.Sym(at), at, big))))
    drop = SplitSum(Const(lang_at, "", big), SplitSum(IterSum(pair), Const(lang_at, "", big)))

    # ensurelen: echo, defined only on nonempty words
    ensurelen = Sum(identity_expr(big, big), Const(rl.dfa_nonempty(big), "", big))

    body = lift_alphabet(e.body, big)
    step = SplitSum(body, Const(rl.Sym(at), zero_of(e.body), big))
    final = IterSum(step) if isinstance(e, ChainedSum) else LeftIterSum(step)
    return Compose(final, Compose(ensurelen, Compose(drop, stage1)))


# ---------------------------------------------------------------------------
# Surface syntax printer

KEYWORDS = {"sum", "lsum", "chain", "lchain", "rev", "o", "let", "in"}

# binding strength: choice 1, sum 2, split family 3, prefix 4, compose 5, atom 6
_LEVEL = {Choice: 1, Sum: 2, SplitSum: 3, LeftSplitSum: 3, IterSum: 4, LeftIterSum: 4,
          ChainedSum: 4, LeftChainedSum: 4, Reverse: 4, Compose: 5, Const: 6}
_INFIX = {Choice: "|>", Sum: "+", SplitSum: "(+)", LeftSplitSum: "(<+)", Compose: "o"}


def lang_text(lang: LangLike) -> str:
    if isinstance(lang, rl.Dfa):
        lang = rl.state_elimination(rl.trim_dfa_to_nfa(lang))
    return rl.regex_compact(lang)


def _value_text(v) -> str:
    import json
    return json.dumps(v, ensure_ascii=False) if isinstance(v, str) else str(v)


def to_surface(e: FuncExpr, share: bool = True) -> str:
    """Print ``e`` in the surface syntax.  With ``share``, nodes reachable
    along several paths are bound once with ``let``."""
    names: Dict[int, str] = {}
    order: List[FuncExpr] = []
    if share:
        refs: Dict[int, int] = {}
        for n in iter_nodes(e):
            for c in n.children():
                refs[id(c)] = refs.get(id(c), 0) + 1
        # post-order so that bindings precede their uses
        seen = set()

        def visit(n):
            stack = [(n, False)]
            while stack:
                m, done = stack.pop()
                if done:
                    if refs.get(id(m), 0) > 1 and not isinstance(m, Const) and m is not e:
                        names[id(m)] = f"e{len(names) + 1}"
                        order.append(m)
                    continue
                if id(m) in seen:
                    continue
                seen.add(id(m))
                stack.append((m, True))
                for c in reversed(m.children()):
                    stack.append((c, False))

        visit(e)

    def pr(n: FuncExpr, min_level: int, top: bool = False) -> str:
        if not top and id(n) in names:
            return names[id(n)]
        t = type(n)
        lvl = _LEVEL[t]
        if t is Const:
            lt = lang_text(n.lang)
            if isinstance(n.lang, rl.Union) or (isinstance(n.lang, rl.Dfa) and "|" in lt):
                lt = f"({lt})"
            s = f"{lt}/{_value_text(n.value)}"
        elif t in _INFIX:
            if t is Compose:
                a, b = n.outer, n.inner
            else:
                a, b = n.left, n.right
            s = f"{pr(a, lvl)} {_INFIX[t]} {pr(b, lvl + 1)}"
        elif t in (IterSum, LeftIterSum, Reverse):
            kw = {IterSum: "sum", LeftIterSum: "lsum", Reverse: "rev"}[t]
            s = f"{kw} {pr(n.body, 4)}"
        elif t in (ChainedSum, LeftChainedSum):
            kw = "chain" if t is ChainedSum else "lchain"
            s = f"{kw}[{lang_text(n.lang)}] {pr(n.body, 4)}"
        else:
            raise ExprError(f"unknown node {n!r}")
        return s if lvl >= min_level else f"({s})"

    body = pr(e, 0, top=True)
    if not order:
        return body
    lines = [f"let {names[id(n)]} = {pr(n, 0, top=True)} in" for n in order]
    return "\n".join(lines + [body])
