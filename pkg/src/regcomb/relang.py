"""Regular-language toolkit: DFAs, NFAs, regexes, split-counting automata and
state elimination."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple


class LanguageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Regex syntax trees


class Regex:
    __slots__ = ()


@dataclass(frozen=True)
class Empty(Regex):
    pass


@dataclass(frozen=True)
class Eps(Regex):
    pass


@dataclass(frozen=True)
class Sym(Regex):
    symbol: Hashable


@dataclass(frozen=True)
class AnySym(Regex):
    """Any single symbol of the ambient alphabet (``.`` in the surface form)."""


@dataclass(frozen=True)
class Union(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    body: Regex


EMPTY = Empty()
EPS = Eps()


def union(a: Regex, b: Regex) -> Regex:
    if isinstance(a, Empty):
        return b
    if isinstance(b, Empty):
        return a
    return Union(a, b)


def concat(a: Regex, b: Regex) -> Regex:
    if isinstance(a, Empty) or isinstance(b, Empty):
        return EMPTY
    if isinstance(a, Eps):
        return b
    if isinstance(b, Eps):
        return a
    return Concat(a, b)


def star(a: Regex) -> Regex:
    if isinstance(a, (Empty, Eps)):
        return EPS
    return Star(a)


def union_all(items: Iterable[Regex]) -> Regex:
    out: Regex = EMPTY
    for r in items:
        out = union(out, r)
    return out


def concat_all(items: Iterable[Regex]) -> Regex:
    out: Regex = EPS
    for r in items:
        out = concat(out, r)
    return out


def word_regex(word: Iterable) -> Regex:
    return concat_all(Sym(a) for a in word)


def regex_symbols(r: Regex) -> set:
    out = set()
    stack = [r]
    while stack:
        n = stack.pop()
        if isinstance(n, Sym):
            out.add(n.symbol)
        elif isinstance(n, (Union, Concat)):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, Star):
            stack.append(n.body)
    return out


def nullable(r: Regex) -> bool:
    if isinstance(r, (Eps, Star)):
        return True
    if isinstance(r, Union):
        return nullable(r.left) or nullable(r.right)
    if isinstance(r, Concat):
        return nullable(r.left) and nullable(r.right)
    return False


_RESERVED = set("()[]|*?.\\/ \t\n")


def _sym_text(a) -> str:
    if isinstance(a, str) and len(a) == 1:
        return "\\" + a if a in _RESERVED else a
    if isinstance(a, tuple) and len(a) == 2:
        return f"{a[0]}{a[1]}" if not isinstance(a[1], str) else f"{a[0]}<{a[1]}>"
    return f"<{a}>"


def regex_str(r: Regex) -> str:
    """Fully parenthesized text form.  ``[]`` is the empty language and
    ``()`` the empty word."""
    if isinstance(r, Empty):
        return "[]"
    if isinstance(r, Eps):
        return "()"
    if isinstance(r, Sym):
        return _sym_text(r.symbol)
    if isinstance(r, AnySym):
        return "."
    if isinstance(r, Union):
        return f"({regex_str(r.left)}|{regex_str(r.right)})"
    if isinstance(r, Concat):
        return f"({regex_str(r.left)}{regex_str(r.right)})"
    if isinstance(r, Star):
        return f"({regex_str(r.body)})*"
    raise TypeError(r)


def regex_compact(r: Regex) -> str:
    """Text form with only the parentheses precedence requires; parses back to
    the same tree (unions and concatenations nest to the left)."""

    def render(n: Regex, ctx: int) -> str:
        # ctx 0: top or left of a union, 1: right of a union or left of a
        # concatenation, 2: right of a concatenation, 3: star body
        if isinstance(n, Union):
            s = render(n.left, 0) + "|" + render(n.right, 1)
            return s if ctx == 0 else f"({s})"
        if isinstance(n, Concat):
            s = render(n.left, 1) + render(n.right, 2)
            return s if ctx <= 1 else f"({s})"
        if isinstance(n, Star):
            return render(n.body, 3) + "*"
        return regex_str(n)

    return render(r, 0)


class RegexSyntaxError(LanguageError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def parse_regex(text: str, offset: int = 0) -> Regex:
    """Parse the regex literal syntax: ``|`` union, juxtaposition, postfix ``*``
    and ``?``, ``.`` any symbol, ``()`` empty word, ``[...]`` a symbol class
    (``[]`` is the empty language), ``\\c`` escapes."""
    pos = 0

    def err(msg):
        raise RegexSyntaxError(msg, offset + pos)

    def peek():
        return text[pos] if pos < len(text) else None

    def alt() -> Regex:
        nonlocal pos
        left = cat()
        while peek() == "|":
            pos += 1
            left = Union(left, cat())
        return left

    def cat() -> Regex:
        items = []
        while peek() is not None and peek() not in "|)":
            items.append(post())
        if not items:
            return EPS
        out = items[0]
        for it in items[1:]:
            out = Concat(out, it)
        return out

    def post() -> Regex:
        nonlocal pos
        a = atom()
        while peek() in ("*", "?"):
            a = Star(a) if peek() == "*" else Union(EPS, a)
            pos += 1
        return a

    def atom() -> Regex:
        nonlocal pos
        c = peek()
        if c == "(":
            pos += 1
            if peek() == ")":
                pos += 1
                return EPS
            r = alt()
            if peek() != ")":
                err("expected ')'")
            pos += 1
            return r
        if c == "[":
            pos += 1
            syms = []
            while peek() is not None and peek() != "]":
                if peek() == "\\":
                    pos += 1
                    if peek() is None:
                        err("dangling escape")
                syms.append(text[pos])
                pos += 1
            if peek() != "]":
                err("expected ']'")
            pos += 1
            if not syms:
                return EMPTY
            out: Regex = Sym(syms[0])
            for s in syms[1:]:
                out = Union(out, Sym(s))
            return out
        if c == ".":
            pos += 1
            return AnySym()
        if c == "\\":
            pos += 1
            if peek() is None:
                err("dangling escape")
            pos += 1
            return Sym(text[pos - 1])
        if c is None or c in "*?|)]" or c.isspace() or c == "/":
            err(f"unexpected {c!r}" if c else "unexpected end of regex")
        pos += 1
        return Sym(c)

    r = alt()
    if pos != len(text):
        err(f"unexpected {text[pos]!r}")
    return r


def parse_count(r: Regex, word: Sequence, cap: int = 2) -> int:
    """Number of parse trees of ``word`` under ``r`` (capped at ``cap``).
    Star iterations are nonempty; a star over a nullable body counts as
    ambiguous on the empty word."""
    n = len(word)
    memo: Dict[Tuple[int, int, int], int] = {}

    def count(node: Regex, i: int, j: int) -> int:
        key = (id(node), i, j)
        if key in memo:
            return memo[key]
        if isinstance(node, Empty):
            c = 0
        elif isinstance(node, Eps):
            c = 1 if i == j else 0
        elif isinstance(node, Sym):
            c = 1 if j == i + 1 and word[i] == node.symbol else 0
        elif isinstance(node, AnySym):
            c = 1 if j == i + 1 else 0
        elif isinstance(node, Union):
            c = count(node.left, i, j) + count(node.right, i, j)
        elif isinstance(node, Concat):
            c = 0
            for k in range(i, j + 1):
                a = count(node.left, i, k)
                if a:
                    c += a * count(node.right, k, j)
        elif isinstance(node, Star):
            if i == j:
                c = cap if nullable(node.body) else 1
            else:
                c = 0
                for k in range(i + 1, j + 1):
                    a = count(node.body, i, k)
                    if a:
                        c += a * count(node, k, j)
        else:
            raise TypeError(node)
        c = min(c, cap)
        memo[key] = c
        return c

    return count(r, 0, n)


# ---------------------------------------------------------------------------
# Automata


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete DFA with states ``0..n-1``.  ``delta[q][a]`` is the successor."""

    alphabet: Tuple
    delta: Tuple[Dict, ...]
    start: int
    accepting: frozenset

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def step(self, q: int, a) -> int:
        return self.delta[q][a]

    def run(self, word: Iterable, q: Optional[int] = None) -> int:
        q = self.start if q is None else q
        d = self.delta
        try:
            for a in word:
                q = d[q][a]
        except KeyError as exc:
            raise LanguageError(f"symbol {exc.args[0]!r} not in alphabet") from None
        return q

    def accepts(self, word: Iterable) -> bool:
        return self.run(word) in self.accepting

    def is_empty(self) -> bool:
        return not (self.reachable() & self.accepting)

    def reachable(self) -> set:
        seen = {self.start}
        todo = [self.start]
        while todo:
            q = todo.pop()
            for r in self.delta[q].values():
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    def live_states(self) -> set:
        """States from which some accepting state is reachable."""
        preds: Dict[int, set] = {q: set() for q in self.states}
        for q in self.states:
            for r in self.delta[q].values():
                preds[r].add(q)
        live = set(self.accepting)
        todo = list(live)
        while todo:
            q = todo.pop()
            for p in preds[q]:
                if p not in live:
                    live.add(p)
                    todo.append(p)
        return live

    def __repr__(self):
        return f"Dfa(states={len(self.delta)}, alphabet={self.alphabet!r}, accepting={sorted(self.accepting)})"


@dataclass(frozen=True, eq=False)
class Nfa:
    """NFA with states ``0..n-1``; ``edges`` may contain repeated entries
    (parallel edges) and ``None`` as an epsilon label."""

    n_states: int
    alphabet: Tuple
    edges: Tuple[Tuple[int, Hashable, int], ...]
    starts: frozenset
    accepting: frozenset
    labels: Optional[Tuple] = None  # optional printable state names

    def __post_init__(self):
        alpha = set(self.alphabet)
        for p, a, q in self.edges:
            if a is not None and a not in alpha:
                raise LanguageError(f"edge symbol {a!r} not in alphabet")
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise LanguageError(f"edge ({p}, {a!r}, {q}) out of range")

    @property
    def states(self) -> range:
        return range(self.n_states)

    def has_epsilon(self) -> bool:
        return any(a is None for _, a, _ in self.edges)

    def _closure(self, qs) -> frozenset:
        eps: Dict[int, List[int]] = {}
        for p, a, q in self.edges:
            if a is None:
                eps.setdefault(p, []).append(q)
        seen = set(qs)
        todo = list(qs)
        while todo:
            p = todo.pop()
            for q in eps.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def accepts(self, word: Iterable) -> bool:
        cur = self._closure(self.starts)
        table = self._table()
        for a in word:
            cur = self._closure({q for p in cur for q in table.get((p, a), ())})
        return bool(cur & self.accepting)

    def _table(self) -> Dict:
        t: Dict = {}
        for p, a, q in self.edges:
            if a is not None:
                t.setdefault((p, a), []).append(q)
        return t


def build_dfa(alphabet: Sequence, start: Hashable, step: Callable, accepting: Callable,
              limit: Optional[int] = None) -> Tuple[Dfa, List]:
    """Explore ``step`` from ``start`` breadth-first and number the reachable
    keys.  Returns the DFA and the list of keys indexed by state."""
    alphabet = tuple(alphabet)
    index = {start: 0}
    keys = [start]
    delta: List[Dict] = []
    todo = deque([start])
    while todo:
        k = todo.popleft()
        row = {}
        for a in alphabet:
            k2 = step(k, a)
            j = index.get(k2)
            if j is None:
                j = index[k2] = len(keys)
                keys.append(k2)
                todo.append(k2)
                if limit is not None and len(keys) > limit:
                    raise LanguageError(f"automaton exceeds {limit} states")
            row[a] = j
        delta.append(row)
    acc = frozenset(i for i, k in enumerate(keys) if accepting(k))
    return Dfa(alphabet, tuple(delta), 0, acc), keys


def dfa_all(alphabet: Sequence) -> Dfa:
    alphabet = tuple(alphabet)
    return Dfa(alphabet, ({a: 0 for a in alphabet},), 0, frozenset({0}))


def dfa_empty(alphabet: Sequence) -> Dfa:
    alphabet = tuple(alphabet)
    return Dfa(alphabet, ({a: 0 for a in alphabet},), 0, frozenset())


def dfa_word(word: Sequence, alphabet: Sequence) -> Dfa:
    """DFA accepting exactly one word."""
    n = len(word)

    def step(i, a):
        return i + 1 if i < n and word[i] == a else n + 1

    return build_dfa(alphabet, 0, step, lambda i: i == n)[0]


def dfa_epsilon(alphabet: Sequence) -> Dfa:
    return dfa_word((), alphabet)


def dfa_symbols(symbols: Iterable, alphabet: Sequence) -> Dfa:
    """DFA accepting the one-letter words over ``symbols``."""
    syms = set(symbols)
    return build_dfa(alphabet, 0, lambda i, a: 1 if i == 0 and a in syms else 2,
                     lambda i: i == 1)[0]


def dfa_nonempty(alphabet: Sequence) -> Dfa:
    return build_dfa(alphabet, 0, lambda i, a: 1, lambda i: i == 1)[0]


def minimize(d: Dfa) -> Dfa:
    """Moore partition refinement on the reachable part."""
    reach = sorted(d.reachable())
    alpha = d.alphabet
    block = {q: (1 if q in d.accepting else 0) for q in reach}
    n_blocks = len(set(block.values()))
    while True:
        sig = {q: (block[q],) + tuple(block[d.delta[q][a]] for a in alpha) for q in reach}
        ids: Dict = {}
        new = {}
        for q in reach:
            new[q] = ids.setdefault(sig[q], len(ids))
        if len(ids) == n_blocks:
            block = new
            break
        block, n_blocks = new, len(ids)
    # renumber so the start state is 0 and states appear in BFS order
    order: Dict[int, int] = {}
    todo = deque([d.start])
    order[block[d.start]] = 0
    rep = {block[d.start]: d.start}
    while todo:
        q = todo.popleft()
        for a in alpha:
            r = d.delta[q][a]
            b = block[r]
            if b not in order:
                order[b] = len(order)
                rep[b] = r
                todo.append(r)
    delta = [None] * len(order)
    for b, i in order.items():
        q = rep[b]
        delta[i] = {a: order[block[d.delta[q][a]]] for a in alpha}
    acc = frozenset(order[block[q]] for q in reach if q in d.accepting)
    return Dfa(alpha, tuple(delta), 0, acc)


def _check_alphabets(args: Sequence[Dfa]) -> Tuple:
    alpha = args[0].alphabet
    for d in args[1:]:
        if set(d.alphabet) != set(alpha):
            raise LanguageError(f"alphabet mismatch: {alpha!r} vs {d.alphabet!r}")
    return alpha


def dfa_product(args: Sequence[Dfa], accept: Callable[[Tuple[bool, ...]], bool]) -> Dfa:
    alpha = _check_alphabets(args)
    start = tuple(d.start for d in args)
    dfa, _ = build_dfa(
        alpha, start,
        lambda k, a: tuple(d.delta[q][a] for d, q in zip(args, k)),
        lambda k: accept(tuple(q in d.accepting for d, q in zip(args, k))),
    )
    return minimize(dfa)


def dfa_algebra(op: str, *args: Dfa) -> Dfa:
    """Boolean operations and reversal: ``intersect``, ``union``,
    ``complement``, ``difference``, ``reverse``."""
    if not args:
        raise LanguageError("dfa_algebra needs at least one argument")
    if op == "intersect":
        return dfa_product(args, all)
    if op == "union":
        return dfa_product(args, any)
    if op == "difference":
        if len(args) != 2:
            raise LanguageError("difference takes two arguments")
        return dfa_product(args, lambda f: f[0] and not f[1])
    if op == "complement":
        if len(args) != 1:
            raise LanguageError("complement takes one argument")
        d = args[0]
        return Dfa(d.alphabet, d.delta, d.start, frozenset(set(d.states) - d.accepting))
    if op == "reverse":
        if len(args) != 1:
            raise LanguageError("reverse takes one argument")
        return reverse_dfa(args[0])
    raise LanguageError(f"unknown operation {op!r}")


def reverse_dfa(d: Dfa) -> Dfa:
    edges = tuple((r, a, q) for q in d.states for a, r in d.delta[q].items())
    n = Nfa(len(d.delta), d.alphabet, edges, frozenset(d.accepting), frozenset({d.start}))
    return determinize(n)


def determinize(n: Nfa) -> Dfa:
    table = n._table()
    start = n._closure(n.starts)

    def step(s, a):
        return n._closure({q for p in s for q in table.get((p, a), ())})

    dfa, _ = build_dfa(n.alphabet, start, step, lambda s: bool(s & n.accepting))
    return minimize(dfa)


def dfa_to_nfa(d: Dfa) -> Nfa:
    edges = tuple((q, a, r) for q in d.states for a, r in d.delta[q].items())
    return Nfa(len(d.delta), d.alphabet, edges, frozenset({d.start}), d.accepting)


def trim_dfa_to_nfa(d: Dfa) -> Nfa:
    """NFA view of ``d`` restricted to reachable, co-reachable states."""
    useful = d.reachable() & d.live_states()
    order = sorted(useful)
    idx = {q: i for i, q in enumerate(order)}
    edges = tuple((idx[q], a, idx[r]) for q in order for a, r in d.delta[q].items() if r in useful)
    starts = frozenset({idx[d.start]}) if d.start in useful else frozenset()
    return Nfa(len(order), d.alphabet, edges, starts, frozenset(idx[q] for q in order if q in d.accepting))


def regex_to_nfa(r: Regex, alphabet: Sequence) -> Nfa:
    """Position (Glushkov) automaton; epsilon-free, with state 0 initial."""
    alphabet = tuple(alphabet)
    positions: List[Hashable] = []

    def walk(node):
        # returns (nullable, first, last, follow-pairs)
        if isinstance(node, Empty):
            return False, set(), set(), []
        if isinstance(node, Eps):
            return True, set(), set(), []
        if isinstance(node, (Sym, AnySym)):
            positions.append(node)
            p = len(positions)
            return False, {p}, {p}, []
        if isinstance(node, Union):
            n1, f1, l1, p1 = walk(node.left)
            n2, f2, l2, p2 = walk(node.right)
            return n1 or n2, f1 | f2, l1 | l2, p1 + p2
        if isinstance(node, Concat):
            n1, f1, l1, p1 = walk(node.left)
            n2, f2, l2, p2 = walk(node.right)
            first = f1 | f2 if n1 else set(f1)
            last = l1 | l2 if n2 else set(l2)
            return n1 and n2, first, last, p1 + p2 + [(x, y) for x in l1 for y in f2]
        if isinstance(node, Star):
            n1, f1, l1, p1 = walk(node.body)
            return True, f1, l1, p1 + [(x, y) for x in l1 for y in f1]
        raise TypeError(node)

    null, first, last, follow = walk(r)
    alpha = set(alphabet)

    def labels(p):
        node = positions[p - 1]
        if isinstance(node, AnySym):
            return alphabet
        return (node.symbol,) if node.symbol in alpha else ()

    edges = []
    for p in sorted(first):
        for a in labels(p):
            edges.append((0, a, p))
    for x, y in follow:
        for a in labels(y):
            edges.append((x, a, y))
    acc = set(last)
    if null:
        acc.add(0)
    return Nfa(len(positions) + 1, alphabet, tuple(edges), frozenset({0}), frozenset(acc))


def regex_to_dfa(r: Regex, alphabet: Sequence) -> Dfa:
    return determinize(regex_to_nfa(r, alphabet))


def nfa_is_unambiguous(n: Nfa) -> bool:
    """True iff no word has two distinct accepting paths.  Explores the
    self-product over pairs of edges, flagging pairs of paths that have
    diverged at least once."""
    if n.has_epsilon():
        raise LanguageError("nfa_is_unambiguous expects an epsilon-free NFA")
    out: Dict[Tuple[int, Hashable], List[Tuple[int, int]]] = {}
    for i, (p, a, q) in enumerate(n.edges):
        out.setdefault((p, a), []).append((i, q))
    starts = sorted(n.starts)
    todo = [(p, q, p != q) for p in starts for q in starts]
    seen = set(todo)
    while todo:
        p, q, diverged = todo.pop()
        if diverged and p in n.accepting and q in n.accepting:
            return False
        for a in n.alphabet:
            for i, p2 in out.get((p, a), ()):
                for j, q2 in out.get((q, a), ()):
                    k = (p2, q2, diverged or i != j)
                    if k not in seen:
                        seen.add(k)
                        todo.append(k)
    return True


def _capped(x: int) -> int:
    return 2 if x >= 2 else x


def unambiguous_concat_dfa(l1: Dfa, l2: Dfa) -> Dfa:
    """Words with exactly one split ``w = uv``, ``u`` in ``l1``, ``v`` in ``l2``."""
    alpha = _check_alphabets([l1, l2])
    n2 = len(l2.delta)

    def add_split(q1, counts):
        if q1 in l1.accepting:
            counts = list(counts)
            counts[l2.start] = _capped(counts[l2.start] + 1)
            return tuple(counts)
        return counts

    start = (l1.start, add_split(l1.start, (0,) * n2))

    def step(key, a):
        q1, counts = key
        new = [0] * n2
        for q, c in enumerate(counts):
            if c:
                r = l2.delta[q][a]
                new[r] = _capped(new[r] + c)
        q1 = l1.delta[q1][a]
        return q1, add_split(q1, tuple(new))

    def accept(key):
        return sum(c for q, c in enumerate(key[1]) if q in l2.accepting) == 1

    return minimize(build_dfa(alpha, start, step, accept)[0])


def unambiguous_star_dfa(l: Dfa) -> Dfa:
    """Accepts the empty word and every nonempty word with exactly one
    decomposition into nonempty pieces of ``l``."""
    alpha = l.alphabet
    n = len(l.delta)
    # key: (number of complete decompositions of the prefix, counts of
    # decompositions ending in an open nonempty piece at each state)
    start = (1, (0,) * n)

    def step(key, a):
        done, counts = key
        new = [0] * n
        for q, c in enumerate(counts):
            if c:
                r = l.delta[q][a]
                new[r] = _capped(new[r] + c)
        if done:
            r = l.delta[l.start][a]
            new[r] = _capped(new[r] + done)
        complete = _capped(sum(c for q, c in enumerate(new) if q in l.accepting))
        return complete, tuple(new)

    return minimize(build_dfa(alpha, start, step, lambda k: k[0] == 1)[0])


def state_elimination(n: Nfa) -> Regex:
    """Regex for L(n) by eliminating states in index order.  ``r[p][q]``
    holds the nonempty paths from p to q whose intermediate states are among
    those already eliminated; the empty word is added once per start state
    that is also accepting."""
    size = n.n_states
    r: List[List[Regex]] = [[EMPTY] * size for _ in range(size)]
    for p, a, q in n.edges:
        r[p][q] = union(r[p][q], EPS if a is None else Sym(a))
    for k in range(size):
        loop = star(r[k][k])
        new = [row[:] for row in r]
        for p in range(size):
            if isinstance(r[p][k], Empty):
                continue
            for q in range(size):
                if isinstance(r[k][q], Empty):
                    continue
                new[p][q] = union(r[p][q], concat(concat(r[p][k], loop), r[k][q]))
        r = new
    out: Regex = EMPTY
    for s in sorted(n.starts):
        for f in sorted(n.accepting):
            out = union(out, r[s][f])
    for s in sorted(n.starts & n.accepting):
        out = union(out, EPS)
    return out


def lift_dfa(d: Dfa, alphabet: Sequence) -> Dfa:
    """The same language over a larger alphabet (new symbols lead to a dead
    state)."""
    alphabet = tuple(alphabet)
    if not set(d.alphabet) <= set(alphabet):
        raise LanguageError("lift_dfa needs a superset alphabet")
    dead = len(d.delta)
    delta = [{a: (row[a] if a in row else dead) for a in alphabet} for row in d.delta]
    delta.append({a: dead for a in alphabet})
    return minimize(Dfa(alphabet, tuple(delta), d.start, d.accepting))


def concat_dfa(a: Dfa, b: Dfa) -> Dfa:
    """Plain (possibly ambiguous) concatenation of two languages."""
    alpha = _check_alphabets([a, b])
    na = len(a.delta)
    edges = [(q, s, r) for q in a.states for s, r in a.delta[q].items()]
    edges += [(na + q, s, na + r) for q in b.states for s, r in b.delta[q].items()]
    edges += [(q, None, na + b.start) for q in a.accepting]
    n = Nfa(na + len(b.delta), alpha, tuple(edges), frozenset({a.start}),
            frozenset(na + q for q in b.accepting))
    return determinize(n)


def star_dfa(a: Dfa) -> Dfa:
    """Plain Kleene star of a language (ambiguity ignored)."""
    n = len(a.delta)
    edges = [(q, s, r) for q in a.states for s, r in a.delta[q].items()]
    edges += [(q, None, n) for q in a.accepting]
    edges.append((n, None, a.start))
    nfa = Nfa(n + 1, a.alphabet, tuple(edges), frozenset({n}), frozenset({n}))
    return determinize(nfa)


def all_words(alphabet: Sequence, max_len: int, min_len: int = 0):
    """All words over ``alphabet`` of length ``min_len..max_len`` in
    length-lexicographic order, as tuples."""
    from itertools import product

    for k in range(min_len, max_len + 1):
        yield from product(alphabet, repeat=k)


def all_strings(alphabet: Sequence, max_len: int, min_len: int = 0):
    for w in all_words(alphabet, max_len, min_len):
        yield "".join(w)


def dfa_equivalent(a: Dfa, b: Dfa) -> bool:
    return dfa_product([a, b], lambda f: f[0] != f[1]).is_empty()


def _dot_label(x) -> str:
    return str(x).replace('"', '\\"')


def dfa_to_dot(d: Dfa, name: str = "dfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point];']
    for q in d.states:
        shape = "doublecircle" if q in d.accepting else "circle"
        lines.append(f'  {q} [shape={shape}];')
    lines.append(f"  __start -> {d.start};")
    grouped: Dict[Tuple[int, int], List] = {}
    for q in d.states:
        for a, r in d.delta[q].items():
            grouped.setdefault((q, r), []).append(a)
    for (q, r), syms in grouped.items():
        lab = ",".join(_dot_label(_sym_text(a)) for a in syms)
        lines.append(f'  {q} -> {r} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def nfa_to_dot(n: Nfa, name: str = "nfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for q in n.states:
        shape = "doublecircle" if q in n.accepting else "circle"
        lab = _dot_label(n.labels[q]) if n.labels else str(q)
        lines.append(f'  {q} [shape={shape}, label="{lab}"];')
    for i, s in enumerate(sorted(n.starts)):
        lines.append(f"  __start{i} [shape=point];")
        lines.append(f"  __start{i} -> {s};")
    for p, a, q in n.edges:
        lab = "ε" if a is None else _dot_label(_sym_text(a))
        lines.append(f'  {p} -> {q} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
