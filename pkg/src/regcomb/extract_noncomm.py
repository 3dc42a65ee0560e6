"""Expressions from copyless register automata over arbitrary monoids.

The construction runs alongside the textbook state-elimination algorithm.
For every pair of states and every *shape* (the register-flow pattern of a
path) it keeps an expression vector: one expression per register and patch
(constant slot of the update) that computes the constant from the input.

Conventions used throughout:

* machines are normalized first, registers ordered as in ``m.registers``;
* tables hold vectors for *nonempty* paths only; the empty path is added
  when assembling the final expression and inside loop vectors;
* patch ``k`` of a row ``S(v) = r_0 .. r_{m-1}`` is the constant before
  ``r_k`` (``k = m`` is the trailing slot);
* every component of a vector is defined exactly on the vector's domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from . import expr as ex
from . import relang as rl
from .ccra import (Ccra, CopylessError, Reg, is_normalized, normalize, patches, regs_of,
                   shape_is_normalized, validate_copyless)
from .extract_comm import ExtractionError


# ---------------------------------------------------------------------------
# Shapes


@dataclass(frozen=True)
class Shape:
    """Register-flow summary: ``rows[i]`` lists the registers feeding
    ``regs[i]``, in order."""

    regs: Tuple[str, ...]
    rows: Tuple[Tuple[str, ...], ...]

    def row(self, v: str) -> Tuple[str, ...]:
        return self.rows[self.regs.index(v)]

    @cached_property
    def support(self) -> frozenset:
        return frozenset(v for v, r in zip(self.regs, self.rows) if v in r)

    def is_identity(self) -> bool:
        return all(r == (v,) for v, r in zip(self.regs, self.rows))

    def is_copyless(self) -> bool:
        seen = [u for r in self.rows for u in r]
        return len(seen) == len(set(seen))

    def __str__(self):
        return ", ".join(f"{v}:={''.join(r) or 'e'}" for v, r in zip(self.regs, self.rows))


def identity_shape(regs: Sequence[str]) -> Shape:
    regs = tuple(regs)
    return Shape(regs, tuple((v,) for v in regs))


def shape_concat(s1: Shape, s2: Shape) -> Shape:
    """Shape of a path ``pi1 pi2`` from the shapes of ``pi1`` and ``pi2``:
    every register of ``s2(v)`` is replaced by its row in ``s1``."""
    if s1.regs != s2.regs:
        raise ExtractionError("shapes over different registers")
    return Shape(s1.regs, tuple(tuple(w for u in r for w in s1.row(u)) for r in s2.rows))


def support(s: Shape) -> frozenset:
    return s.support


def shape_order(s1: Shape, s2: Shape) -> str:
    """``less`` when s1 has strictly larger support (s1 below s2), ``greater``
    for the converse, ``equal-support`` or ``incomparable`` otherwise."""
    a, b = s1.support, s2.support
    if a == b:
        return "equal-support"
    if a > b:
        return "less"
    if a < b:
        return "greater"
    return "incomparable"


def transition_shape(m: Ccra, q, a) -> Shape:
    row = m.update(q, a)
    return Shape(m.registers, tuple(regs_of(row[v]) for v in m.registers))


def run_shape(m: Ccra, q, word: Iterable) -> Tuple[Hashable, Shape]:
    """End state and shape of the path from ``q`` reading ``word``."""
    s = identity_shape(m.registers)
    for a in word:
        s = shape_concat(s, transition_shape(m, q, a))
        q = m.delta[(q, a)]
    return q, s


def path_language(m: Ccra, q, q2, level: int, accept_shape: Callable[[Shape], bool],
                  nonempty: bool = False) -> rl.Dfa:
    """Words leading from ``q`` to ``q2`` whose intermediate states are among
    the first ``level`` states of ``m`` and whose shape passes
    ``accept_shape``."""
    allowed = set(m.states[:level])
    shapes: Dict = {}

    def tshape(p, a):
        k = (p, a)
        if k not in shapes:
            shapes[k] = transition_shape(m, p, a)
        return shapes[k]

    ident = identity_shape(m.registers)

    def step(k, a):
        if k == "dead":
            return k
        if k == "start":
            p, sh = q, ident
        else:
            p, sh = k
            if p not in allowed:
                return "dead"
        return (m.delta[(p, a)], shape_concat(sh, tshape(p, a)))

    def accept(k):
        if k == "dead":
            return False
        if k == "start":
            return not nonempty and q == q2 and accept_shape(ident)
        return k[0] == q2 and accept_shape(k[1])

    return rl.minimize(rl.build_dfa(m.alphabet, "start", step, accept)[0])


def strings_with_shape(m: Ccra, q, q2, s: Shape, level: int) -> rl.Dfa:
    """Words of ``r^(level)(q, q2)`` (empty word included when q = q2) whose
    path has shape ``s``."""
    return path_language(m, q, q2, level, lambda t: t == s)


def path_shapes(m: Ccra) -> set:
    """Every shape of a path of ``m`` (from any state)."""
    seen = set()
    todo = [(q, identity_shape(m.registers)) for q in m.states]
    seen.update(todo)
    while todo:
        q, s = todo.pop()
        for a in m.alphabet:
            k = (m.delta[(q, a)], shape_concat(s, transition_shape(m, q, a)))
            if k not in seen:
                seen.add(k)
                todo.append(k)
    return {s for _, s in seen}


def shape_normalized(s: Shape) -> bool:
    return shape_is_normalized(s.rows, s.regs)


def unnormalized_path_shapes(m: Ccra) -> List[Shape]:
    """Path shapes violating the normalization conditions.  Normalized
    transitions do not always compose to normalized paths: ``x1:=x1x2,
    x2:=e`` followed by ``x2:=x2x3, x3:=e`` moves ``x3`` into ``x2``."""
    return sorted((s for s in path_shapes(m) if not shape_normalized(s)), key=str)


# ---------------------------------------------------------------------------
# Expression vectors


class ExpressionVector:
    """Per register a tuple of ``|S(v)| + 1`` expressions, all defined
    exactly on ``dom``.  Rows are built on first use."""

    def __init__(self, shape: Shape, dom: rl.Dfa, build: Callable[[str], Tuple[ex.FuncExpr, ...]],
                 sigma: Tuple[str, ...], zero):
        self.shape = shape
        self.dom = dom
        self._build = build
        self._rows: Dict[str, Tuple[ex.FuncExpr, ...]] = {}
        self.sigma = sigma
        self.zero = zero

    def row(self, v: str) -> Tuple[ex.FuncExpr, ...]:
        r = self._rows.get(v)
        if r is None:
            r = self._rows[v] = tuple(self._build(v))
            if len(r) != len(self.shape.row(v)) + 1:
                raise ExtractionError(f"row {v} has {len(r)} patches for shape {self.shape}")
        return r

    @property
    def rows(self) -> Dict[str, Tuple[ex.FuncExpr, ...]]:
        return {v: self.row(v) for v in self.shape.regs}

    def is_empty(self) -> bool:
        return self.dom.is_empty()

    def __repr__(self):
        return f"ExpressionVector({self.shape}, {len(self.dom.delta)} domain states)"


class _Consts:
    """Shares constant nodes between vectors."""

    def __init__(self, sigma, zero):
        self.sigma = sigma
        self.zero = zero
        self._cache: Dict = {}

    def __call__(self, lang, value=None) -> ex.Const:
        value = self.zero if value is None else value
        key = (id(lang), value)
        c = self._cache.get(key)
        if c is None:
            c = self._cache[key] = (ex.Const(lang, value, self.sigma), lang)
        return c[0]


_CONSTS: Dict[Tuple, _Consts] = {}


def _consts(sigma, zero) -> _Consts:
    k = (tuple(sigma), zero)
    if k not in _CONSTS:
        _CONSTS[k] = _Consts(tuple(sigma), zero)
    return _CONSTS[k]


def _sum_all(items: Sequence[ex.FuncExpr]) -> ex.FuncExpr:
    out = items[0]
    for it in items[1:]:
        out = ex.Sum(out, it)
    return out


def _choice_all(items: Sequence[ex.FuncExpr], sigma, zero) -> ex.FuncExpr:
    return ex.choice_all(list(items), sigma, zero)


def constant_vector(shape: Shape, dom: rl.Dfa, consts: Dict[str, Sequence], sigma, zero) -> ExpressionVector:
    """Vector whose components are constants on ``dom``."""
    mk = _consts(sigma, zero)
    return ExpressionVector(shape, dom, lambda v: tuple(mk(dom, c) for c in consts[v]), tuple(sigma), zero)


def epsilon_vector(regs: Sequence[str], sigma, zero) -> ExpressionVector:
    """The empty path: identity shape, every patch the identity on {e}."""
    dom = rl.dfa_epsilon(sigma)
    return constant_vector(identity_shape(regs), dom, {v: (zero, zero) for v in regs}, sigma, zero)


def ev_restrict_shift(v: ExpressionVector, mode: str, lang: rl.Dfa) -> ExpressionVector:
    """Componentwise restriction to ``lang`` (``restrict``), left shift
    (``lshift``: defined on dom . lang, value from the prefix) or right shift
    (``rshift``: defined on lang . dom, value from the suffix)."""
    mk = _consts(v.sigma, v.zero)
    c = mk(lang)
    if mode == "restrict":
        dom = rl.dfa_algebra("intersect", v.dom, lang)
        build = lambda r: tuple(ex.Sum(f, c) for f in v.row(r))
    elif mode == "lshift":
        dom = rl.unambiguous_concat_dfa(v.dom, lang)
        build = lambda r: tuple(ex.SplitSum(f, c) for f in v.row(r))
    elif mode == "rshift":
        dom = rl.unambiguous_concat_dfa(lang, v.dom)
        build = lambda r: tuple(ex.SplitSum(c, f) for f in v.row(r))
    else:
        raise ExtractionError(f"unknown mode {mode!r}")
    return ExpressionVector(v.shape, dom, build, v.sigma, v.zero)


def ev_concat(a: ExpressionVector, b: ExpressionVector) -> ExpressionVector:
    """Summary of the uniquely split concatenations of paths of ``a`` and
    ``b``: shifted rows of ``a`` are substituted into the rows of ``b``,
    reading concatenation as pointwise sum."""
    a2 = ev_restrict_shift(a, "lshift", b.dom)
    b2 = ev_restrict_shift(b, "rshift", a.dom)
    shape = shape_concat(a.shape, b.shape)

    def build(v):
        brow = b2.row(v)
        out = [brow[0]]
        for j, u in enumerate(b.shape.row(v)):
            arow = a2.row(u)
            out[-1] = ex.Sum(out[-1], arow[0])
            out.extend(arow[1:])
            out[-1] = ex.Sum(out[-1], brow[j + 1])
        return out

    dom = rl.unambiguous_concat_dfa(a.dom, b.dom)
    return ExpressionVector(shape, dom, build, a.sigma, a.zero)


def ev_choice(a: ExpressionVector, b: ExpressionVector, check: bool = True) -> ExpressionVector:
    """Componentwise choice of two vectors of one shape with disjoint domains."""
    if a.shape != b.shape:
        raise ExtractionError("choice of vectors with different shapes")
    if check and not rl.dfa_algebra("intersect", a.dom, b.dom).is_empty():
        raise ExtractionError("choice of vectors with overlapping domains")
    dom = rl.dfa_algebra("union", a.dom, b.dom)
    return ExpressionVector(a.shape, dom, lambda v: tuple(ex.Choice(x, y) for x, y in zip(a.row(v), b.row(v))),
                            a.sigma, a.zero)


def _add(table: Dict[Shape, ExpressionVector], e: ExpressionVector, check: bool = False):
    if e.is_empty():
        return
    old = table.get(e.shape)
    table[e.shape] = e if old is None else ev_choice(old, e, check)


# ---------------------------------------------------------------------------
# Base level


def build_r0(m: Ccra) -> Dict[Tuple, Dict[Shape, ExpressionVector]]:
    """Vectors for the single-letter paths: ``table[(q, q')][S]``.  The empty
    path is not stored (see the module docstring)."""
    if not is_normalized(m):
        raise ExtractionError("build_r0 needs a normalized machine")
    sigma = tuple(m.alphabet)
    zero = m.monoid.identity
    table: Dict[Tuple, Dict[Shape, ExpressionVector]] = {}
    for q in m.states:
        for a in m.alphabet:
            q2 = m.delta[(q, a)]
            row = m.update(q, a)
            s = transition_shape(m, q, a)
            dom = rl.dfa_word([a], sigma)
            consts = {v: patches(row[v], zero) for v in m.registers}
            _add(table.setdefault((q, q2), {}), constant_vector(s, dom, consts, sigma, zero))
    return table


# ---------------------------------------------------------------------------
# Loops at the pivot state


class _LoopContext:
    """Vectors for the paths ``Lambda*`` from the pivot back to itself, where
    ``Lambda`` are the first-return loops summarized by ``loops``."""

    def __init__(self, regs, loops: Dict[Shape, ExpressionVector], sigma, zero):
        self.regs = tuple(regs)
        self.loops = {s: e for s, e in loops.items() if not e.is_empty()}
        self.sigma = sigma
        self.zero = zero
        self.mk = _consts(sigma, zero)
        self.B: Dict[Shape, ExpressionVector] = {}
        self.A: Dict[frozenset, Dict[Shape, ExpressionVector]] = {}
        self._shift_cache: Dict = {}

    def shifted(self, kind: str, x: ExpressionVector, y: ExpressionVector):
        """``x`` shifted to the concatenation with ``y`` (``x`` first when
        kind is ``left``, otherwise ``y`` first)."""
        key = (kind, id(x), id(y))
        r = self._shift_cache.get(key)
        if r is None:
            r = ev_restrict_shift(x, "lshift", y.dom) if kind == "left" else ev_restrict_shift(x, "rshift", y.dom)
            self._shift_cache[key] = (r, x, y)
            return r
        return r[0]


def build_A_first(ctx: _LoopContext, supp: frozenset) -> Dict[Shape, ExpressionVector]:
    """For every shape S' with support ``supp``: the loop paths of shape S'
    none of whose proper nonempty prefixes (at pivot visits) has support
    ``supp``.  Each splits uniquely as (prefix of strictly larger support)
    followed by one first-return loop."""
    out: Dict[Shape, ExpressionVector] = {}
    for s_pre, b in ctx.B.items():
        if not s_pre.support > supp:
            continue
        for s_post, p in ctx.loops.items():
            if shape_concat(s_pre, s_post).support != supp:
                continue
            _add(out, ev_concat(b, p))
    ctx.A[supp] = out
    return out


def _side_terms(row_regs: Sequence[str], row: Sequence[ex.FuncExpr], v: str, side: str,
                reset: Callable[[str], ex.FuncExpr]) -> List[ex.FuncExpr]:
    """Terms appended before (``side='before'``) or after v in a row whose
    registers other than v were reset earlier; ``reset(u)`` gives u's
    content."""
    p = list(row_regs).index(v)
    if side == "after":
        terms = [row[p + 1]]
        for j in range(p + 1, len(row_regs)):
            terms.append(reset(row_regs[j]))
            terms.append(row[j + 1])
    else:
        terms = [row[0]]
        for j in range(p):
            terms.append(reset(row_regs[j]))
            terms.append(row[j + 1])
    return terms


def build_B_loop(ctx: _LoopContext, s: Shape) -> Optional[ExpressionVector]:
    """Vector for the loop paths of shape ``s`` (all vectors of strictly
    larger support must be built already)."""
    sigma, zero, mk = ctx.sigma, ctx.zero, ctx.mk
    if s.is_identity():
        p = ctx.loops.get(s)
        if p is None:
            return epsilon_vector(ctx.regs, sigma, zero)
        dom = rl.unambiguous_star_dfa(p.dom)
        return ExpressionVector(s, dom, lambda v: (ex.LeftIterSum(p.row(v)[0]), ex.IterSum(p.row(v)[1])),
                                sigma, zero)
    supp = s.support
    A = ctx.A[supp] if supp in ctx.A else build_A_first(ctx, supp)
    if s not in A:
        return None
    a_s = A[s]
    smaller = {t: b for t, b in ctx.B.items() if t.support > supp}
    lf = _union([x.dom for x in A.values()], sigma)
    lf_star = rl.star_dfa(lf)
    tail = _union([b.dom for b in smaller.values()], sigma)
    rest = rl.concat_dfa(lf_star, tail)
    one_block = rl.concat_dfa(lf, tail)
    dom = rl.unambiguous_concat_dfa(a_s.dom, rest)
    c_rest, c_star, c_tail, c_one, c_dom = mk(rest), mk(lf_star), mk(tail), mk(one_block), mk(dom)

    def pair_terms(first: Dict[Shape, ExpressionVector], second: Dict[Shape, ExpressionVector], v, side):
        # value added around v by a block of `second`, registers read from the
        # preceding block of `first`
        items = []
        for s1, x in first.items():
            for s2, y in second.items():
                x2 = ctx.shifted("left", x, y)
                y2 = ctx.shifted("right", y, x)
                if x2.dom.is_empty():
                    continue
                terms = _side_terms(s2.row(v), y2.row(v), v, side, lambda u: x2.row(u)[0])
                items.append(_sum_all(terms))
        return _choice_all(items, sigma, zero)

    def build(v):
        if v not in supp:
            items = []
            for s1, x in A.items():
                for s2, y in smaller.items():
                    c = ev_concat(x, y)
                    if not c.is_empty():
                        items.append(c.row(v)[0])
            f = ex.SplitSum(c_star, _choice_all(items, sigma, zero))
            return (ex.Sum(f, c_dom),)
        regs = s.row(v)
        last = len(regs)
        row = []
        for k in range(last + 1):
            if 0 < k < last:
                row.append(ex.SplitSum(a_s.row(v)[k], c_rest))
                continue
            side = "after" if k == last else "before"
            pre = ex.SplitSum(a_s.row(v)[k], c_rest)
            g = pair_terms(A, A, v, side)
            chained = ex.ChainedSum(g, lf) if side == "after" else ex.LeftChainedSum(g, lf)
            mid = ex.Choice(ex.SplitSum(chained, c_tail), c_one)
            post = ex.SplitSum(c_star, pair_terms(A, smaller, v, side))
            if side == "after":
                row.append(ex.Sum(ex.Sum(pre, mid), post))
            else:
                row.append(ex.Sum(ex.Sum(post, mid), pre))
        return row

    return ExpressionVector(s, dom, build, sigma, zero)


def _union(doms: Sequence[rl.Dfa], sigma) -> rl.Dfa:
    out = rl.dfa_empty(sigma)
    for d in doms:
        out = rl.dfa_algebra("union", out, d)
    return out


def loop_vectors(regs, loops: Dict[Shape, ExpressionVector], sigma, zero) -> Dict[Shape, ExpressionVector]:
    """Vectors for every shape of ``Lambda*`` (empty path included)."""
    ctx = _LoopContext(regs, loops, sigma, zero)
    ident = identity_shape(regs)
    ctx.B[ident] = build_B_loop(ctx, ident)
    regs = tuple(regs)
    for size in range(len(regs) - 1, -1, -1):
        for supp in combinations(regs, size):
            supp = frozenset(supp)
            A = build_A_first(ctx, supp)
            for s in list(A):
                b = build_B_loop(ctx, s)
                if b is not None and not b.is_empty():
                    ctx.B[s] = b
    return ctx.B


# ---------------------------------------------------------------------------
# Driver


def extract_tables(m: Ccra):
    """Run the level iteration; returns the table for the last level."""
    sigma = tuple(m.alphabet)
    zero = m.monoid.identity
    table = build_r0(m)
    for k in m.states:
        loops = table.get((k, k), {})
        B = loop_vectors(m.registers, loops, sigma, zero)
        new = {key: dict(val) for key, val in table.items()}
        into = [(q, s1, e) for (q, q2), vs in table.items() if q2 == k for s1, e in vs.items()]
        out_of = [(q2, s3, e) for (q, q2), vs in table.items() if q == k for s3, e in vs.items()]
        for q, s1, e1 in into:
            for s2, b in B.items():
                e12 = ev_concat(e1, b)
                if e12.is_empty():
                    continue
                for q2, s3, e3 in out_of:
                    _add(new.setdefault((q, q2), {}), ev_concat(e12, e3))
        table = new
    return table


def extract_noncommutative(m: Ccra, skip_normalize: bool = False) -> ex.FuncExpr:
    """Expression equal to ``m`` built from constants, choice, sum, split
    sums, iterated sums and chained sums."""
    viol = validate_copyless(m)
    if viol:
        raise CopylessError(viol)
    if not skip_normalize and not is_normalized(m):
        m = normalize(m)
    if not is_normalized(m):
        raise ExtractionError("the machine is not normalized")
    bad = unnormalized_path_shapes(m)
    if bad:
        raise ExtractionError(
            f"{len(bad)} path shape(s) of the normalized machine are not normalized "
            f"(e.g. {bad[0]}); the loop decomposition needs normalized path shapes")
    sigma = tuple(m.alphabet)
    zero = m.monoid.identity
    mk = _consts(sigma, zero)
    table = extract_tables(m)
    parts = []
    for qf in m.states:
        if qf not in m.accepting:
            continue
        items = dict(table.get((m.start, qf), {}))
        if qf == m.start:
            _add(items, epsilon_vector(m.registers, sigma, zero))
        for s, e in items.items():
            terms = []
            for t in m.nu[qf]:
                if isinstance(t, Reg):
                    terms.append(_sum_all(e.row(t.name)))
                else:
                    terms.append(mk(e.dom, t))
            parts.append(_sum_all(terms) if terms else mk(e.dom))
    return ex.choice_all(parts, sigma, zero)
