"""Compilation of combinator expressions to register machines.

Every expression free of compositions and chained sums compiles to a single
stage: a copyless machine that reads each input letter together with the
state of a right-to-left look-ahead automaton.  The label of position ``i``
is ``(w[i], s)`` where ``s`` summarizes the suffix after ``i``; the machine's
start state stands for the empty input, so its output is the value on the
empty word.

Compositions become cascades of stages, and chained sums are rewritten into
the marker pipeline of :func:`regcomb.expr.chained_pipeline` first.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from . import expr as ex
from . import relang as rl
from .ccra import (Cascade, Ccra, LookaheadAutomaton, Reg, Stage, UpdateExpr,
                   reversal_machine, update_expr, validate_copyless)
from .monoid import INT_MONOID, STR_MONOID, MonoidSpec


class CompileError(Exception):
    pass


DEAD = "dead"


class _Names:
    """Per-compilation counter for fresh register names."""

    def __init__(self):
        self.n = 0

    def total(self) -> str:
        self.n += 1
        return f"total{self.n}"


def _trivial_lookahead(sigma: Sequence) -> rl.Dfa:
    return rl.dfa_all(sigma)


def subst(u: UpdateExpr, row: Dict[str, UpdateExpr]) -> UpdateExpr:
    """Replace every register of ``u`` by its update in ``row``."""
    toks: list = []
    for t in u:
        if isinstance(t, Reg):
            toks.extend(row.get(t.name, (t,)))
        else:
            toks.append(t)
    return update_expr(toks)


def _materialize(labels: Sequence, start: Hashable, step: Callable, output: Callable,
                 registers: Sequence[str], monoid: MonoidSpec) -> Ccra:
    """Explore ``step(state, label) -> (state', updates)`` from ``start`` and
    number the reachable states; ``DEAD`` is absorbing and update-free."""
    index = {start: 0}
    keys = [start]
    delta: Dict = {}
    mu: Dict = {}
    todo = deque([start])
    while todo:
        k = todo.popleft()
        i = index[k]
        if k == DEAD:
            for lab in labels:
                delta[(i, lab)] = i
            continue
        for lab in labels:
            k2, upd = step(k, lab)
            j = index.get(k2)
            if j is None:
                j = index[k2] = len(keys)
                keys.append(k2)
                todo.append(k2)
            delta[(i, lab)] = j
            if upd and k2 != DEAD:
                mu[(i, lab)] = upd
    nu = {}
    for k, i in index.items():
        if k == DEAD:
            continue
        o = output(k)
        if o is not None:
            nu[i] = o
    return Ccra(tuple(range(len(keys))), tuple(labels), tuple(registers), 0,
                frozenset(nu), delta, mu, nu, monoid)


def _labels(sigma: Sequence, la: rl.Dfa) -> List[Tuple]:
    return [(a, s) for a in sigma for s in la.states]


def _monoid_for(e: ex.FuncExpr) -> MonoidSpec:
    return STR_MONOID if ex.output_kind(e) == "str" else INT_MONOID


def _reset(regs: Sequence[str]) -> Dict[str, UpdateExpr]:
    return {r: () for r in regs}


# ---------------------------------------------------------------------------
# Builders on single stages


def compile_base(lang: rl.Dfa, value, monoid: Optional[MonoidSpec] = None) -> Stage:
    """Register-free machine on the states of ``lang`` outputting ``value``."""
    d = rl.minimize(lang)
    monoid = monoid or (STR_MONOID if isinstance(value, str) else INT_MONOID)
    la = _trivial_lookahead(d.alphabet)
    labels = _labels(d.alphabet, la)
    out = update_expr([value])
    live = d.live_states()

    def step(q, lab):
        r = d.delta[q][lab[0]]
        return (r if r in live else DEAD), None

    start = d.start if d.start in live else DEAD
    m = _materialize(labels, start, step, lambda q: out if q in d.accepting else None, (), monoid)
    return Stage(m, LookaheadAutomaton(la))


def _pair_lookahead(a: rl.Dfa, b: rl.Dfa) -> Tuple[rl.Dfa, List]:
    return rl.build_dfa(a.alphabet, (a.start, b.start),
                        lambda k, x: (a.delta[k[0]][x], b.delta[k[1]][x]), lambda k: False)


def compile_product(kind: str, sf: Stage, sg: Stage) -> Stage:
    """Run both machines side by side.  ``choice`` outputs the first
    machine's value when defined, else the second's; ``sum`` outputs their
    concatenated outputs when both are defined."""
    if kind not in ("choice", "sum"):
        raise CompileError(f"unknown product kind {kind!r}")
    mf, mg = sf.machine, sg.machine
    if set(mf.registers) & set(mg.registers):
        raise CompileError("product operands must use disjoint registers")
    sigma = sf.lookahead.dfa.alphabet
    if set(sigma) != set(sg.lookahead.dfa.alphabet):
        raise CompileError("product operands have different input alphabets")
    la, keys = _pair_lookahead(sf.lookahead.dfa, sg.lookahead.dfa)
    labels = _labels(sigma, la)
    dead_f = _dead_states(mf)
    dead_g = _dead_states(mg)

    def step(k, lab):
        qf, qg = k
        a, s = lab
        sa, sb = keys[s]
        lf, lg = (a, sa), (a, sb)
        qf2 = mf.delta[(qf, lf)]
        qg2 = mg.delta[(qg, lg)]
        if kind == "sum" and (qf2 in dead_f or qg2 in dead_g):
            return DEAD, None
        if kind == "choice" and qf2 in dead_f and qg2 in dead_g:
            return DEAD, None
        upd = {}
        upd.update(mf.mu.get((qf, lf), {}))
        upd.update(mg.mu.get((qg, lg), {}))
        return (qf2, qg2), upd

    def output(k):
        qf, qg = k
        if kind == "choice":
            if qf in mf.accepting:
                return mf.nu[qf]
            if qg in mg.accepting:
                return mg.nu[qg]
            return None
        if qf in mf.accepting and qg in mg.accepting:
            return update_expr(mf.nu[qf] + mg.nu[qg])
        return None

    m = _materialize(labels, (mf.start, mg.start), step, output,
                     mf.registers + mg.registers, mf.monoid)
    return Stage(m, LookaheadAutomaton(la))


def _dead_states(m: Ccra) -> set:
    """States from which no accepting state is reachable."""
    preds: Dict = {q: set() for q in m.states}
    for (q, a), r in m.delta.items():
        preds[r].add(q)
    live = set(m.accepting)
    todo = list(live)
    while todo:
        q = todo.pop()
        for p in preds[q]:
            if p not in live:
                live.add(p)
                todo.append(p)
    return set(m.states) - live


def _combine(counts: List[Tuple[int, Optional[int]]]) -> Tuple[int, Optional[int]]:
    total = 0
    state = None
    for c, s in counts:
        if c:
            total += c
            state = s
    if total >= 2:
        return 2, None
    return total, (state if total == 1 else None)


def compile_split(kind: str, sf: Stage, sg: Stage, lf: rl.Dfa, lg: rl.Dfa,
                  names: Optional[_Names] = None) -> Stage:
    """Split sum (``right``) or left-split sum (``left``).

    The look-ahead tracks, for the suffix after the current position, the
    look-ahead state of g, membership of the suffix in dom g, and for each
    state q of dom f the number (0, 1, many) of admissible switch points if
    the prefix read so far leads dom f to q, together with the look-ahead
    state f needs for the remainder of its piece.  At the unique switch
    point the value of f is banked into a fresh register."""
    if kind not in ("right", "left"):
        raise CompileError(f"unknown split kind {kind!r}")
    names = names or _Names()
    mf, mg = sf.machine, sg.machine
    af, ag = sf.lookahead.dfa, sg.lookahead.dfa
    lf = rl.minimize(lf)
    lg = rl.minimize(lg)
    rg = rl.reverse_dfa(lg)  # reads the suffix backwards
    sigma = af.alphabet
    nf = len(lf.delta)
    acc_f = lf.accepting
    total = names.total()

    def here(q, rg_state):
        return (1, af.start) if (q in acc_f and rg_state in rg.accepting) else (0, None)

    key0 = (ag.start, rg.start, tuple(here(q, rg.start) for q in range(nf)))

    def la_step(k, a):
        sg_, r, table = k
        r2 = rg.delta[r][a]
        new = []
        for q in range(nf):
            c, s = table[lf.delta[q][a]]
            nxt = (c, af.delta[s][a] if c == 1 else None)
            new.append(_combine([here(q, r2), nxt]))
        return (ag.delta[sg_][a], r2, tuple(new))

    la, keys = rl.build_dfa(sigma, key0, la_step, lambda k: False)
    labels = _labels(sigma, la)
    f_regs = mf.registers
    dead_f = _dead_states(mf)
    dead_g = _dead_states(mg)

    def bank(out_f: UpdateExpr) -> Dict[str, UpdateExpr]:
        upd = _reset(f_regs)
        upd[total] = out_f
        return upd

    def g_step(mgs, a, s):
        lab = (a, keys[s][0])
        q2 = mg.delta[(mgs, lab)]
        if q2 in dead_g:
            return DEAD, None
        return ("g", q2), dict(mg.mu.get((mgs, lab), {}))

    def f_step(q, mfs, a, s):
        q2 = lf.delta[q][a]
        c, sf_state = keys[s][2][q2]
        if c != 1:
            return DEAD, None
        lab = (a, sf_state)
        mf2 = mf.delta[(mfs, lab)]
        if mf2 in dead_f:
            return DEAD, None
        upd = dict(mf.mu.get((mfs, lab), {}))
        if q2 in acc_f and keys[s][1] in rg.accepting:
            # the piece of f ends here: bank its output (on the updated registers)
            if mf2 not in mf.accepting:
                return DEAD, None
            banked = bank(subst(mf.nu[mf2], upd))
            return ("g", mg.start), banked
        return ("f", q2, mf2), upd

    def step(k, lab):
        a, s = lab
        if k == "init":
            whole = keys[la.delta[s][a]]
            c, _ = whole[2][lf.start]
            if c != 1:
                return DEAD, None
            if lf.start in acc_f and whole[1] in rg.accepting:
                if mf.start not in mf.accepting:
                    return DEAD, None
                pre = bank(mf.nu[mf.start])
                k2, upd = g_step(mg.start, a, s)
                if k2 == DEAD:
                    return DEAD, None
                pre.update(upd)
                return k2, pre
            return f_step(lf.start, mf.start, a, s)
        if k[0] == "f":
            return f_step(k[1], k[2], a, s)
        return g_step(k[1], a, s)

    def combine_out(vf: UpdateExpr, vg: UpdateExpr) -> UpdateExpr:
        return update_expr(vf + vg) if kind == "right" else update_expr(vg + vf)

    def output(k):
        if k == "init":
            if lf.start in acc_f and lg.start in lg.accepting and \
                    mf.start in mf.accepting and mg.start in mg.accepting:
                return combine_out(mf.nu[mf.start], mg.nu[mg.start])
            return None
        if k[0] == "g" and k[1] in mg.accepting:
            return combine_out((Reg(total),), mg.nu[k[1]])
        return None

    m = _materialize(labels, "init", step, output, f_regs + mg.registers + (total,), mf.monoid)
    return Stage(m, LookaheadAutomaton(la))


def compile_iter(kind: str, sf: Stage, lf: rl.Dfa, names: Optional[_Names] = None) -> Stage:
    """Iterated sum (``right``) or left-iterated sum (``left``).

    The look-ahead tracks the number (0, 1, many) of decompositions of the
    suffix into nonempty pieces of dom f and, for each state q of dom f, the
    weighted number of ways to finish the current piece from q, with the
    look-ahead state f needs for the rest of that piece."""
    if kind not in ("right", "left"):
        raise CompileError(f"unknown iteration kind {kind!r}")
    names = names or _Names()
    mf = sf.machine
    af = sf.lookahead.dfa
    lf = rl.minimize(lf)
    sigma = af.alphabet
    nf = len(lf.delta)
    acc_f = lf.accepting
    total = names.total()

    key0 = (1, tuple((1, af.start) if q in acc_f else (0, None) for q in range(nf)))

    def la_step(k, a):
        _, table = k
        d_here = table[lf.delta[lf.start][a]][0]
        new = []
        for q in range(nf):
            c, s = table[lf.delta[q][a]]
            nxt = (c, af.delta[s][a] if c == 1 else None)
            h = (d_here, af.start) if q in acc_f else (0, None)
            new.append(_combine([h, nxt]))
        return (d_here, tuple(new))

    la, keys = rl.build_dfa(sigma, key0, la_step, lambda k: False)
    labels = _labels(sigma, la)
    f_regs = mf.registers
    dead_f = _dead_states(mf)

    def in_step(q, mfs, a, s):
        q2 = lf.delta[q][a]
        c, sf_state = keys[s][1][q2]
        if c != 1:
            return DEAD, None
        lab = (a, sf_state)
        mf2 = mf.delta[(mfs, lab)]
        if mf2 in dead_f:
            return DEAD, None
        upd = dict(mf.mu.get((mfs, lab), {}))
        if q2 in acc_f and keys[s][0] >= 1:
            if mf2 not in mf.accepting:
                return DEAD, None
            out = subst(mf.nu[mf2], upd)
            new = _reset(f_regs)
            new[total] = update_expr((Reg(total),) + out) if kind == "right" \
                else update_expr(out + (Reg(total),))
            return "boundary", new
        return ("in", q2, mf2), upd

    def step(k, lab):
        a, s = lab
        if k == "init":
            if keys[la.delta[s][a]][0] != 1:
                return DEAD, None
            return in_step(lf.start, mf.start, a, s)
        if k == "boundary":
            return in_step(lf.start, mf.start, a, s)
        return in_step(k[1], k[2], a, s)

    def output(k):
        if k == "init":
            return ()
        if k == "boundary":
            return (Reg(total),)
        return None

    m = _materialize(labels, "init", step, output, f_regs + (total,), mf.monoid)
    return Stage(m, LookaheadAutomaton(la))


# ---------------------------------------------------------------------------
# Driver


def _is_single_stage(e: ex.FuncExpr) -> bool:
    return not ex.contains_cascade_nodes(e)


def _compile_stage(e: ex.FuncExpr, names: _Names, memo: Dict[int, Stage]) -> Stage:
    if id(e) in memo:
        return memo[id(e)]
    t = type(e)
    monoid = _monoid_for(e)
    if t is ex.Const:
        st = compile_base(e.dfa, e.value, monoid)
    elif t in (ex.Choice, ex.Sum):
        st = compile_product("choice" if t is ex.Choice else "sum",
                             _compile_stage(e.left, names, memo),
                             _compile_stage(e.right, names, memo))
    elif t in (ex.SplitSum, ex.LeftSplitSum):
        st = compile_split("right" if t is ex.SplitSum else "left",
                           _compile_stage(e.left, names, memo),
                           _compile_stage(e.right, names, memo),
                           e.left.domain, e.right.domain, names)
    elif t in (ex.IterSum, ex.LeftIterSum):
        st = compile_iter("right" if t is ex.IterSum else "left",
                          _compile_stage(e.body, names, memo), e.body.domain, names)
    elif t is ex.Reverse:
        st = _compile_stage(ex.push_reverse(e), names, memo)
    else:
        raise CompileError(f"{t.__name__} cannot be compiled inside a single stage")
    memo[id(e)] = st
    return st


def _fresh_copy(st: Stage, names: _Names) -> Stage:
    """The same stage with registers renamed apart (for shared subterms)."""
    ren = {r: names.total() for r in st.machine.registers}
    m = st.machine

    def rn(u):
        return tuple(Reg(ren[t.name]) if isinstance(t, Reg) else t for t in u)

    mu = {k: {ren[v]: rn(u) for v, u in row.items()} for k, row in m.mu.items()}
    nu = {q: rn(u) for q, u in m.nu.items()}
    m2 = Ccra(m.states, m.alphabet, tuple(ren[r] for r in m.registers), m.start, m.accepting,
              m.delta, mu, nu, m.monoid)
    return Stage(m2, st.lookahead)


class _RenamingMemo(dict):
    """Memo that hands out register-disjoint copies on repeated use."""

    def __init__(self, names: _Names):
        super().__init__()
        self.names = names

    def __getitem__(self, k):
        st = dict.__getitem__(self, k)
        if st.machine.registers:
            return _fresh_copy(st, self.names)
        return st


def compile_chained(kind: str, e: ex.FuncExpr) -> Cascade:
    """Chained sums run as the marker pipeline (four stages)."""
    if kind == "left" and not isinstance(e, ex.LeftChainedSum) or \
            kind == "right" and not isinstance(e, ex.ChainedSum):
        raise CompileError("compile_chained: kind does not match the expression")
    return compile(ex.chained_pipeline(e))


def compile(e: ex.FuncExpr) -> Cascade:
    """Compile an expression to a cascade of look-ahead machines."""
    names = _Names()
    return Cascade(_compile_cascade(e, names))


def _compile_cascade(e: ex.FuncExpr, names: _Names) -> List[Stage]:
    t = type(e)
    if _is_single_stage(e):
        return [_compile_stage(e, names, _RenamingMemo(names))]
    if t is ex.Compose:
        return _compile_cascade(e.inner, names) + _compile_cascade(e.outer, names)
    if t in (ex.ChainedSum, ex.LeftChainedSum):
        return _compile_cascade(ex.chained_pipeline(e), names)
    if t is ex.Reverse:
        return [Stage(reversal_machine(e.alphabet))] + _compile_cascade(e.body, names)
    raise CompileError(
        f"{t.__name__} over a composition or chained sum cannot be compiled: "
        "compositions and chained sums are supported only at the top of the expression "
        "(possibly below other compositions, reversals and chained sums)")


def check_copyless(c: Cascade) -> List:
    out = []
    for st in c.stages:
        out.extend(validate_copyless(st.machine))
    return out


# ---------------------------------------------------------------------------
# Serialization


def dfa_to_dict(d: rl.Dfa) -> dict:
    return {"alphabet": list(d.alphabet), "start": d.start,
            "accepting": sorted(d.accepting),
            "delta": [{a: row[a] for a in d.alphabet} for row in d.delta]}


def dfa_from_dict(obj: dict) -> rl.Dfa:
    alphabet = tuple(obj["alphabet"])
    delta = tuple({a: int(row[a]) for a in alphabet} for row in obj["delta"])
    return rl.Dfa(alphabet, delta, int(obj["start"]), frozenset(obj["accepting"]))


def cascade_to_dict(c: Cascade) -> dict:
    from .ccra import machine_to_dict

    return {"kind": "cascade", "stages": [
        {"machine": machine_to_dict(st.machine),
         "lookahead": None if st.lookahead is None else dfa_to_dict(st.lookahead.dfa)}
        for st in c.stages]}


def cascade_to_json(c: Cascade, indent: Optional[int] = 1) -> str:
    import json

    return json.dumps(cascade_to_dict(c), indent=indent)


def load_cascade(obj) -> Cascade:
    """Inverse of :func:`cascade_to_dict` (accepts a dict or JSON text)."""
    import json

    from .ccra import load_machine

    if isinstance(obj, str):
        obj = json.loads(obj)
    stages = []
    for st in obj["stages"]:
        la = st.get("lookahead")
        stages.append(Stage(load_machine(st["machine"], kind="ccra"),
                            None if la is None else LookaheadAutomaton(dfa_from_dict(la))))
    return Cascade(stages)


def cascade_to_dot(c: Cascade) -> str:
    """One DOT graph per stage (machine) plus its look-ahead DFA."""
    from .ccra import machine_to_dot

    parts = []
    for i, st in enumerate(c.stages):
        parts.append(machine_to_dot(st.machine, name=f"stage{i}"))
        if st.lookahead is not None:
            parts.append(rl.dfa_to_dot(st.lookahead.dfa, name=f"stage{i}_lookahead"))
    return "".join(parts)
