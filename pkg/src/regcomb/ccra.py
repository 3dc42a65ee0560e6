"""Register machines: copyless cost register automata (CCRA, including
streaming string transducers), additive cost register automata (ACRA),
regular look-ahead and cascades."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import relang as rl
from .monoid import BOT, INT_MONOID, MonoidError, MonoidSpec, STR_MONOID, mplus


class MachineError(Exception):
    pass


class CopylessError(MachineError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class Reg:
    """A register occurrence inside an update expression."""

    name: str

    def __repr__(self):
        return self.name


Token = Union[Reg, str, int]
UpdateExpr = Tuple[Token, ...]


def update_expr(tokens: Iterable[Token], identity=None) -> UpdateExpr:
    """Canonical form: adjacent constants merged, identity constants dropped."""
    out: List[Token] = []
    for t in tokens:
        if isinstance(t, Reg):
            out.append(t)
            continue
        if t is BOT:
            raise MachineError("update constants cannot be bottom")
        if t == "" or (identity is not None and t == identity) or (t == 0 and not isinstance(t, str)):
            continue
        if out and not isinstance(out[-1], Reg):
            out[-1] = mplus(out[-1], t)
        else:
            out.append(t)
    return tuple(out)


def regs_of(u: UpdateExpr) -> Tuple[str, ...]:
    return tuple(t.name for t in u if isinstance(t, Reg))


def patches(u: UpdateExpr, identity) -> Tuple:
    """The constants between registers: ``len(regs_of(u)) + 1`` entries."""
    out = [identity]
    for t in u:
        if isinstance(t, Reg):
            out.append(identity)
        else:
            out[-1] = mplus(out[-1], t)
    return tuple(out)


def from_patches(regs: Sequence[str], consts: Sequence) -> UpdateExpr:
    toks: List[Token] = [consts[0]]
    for r, c in zip(regs, consts[1:]):
        toks.append(Reg(r))
        toks.append(c)
    return update_expr(toks)


def eval_update(u: UpdateExpr, val: Mapping[str, object], identity):
    acc = identity
    for t in u:
        acc = mplus(acc, val[t.name] if isinstance(t, Reg) else t)
    return acc


def update_text(u: UpdateExpr) -> str:
    if not u:
        return "ε"
    parts = []
    for t in u:
        parts.append(t.name if isinstance(t, Reg) else json.dumps(t) if isinstance(t, str) else str(t))
    return " ".join(parts)


@dataclass(frozen=True)
class Violation:
    """A copyless violation.  ``kind`` is ``repeated_in_rhs`` (a register
    occurs twice in one right-hand side), ``shared_source`` (a register
    occurs in the right-hand sides of two registers) or ``repeated_in_output``."""

    kind: str
    register: str
    state: Hashable
    symbol: Optional[Hashable] = None

    def __str__(self):
        where = f"state {self.state!r}" + (f", symbol {self.symbol!r}" if self.symbol is not None else "")
        return f"{self.kind}: register {self.register} ({where})"


@dataclass(eq=False)
class Ccra:
    """Deterministic copyless cost register automaton.

    ``mu[(q, a)]`` maps every register to its update expression; ``nu[q]`` is
    the output expression of an accepting state.  States are listed in a
    fixed order which later algorithms use as the elimination order.
    """

    states: Tuple
    alphabet: Tuple
    registers: Tuple[str, ...]
    start: Hashable
    accepting: frozenset
    delta: Dict[Tuple[Hashable, Hashable], Hashable]
    mu: Dict[Tuple[Hashable, Hashable], Dict[str, UpdateExpr]]
    nu: Dict[Hashable, UpdateExpr]
    monoid: MonoidSpec = STR_MONOID

    def __post_init__(self):
        self.states = tuple(self.states)
        self.alphabet = tuple(self.alphabet)
        self.registers = tuple(self.registers)
        self.accepting = frozenset(self.accepting)
        if self.start not in set(self.states):
            raise MachineError(f"start state {self.start!r} is not a state")
        if not self.accepting <= set(self.states):
            raise MachineError("accepting states must be states")
        for q in self.accepting:
            if q not in self.nu:
                raise MachineError(f"accepting state {q!r} has no output")
        regs = set(self.registers)
        for key, row in self.mu.items():
            for v, u in row.items():
                if v not in regs or not set(regs_of(u)) <= regs:
                    raise MachineError(f"unknown register in update at {key!r}")
        for q, u in self.nu.items():
            if not set(regs_of(u)) <= regs:
                raise MachineError(f"unknown register in output of {q!r}")

    @property
    def identity(self):
        return self.monoid.identity

    def update(self, q, a) -> Dict[str, UpdateExpr]:
        row = self.mu.get((q, a), {})
        return {v: row.get(v, (Reg(v),)) for v in self.registers}

    def is_total(self) -> bool:
        return all((q, a) in self.delta for q in self.states for a in self.alphabet)

    def state_index(self) -> Dict[Hashable, int]:
        return {q: i for i, q in enumerate(self.states)}

    def run(self, word: Iterable) -> Optional["Configuration"]:
        q = self.start
        ident = self.identity
        val = {v: ident for v in self.registers}
        for a in word:
            key = (q, a)
            if key not in self.delta:
                if a not in self.alphabet:
                    raise MachineError(f"symbol {a!r} not in the machine alphabet")
                return None
            row = self.mu.get(key, {})
            new = {}
            for v in self.registers:
                u = row.get(v)
                new[v] = val[v] if u is None else eval_update(u, val, ident)
            val = new
            q = self.delta[key]
        return Configuration(q, val)

    def __repr__(self):
        return (f"Ccra(states={len(self.states)}, alphabet={len(self.alphabet)}, "
                f"registers={list(self.registers)})")


@dataclass
class Configuration:
    state: Hashable
    valuation: Dict[str, object]


def eval_ccra(m: Ccra, word: Iterable):
    conf = m.run(word)
    if conf is None or conf.state not in m.accepting:
        return BOT
    return eval_update(m.nu[conf.state], conf.valuation, m.identity)


def validate_copyless(m: Ccra) -> List[Violation]:
    out: List[Violation] = []
    for q in m.states:
        for a in m.alphabet:
            if (q, a) not in m.delta:
                continue
            row = m.update(q, a)
            owner: Dict[str, str] = {}
            for v in m.registers:
                seen = set()
                for r in regs_of(row[v]):
                    if r in seen:
                        out.append(Violation("repeated_in_rhs", r, q, a))
                        continue
                    seen.add(r)
                    if r in owner and owner[r] != v:
                        out.append(Violation("shared_source", r, q, a))
                    owner.setdefault(r, v)
    for q in sorted(m.accepting, key=m.states.index):
        seen = set()
        for r in regs_of(m.nu[q]):
            if r in seen:
                out.append(Violation("repeated_in_output", r, q))
            seen.add(r)
    return out


# ---------------------------------------------------------------------------
# ACRA


@dataclass(eq=False)
class Acra:
    """Additive cost register automaton: every update is ``v := u + d`` and
    every output is ``u + d``."""

    states: Tuple
    alphabet: Tuple
    registers: Tuple[str, ...]
    start: Hashable
    accepting: frozenset
    delta: Dict[Tuple[Hashable, Hashable], Hashable]
    mu: Dict[Tuple[Hashable, Hashable], Dict[str, Tuple[str, object]]]
    nu: Dict[Hashable, Tuple[str, object]]
    monoid: MonoidSpec = INT_MONOID

    def __post_init__(self):
        self.states = tuple(self.states)
        self.alphabet = tuple(self.alphabet)
        self.registers = tuple(self.registers)
        self.accepting = frozenset(self.accepting)
        for q in self.accepting:
            if q not in self.nu:
                raise MachineError(f"accepting state {q!r} has no output")

    @property
    def identity(self):
        return self.monoid.identity

    def update(self, q, a) -> Dict[str, Tuple[str, object]]:
        row = self.mu.get((q, a), {})
        return {v: row.get(v, (v, self.identity)) for v in self.registers}

    def is_total(self) -> bool:
        return all((q, a) in self.delta for q in self.states for a in self.alphabet)


def eval_acra(m: Acra, word: Iterable):
    q = m.start
    val = {v: m.identity for v in m.registers}
    for a in word:
        if (q, a) not in m.delta:
            if a not in m.alphabet:
                raise MachineError(f"symbol {a!r} not in the machine alphabet")
            return BOT
        row = m.update(q, a)
        val = {v: mplus(val[u], d) for v, (u, d) in row.items()}
        q = m.delta[(q, a)]
    if q not in m.accepting:
        return BOT
    u, d = m.nu[q]
    return mplus(val[u], d)


def acra_as_ccra(m: Acra) -> Ccra:
    """View an ACRA as a register machine (it may violate copylessness)."""
    mu = {k: {v: update_expr([Reg(u), d]) for v, (u, d) in m.update(*k).items()} for k in m.delta}
    nu = {q: update_expr([Reg(u), d]) for q, (u, d) in m.nu.items()}
    return Ccra(m.states, m.alphabet, m.registers, m.start, m.accepting, dict(m.delta), mu, nu, m.monoid)


# ---------------------------------------------------------------------------
# Look-ahead


@dataclass(eq=False)
class LookaheadAutomaton:
    """A DFA that reads the input from right to left.  The label of position
    ``i`` is the pair ``(w[i], state after reading w[i+1:] reversed)``."""

    dfa: rl.Dfa

    def labelling(self, word: Sequence) -> List[int]:
        """States ``s_0 .. s_n`` where ``s_i`` summarizes the suffix ``w[i:]``."""
        d = self.dfa
        states = [d.start] * (len(word) + 1)
        q = d.start
        for i in range(len(word) - 1, -1, -1):
            q = d.delta[q][word[i]]
            states[i] = q
        return states

    def labels(self, word: Sequence) -> List[Tuple]:
        s = self.labelling(word)
        return [(word[i], s[i + 1]) for i in range(len(word))]

    @property
    def label_alphabet(self) -> Tuple:
        return tuple((a, s) for a in self.dfa.alphabet for s in self.dfa.states)


def eval_with_lookahead(m: Ccra, la: LookaheadAutomaton, word: Sequence):
    """Two passes: label the input right to left, then run ``m`` on the labels."""
    return eval_ccra(m, la.labels(word))


@dataclass(eq=False)
class Stage:
    machine: Ccra
    lookahead: Optional[LookaheadAutomaton] = None

    @property
    def input_alphabet(self) -> Tuple:
        if self.lookahead is None:
            return self.machine.alphabet
        return self.lookahead.dfa.alphabet

    def __call__(self, word: Sequence):
        if self.lookahead is None:
            return eval_ccra(self.machine, word)
        return eval_with_lookahead(self.machine, self.lookahead, word)


@dataclass(eq=False)
class Cascade:
    """A pipeline of stages; every stage but the last produces a string over
    the next stage's input alphabet."""

    stages: List[Stage] = field(default_factory=list)

    def __post_init__(self):
        if not self.stages:
            raise MachineError("a cascade needs at least one stage")
        for st in self.stages[:-1]:
            if st.machine.monoid.kind != "str":
                raise MachineError("inner cascade stages must produce strings")

    @property
    def input_alphabet(self):
        return self.stages[0].input_alphabet

    def __call__(self, word):
        return eval_cascade(self, word)


def eval_cascade(c: Cascade, word):
    v = word
    for st in c.stages:
        bad = set(v) - set(st.input_alphabet)
        if bad:
            raise MachineError(f"symbols {sorted(map(str, bad))} not accepted by a cascade stage")
        v = st(v)
        if v is BOT:
            return BOT
    return v


def reversal_machine(alphabet: Sequence[str]) -> Ccra:
    """One state, one register: ``x := a x`` on every letter."""
    alphabet = tuple(alphabet)
    mu = {("q", a): {"x": (a, Reg("x"))} for a in alphabet}
    delta = {("q", a): "q" for a in alphabet}
    return Ccra(("q",), alphabet, ("x",), "q", {"q"}, delta, mu, {"q": (Reg("x"),)},
                STR_MONOID)


def identity_machine(alphabet: Sequence[str]) -> Ccra:
    alphabet = tuple(alphabet)
    mu = {("q", a): {"x": (Reg("x"), a)} for a in alphabet}
    delta = {("q", a): "q" for a in alphabet}
    return Ccra(("q",), alphabet, ("x",), "q", {"q"}, delta, mu, {"q": (Reg("x"),)},
                STR_MONOID)


# ---------------------------------------------------------------------------
# Shapes of single transitions and normalization


def transition_shape(m: Ccra, q, a) -> Tuple[Tuple[str, ...], ...]:
    row = m.update(q, a)
    return tuple(regs_of(row[v]) for v in m.registers)


def shape_is_normalized(rows: Sequence[Sequence[str]], order: Sequence[str]) -> bool:
    """Normalization conditions for a shape given as rows aligned with
    ``order``: every source of ``u`` is at or above ``u``; a register with any
    source has itself as a source; every register is used somewhere."""
    pos = {v: i for i, v in enumerate(order)}
    used = set()
    for u, row in zip(order, rows):
        for v in row:
            if pos[v] < pos[u]:
                return False
            used.add(v)
        if row and u not in row:
            return False
    return used == set(order)


def is_normalized(m: Ccra, order: Optional[Sequence[str]] = None) -> bool:
    order = tuple(order) if order is not None else m.registers
    if set(order) != set(m.registers):
        raise MachineError("order must list every register")
    idx = [m.registers.index(v) for v in order]
    for (q, a) in m.delta:
        rows = transition_shape(m, q, a)
        if not shape_is_normalized([rows[i] for i in idx], order):
            return False
    return True


def normalize(m: Ccra, names: Optional[Sequence[str]] = None) -> Ccra:
    """Equivalent machine whose transitions all have normalized shapes.

    Registers are renamed along the run: a state of the result is a pair of
    an original state and a renaming of the original registers onto
    ``x1..xn``.  A register receives the smallest name among its sources (or
    the smallest free name if it has none), and the sink ``x0`` absorbs every
    value that would otherwise be dropped."""
    viol = validate_copyless(m)
    if viol:
        raise CopylessError(viol)
    n = len(m.registers)
    names = list(names) if names is not None else [f"x{i}" for i in range(n + 1)]
    if len(names) != n + 1 or len(set(names)) != n + 1:
        raise MachineError(f"normalize needs {n + 1} distinct register names")
    sink = names[0]
    regs = m.registers
    f0 = tuple(range(1, n + 1))  # f0[i] = index of the name of regs[i]

    start = (m.start, f0)
    states = [start]
    seen = {start}
    delta: Dict = {}
    mu: Dict = {}
    todo = [start]
    while todo:
        st = todo.pop(0)
        q, f = st
        name_of = {v: names[f[i]] for i, v in enumerate(regs)}
        for a in m.alphabet:
            if (q, a) not in m.delta:
                continue
            row = m.update(q, a)
            new_idx = [None] * n
            used_idx = set()
            for i, v in enumerate(regs):
                srcs = regs_of(row[v])
                if srcs:
                    new_idx[i] = min(f[regs.index(u)] for u in srcs)
                    used_idx.add(new_idx[i])
            free = iter(sorted(set(range(1, n + 1)) - used_idx))
            for i in range(n):
                if new_idx[i] is None:
                    new_idx[i] = next(free)
            f2 = tuple(new_idx)
            upd: Dict[str, UpdateExpr] = {}
            for i, v in enumerate(regs):
                upd[names[f2[i]]] = tuple(Reg(name_of[t.name]) if isinstance(t, Reg) else t
                                          for t in row[v])
            used = {u for v in regs for u in regs_of(row[v])}
            lost = [name_of[u] for u in regs if u not in used]
            upd[sink] = update_expr([Reg(sink)] + [Reg(x) for x in sorted(lost, key=names.index)])
            st2 = (m.delta[(q, a)], f2)
            delta[(st, a)] = st2
            mu[(st, a)] = upd
            if st2 not in seen:
                seen.add(st2)
                states.append(st2)
                todo.append(st2)
    nu = {}
    acc = set()
    for st in states:
        q, f = st
        if q in m.accepting:
            name_of = {v: names[f[i]] for i, v in enumerate(regs)}
            nu[st] = tuple(Reg(name_of[t.name]) if isinstance(t, Reg) else t for t in m.nu[q])
            acc.add(st)
    return Ccra(tuple(states), m.alphabet, tuple(names), start, frozenset(acc), delta, mu, nu, m.monoid)


def relabel_states(m: Ccra, prefix: str = "q") -> Ccra:
    """Same machine with states renamed ``q0, q1, ...`` in their order."""
    ren = {q: f"{prefix}{i}" for i, q in enumerate(m.states)}
    return Ccra(tuple(ren[q] for q in m.states), m.alphabet, m.registers, ren[m.start],
                frozenset(ren[q] for q in m.accepting),
                {(ren[q], a): ren[r] for (q, a), r in m.delta.items()},
                {(ren[q], a): row for (q, a), row in m.mu.items()},
                {ren[q]: u for q, u in m.nu.items()}, m.monoid)


# ---------------------------------------------------------------------------
# JSON and DOT


def _sym_to_json(a):
    if isinstance(a, tuple):
        return [_sym_to_json(x) for x in a]
    return a


def _sym_from_json(a):
    if isinstance(a, list):
        return tuple(_sym_from_json(x) for x in a)
    return a


def _rhs_to_json(u) -> List[dict]:
    return [{"reg": t.name} if isinstance(t, Reg) else {"const": t} for t in u]


def _rhs_from_json(items, where) -> List[Token]:
    out: List[Token] = []
    for tok in items:
        if not isinstance(tok, dict) or len(tok) != 1:
            raise MachineError(f"bad rhs token {tok!r} in {where}")
        if "reg" in tok:
            out.append(Reg(str(tok["reg"])))
        elif "const" in tok:
            c = tok["const"]
            if isinstance(c, bool) or not isinstance(c, (str, int)):
                raise MachineError(f"bad constant {c!r} in {where}")
            out.append(c)
        else:
            raise MachineError(f"bad rhs token {tok!r} in {where}")
    return out


def machine_to_dict(m: Union[Ccra, Acra], name_states: bool = True) -> dict:
    if all(isinstance(q, str) for q in m.states) or not name_states:
        ren = {q: q for q in m.states}
    else:
        ren = {q: f"q{i}" for i, q in enumerate(m.states)}
    out = {
        "kind": "acra" if isinstance(m, Acra) else "ccra",
        "monoid": m.monoid.kind,
        "states": [ren[q] for q in m.states],
        "alphabet": [_sym_to_json(a) for a in m.alphabet],
        "registers": list(m.registers),
        "start": ren[m.start],
        "accepting": [ren[q] for q in m.states if q in m.accepting],
        "delta": [{"from": ren[q], "symbol": _sym_to_json(a), "to": ren[m.delta[(q, a)]]}
                  for q in m.states for a in m.alphabet if (q, a) in m.delta],
        "mu": [],
        "nu": [],
    }
    for q in m.states:
        for a in m.alphabet:
            if (q, a) not in m.delta:
                continue
            row = m.mu.get((q, a), {})
            for v in m.registers:
                if v not in row:
                    continue
                u = row[v]
                if isinstance(m, Acra):
                    rhs = _rhs_to_json(update_expr([Reg(u[0]), u[1]]))
                else:
                    if u == (Reg(v),):
                        continue
                    rhs = _rhs_to_json(u)
                out["mu"].append({"state": ren[q], "symbol": _sym_to_json(a), "register": v, "rhs": rhs})
    for q in m.states:
        if q in m.accepting:
            u = m.nu[q]
            if isinstance(m, Acra):
                u = update_expr([Reg(u[0]), u[1]])
            out["nu"].append({"state": ren[q], "rhs": _rhs_to_json(u)})
    return out


def machine_to_json(m, indent: int = 1) -> str:
    return json.dumps(machine_to_dict(m), indent=indent, ensure_ascii=False)


def load_machine(text_or_dict, kind: Optional[str] = None, check: bool = True):
    """Load a machine from the JSON format.  Transitions must be total; a CCRA
    must be copyless.  ``kind`` (``ccra``/``acra``) overrides the file's
    ``kind`` field."""
    d = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    for k in ("states", "alphabet", "registers", "start", "accepting", "delta", "mu", "nu"):
        if k not in d:
            raise MachineError(f"machine description lacks field {k!r}")
    kind = kind or d.get("kind", "ccra")
    states = tuple(d["states"])
    alphabet = tuple(_sym_from_json(a) for a in d["alphabet"])
    regs = tuple(d["registers"])
    sset, aset, rset = set(states), set(alphabet), set(regs)
    delta = {}
    for t in d["delta"]:
        q, a, r = t["from"], _sym_from_json(t["symbol"]), t["to"]
        if q not in sset or r not in sset or a not in aset:
            raise MachineError(f"bad transition {t!r}")
        if (q, a) in delta:
            raise MachineError(f"nondeterministic transition on ({q!r}, {a!r})")
        delta[(q, a)] = r
    if check:
        missing = [(q, a) for q in states for a in alphabet if (q, a) not in delta]
        if missing:
            raise MachineError(f"transition function is not total, e.g. missing {missing[0]!r}")
    consts = []
    mu_raw: Dict = {}
    for item in d["mu"]:
        q, a, v = item["state"], _sym_from_json(item["symbol"]), item["register"]
        if (q, a) not in delta:
            raise MachineError(f"update on missing transition ({q!r}, {a!r})")
        if v not in rset:
            raise MachineError(f"unknown register {v!r}")
        toks = _rhs_from_json(item["rhs"], f"update of {v} at ({q}, {a})")
        consts += [t for t in toks if not isinstance(t, Reg)]
        mu_raw.setdefault((q, a), {})[v] = toks
    nu_raw = {}
    for item in d["nu"]:
        toks = _rhs_from_json(item["rhs"], f"output of {item['state']}")
        consts += [t for t in toks if not isinstance(t, Reg)]
        nu_raw[item["state"]] = toks
    mkind = d.get("monoid")
    if mkind is None:
        kinds = {("str" if isinstance(c, str) else "int") for c in consts}
        if len(kinds) > 1:
            raise MonoidError("machine mixes string and integer constants")
        mkind = kinds.pop() if kinds else ("int" if kind == "acra" else "str")
    monoid = STR_MONOID if mkind == "str" else INT_MONOID
    for c in consts:
        if monoid.kind != ("str" if isinstance(c, str) else "int"):
            raise MonoidError(f"constant {c!r} does not belong to the {mkind} monoid")
    accepting = frozenset(d["accepting"])
    if not accepting <= sset or d["start"] not in sset:
        raise MachineError("start/accepting states must be listed in states")
    if kind == "acra":
        def one(toks, where):
            regs_ = [t for t in toks if isinstance(t, Reg)]
            cs = [t for t in toks if not isinstance(t, Reg)]
            if len(regs_) != 1:
                raise MachineError(f"ACRA update {where} must name exactly one register")
            return regs_[0].name, monoid.sum(cs)

        mu = {k: {v: one(t, f"{v} at {k}") for v, t in row.items()} for k, row in mu_raw.items()}
        nu = {q: one(t, f"output at {q}") for q, t in nu_raw.items()}
        return Acra(states, alphabet, regs, d["start"], accepting, delta, mu, nu, monoid)
    mu = {k: {v: update_expr(t) for v, t in row.items()} for k, row in mu_raw.items()}
    nu = {q: update_expr(t) for q, t in nu_raw.items()}
    m = Ccra(states, alphabet, regs, d["start"], accepting, delta, mu, nu, monoid)
    if check:
        viol = validate_copyless(m)
        if viol:
            raise CopylessError(viol)
    return m


def machine_to_dot(m: Union[Ccra, Acra], name: str = "machine") -> str:
    idx = {q: i for i, q in enumerate(m.states)}
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  __start [shape=point];"]
    for q in m.states:
        shape = "doublecircle" if q in m.accepting else "circle"
        label = str(q).replace('"', '\\"')
        if q in m.accepting:
            out = m.nu[q]
            out = update_text(update_expr([Reg(out[0]), out[1]])) if isinstance(m, Acra) else update_text(out)
            label += "\\nout: " + out.replace('"', '\\"')
        lines.append(f'  {idx[q]} [shape={shape}, label="{label}"];')
    lines.append(f"  __start -> {idx[m.start]};")
    for q in m.states:
        for a in m.alphabet:
            if (q, a) not in m.delta:
                continue
            parts = []
            for v, u in m.update(q, a).items():
                if isinstance(m, Acra):
                    if u != (v, m.identity):
                        parts.append(f"{v}:={update_text(update_expr([Reg(u[0]), u[1]]))}")
                elif u != (Reg(v),):
                    parts.append(f"{v}:={update_text(u)}")
            lab = str(a) + ("\\n" + "\\n".join(parts) if parts else "")
            lab = lab.replace('"', '\\"')
            lines.append(f'  {idx[q]} -> {idx[m.delta[(q, a)]]} [label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
