"""Reference implementations used as test oracles.

Everything here is written directly from the informal meaning of the corpus
entries or by brute-force enumeration, without going through the library's
evaluator, so agreement is evidence and not tautology."""

import itertools
import random
import re

from regcomb import relang as rl
from regcomb.ccra import Ccra, Reg, update_expr
from regcomb.monoid import BOT, STR_MONOID

# ---------------------------------------------------------------------------
# Corpus expressions, by hand


def ref_id(w):
    return w


def ref_copy(w):
    return w + w


def ref_reverse(w):
    return w[::-1]


def ref_count_a(w):
    return w.count("a")


def ref_indicator(w):
    return 1 if re.fullmatch("a*b", w) else 0


def ref_coffee(w):
    total = 0
    for month in w.split("#"):
        total += month.count("C") * (1 if "S" in month else 2)
    return total


def ref_swap(w):
    if w.count("#") != 1:
        return BOT
    u, v = w.split("#")
    return v + "#" + u


def ref_strip(w):
    if "#" not in w:
        return BOT
    return w[: w.rindex("#")]


def ref_shuffle(w):
    if not w.endswith("b"):
        return BOT
    m = [len(block) for block in w.split("b")[:-1]]
    if len(m) < 2:
        return BOT
    return "".join("a" * m[i + 1] + "b" * m[i] for i in range(len(m) - 1))


def ref_flow(w):
    # x counts a's since the last e plus the value of y at that e
    x = y = 0
    for c in w:
        if c == "a":
            x, y = x + 1, y + 1
        elif c == "b":
            y += 1
        else:
            x, y = y + 1, y + 1
    return x


def ref_two_state(w):
    """Hand simulation of the two_state machine."""
    x, y, q = "", "", "p"
    for c in w:
        if q == "p" and c == "a":
            x, y = x + "a", "b" + y
        elif q == "p":
            x, y, q = x + y, "", "r"
        elif c == "a":
            x, y = "a" + x, y + "b"
        else:
            q = "p"
    return x if q == "p" else x + y


def ref_crossing(w):
    x = y = ""
    for c in w:
        if c == "a":
            x, y = y + "a", x
        else:
            x, y = x + "b", "b" + y
    return x + "#" + y


REFERENCE = {
    "id": ref_id, "copy": ref_copy, "reverse": ref_reverse, "reverse_of_id": ref_reverse,
    "count_a": ref_count_a, "indicator": ref_indicator, "coffee": ref_coffee,
    "swap": ref_swap, "strip": ref_strip, "shuffle": ref_shuffle, "shuffle_pipeline": ref_shuffle,
}

MACHINE_REFERENCE = {
    "shuffle_sst": ref_shuffle, "coffee_acra": ref_coffee, "flow_acra": ref_flow,
    "echo": ref_id, "two_state": ref_two_state, "crossing": ref_crossing,
}


def words(alphabet, max_len):
    return rl.all_strings(alphabet, max_len)


# ---------------------------------------------------------------------------
# Brute-force combinator semantics: enumerate every split


def _splits(w, parts):
    """All ways to cut ``w`` into ``parts`` (possibly empty) pieces."""
    for cuts in itertools.combinations_with_replacement(range(len(w) + 1), parts - 1):
        bounds = (0,) + cuts + (len(w),)
        yield [w[bounds[i]:bounds[i + 1]] for i in range(parts)]


def _nonempty_factorizations(w):
    if not w:
        yield []
        return
    for i in range(1, len(w) + 1):
        for rest in _nonempty_factorizations(w[i:]):
            yield [w[:i]] + rest


def _add(a, b):
    if a is BOT or b is BOT:
        return BOT
    return a + b


def brute(e, w):
    """Value of an expression by exhaustive search over splittings."""
    from regcomb import expr as ex

    t = type(e)
    if t is ex.Const:
        return e.value if e.dfa.accepts(w) else BOT
    if t is ex.Choice:
        a = brute(e.left, w)
        return a if a is not BOT else brute(e.right, w)
    if t is ex.Sum:
        return _add(brute(e.left, w), brute(e.right, w))
    if t in (ex.SplitSum, ex.LeftSplitSum):
        found = []
        for u, v in _splits(w, 2):
            a, b = brute(e.left, u), brute(e.right, v)
            if a is not BOT and b is not BOT:
                found.append((a, b))
        if len(found) != 1:
            return BOT
        a, b = found[0]
        return a + b if t is ex.SplitSum else b + a
    if t in (ex.IterSum, ex.LeftIterSum):
        found = []
        for pieces in _nonempty_factorizations(w):
            vals = [brute(e.body, p) for p in pieces]
            if all(v is not BOT for v in vals):
                found.append(vals)
        if len(found) != 1:
            return BOT
        vals = found[0] if t is ex.IterSum else found[0][::-1]
        total = ex.zero_of(e)
        for v in vals:
            total = total + v
        return total
    if t in (ex.ChainedSum, ex.LeftChainedSum):
        lang = e.lang_dfa
        found = [p for p in _nonempty_factorizations(w) if all(lang.accepts(x) for x in p)]
        if len(found) != 1 or len(found[0]) < 2:
            return BOT
        p = found[0]
        vals = [brute(e.body, p[i] + p[i + 1]) for i in range(len(p) - 1)]
        if any(v is BOT for v in vals):
            return BOT
        if t is ex.LeftChainedSum:
            vals = vals[::-1]
        total = ex.zero_of(e)
        for v in vals:
            total = total + v
        return total
    if t is ex.Reverse:
        return brute(e.body, w[::-1])
    if t is ex.Compose:
        mid = brute(e.inner, w)
        return BOT if mid is BOT else brute(e.outer, mid)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Random machines


def random_copyless(rng: random.Random, n_states: int, n_regs: int, sigma="ab", consts="cd") -> Ccra:
    """A random total copyless string machine."""
    regs = [f"r{i}" for i in range(n_regs)]
    states = list(range(n_states))
    delta, mu = {}, {}
    for q in states:
        for a in sigma:
            delta[(q, a)] = rng.randrange(n_states)
            pool = regs[:]
            rng.shuffle(pool)
            row = {}
            for v in regs:
                toks = []
                k = rng.randint(0, 2)
                take = [pool.pop() for _ in range(min(k, len(pool)))] if rng.random() < 0.8 else []
                for u in take:
                    if rng.random() < 0.4:
                        toks.append(rng.choice(consts))
                    toks.append(Reg(u))
                if rng.random() < 0.5:
                    toks.append(rng.choice(consts))
                row[v] = update_expr(toks)
            mu[(q, a)] = row
    acc = [q for q in states if rng.random() < 0.6] or [0]
    nu = {q: update_expr([Reg(rng.choice(regs)), rng.choice(["", "e"])]) for q in acc}
    return Ccra(states, tuple(sigma), tuple(regs), 0, frozenset(acc), delta, mu, nu, STR_MONOID)


def symbolic_run(m: Ccra, q, word):
    """Run ``word`` from ``q`` with every register holding its own name;
    returns the end state and, per register, its content as a token tuple."""
    val = {v: (Reg(v),) for v in m.registers}
    for a in word:
        row = m.update(q, a)
        val = {v: update_expr([x for t in row[v] for x in (val[t.name] if isinstance(t, Reg) else (t,))])
               for v in m.registers}
        q = m.delta[(q, a)]
    return q, val
