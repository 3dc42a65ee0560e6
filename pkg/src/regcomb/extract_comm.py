"""Expressions from additive register automata over commutative monoids.

The register-flow NFA has a state ``(q, v)`` per machine state and register
and an edge ``(q, v) --(a, d)--> (q', v')`` whenever reading ``a`` in ``q``
sets ``v' := v + d``.  Since the monoid is commutative, the value of a run is
the sum of the offsets along the unique flow path ending in the output
register, so a regex for the flow NFA read with

    union -> choice,  concatenation -> split sum,  star -> iterated sum,
    letter (a, d) -> a / d

is an expression for the machine.
"""

from __future__ import annotations

from typing import List

from . import expr as ex
from . import relang as rl
from .ccra import Acra


class ExtractionError(Exception):
    pass


def acra_to_flow_nfa(m: Acra) -> rl.Nfa:
    """Register-flow NFA with start states ``{q0} x V`` and accepting states
    ``(q, v)`` where the output of ``q`` reads ``v``.  State labels are the
    pairs ``(q, v)``; letters are pairs ``(a, d)``."""
    if not m.monoid.commutative:
        raise ExtractionError("the register-flow construction needs a commutative monoid")
    pairs = [(q, v) for q in m.states for v in m.registers]
    index = {p: i for i, p in enumerate(pairs)}
    edges = []
    letters = set()
    for q in m.states:
        for a in m.alphabet:
            if (q, a) not in m.delta:
                continue
            q2 = m.delta[(q, a)]
            for v2, (v, d) in m.update(q, a).items():
                letters.add((a, d))
                edges.append((index[(q, v)], (a, d), index[(q2, v2)]))
    starts = frozenset(index[(m.start, v)] for v in m.registers)
    accepting = frozenset(index[(q, m.nu[q][0])] for q in m.accepting)
    return rl.Nfa(len(pairs), tuple(sorted(letters, key=repr)), tuple(edges), starts,
                  accepting, tuple(pairs))


def regex_to_expr(r: rl.Regex, sigma, zero) -> ex.FuncExpr:
    """Read a regex over flow letters as an expression."""
    if isinstance(r, rl.Empty):
        return ex.bottom(sigma, zero)
    if isinstance(r, rl.Eps):
        return ex.Const(rl.EPS, zero, sigma)
    if isinstance(r, rl.Sym):
        a, d = r.symbol
        return ex.Const(rl.Sym(a), d, sigma)
    if isinstance(r, rl.Union):
        return ex.Choice(regex_to_expr(r.left, sigma, zero), regex_to_expr(r.right, sigma, zero))
    if isinstance(r, rl.Concat):
        return ex.SplitSum(regex_to_expr(r.left, sigma, zero), regex_to_expr(r.right, sigma, zero))
    if isinstance(r, rl.Star):
        return ex.IterSum(regex_to_expr(r.body, sigma, zero))
    raise ExtractionError(f"unexpected regex node {r!r}")


def extract_commutative(m: Acra) -> ex.FuncExpr:
    """Expression over {const, choice, split sum, iterated sum} equal to ``m``."""
    nfa = acra_to_flow_nfa(m)
    if not rl.nfa_is_unambiguous(nfa):
        raise ExtractionError("the register-flow NFA is ambiguous")
    sigma = tuple(m.alphabet)
    zero = m.monoid.identity
    index = {p: i for i, p in enumerate(nfa.labels)}
    parts: List[ex.FuncExpr] = []
    # ordered by (start register, accepting state); domains are disjoint anyway
    for v in m.registers:
        s = index[(m.start, v)]
        for q in m.states:
            if q not in m.accepting:
                continue
            u, d = m.nu[q]
            f = index[(q, u)]
            single = rl.Nfa(nfa.n_states, nfa.alphabet, nfa.edges, frozenset([s]),
                            frozenset([f]), nfa.labels)
            r = rl.state_elimination(single)
            if isinstance(r, rl.Empty):
                continue
            part = regex_to_expr(r, sigma, zero)
            if d != zero:
                part = ex.SplitSum(part, ex.Const(rl.EPS, d, sigma))
            parts.append(part)
    return ex.choice_all(parts, sigma, zero)

