"""Command-line front end and the surface-syntax parser."""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from . import expr as ex
from . import relang as rl
from .ccra import (Acra, Cascade, Ccra, MachineError, acra_as_ccra, eval_acra, eval_cascade,
                   eval_ccra, load_machine, machine_to_dot)
from .compile import (CompileError, cascade_to_dot, cascade_to_json, compile, dfa_to_dict,
                      load_cascade)
from .extract_comm import ExtractionError, extract_commutative
from .extract_noncomm import extract_noncommutative
from .monoid import BOT, MonoidError, render


class SurfaceSyntaxError(Exception):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"-?[0-9]+")
_BARE = re.compile(r"[A-Za-z0-9_#@$&!~^:']+")
# characters that end a regex literal unless escaped
_REGEX_STOP = set("/+<>=\",;{}") | {" ", "\t", "\n", "\r"}


class _Parser:
    def __init__(self, text: str, kind: Optional[str]):
        self.text = text
        self.pos = 0
        self.kind = kind

    # -- lexical helpers
    def ws(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "%":  # comment to end of line
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self.pos += 1
            else:
                break

    def err(self, msg, pos=None):
        raise SurfaceSyntaxError(msg, self.pos if pos is None else pos)

    def at(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def eat(self, s: str) -> bool:
        if self.at(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            found = self.text[self.pos:self.pos + 10] or "end of input"
            self.err(f"expected {s!r}, found {found!r}")

    def keyword(self, kw: str) -> bool:
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if m and m.group(0) == kw:
            self.pos = m.end()
            return True
        return False

    def peek_keyword(self) -> Optional[str]:
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if m and m.group(0) in ex.KEYWORDS:
            return m.group(0)
        return None

    def scan_regex_until(self, stop: str) -> Optional[int]:
        """Index of the ``stop`` character ending a regex literal starting at
        the current position, or None if the text there is not a literal."""
        text = self.text
        i = self.pos
        depth = 0
        while i < len(text):
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == "[":
                j = i + 1
                while j < len(text) and text[j] != "]":
                    j += 2 if text[j] == "\\" else 1
                if j >= len(text):
                    return None
                i = j + 1
                continue
            if c == stop and depth == 0:
                return i if i > self.pos else None
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth < 0:
                    return None
            elif c in _REGEX_STOP or c == "]":
                return None
            i += 1
        return None

    def regex_at(self, end: int) -> rl.Regex:
        start = self.pos
        try:
            r = rl.parse_regex(self.text[start:end], offset=start)
        except rl.RegexSyntaxError as exc:
            raise SurfaceSyntaxError(f"bad regex literal: {exc}", exc.position) from None
        self.pos = end
        return r

    def value(self):
        self.ws()
        t = self.text
        p = self.pos
        if t.startswith('"', p):
            try:
                v, end = json.JSONDecoder().raw_decode(t, p)
            except json.JSONDecodeError:
                self.err("unterminated string constant")
            self.pos = end
            if self.kind == "int":
                self.err("string constant in an integer expression", p)
            return v
        if t.startswith("ε", p):
            self.pos += 1
            if self.kind == "int":
                self.err("string constant in an integer expression", p)
            return ""
        m = _INT.match(t, p)
        if m and not (m.end() < len(t) and _BARE.match(t[m.end()])):
            self.pos = m.end()
            return m.group(0) if self.kind == "str" else int(m.group(0))
        m = _BARE.match(t, p)
        if m:
            if self.kind == "int":
                self.err("string constant in an integer expression", p)
            self.pos = m.end()
            return m.group(0)
        self.err("expected a constant value")

    # -- grammar
    def program(self):
        e = self.expr()
        self.ws()
        if self.pos != len(self.text):
            self.err(f"unexpected {self.text[self.pos]!r}")
        return e

    def expr(self):
        if self.peek_keyword() == "let":
            start = self.pos
            self.keyword("let")
            self.ws()
            m = _IDENT.match(self.text, self.pos)
            if not m or m.group(0) in ex.KEYWORDS:
                self.err("expected a name after 'let'")
            name = m.group(0)
            self.pos = m.end()
            self.expect("=")
            bound = self.expr()
            if not self.keyword("in"):
                self.err("expected 'in'")
            body = self.expr()
            return ("let", name, bound, body, start)
        return self.choice()

    def choice(self):
        left = self.sum_()
        while self.eat("|>"):
            left = ("choice", left, self.sum_())
        return left

    def sum_(self):
        left = self.split()
        while self.at("+"):
            self.pos += 1
            left = ("sum", left, self.split())
        return left

    def split(self):
        left = self.prefix()
        while True:
            if self.eat("(+)"):
                left = ("split", left, self.prefix())
            elif self.eat("(<+)"):
                left = ("lsplit", left, self.prefix())
            else:
                return left

    def prefix(self):
        self.ws()
        if self.scan_regex_until("/") is None:
            kw = self.peek_keyword()
            if kw in ("sum", "lsum", "rev"):
                self.keyword(kw)
                return ({"sum": "iter", "lsum": "liter", "rev": "rev"}[kw], self.prefix())
            if kw in ("chain", "lchain"):
                self.keyword(kw)
                if self.text.startswith("[", self.pos):
                    self.pos += 1
                else:
                    self.err("expected '[' after chain")
                end = self._bracket_end()
                lang = self.regex_at(end)
                self.pos = end + 1
                return ("chain" if kw == "chain" else "lchain", lang, self.prefix())
        return self.compose()

    def _bracket_end(self) -> int:
        text = self.text
        i = self.pos
        while i < len(text):
            c = text[i]
            if c == "\\":
                i += 2
                continue
            if c == "[":
                j = i + 1
                while j < len(text) and text[j] != "]":
                    j += 2 if text[j] == "\\" else 1
                i = j + 1
                continue
            if c == "]":
                return i
            i += 1
        self.err("unterminated '['")

    def compose(self):
        left = self.atom()
        while self.peek_keyword() == "o":
            self.keyword("o")
            left = ("compose", left, self.atom())
        return left

    def atom(self):
        self.ws()
        start = self.pos
        end = self.scan_regex_until("/")
        if end is not None:
            lang = self.regex_at(end)
            self.pos = end + 1
            return ("const", lang, self.value(), start)
        if self.text.startswith("(", self.pos) and not self.at("(+)") and not self.at("(<+)"):
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        m = _IDENT.match(self.text, self.pos)
        if m and m.group(0) not in ex.KEYWORDS:
            self.pos = m.end()
            return ("var", m.group(0), start)
        if self.pos >= len(self.text):
            self.err("unexpected end of input")
        self.err(f"unexpected {self.text[self.pos]!r}")


def _raw_letters(raw, env, outer_ok=True, seen=None) -> set:
    """Input letters mentioned by regexes of a raw tree, skipping the outer
    side of compositions."""
    seen = set() if seen is None else seen
    out = set()
    stack = [(raw, env)]
    while stack:
        n, env = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        tag = n[0]
        if tag == "const":
            out |= rl.regex_symbols(n[1])
        elif tag in ("chain", "lchain"):
            out |= rl.regex_symbols(n[1])
            stack.append((n[2], env))
        elif tag == "var":
            if n[1] not in env:
                raise SurfaceSyntaxError(f"unbound name {n[1]!r}", n[2])
            stack.append(env[n[1]])
        elif tag == "let":
            stack.append((n[3], dict(env, **{n[1]: (n[2], env)})))
        elif tag == "compose":
            stack.append((n[2], env))
        else:
            for c in n[1:]:
                stack.append((c, env))
    return out


def _bind(raw, sigma: Tuple[str, ...], given: bool) -> ex.FuncExpr:
    memo: Dict[Tuple[int, Tuple[str, ...]], ex.FuncExpr] = {}

    def go(n, env, sigma):
        key = (id(n), sigma)
        if key in memo:
            return memo[key]
        tag = n[0]
        if tag == "const":
            extra = rl.regex_symbols(n[1]) - set(sigma)
            if extra:
                raise SurfaceSyntaxError(f"regex uses symbols {sorted(extra)} outside the alphabet", n[3])
            out = ex.Const(n[1], n[2], sigma)
        elif tag == "var":
            bound, benv = env[n[1]]
            out = go(bound, benv, sigma)
        elif tag == "let":
            out = go(n[3], dict(env, **{n[1]: (n[2], env)}), sigma)
        elif tag in ("choice", "sum", "split", "lsplit"):
            cls = {"choice": ex.Choice, "sum": ex.Sum, "split": ex.SplitSum,
                   "lsplit": ex.LeftSplitSum}[tag]
            out = cls(go(n[1], env, sigma), go(n[2], env, sigma))
        elif tag in ("iter", "liter", "rev"):
            cls = {"iter": ex.IterSum, "liter": ex.LeftIterSum, "rev": ex.Reverse}[tag]
            out = cls(go(n[1], env, sigma))
        elif tag in ("chain", "lchain"):
            cls = ex.ChainedSum if tag == "chain" else ex.LeftChainedSum
            out = cls(go(n[2], env, sigma), n[1])
        elif tag == "compose":
            inner = go(n[2], env, sigma)
            outer_sigma = _raw_letters(n[1], env) | ex.output_symbols(inner)
            out = ex.Compose(go(n[1], env, tuple(sorted(outer_sigma))), inner)
        else:
            raise AssertionError(tag)
        memo[key] = out
        return out

    return go(raw, {}, sigma)


def parse_surface(text: str, alphabet: Optional[Iterable[str]] = None,
                  monoid: Optional[str] = None) -> ex.FuncExpr:
    """Parse the surface syntax into an expression.

    ``alphabet`` fixes the input alphabet (otherwise the letters mentioned by
    the expression's regexes); ``monoid`` is ``"str"``, ``"int"`` or None to
    infer from the constants."""
    p = _Parser(text, monoid)
    raw = p.program()
    letters = _raw_letters(raw, {})
    if alphabet is not None:
        sigma = tuple(sorted(set(alphabet)))
        extra = letters - set(sigma)
        if extra:
            raise SurfaceSyntaxError(f"expression uses symbols {sorted(extra)} outside the alphabet", 0)
    else:
        sigma = tuple(sorted(letters))
    try:
        e = _bind(raw, sigma, alphabet is not None)
        ex.output_kind(e)
    except (ex.ExprError, MonoidError) as exc:
        raise SurfaceSyntaxError(str(exc), 0) from None
    return e


# ---------------------------------------------------------------------------
# Commands

EXIT_USAGE, EXIT_PARSE, EXIT_SEMANTIC = 1, 2, 3
DEFAULT_LIMIT = 2_000_000


class UsageError(Exception):
    pass


class ResourceLimitError(Exception):
    """The bounded comparison would need more strings than allowed."""


@dataclass
class Operand:
    """Something that maps input words to values: an expression, a machine
    or a cascade."""

    name: str
    obj: object

    @property
    def alphabet(self) -> Tuple:
        o = self.obj
        if isinstance(o, ex.FuncExpr):
            return tuple(o.alphabet)
        if isinstance(o, Cascade):
            return tuple(o.input_alphabet)
        return tuple(o.alphabet)

    def evaluator(self):
        o = self.obj
        if isinstance(o, ex.FuncExpr):
            ev = ex.Evaluator(o)
            return lambda w: ev(o, w)
        if isinstance(o, Cascade):
            return lambda w: eval_cascade(o, w)
        if isinstance(o, Acra):
            return lambda w: eval_acra(o, w)
        return lambda w: eval_ccra(o, w)


def _as_operand(x, name="operand") -> Operand:
    return x if isinstance(x, Operand) else Operand(name, x)


def load_json_object(obj):
    """A machine or a cascade from parsed JSON."""
    if isinstance(obj, dict) and obj.get("kind") == "cascade":
        return load_cascade(obj)
    return load_machine(obj)


def load_operand(text: str, alphabet: Optional[str] = None, monoid: Optional[str] = None) -> Operand:
    """Resolve ``corpus:NAME``, a ``.json`` file (machine or cascade), an
    expression file, or inline expression text."""
    from . import corpus

    if text.startswith("corpus:"):
        name = text[len("corpus:"):]
        if name in corpus.EXPRESSIONS:
            return Operand(text, corpus.load_expression_text(corpus.expression_text(name), alphabet, monoid))
        if name in corpus.MACHINES:
            return Operand(text, corpus.machine(name))
        raise UsageError(f"no corpus entry named {name!r}")
    p = Path(text)
    if text.endswith(".json") or (p.suffix == "" and p.is_file() and p.read_text().lstrip().startswith("{")):
        return Operand(text, load_json_object(json.loads(_read(text))))
    if p.is_file():
        from .corpus import load_expression_text
        return Operand(text, load_expression_text(p.read_text(), alphabet, monoid))
    from .corpus import load_expression_text
    return Operand("<expr>", load_expression_text(text, alphabet, monoid))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


@dataclass
class EquivReport:
    equivalent: bool
    max_len: int
    checked: int
    counterexample: Optional[str] = None
    lhs_value: object = None
    rhs_value: object = None

    def __str__(self):
        if self.equivalent:
            return f"equivalent up to {self.max_len} ({self.checked} strings)"
        return (f"counterexample {json.dumps(self.counterexample)}: "
                f"{render(self.lhs_value)} != {render(self.rhs_value)}")


def count_strings(k: int, max_len: int) -> int:
    return sum(k ** n for n in range(max_len + 1))


def cmd_check_equiv(lhs, rhs, max_len: int, alphabet: Optional[Iterable[str]] = None,
                    limit: int = DEFAULT_LIMIT) -> EquivReport:
    """Compare two expressions/machines/cascades on every string of length
    at most ``max_len`` (bottom included)."""
    lhs, rhs = _as_operand(lhs, "lhs"), _as_operand(rhs, "rhs")
    if alphabet is None:
        if set(lhs.alphabet) != set(rhs.alphabet):
            raise ex.ExprError(f"alphabets differ: {list(lhs.alphabet)} vs {list(rhs.alphabet)}")
        alphabet = lhs.alphabet
    sigma = tuple(sorted(set(alphabet), key=str))
    total = count_strings(len(sigma), max_len)
    if total > limit:
        raise ResourceLimitError(f"{total} strings up to length {max_len} exceeds the limit {limit}")
    f, g = lhs.evaluator(), rhs.evaluator()
    n = 0
    for w in rl.all_words(sigma, max_len):
        n += 1
        a, b = f(w), g(w)
        if a != b or (a is BOT) != (b is BOT):
            return EquivReport(False, max_len, n, "".join(map(str, w)), a, b)
    return EquivReport(True, max_len, n)


def _raw(v) -> str:
    if v is BOT:
        return "bot"
    return v if isinstance(v, str) else str(v)


def _split_input(text: str, alphabet) -> Tuple:
    # whitespace separates multi-character symbols; otherwise one symbol per character
    return tuple(text.split()) if any(c.isspace() for c in text) else tuple(text)


def _source(args) -> Operand:
    given = [x for x in (args.expr, args.file, args.machine) if x is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of -e, -f, -m")
    if args.expr is not None:
        return Operand("<expr>", _expr_from_text(args.expr, args))
    if args.file is not None:
        if args.file.startswith("corpus:"):
            return load_operand(args.file, args.alphabet, args.monoid)
        return Operand(args.file, _expr_from_text(_read(args.file), args))
    if args.machine.startswith("corpus:"):
        return load_operand(args.machine)
    return Operand(args.machine, load_json_object(json.loads(_read(args.machine))))


def _expr_from_text(text: str, args) -> ex.FuncExpr:
    from .corpus import load_expression_text
    return load_expression_text(text, args.alphabet, args.monoid)


def _need_expr(op: Operand) -> ex.FuncExpr:
    if not isinstance(op.obj, ex.FuncExpr):
        raise UsageError("this command needs an expression (-e or -f)")
    return op.obj


def _need_machine(op: Operand):
    if not isinstance(op.obj, (Ccra, Acra)):
        raise UsageError("this command needs a machine (-m)")
    return op.obj


def expression_document(e: ex.FuncExpr) -> str:
    """Surface text with directives so that it re-parses to the same alphabet
    and monoid."""
    kind = ex.output_kind(e)
    head = [f"% alphabet: {''.join(map(str, e.alphabet))}"]
    if kind in ("str", "int"):
        head.append(f"% monoid: {kind}")
    return "\n".join(head + [ex.to_surface(e)]) + "\n"


def _self_check(e: ex.FuncExpr, m, max_len: int, limit: int) -> str:
    rep = cmd_check_equiv(Operand("extracted", e), Operand("machine", m), max_len, limit=limit)
    if not rep.equivalent:
        raise ExtractionError(f"self-check failed: {rep}")
    return f"self-check: {rep}"


def run_eval(args) -> str:
    op = _source(args)
    f = op.evaluator()
    return "\n".join(_raw(f(_split_input(w, op.alphabet) if not isinstance(op.obj, ex.FuncExpr)
                           else "".join(_split_input(w, op.alphabet)))) for w in args.input) + "\n"


def run_compile(args) -> str:
    e = _need_expr(_source(args))
    c = compile(e)
    return cascade_to_dot(c) if args.dot else cascade_to_json(c) + "\n"


def run_extract_comm(args) -> str:
    m = _need_machine(_source(args))
    e = extract_commutative(m)
    if args.max_len > 0:
        print(_self_check(e, m, args.max_len, args.limit), file=sys.stderr)
    return expression_document(e)


def run_extract_noncomm(args) -> str:
    m = _need_machine(_source(args))
    if isinstance(m, Acra):
        m = acra_as_ccra(m)
    e = extract_noncommutative(m, skip_normalize=args.skip_normalize)
    if args.max_len > 0:
        print(_self_check(e, m, args.max_len, args.limit), file=sys.stderr)
    return expression_document(e)


def run_domain(args) -> str:
    e = _need_expr(_source(args))
    d = rl.minimize(ex.domain_dfa(e))
    if args.json:
        return json.dumps(dfa_to_dict(d), indent=1) + "\n"
    if args.dot:
        return rl.dfa_to_dot(d, name="domain")
    return ex.lang_text(d) + "\n"


def run_dot(args) -> str:
    op = _source(args)
    if isinstance(op.obj, ex.FuncExpr):
        return cascade_to_dot(compile(op.obj))
    if isinstance(op.obj, Cascade):
        return cascade_to_dot(op.obj)
    return machine_to_dot(op.obj)


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="regcomb", description="Regular combinators and cost register automata.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def source(sp, machines=True):
        sp.add_argument("-e", "--expr", help="expression text")
        sp.add_argument("-f", "--file", help="expression file, or corpus:NAME")
        if machines:
            sp.add_argument("-m", "--machine", help="machine or cascade JSON, or corpus:NAME")
        else:
            sp.set_defaults(machine=None)
        sp.add_argument("--alphabet", help="input alphabet (default: inferred)")
        sp.add_argument("--monoid", choices=["str", "int"], help="output monoid of constants")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    sp = sub.add_parser("eval", help="evaluate on input words")
    source(sp)
    sp.add_argument("-i", "--input", action="append", required=True, help="input word (repeatable)")
    sp.set_defaults(run=run_eval)

    sp = sub.add_parser("compile", help="compile an expression to a cascade of machines")
    source(sp, machines=False)
    sp.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    sp.set_defaults(run=run_compile)

    for name, run, extra in (("extract-comm", run_extract_comm, False),
                             ("extract-noncomm", run_extract_noncomm, True)):
        sp = sub.add_parser(name, help="extract an expression from a machine")
        source(sp)
        sp.add_argument("--max-len", type=int, default=4, help="round-trip self-check length (0 disables)")
        sp.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
        if extra:
            sp.add_argument("--skip-normalize", action="store_true", help="input is already normalized")
        sp.set_defaults(run=run)

    sp = sub.add_parser("domain", help="print the domain of an expression")
    source(sp, machines=False)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="minimal DFA as JSON")
    g.add_argument("--dot", action="store_true", help="minimal DFA as DOT")
    sp.set_defaults(run=run_domain)

    sp = sub.add_parser("dot", help="DOT rendering of a machine or a compiled expression")
    source(sp)
    sp.set_defaults(run=run_dot)

    sp = sub.add_parser("check-equiv", help="bounded exhaustive equivalence check")
    sp.add_argument("lhs", help="expression text, expression file, machine/cascade JSON, or corpus:NAME")
    sp.add_argument("rhs")
    sp.add_argument("--max-len", type=int, default=6)
    sp.add_argument("--alphabet")
    sp.add_argument("--monoid", choices=["str", "int"])
    sp.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    sp.add_argument("-o", "--output")
    sp.set_defaults(run=None)
    return p


def cmd_run(argv: Optional[List[str]] = None) -> Tuple[int, str]:
    """Run one command; returns (exit code, stdout text).  Errors go to
    stderr."""
    try:
        args = build_parser().parse_args(argv)
        if args.command == "check-equiv":
            lhs = load_operand(args.lhs, args.alphabet, args.monoid)
            rhs = load_operand(args.rhs, args.alphabet, args.monoid)
            rep = cmd_check_equiv(lhs, rhs, args.max_len, args.alphabet, args.limit)
            out, code = str(rep) + "\n", 0 if rep.equivalent else EXIT_SEMANTIC
        else:
            out, code = args.run(args), 0
        if args.output:
            Path(args.output).write_text(out)
            out = ""
        return code, out
    except UsageError as exc:
        print(f"regcomb: {exc}", file=sys.stderr)
        return EXIT_USAGE, ""
    except (SurfaceSyntaxError, rl.RegexSyntaxError, json.JSONDecodeError, MonoidError) as exc:
        print(f"regcomb: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE, ""
    except (ex.ExprError, MachineError, CompileError, ExtractionError, ResourceLimitError,
            rl.LanguageError, KeyError) as exc:
        print(f"regcomb: error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC, ""


def main(argv: Optional[List[str]] = None) -> int:
    code, out = cmd_run(argv)
    if out:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    from regcomb.cli import main as _main  # use the package's classes, not __main__'s

    sys.exit(_main())
