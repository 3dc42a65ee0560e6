"""Bundled example expressions and machines."""

from __future__ import annotations

import re
from importlib import resources
from typing import Dict, List, Optional, Tuple

from . import expr as ex

EXPRESSIONS = ["id", "copy", "reverse", "reverse_of_id", "count_a", "indicator", "coffee",
               "swap", "strip", "shuffle", "shuffle_pipeline"]
MACHINES = ["shuffle_sst", "coffee_acra", "flow_acra", "echo", "two_state", "crossing"]

_DIRECTIVE = re.compile(r"^%\s*(alphabet|monoid)\s*:\s*(\S*)\s*$")


def corpus_path(name: str):
    return resources.files("regcomb") / "corpus" / name


def read_directives(text: str) -> Dict[str, str]:
    out = {}
    for line in text.splitlines():
        m = _DIRECTIVE.match(line.strip())
        if m:
            out[m.group(1)] = m.group(2)
    return out


def load_expression_text(text: str, alphabet: Optional[str] = None,
                         monoid: Optional[str] = None) -> ex.FuncExpr:
    from .cli import parse_surface

    d = read_directives(text)
    alphabet = alphabet if alphabet is not None else d.get("alphabet")
    monoid = monoid if monoid is not None else d.get("monoid")
    return parse_surface(text, alphabet=alphabet, monoid=monoid)


def expression(name: str) -> ex.FuncExpr:
    return load_expression_text(corpus_path(f"{name}.rc").read_text())


def expression_text(name: str) -> str:
    return corpus_path(f"{name}.rc").read_text()


def machine(name: str):
    from .ccra import load_machine

    return load_machine(corpus_path(f"{name}.json").read_text())


def all_expressions() -> List[Tuple[str, ex.FuncExpr]]:
    return [(n, expression(n)) for n in EXPRESSIONS]
