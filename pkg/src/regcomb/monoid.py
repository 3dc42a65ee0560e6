"""Output monoids for cost functions.

Values are plain Python objects: ``str`` for the string monoid (concatenation),
``int`` for the integer monoid (addition), and the singleton ``BOT`` for the
undefined value.  Keeping them unboxed makes evaluation cheap; ``StrVal`` and
``IntVal`` are exported as aliases for readability at call sites.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Union


class MonoidError(Exception):
    """Raised when values from different monoids are combined."""


class _Bottom:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOT"

    def __str__(self):
        return "bot"

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()
Bottom = _Bottom

StrVal = str
IntVal = int
MonoidValue = Union[str, int, _Bottom]


def is_bottom(v) -> bool:
    return v is BOT


def _kind(v) -> str:
    if isinstance(v, str):
        return "str"
    if isinstance(v, int) and not isinstance(v, bool):
        return "int"
    raise MonoidError(f"not a monoid value: {v!r}")


@dataclass(frozen=True)
class MonoidSpec:
    """A monoid instance: its identity, commutativity flag and (for strings)
    the output alphabet."""

    identity: Union[str, int]
    commutative: bool
    alphabet: Optional[FrozenSet[str]] = None

    @property
    def kind(self) -> str:
        return _kind(self.identity)

    def contains(self, v) -> bool:
        if v is BOT:
            return True
        try:
            k = _kind(v)
        except MonoidError:
            return False
        if k != self.kind:
            return False
        if k == "str" and self.alphabet is not None:
            return set(v) <= self.alphabet
        return True

    def plus(self, a, b):
        return mplus(a, b)

    def sum(self, values: Iterable):
        total = self.identity
        for v in values:
            total = mplus(total, v)
        return total


def string_monoid(alphabet: Optional[Iterable[str]] = None) -> MonoidSpec:
    return MonoidSpec("", False, frozenset(alphabet) if alphabet is not None else None)


INT_MONOID = MonoidSpec(0, True, None)
STR_MONOID = string_monoid()


def monoid_of(value) -> MonoidSpec:
    """The built-in monoid a (non-bottom) value belongs to."""
    return STR_MONOID if _kind(value) == "str" else INT_MONOID


def mplus(a, b):
    """Monoid sum with bottom absorbing on both sides."""
    if a is BOT or b is BOT:
        return BOT
    if _kind(a) != _kind(b):
        raise MonoidError(f"cannot combine {a!r} and {b!r}: different monoids")
    return a + b


def render(v) -> str:
    """Text form: strings quoted, integers decimal, bottom as ``bot``."""
    if v is BOT:
        return "bot"
    if _kind(v) == "str":
        return json.dumps(v, ensure_ascii=False)
    return str(v)


def parse_value(text: str, kind: Optional[str] = None):
    """Inverse of :func:`render`.  ``kind`` forces ``"str"`` or ``"int"``."""
    text = text.strip()
    if text == "bot":
        return BOT
    if text.startswith('"'):
        v = json.loads(text)
        if kind == "int":
            raise MonoidError(f"expected an integer, got {text}")
        return v
    if kind == "str":
        return text
    try:
        return int(text)
    except ValueError:
        if kind == "int":
            raise MonoidError(f"expected an integer, got {text!r}")
        return text
