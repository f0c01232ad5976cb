"""Letters and group words shared by every layer of the toolkit.

A word is a plain tuple of :class:`Symbol`.  Nothing here knows about
machines; it only handles signs, free reduction and the token syntax used
by the text formats.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence


class Symbol(NamedTuple):
    """One letter, possibly inverted.

    ``base`` carries the printable name including index/prime/bar/hat
    decorations (``p1'``, ``pbar0``, ``xhat``).  ``tape`` is the machine
    index a letter is attached to, ``tag`` an optional ``(tau, gamma)`` pair.
    """

    base: str
    tape: int | None = None
    tag: tuple | None = None
    sign: int = 1

    def inv(self) -> "Symbol":
        return Symbol(self.base, self.tape, self.tag, -self.sign)

    def pos(self) -> "Symbol":
        if self.sign > 0:
            return self
        return Symbol(self.base, self.tape, self.tag, 1)

    def __str__(self) -> str:
        return format_symbol(self)


Word = tuple


def sym(base: str, tape: int | None = None, tag: tuple | None = None, sign: int = 1) -> Symbol:
    return Symbol(base, tape, tag, sign)


def inverse(w: Sequence[Symbol]) -> tuple:
    return tuple(s.inv() for s in reversed(w))


def free_reduce(w: Iterable[Symbol]) -> tuple:
    """Cancel adjacent ``x x^-1`` pairs, scanning left to right with a stack."""
    out: list[Symbol] = []
    for s in w:
        if out:
            t = out[-1]
            if t.sign == -s.sign and t.base == s.base and t.tape == s.tape and t.tag == s.tag:
                out.pop()
                continue
        out.append(s)
    return tuple(out)


def is_reduced(w: Sequence[Symbol]) -> bool:
    for a, b in zip(w, w[1:]):
        if a == b.inv():
            return False
    return True


def cyclic_reduce(w: Sequence[Symbol]) -> tuple:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i > 1 and w[i] == w[j - 1].inv():
        i += 1
        j -= 1
    return tuple(w[i:j])


def algebraic_sum(w: Iterable[Symbol]) -> int:
    """Image of ``w`` under the map sending every generator to 1."""
    return sum(s.sign for s in w)


def power(s: Symbol, n: int) -> tuple:
    if n >= 0:
        return (s,) * n
    return (s.inv(),) * (-n)


def is_positive(w: Iterable[Symbol]) -> bool:
    return all(s.sign > 0 for s in w)


# token syntax --------------------------------------------------------------

_TOKEN = re.compile(r"^(?P<name>[^\s()^]+)(\((?P<args>[^)]*)\))?(\^(?P<exp>-?\d+))?$")


def format_symbol(s: Symbol, with_sign: bool = True) -> str:
    out = s.base
    if s.tape is not None or s.tag is not None:
        parts = ["" if s.tape is None else str(s.tape)]
        if s.tag is not None:
            parts.extend(str(t) for t in s.tag)
        out += "(" + ",".join(parts) + ")"
    if with_sign and s.sign < 0:
        out += "^-1"
    return out


def parse_token(tok: str) -> tuple:
    m = _TOKEN.match(tok)
    if not m:
        raise ValueError(f"bad token {tok!r}")
    tape = None
    tag = None
    if m.group("args") is not None:
        args = m.group("args").split(",")
        if args[0].strip():
            tape = int(args[0])
        if len(args) > 1:
            tag = tuple(a.strip() for a in args[1:])
    s = Symbol(m.group("name"), tape, tag, 1)
    exp = int(m.group("exp")) if m.group("exp") is not None else 1
    return power(s, exp)


def parse_word(text: str) -> tuple:
    out: list[Symbol] = []
    for tok in text.split():
        if tok in ("1", "ε"):
            continue
        out.extend(parse_token(tok))
    return tuple(out)


def format_word(w: Sequence[Symbol], compress: bool = True) -> str:
    """Print ``w`` with runs collapsed into powers (``delta^3``)."""
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        j = i
        if compress:
            while j + 1 < len(w) and w[j + 1] == w[i]:
                j += 1
        run = j - i + 1
        name = format_symbol(w[i], with_sign=False)
        e = run * w[i].sign
        parts.append(name if e == 1 else f"{name}^{e}")
        i = j + 1
    return " ".join(parts)
