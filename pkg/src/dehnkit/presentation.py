"""Finite presentations attached to a compiled S-machine.

Generators are the state letters, the tape letters, ``kappa(1) .. kappa(2N)``
and one letter per positive rule (the rule id itself, e.g. ``1/9/S6`` or
``R4[1]``).  Relators come in three categories:

* ``transition``: ``t^-1 U t V^-1`` for every part ``U -> V`` of rule ``t``,
  and ``t^-1 q t q^-1`` for every letter ``q`` of a component the rule
  does not touch;
* ``auxiliary``: ``t x t^-1 x^-1`` for every tape letter and every kappa;
* ``hub``: the single word ``K(W0)``.

Each relator is stored once, at its lexicographically least rotation.
Inverses and other rotations are matched by the derivation code.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .stdlib import ALPHA, DELTA, OMEGA
from .words import Symbol, format_symbol, format_word, free_reduce, inverse, parse_word

CATEGORIES = ("transition", "auxiliary", "hub", "relator")


class PresentationError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def kappa(j: int) -> Symbol:
    return Symbol("kappa", j)


def is_kappa(s: Symbol) -> bool:
    return s.base == "kappa" and s.tape is not None and s.tag is None


def theta(rid: str) -> Symbol:
    return Symbol(rid)


def _key(s: Symbol) -> str:
    return format_symbol(s)


def least_rotation(w) -> tuple:
    w = tuple(w)
    if not w:
        return w
    keys = [_key(s) for s in w]
    n = len(w)
    best = 0
    for r in range(1, n):
        if keys[r:] + keys[:r] < keys[best:] + keys[:best]:
            best = r
    return w[best:] + w[:best]


@dataclass(frozen=True)
class Relator:
    word: tuple
    category: str = "relator"
    provenance: tuple = ()

    def __len__(self):
        return len(self.word)

    def text(self) -> str:
        return format_word(self.word, compress=False)


@dataclass
class GroupPresentation:
    generators: tuple
    relators: list
    N: int = 6
    hub_index: int | None = None
    _gens: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self._gens = frozenset(self.generators)

    def __eq__(self, other):
        if not isinstance(other, GroupPresentation):
            return NotImplemented
        return (self.N == other.N and self._gens == other._gens
                and self.relators == other.relators and self.hub_index == other.hub_index)

    def has(self, s: Symbol) -> bool:
        return s.pos() in self._gens

    def relator(self, i: int) -> Relator:
        return self.relators[i]

    def thetas(self) -> list:
        return [g for g in self.generators if g.tape is None and g.tag is None
                and ("/" in g.base or "[" in g.base)]

    def digest(self) -> str:
        return hashlib.sha256(emit_presentation(self).encode()).hexdigest()[:16]


def presentation_from_words(generators, relators, N: int = 1) -> GroupPresentation:
    """Plain presentation for toy groups; every relator gets category ``relator``."""
    gens = tuple(parse_word(g)[0] if isinstance(g, str) else g for g in generators)
    rels = []
    for r in relators:
        w = parse_word(r) if isinstance(r, str) else tuple(r)
        rels.append(Relator(least_rotation(free_reduce(w)), "relator", ()))
    P = GroupPresentation(gens, rels, N)
    _check_letters(P)
    return P


def build_K(u, N: int) -> tuple:
    """``K(u)``: the product over j of ``u^e_j kappa_j``, then of ``u^e_j kappa_j^-1``.

    ``e_j`` is -1 for odd j and +1 for even j.  The result is the plain
    concatenation; it is freely reduced whenever ``u`` is.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    u = tuple(u)
    ui = inverse(u)
    out: list = []
    for s in (1, -1):
        for j in range(1, 2 * N + 1):
            out.extend(ui if j % 2 else u)
            k = kappa(j)
            out.append(k if s > 0 else k.inv())
    return tuple(out)


def _sorted(letters) -> list:
    return sorted(set(letters), key=_key)


def build_presentation(SM, N: int = 6) -> GroupPresentation:
    """Presentation of the group attached to ``SM`` (an SMachineOfM) with N sectors."""
    from .compiler import accept_word

    if N < 1:
        raise ValueError("N must be at least 1")
    hw = SM.hardware
    states = _sorted(hw.state_letters())
    tape = _sorted(set(hw.tape_letters()) | {ALPHA, OMEGA, DELTA})
    kappas = [kappa(j) for j in range(1, 2 * N + 1)]
    rules = SM.machine.rules
    thetas = [theta(r.id) for r in rules]
    gens = tuple(states + tape + kappas + thetas)

    rels: list[Relator] = []
    for r, t in zip(rules, thetas):
        ti = t.inv()
        covered = set()
        for i, p in enumerate(r.parts):
            covered.update(range(p.lo, p.hi + 1))
            w = (ti,) + p.U() + (t,) + inverse(p.V())
            rels.append(Relator(least_rotation(w), "transition", (r.id, str(i))))
        for j, (_, letters) in enumerate(hw.components):
            if j in covered:
                continue
            for q in _sorted(letters):
                w = (ti, q, t, q.inv())
                rels.append(Relator(least_rotation(w), "transition", (r.id, _key(q))))
        for x in tape + kappas:
            w = (t, x, ti, x.inv())
            rels.append(Relator(least_rotation(w), "auxiliary", (r.id, _key(x))))
    hub = build_K(accept_word(SM).flat(), N)
    rels.append(Relator(least_rotation(hub), "hub", ()))
    return GroupPresentation(gens, rels, N, len(rels) - 1)


def expected_relator_count(SM, N: int) -> int:
    hw = SM.hardware
    tape = set(hw.tape_letters()) | {ALPHA, OMEGA, DELTA}
    total = 0
    for r in SM.machine.rules:
        covered = set()
        for p in r.parts:
            covered.update(range(p.lo, p.hi + 1))
        total += len(r.parts)
        total += sum(len(ls) for j, (_, ls) in enumerate(hw.components) if j not in covered)
    return total + len(SM.machine.rules) * (len(tape) + 2 * N) + 1


def theta_count(w) -> int:
    return sum(1 for s in w if s.tape is None and s.tag is None and ("/" in s.base or "[" in s.base))


@dataclass
class PresentationStats:
    generators: int
    by_category: dict
    max_length: int
    max_transition_length: int
    hub_length: int

    def lines(self) -> list:
        out = [f"generators\t{self.generators}"]
        for c in CATEGORIES:
            if c in self.by_category:
                out.append(f"{c}\t{self.by_category[c]}")
        out.append(f"relators\t{sum(self.by_category.values())}")
        out.append(f"max_length\t{self.max_length}")
        out.append(f"max_transition_length\t{self.max_transition_length}")
        out.append(f"hub_length\t{self.hub_length}")
        return out

    def as_dict(self) -> dict:
        return {"generators": self.generators, "by_category": dict(self.by_category),
                "max_length": self.max_length, "max_transition_length": self.max_transition_length,
                "hub_length": self.hub_length}


def presentation_stats(P: GroupPresentation) -> PresentationStats:
    cats: dict = {}
    mx = mt = hub = 0
    for r in P.relators:
        cats[r.category] = cats.get(r.category, 0) + 1
        mx = max(mx, len(r))
        if r.category == "transition":
            mt = max(mt, len(r))
        if r.category == "hub":
            hub = len(r)
    return PresentationStats(len(P.generators), cats, mx, mt, hub)


# text format ---------------------------------------------------------------
#
#   presentation
#   N <int>
#   gen <symbol> <symbol> ...        (may repeat)
#   rel <category> <word> [| <provenance fields>]

_GEN_PER_LINE = 16


def emit_presentation(P: GroupPresentation) -> str:
    lines = ["presentation", f"N {P.N}"]
    gens = [_key(g) for g in P.generators]
    for i in range(0, max(len(gens), 1), _GEN_PER_LINE):
        lines.append(" ".join(["gen"] + gens[i:i + _GEN_PER_LINE]))
    for r in P.relators:
        line = f"rel {r.category} {r.text()}"
        if r.provenance:
            line += " | " + " ".join(r.provenance)
        lines.append(line)
    return "\n".join(lines) + "\n"


def _check_letters(P: GroupPresentation) -> None:
    for i, r in enumerate(P.relators):
        for s in r.word:
            if not P.has(s):
                raise PresentationError(f"relator {i} uses undeclared generator {_key(s.pos())}")


def parse_presentation(text: str) -> GroupPresentation:
    N = None
    gens: list = []
    rels: list = []
    hub = None
    seen_header = False
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "presentation":
            seen_header = True
        elif head == "N":
            try:
                N = int(rest)
            except ValueError:
                raise PresentationError(f"bad N {rest!r}", n) from None
            if N < 1:
                raise PresentationError("N must be at least 1", n)
        elif head == "gen":
            try:
                for tok in rest.split():
                    gens.extend(parse_word(tok))
            except ValueError as e:
                raise PresentationError(str(e), n) from None
        elif head == "rel":
            cat, _, body = rest.partition(" ")
            if cat not in CATEGORIES:
                raise PresentationError(f"unknown relator category {cat!r}", n)
            body, bar, prov = body.partition("|")
            try:
                w = parse_word(body)
            except ValueError as e:
                raise PresentationError(str(e), n) from None
            known = set(gens)
            for s in w:
                if s.pos() not in known:
                    raise PresentationError(f"undeclared generator {_key(s.pos())}", n)
            if cat == "hub":
                hub = len(rels)
            rels.append(Relator(w, cat, tuple(prov.split()) if bar else ()))
        else:
            raise PresentationError(f"unknown directive {head!r}", n)
    if not seen_header:
        raise PresentationError("missing 'presentation' header", 1)
    return GroupPresentation(tuple(gens), rels, N if N is not None else 1, hub)
