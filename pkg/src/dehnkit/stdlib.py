"""The standard S-machines S1..S9, S_alpha, S_omega, generated from rule
templates, plus decoration/union operators and word types.

Rule templates are written in the token syntax of :mod:`dehnkit.words`
and expanded here, so primed, barred and hatted copies are always derived
from one source.
"""

from __future__ import annotations

import re
from itertools import product
from typing import Callable, Iterable, Sequence

from .smachine import SHardware, SMachine, SRule
from .words import Symbol, is_reduced, parse_word

DELTA = Symbol("delta")
ALPHA = Symbol("alpha")
OMEGA = Symbol("omega")

PQRST = ("p", "q", "r", "s", "t")


# letter decorations --------------------------------------------------------

_LEAD = re.compile(r"^([A-Za-z]+)(.*)$")


def prime_name(name: str) -> str:
    return name + "'"


def _insert(name: str, mark: str) -> str:
    m = _LEAD.match(name)
    if not m:
        return name + mark
    return m.group(1) + mark + m.group(2)


def bar_name(name: str) -> str:
    return _insert(name, "bar")


def hat_name(name: str) -> str:
    return _insert(name, "hat")


def _remove(name: str, mark: str) -> str:
    m = _LEAD.match(name)
    if m and m.group(1).endswith(mark) and len(m.group(1)) > len(mark):
        return m.group(1)[:-len(mark)] + m.group(2)
    raise ValueError(f"{name} carries no {mark}")


def _unprime(name: str) -> str:
    if not name.endswith("'"):
        raise ValueError(f"{name} carries no prime")
    return name[:-1]


DECORATIONS: dict[str, tuple[Callable, Callable, str]] = {
    "prime": (prime_name, _unprime, "'"),
    "bar": (bar_name, lambda n: _remove(n, "bar"), "b"),
    "hat": (hat_name, lambda n: _remove(n, "hat"), "h"),
}


def _rename(s: Symbol, f) -> Symbol:
    return Symbol(f(s.base), s.tape, s.tag, s.sign)


# machine surgery -----------------------------------------------------------

def map_states(S: SMachine, f: Callable[[Symbol], Symbol], id_map: Callable[[str], str],
               name: str = "") -> SMachine:
    """Rebuild S with every state letter passed through ``f``."""
    hw = S.hardware
    comps = [(cname, [f(s) for s in ls]) for cname, ls in hw.components]
    new_hw = SHardware(comps, hw.tapes)
    rules = []
    states = hw.state_letters()
    for r in S.rules:
        pairs = []
        for U, V in r.pairs():
            pairs.append((tuple(f(s) if s.pos() in states else s for s in U),
                          tuple(f(s) if s.pos() in states else s for s in V)))
        rules.append(SRule.from_words(new_hw, id_map(r.id), pairs))
    return SMachine(new_hw, rules, name or S.name)


def decorate(S: SMachine, tag: str, fixed: Iterable[Symbol] = (), name: str = "") -> SMachine:
    """Copy of S with all state letters outside ``fixed`` decorated.

    ``tag`` is one of prime, bar, hat.  Rule ids get a matching suffix.
    """
    if tag not in DECORATIONS:
        raise ValueError(f"unknown decoration {tag}")
    add, _, suffix = DECORATIONS[tag]
    fixed = set(fixed)
    states = S.hardware.state_letters()
    if not fixed <= states:
        raise ValueError("fixed letters must be state letters of the machine")

    def f(s: Symbol) -> Symbol:
        return s if s.pos() in fixed else _rename(s, add)

    new_names = {f(s) for s in states if s not in fixed}
    if new_names & (states - fixed):
        raise ValueError(f"decoration {tag} collides with existing letters")
    return map_states(S, f, lambda rid: rid + suffix, name)


def undecorate(S: SMachine, tag: str, name: str = "") -> SMachine:
    _, rem, suffix = DECORATIONS[tag]

    def f(s: Symbol) -> Symbol:
        try:
            return _rename(s, rem)
        except ValueError:
            return s

    def ids(rid: str) -> str:
        return rid[:-len(suffix)] if rid.endswith(suffix) else rid

    return map_states(S, f, ids, name)


def compose_union(Sa: SMachine, Sb: SMachine, name: str = "") -> SMachine:
    """Union of two machines on aligned hardware.

    Components and tapes are merged position by position.  Rules that are
    equal as replacement vectors are kept once; a clashing id gets a suffix.
    """
    ha, hb = Sa.hardware, Sb.hardware
    if len(ha.components) != len(hb.components):
        raise ValueError("component clash: different numbers of components")
    comps = []
    for (na, la), (nb, lb) in zip(ha.components, hb.components):
        comps.append((na, la | lb))
    tapes = [(na, la | lb) for (na, la), (_, lb) in zip(ha.tapes, hb.tapes)]
    try:
        hw = SHardware(comps, tapes)
    except ValueError as e:
        raise ValueError(f"component clash: {e}") from None
    rules = []
    seen: dict = {}
    ids = set()
    for r in list(Sa.rules) + list(Sb.rules):
        key = r.parts
        if key in seen or r.inverse().parts in seen:
            continue
        rid = r.id
        k = 2
        while rid in ids:
            rid = f"{r.id}#{k}"
            k += 1
        nr = SRule.from_words(hw, rid, r.pairs())
        seen[key] = nr
        ids.add(rid)
        rules.append(nr)
    return SMachine(hw, rules, name or f"{Sa.name}+{Sb.name}")


def same_rules(Sa: SMachine, Sb: SMachine) -> bool:
    """Equality of hardware and of rule sets up to ids and orientation."""
    if Sa.hardware != Sb.hardware:
        return False

    def keys(S):
        out = set()
        for r in S.rules:
            out.add(frozenset([r.parts, r.inverse().parts]))
        return out

    return keys(Sa) == keys(Sb)


# templates --------------------------------------------------------------------

def _rules(hw: SHardware, table: Sequence[tuple[str, str]]) -> list:
    out = []
    for rid, text in table:
        body = text.strip()
        assert body[0] == "[" and body[-1] == "]"
        pairs = []
        for chunk in body[1:-1].split(";"):
            u, _, v = chunk.partition("->")
            pairs.append((parse_word(u), parse_word(v)))
        out.append(SRule.from_words(hw, rid, pairs))
    return out


def _pqrst_hw(letters: dict) -> SHardware:
    comps = [(z.upper(), [Symbol(n) for n in letters[z]]) for z in PQRST]
    tapes = [(f"D{j}", [DELTA]) for j in range(1, 5)]
    return SHardware(comps, tapes)


def _pqrst_letters(suffixes) -> dict:
    return {z: [z + s for s in suffixes] for z in PQRST}


S1_RULES = [
    ("1", "[q1 -> delta^-2 q1 delta^2 ; r1 -> delta^-1 r1 delta]"),
    ("2", "[p1 q1 -> p2 q2 ; r1 -> r2 ; s1 -> s2 ; t1 -> t2]"),
    ("3", "[p1 delta q1 -> p3 delta q3 ; r1 -> r3 ; s1 -> s3 ; t1 -> t3]"),
]

S2_RULES = [
    ("1", "[q2 -> delta q2 delta^-1 ; s2 -> delta^-1 s2 delta]"),
    ("2", "[q2 r2 s2 -> q1 r1 s1 ; p2 -> p1 ; t2 -> t1]"),
]


def build_s1() -> SMachine:
    hw = _pqrst_hw(_pqrst_letters(["1", "2", "3"]))
    return SMachine(hw, _rules(hw, S1_RULES), "S1")


def build_s2() -> SMachine:
    hw = _pqrst_hw(_pqrst_letters(["1", "2"]))
    return SMachine(hw, _rules(hw, S2_RULES), "S2")


def build_s3() -> SMachine:
    hw = _pqrst_hw(_pqrst_letters(["1", "2", "3"]))
    table = [("1." + rid, t) for rid, t in S1_RULES] + [("2." + rid, t) for rid, t in S2_RULES]
    return SMachine(hw, _rules(hw, table), "S3")


def s4_fixed() -> set:
    return {Symbol(z + "3") for z in PQRST}


def build_s4() -> SMachine:
    s3 = build_s3()
    return compose_union(s3, decorate(s3, "prime", s4_fixed()), "S4")


# S5 .. S9 --------------------------------------------------------------------

# component order of the S5..S9 hardware
BLOCK = ["E", "x", "F", "E'", "p", "q", "r", "s", "t",
         "pbar", "qbar", "rbar", "sbar", "tbar", "F'"]
Z_SUFFIXES = ["0", "1", "2", "3", "4", "0'", "1'", "2'"]


def _block_hw(Y: Sequence[Symbol], hats: bool = False) -> SHardware:
    comps = []
    for c in BLOCK:
        if c in ("E", "F", "E'", "F'"):
            letters = [c]
        elif c == "x":
            letters = ["x", "x4"] + (["xhat"] if hats else [])
        else:
            letters = [c + s for s in Z_SUFFIXES]
            if hats:
                letters += [hat_name(c + s) for s in Z_SUFFIXES if s != "4"]
        comps.append((c, [Symbol(n) for n in letters]))
    tapes = []
    for j in range(len(BLOCK) - 1):
        left = BLOCK[j]
        if left in ("E", "x"):
            tapes.append((f"Y{j}", list(Y)))
        elif left in ("F", "E'"):
            tapes.append((f"Z{j}", []))
        else:
            tapes.append((f"D{j}", [DELTA]))
    return SHardware(comps, tapes)


def _default_Y(Y) -> list:
    if Y is None:
        Y = ["a", "b"]
    return [y if isinstance(y, Symbol) else Symbol(str(y)) for y in Y]


def _s4_on(hw: SHardware, bar: bool, id_prefix: str) -> list:
    """The S4 program transplanted onto the p..t (or pbar..tbar) components."""
    s4 = build_s4()
    rules = []
    for r in s4.rules:
        pairs = []
        for U, V in r.pairs():
            f = (lambda s: _rename(s, bar_name) if s != DELTA and s.pos() != DELTA else s) if bar else (lambda s: s)
            pairs.append((tuple(f(s) for s in U), tuple(f(s) for s in V)))
        rules.append(SRule.from_words(hw, id_prefix + r.id + ("b" if bar else ""), pairs))
    return rules


def s5_rules(hw: SHardware, Y) -> list:
    table = []
    for a in Y:
        an = a.base
        table.append((f"R[{an}]",
                      f"[x -> {an}^-1 x {an} ; p1' -> p0' ; "
                      f"q1' r1' s1' t1' pbar0 -> delta^-1 q0' r0' s0' t0' pbar1 delta ; "
                      f"qbar0 rbar0 sbar0 tbar0 -> qbar1 rbar1 sbar1 tbar1]"))
    return _rules(hw, table)


S6_RULE = ("S6", "[p0' -> p1 ; q0' r0' s0' t0' pbar1' -> q1 r1 s1 t1 pbar0 ; "
                 "qbar1' rbar1' sbar1' tbar1' -> qbar0 rbar0 sbar0 tbar0]")
S7_RULE = ("S7", "[E x -> E x4 ; p1 q1 r1 s1 t1 pbar0 -> p4 q4 r4 s4 t4 pbar4 ; "
                 "qbar0 rbar0 sbar0 tbar0 -> qbar4 rbar4 sbar4 tbar4]")


def build_s5(Y=None) -> SMachine:
    Y = _default_Y(Y)
    hw = _block_hw(Y)
    return SMachine(hw, s5_rules(hw, Y), "S5")


def build_s6(Y=None) -> SMachine:
    hw = _block_hw(_default_Y(Y))
    return SMachine(hw, _rules(hw, [S6_RULE]), "S6")


def build_s7(Y=None) -> SMachine:
    hw = _block_hw(_default_Y(Y))
    return SMachine(hw, _rules(hw, [S7_RULE]), "S7")


def build_s4_block(Y=None, bar: bool = False) -> SMachine:
    """S4 (or its barred copy) on the S5 hardware."""
    hw = _block_hw(_default_Y(Y))
    return SMachine(hw, _s4_on(hw, bar, ""), "S4bar" if bar else "S4")


def build_s8(Y=None) -> SMachine:
    Y = _default_Y(Y)
    hw = _block_hw(Y)
    rules = _s4_on(hw, False, "") + s5_rules(hw, Y) + _s4_on(hw, True, "")
    rules += _rules(hw, [S6_RULE, S7_RULE])
    return SMachine(hw, rules, "S8")


def s9_fixed(S8: SMachine) -> set:
    keep = {"E", "F", "E'", "F'"}
    out = set()
    for s in S8.hardware.state_letters():
        if s.base in keep or re.match(r"^[A-Za-z]+4'?$", s.base):
            out.add(s)
    return out


def build_s9(Y=None) -> SMachine:
    Y = _default_Y(Y)
    s8 = build_s8(Y)
    hatted = decorate(s8, "hat", s9_fixed(s8))
    return compose_union(s8, hatted, "S9")


# S_alpha, S_omega -------------------------------------------------------------

SALPHA_RULES = [
    ("a1", "[x -> alpha^-1 x alpha]"),
    ("a2", "[E x -> E x1]"),
    ("a3", "[x1 -> alpha x1 alpha^-1]"),
    ("a4", "[x1 F -> x2 F]"),
]

SOMEGA_RULES = [
    ("w1", "[x' -> omega x' omega^-1]"),
    ("w2", "[x' F' -> x1' F']"),
    ("w3", "[x1' -> omega^-1 x1' omega]"),
    ("w4", "[E' x1' -> E' x2']"),
]


def build_salpha() -> SMachine:
    hw = SHardware([("E", [Symbol("E")]), ("X", [Symbol(n) for n in ("x", "x1", "x2")]),
                    ("F", [Symbol("F")])], [("A1", [ALPHA]), ("A2", [ALPHA])])
    return SMachine(hw, _rules(hw, SALPHA_RULES), "Salpha")


def build_somega() -> SMachine:
    hw = SHardware([("E'", [Symbol("E'")]), ("X'", [Symbol(n) for n in ("x'", "x1'", "x2'")]),
                    ("F'", [Symbol("F'")])], [("W1", [OMEGA]), ("W2", [OMEGA])])
    return SMachine(hw, _rules(hw, SOMEGA_RULES), "Somega")


def build_standard(name: str, Y=None) -> SMachine:
    key = name.strip().lower().replace("_", "")
    simple = {
        "s1": build_s1, "s2": build_s2, "s3": build_s3, "s4": build_s4,
        "salpha": build_salpha, "somega": build_somega,
    }
    with_y = {"s5": build_s5, "s6": build_s6, "s7": build_s7, "s8": build_s8, "s9": build_s9}
    if key in simple:
        return simple[key]()
    if key in with_y:
        return with_y[key](Y)
    raise ValueError(f"unknown standard machine {name!r}")


STANDARD_NAMES = ["S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9", "Salpha", "Somega"]


# constructive histories ------------------------------------------------------

def s3_history(n: int) -> list:
    """History of the unique S3 computation taking p1 delta^n q1 r1 s1 t1 to p3."""
    if n <= 0:
        raise ValueError("S3 reaches p3 only for n > 0")
    h = []
    while n % 2 == 0:
        k = n // 2
        h += [("1.1", 1)] * k + [("1.2", 1)] + [("2.1", 1)] * k + [("2.2", 1)]
        n = k
    h += [("1.1", 1)] * ((n - 1) // 2) + [("1.3", 1)]
    return h


def inverse_history(h: Sequence) -> list:
    return [(rid, -s) for rid, s in reversed(h)]


def s4_history(n: int, suffix: str = "") -> list:
    """S4: from the unprimed start word to the primed one through p3."""
    h = s3_history(n)
    primed = [(rid + "'", s) for rid, s in h]
    out = h + inverse_history(primed)
    return [(rid + suffix, s) for rid, s in out]


def s8_history(u: Sequence[Symbol], n: int | None = None) -> list:
    """Ideal S8 computation for a positive u with n = |u|."""
    if n is None:
        n = len(u)
    if any(s.sign < 0 for s in u) or n != len(u):
        raise ValueError("the ideal S8 computation needs a positive u with n = |u|")
    h = []
    m = 0
    letters = list(u)
    while n > 0:
        h += s4_history(n)
        a = letters.pop()
        h.append((f"R[{a.base}]", 1))
        m += 1
        h += s4_history(m, "b")
        h.append(("S6", 1))
        n -= 1
    h.append(("S7", 1))
    return h


def s9_history(u: Sequence[Symbol], n: int | None = None) -> list:
    h = s8_history(u, n)
    return h + inverse_history([(rid + "h", s) for rid, s in h])


def salpha_history(n: int) -> list:
    return [("a1", 1)] * n + [("a2", 1)] + [("a3", 1)] * n + [("a4", 1)]


def somega_history(n: int) -> list:
    return [("w1", 1)] * n + [("w2", 1)] + [("w3", 1)] * n + [("w4", 1)]


# word types --------------------------------------------------------------------

TYPES = [(0, 0), (1, 0), (0, 1), (1, 1)]


def word_type(z: Sequence[Symbol]):
    """Type (l, l') of a reduced non-empty word z = a_k ... a_1, or None.

    Signs must alternate; the last letter a_1 is positive for l = 1 and
    negative for l = 0, the first letter a_k is positive for l' = 0.
    """
    z = tuple(z)
    if not z or not is_reduced(z):
        return None
    for a, b in zip(z, z[1:]):
        if a.sign == b.sign:
            return None
    first_pos = z[0].sign > 0
    last_pos = z[-1].sign > 0
    return (1 if last_pos else 0, 0 if first_pos else 1)


def type_sum(t) -> int:
    return t[0] - t[1]


def factorize_types(v: Sequence[Symbol], first_type=None):
    """Factor v = z_k ... z_1 into typed words with l_{j+1} = 1 - l'_j.

    Returns the list [(z_1, type_1), (z_2, type_2), ...] (rightmost factor
    first) or None.  ``first_type`` optionally pins the type of z_1.  The
    greedy choice takes the longest alternating factor from the right and
    backtracks when the chain condition fails.
    """
    v = tuple(v)
    if not v:
        return []
    if not is_reduced(v):
        return None

    def go(end: int, need_l):
        # factor v[:end]; the next factor (to the left) must have l == need_l
        if end == 0:
            return []
        start = end - 1
        while start > 0 and v[start - 1].sign != v[start].sign:
            start -= 1
        for s in range(start, end):
            z = v[s:end]
            t = word_type(z)
            if t is None:
                continue
            if need_l is not None and t[0] != need_l:
                continue
            rest = go(s, 1 - t[1])
            if rest is not None:
                return [(z, t)] + rest
        return None

    if first_type is None:
        return go(len(v), None)
    # pin the rightmost factor type
    end = len(v)
    start = end - 1
    while start > 0 and v[start - 1].sign != v[start].sign:
        start -= 1
    for s in range(start, end):
        z = v[s:end]
        if word_type(z) != tuple(first_type):
            continue
        rest = go(s, 1 - first_type[1])
        if rest is not None:
            return [(z, tuple(first_type))] + rest
    return None


def all_reduced_words(Y: Sequence[Symbol], max_len: int):
    letters = list(Y) + [y.inv() for y in Y]
    yield ()
    for n in range(1, max_len + 1):
        for w in product(letters, repeat=n):
            if is_reduced(w):
                yield w
