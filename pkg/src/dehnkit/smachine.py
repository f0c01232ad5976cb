"""S-machines: admissible words, rules with automatic free reduction,
computations, their classification and a bounded breadth-first search.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .words import (
    Symbol,
    format_symbol,
    format_word,
    free_reduce,
    inverse,
    parse_word,
)


class Inapplicable(Exception):
    pass


class StepError(Exception):
    def __init__(self, index: int, ref=None):
        super().__init__(f"history step {index} ({ref}) is not applicable")
        self.index = index
        self.ref = ref


class SHardware:
    """Ordered state components and the tape alphabets between them."""

    def __init__(self, components, tapes):
        # components: sequence of (name, letters); tapes: sequence of (name, letters)
        comps = tuple((str(n), frozenset(ls)) for n, ls in components)
        tps = tuple((str(n), frozenset(ls)) for n, ls in tapes)
        if len(tps) != len(comps) - 1:
            raise ValueError("need exactly one tape between consecutive components")
        self.components = comps
        self.tapes = tps
        self.comp_of: dict[Symbol, int] = {}
        for i, (name, ls) in enumerate(comps):
            for s in ls:
                if s in self.comp_of:
                    raise ValueError(f"state letter {format_symbol(s)} in two components")
                self.comp_of[s] = i
        self.tape_of: dict[Symbol, set] = {}
        for j, (_, ls) in enumerate(tps):
            for s in ls:
                if s in self.comp_of:
                    raise ValueError(f"{format_symbol(s)} is both a state and a tape letter")
                self.tape_of.setdefault(s, set()).add(j)

    @property
    def n(self) -> int:
        return len(self.tapes)

    def __eq__(self, other):
        return isinstance(other, SHardware) and self.components == other.components and self.tapes == other.tapes

    def __hash__(self):
        return hash((self.components, self.tapes))

    def tape_letters(self) -> frozenset:
        out = set()
        for _, ls in self.tapes:
            out |= ls
        return frozenset(out)

    def state_letters(self) -> frozenset:
        return frozenset(self.comp_of)


class AdmissibleWord(NamedTuple):
    states: tuple
    segments: tuple

    def flat(self) -> tuple:
        out = [self.states[0]]
        for seg, q in zip(self.segments, self.states[1:]):
            out.extend(seg)
            out.append(q)
        return tuple(out)

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.states) + sum(len(s) for s in self.segments)

    @property
    def size(self) -> int:
        return len(self.states) + sum(len(s) for s in self.segments)

    def is_positive(self) -> bool:
        return all(s.sign > 0 for seg in self.segments for s in seg)

    def contains(self, target: Sequence[Symbol]) -> bool:
        flat = self.flat()
        m = len(target)
        if m == 0:
            return True
        first = target[0]
        for i in range(len(flat) - m + 1):
            if flat[i] == first and flat[i:i + m] == tuple(target):
                return True
        return False

    def text(self) -> str:
        return format_word(self.flat())


def make_word(hw: SHardware, w: Sequence[Symbol]) -> AdmissibleWord:
    """Split a flat word into states and segments, checking admissibility."""
    states: list[Symbol] = []
    segs: list[list[Symbol]] = []
    cur: list[Symbol] = []
    for s in w:
        if s in hw.comp_of:
            if states:
                segs.append(cur)
            elif cur:
                raise ValueError("tape letters before the first state letter")
            cur = []
            states.append(s)
        elif s.inv() in hw.comp_of:
            raise ValueError(f"inverted state letter {format_symbol(s)}")
        else:
            cur.append(s)
    if cur:
        raise ValueError("tape letters after the last state letter")
    word = AdmissibleWord(tuple(states), tuple(tuple(free_reduce(c)) for c in segs))
    check_admissible(hw, word)
    return word


def parse_admissible(hw: SHardware, text: str) -> AdmissibleWord:
    return make_word(hw, parse_word(text))


def check_admissible(hw: SHardware, W: AdmissibleWord) -> None:
    if len(W.states) != len(hw.components):
        raise ValueError(f"expected {len(hw.components)} state letters, got {len(W.states)}")
    for i, q in enumerate(W.states):
        if hw.comp_of.get(q) != i:
            raise ValueError(f"{format_symbol(q)} is not a letter of component {hw.components[i][0]}")
    for j, seg in enumerate(W.segments):
        letters = hw.tapes[j][1]
        for s in seg:
            if s.pos() not in letters:
                raise ValueError(f"{format_symbol(s)} not in tape {hw.tapes[j][0]}")
        if free_reduce(seg) != tuple(seg):
            raise ValueError("segment not reduced")


class Part(NamedTuple):
    lo: int
    hi: int
    u_states: tuple
    u_segs: tuple
    x: tuple
    v_states: tuple
    v_segs: tuple
    y: tuple

    def inverse(self) -> "Part":
        return Part(self.lo, self.hi, self.v_states, self.v_segs, inverse(self.x),
                    self.u_states, self.u_segs, inverse(self.y))

    def U(self) -> tuple:
        return _interleave(self.u_states, self.u_segs)

    def V(self) -> tuple:
        return self.x + _interleave(self.v_states, self.v_segs) + self.y


def _interleave(states, segs) -> tuple:
    out = [states[0]]
    for seg, q in zip(segs, states[1:]):
        out.extend(seg)
        out.append(q)
    return tuple(out)


def _split_side(hw: SHardware, w: Sequence[Symbol], allow_ends: bool):
    idx = [k for k, s in enumerate(w) if s in hw.comp_of]
    if not idx:
        raise ValueError("rule side without state letters")
    if not allow_ends and (idx[0] != 0 or idx[-1] != len(w) - 1):
        raise ValueError("left side must start and end with state letters")
    states = tuple(w[k] for k in idx)
    comps = [hw.comp_of[q] for q in states]
    if comps != list(range(comps[0], comps[0] + len(comps))):
        raise ValueError("state letters of a rule side must sit in consecutive components")
    segs = tuple(free_reduce(w[a + 1:b]) for a, b in zip(idx, idx[1:]))
    x = free_reduce(w[:idx[0]])
    y = free_reduce(w[idx[-1] + 1:])
    return comps[0], comps[-1], states, segs, x, y


@dataclass(frozen=True)
class SRule:
    id: str
    parts: tuple
    sign: int = 1

    @classmethod
    def from_words(cls, hw: SHardware, rid: str, pairs, sign: int = 1) -> "SRule":
        parts = []
        for U, V in pairs:
            lo, hi, us, useg, ux, uy = _split_side(hw, tuple(U), allow_ends=False)
            lo2, hi2, vs, vseg, x, y = _split_side(hw, tuple(V), allow_ends=True)
            if (lo, hi) != (lo2, hi2):
                raise ValueError(f"rule {rid}: sides cover different components")
            if lo == 0 and x:
                raise ValueError(f"rule {rid}: letters left of the first component")
            if hi == hw.n and y:
                raise ValueError(f"rule {rid}: letters right of the last component")
            parts.append(Part(lo, hi, us, useg, x, vs, vseg, y))
        parts.sort(key=lambda p: p.lo)
        for a, b in zip(parts, parts[1:]):
            if a.hi >= b.lo:
                raise ValueError(f"rule {rid}: overlapping parts")
        rule = cls(rid, tuple(parts), sign)
        check_rule(hw, rule)
        return rule

    def inverse(self) -> "SRule":
        return SRule(self.id, tuple(p.inverse() for p in self.parts), -self.sign)

    @property
    def ref(self) -> tuple:
        return (self.id, self.sign)

    def pairs(self) -> list:
        return [(p.U(), p.V()) for p in self.parts]

    def text(self) -> str:
        body = " ; ".join(f"{format_word(U)} -> {format_word(V)}" for U, V in self.pairs())
        return f"[{body}]"


def check_rule(hw: SHardware, r: SRule) -> None:
    for p in r.parts:
        for k, q in enumerate(p.u_states):
            if hw.comp_of.get(q) != p.lo + k:
                raise ValueError(f"rule {r.id}: misplaced state {format_symbol(q)}")
        for k, q in enumerate(p.v_states):
            if hw.comp_of.get(q) != p.lo + k:
                raise ValueError(f"rule {r.id}: misplaced state {format_symbol(q)}")
        checks = [(p.lo - 1, p.x), (p.hi, p.y)]
        checks += [(p.lo + k, s) for k, s in enumerate(p.u_segs)]
        checks += [(p.lo + k, s) for k, s in enumerate(p.v_segs)]
        for j, w in checks:
            if not w:
                continue
            letters = hw.tapes[j][1]
            for s in w:
                if s.pos() not in letters:
                    raise ValueError(f"rule {r.id}: {format_symbol(s)} not in tape {hw.tapes[j][0]}")


def invert_srule(r: SRule) -> SRule:
    return r.inverse()


def ref_text(ref) -> str:
    rid, sign = ref
    return rid if sign > 0 else f"{rid}^-1"


def parse_ref(tok: str) -> tuple:
    if tok.endswith("^-1"):
        return (tok[:-3], -1)
    return (tok, 1)


def matches(W: AdmissibleWord, r: SRule) -> bool:
    st, sg = W.states, W.segments
    for p in r.parts:
        for k, q in enumerate(p.u_states):
            if st[p.lo + k] != q:
                return False
        for k, s in enumerate(p.u_segs):
            if sg[p.lo + k] != s:
                return False
    return True


def apply_srule(W: AdmissibleWord, r: SRule) -> AdmissibleWord:
    """Replace every U_i by V_i at once and reduce the touched segments."""
    if not matches(W, r):
        raise Inapplicable(r.id)
    states = list(W.states)
    segs = list(W.segments)
    touched = {}
    for p in r.parts:
        states[p.lo:p.hi + 1] = p.v_states
        for k, s in enumerate(p.v_segs):
            segs[p.lo + k] = s
        if p.x:
            pre, post = touched.get(p.lo - 1, ((), ()))
            touched[p.lo - 1] = (pre, post + p.x)
        if p.y:
            pre, post = touched.get(p.hi, ((), ()))
            touched[p.hi] = (p.y + pre, post)
    for j, (pre, post) in touched.items():
        segs[j] = free_reduce(pre + segs[j] + post)
    return AdmissibleWord(tuple(states), tuple(segs))


@dataclass
class SMachine:
    hardware: SHardware
    rules: list  # positive rules, declaration order
    name: str = ""
    _index: dict = field(default_factory=dict, repr=False)
    _by_state: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._rebuild()

    def _rebuild(self):
        self._index = {}
        self._by_state = {}
        for k, r in enumerate(self.rules):
            if r.id in self._index:
                raise ValueError(f"duplicate rule id {r.id}")
            inv = r.inverse()
            self._index[r.id] = (k, r, inv)
            for rr, o in ((r, 0), (inv, 1)):
                key = rr.parts[0].u_states[0]
                self._by_state.setdefault(key, []).append(((k, o), rr))
        for v in self._by_state.values():
            v.sort(key=lambda t: t[0])

    def rule(self, ref) -> SRule:
        rid, sign = ref
        try:
            _, r, inv = self._index[rid]
        except KeyError:
            raise KeyError(f"unknown rule {rid}") from None
        return r if sign > 0 else inv

    def order(self, ref) -> tuple:
        k = self._index[ref[0]][0]
        return (k, 0 if ref[1] > 0 else 1)

    def all_rules(self) -> list:
        out = []
        for r in self.rules:
            out.append(r)
            out.append(r.inverse())
        return out

    def applicable(self, W: AdmissibleWord) -> list:
        """Rules (positive and inverse) applicable to W, in declaration order."""
        cands = []
        for q in W.states:
            cands.extend(self._by_state.get(q, ()))
        cands.sort(key=lambda t: t[0])
        return [r for _, r in cands if matches(W, r)]

    def word(self, text: str) -> AdmissibleWord:
        return parse_admissible(self.hardware, text)

    def is_symmetric(self) -> bool:
        return True  # inverses are always derived from the positive rules

    def __len__(self):
        return len(self.rules)


@dataclass
class SComputation:
    words: list
    history: list
    machine: SMachine | None = None

    @property
    def length(self) -> int:
        return len(self.words)

    @property
    def space(self) -> int:
        return max(w.size for w in self.words)

    @property
    def area(self) -> int:
        return sum(w.size for w in self.words)

    @property
    def start(self) -> AdmissibleWord:
        return self.words[0]

    @property
    def end(self) -> AdmissibleWord:
        return self.words[-1]

    def reverse(self) -> "SComputation":
        hist = [(rid, -s) for rid, s in reversed(self.history)]
        return SComputation(list(reversed(self.words)), hist, self.machine)

    def history_text(self) -> str:
        return " ".join(ref_text(h) for h in self.history)


def run_history(S: SMachine, W: AdmissibleWord, h: Iterable) -> SComputation:
    words = [W]
    hist = []
    for k, ref in enumerate(h):
        r = S.rule(ref)
        try:
            W = apply_srule(W, r)
        except Inapplicable:
            raise StepError(k, ref_text(ref)) from None
        words.append(W)
        hist.append(tuple(ref))
    return SComputation(words, hist, S)


def is_reduced_history(h: Sequence) -> bool:
    for a, b in zip(h, h[1:]):
        if a[0] == b[0] and a[1] == -b[1]:
            return False
    return True


def algebraic_sum(w) -> int:
    return sum(s.sign for s in w)


# proper / semiproper ------------------------------------------------------

PROPER = "proper"
SEMIPROPER = "semiproper"
NEITHER = "neither"


def classify_computation(c: SComputation, S: SMachine | None = None) -> str:
    """Occurrence-tracking classification.

    Every tape letter carries the step that inserted it (0 for letters of the
    first word).  On a tape whose alphabet is a single letter only counts
    matter, so letters inserted in the same step cancel among themselves
    first and then prefer letters from the first word.  On other tapes the
    positional stack reduction decides which occurrences meet.
    """
    S = S or c.machine
    if S is None:
        raise ValueError("classification needs the machine")
    hw = S.hardware
    abelian = [len(ls) == 1 for _, ls in hw.tapes]
    segs = [[(s, 0) for s in seg] for seg in c.words[0].segments]
    proper = True
    semi = True
    for t, ref in enumerate(c.history, start=1):
        r = S.rule(ref)
        add_pre: dict[int, list] = {}
        add_post: dict[int, list] = {}
        for p in r.parts:
            for k, (old_u, new_v) in enumerate(zip(p.u_segs, p.v_segs)):
                j = p.lo + k
                if old_u == new_v:
                    continue
                for s, m in segs[j]:
                    if s.sign < 0 and 0 < m < t:
                        semi = False
                segs[j] = [(s, t) for s in new_v]
            if p.x:
                add_post.setdefault(p.lo - 1, []).extend((s, t) for s in p.x)
            if p.y:
                add_pre.setdefault(p.hi, []).extend((s, t) for s in p.y)
        for j in set(add_pre) | set(add_post):
            pre = add_pre.get(j, [])
            post = add_post.get(j, [])
            if abelian[j]:
                segs[j], bad = _abelian_merge(segs[j], pre + post, t)
            else:
                segs[j], bad = _stack_merge(pre + segs[j] + post, t)
            if bad:
                semi = False
        for seg in segs:
            for s, m in seg:
                if s.sign < 0 and m > 0:
                    proper = False
                    break
    if proper and semi:
        return PROPER
    if semi:
        return SEMIPROPER
    return NEITHER


def _abelian_merge(old, new, t):
    letter = None
    for s, _ in old + new:
        letter = s.pos()
        break
    if letter is None:
        return [], False
    npos = sum(1 for s, _ in new if s.sign > 0)
    nneg = len(new) - npos
    k = min(npos, nneg)
    npos -= k
    nneg -= k
    bad = False
    old = sorted(old, key=lambda e: e[1])
    old_sign = old[0][0].sign if old else 0
    if old_sign < 0 and npos:
        k = min(npos, len(old))
        bad = any(m > 0 for _, m in old[:k])
        old = old[k:]
        npos -= k
    elif old_sign > 0 and nneg:
        k = min(nneg, len(old))
        old = old[k:]
        nneg -= k
    out = list(old)
    out += [(letter, t)] * npos
    out += [(letter.inv(), t)] * nneg
    return out, bad


def _stack_merge(entries, t):
    out = []
    bad = False
    for s, m in entries:
        if out:
            s2, m2 = out[-1]
            if s2 == s.inv():
                out.pop()
                for a, ma in ((s, m), (s2, m2)):
                    if a.sign < 0 and 0 < ma < t:
                        bad = True
                continue
        out.append((s, m))
    return out, bad


# bounded search -------------------------------------------------------------

class SearchResult(list):
    """List of computations plus a ``truncated`` flag."""

    truncated: bool = False


def bounded_search(S: SMachine, W: AdmissibleWord, targets=(), max_len: int = 64,
                   max_word: int | None = None, dedupe: bool = False,
                   first_only: bool = False) -> SearchResult:
    """All reduced computations from W (at most ``max_len`` rule applications,
    words no longer than ``max_word``) whose last word contains every target.

    Order is breadth first, then lexicographic in rule declaration order.
    With ``dedupe`` each word is visited once, which turns the enumeration
    into a reachability query returning at most one computation per end word.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if max_word is None:
        max_word = 2 * W.size + 16
    targets = [tuple(t) for t in targets]
    res = SearchResult()
    # node = (word, parent index, ref)
    nodes = [(W, -1, None)]
    seen = {W} if dedupe else None
    frontier = [0]
    depth = 0

    def hit(word):
        return all(word.contains(t) for t in targets)

    def build(i):
        hist = []
        words = []
        while i >= 0:
            w, parent, ref = nodes[i]
            words.append(w)
            if ref is not None:
                hist.append(ref)
            i = parent
        words.reverse()
        hist.reverse()
        return SComputation(words, hist, S)

    if hit(W):
        res.append(build(0))
        if first_only:
            return res
    while frontier:
        nxt = []
        for i in frontier:
            word, _, last = nodes[i]
            for r in S.applicable(word):
                if last is not None and r.id == last[0] and r.sign == -last[1]:
                    continue
                if depth >= max_len:
                    res.truncated = True
                    break
                w2 = apply_srule(word, r)
                if w2.size > max_word:
                    res.truncated = True
                    continue
                if dedupe:
                    if w2 in seen:
                        continue
                    seen.add(w2)
                nodes.append((w2, i, r.ref))
                k = len(nodes) - 1
                nxt.append(k)
                if hit(w2):
                    res.append(build(k))
                    if first_only:
                        return res
        frontier = nxt
        depth += 1
    return res


# text format -----------------------------------------------------------------

_RULE = re.compile(r"^rule\s+(?P<id>\S+?)\s*:\s*\[(?P<body>.*)\]\s*$")


def emit_smachine(S: SMachine) -> str:
    lines = []
    if S.name:
        lines.append(f"# {S.name}")
    hw = S.hardware
    for i, (name, letters) in enumerate(hw.components):
        lines.append(f"component {name} = " + " ".join(sorted(format_symbol(s) for s in letters)))
        if i < hw.n:
            tname, tl = hw.tapes[i]
            lines.append(f"tape {tname} = " + " ".join(sorted(format_symbol(s) for s in tl)))
    for r in S.rules:
        lines.append(f"rule {r.id}: {r.text()}")
    return "\n".join(lines) + "\n"


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def parse_smachine(text: str) -> SMachine:
    comps, tapes, raw_rules = [], [], []
    name = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if not name and lineno == 1:
                name = s[1:].strip()
            continue
        try:
            if s.startswith("component "):
                lhs, _, rhs = s[len("component "):].partition("=")
                comps.append((lhs.strip(), parse_word(rhs)))
            elif s.startswith("tape "):
                lhs, _, rhs = s[len("tape "):].partition("=")
                tapes.append((lhs.strip(), parse_word(rhs)))
            elif s.startswith("rule "):
                m = _RULE.match(s)
                if not m:
                    raise ValueError("malformed rule")
                pairs = []
                for chunk in m.group("body").split(";"):
                    if "->" not in chunk:
                        raise ValueError("rule part without '->'")
                    u, _, v = chunk.partition("->")
                    pairs.append((parse_word(u), parse_word(v)))
                raw_rules.append((lineno, m.group("id"), pairs))
            else:
                raise ValueError(f"unknown directive {s.split()[0]!r}")
        except ValueError as e:
            raise ParseError(lineno, str(e)) from None
    try:
        hw = SHardware(comps, tapes)
    except ValueError as e:
        raise ParseError(0, str(e)) from None
    rules = []
    for lineno, rid, pairs in raw_rules:
        try:
            rules.append(SRule.from_words(hw, rid, pairs))
        except ValueError as e:
            raise ParseError(lineno, str(e)) from None
    return SMachine(hw, rules, name)


def format_computation(c: SComputation) -> str:
    lines = [c.words[0].text()]
    for ref, w in zip(c.history, c.words[1:]):
        lines.append(f"  --{ref_text(ref)}--> {w.text()}")
    return "\n".join(lines)


@dataclass
class ReachReport:
    """Summary of a breadth-first sweep over the bounded word graph."""

    first: SComputation | None
    distance: int | None
    shortest_count: int
    end_words: set
    visited: int
    truncated: bool

    @property
    def reachable(self) -> bool:
        return self.first is not None


def reach(S: SMachine, W: AdmissibleWord, targets=(), max_len: int = 10_000,
          max_word: int | None = None) -> ReachReport:
    """Visit every word reachable from W within the bounds, once.

    Reports the first (shortest, lexicographically least) computation to a
    target word, how many distinct shortest histories reach that distance,
    and the set of visited words containing the targets.  Every reduced
    computation lives inside this graph, so an empty ``end_words`` proves
    that no computation through words of at most ``max_word`` letters (and
    at most ``max_len`` steps) reaches a target.
    """
    if max_word is None:
        max_word = 2 * W.size + 16
    targets = [tuple(t) for t in targets]

    def hit(word):
        return all(word.contains(t) for t in targets)

    parent: dict = {W: None}
    count = {W: 1}
    layer = [W]
    depth = 0
    truncated = False
    ends = set()
    first = None
    dist = None
    shortest = 0
    if hit(W):
        ends.add(W)
        first, dist, shortest = SComputation([W], [], S), 0, 1
    while layer and depth < max_len:
        nxt = []
        nxt_set = set()
        for word in layer:
            for r in S.applicable(word):
                w2 = apply_srule(word, r)
                if w2.size > max_word:
                    truncated = True
                    continue
                if w2 in nxt_set:
                    count[w2] += count[word]
                    continue
                if w2 in parent:
                    continue
                parent[w2] = (word, r.ref)
                count[w2] = count[word]
                nxt_set.add(w2)
                nxt.append(w2)
        depth += 1
        best = [w for w in nxt if hit(w)]
        ends.update(best)
        if first is None and best:
            dist = depth
            shortest = sum(count[w] for w in best)
            first = _trace(S, parent, best[0])
        layer = nxt
    if layer and depth >= max_len:
        if any(S.applicable(word) for word in layer):
            truncated = True
    return ReachReport(first, dist, shortest, ends, len(parent), truncated)


def _trace(S, parent, w) -> SComputation:
    words, hist = [w], []
    while parent[w] is not None:
        w, ref = parent[w]
        words.append(w)
        hist.append(ref)
    words.reverse()
    hist.reverse()
    return SComputation(words, hist, S)
