"""Certificates that a word is trivial in a presented group.

A :class:`Witness` is a start word plus a list of relator insertions.
Replaying the insertions (each followed by free reduction) must reach the
empty word; the number of insertions bounds the area of the word.

Two producers live here:

* :func:`disc_witness` turns an S-machine computation ending at ``W0``
  into a witness for ``K(W_start)``, one annulus per rule application;
* :func:`trivial_machine_search` runs the two-tape nondeterministic machine
  that guesses a derivation, and :func:`trace_to_witness` converts its
  accepting traces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .presentation import GroupPresentation, build_K, is_kappa, least_rotation, theta
from .words import Symbol, format_symbol, format_word, free_reduce, inverse, parse_word


class WitnessError(ValueError):
    pass


class WitnessMove(NamedTuple):
    position: int
    relator: int
    rotation: int = 0
    sign: int = 1

    def text(self) -> str:
        return f"apply {self.position} {self.relator} {self.rotation} {self.sign}"


@dataclass
class Witness:
    start: tuple
    moves: list
    declared_area: int | None = None
    annuli: list = field(default_factory=list)  # moves per annulus (disc witnesses only)

    def __post_init__(self):
        if self.declared_area is None:
            self.declared_area = len(self.moves)

    @property
    def area(self) -> int:
        return len(self.moves)


@dataclass
class VerifyResult:
    ok: bool
    area: int
    step: int | None = None  # first failing move; len(moves) when only the end word is wrong
    word: tuple = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


def rotate(w: Sequence, r: int) -> tuple:
    w = tuple(w)
    if not w:
        return w
    r %= len(w)
    return w[r:] + w[:r]


def move_word(P: GroupPresentation, m: WitnessMove) -> tuple:
    if not 0 <= m.relator < len(P.relators):
        raise WitnessError(f"relator id {m.relator} out of range")
    if m.sign not in (1, -1):
        raise WitnessError(f"bad sign {m.sign}")
    w = P.relators[m.relator].word
    if not 0 <= m.rotation < max(len(w), 1):
        raise WitnessError(f"rotation {m.rotation} out of range")
    return rotate(w if m.sign > 0 else inverse(w), m.rotation)


def _splice(w: tuple, pos: int, d: Sequence) -> tuple:
    # w is freely reduced, so cancellation only spreads from the insertion point
    out = list(w[:pos])
    for s in d:
        if out and out[-1] == s.inv():
            out.pop()
        else:
            out.append(s)
    right = w[pos:]
    for i, s in enumerate(right):
        if out and out[-1] == s.inv():
            out.pop()
        else:
            out.extend(right[i:])
            break
    return tuple(out)


def apply_relator(w: Sequence[Symbol], P: GroupPresentation, move: WitnessMove) -> tuple:
    w = tuple(w)
    if not 0 <= move.position <= len(w):
        raise WitnessError(f"position {move.position} outside word of length {len(w)}")
    d = move_word(P, move)
    return free_reduce(w[:move.position] + d + w[move.position:])


def verify_witness(P: GroupPresentation, W: Witness) -> VerifyResult:
    w = free_reduce(W.start)
    for k, m in enumerate(W.moves):
        if not 0 <= m.position <= len(w):
            return VerifyResult(False, k, k, w, f"position {m.position} outside word of length {len(w)}")
        try:
            d = move_word(P, m)
        except WitnessError as e:
            return VerifyResult(False, k, k, w, str(e))
        w = _splice(w, m.position, d)
    if w:
        return VerifyResult(False, len(W.moves), len(W.moves), w, "final word is not empty")
    if W.declared_area != len(W.moves):
        return VerifyResult(False, len(W.moves), len(W.moves), w,
                            f"declared area {W.declared_area} but {len(W.moves)} moves")
    return VerifyResult(True, len(W.moves))


# relator lookup -------------------------------------------------------------

def _cyclic_key(w: tuple) -> tuple:
    return tuple(format_symbol(s) for s in least_rotation(w))


class RelatorIndex:
    """Find the stored relator, rotation and sign that spell a given cyclic word."""

    def __init__(self, P: GroupPresentation):
        self.P = P
        self._by_key: dict = {}
        for i, r in enumerate(P.relators):
            if r.category == "hub":
                continue
            self._by_key.setdefault(_cyclic_key(r.word), i)
            self._by_key.setdefault(_cyclic_key(inverse(r.word)), i)

    def find(self, d: Sequence[Symbol], hint: int | None = None) -> WitnessMove:
        d = tuple(d)
        i = hint if hint is not None else self._by_key.get(_cyclic_key(d))
        if i is None:
            raise WitnessError(f"no relator matches {format_word(d)}")
        base = self.P.relators[i].word
        for sign, w in ((1, base), (-1, inverse(base))):
            if len(w) != len(d):
                break
            for r in range(len(w)):
                if w[r:] + w[:r] == d:
                    return WitnessMove(0, i, r, sign)
        raise WitnessError(f"relator {i} does not spell {format_word(d)}")


# disc witnesses -------------------------------------------------------------

class _Sweep:
    def __init__(self, P: GroupPresentation, index: RelatorIndex, hw):
        self.P = P
        self.index = index
        self.hw = hw
        self.word: tuple = ()
        self.moves: list = []

    def insert(self, pos: int, d: tuple) -> None:
        m = self.index.find(d)
        self.moves.append(m._replace(position=pos))
        self.word = _splice(self.word, pos, d)

    def commute(self, pos: int, rho: Symbol) -> int:
        # z rho -> rho z for the letter z just left of rho at pos
        z = self.word[pos - 1]
        self.insert(pos, (z.inv(), rho, z, rho.inv()))
        return pos - 1


def _cut(A: tuple, x: tuple) -> int:
    c = 0
    while c < len(A) and c < len(x) and A[len(A) - 1 - c] == x[c].inv():
        c += 1
    return c


def _annulus(sw: _Sweep, rule, sign: int, N: int) -> None:
    """Move one copy of the rule letter through every block of K(W)."""
    hw = sw.hw
    t = theta(rule.id)
    rho = t if sign > 0 else t.inv()
    by_hi = {p.hi: p for p in rule.parts}
    by_lo = {p.lo: p for p in rule.parts}
    covered = set()
    for p in rule.parts:
        covered.update(range(p.lo, p.hi + 1))

    # seed rho kappa rho^-1 at every kappa letter
    seen = 0
    while seen < 4 * N:
        pos = [i for i, s in enumerate(sw.word) if is_kappa(s)][seen]
        k = sw.word[pos]
        sw.insert(pos, (rho, k, rho.inv(), k.inv()))
        seen += 1

    # sweep rho leftwards across each block
    kpos = [i for i, s in enumerate(sw.word) if is_kappa(s)]
    for b in range(4 * N):
        kpos = [i for i, s in enumerate(sw.word) if is_kappa(s)]
        pos = kpos[b] - 1
        if sw.word[pos] != rho:
            raise WitnessError("seeded rule letter not found")
        while pos > 0:
            z = sw.word[pos - 1]
            if z.pos() in hw.tape_of:
                pos = sw.commute(pos, rho)
            elif z.pos() in hw.comp_of:
                j = hw.comp_of[z.pos()]
                if j not in covered:
                    pos = sw.commute(pos, rho)
                elif z.sign > 0 and j in by_hi:
                    pos = _part_move(sw, pos, by_hi[j], sign, rho, +1)
                elif z.sign < 0 and j in by_lo:
                    pos = _part_move(sw, pos, by_lo[j], sign, rho, -1)
                else:
                    raise WitnessError(f"rule {rule.id} does not match the block at {format_symbol(z)}")
            else:
                break
            if pos >= len(sw.word) or sw.word[pos] != rho:
                break  # cancelled against the far corner


def _part_move(sw: _Sweep, pos: int, p, sign: int, rho: Symbol, orient: int) -> int:
    """Carry rho across one part; ``p`` is the positive part, ``orient`` the block direction."""
    t = rho if sign > 0 else rho.inv()
    if sign > 0:
        U = p.U()
        seen = U if orient > 0 else inverse(U)
        if sw.word[pos - len(U):pos] != seen:
            raise WitnessError("part does not match the block")
        if orient > 0:
            d = inverse(U) + (rho,) + p.V() + (rho.inv(),)
        else:
            d = U + (rho,) + inverse(p.V()) + (rho.inv(),)
        sw.insert(pos, d)
        return pos - len(U)
    # inverse application: the block shows the interleaved V states, and the
    # side letters x, y of the part must be carried across separately
    Vc = p.inverse().U()
    seen = Vc if orient > 0 else inverse(Vc)
    if sw.word[pos - len(Vc):pos] != seen:
        raise WitnessError("part does not match the block")
    A = sw.word[:pos - len(Vc)]
    if orient > 0:
        lead, tail = inverse(p.x), inverse(p.y)
        d = inverse(Vc) + lead + (t.inv(),) + p.U() + (t,) + tail
    else:
        lead, tail = p.y, p.x
        d = Vc + lead + (t.inv(),) + inverse(p.U()) + (t,) + tail
    c = _cut(A, lead)
    la = len(A) - c + len(lead) - c
    sw.insert(pos, d)
    q = la + 2 + len(p.U()) + len(tail)
    for _ in range(len(tail)):
        q = sw.commute(q, rho)
    if sw.word[la] != rho:
        raise WitnessError("lost track of the rule letter")
    return la


def disc_witness(comp, P: GroupPresentation, machine=None) -> Witness:
    """Witness that ``K(W)`` is trivial, W the first word of ``comp`` (which ends at W0).

    Each rule application W_i -> W_{i+1} costs one annulus: the rule letter is
    seeded next to every kappa, swept across each block with one relator per
    part, untouched state letter and tape letter, and cancelled at the next
    kappa.  A single hub move removes ``K(W0)`` at the end.
    """
    S = machine if machine is not None else comp.machine
    if S is None:
        raise WitnessError("computation carries no machine")
    if P.hub_index is None:
        raise WitnessError("presentation has no hub relator")
    N = P.N
    hw = S.hardware
    hub = P.relators[P.hub_index].word
    W0 = comp.words[-1].flat()
    if least_rotation(build_K(W0, N)) != hub:
        raise WitnessError("computation does not end at the hub word")
    index = RelatorIndex(P)
    sw = _Sweep(P, index, hw)
    start = build_K(comp.words[0].flat(), N)
    sw.word = start
    c: tuple = ()
    annuli = []
    for i, (rid, sign) in enumerate(comp.history):
        before = len(sw.moves)
        rule = S.rule((rid, 1))
        _annulus(sw, rule, sign, N)
        rho = theta(rid) if sign > 0 else theta(rid).inv()
        c = free_reduce(c + (rho,))
        want = free_reduce(c + build_K(comp.words[i + 1].flat(), N) + inverse(c))
        if sw.word != want:
            raise WitnessError(f"annulus {i} ({rid}) did not produce K of the next word")
        annuli.append(len(sw.moves) - before)
    d = inverse(build_K(W0, N))
    m = index.find(d, hint=P.hub_index)
    sw.moves.append(m._replace(position=len(c)))
    sw.word = _splice(sw.word, len(c), d)
    if sw.word:
        raise WitnessError("hub move did not empty the word")
    return Witness(start, sw.moves, len(sw.moves), annuli)


def annulus_band(comp, W: Witness, N: int) -> list:
    """Per annulus: (|W_i|, moves, lower, upper) with the band [|W_i|/2, 2(|W_i|+2)] * 4N."""
    out = []
    for Wi, m in zip(comp.words, W.annuli):
        n = Wi.size
        out.append((n, m, 4 * N * n / 2, 4 * N * 2 * (n + 2)))
    return out


# witness files ---------------------------------------------------------------

def emit_witness(W: Witness, P: GroupPresentation | None = None) -> str:
    lines = [f"witness {P.digest() if P is not None else '-'}",
             f"start {format_word(W.start, compress=False)}",
             f"area {W.declared_area}"]
    lines += [m.text() for m in W.moves]
    return "\n".join(lines) + "\n"


def parse_witness(text: str) -> tuple:
    """Return (witness, presentation digest or None)."""
    digest = None
    start: tuple = ()
    area = None
    moves = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "witness":
                digest = None if rest.strip() in ("", "-") else rest.strip()
            elif head == "start":
                start = parse_word(rest)
            elif head == "area":
                area = int(rest)
            elif head == "apply":
                a = [int(x) for x in rest.split()]
                if len(a) != 4:
                    raise ValueError("apply needs 4 integers")
                moves.append(WitnessMove(*a))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ValueError as e:
            raise WitnessError(f"line {n}: {e}") from None
    return Witness(start, moves, len(moves) if area is None else area), digest


# the trivial machine ---------------------------------------------------------

class Move(NamedTuple):
    tape: int
    letter: Symbol

    def text(self) -> str:
        return f"move {self.tape} {format_symbol(self.letter)}"


class Substitution(NamedTuple):
    pair: int

    def text(self) -> str:
        return f"sub {self.pair}"


class Reduction(NamedTuple):
    letter: Symbol

    def text(self) -> str:
        return f"reduce {format_symbol(self.letter)}"


class Accept(NamedTuple):
    def text(self) -> str:
        return "accept"


@dataclass
class TrivialMachineTrace:
    start: tuple
    steps: list

    @property
    def substitutions(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, Substitution))

    def text(self) -> str:
        lines = [f"trace {format_word(self.start, compress=False)}"]
        return "\n".join(lines + [s.text() for s in self.steps]) + "\n"


class NotFound(NamedTuple):
    start: tuple
    max_area: int
    explored: int

    def __bool__(self):
        return False


class TraceError(ValueError):
    def __init__(self, step: int, msg: str):
        self.step = step
        super().__init__(f"step {step}: {msg}")


def substitution_pairs(P: GroupPresentation) -> list:
    """All (u, v) with u v^-1 a cyclic shift of a relator or of its inverse."""
    seen = set()
    out = []
    for r in P.relators:
        for w in (r.word, inverse(r.word)):
            for k in range(len(w)):
                rot = w[k:] + w[:k]
                for cut in range(len(rot) + 1):
                    pair = (rot[:cut], inverse(rot[cut:]))
                    if pair not in seen:
                        seen.add(pair)
                        out.append(pair)
    return out


def replay_trace(P: GroupPresentation, t: TrivialMachineTrace, pairs=None) -> tuple:
    """Run the trace and return the final (tape1, tape2); raise TraceError on a bad step."""
    pairs = substitution_pairs(P) if pairs is None else pairs
    t1, t2 = list(t.start), []
    target = free_reduce(t.start)
    for k, st in enumerate(t.steps):
        if isinstance(st, Move):
            src, dst = (t1, t2) if st.tape == 1 else (t2, t1)
            if st.tape not in (1, 2) or not src or src[-1] != st.letter:
                raise TraceError(k, f"tape {st.tape} does not end with {format_symbol(st.letter)}")
            src.pop()
            dst.append(st.letter.inv())
        elif isinstance(st, Substitution):
            if not 0 <= st.pair < len(pairs):
                raise TraceError(k, f"unknown pair {st.pair}")
            u, v = pairs[st.pair]
            if len(u) > len(t1) or tuple(t1[len(t1) - len(u):]) != u:
                raise TraceError(k, "tape 1 does not end with the left side of the pair")
            del t1[len(t1) - len(u):]
            t1.extend(v)
            target = None  # group invariant now depends on relators
        elif isinstance(st, Reduction):
            if not t1 or not t2 or t1[-1] != st.letter or t2[-1] != st.letter:
                raise TraceError(k, f"tapes do not both end with {format_symbol(st.letter)}")
            t1.pop()
            t2.pop()
        elif isinstance(st, Accept):
            if t1 or t2:
                raise TraceError(k, "accept with a non-empty tape")
            if k != len(t.steps) - 1:
                raise TraceError(k, "steps after accept")
        else:
            raise TraceError(k, f"unknown step {st!r}")
        if target is not None and free_reduce(tuple(t1) + inverse(t2)) != target:
            raise TraceError(k, "tape1 tape2^-1 no longer equals the start word")
    return tuple(t1), tuple(t2)


def _normalize_steps(t1: list, t2: list, steps: list) -> None:
    # move all of tape 1 across, then bring letters back cancelling at the seam
    if not t2 and tuple(t1) == free_reduce(t1):
        return
    while t1:
        a = t1.pop()
        steps.append(Move(1, a))
        t2.append(a.inv())
    while t2:
        b = t2[-1]
        if t1 and t1[-1] == b:
            steps.append(Reduction(b))
            t1.pop()
            t2.pop()
        else:
            steps.append(Move(2, b))
            t2.pop()
            t1.append(b.inv())


class TrivialMachine:
    """Breadth-first search for accepting runs of the two-tape machine.

    Moves and reductions are free, so every state is first brought to the
    form (reduce(tape1 tape2^-1), empty) and states are compared in that form.
    A substitution then acts at any cut of the reduced word.  Words longer
    than ``max_len`` (default: start length plus the longest relator) are not
    explored.  Internally each letter is one character, its inverse the
    character with the lowest bit flipped.
    """

    def __init__(self, P: GroupPresentation, max_area: int = 8, max_len: int | None = None):
        self.P = P
        self.max_area = max_area
        self.max_len = max_len
        self.pairs = substitution_pairs(P)
        self._code: dict = {}
        self._letters: list = []
        for g in P.generators:
            self._enc_letter(g)
        self.pair_id = {pr: i for i, pr in enumerate(self.pairs)}
        # a substitution u -> v at a cut has the same effect as inserting
        # u^-1 v there, so successors only need the pairs with empty u
        self.inserts = []
        for i, (u, v) in enumerate(self.pairs):
            if u:
                continue
            x = self.encode(v)
            pre = [(k, self.encode(inverse(v[:k]))) for k in range(len(v), 0, -1)]
            suf = [(k, self.encode(inverse(v[len(v) - k:]))) for k in range(len(v), 0, -1)]
            self.inserts.append((i, x, pre, suf, chr(ord(x[0]) ^ 1), chr(ord(x[-1]) ^ 1)))
        self._ends: dict = {}
        self.rmax = max((len(r.word) for r in P.relators), default=1)

    def _enc_letter(self, g: Symbol) -> None:
        g = g.pos()
        if g not in self._code:
            c = 0x100 + 2 * len(self._letters)
            self._code[g] = chr(c)
            self._code[g.inv()] = chr(c + 1)
            self._letters.append(g)

    def encode(self, w) -> str:
        for s in w:
            self._enc_letter(s)
        return "".join(self._code[s] for s in w)

    def decode(self, x: str) -> tuple:
        out = []
        for ch in x:
            o = ord(ch) - 0x100
            g = self._letters[o >> 1]
            out.append(g.inv() if o & 1 else g)
        return tuple(out)

    @staticmethod
    def _slow_join(head: str, v: str, tail: str) -> str:
        for ch in v + tail:
            if head and ord(head[-1]) == ord(ch) ^ 1:
                head = head[:-1]
            else:
                head += ch
        return head

    def successors(self, r: str, lim: int | None = None) -> list:
        """(word, cut, pair id) for every relator insertion into the reduced word r."""
        lim = len(r) + self.rmax if lim is None else lim
        out = []
        add = out.append
        slow = self._slow_join
        cache = self._ends
        size = len(r)
        for p in range(size, -1, -1):
            head, tail = r[:p], r[p:]
            key = (head[-1] if head else None, tail[0] if tail else None)
            plan = cache.get(key)
            if plan is None:
                plan = cache[key] = self._plan(*key)
            simple, mixed = plan
            for i, v in simple:
                if size + len(v) > lim:
                    break
                add((head + v + tail, p, i))
            for i, v, pre, suf, ck, cj in mixed:
                n = len(v)
                k = j = 0
                if ck:
                    for kk, w in pre:
                        if not head.endswith(w):
                            break
                        k = kk
                if cj and k < n:
                    for jj, w in suf:
                        if jj > n - k or not tail.startswith(w):
                            break
                        j = jj
                if k + j == n:
                    s = slow(head, v, tail)
                    if len(s) > lim:
                        continue
                elif size + n - 2 * (k + j) > lim:
                    continue
                else:
                    s = head[:p - k] + v[k:n - j] + tail[j:]
                add((s, p, i))
        return out

    def _plan(self, hl, tf):
        # split the insertions into those that cannot cancel at this cut and the rest
        simple, mixed = [], []
        for i, v, pre, suf, v0, vn in self.inserts:
            if v0 == hl or vn == tf:
                mixed.append((i, v, pre[::-1], suf[::-1], v0 == hl, vn == tf))
            else:
                simple.append((i, v))
        simple.sort(key=lambda t: len(t[1]))
        return simple, mixed

    def search(self, w: Sequence[Symbol]):
        w = tuple(w)
        start = self.encode(free_reduce(w))
        cap = self.max_len if self.max_len is not None else len(start) + self.rmax
        parent = {start: None}
        layer = [start]
        explored = 1
        area = 0
        while layer and "" not in parent and area < self.max_area:
            # each substitution shortens the word by at most rmax letters
            room = (self.max_area - area - 1) * self.rmax
            lim = min(cap, room)
            nxt = []
            succ = self.successors
            for r in layer:
                for s, p, i in succ(r, lim):
                    if s not in parent:
                        parent[s] = (r, p, i)
                        nxt.append(s)
                if "" in parent:
                    break
            explored += len(nxt)
            layer = nxt
            area += 1
        if "" not in parent:
            return NotFound(w, self.max_area, explored)
        path = []
        cur = ""
        while parent[cur] is not None:
            prev, p, i = parent[cur]
            path.append((self.decode(prev), p, i))
            cur = prev
        path.reverse()
        return self._trace(w, path)

    def _trace(self, w: tuple, path: list) -> TrivialMachineTrace:
        steps: list = []
        t1, t2 = list(w), []
        _normalize_steps(t1, t2, steps)
        for r, p, i in path:
            assert tuple(t1) == r and not t2
            while len(t1) > p:
                a = t1.pop()
                steps.append(Move(1, a))
                t2.append(a.inv())
            _, d = self.pairs[i]
            # write the insertion of d as the substitution with the longest u
            for k in range(len(d), -1, -1):
                u, v = inverse(d[:k]), d[k:]
                if len(u) <= len(t1) and tuple(t1[len(t1) - len(u):]) == u and (u, v) in self.pair_id:
                    break
            del t1[len(t1) - len(u):]
            t1.extend(v)
            steps.append(Substitution(self.pair_id[(u, v)]))
            _normalize_steps(t1, t2, steps)
        steps.append(Accept())
        return TrivialMachineTrace(w, steps)


def trivial_machine_search(P: GroupPresentation, w, max_area: int = 8, max_len: int | None = None):
    """Shortest accepting trace using at most ``max_area`` substitutions, or NotFound."""
    if isinstance(w, str):
        w = parse_word(w)
    return TrivialMachine(P, max_area, max_len).search(w)


def trace_to_witness(t: TrivialMachineTrace, P: GroupPresentation, pairs=None) -> Witness:
    pairs = substitution_pairs(P) if pairs is None else pairs
    index = RelatorIndex(P)
    t1, t2 = list(t.start), []
    cur = free_reduce(t.start)
    moves = []
    for k, st in enumerate(t.steps):
        if isinstance(st, Move):
            src, dst = (t1, t2) if st.tape == 1 else (t2, t1)
            if not src or src[-1] != st.letter:
                raise TraceError(k, "bad move")
            dst.append(src.pop().inv())
        elif isinstance(st, Reduction):
            if not t1 or not t2 or t1[-1] != t2[-1]:
                raise TraceError(k, "bad reduction")
            t1.pop()
            t2.pop()
        elif isinstance(st, Substitution):
            u, v = pairs[st.pair]
            if tuple(t1[len(t1) - len(u):]) != u:
                raise TraceError(k, "bad substitution")
            d = inverse(u) + v
            new1 = t1[:len(t1) - len(u)] + list(v)
            want = free_reduce(tuple(new1) + inverse(t2))
            m = index.find(d)
            guess = len(free_reduce(t1))
            order = [guess] + [q for q in range(len(cur) + 1) if q != guess]
            for q in order:
                if q <= len(cur) and _splice(cur, q, d) == want:
                    moves.append(m._replace(position=q))
                    break
            else:
                raise TraceError(k, "no insertion point reproduces the substitution")
            t1[:] = new1
            cur = want
        elif isinstance(st, Accept):
            if t1 or t2:
                raise TraceError(k, "accept with a non-empty tape")
    if cur:
        raise TraceError(len(t.steps), "trace does not end at the empty word")
    return Witness(free_reduce(t.start), moves)
