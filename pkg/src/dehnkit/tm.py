"""Multi-tape nondeterministic Turing machines with command vectors.

A tape configuration is ``alpha u q v omega``; the markers are implicit.
An elementary command is a pair of :class:`Pattern` objects; ``lend`` and
``rend`` say whether the pattern is pinned to the left marker or to the
right marker.  In the text format ``^`` stands for the left marker and
``$`` for the right one::

    tapes 1
    input a
    alphabet 1 a
    states 1 q1 q2 q0
    start q1
    accept q0
    cmd 1: [a|q1|$ -> |q2|$]
    cmd 3: [^|q2|$ -> ^|q0|$]
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .words import Symbol, format_symbol, parse_token


class Pattern(NamedTuple):
    left: tuple
    state: Symbol
    right: tuple
    lend: bool = False
    rend: bool = False

    def text(self) -> str:
        lt = ["^"] if self.lend else []
        lt += [format_symbol(s) for s in self.left]
        rt = [format_symbol(s) for s in self.right] + (["$"] if self.rend else [])
        return f"{' '.join(lt)}|{format_symbol(self.state)}|{' '.join(rt)}"


def identity_pattern(q: Symbol, at_end: bool = False) -> Pattern:
    return Pattern((), q, (), False, at_end)


class TapeConfig(NamedTuple):
    left: tuple
    state: Symbol
    right: tuple

    def __len__(self):  # type: ignore[override]
        return len(self.left) + len(self.right)

    def text(self) -> str:
        return (" ".join(format_symbol(s) for s in self.left) + "|" + format_symbol(self.state)
                + "|" + " ".join(format_symbol(s) for s in self.right))


Configuration = tuple


def config_length(cfg: Sequence[TapeConfig]) -> int:
    return sum(len(t.left) + len(t.right) for t in cfg)


def config_text(cfg: Sequence[TapeConfig]) -> str:
    return " ; ".join(t.text() for t in cfg)


def parse_config(text: str) -> tuple:
    out = []
    for chunk in text.split(";"):
        u, q, v = chunk.split("|")
        out.append(TapeConfig(_letters(u), parse_token(q.strip())[0], _letters(v)))
    return tuple(out)


def _letters(text: str) -> tuple:
    out = []
    for tok in text.split():
        out.extend(parse_token(tok))
    return tuple(out)


class Inapplicable(Exception):
    pass


def inverse_id(cid: str) -> str:
    return cid[:-1] if cid.endswith("~") else cid + "~"


@dataclass(frozen=True)
class Command:
    id: str
    src: tuple  # Pattern per tape
    dst: tuple

    def __post_init__(self):
        if len(self.src) != len(self.dst):
            raise ValueError(f"command {self.id}: sides of different length")
        for a, b in zip(self.src, self.dst):
            if a.lend != b.lend or a.rend != b.rend:
                raise ValueError(f"command {self.id} adds or removes an end marker")

    @property
    def k(self) -> int:
        return len(self.src)

    def inverse(self) -> "Command":
        return Command(inverse_id(self.id), self.dst, self.src)

    @property
    def polarity(self) -> str:
        return "negative" if self.id.endswith("~") else "positive"

    def same_action(self, other: "Command") -> bool:
        return self.src == other.src and self.dst == other.dst

    def text(self) -> str:
        body = " ; ".join(f"{a.text()} -> {b.text()}" for a, b in zip(self.src, self.dst))
        return f"cmd {self.id}: [{body}]"


def invert_command(c: Command) -> Command:
    return c.inverse()


def _match(t: TapeConfig, p: Pattern) -> bool:
    if t.state != p.state:
        return False
    nl, nr = len(p.left), len(p.right)
    if p.lend:
        if t.left != p.left:
            return False
    elif nl and t.left[-nl:] != p.left:
        return False
    if p.rend:
        if t.right != p.right:
            return False
    elif nr and t.right[:nr] != p.right:
        return False
    return True


def _rewrite(t: TapeConfig, a: Pattern, b: Pattern) -> TapeConfig:
    left = t.left[:len(t.left) - len(a.left)] + b.left
    right = b.right + t.right[len(a.right):]
    return TapeConfig(left, b.state, right)


def applicable(cfg: Sequence[TapeConfig], c: Command) -> bool:
    return all(_match(t, p) for t, p in zip(cfg, c.src))


def apply_command(cfg: Sequence[TapeConfig], c: Command) -> tuple:
    if len(cfg) != c.k:
        raise Inapplicable(f"{c.id}: tape count mismatch")
    if not applicable(cfg, c):
        raise Inapplicable(c.id)
    return tuple(_rewrite(t, a, b) for t, a, b in zip(cfg, c.src, c.dst))


@dataclass
class TuringMachine:
    k: int
    X: tuple
    alphabets: tuple  # per tape frozenset of letters
    states: tuple     # per tape frozenset of states
    commands: list
    start: tuple
    accept: tuple
    name: str = ""
    input_alias: dict = field(default_factory=dict)
    origin: "TuringMachine | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.alphabets = tuple(frozenset(a) for a in self.alphabets)
        self.states = tuple(frozenset(s) for s in self.states)
        self.X = tuple(self.X)
        self.start = tuple(self.start)
        self.accept = tuple(self.accept)
        self.validate()

    def validate(self) -> None:
        k = self.k
        if len(self.alphabets) != k or len(self.states) != k:
            raise ValueError("alphabet/state lists must have one entry per tape")
        if len(self.start) != k or len(self.accept) != k:
            raise ValueError("state vectors must have length k")
        if k and not set(self.X) <= self.alphabets[0]:
            raise ValueError("input alphabet must be contained in the first tape alphabet")
        ids = set()
        for c in self.commands:
            if c.id in ids:
                raise ValueError(f"duplicate command id {c.id}")
            ids.add(c.id)
            if c.k != k:
                raise ValueError(f"command {c.id} has {c.k} entries, expected {k}")
            for i, (a, b) in enumerate(zip(c.src, c.dst)):
                for p in (a, b):
                    if p.state not in self.states[i]:
                        raise ValueError(f"command {c.id}: {format_symbol(p.state)} is not a state of tape {i + 1}")
                    for s in p.left + p.right:
                        if s not in self.alphabets[i]:
                            raise ValueError(f"command {c.id}: {format_symbol(s)} not in alphabet {i + 1}")
        for i in range(k):
            if self.start[i] not in self.states[i] or self.accept[i] not in self.states[i]:
                raise ValueError(f"start/accept state not declared on tape {i + 1}")

    def command(self, cid: str) -> Command:
        for c in self.commands:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def is_symmetric(self) -> bool:
        return all(self.find_inverse(c) is not None for c in self.commands)

    def find_inverse(self, c: Command):
        inv = c.inverse()
        for d in self.commands:
            if d.same_action(inv):
                return d
        return None

    def with_commands(self, commands, **kw) -> "TuringMachine":
        data = dict(k=self.k, X=self.X, alphabets=self.alphabets, states=self.states,
                    commands=list(commands), start=self.start, accept=self.accept,
                    name=self.name, input_alias=dict(self.input_alias), origin=self.origin)
        data.update(kw)
        return TuringMachine(**data)

    def index(self) -> dict:
        """Commands grouped by their source state vector, in declaration order."""
        idx: dict = {}
        for c in self.commands:
            idx.setdefault(tuple(p.state for p in c.src), []).append(c)
        return idx

    def is_accepting(self, cfg, empty_tapes: bool = False) -> bool:
        if empty_tapes and config_length(cfg):
            return False
        return tuple(t.state for t in cfg) == self.accept


def symmetrize(M: TuringMachine) -> TuringMachine:
    """Close the command list under inversion (inverses get a ``~`` id)."""
    cmds = list(M.commands)
    for c in M.commands:
        if not any(d.same_action(c.inverse()) for d in cmds):
            cmds.append(c.inverse())
    return M.with_commands(cmds)


def enabled_commands(M: TuringMachine, cfg) -> list:
    return [c for c in M.commands if applicable(cfg, c)]


def input_configuration(M: TuringMachine, w) -> tuple:
    if isinstance(w, str):
        w = [t for t in (w.split() if " " in w else list(w))]
    letters = []
    for a in w:
        s = a if isinstance(a, Symbol) else Symbol(str(a))
        if s not in M.X:
            alias = M.input_alias.get(s.base)
            if alias is None:
                raise ValueError(f"letter {format_symbol(s)} is not an input letter")
            s = alias
        letters.append(s)
    tapes = [TapeConfig(tuple(letters), M.start[0], ())]
    tapes += [TapeConfig((), q, ()) for q in M.start[1:]]
    return tuple(tapes)


@dataclass
class TMComputation:
    configs: list
    history: list

    @property
    def time(self) -> int:
        return len(self.history)

    @property
    def space(self) -> int:
        return max(config_length(c) for c in self.configs)

    @property
    def area(self) -> int:
        return sum(config_length(c) for c in self.configs)

    def reverse(self) -> "TMComputation":
        return TMComputation(list(reversed(self.configs)), [inverse_id(h) for h in reversed(self.history)])


def computation_metrics(c: TMComputation) -> tuple:
    return (c.time, c.space, c.area)


def replay(M: TuringMachine, cfg, history: Iterable[str]) -> TMComputation:
    configs = [tuple(cfg)]
    hist = []
    for cid in history:
        cfg = apply_command(cfg, M.command(cid))
        configs.append(cfg)
        hist.append(cid)
    return TMComputation(configs, hist)


def bounded_accept(M: TuringMachine, cfg, max_steps: int, max_space: int | None = None,
                   empty_tapes: bool = False):
    """Shortest accepting computation within ``max_steps`` or None.

    Breadth first over configurations, commands tried in declaration order,
    so the history found is the lexicographically least among the shortest.
    ``max_space`` optionally prunes configurations longer than the bound.
    With ``empty_tapes`` only the accept configuration itself (accept
    states, all tapes empty) counts.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    cfg = tuple(cfg)
    parent = {cfg: None}
    layer = [cfg]
    if M.is_accepting(cfg, empty_tapes):
        return TMComputation([cfg], [])
    idx = M.index()
    for _ in range(max_steps):
        nxt = []
        for c0 in layer:
            for cmd in idx.get(tuple(t.state for t in c0), ()):
                if not applicable(c0, cmd):
                    continue
                c1 = tuple(_rewrite(t, a, b) for t, a, b in zip(c0, cmd.src, cmd.dst))
                if c1 in parent:
                    continue
                if max_space is not None and config_length(c1) > max_space:
                    continue
                parent[c1] = (c0, cmd.id)
                if M.is_accepting(c1, empty_tapes):
                    return _trace(parent, c1)
                nxt.append(c1)
        if not nxt:
            break
        layer = nxt
    return None


def reachable(M: TuringMachine, cfg, max_steps: int) -> dict:
    """Distances of every configuration within ``max_steps`` of cfg."""
    cfg = tuple(cfg)
    dist = {cfg: 0}
    q = deque([cfg])
    idx = M.index()
    while q:
        c0 = q.popleft()
        d = dist[c0]
        if d >= max_steps:
            continue
        for cmd in idx.get(tuple(t.state for t in c0), ()):
            if applicable(c0, cmd):
                c1 = apply_command(c0, cmd)
                if c1 not in dist:
                    dist[c1] = d + 1
                    q.append(c1)
    return dist


def _trace(parent, c) -> TMComputation:
    configs, hist = [c], []
    while parent[c] is not None:
        c, cid = parent[c]
        configs.append(c)
        hist.append(cid)
    configs.reverse()
    hist.reverse()
    return TMComputation(configs, hist)


# text format ------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_CMD = re.compile(r"^cmd\s+(?P<id>[^\s:]+)\s*:\s*\[(?P<body>.*)\]\s*$")


def _parse_pattern(text: str) -> Pattern:
    fields = text.split("|")
    if len(fields) != 3:
        raise ValueError(f"pattern {text!r} needs the form u|q|v")
    u, q, v = (f.strip() for f in fields)
    lend = u.startswith("^")
    if lend:
        u = u[1:]
    rend = v.endswith("$")
    if rend:
        v = v[:-1]
    qs = parse_token(q)
    if len(qs) != 1:
        raise ValueError(f"bad state {q!r}")
    return Pattern(_letters(u), qs[0], _letters(v), lend, rend)


def parse_tm(text: str) -> TuringMachine:
    k = None
    X = []
    alph: dict = {}
    sts: dict = {}
    start = accept = None
    cmds = []
    name = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip() if not line.lstrip().startswith("cmd") else line.strip()
        if line.lstrip().startswith("#"):
            if lineno == 1:
                name = line.lstrip()[1:].strip()
            continue
        if not s:
            continue
        head, _, rest = s.partition(" ")
        try:
            if head == "tapes":
                k = int(rest)
            elif head == "input":
                X = list(_letters(rest))
            elif head == "alphabet":
                i, _, letters = rest.partition(" ")
                alph[int(i)] = _letters(letters)
            elif head == "states":
                i, _, letters = rest.partition(" ")
                sts[int(i)] = _letters(letters)
            elif head == "start":
                start = _letters(rest)
            elif head == "accept":
                accept = _letters(rest)
            elif head == "cmd":
                m = _CMD.match(s)
                if not m:
                    raise ValueError("malformed command")
                src, dst = [], []
                for chunk in m.group("body").split(";"):
                    if "->" not in chunk:
                        raise ValueError("elementary command without '->'")
                    a, _, b = chunk.partition("->")
                    src.append(_parse_pattern(a))
                    dst.append(_parse_pattern(b))
                cmds.append(Command(m.group("id"), tuple(src), tuple(dst)))
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ValueError as e:
            raise ParseError(lineno, str(e)) from None
    if k is None:
        raise ParseError(0, "missing 'tapes' line")
    try:
        return TuringMachine(k, X, [alph.get(i, ()) for i in range(1, k + 1)],
                             [sts.get(i, ()) for i in range(1, k + 1)], cmds,
                             start or (), accept or (), name)
    except ValueError as e:
        raise ParseError(0, str(e)) from None


def emit_tm(M: TuringMachine) -> str:
    def ws(xs):
        return " ".join(sorted(format_symbol(s) for s in xs))

    lines = []
    if M.name:
        lines.append(f"# {M.name}")
    lines.append(f"tapes {M.k}")
    lines.append("input " + " ".join(format_symbol(s) for s in M.X))
    for i in range(M.k):
        lines.append(f"alphabet {i + 1} {ws(M.alphabets[i])}".rstrip())
        lines.append(f"states {i + 1} {ws(M.states[i])}".rstrip())
    lines.append("start " + " ".join(format_symbol(s) for s in M.start))
    lines.append("accept " + " ".join(format_symbol(s) for s in M.accept))
    for c in M.commands:
        lines.append(c.text())
    return "\n".join(lines) + "\n"


# the example machine ----------------------------------------------------------

MA_TEXT = """\
# M_a: accepts a^n for n > 0
tapes 1
input a
alphabet 1 a
states 1 q1 q2 q0
start q1
accept q0
cmd 1: [a|q1|$ -> |q2|$]
cmd 2: [a|q2|$ -> |q2|$]
cmd 3: [^|q2|$ -> ^|q0|$]
cmd 1~: [|q2|$ -> a|q1|$]
cmd 2~: [|q2|$ -> a|q2|$]
cmd 3~: [^|q0|$ -> ^|q2|$]
"""


def machine_Ma() -> TuringMachine:
    return parse_tm(MA_TEXT)
