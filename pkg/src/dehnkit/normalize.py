"""Normal-form pipeline for Turing machines.

Every stage is a pure function ``TuringMachine -> TuringMachine``.  Fresh
states are named ``<hint>#<n>``; no user alphabet may use ``#``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .tm import (Command, Pattern, TuringMachine, bounded_accept, config_length,
                 input_configuration, symmetrize)
from .words import Symbol


class NormalizeError(ValueError):
    def __init__(self, stage: str, msg: str):
        super().__init__(f"{stage}: {msg}")
        self.stage = stage


class _Fresh:
    def __init__(self, M: TuringMachine):
        used = set()
        for part in M.alphabets + M.states:
            used |= {s.base for s in part}
        self.used = used
        self.n = 0

    def __call__(self, hint: str) -> Symbol:
        while True:
            self.n += 1
            name = f"{hint}#{self.n}"
            if name not in self.used:
                self.used.add(name)
                return Symbol(name)


def _ident(q: Symbol, r: Symbol | None = None, at_end: bool = False):
    return Pattern((), q, (), False, at_end), Pattern((), r or q, (), False, at_end)


def _cmd(cid: str, pairs) -> Command:
    return Command(cid, tuple(a for a, _ in pairs), tuple(b for _, b in pairs))


def _moves_heads(M: TuringMachine) -> bool:
    return any(p.right or not p.rend for c in M.commands for p in c.src + c.dst)


def accept_commands(M: TuringMachine) -> list:
    return [c for c in M.commands if tuple(p.state for p in c.dst) == M.accept]


# stage 1 -----------------------------------------------------------------------

def add_input_tape(M: TuringMachine) -> TuringMachine:
    """Put the input on its own tape unless tape 1 already holds only input letters.

    The new first tape keeps the input; its head rewinds to the left marker
    and then walks right, copying each letter onto the old first tape.
    """
    if M.alphabets[0] <= set(M.X):
        return M
    fresh = _Fresh(M)
    g0, g1, g2 = fresh("in"), fresh("in"), fresh("in")
    rest = [_ident(q) for q in M.start]
    cmds = []
    for a in M.X:
        cmds.append(_cmd(f"rw.{a.base}", [(Pattern((a,), g0, ()), Pattern((), g0, (a,)))] + rest))
    cmds.append(_cmd("rw.end", [(Pattern((), g0, (), True), Pattern((), g1, (), True))] + rest))
    for a in M.X:
        copy = (Pattern((), M.start[0], (), False, True), Pattern((a,), M.start[0], (), False, True))
        cmds.append(_cmd(f"cp.{a.base}", [(Pattern((), g1, (a,)), Pattern((a,), g1, ()))] + [copy] + rest[1:]))
    cmds.append(_cmd("cp.end", [(Pattern((), g1, (), False, True), Pattern((), g2, (), False, True))] + rest))
    for c in M.commands:
        p = Pattern((), g2, (), False, True)
        cmds.append(Command(c.id, (p,) + c.src, (p,) + c.dst))
    return TuringMachine(M.k + 1, M.X, (frozenset(M.X),) + M.alphabets,
                         (frozenset({g0, g1, g2}),) + M.states, cmds,
                         (g0,) + M.start, (g2,) + M.accept, M.name,
                         dict(M.input_alias), M.origin)


# stage 2 -----------------------------------------------------------------------

def single_accept(M: TuringMachine) -> TuringMachine:
    """Funnel every accepting command through one fresh accept vector."""
    if len(accept_commands(M)) == 1:
        return M
    fresh = _Fresh(M)
    new = tuple(fresh("acc") for _ in range(M.k))
    funnel = _cmd("acc", [_ident(q, r) for q, r in zip(M.accept, new)])
    states = tuple(s | {q} for s, q in zip(M.states, new))
    return M.with_commands(list(M.commands) + [funnel], states=states, accept=new)


# stage 3 -----------------------------------------------------------------------

def history_letter(cid: str) -> Symbol:
    return Symbol("T" + cid)


def three_phase_symmetrize(M: TuringMachine) -> TuringMachine:
    """Guess a history, replay it, erase everything; then close under inversion.

    Tape k+1 receives the guessed history.  Its first square is the accept
    command and later squares are appended at the right end, so replay reads
    the tape from right to left.
    """
    acc = accept_commands(M)
    if len(acc) != 1:
        raise NormalizeError("three_phase_symmetrize",
                             f"need exactly one accept command, found {[c.id for c in acc] or 'none'}")
    if not M.alphabets[0] <= set(M.X):
        raise NormalizeError("three_phase_symmetrize", "tape 1 is not an input tape")
    k = M.k
    fresh = _Fresh(M)
    p = [fresh("ph1") for _ in range(k)]
    e = [fresh("er") for _ in range(k + 1)]
    f = [fresh("fin") for _ in range(k + 1)]
    h0, h1, c, r = fresh("hist"), fresh("hist"), fresh("play"), fresh("back")
    hist = {cmd.id: history_letter(cmd.id) for cmd in M.commands}
    moving = _moves_heads(M)

    def at_end(q, s=None):
        return _ident(q, s, at_end=True)

    cmds = []
    # phase 1
    first = hist[acc[0].id]
    cmds.append(_cmd("g.start", [at_end(q) for q in p]
                     + [(Pattern((), h0, (), True, True), Pattern((first,), h1, (), True, True))]))
    for cmd in M.commands:
        t = hist[cmd.id]
        cmds.append(_cmd(f"g[{cmd.id}]", [at_end(q) for q in p]
                         + [(Pattern((), h1, (), False, True), Pattern((t,), h1, (), False, True))]))
    # bridge
    bridge = [at_end(p[0], M.start[0])]
    for i in range(1, k):
        bridge.append((Pattern((), p[i], (), True, True), Pattern((), M.start[i], (), True, True)))
    bridge.append(at_end(h1, c))
    cmds.append(_cmd("bridge", bridge))
    # phase 2
    for cmd in M.commands:
        t = hist[cmd.id]
        cmds.append(Command(f"x[{cmd.id}]", cmd.src + (Pattern((t,), c, ()),),
                            cmd.dst + (Pattern((), c, (t,)),)))
    # back to the right marker
    done = [_ident(q) for q in M.accept]
    cmds.append(_cmd("ret", done + [(Pattern((), c, (), True), Pattern((), r, (), True))]))
    for t in hist.values():
        cmds.append(_cmd(f"ret[{t.base}]", done + [(Pattern((), r, (t,)), Pattern((t,), r, ()))]))
    cmds.append(_cmd("erase", [_ident(q, s) for q, s in zip(M.accept, e)] + [at_end(r, e[k])]))
    # phase 3
    alphs = list(M.alphabets) + [frozenset(hist.values())]
    for i in range(k + 1):
        others = [_ident(q) for q in e]
        for a in sorted(alphs[i]):
            row = list(others)
            row[i] = (Pattern((a,), e[i], (), False, not moving), Pattern((), e[i], (), False, not moving))
            cmds.append(_cmd(f"e{i + 1}[{a.base}]", row))
            if moving and i < k:
                row = list(others)
                row[i] = (Pattern((), e[i], (a,)), Pattern((), e[i], ()))
                cmds.append(_cmd(f"e{i + 1}[{a.base}].r", row))
    cmds.append(_cmd("accept", [(Pattern((), e[i], (), True, True), Pattern((), f[i], (), True, True))
                                for i in range(k + 1)]))
    states = [M.states[i] | {p[i], e[i], f[i]} for i in range(k)]
    states.append(frozenset({h0, h1, c, r, e[k], f[k]}))
    out = TuringMachine(k + 1, M.X, alphs, states, cmds, tuple(p) + (h0,), tuple(f),
                        M.name, dict(M.input_alias), M.origin)
    return symmetrize(out)


# stage 4 -----------------------------------------------------------------------

def split_tapes(M: TuringMachine) -> TuringMachine:
    """Tape i becomes a pair: the part left of the head, and the reversed part right of it."""
    def halves(a: Pattern):
        return (Pattern(a.left, a.state, (), a.lend, True),
                Pattern(tuple(reversed(a.right)), a.state, (), a.rend, True))

    cmds = []
    for c in M.commands:
        src, dst = [], []
        for a, b in zip(c.src, c.dst):
            src += halves(a)
            dst += halves(b)
        cmds.append(Command(c.id, tuple(src), tuple(dst)))

    def twice(xs):
        return tuple(x for x in xs for _ in range(2))

    return TuringMachine(2 * M.k, M.X, twice(M.alphabets), twice(M.states), cmds,
                         twice(M.start), twice(M.accept), M.name, dict(M.input_alias), M.origin)


def split_config(cfg) -> tuple:
    out = []
    for t in cfg:
        out.append(type(t)(t.left, t.state, ()))
        out.append(type(t)(tuple(reversed(t.right)), t.state, ()))
    return tuple(out)


# stage 5 -----------------------------------------------------------------------

def _steps(c: Command, alphabets) -> list:
    ops = []
    for i, (a, b) in enumerate(zip(c.src, c.dst)):
        if a.right or b.right or not a.rend:
            raise NormalizeError("serialize_commands", f"command {c.id} is not in right-marker form")
        ops += [("erase", i, s) for s in reversed(a.left)]
        if a.lend:
            ops.append(("check", i, None))
        ops += [("insert", i, s) for s in b.left]
    if not ops:
        # a pure state change: insert a letter and take it back
        i = next((j for j, al in enumerate(alphabets) if al), None)
        if i is None:
            raise NormalizeError("serialize_commands", f"command {c.id}: no letter available")
        s = min(alphabets[i])
        ops = [("insert", i, s), ("erase", i, s)]
    return ops


def serialize_commands(M: TuringMachine) -> TuringMachine:
    """Replace every command by a chain of one-letter steps through fresh states.

    A step erases one letter, inserts one letter or checks the left marker
    on a single tape; all other tapes only change state.
    """
    fresh = _Fresh(M)
    states = [set(s) for s in M.states]
    cmds = []
    done = {}
    for c in M.commands:
        inv = next((d for d in M.commands if d.same_action(c.inverse()) and d.id in done), None)
        if inv is not None:
            chain = done[inv.id]
            for s in reversed(chain):
                cid = c.id if len(chain) == 1 else s.id + "~"
                cmds.append(Command(cid, s.dst, s.src))
            continue
        ops = _steps(c, M.alphabets)
        vecs = [tuple(p.state for p in c.src)]
        for _ in range(len(ops) - 1):
            vec = tuple(fresh("s") for _ in range(M.k))
            for i, q in enumerate(vec):
                states[i].add(q)
            vecs.append(vec)
        vecs.append(tuple(p.state for p in c.dst))
        chain = []
        for j, (kind, t, s) in enumerate(ops):
            src, dst = [], []
            for i in range(M.k):
                q0, q1 = vecs[j][i], vecs[j + 1][i]
                a = Pattern((), q0, (), False, True)
                b = Pattern((), q1, (), False, True)
                if i == t:
                    if kind == "erase":
                        a = Pattern((s,), q0, (), False, True)
                    elif kind == "insert":
                        b = Pattern((s,), q1, (), False, True)
                    else:
                        a = Pattern((), q0, (), True, True)
                        b = Pattern((), q1, (), True, True)
                src.append(a)
                dst.append(b)
            chain.append(Command(c.id if len(ops) == 1 else f"{c.id}.{j + 1}", tuple(src), tuple(dst)))
        done[c.id] = chain
        cmds += chain
    return M.with_commands(cmds, states=tuple(frozenset(s) for s in states))


# stage 6 -----------------------------------------------------------------------

def _tag(s: Symbol, i: int) -> Symbol:
    suffix = f"@{i}"
    if s.base.endswith(suffix):
        return s
    return Symbol(s.base + suffix, s.tape, s.tag, s.sign)


def disjoint_alphabets(M: TuringMachine) -> TuringMachine:
    """Decorate every letter and state with ``@i`` for its tape i (idempotent)."""
    def pat(p: Pattern, i):
        return Pattern(tuple(_tag(s, i) for s in p.left), _tag(p.state, i),
                       tuple(_tag(s, i) for s in p.right), p.lend, p.rend)

    cmds = [Command(c.id, tuple(pat(p, i + 1) for i, p in enumerate(c.src)),
                    tuple(pat(p, i + 1) for i, p in enumerate(c.dst))) for c in M.commands]
    alias = {k: _tag(v, 1) for k, v in M.input_alias.items()}
    for a in M.X:
        if _tag(a, 1) != a:
            alias[a.base] = _tag(a, 1)
    return TuringMachine(M.k, tuple(_tag(a, 1) for a in M.X),
                         [frozenset(_tag(s, i + 1) for s in al) for i, al in enumerate(M.alphabets)],
                         [frozenset(_tag(s, i + 1) for s in st) for i, st in enumerate(M.states)],
                         cmds, tuple(_tag(q, i + 1) for i, q in enumerate(M.start)),
                         tuple(_tag(q, i + 1) for i, q in enumerate(M.accept)),
                         M.name, alias, M.origin)


# pipeline ----------------------------------------------------------------------

STAGES = [
    ("add_input_tape", add_input_tape),
    ("single_accept", single_accept),
    ("three_phase_symmetrize", three_phase_symmetrize),
    ("split_tapes", split_tapes),
    ("serialize_commands", serialize_commands),
    ("disjoint_alphabets", disjoint_alphabets),
]
STAGE_NAMES = [n for n, _ in STAGES]


def normalize(M: TuringMachine, upto: str | None = None) -> TuringMachine:
    """Run the pipeline, stopping after stage ``upto`` when given."""
    if upto is not None and upto not in STAGE_NAMES:
        raise ValueError(f"unknown stage {upto!r}; choose from {', '.join(STAGE_NAMES)}")
    out = M
    for name, fn in STAGES:
        try:
            out = fn(out)
        except NormalizeError:
            raise
        except ValueError as e:
            raise NormalizeError(name, str(e)) from e
        if name == upto:
            break
    out.origin = M
    return out


# verification ------------------------------------------------------------------

def default_bound(n: int) -> int:
    return 8 * (n + 1) ** 2


def default_space(n: int) -> int:
    # room for the input plus a guessed history of n + 2 commands
    return 2 * n + 2


def words_upto(X, n: int):
    for m in range(n + 1):
        yield from itertools.product(X, repeat=m)


def _command_form(c: Command) -> str | None:
    """'erase', 'insert', 'check' or None when c is not a single-letter step."""
    active = []
    for i, (a, b) in enumerate(zip(c.src, c.dst)):
        if a.right or b.right or not a.rend:
            return None
        if a.left or b.left or a.lend:
            active.append((a, b))
    if len(active) != 1:
        return None
    a, b = active[0]
    if a.lend:
        return "check" if not a.left and not b.left else None
    if len(a.left) == 1 and not b.left:
        return "erase"
    if len(b.left) == 1 and not a.left:
        return "insert"
    return None


def language_sample(M: TuringMachine, max_input: int, bound=default_bound, words=None,
                    space=default_space) -> dict:
    """Map each input tuple to its shortest accepting computation or None."""
    X = [a.base for a in (M.origin.X if M.origin else M.X)] if words is None else None
    out = {}
    src = words if words is not None else words_upto(X, max_input)
    for w in src:
        cfg = input_configuration(M, list(w))
        out[tuple(w)] = bounded_accept(M, cfg, bound(len(w)), None if space is None else space(len(w)))
    return out


def syntactic_violations(M: TuringMachine) -> dict:
    """First offender for each of the syntactic properties 2, 5 and 6."""
    out = {}
    for c in M.commands:
        if M.find_inverse(c) is None:
            out[2] = c.id
            break
    for c in M.commands:
        if _command_form(c) is None:
            out[5] = c.id
            break
    seen: dict = {}
    for i in range(M.k):
        if M.alphabets[i] & M.states[i]:
            out.setdefault(6, f"tape {i + 1} reuses a letter as a state")
        for s in M.alphabets[i] | M.states[i]:
            j = seen.setdefault(s, i)
            if j != i:
                out.setdefault(6, f"{s.base} on tapes {j + 1} and {i + 1}")
    return out


def command_form(c: Command) -> str | None:
    return _command_form(c)


@dataclass
class NormalFormReport:
    properties: dict = field(default_factory=dict)
    counterexample: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.properties.get(i, False) for i in range(1, 7))

    def lines(self) -> list:
        names = {1: "language preserved", 2: "symmetric", 3: "time ratio bounded",
                 4: "accepts only with empty tapes", 5: "single-letter command forms",
                 6: "disjoint tape alphabets"}
        out = []
        for i in range(1, 7):
            ok = self.properties.get(i, False)
            extra = f" ({self.counterexample[i]})" if i in self.counterexample else ""
            out.append(f"{i} {names[i]}: {'yes' if ok else 'no'}{extra}")
        return out


def verify_normal_form(M: TuringMachine, reference: TuringMachine | None = None,
                       max_input: int = 2, bound=default_bound, ratio_band: float = 10.0,
                       space=default_space) -> NormalFormReport:
    """Check the six normal-form properties.

    2, 5 and 6 are syntactic.  1, 3 and 4 use bounded search on inputs of
    length at most ``max_input``; 1 and 3 compare against ``reference``
    (defaulting to the machine M was normalized from, or M itself).
    """
    rep = NormalFormReport()
    props, bad = rep.properties, rep.counterexample
    ref = reference or M.origin or M
    X = [a.base for a in ref.X]
    words = list(words_upto(X, max_input))
    mine = language_sample(M, max_input, bound, words, space)
    theirs = mine if ref is M else language_sample(ref, max_input, bound, words, space)

    props[1] = True
    for w in words:
        if (mine[w] is None) != (theirs[w] is None):
            props[1] = False
            bad[1] = "input " + ("".join(w) or "(empty)")
            break

    syn = syntactic_violations(M)
    props[2] = 2 not in syn
    if 2 in syn:
        bad[2] = syn[2]

    props[3] = True
    ratios = [mine[w].time / max(theirs[w].time, 1) for w in words
              if mine[w] is not None and theirs[w] is not None]
    if ratios and max(ratios) > ratio_band * min(ratios):
        props[3] = False
        bad[3] = f"ratios {min(ratios):.2f}..{max(ratios):.2f}"

    props[4] = M.start != M.accept
    if not props[4]:
        bad[4] = "start vector is accepting"
    for w in words:
        comp = mine[w]
        if comp is not None and config_length(comp.configs[-1]) != 0:
            props[4] = False
            bad[4] = "input " + ("".join(w) or "(empty)")
            break

    for i in (5, 6):
        props[i] = i not in syn
        if i in syn:
            bad[i] = syn[i]
    return rep
