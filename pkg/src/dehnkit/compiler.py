"""Compile a normal-form Turing machine M into the S-machine S(M).

Hardware: ``E(0) x(0) F(0)``, then one 15-component block per tape
(``E x F E' p q r s t pbar qbar rbar sbar tbar F'``), then
``E'(k+1) x'(k+1) F'(k+1)``.  A letter ``z(j, tau, gamma)`` is
``Symbol(z, j, (tau, gamma))`` with gamma one of ``4 9 alpha omega``.

Each positive erasing command tau gets copies of S4, S9, S_alpha, S_omega
and five connecting rules; each positive left-marker check gets one rule
``P[tau]``.  Rule ids are ``tau/4/...``, ``tau/9/...``, ``tau/alpha/...``,
``tau/omega/...``, ``R4[tau]``, ``R4a[tau]``, ``Raw[tau]``, ``Rw9[tau]``,
``R9[tau]`` and ``P[tau]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import stdlib
from .normalize import command_form, syntactic_violations
from .smachine import (AdmissibleWord, SComputation, SHardware, SMachine, SRule,
                       make_word, run_history)
from .stdlib import ALPHA, DELTA, OMEGA, hat_name
from .tm import TapeConfig, TMComputation, TuringMachine
from .words import Symbol, algebraic_sum, free_reduce

BLOCK = stdlib.BLOCK
PQRST_BAR = ["pbar", "qbar", "rbar", "sbar", "tbar"]
GAMMAS = ("4", "9", "alpha", "omega")


class NormalFormViolation(ValueError):
    pass


def f_name(q: Symbol) -> str:
    return "F_" + q.base


def fp_name(q: Symbol) -> str:
    return "F'_" + q.base


def _s(base: str, j: int, tag=None) -> Symbol:
    return Symbol(base, j, tag)


@dataclass
class CommandPlan:
    tau: str
    kind: str            # "erase" or "check"
    tape: int            # 1-based active tape
    letter: Symbol | None
    src: tuple           # state per tape
    dst: tuple
    negative: str = ""   # id of the inverse command in M


@dataclass
class SMachineOfM:
    machine: SMachine
    tm: TuringMachine
    k: int
    component_names: list
    plans: dict                       # tau -> CommandPlan (positive commands only)
    rule_index: dict = field(default_factory=dict)
    f_states: dict = field(default_factory=dict)   # F/F' base -> (tape, state)

    @property
    def hardware(self) -> SHardware:
        return self.machine.hardware

    def manifest(self) -> str:
        lines = [f"components {len(self.component_names)}"]
        lines += [f"component {i} {n}" for i, n in enumerate(self.component_names)]
        for tau, fam in self.rule_index.items():
            for name, ids in fam.items():
                lines.append(f"family {tau} {name} {len(ids)}")
        return "\n".join(lines) + "\n"


# letter forms -------------------------------------------------------------------

def _standard_block(j: int, q: Symbol, tag=None, start=False) -> list:
    """Letters of block j with state q; ``start`` gives the S4/S9 start forms."""
    names = ["E", "x", f_name(q), "E'"]
    if start:
        names += [z + "1" for z in stdlib.PQRST] + [z + "0" for z in PQRST_BAR]
    else:
        names += list(stdlib.PQRST) + PQRST_BAR
    names.append(fp_name(q))
    return [_s(n, j, tag) for n in names]


def _outer(k: int, tag=None, x0="x", xk="x'"):
    left = [_s("E", 0, tag), _s(x0, 0, tag), _s("F", 0, tag)]
    right = [_s("E'", k + 1, tag), _s(xk, k + 1, tag), _s("F'", k + 1, tag)]
    return left, right


def _block_parts(b: list, pre_x=(), post_p=()) -> list:
    """Split a block into the parts E | x F E' p | q .. F'."""
    return [[b[0]], list(pre_x) + b[1:5] + list(post_p), b[5:]]


def _outer_parts(left, right) -> list:
    return [[left[0]], left[1:], right[:2], [right[2]]]


def _pairs(us: list, vs: list) -> list:
    return [(tuple(u), tuple(v)) for u, v in zip(us, vs)]


# compile ------------------------------------------------------------------------

def plan_commands(M: TuringMachine) -> dict:
    """Positive commands of M with their simulation data."""
    plans = {}
    taken = set()
    for c in M.commands:
        form = command_form(c)
        if form is None:
            raise NormalFormViolation(f"command {c.id} is not a single-letter step")
        if form == "insert":
            continue
        if form == "check":
            inv = M.find_inverse(c)
            if c.id in taken:
                continue
            taken.add(inv.id if inv is not None else c.id)
        i = next(t for t, (a, b) in enumerate(zip(c.src, c.dst)) if a.left or b.left or a.lend)
        letter = c.src[i].left[0] if form == "erase" else None
        inv = M.find_inverse(c)
        plans[c.id] = CommandPlan(c.id, form, i + 1, letter,
                                  tuple(p.state for p in c.src), tuple(p.state for p in c.dst),
                                  inv.id if inv is not None else "")
    return plans


def _component_of(k: int):
    """Map a state letter to its component index."""
    lead = {z: n for n, z in enumerate(BLOCK)}

    def comp(s: Symbol) -> int:
        j, b = s.tape, s.base
        if j == 0:
            return {"E": 0, "F": 2}.get(b, 1)
        if j == k + 1:
            return 15 * k + 3 + {"E'": 0, "F'": 2}.get(b, 1)
        off = 3 + 15 * (j - 1)
        if b == "E":
            return off
        if b == "E'":
            return off + 3
        if b.startswith("F'_") or b == "F'":
            return off + 14
        if b.startswith("F_") or b == "F":
            return off + 2
        if b.startswith("x"):
            return off + 1
        head = "".join(ch for ch in b if ch.isalpha()).replace("hat", "")
        return off + lead[head]

    return comp


def _component_names(k: int) -> list:
    names = ["E(0)", "X(0)", "F(0)"]
    for i in range(1, k + 1):
        names += [f"{z.upper() if z.islower() else z}({i})".replace("BAR", "bar") for z in BLOCK]
    names += [f"E'({k + 1})", f"X({k + 1})", f"F'({k + 1})"]
    return names


def _tapes(M: TuringMachine) -> list:
    k = M.k
    tapes = [("A1", [ALPHA]), ("A2", [ALPHA]), ("B1", [])]
    for i in range(1, k + 1):
        Y = sorted(M.alphabets[i - 1])
        for j in range(14):
            left = BLOCK[j]
            if left in ("E", "x"):
                tapes.append((f"Y{i}.{j}", Y))
            elif left in ("F", "E'"):
                tapes.append((f"Z{i}.{j}", []))
            else:
                tapes.append((f"D{i}.{j - 3}", [DELTA]))
        if i < k:
            tapes.append((f"B{i + 1}", []))
    tapes.append((f"B{k + 1}", []))
    tapes += [("W1", [OMEGA]), ("W2", [OMEGA])]
    return tapes


def _retag(words, states: frozenset, j: int, tag, rename=None):
    """Attach tape j and tag to every state letter of a standard-machine rule."""
    out = []
    for w in words:
        ww = []
        for s in w:
            if s.pos() not in states:
                ww.append(s)
                continue
            base = rename.get(s.base, s.base) if rename else s.base
            ww.append(Symbol(base, j, tag, s.sign))
        out.append(tuple(ww))
    return tuple(out)


def compile_machine(M: TuringMachine, check: bool = True) -> SMachineOfM:
    """Build S(M).  ``check`` runs the syntactic form checks and the rule-shape audit."""
    syn = syntactic_violations(M)
    if syn:
        prop, who = sorted(syn.items())[0]
        raise NormalFormViolation(f"property {prop} fails at {who}")
    k = M.k
    plans = plan_commands(M)
    raw = []   # (family tau, family name, rule id, pairs)

    def add(tau, fam, rid, pairs):
        raw.append((tau, fam, rid, pairs))

    s4 = stdlib.build_s4()
    salpha = stdlib.build_salpha()
    somega = stdlib.build_somega()
    st4 = s4.hardware.state_letters()
    sta = salpha.hardware.state_letters()
    stw = somega.hardware.state_letters()
    for tau, pl in plans.items():
        if pl.kind == "check":
            add(tau, "P", f"P[{tau}]", _p_rule(k, pl))
            continue
        i = pl.tape
        t4, t9, ta, tw = (tau, "4"), (tau, "9"), (tau, "alpha"), (tau, "omega")
        for r in s4.rules:
            add(tau, "S4", f"{tau}/4/{r.id}", [_retag(p, st4, i, t4) for p in r.pairs()])
        s9 = stdlib.build_s9(sorted(M.alphabets[i - 1]))
        st9 = s9.hardware.state_letters()
        q1 = pl.dst[i - 1]
        ren = {"F": f_name(q1), "F'": fp_name(q1)}
        for r in s9.rules:
            add(tau, "S9", f"{tau}/9/{r.id}", [_retag(p, st9, i, t9, ren) for p in r.pairs()])
        for r in salpha.rules:
            add(tau, "Salpha", f"{tau}/alpha/{r.id}", [_retag(p, sta, 0, ta) for p in r.pairs()])
        for r in somega.rules:
            add(tau, "Somega", f"{tau}/omega/{r.id}", [_retag(p, stw, k + 1, tw) for p in r.pairs()])
        for name, pairs in _connecting(k, pl):
            add(tau, "connect", f"{name}[{tau}]", pairs)

    # hardware from every letter mentioned plus the standard letters
    comp = _component_of(k)
    letters = [set() for _ in range(15 * k + 6)]
    for j in range(1, k + 1):
        for q in M.states[j - 1]:
            for s in _standard_block(j, q):
                letters[comp(s)].add(s)
    for s in sum(_outer(k), []):
        letters[comp(s)].add(s)
    for _, _, _, pairs in raw:
        for U, V in pairs:
            for s in U + V:
                if s.tape is not None and s.pos() not in (DELTA, ALPHA, OMEGA):
                    letters[comp(s.pos())].add(s.pos())
    names = _component_names(k)
    hw = SHardware(list(zip(names, letters)), _tapes(M))
    rules = []
    index: dict = {}
    for tau, fam, rid, pairs in raw:
        rules.append(SRule.from_words(hw, rid, pairs))
        index.setdefault(tau, {}).setdefault(fam, []).append(rid)
    S = SMachine(hw, rules, f"S({M.name})" if M.name else "S(M)")
    fst = {}
    for j in range(1, k + 1):
        for q in M.states[j - 1]:
            fst[f_name(q)] = (j, q)
            fst[fp_name(q)] = (j, q)
    out = SMachineOfM(S, M, k, names, plans, index, fst)
    if check:
        problems = audit_rules(out)
        if problems:
            raise NormalFormViolation("rule-shape audit: " + "; ".join(problems[:3]))
    return out


compile = compile_machine  # noqa: A001  (public name)


def _connecting(k: int, pl: CommandPlan) -> list:
    tau, i, a = pl.tau, pl.tape, pl.letter
    t4, t9, ta, tw = (tau, "4"), (tau, "9"), (tau, "alpha"), (tau, "omega")
    src, dst = pl.src, pl.dst
    out = []

    # R4: standard -> (tau, 4) start forms
    us, vs = [], []
    L, R = _outer(k)
    L4, R4 = _outer(k, t4)
    us += _outer_parts(L, R)
    vs += _outer_parts(L4, R4)
    for j in range(1, k + 1):
        us += _block_parts(_standard_block(j, src[j - 1]))
        vs += _block_parts(_standard_block(j, src[j - 1], t4, start=True))
    out.append(("R4", _pairs(us, vs)))

    # R4a: end of S4(tau) -> (tau, alpha); the command is executed here
    us, vs = [], []
    La, Ra = _outer(k, ta)
    us += _outer_parts(L4, R4)
    vs += [[La[0]], [ALPHA.inv()] + La[1:], Ra[:2] + [OMEGA.inv()], [Ra[2]]]
    for j in range(1, k + 1):
        b4 = _standard_block(j, src[j - 1], t4, start=True)
        ba = _standard_block(j, dst[j - 1], ta, start=True)
        if j == i:
            b4 = b4[:4] + [_s(z + "1'", j, t4) for z in stdlib.PQRST] + b4[9:]
            us += _block_parts(b4)
            vs += _block_parts(ba, pre_x=[a.inv()], post_p=[DELTA.inv()])
        else:
            us += _block_parts(b4)
            vs += _block_parts(ba)
    out.append(("R4a", _pairs(us, vs)))

    # Raw: x2(0) -> x(0), (tau, alpha) -> (tau, omega)
    us, vs = [], []
    La2, _ = _outer(k, ta, x0="x2")
    Lw, Rw = _outer(k, tw)
    us += [[s] for s in La2 + Ra]
    vs += [[s] for s in Lw + Rw]
    for j in range(1, k + 1):
        us += [[s] for s in _standard_block(j, dst[j - 1], ta, start=True)]
        vs += [[s] for s in _standard_block(j, dst[j - 1], tw, start=True)]
    out.append(("Raw", _pairs(us, vs)))

    # Rw9: x2'(k+1) -> x'(k+1), (tau, omega) -> (tau, 9)
    us, vs = [], []
    _, Rw2 = _outer(k, tw, xk="x2'")
    L9, R9 = _outer(k, t9)
    us += [[s] for s in Lw + Rw2]
    vs += [[s] for s in L9 + R9]
    for j in range(1, k + 1):
        us += [[s] for s in _standard_block(j, dst[j - 1], tw, start=True)]
        vs += [[s] for s in _standard_block(j, dst[j - 1], t9, start=True)]
    out.append(("Rw9", _pairs(us, vs)))

    # R9: back to standard letters (hats removed on the active tape)
    us, vs = [], []
    us += _outer_parts(L9, R9)
    vs += _outer_parts(*_outer(k))
    for j in range(1, k + 1):
        b9 = _standard_block(j, dst[j - 1], t9, start=True)
        if j == i:
            b9 = [b9[0], _s("xhat", j, t9)] + b9[2:4] + [_s(hat_name(s.base), j, t9) for s in b9[4:14]] + [b9[14]]
        us += _block_parts(b9)
        vs += _block_parts(_standard_block(j, dst[j - 1]))
    out.append(("R9", _pairs(us, vs)))
    return out


def _p_rule(k: int, pl: CommandPlan) -> list:
    pairs = []
    for j in range(1, k + 1):
        b0 = _standard_block(j, pl.src[j - 1])
        b1 = _standard_block(j, pl.dst[j - 1])
        if j == pl.tape:
            pairs.append((tuple(b0), tuple(b1)))
        elif pl.src[j - 1] != pl.dst[j - 1]:
            pairs.append(((b0[2],), (b1[2],)))
            pairs.append(((b0[14],), (b1[14],)))
    return pairs


# audit --------------------------------------------------------------------------

def _count(w, letter) -> int:
    return sum(s.sign for s in w if s.pos() == letter)


def audit_rules(SM: SMachineOfM) -> list:
    """Rule-shape problems; empty when every rule has the expected form.

    Only the R4a rules change the number of alpha or omega letters, each by
    exactly -1, through the parts ``x F -> alpha^-1 x F`` and
    ``E' x' -> E' x' omega^-1``.
    """
    problems = []
    for r in SM.machine.rules:
        da = sum(_count(V, ALPHA) - _count(U, ALPHA) for U, V in r.pairs())
        dw = sum(_count(V, OMEGA) - _count(U, OMEGA) for U, V in r.pairs())
        if r.id.startswith("R4a["):
            if (da, dw) != (-1, -1):
                problems.append(f"{r.id} changes alpha/omega by {da}/{dw}")
            for U, V in r.pairs():
                touched = any(s.pos() in (ALPHA, OMEGA) for s in V)
                if not touched:
                    continue
                names = [s.base for s in U]
                ok = (names == ["x", "F"] and V[0] == ALPHA.inv() and [s.base for s in V[1:]] == names) or \
                     (names == ["E'", "x'"] and V[-1] == OMEGA.inv() and [s.base for s in V[:-1]] == names)
                if not ok:
                    problems.append(f"{r.id}: unexpected alpha/omega part")
        elif da or dw:
            problems.append(f"{r.id} changes alpha/omega by {da}/{dw}")
    return problems


# encodings ----------------------------------------------------------------------

def _tape_words(c) -> list:
    out = []
    for t in c:
        if t.right:
            raise ValueError("configuration has letters right of a head")
        out.append(t.left)
    return out


def sigma(SM: SMachineOfM, c) -> AdmissibleWord:
    k = SM.k
    us = _tape_words(c)
    n = sum(len(u) for u in us)
    L, R = _outer(k)
    w = [L[0]] + [ALPHA] * n + L[1:]
    for j in range(1, k + 1):
        b = _standard_block(j, c[j - 1].state)
        w += [b[0]] + list(us[j - 1]) + b[1:5] + [DELTA] * len(us[j - 1]) + b[5:]
    w += R[:2] + [OMEGA] * n + [R[2]]
    return make_word(SM.hardware, w)


def accept_word(SM: SMachineOfM) -> AdmissibleWord:
    c0 = tuple(TapeConfig((), q, ()) for q in SM.tm.accept)
    return sigma(SM, c0)


def _blocks(SM: SMachineOfM, W: AdmissibleWord):
    """Per tape: (u, v, deltas, F letter)."""
    out = []
    for j in range(1, SM.k + 1):
        off = 3 + 15 * (j - 1)
        u = W.segments[off]
        v = W.segments[off + 1]
        deltas = sum((W.segments[off + 4 + t] for t in range(10)), ())
        out.append((u, v, deltas, W.states[off + 2]))
    return out


def mu(SM: SMachineOfM, W: AdmissibleWord) -> tuple:
    tapes = []
    for u, v, _, F in _blocks(SM, W):
        word = free_reduce(u + v)
        if any(s.sign < 0 for s in word):
            raise ValueError("mu: tape word is not positive")
        _, q = SM.f_states[F.base]
        tapes.append(TapeConfig(word, q, ()))
    return tuple(tapes)


def is_normal(SM: SMachineOfM, W: AdmissibleWord) -> bool:
    k = SM.k
    total = 0
    for u, v, deltas, _ in _blocks(SM, W):
        s = algebraic_sum(u + v)
        if s != algebraic_sum(deltas):
            return False
        total += s
    n1 = algebraic_sum(W.segments[0]) + algebraic_sum(W.segments[1])
    last = 15 * k + 3
    n2 = algebraic_sum(W.segments[last]) + algebraic_sum(W.segments[last + 1])
    return n1 == n2 == total and total >= 0


# lifting ------------------------------------------------------------------------

def block_history(SM: SMachineOfM, tau: str, c) -> list:
    """S(M) history simulating the positive command tau from configuration c."""
    pl = SM.plans[tau]
    if pl.kind == "check":
        return [(f"P[{tau}]", 1)]
    us = _tape_words(c)
    n = sum(len(u) for u in us)
    u = us[pl.tape - 1]
    if not u:
        raise ValueError(f"{tau} erases from an empty tape")
    h = [(f"R4[{tau}]", 1)]
    h += [(f"{tau}/4/{rid}", s) for rid, s in stdlib.s4_history(len(u))]
    h.append((f"R4a[{tau}]", 1))
    h += [(f"{tau}/alpha/{rid}", s) for rid, s in stdlib.salpha_history(n - 1)]
    h.append((f"Raw[{tau}]", 1))
    h += [(f"{tau}/omega/{rid}", s) for rid, s in stdlib.somega_history(n - 1)]
    h.append((f"Rw9[{tau}]", 1))
    h += [(f"{tau}/9/{rid}", s) for rid, s in stdlib.s9_history(u[:-1])]
    h.append((f"R9[{tau}]", 1))
    return h


def lift_history(SM: SMachineOfM, C: TMComputation) -> list:
    M = SM.tm
    out = []
    for cfg, nxt, cid in zip(C.configs, C.configs[1:], C.history):
        if cid in SM.plans:
            out += block_history(SM, cid, cfg)
            continue
        pos = next((t for t, pl in SM.plans.items() if pl.negative == cid), None)
        if pos is None:
            cmd = M.command(cid)
            inv = M.find_inverse(cmd)
            pos = inv.id if inv is not None and inv.id in SM.plans else None
        if pos is None:
            raise ValueError(f"command {cid} has no positive partner")
        out += [(rid, -s) for rid, s in reversed(block_history(SM, pos, nxt))]
    return out


def lift_computation(SM: SMachineOfM, C: TMComputation) -> SComputation:
    """Replay the block histories of C starting at sigma of its first configuration."""
    if not SM.tm.is_accepting(C.configs[-1], empty_tapes=True):
        raise ValueError("only computations ending at the accept configuration are lifted")
    return run_history(SM.machine, sigma(SM, C.configs[0]), lift_history(SM, C))


def rule_count(SM: SMachineOfM) -> int:
    return len(SM.machine.rules)
