"""Acceptance suite: one check per criterion, each reporting a PASS/FAIL line.

Run under pytest (the lines are echoed in the terminal summary) or directly
with ``python3 tests/test_acceptance.py``.
"""

import itertools
import time
from functools import lru_cache

import pytest

from dehnkit import compiler, derivation, normalize, presentation, stdlib, tm
from dehnkit.smachine import (SHardware, SRule, apply_srule, bounded_search, classify_computation,
                              invert_srule, parse_admissible, reach, run_history)
from dehnkit.words import Symbol, algebraic_sum, format_word, free_reduce, parse_word

W = parse_word
RESULTS: dict = {}

# S3 history length per unit of n, measured once on n <= 6 (max at n = 4: 11 rules) and frozen
S3_LENGTH_C = 11 / 4


@lru_cache(maxsize=None)
def Ma():
    return tm.machine_Ma()


@lru_cache(maxsize=None)
def SMa():
    return compiler.compile_machine(Ma())


@lru_cache(maxsize=None)
def pres(N):
    return presentation.build_presentation(SMa(), N)


def report(k, ok, detail, t0):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail} ({time.time() - t0:.1f}s)"
    RESULTS[k] = line
    print(line)
    return ok


# 1 --------------------------------------------------------------------------

def check_1():
    t0 = time.time()
    hw = SHardware([("Q1", W("q1 p1")), ("Q2", W("q2 p2")), ("Q3", W("q3")), ("Q4", W("q4"))],
                   [("Y1", W("a")), ("Y2", W("b b'")), ("Y3", W("c"))])
    r = SRule.from_words(hw, "rule1", [(W("q1"), W("p1 a^-1")), (W("q2 b q3"), W("a^-1 p2 b' q3 c"))])
    w = parse_admissible(hw, "q1 a a q2 b q3 c c q4")
    out = apply_srule(w, r)
    ok = out.flat() == W("p1 p2 b' q3 c c c q4") and apply_srule(out, invert_srule(r)) == w
    return report(1, ok, f"rule1 gives {out.text()}, inverse restores", t0)


# 2 --------------------------------------------------------------------------

def _s1_form(word, n, m):
    st, seg = word.states, word.segments
    i = st[0].base[-1]
    if any(s.base[-1] != i for s in st):
        return False
    for s in seg:
        if any(x.base != "delta" for x in s) or len({x.sign for x in s}) > 1:
            return False
    l1, l2, l2b, mm = (algebraic_sum(s) for s in seg)
    return l2 == l2b and mm == m and l1 + 2 * l2 == n


def check_2():
    t0 = time.time()
    S1 = stdlib.build_s1()
    bad = []
    for n in range(13):
        for m in range(-3, 4):
            w = S1.word(f"p1 delta^{n} q1 r1 s1 delta^{m} t1")
            L = n // 2 + 4
            kw = dict(max_len=L, max_word=w.size + 2 * L + 4)
            k = n // 2
            allc = bounded_search(S1, w, [], **kw)
            if any(classify_computation(c) == "neither" for c in allc):
                bad.append((n, m, "i"))
            if not all(_s1_form(x, n, m) for c in allc for x in c.words):
                bad.append((n, m, "ii"))
            qr = bounded_search(S1, w, [W("q1 r1")], **kw)
            if len(qr) != 1 or qr[0].history:
                bad.append((n, m, "iii"))
            p2 = bounded_search(S1, w, [W("p2")], **kw)
            p3 = bounded_search(S1, w, [W("p3")], **kw)
            W2 = W(f"p2 q2 delta^{k} r2 delta^{k} s2 delta^{m} t2")
            W3 = W(f"p3 delta q3 delta^{k} r3 delta^{k} s3 delta^{m} t3")
            if n % 2 == 0:
                if not (len(p2) == 1 and not p3 and p2[0].end.flat() == W2
                        and len(p2[0].history) in (n // 2, n // 2 + 1)):
                    bad.append((n, m, "iv"))
            else:
                if not (len(p3) == 1 and not p2 and p3[0].end.flat() == W3
                        and len(p3[0].history) in ((n - 1) // 2, (n - 1) // 2 + 1)):
                    bad.append((n, m, "v"))
    return report(2, not bad, f"S1, 13 x 7 start words, statements (i)-(v); failures {bad[:5]}", t0)


# 3 --------------------------------------------------------------------------

def check_3():
    t0 = time.time()
    bad = []
    S2 = stdlib.build_s2()
    for k, l, m in itertools.product(range(11), repeat=3):
        for n in (-1, 0, 2):
            w = S2.word(f"p2 delta^{k} q2 delta^{l} r2 delta^{m} s2 delta^{n} t2")
            L = max(l, m) + 3
            res = bounded_search(S2, w, [W("p1")], max_len=L, max_word=w.size + 2 * L)
            # q and s approach r in step, so they meet iff l = m
            if bool(res) != (l == m):
                bad.append(("S2", k, l, m, n))
            elif res and (len(res) != 1 or res[0].end.flat()
                          != W(f"p1 delta^{k + l} q1 r1 s1 delta^{m + n} t1")):
                bad.append(("S2", k, l, m, n))
    S3 = stdlib.build_s3()
    worst = 0.0
    for n in range(11):
        w = S3.word(f"p1 delta^{n} q1 r1 s1 t1")
        rep = reach(S3, w, [W("p3")], max_len=10 * n + 10, max_word=w.size + n + 6)
        if rep.reachable != (n > 0):
            bad.append(("S3", n))
            continue
        if n == 0:
            continue
        odd = n
        while odd % 2 == 0:
            odd //= 2
        mm = (odd - 1) // 2
        W3 = S3.word(f"p3 delta q3 delta^{mm} r3 delta^{mm} s3 delta^{n - 2 * mm - 1} t3")
        ends = {x.flat() for x in rep.end_words}
        back = reach(S3, W3, [W("p3")], max_len=10 * n + 10, max_word=w.size + n + 6)
        worst = max(worst, len(rep.first.history) / n)
        if (ends != {W3.flat()} or rep.shortest_count != 1
                or len(rep.first.history) > S3_LENGTH_C * n
                or {x.flat() for x in back.end_words} != {W3.flat()}):
            bad.append(("S3", n))
    S4 = stdlib.build_s4()
    for n in range(11):
        w = S4.word(f"p1 delta^{n} q1 r1 s1 t1")
        wp = S4.word(f"p1' delta^{n} q1' r1' s1' t1'")
        kw = dict(max_len=30 * n + 10, max_word=w.size + n + 6)
        there = reach(S4, w, [wp.flat()], **kw)
        back = reach(S4, wp, [w.flat()], **kw)
        ok = there.reachable == back.reachable == (n > 0)
        if ok and n:
            ok = (there.shortest_count == back.shortest_count == 1
                  and there.first.history == stdlib.s4_history(n)
                  and back.first.history == stdlib.inverse_history(stdlib.s4_history(n)))
        if not ok:
            bad.append(("S4", n))
    return report(3, not bad, f"S2 4k points, S3/S4 n<=10, S3 length/n max {worst:.2f} "
                              f"<= C={S3_LENGTH_C}; failures {bad[:5]}", t0)


# 4 --------------------------------------------------------------------------

def _block_word(u, n):
    us = format_word(u)
    return f"E {us} x F E' p1 delta^{n} q1 r1 s1 t1 pbar0 qbar0 rbar0 sbar0 tbar0 F'"


def check_4():
    t0 = time.time()
    Y = [Symbol("a"), Symbol("b")]
    S8, S9 = stdlib.build_s8(), stdlib.build_s9()
    positive = [tuple(p) for L in range(4) for p in itertools.product(Y, repeat=L)]
    almost = []
    for L in range(3):
        for up in itertools.product(Y, repeat=L):
            for a in Y:
                if not up or up[-1] != a:
                    almost.append(tuple(up) + (a.inv(),))
    bad = []
    points = 0
    for u in positive + almost:
        pos = all(s.sign > 0 for s in u)
        for n in range(len(u) + 3):
            for S, tgt in ((S8, W("p4")), (S9, W("xhat"))):
                w = S.word(_block_word(u, n))
                rep = reach(S, w, [tgt], max_len=100_000, max_word=w.size + len(u) + 4)
                points += 1
                if rep.reachable != (pos and n == len(u)):
                    bad.append((S.name, format_word(u), n))
                    continue
                if rep.reachable:
                    # uniqueness is judged against the full end word, since the hatted
                    # copy already shows xhat halfway through the computation
                    h = (stdlib.s8_history if S is S8 else stdlib.s9_history)(u)
                    end = run_history(S, w, h).end.flat()
                    full = reach(S, w, [end], max_len=100_000, max_word=w.size + len(u) + 4)
                    if full.shortest_count != 1 or full.first.history != h \
                            or {x.flat() for x in full.end_words} != {end}:
                        bad.append((S.name, format_word(u), n, "unique"))
    return report(4, not bad, f"S8/S9 over |Y|=2, {points} points; failures {bad[:5]}", t0)


# 5 --------------------------------------------------------------------------

def check_5():
    t0 = time.time()
    Sa, So = stdlib.build_salpha(), stdlib.build_somega()
    bad = []
    for n in range(9):
        w = Sa.word(f"E alpha^{n} x F")
        res = bounded_search(Sa, w, [W("x2")], max_len=2 * n + 4, max_word=w.size + 4)
        if not (len(res) == 1 and res[0].history == stdlib.salpha_history(n)
                and res[0].end.flat() == W(f"E alpha^{n} x2 F")
                and any(x.flat()[:2] == W("E x1") for x in res[0].words)):
            bad.append(("alpha", n))
        w = So.word(f"E' x' omega^{n} F'")
        res = bounded_search(So, w, [W("x2'")], max_len=2 * n + 4, max_word=w.size + 4)
        if not (len(res) == 1 and res[0].history == stdlib.somega_history(n)
                and res[0].end.flat() == W(f"E' x2' omega^{n} F'")
                and any(x.flat()[-2:] == W("x1' F'") for x in res[0].words)):
            bad.append(("omega", n))
    return report(5, not bad, f"S_alpha/S_omega n<=8 unique histories; failures {bad}", t0)


# 6 --------------------------------------------------------------------------

def _type_oracle(Y, max_len):
    """Word -> set of types, enumerated straight from the four sign patterns."""
    out: dict = {}
    for k in range(1, max_len + 1):
        for letters in itertools.product(Y, repeat=k):
            for first_pos in (True, False):
                # signs alternate from the first letter a_k
                z = tuple(s if (i % 2 == 0) == first_pos else s.inv() for i, s in enumerate(letters))
                if free_reduce(z) != z:
                    continue
                last_pos = z[-1].sign > 0
                if first_pos and not last_pos and k % 2 == 0:
                    t = (0, 0)
                elif first_pos and last_pos and k % 2 == 1:
                    t = (1, 0)
                elif not first_pos and not last_pos and k % 2 == 1:
                    t = (0, 1)
                elif not first_pos and last_pos and k % 2 == 0:
                    t = (1, 1)
                else:
                    continue
                out.setdefault(z, set()).add(t)
    return out


def _all_factorizations(v, types):
    """Every split v = z_k ... z_1 with chained types (brute force)."""
    n = len(v)
    found = []
    for mask in range(1 << max(n - 1, 0)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        parts = [v[a:b] for a, b in zip(cuts, cuts[1:])][::-1]  # z_1 first
        opts = [sorted(types.get(z, ())) for z in parts]
        for choice in itertools.product(*opts):
            if all(choice[j + 1][0] == 1 - choice[j][1] for j in range(len(choice) - 1)):
                found.append(list(zip(parts, choice)))
    return found


def check_6():
    t0 = time.time()
    Y = [Symbol("a"), Symbol("b")]
    types = _type_oracle(Y, 6)
    bad = []
    words = list(stdlib.all_reduced_words(Y, 6))
    for z in words:
        if not z:
            continue
        want = types.get(z, set())
        got = stdlib.word_type(z)
        if (got is None and want) or (got is not None and want != {got}):
            bad.append(("type", format_word(z)))
    for v in words:
        brute = _all_factorizations(v, types) if v else [[]]
        got = stdlib.factorize_types(v)
        if (got is None) != (not brute):
            bad.append(("factor", format_word(v)))
        elif got is not None and [list(map(tuple, f)) for f in [got]][0] not in \
                [[(tuple(z), t) for z, t in f] for f in brute]:
            bad.append(("factor-valid", format_word(v)))
        if v and all(s.sign > 0 for s in v):
            # positive words split only into their letters
            if len(brute) != 1 or [z for z, _ in brute[0]] != [(s,) for s in reversed(v)]:
                bad.append(("type3", format_word(v)))
        if len(v) >= 1 and v[-1].sign < 0 and all(s.sign > 0 for s in v[:-1]) \
                and (len(v) == 1 or v[-2] != v[-1].inv()):
            pinned = [f for f in brute if f[0][1] == (1, 0)]
            if pinned or stdlib.factorize_types(v, first_type=(1, 0)) is not None:
                bad.append(("type2", format_word(v)))
    return report(6, not bad, f"{len(words)} reduced words, |Y|=2, length<=6; failures {bad[:5]}", t0)


# 7 --------------------------------------------------------------------------

def check_7():
    t0 = time.time()
    N = normalize.normalize(Ma())
    rep = normalize.verify_normal_form(N, Ma(), max_input=2)
    agree = all(
        (tm.bounded_accept(N, tm.input_configuration(N, w), normalize.default_bound(len(w)),
                           normalize.default_space(len(w))) is None)
        == (tm.bounded_accept(Ma(), tm.input_configuration(Ma(), w), 20) is None)
        for w in ["", "a", "aa"])
    ok = rep.ok and agree
    return report(7, ok, f"normalize(M_a): {'; '.join(rep.lines())}; language |w|<=2 agrees={agree}", t0)


# 8 --------------------------------------------------------------------------

def small_configs():
    a = Symbol("a")
    for q in sorted(Ma().states[0], key=lambda s: s.base):
        for n in range(3):
            yield (tm.TapeConfig((a,) * n, q, ()),)


def check_8():
    t0 = time.time()
    SM = SMa()
    W0 = compiler.accept_word(SM)
    bad = []
    n_acc = 0
    for c in small_configs():
        C = tm.bounded_accept(Ma(), c, 50, 6, empty_tapes=True)
        S = compiler.sigma(SM, c)
        label = tm.config_text(c)
        if C is None:
            try:
                compiler.lift_computation(SM, tm.TMComputation([c], []))
                bad.append((label, "lifted a rejected configuration"))
            except ValueError:
                pass
            rp = reach(SM.machine, S, [W0.flat()], max_len=400, max_word=S.size + 6)
            if rp.reachable:
                bad.append((label, "search reached W0"))
            continue
        n_acc += 1
        L = compiler.lift_computation(SM, C)
        ok = (L.end == W0 and all(w.is_positive() for w in L.words)
              and all(compiler.is_normal(SM, w) for w in L.words)
              and run_history(SM.machine, L.start, L.history).words == L.words)
        rp = reach(SM.machine, S, [W0.flat()], max_len=L.length + 2, max_word=L.space + 2)
        if not ok or not rp.reachable:
            bad.append((label, "lift"))
    return report(8, not bad, f"{n_acc} accepted of 9 configurations with <=2 letters; "
                              f"failures {bad}", t0)


# 9 --------------------------------------------------------------------------

def check_9():
    t0 = time.time()
    ratios = []
    for w in ["a", "aa", "aaa"]:
        C = tm.bounded_accept(Ma(), tm.input_configuration(Ma(), w), 20, empty_tapes=True)
        L = compiler.lift_computation(SMa(), C)
        ratios.append((L.length - 1) / C.space ** 3)
    base = ratios[0]
    ok = all(base / 10 <= r <= base * 10 for r in ratios)
    return report(9, ok, "lift length / S^3 = " + ", ".join(f"{r:.2f}" for r in ratios)
                  + " (band factor 10 around |w|=1)", t0)


# 10 -------------------------------------------------------------------------

def check_10():
    t0 = time.time()
    bad = 0
    for N in (1, 6):
        P = pres(N)
        bad += sum(1 for r in P.relators
                   if r.category != "hub" and presentation.theta_count(r.word) != 2)
    u_all = W("a b^-1 c a^-1 b c^-1 a b c a")
    klen = all(len(presentation.build_K(u_all[:n], N)) == 4 * N * n + 4 * N
               for n in range(11) for N in (1, 6))
    return report(10, bad == 0 and klen,
                  f"non-hub relators with Theta count != 2: {bad}; |K(u,N)| exact: {klen}", t0)


# 11 -------------------------------------------------------------------------

def check_11():
    t0 = time.time()
    P = pres(1)
    verified = 0
    area_ok = True
    band_bad = []
    fails = []
    for c in small_configs():
        C = tm.bounded_accept(Ma(), c, 50, 6, empty_tapes=True)
        if C is None:
            continue
        L = compiler.lift_computation(SMa(), C)
        wit = derivation.disc_witness(L, P)
        r = derivation.verify_witness(P, wit)
        if not r.ok:
            fails.append(tm.config_text(c))
            continue
        verified += 1
        area_ok &= r.area == wit.declared_area == sum(wit.annuli) + 1
        for n, m, lo, hi in derivation.annulus_band(L, wit, 1):
            if not lo <= m <= hi:
                band_bad.append((n, m))
    C = tm.bounded_accept(Ma(), tm.input_configuration(Ma(), "a"), 20, empty_tapes=True)
    L = compiler.lift_computation(SMa(), C)
    smoke = derivation.verify_witness(pres(6), derivation.disc_witness(L, pres(6))).ok
    ok = not fails and area_ok and not band_bad and smoke
    return report(11, ok, f"{verified} discs verify, areas consistent={area_ok}, N=6 smoke={smoke}; "
                          f"annuli outside [|W|/2, 2(|W|+2)]*4N: {len(band_bad)} "
                          f"(|W|, moves) e.g. {sorted(set(band_bad))[:4]}", t0)


# 12 -------------------------------------------------------------------------

def _oracle_z3(w):
    return algebraic_sum(w) % 3 == 0


def _oracle_z2(w):
    return all(sum(s.sign for s in w if s.base == x) == 0 for x in "ab")


def check_12():
    t0 = time.time()
    bad = []
    counts = []
    for gens, rel, oracle in ((["a"], "a^3", _oracle_z3), (["a", "b"], "a b a^-1 b^-1", _oracle_z2)):
        P = presentation.presentation_from_words(gens, [rel])
        Y = [Symbol(g) for g in gens]
        letters = Y + [y.inv() for y in Y]
        machine = derivation.TrivialMachine(P, max_area=8)
        seen = {}
        total = 0
        for n in range(7):
            for w in itertools.product(letters, repeat=n):
                total += 1
                key = free_reduce(w)
                if key not in seen:
                    seen[key] = bool(machine.search(key))
                # the machine reduces freely before any substitution, so unreduced
                # words share the verdict of their reduced form
                if seen[key] != oracle(w):
                    bad.append((rel, format_word(w)))
        counts.append(f"{rel}: {total} words / {len(seen)} reduced")
    return report(12, not bad, "; ".join(counts) + f"; disagreements {bad[:5]}", t0)


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9,
          check_10, check_11, check_12]


@pytest.mark.parametrize("k", range(1, 13))
def test_criterion(k):
    assert CHECKS[k - 1](), RESULTS[k]


if __name__ == "__main__":
    for chk in CHECKS:
        chk()
