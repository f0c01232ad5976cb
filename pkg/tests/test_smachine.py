import itertools
import random

import pytest

from dehnkit.smachine import (Inapplicable, SHardware, SMachine, SRule, StepError, algebraic_sum,
                              apply_srule, bounded_search, classify_computation, emit_smachine,
                              invert_srule, is_reduced_history, parse_admissible, parse_smachine,
                              reach, run_history)
from dehnkit.stdlib import build_s1
from dehnkit.words import Symbol, format_word, free_reduce, parse_word

W = parse_word


@pytest.fixture(scope="module")
def hw4():
    return SHardware([("Q1", W("q1 p1")), ("Q2", W("q2 p2")), ("Q3", W("q3")), ("Q4", W("q4"))],
                     [("Y1", W("a")), ("Y2", W("b b'")), ("Y3", W("c"))])


@pytest.fixture(scope="module")
def rule1(hw4):
    return SRule.from_words(hw4, "rule1", [(W("q1"), W("p1 a^-1")),
                                           (W("q2 b q3"), W("a^-1 p2 b' q3 c"))])


@pytest.fixture(scope="module")
def toy():
    # alpha / {q1, q0} / omega with one tape letter a on both tapes
    hw = SHardware([("A", W("alpha")), ("Q", W("q1 q0")), ("O", W("omega"))],
                   [("Y1", W("a")), ("Y2", W("a"))])
    rules = [SRule.from_words(hw, "1", [(W("q1"), W("a^-1 q1 a"))]),
             SRule.from_words(hw, "2", [(W("alpha q1"), W("alpha q0"))])]
    return SMachine(hw, rules, "toy")


def reduce_stack_right(w):
    # second oracle: cancel from the right end
    out = []
    for s in reversed(w):
        if out and out[-1] == s.inv():
            out.pop()
        else:
            out.append(s)
    return tuple(reversed(out))


def test_free_reduce_examples():
    assert free_reduce(W("a a^-1 b")) == W("b")
    assert free_reduce(W("delta^2 delta^-2")) == ()
    assert free_reduce(W("a b^-1 b a^-1 a")) == W("a")


def test_free_reduce_confluence():
    rng = random.Random(7)
    letters = [Symbol(x) for x in "abc"]
    for _ in range(10_000):
        w = [rng.choice(letters) for _ in range(rng.randint(0, 30))]
        w = [s if rng.random() < 0.5 else s.inv() for s in w]
        assert free_reduce(w) == reduce_stack_right(w)


def test_rule1_application(hw4, rule1):
    w = parse_admissible(hw4, "q1 a a q2 b q3 c c q4")
    out = apply_srule(w, rule1)
    assert out.flat() == W("p1 p2 b' q3 c c c q4")
    assert apply_srule(out, invert_srule(rule1)) == w


def test_rule1_inverse_formula(hw4, rule1):
    inv = invert_srule(rule1)
    pairs = [(format_word(U), format_word(V)) for U, V in inv.pairs()]
    assert pairs == [("p1", "q1 a"), ("p2 b' q3", "a q2 b q3 c^-1")]
    assert invert_srule(inv) == rule1


def test_inapplicable(hw4, rule1):
    w = parse_admissible(hw4, "p1 a q2 b q3 q4")
    with pytest.raises(Inapplicable):
        apply_srule(w, rule1)


def test_self_inverse_rule(hw4):
    r = SRule.from_words(hw4, "id", [(W("q3"), W("q3"))])
    assert invert_srule(r).pairs() == r.pairs()


def test_s1_rule_one():
    S1 = build_s1()
    w = S1.word("p1 delta^2 q1 r1 s1 t1")
    assert apply_srule(w, S1.rule(("1", 1))).flat() == W("p1 q1 delta r1 delta s1 t1")
    for r in S1.rules:
        assert invert_srule(invert_srule(r)) == r


def test_apply_then_inverse_exhaustive():
    S1 = build_s1()
    words = []
    for i in range(1, 4):
        for e in itertools.product(range(-2, 3), repeat=3):
            if sum(map(abs, e)) > 4:
                continue
            words.append(S1.word(f"p{i} delta^{e[0]} q{i} delta^{e[1]} r{i} delta^{e[2]} s{i} t{i}"))
    checked = 0
    for w in words:
        for r in S1.all_rules():
            try:
                out = apply_srule(w, r)
            except Inapplicable:
                continue
            assert apply_srule(out, invert_srule(r)) == w
            checked += 1
    assert checked > 0


def test_run_history():
    S1 = build_s1()
    w = S1.word("p1 delta^4 q1 r1 s1 t1")
    assert run_history(S1, w, []).words == [w]
    c = run_history(S1, w, [("1", 1), ("1", 1), ("2", 1)])
    assert c.end.flat() == W("p2 q2 delta^2 r2 delta^2 s2 t2")
    assert c.length == 4
    back = run_history(S1, w, [("1", 1), ("1", -1)])
    assert back.words[0] == back.words[2]
    with pytest.raises(StepError) as e:
        run_history(S1, w, [("3", 1)])
    assert e.value.index == 0


def test_is_reduced_history():
    assert is_reduced_history([("1", 1), ("2", 1)])
    assert not is_reduced_history([("1", 1), ("1", -1)])
    assert not is_reduced_history([("1", 1), ("2", 1), ("2", -1), ("1", 1)])


def test_classify_examples(toy):
    w = toy.word("alpha a a a q1 a a omega")
    c = run_history(toy, w, [("1", 1)] * 3 + [("2", 1)])
    assert c.end.flat() == W("alpha q0 a a a a a omega")
    assert classify_computation(c) == "proper"
    # the forward rule produces this word; the inverse rule would insert a^-1 on the right
    c2 = run_history(toy, toy.word("alpha q1 omega"), [("1", 1), ("1", 1)])
    assert c2.end.flat() == W("alpha a^-1 a^-1 q1 a a omega")
    assert classify_computation(c2) == "semiproper"
    assert classify_computation(c2.reverse()) in ("proper", "semiproper")


def test_classify_neither():
    S1 = build_s1()
    w = S1.word("p1 q1 r1 s1 t1")
    c = run_history(S1, w, [("1", -1), ("1", -1)])
    assert classify_computation(c) == "semiproper"
    # x inserts a fresh a^-1 that y cancels one step later
    hw = SHardware([("A", W("A")), ("Q", W("q")), ("O", W("O"))],
                   [("Y1", W("a")), ("Y2", W("a"))])
    S = SMachine(hw, [SRule.from_words(hw, "x", [(W("q"), W("a^-1 q"))]),
                      SRule.from_words(hw, "y", [(W("q"), W("a q"))])])
    c = run_history(S, S.word("A q O"), [("x", 1), ("y", 1)])
    assert classify_computation(c) == "neither"


def test_algebraic_sum():
    assert algebraic_sum(W("a b^-1 c")) == 1
    assert algebraic_sum(()) == 0
    assert algebraic_sum(W("a b c")) == 3


def test_search_examples():
    S1 = build_s1()
    w = S1.word("p1 delta^4 q1 r1 s1 t1")
    res = bounded_search(S1, w, [W("p2")], max_len=20)
    assert len(res) == 1
    assert res[0].end.flat() == W("p2 q2 delta^2 r2 delta^2 s2 t2")
    assert len(bounded_search(S1, w, [W("p3")], max_len=20)) == 0
    triv = bounded_search(S1, w, [W("q1 r1")], max_len=20)
    assert len(triv) == 1 and triv[0].history == []


def test_search_reversal_semiproper():
    S1 = build_s1()
    w = S1.word("p1 delta^3 q1 r1 s1 t1")
    for c in bounded_search(S1, w, [], max_len=4):
        assert classify_computation(c) != "neither"
        assert classify_computation(c.reverse()) != "neither"


def test_reach_agrees_with_search():
    S1 = build_s1()
    w = S1.word("p1 delta^6 q1 r1 s1 t1")
    rep = reach(S1, w, [W("p2")], max_len=20)
    assert rep.reachable and rep.shortest_count == 1
    assert rep.first.end.flat() == W("p2 q2 delta^3 r2 delta^3 s2 t2")


def test_text_roundtrip():
    S1 = build_s1()
    again = parse_smachine(emit_smachine(S1))
    assert emit_smachine(again) == emit_smachine(S1)
    with pytest.raises(ValueError):
        parse_smachine("rule 1 [bogus")


def test_machine_symmetric():
    S1 = build_s1()
    assert S1.is_symmetric()
    assert len(S1.all_rules()) == 2 * len(S1.rules)
