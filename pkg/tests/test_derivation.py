import pytest

from dehnkit.compiler import accept_word, lift_computation
from dehnkit.derivation import (Accept, NotFound, RelatorIndex, Substitution, TraceError,
                                TrivialMachineTrace, Witness, WitnessError, WitnessMove, apply_relator, disc_witness,
                                emit_witness, parse_witness, replay_trace, trace_to_witness,
                                trivial_machine_search, verify_witness)
from dehnkit.presentation import build_K, presentation_from_words
from dehnkit.smachine import SComputation
from dehnkit.tm import bounded_accept, input_configuration
from dehnkit.words import free_reduce, inverse, parse_word

W = parse_word


@pytest.fixture(scope="module")
def Z3():
    return presentation_from_words(["a"], ["a^3"])


@pytest.fixture(scope="module")
def Z2():
    return presentation_from_words(["a", "b"], ["a b a^-1 b^-1"])


def test_apply_relator_example(Z3):
    out = apply_relator(W("a a"), Z3, WitnessMove(2, 0, 0, -1))
    assert out == W("a^-1")


def test_relator_then_inverse(Z2):
    for w in [(), W("a b^-1"), W("b a a")]:
        for pos in range(len(w) + 1):
            d = apply_relator(w, Z2, WitnessMove(pos, 0, 1, 1))
            assert free_reduce(d) == d != w
    d = apply_relator((), Z2, WitnessMove(0, 0, 0, 1))
    assert apply_relator(d, Z2, WitnessMove(len(d), 0, 0, -1)) == ()


def test_apply_relator_bad_move(Z3):
    with pytest.raises(WitnessError):
        apply_relator(W("a"), Z3, WitnessMove(5, 0))
    with pytest.raises(WitnessError):
        apply_relator(W("a"), Z3, WitnessMove(0, 3))


def test_hub_cancels_its_inverse(SMa, P1):
    K = build_K(accept_word(SMa).flat(), 1)
    m = RelatorIndex(P1).find(K, hint=P1.hub_index)
    assert apply_relator(inverse(K), P1, m._replace(position=0)) == ()


def test_verify_commutator(Z2):
    w = W("a b a^-1 b^-1")
    good = Witness(w, [WitnessMove(0, 0, 0, -1)])
    r = verify_witness(Z2, good)
    assert r.ok and r.area == 1
    bad = Witness(W("a b"), [WitnessMove(0, 0, 0, -1)])
    r = verify_witness(Z2, bad)
    assert not r.ok and r.step == 1
    lying = Witness(w, [WitnessMove(0, 0, 0, -1)], declared_area=3)
    assert not verify_witness(Z2, lying).ok


def test_disc_trivial_computation(SMa, P1):
    W0 = accept_word(SMa)
    wit = disc_witness(SComputation([W0], [], SMa.machine), P1)
    assert wit.declared_area == 1 and len(wit.moves) == 1
    assert verify_witness(P1, wit).ok


def test_disc_a(SMa, P1, Ma):
    C = bounded_accept(Ma, input_configuration(Ma, "a"), 5)
    L = lift_computation(SMa, C)
    wit = disc_witness(L, P1)
    r = verify_witness(P1, wit)
    assert r.ok
    assert wit.declared_area == sum(wit.annuli) + 1 == r.area
    assert len(wit.annuli) == L.length - 1
    assert wit.start == build_K(L.start.flat(), 1)


def test_witness_file_roundtrip(SMa, P1, Ma):
    C = bounded_accept(Ma, input_configuration(Ma, "a"), 5)
    wit = disc_witness(lift_computation(SMa, C), P1)
    again, digest = parse_witness(emit_witness(wit, P1))
    assert digest == P1.digest()
    assert again.moves == wit.moves and again.start == wit.start
    assert verify_witness(P1, again).ok


def test_corrupted_witness_reports_step(Z2):
    w = W("a b a^-1 b^-1 a b a^-1 b^-1")
    wit = Witness(w, [WitnessMove(0, 0, 0, -1), WitnessMove(0, 0, 0, -1)])
    assert verify_witness(Z2, wit).ok
    wit.moves[1] = WitnessMove(9, 0, 0, -1)
    r = verify_witness(Z2, wit)
    assert not r.ok and r.step == 1


def test_parse_witness_errors():
    with pytest.raises(WitnessError):
        parse_witness("witness -\nstart a\narea 1\napply x 0 0 1\n")


# trivial machine -------------------------------------------------------------

def test_a_cubed(Z3):
    t = trivial_machine_search(Z3, W("a^3"), max_area=3)
    assert t and t.substitutions == 1
    wit = trace_to_witness(t, Z3)
    assert wit.area == 1 and verify_witness(Z3, wit).ok
    assert replay_trace(Z3, t) == ((), ())


def test_commutator_word(Z2):
    t = trivial_machine_search(Z2, W("a b a b^-1 a^-2"), max_area=4)
    assert t
    wit = trace_to_witness(t, Z2)
    assert wit.area == t.substitutions
    assert verify_witness(Z2, wit).ok


def test_empty_word(Z3):
    t = trivial_machine_search(Z3, (), max_area=2)
    assert t.substitutions == 0
    wit = trace_to_witness(t, Z3)
    assert wit.area == 0 and verify_witness(Z3, wit).ok


def test_not_found(Z3):
    res = trivial_machine_search(Z3, W("a"), max_area=4)
    assert isinstance(res, NotFound) and not res


def test_area_bound_respected(Z3):
    # a^6 needs two substitutions
    assert not trivial_machine_search(Z3, W("a^6"), max_area=1)
    assert trivial_machine_search(Z3, W("a^6"), max_area=2).substitutions == 2


def test_bad_trace_rejected(Z3):
    with pytest.raises(TraceError):
        replay_trace(Z3, TrivialMachineTrace(W("a"), [Accept()]))
    with pytest.raises(TraceError):
        replay_trace(Z3, TrivialMachineTrace(W("a"), [Substitution(99)]))
