import pytest

from dehnkit.normalize import (STAGE_NAMES, STAGES, NormalizeError, add_input_tape, command_form,
                               default_bound, default_space, disjoint_alphabets, language_sample,
                               normalize, single_accept, split_tapes, syntactic_violations,
                               three_phase_symmetrize, verify_normal_form)
from dehnkit.tm import bounded_accept, config_length, emit_tm, input_configuration


def accepted(M, n, scale=1):
    out = {}
    for w, c in language_sample(M, n, lambda m: scale * default_bound(m)).items():
        out[w] = c is not None
    return out


def test_add_input_tape(Ma):
    M1 = add_input_tape(Ma)
    assert M1.k <= Ma.k + 1
    assert accepted(M1, 3) == accepted(Ma, 3)


def test_stage_language_preserved(Ma):
    ref = accepted(Ma, 2)
    assert ref[()] is False and ref[("a",)] is True
    cur = Ma
    for name, fn in STAGES:
        cur = fn(cur)
        cur.origin = Ma
        assert accepted(cur, 2) == ref, name


def test_three_phase_symmetric(Ma):
    M3 = three_phase_symmetrize(single_accept(add_input_tape(Ma)))
    assert M3.is_symmetric()
    assert 2 not in syntactic_violations(M3)


def test_split_tapes_doubles_k(Ma):
    M3 = three_phase_symmetrize(single_accept(add_input_tape(Ma)))
    M4 = split_tapes(M3)
    assert M4.k == 2 * M3.k
    # M_a keeps its head at the right end, so the right-part tape never fills up
    S = split_tapes(Ma)
    for w in ["a", "aa"]:
        c = bounded_accept(S, input_configuration(S, w), default_bound(len(w)))
        assert c is not None
        assert all(len(cfg[1].left) == 0 for cfg in c.configs)


def test_serialized_forms(NMa):
    for c in NMa.commands:
        assert command_form(c) in ("erase", "insert", "check")


def test_disjoint_alphabets_idempotent(NMa):
    assert emit_tm(disjoint_alphabets(NMa)) == emit_tm(NMa)
    assert 6 not in syntactic_violations(NMa)


def test_normal_form_report(NMa):
    rep = verify_normal_form(NMa)
    assert rep.ok, rep.lines()
    assert len(rep.lines()) == 6


def test_already_normal_machine_passes(Ma):
    assert verify_normal_form(Ma).ok
    assert verify_normal_form(normalize(Ma)).ok


def test_accepts_only_with_empty_tapes(NMa):
    for w in ["a", "aa"]:
        c = bounded_accept(NMa, input_configuration(NMa, w), default_bound(len(w)), default_space(len(w)))
        assert c is not None and config_length(c.configs[-1]) == 0


def test_time_inflation(Ma, NMa):
    for w in ["a", "aa"]:
        t0 = bounded_accept(Ma, input_configuration(Ma, w), 20).time
        t1 = bounded_accept(NMa, input_configuration(NMa, w), default_bound(len(w)),
                            default_space(len(w))).time
        assert t1 > t0


def test_unknown_stage(Ma):
    with pytest.raises(ValueError):
        normalize(Ma, upto="nope")
    assert normalize(Ma, upto=STAGE_NAMES[0]).k >= Ma.k


def test_normalize_error_is_value_error():
    assert issubclass(NormalizeError, ValueError)
