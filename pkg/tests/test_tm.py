from __future__ import annotations

import json

import pytest

import machines
from vass_forge import tm
from vass_forge.core import ProgramError, find_tagged
from vass_forge.engine import (
    Reachable,
    SearchLimits,
    Unreachable,
    run_stats,
    zero_reach,
)
from vass_forge.gadgets import drain_checked, hat, spend_guarded
from vass_forge.tm import CaTransition, CounterAutomaton, TuringMachine, WordCodec

AB = WordCodec(("a", "b"))


# --------------------------------------------------------------------------
# Word codec.


def test_num_frozen_examples():
    assert AB.num("ab") == 7  # 1 + 2*3
    assert AB.num("ba") == 5  # 2 + 1*3
    assert AB.num("") == 0


def test_initial_vector():
    assert tm.initial_vector("ab", AB) == (7, 0, 0)
    assert tm.initial_vector("", AB) == (0, 0, 0)
    assert tm.initial_vector("ba", AB) == (5, 0, 0)
    with pytest.raises(ProgramError, match="outside"):
        tm.initial_vector("ax", AB)


def test_codec_round_trip_and_bijectivity():
    seen = {}
    for w in machines.words(("a", "b"), 5):
        value = AB.num(w)
        assert AB.denum(value) == w
        assert value not in seen
        seen[value] = w


def test_denum_rejects_non_codewords():
    # base 3: the value 3 has digits (0, 1) — a zero digit is not a word
    with pytest.raises(ProgramError, match="zero digit"):
        AB.denum(3)
    with pytest.raises(ProgramError):
        AB.denum(-1)


def test_codec_validation():
    with pytest.raises(ProgramError):
        WordCodec(())
    with pytest.raises(ProgramError):
        WordCodec(("a", "a"))


# --------------------------------------------------------------------------
# Machine validation and the interpreter.


def test_machine_validation():
    good = machines.even_length()
    with pytest.raises(ProgramError, match="two transitions"):
        TuringMachine(
            good.states, good.sigma, good.blank,
            good.delta + (("e", "a", "b", "L", "e"),),
            good.initial, good.accept, good.reject,
        )
    with pytest.raises(ProgramError, match="halting"):
        TuringMachine(
            good.states, good.sigma, good.blank,
            good.delta + (("yes", "a", "a", "R", "e"),),
            good.initial, good.accept, good.reject,
        )
    with pytest.raises(ProgramError, match="move"):
        TuringMachine(
            good.states, good.sigma, good.blank,
            (("e", "a", "a", "X", "o"),),
            good.initial, good.accept, good.reject,
        )
    with pytest.raises(ProgramError, match="blank"):
        TuringMachine(good.states, ("a", "_"), "_", (), good.initial, good.accept, good.reject)


def test_tm_run_even_machine():
    m = machines.even_length()
    r = tm.tm_run(m, "abab")
    assert isinstance(r, tm.Accept)
    assert r.space <= len("abab") + 1
    assert isinstance(tm.tm_run(m, "a"), tm.Reject)
    assert isinstance(tm.tm_run(m, ""), tm.Accept)
    assert tm.tm_run(m, "").space == 1


def test_tm_run_space_guard():
    # two cells get used before the verdict, so a bound of 1 trips
    m = machines.even_length()
    r = tm.tm_run(m, "ab", space_bound=1)
    assert isinstance(r, tm.SpaceExceeded)


def test_tm_run_fuel():
    spinner = TuringMachine(
        states=("s", "yes", "no"),
        sigma=("a",),
        blank="_",
        delta=(("s", "_", "_", "S", "s"), ("s", "a", "a", "S", "s")),
        initial="s", accept="yes", reject="no",
    )
    r = tm.tm_run(spinner, "", fuel=5)
    assert isinstance(r, tm.FuelExceeded) and r.steps == 5


def test_tm_run_missing_rule_rejects():
    m = TuringMachine(
        states=("s", "yes", "no"),
        sigma=("a",),
        blank="_",
        delta=(("s", "a", "a", "R", "yes"),),
        initial="s", accept="yes", reject="no",
    )
    assert isinstance(tm.tm_run(m, ""), tm.Reject)
    assert isinstance(tm.tm_run(m, "a"), tm.Accept)


# --------------------------------------------------------------------------
# Counter automaton semantics.


def single_test_ca() -> CounterAutomaton:
    return CounterAutomaton(
        dim=3,
        states=("q0", "qf"),
        transitions=(CaTransition("q0", (0, 0, 0), "qf", test=1),),
        initial="q0",
        final="qf",
    )


def test_ca_run_single_zero_test():
    a = single_test_ca()
    assert isinstance(tm.ca_run(a, (0, 1, 2)), tm.Accept)
    assert isinstance(tm.ca_run(a, (1, 0, 0)), tm.Reject)


def test_ca_run_fuel_zero():
    a = single_test_ca()
    r = tm.ca_run(a, (0, 0, 0), fuel=0)
    assert isinstance(r, tm.FuelExceeded)


def test_ca_run_rejects_nondeterminism():
    a = CounterAutomaton(
        dim=1,
        states=("q0", "q1", "qf"),
        transitions=(
            CaTransition("q0", (1,), "q1"),
            CaTransition("q0", (1,), "qf"),
        ),
        initial="q0",
        final="qf",
    )
    with pytest.raises(ProgramError, match="nondeterministic"):
        tm.ca_run(a, (0,))


def test_ca_validation():
    with pytest.raises(ProgramError, match="zero update"):
        CaTransition("q0", (1, 0, 0), "qf", test=1)
    with pytest.raises(ProgramError, match="no outgoing"):
        CounterAutomaton(
            dim=1, states=("q0", "qf"),
            transitions=(CaTransition("qf", (0,), "q0"),),
            initial="q0", final="qf",
        )
    with pytest.raises(ProgramError, match="width"):
        CounterAutomaton(
            dim=2, states=("q0", "qf"),
            transitions=(CaTransition("q0", (0,), "qf"),),
            initial="q0", final="qf",
        )
    with pytest.raises(ProgramError, match="out of range"):
        CounterAutomaton(
            dim=1, states=("q0", "qf"),
            transitions=(CaTransition("q0", (0,), "qf", test=2),),
            initial="q0", final="qf",
        )


def test_ca_run_input_validation():
    a = single_test_ca()
    with pytest.raises(ProgramError):
        tm.ca_run(a, (0, 0))
    with pytest.raises(ProgramError):
        tm.ca_run(a, (0, 0, -1))


# --------------------------------------------------------------------------
# TM -> CA compilation.


@pytest.mark.parametrize(
    "builder", [machines.even_length, machines.contains_b, machines.mod_three, machines.bouncer]
)
def test_tm_ca_differential(builder):
    m = builder()
    codec = m.codec()
    ca = tm.tm_to_ca(m)
    for w in machines.words(m.sigma, 4):
        direct = tm.tm_run(m, w)
        simulated = tm.ca_run(ca, tm.initial_vector(w, codec))
        assert isinstance(simulated, (tm.Accept, tm.Reject)), (w, simulated)
        assert isinstance(simulated, tm.Accept) == isinstance(direct, tm.Accept), w
        # space soundness: counters stay under base**(cells used)
        assert simulated.space <= codec.base ** direct.space, w


def test_compiled_ca_is_deterministic_and_finite():
    # ca_run raises on a nondeterministic choice, so a clean differential
    # pass is the determinism check; this pins the empty-input boundary
    m = machines.even_length()
    ca = tm.tm_to_ca(m)
    r = tm.ca_run(ca, (0, 0, 0))
    assert isinstance(r, tm.Accept)
    assert r.trace[0] == (ca.initial, (0, 0, 0))


# --------------------------------------------------------------------------
# CA -> VASS reduction.


def test_reduction_shape():
    red = tm.ca_to_vass(tm.tm_to_ca(machines.even_length()), 27, 30)
    assert len(red.program.counters) == 8  # 2*3 + 2
    assert not red.program.has_zero_tests()
    vass = red.vass()
    assert vass.dim == 8


def test_initial_valuation_frozen_example():
    red = tm.ca_to_vass(tm.tm_to_ca(machines.even_length()), 27, 30)
    val = red.initial_valuation((7, 0, 0))
    assert val == {
        "v1": 7, "v1^": 20, "v2": 0, "v2^": 27, "v3": 0, "v3^": 27,
        "u1": 60, "u2": 1620,
    }
    with pytest.raises(ProgramError, match="outside"):
        red.initial_valuation((28, 0, 0))
    with pytest.raises(ProgramError, match="entries"):
        red.initial_valuation((0, 0))


def test_single_test_reduction_reach_iff_zero():
    red = tm.ca_to_vass(single_test_ca(), 2, 1)
    limits = SearchLimits(max_states=500_000, value_cap=tm.reduction_caps(red))
    for v in range(3):
        res = zero_reach(red.program, red.initial_valuation((v, 1, 2)), limits)
        if v == 0:
            assert isinstance(res, Reachable)
        else:
            assert isinstance(res, Unreachable) and res.exhaustive


def test_zero_budget_cannot_pay():
    red = tm.ca_to_vass(single_test_ca(), 2, 0)
    limits = SearchLimits(max_states=500_000, value_cap=tm.reduction_caps(red))
    res = zero_reach(red.program, red.initial_valuation((0, 0, 0)), limits)
    assert isinstance(res, Unreachable) and res.exhaustive


@pytest.mark.parametrize("builder", [machines.even_length, machines.bouncer])
def test_three_way_agreement_short_words(builder):
    m = builder()
    codec = m.codec()
    ca = tm.tm_to_ca(m)
    for w in machines.words(m.sigma, 2):
        vec = tm.initial_vector(w, codec)
        run = tm.ca_run(ca, vec)
        n_bound = codec.base ** tm.tm_run(m, w).space
        red = tm.ca_to_vass(ca, n_bound, run.steps)
        res = tm.guarded_zero_reach(red, vec)
        if isinstance(run, tm.Accept):
            assert isinstance(res, Reachable), w
        else:
            assert isinstance(res, Unreachable) and res.exhaustive, w


def test_certificate_keeps_hat_invariant():
    m = machines.even_length()
    codec = m.codec()
    ca = tm.tm_to_ca(m)
    vec = tm.initial_vector("ab", codec)
    run = tm.ca_run(ca, vec)
    n_bound = codec.base ** tm.tm_run(m, "ab").space
    red = tm.ca_to_vass(ca, n_bound, run.steps)
    res = tm.guarded_zero_reach(red, vec)
    assert isinstance(res, Reachable)
    # the certificate runs on the hardened program; pairs live until the
    # first terminal drain
    hardened = drain_checked(spend_guarded(red.program, red.value_bound))
    cut = min(num for num, _ in find_tagged(hardened, "fin_drain"))
    live = tuple(cfg for cfg in res.run if cfg.line < cut)
    pairs = {f"v{i}": hat(f"v{i}") for i in range(1, 4)}
    st = run_stats(hardened, live, pairs=pairs, n_value=red.value_bound)
    assert st.hat_violations == 0


# --------------------------------------------------------------------------
# JSON forms.


def test_tm_json_round_trip():
    m = machines.mod_three()
    assert tm.tm_from_json(tm.tm_to_json(m)) == m
    data = json.loads(tm.tm_to_json(m))
    assert set(data) == {"states", "sigma", "blank", "delta", "q0", "qacc", "qrej"}
    del data["blank"]
    with pytest.raises(ProgramError, match="missing key"):
        tm.tm_from_json(json.dumps(data))


def test_ca_json_round_trip():
    a = tm.tm_to_ca(machines.contains_b())
    assert tm.ca_from_json(tm.ca_to_json(a)) == a
    data = json.loads(tm.ca_to_json(a))
    assert {"from", "delta", "to", "zeta"} == set(data["transitions"][0])
    del data["dim"]
    with pytest.raises(ProgramError, match="missing key"):
        tm.ca_from_json(json.dumps(data))
