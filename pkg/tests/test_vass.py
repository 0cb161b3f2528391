"""VASS model, program conversion both ways, JSON."""

import pytest

from vass_forge.core import (
    CounterProgram,
    ProgramError,
    dec,
    goto,
    halt,
    inc,
    straight,
    zero_test,
)
from vass_forge.engine import Reachable, Unreachable, zero_reach
from vass_forge.core import (
    Vass,
    program_to_vass,
    valuation_vector,
    vass_from_json,
    vass_to_dot,
    vass_to_json,
    vass_to_program,
)

BRANCHY = CounterProgram(
    ("x",),
    (goto(2, 4), dec("x", 3), goto(1), inc("x", 1), halt()),
)


def test_program_to_vass_branchy():
    v = program_to_vass(BRANCHY)
    assert v.dim == 1
    assert v.states == (1, 2, 3, 4, 5)
    assert v.initial == 1 and v.final == 5
    assert set(v.transitions) == {
        (1, (0,), 2),
        (1, (0,), 4),
        (2, (-3,), 3),
        (3, (0,), 1),
        (4, (1,), 5),
    }


def test_program_to_vass_rejects_zero_tests():
    p = straight(zero_test("x"))
    with pytest.raises(ProgramError):
        program_to_vass(p)


def test_branchy_roundtrips_exactly():
    assert vass_to_program(program_to_vass(BRANCHY)) == BRANCHY


def test_final_state_must_be_a_sink():
    with pytest.raises(ProgramError):
        Vass(1, ("x",), (1, 2), 1, 2, ((2, (0,), 1),))


def test_duplicate_states_rejected():
    with pytest.raises(ProgramError):
        Vass(1, ("x",), (1, 1), 1, 1, ())


def test_dim_must_match_counters():
    with pytest.raises(ProgramError):
        Vass(2, ("x",), (1, 2), 1, 2, ())


def test_delta_width_checked():
    with pytest.raises(ProgramError):
        Vass(1, ("x",), (1, 2), 1, 2, ((1, (0, 0), 2),))


def test_unknown_transition_state_rejected():
    with pytest.raises(ProgramError):
        Vass(1, ("x",), (1, 2), 1, 2, ((1, (0,), 3),))


DRAIN = Vass(
    dim=2,
    counters=("x", "y"),
    states=("a", "b"),
    initial="a",
    final="b",
    transitions=(
        ("a", (-1, -1), "a"),
        ("a", (0, 0), "b"),
    ),
)


def test_multi_counter_transition_becomes_atomic_block():
    p = vass_to_program(DRAIN)
    # Head goto over two blocks: the self-loop (two decrements and a jump
    # back) and the exit jump.
    assert p.lines == (
        goto(2, 5),
        dec("x", 1),
        dec("y", 1),
        goto(1),
        goto(6),
        halt(),
    )


@pytest.mark.parametrize(
    "init,reachable",
    [({"x": 2, "y": 2}, True), ({"x": 1, "y": 2}, False), ({}, True)],
)
def test_zero_reach_preserved_by_serialization(init, reachable):
    want = Reachable if reachable else Unreachable
    assert isinstance(zero_reach(DRAIN, init), want)
    assert isinstance(zero_reach(vass_to_program(DRAIN), init), want)


def test_dead_state_becomes_self_loop():
    v = Vass(1, ("x",), (1, 2, 3), 1, 3, ((1, (0,), 2), (1, (-1,), 3)))
    p = vass_to_program(v)
    # state 2 has no way out: its line must not fall through into final.
    assert isinstance(zero_reach(p, {"x": 1}), Reachable)
    assert isinstance(zero_reach(p, {"x": 0}), Unreachable)


def test_initial_equals_final_alone_is_fine():
    v = Vass(1, ("x",), ("q",), "q", "q", ())
    p = vass_to_program(v)
    assert isinstance(zero_reach(p, {}), Reachable)


def test_initial_equals_final_with_others_rejected():
    v = Vass(1, ("x",), ("q", "r"), "q", "q", ())
    with pytest.raises(ProgramError):
        vass_to_program(v)


def test_json_roundtrip():
    v = program_to_vass(BRANCHY)
    assert vass_from_json(vass_to_json(v)) == v
    assert vass_from_json(vass_to_json(DRAIN)) == DRAIN


def test_json_missing_key():
    with pytest.raises(ProgramError):
        vass_from_json('{"dim": 1}')


def test_dot_export():
    dot = vass_to_dot(DRAIN)
    assert dot.startswith("digraph")
    assert '"a" -> "b"' in dot and '"a" -> "a"' in dot
    assert "x-1, y-1" in dot


def test_valuation_vector():
    assert valuation_vector(DRAIN, {"y": 3}) == (0, 3)
    with pytest.raises(ProgramError):
        valuation_vector(DRAIN, {"z": 1})
