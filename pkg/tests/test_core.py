"""Program model: steps, runs, substitution, combinators."""

import random

import pytest

from vass_forge.core import (
    Configuration,
    CounterProgram,
    ProgramError,
    alt,
    dec,
    goto,
    halt,
    inc,
    is_zero_terminating,
    loop,
    seq,
    skip,
    straight,
    substitute,
    successors,
    validate_run,
    zero_test,
)

# The running example: a loop that repeatedly subtracts 3, then adds 1.
BRANCHY = CounterProgram(
    ("x",),
    (goto(2, 4), dec("x", 3), goto(1), inc("x", 1), halt()),
)


def cfg(line, x):
    return Configuration(line, (x,))


def test_successors_branches_at_goto():
    assert set(successors(BRANCHY, cfg(1, 7))) == {cfg(2, 7), cfg(4, 7)}


def test_successors_blocks_underflowing_dec():
    assert successors(BRANCHY, cfg(2, 2)) == ()
    assert successors(BRANCHY, cfg(2, 3)) == (cfg(3, 0),)


def test_successors_halt_empty():
    assert successors(BRANCHY, cfg(5, 8)) == ()


def test_successors_out_of_range_empty():
    assert successors(BRANCHY, Configuration(9, (0,))) == ()


def test_successors_zero_test():
    p = straight(zero_test("x"))
    assert successors(p, cfg(1, 0)) == (cfg(2, 0),)
    assert successors(p, cfg(1, 2)) == ()


def test_goto_duplicate_targets_deduplicated():
    p = CounterProgram((), (goto(2, 2), halt()))
    assert successors(p, Configuration(1, ())) == (Configuration(2, ()),)


def test_validate_run_accepts_worked_example():
    assert validate_run(BRANCHY, (cfg(1, 7), cfg(4, 7), cfg(5, 8)))


def test_validate_run_rejects_fake_edge():
    assert not validate_run(BRANCHY, (cfg(1, 7), cfg(5, 8)))


def test_validate_run_single_configuration():
    assert validate_run(BRANCHY, (cfg(1, 7),))
    assert not validate_run(BRANCHY, ())


def test_zero_terminating_forced_run():
    p = straight(dec("x"))
    run = (cfg(1, 1), cfg(2, 0))
    assert is_zero_terminating(p, run)


def test_zero_terminating_rejects_nonzero_end():
    assert not is_zero_terminating(BRANCHY, (cfg(1, 7), cfg(4, 7), cfg(5, 8)))


def test_zero_terminating_rejects_late_start():
    p = straight(dec("x"))
    assert not is_zero_terminating(p, (Configuration(2, (0,)),))


def test_program_requires_halt_last():
    with pytest.raises(ProgramError):
        CounterProgram(("x",), (inc("x", 1),))
    with pytest.raises(ProgramError):
        CounterProgram((), (halt(), skip(), halt()))


def test_program_rejects_bad_targets():
    with pytest.raises(ProgramError):
        CounterProgram((), (goto(7), skip(), halt()))


def test_program_rejects_undeclared_counter():
    with pytest.raises(ProgramError):
        CounterProgram((), (inc("x", 1), halt()))


def test_substitute_line_count():
    c1 = CounterProgram((), (skip(), skip(), halt()))
    c2 = straight(inc("y", 1))
    assert len(substitute(c1, 2, c2)) == len(c1) + len(c2) - 1


def test_substitute_identity_with_one_line_halt():
    c1 = CounterProgram(("x",), (goto(2, 3), skip(), halt()))
    c2 = CounterProgram((), (halt(),))
    assert substitute(c1, 2, c2) == c1


def test_substitute_requires_skip():
    c1 = CounterProgram(("x",), (inc("x", 1), halt()))
    with pytest.raises(ProgramError):
        substitute(c1, 1, straight(skip()))
    with pytest.raises(ProgramError):
        substitute(c1, 5, straight(skip()))


def test_substitute_rebases_targets():
    outer = CounterProgram(("x",), (goto(3), skip(), inc("x", 1), halt()))
    inner = CounterProgram(("y",), (goto(1), dec("y", 1), halt()))
    merged = substitute(outer, 2, inner)
    # outer line 1 jumped to 3, which shifted by len(inner)-1 = 2.
    assert merged.lines[0] == goto(5)
    # inner's self-loop target 1 moved to the block start at 2.
    assert merged.lines[1] == goto(2)
    # inner's halt became a skip.
    assert merged.lines[3] == skip()
    assert merged.counters == ("x", "y")


def two_level_reach(outer, k, inner, init, cap=6):
    """Reference semantics for substitution: execute outer with line k
    expanded into inner on the fly, collecting all reachable (phase, line,
    values) states.  Values capped to keep the space finite."""
    names = list(outer.counters)
    for n in inner.counters:
        if n not in names:
            names.append(n)
    idx = {n: i for i, n in enumerate(names)}

    def widen(program, values):
        out = [0] * len(program.counters)
        for i, n in enumerate(program.counters):
            out[i] = values[idx[n]]
        return tuple(out)

    def merge(program, values, base):
        out = list(base)
        for i, n in enumerate(program.counters):
            out[idx[n]] = values[i]
        return tuple(out)

    start = ("outer", 1, tuple(init.get(n, 0) for n in names))
    seen = {start}
    frontier = [start]
    halted = set()
    while frontier:
        phase, line, values = frontier.pop()
        if phase == "outer" and line == k:
            nxt = [("inner", 1, values)]
        else:
            program = outer if phase == "outer" else inner
            cfgs = successors(program, Configuration(line, widen(program, values)))
            nxt = []
            for c in cfgs:
                merged = merge(program, c.values, values)
                if max(merged, default=0) > cap:
                    continue
                if phase == "inner" and inner.lines[c.line - 1].kind == "halt":
                    # reaching inner's end falls through to the outer line after k
                    nxt.append(("outer", k + 1, merged))
                else:
                    nxt.append((phase, c.line, merged))
            program_lines = outer.lines if phase == "outer" else inner.lines
            if program_lines[line - 1].kind == "halt" and phase == "outer":
                halted.add(values)
        for state in nxt:
            if state not in seen:
                seen.add(state)
                frontier.append(state)
    return halted


def flat_halt_reach(program, init, cap=6):
    """Halt-line valuations of a flat program under the same value cap."""
    start = Configuration(1, tuple(init.get(n, 0) for n in program.counters))
    seen = {start}
    frontier = [start]
    halted = set()
    while frontier:
        c = frontier.pop()
        if program.lines[c.line - 1].kind == "halt":
            halted.add(c.values)
        for n in successors(program, c):
            if max(n.values, default=0) > cap or n in seen:
                continue
            seen.add(n)
            frontier.append(n)
    return halted


def random_program(rng, counters, lines):
    body = []
    for i in range(1, lines):
        kind = rng.choice(("inc", "dec", "skip", "goto", "goto"))
        if kind == "inc":
            body.append(inc(rng.choice(counters), rng.randint(1, 2)))
        elif kind == "dec":
            body.append(dec(rng.choice(counters), rng.randint(1, 2)))
        elif kind == "skip":
            body.append(skip())
        else:
            body.append(goto(*(rng.randint(1, lines) for _ in range(rng.randint(1, 2)))))
    body.append(halt())
    return CounterProgram(tuple(counters), tuple(body))


def test_substitution_matches_two_level_semantics():
    rng = random.Random(20240817)
    for _ in range(60):
        outer = random_program(rng, ("a", "b"), rng.randint(3, 6))
        inner = random_program(rng, ("b", "c"), rng.randint(2, 5))
        skips = [i for i, ins in enumerate(outer.lines[:-1], start=1) if ins.kind == "skip"]
        if not skips:
            continue
        k = rng.choice(skips)
        merged = substitute(outer, k, inner)
        init = {"a": rng.randint(0, 2), "b": rng.randint(0, 2), "c": rng.randint(0, 2)}

        reference = two_level_reach(outer, k, inner, init)
        flat = flat_halt_reach(merged, init)
        # Project the flat result onto the shared name order used above.
        names = list(outer.counters) + [n for n in inner.counters if n not in outer.counters]
        assert merged.counters == tuple(names)
        assert flat == reference


def test_seq_runs_both_programs():
    p = seq(straight(inc("x", 2)), straight(dec("x", 1)))
    assert flat_halt_reach(p, {"x": 0}) == {(1,)}


def test_alt_offers_both_branches():
    p = alt(straight(inc("x", 1)), straight(inc("x", 2)))
    assert flat_halt_reach(p, {"x": 0}) == {(1,), (2,)}


def test_loop_zero_or_more_iterations():
    p = loop(straight(dec("x", 3)))
    assert flat_halt_reach(p, {"x": 6}) == {(6,), (3,), (0,)}


def test_loop_seq_rebuilds_branchy_example():
    built = seq(loop(straight(dec("x", 3))), straight(inc("x", 1)))
    for x in range(0, 9):
        assert flat_halt_reach(built, {"x": x}, cap=12) == flat_halt_reach(
            BRANCHY, {"x": x}, cap=12
        )


def test_alt_skeleton_shape():
    p = alt(straight(inc("x", 1)), straight(dec("x", 1)))
    assert p.lines == (
        goto(2, 5),
        inc("x", 1),
        skip(),
        goto(7),
        dec("x", 1),
        skip(),
        skip(),
        halt(),
    )


def test_loop_skeleton_shape():
    p = loop(straight(inc("x", 1)))
    assert p.lines == (
        goto(2, 5),
        inc("x", 1),
        skip(),
        goto(1),
        skip(),
        halt(),
    )
