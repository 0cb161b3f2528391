"""One-tape Turing machines, 3-counter simulation, and the VASS form.

The pipeline has three semantic levels.  ``tm_run`` interprets a one-tape
machine directly, with a space guard surfaced as a distinct verdict.
``tm_to_ca`` compiles the machine to a deterministic 3-counter automaton:
counters l and r hold the tape to the left and right of the head as
base-(|sigma|+1) numbers (first letter least significant, blank = digit
0), the current symbol lives in the finite control, and head moves become
multiply/divide-with-remainder subroutines over the scratch counter x,
with zero tests deciding loop exits and the remainder read off by
counting unit subtractions in distinct control states.  ``ca_to_vass``
then replaces every zero test by the bounded transfer gadget, doubling
each counter into a (v, v^) pair with v + v^ = value_bound and paying
each test from (u1, u2) = (2*test_budget, 2*test_budget*value_bound);
a trailing stage burns the leftover budget and drains every pair, so the
automaton accepts a vector within the stated bounds exactly when the
2d+2-counter program zero-terminates from the mapped valuation.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

from .core import (
    CounterProgram,
    ProgramError,
    Tag,
    Vass,
    dec,
    inc,
    program_to_vass,
)
from .engine import SearchLimits, zero_reach
from .gadgets import GUARD, U1, U2, _Asm, _emit_zero_test, drain_checked, hat, spend_guarded

MOVES = ("L", "R", "S")

# ---------------------------------------------------------------------------
# Word encoding.


@dataclass(frozen=True)
class WordCodec:
    """Base-(|symbols|+1) numbering of words; symbol i has digit i+1.

    The first letter is the least significant digit, so pushing a letter
    onto the front of a word multiplies by the base.  Digit 0 is reserved
    for the blank: it never occurs inside num(w), which makes num a
    bijection between words and the values whose digits are all nonzero.
    """

    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.symbols:
            raise ProgramError("codec needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ProgramError("codec symbols must be distinct")

    @property
    def base(self) -> int:
        return len(self.symbols) + 1

    def digit(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol) + 1
        except ValueError:
            raise ProgramError(f"symbol {symbol!r} outside the alphabet") from None

    def num(self, word: Sequence[str]) -> int:
        value = 0
        for symbol in reversed(word):
            value = value * self.base + self.digit(symbol)
        return value

    def denum(self, value: int) -> str:
        if value < 0:
            raise ProgramError("word codes are nonnegative")
        letters = []
        while value:
            value, d = divmod(value, self.base)
            if d == 0:
                raise ProgramError("value has a zero digit, not a word code")
            letters.append(self.symbols[d - 1])
        return "".join(letters)


# ---------------------------------------------------------------------------
# Turing machines.


@dataclass(frozen=True)
class TuringMachine:
    """Deterministic one-tape machine; accept/reject states are halting."""

    states: tuple[str, ...]
    sigma: tuple[str, ...]
    blank: str
    delta: tuple[tuple[str, str, str, str, str], ...]  # (q, read, write, move, q')
    initial: str
    accept: str
    reject: str

    def __post_init__(self) -> None:
        have = set(self.states)
        if len(have) != len(self.states):
            raise ProgramError("duplicate states")
        for q in (self.initial, self.accept, self.reject):
            if q not in have:
                raise ProgramError(f"state {q!r} not in the state list")
        alphabet = set(self.sigma) | {self.blank}
        if self.blank in self.sigma or len(alphabet) != len(self.sigma) + 1:
            raise ProgramError("tape symbols must be distinct and exclude the blank")
        seen = set()
        for q, read, write, move, q2 in self.delta:
            if q in (self.accept, self.reject):
                raise ProgramError("accept/reject states must be halting")
            if q not in have or q2 not in have:
                raise ProgramError(f"transition {q!r}->{q2!r} uses unknown state")
            if read not in alphabet or write not in alphabet:
                raise ProgramError(f"transition on {read!r}/{write!r} leaves the alphabet")
            if move not in MOVES:
                raise ProgramError(f"move must be one of {MOVES}")
            if (q, read) in seen:
                raise ProgramError(f"two transitions from ({q!r}, {read!r})")
            seen.add((q, read))

    def rules(self) -> dict[tuple[str, str], tuple[str, str, str]]:
        return {(q, read): (write, move, q2) for q, read, write, move, q2 in self.delta}

    def codec(self) -> WordCodec:
        return WordCodec(self.sigma)


# ---------------------------------------------------------------------------
# Verdicts.  tm_run fills steps/space (tape cells); ca_run fills
# steps/space/trace, where space is the largest counter value seen.

Trace = tuple[tuple[str, tuple[int, ...]], ...]


@dataclass(frozen=True)
class Accept:
    steps: int
    space: int
    trace: Trace = ()


@dataclass(frozen=True)
class Reject:
    steps: int
    space: int
    trace: Trace = ()


@dataclass(frozen=True)
class SpaceExceeded:
    steps: int
    space: int


@dataclass(frozen=True)
class FuelExceeded:
    steps: int
    space: int
    trace: Trace = ()


def tm_run(
    m: TuringMachine,
    word: Sequence[str],
    space_bound: int = 1_000_000,
    fuel: int = 1_000_000,
) -> Accept | Reject | SpaceExceeded | FuelExceeded:
    """Step semantics with the space guard checked before every step.

    Space counts the tape extent touched so far: the input cells plus
    every cell the head has visited (at least one, even on empty input).
    A missing transition rejects in place.
    """
    codec = m.codec()
    for symbol in word:
        codec.digit(symbol)
    tape = dict(enumerate(word))
    head = 0
    lo, hi = 0, max(0, len(word) - 1)
    state = m.initial
    rules = m.rules()
    steps = 0
    while True:
        lo, hi = min(lo, head), max(hi, head)
        space = hi - lo + 1
        if state == m.accept:
            return Accept(steps, space)
        if state == m.reject:
            return Reject(steps, space)
        if space > space_bound:
            return SpaceExceeded(steps, space)
        if steps >= fuel:
            return FuelExceeded(steps, space)
        read = tape.get(head, m.blank)
        rule = rules.get((state, read))
        if rule is None:
            return Reject(steps, space)
        write, move, state = rule
        tape[head] = write
        head += {"L": -1, "R": 1, "S": 0}[move]
        steps += 1


# ---------------------------------------------------------------------------
# Counter automata.


@dataclass(frozen=True)
class CaTransition:
    source: str
    delta: tuple[int, ...]
    target: str
    test: int | None = None  # 1-based counter index; zero update required

    def __post_init__(self) -> None:
        if self.test is not None and any(self.delta):
            raise ProgramError("zero-test transitions must carry a zero update")


@dataclass(frozen=True)
class CounterAutomaton:
    dim: int
    states: tuple[str, ...]
    transitions: tuple[CaTransition, ...]
    initial: str
    final: str

    def __post_init__(self) -> None:
        have = set(self.states)
        if len(have) != len(self.states):
            raise ProgramError("duplicate states")
        if self.initial not in have or self.final not in have:
            raise ProgramError("initial/final state not in state list")
        for t in self.transitions:
            if t.source not in have or t.target not in have:
                raise ProgramError(f"transition {t.source!r}->{t.target!r} uses unknown state")
            if len(t.delta) != self.dim:
                raise ProgramError("transition update has the wrong width")
            if t.test is not None and not 1 <= t.test <= self.dim:
                raise ProgramError(f"zero test on counter {t.test} out of range")
            if t.source == self.final:
                raise ProgramError("final state must have no outgoing transitions")

    def outgoing(self) -> dict[str, tuple[CaTransition, ...]]:
        table: dict[str, list[CaTransition]] = {q: [] for q in self.states}
        for t in self.transitions:
            table[t.source].append(t)
        return {q: tuple(ts) for q, ts in table.items()}


def _enabled(t: CaTransition, values: tuple[int, ...]) -> bool:
    if t.test is not None:
        return values[t.test - 1] == 0
    return all(v + d >= 0 for v, d in zip(values, t.delta))


def ca_run(
    a: CounterAutomaton, vector: Sequence[int], fuel: int = 1_000_000
) -> Accept | Reject | FuelExceeded:
    """Unique-run acceptor: zero tests fire only on a zero counter, and a
    configuration enabling two transitions is a contract violation."""
    values = tuple(vector)
    if len(values) != a.dim or any(v < 0 for v in values):
        raise ProgramError(f"input vector must be {a.dim} nonnegative entries")
    outgoing = a.outgoing()
    trace = [(a.initial, values)]
    state = a.initial
    space = max(values, default=0)
    steps = 0
    while True:
        enabled = [t for t in outgoing[state] if _enabled(t, values)]
        if not enabled:
            result = Accept if state == a.final else Reject
            return result(steps, space, tuple(trace))
        if len(enabled) > 1:
            raise ProgramError(f"nondeterministic choice at state {state!r}")
        if steps >= fuel:
            return FuelExceeded(steps, space, tuple(trace))
        t = enabled[0]
        values = tuple(v + d for v, d in zip(values, t.delta))
        state = t.target
        space = max(space, max(values))
        trace.append((state, values))
        steps += 1


def initial_vector(word: Sequence[str], codec: WordCodec) -> tuple[int, int, int]:
    return (codec.num(word), 0, 0)


# ---------------------------------------------------------------------------
# TM -> 3-counter automaton.

L, R, X = 1, 2, 3  # left tape word, right tape word, scratch


def tm_to_ca(m: TuringMachine) -> CounterAutomaton:
    """Deterministic 3-counter simulation of a one-tape machine.

    The input vector is (num(w), 0, 0): a decode stage pops the first
    letter off counter l into the control and leaves the rest in r.  A
    head move then pushes the written symbol onto one side (multiply by
    the base, add its digit) and pops the next symbol off the other side
    (divide by the base; the remainder is counted out in unit
    subtractions whose count lives in distinct control states).  Every
    loop exit is decided by a zero test, so exactly one transition is
    enabled in every reachable configuration.
    """
    codec = m.codec()
    base = codec.base
    zero = (0, 0, 0)
    transitions: list[CaTransition] = []

    def update(source: str, changes: dict[int, int], target: str) -> None:
        delta = tuple(changes.get(i, 0) for i in (L, R, X))
        transitions.append(CaTransition(source, delta, target))

    def test(source: str, counter: int, target: str) -> None:
        transitions.append(CaTransition(source, zero, target, counter))

    def symbol_of(digit: int) -> str:
        return m.blank if digit == 0 else m.sigma[digit - 1]

    def digit_of(symbol: str) -> int:
        return 0 if symbol == m.blank else codec.digit(symbol)

    def landing(q: str, symbol: str) -> str:
        if q == m.accept:
            return "acc"
        if q == m.reject:
            return "rej"
        return f"sim|{q}|{symbol}"

    def emit_push(prefix: str, counter: int, digit: int, target: str) -> str:
        """counter := counter*base + digit, via x; two zero tests."""
        drain, back, add = f"{prefix}.drain", f"{prefix}.back", f"{prefix}.add"
        update(drain, {counter: -1, X: base}, drain)
        test(drain, counter, back)
        update(back, {X: -1, counter: 1}, back)
        test(back, X, add)
        update(add, {counter: digit}, target)
        return drain

    def emit_pop(prefix: str, counter: int, dest: int, after) -> str:
        """counter := counter div base into dest (via x), remainder k in
        control; continues at after(k).  Two zero tests per call."""
        tries = [f"{prefix}.t{k}" for k in range(base)]
        moves = [f"{prefix}.m{k}" for k in range(base)]
        for k in range(base):
            test(tries[k], counter, moves[k])
            if k + 1 < base:
                update(tries[k], {counter: -1}, tries[k + 1])
            else:
                update(tries[k], {counter: -1, X: 1}, tries[0])
            update(moves[k], {X: -1, dest: 1}, moves[k])
            test(moves[k], X, after(k))
        return tries[0]

    entry = emit_pop(
        "in", L, R, lambda k: landing(m.initial, symbol_of(k))
    )

    rules = m.rules()
    working = [q for q in m.states if q not in (m.accept, m.reject)]
    for q in working:
        for symbol in m.sigma + (m.blank,):
            source = f"sim|{q}|{symbol}"
            rule = rules.get((q, symbol))
            if rule is None:
                update(source, {}, "rej")
                continue
            write, move, q2 = rule
            if q2 in (m.accept, m.reject):
                update(source, {}, landing(q2, write))
            elif move == "S":
                update(source, {}, landing(q2, write))
            elif move == "R":
                prefix = f"{q}|{symbol}|R"
                pop = emit_pop(prefix, R, R, lambda k, q2=q2: landing(q2, symbol_of(k)))
                push = emit_push(prefix, L, digit_of(write), pop)
                update(source, {}, push)
            else:
                prefix = f"{q}|{symbol}|L"
                pop = emit_pop(prefix, L, L, lambda k, q2=q2: landing(q2, symbol_of(k)))
                push = emit_push(prefix, R, digit_of(write), pop)
                update(source, {}, push)

    names: list[str] = [entry]
    seen = {entry}
    for t in transitions:
        for name in (t.source, t.target):
            if name not in seen:
                seen.add(name)
                names.append(name)
    for name in ("acc", "rej"):
        if name not in seen:
            seen.add(name)
            names.append(name)
    return CounterAutomaton(
        dim=3,
        states=tuple(names),
        transitions=tuple(transitions),
        initial=entry,
        final="acc",
    )


# ---------------------------------------------------------------------------
# Counter automaton -> VASS (counter program without zero tests).


@dataclass(frozen=True)
class VassReduction:
    """Zero-test-free program simulating a counter automaton within bounds.

    Acceptance of a vector v (every counter staying <= value_bound, the
    run performing <= test_budget zero tests) coincides with
    zero-termination of the program from initial_valuation(v).
    """

    program: CounterProgram
    dim: int
    value_bound: int
    test_budget: int

    def initial_valuation(self, vector: Sequence[int]) -> dict[str, int]:
        values = tuple(vector)
        if len(values) != self.dim:
            raise ProgramError(f"input vector must have {self.dim} entries")
        valuation = {U1: 2 * self.test_budget, U2: 2 * self.test_budget * self.value_bound}
        for i, value in enumerate(values, start=1):
            if not 0 <= value <= self.value_bound:
                raise ProgramError(f"entry {value} outside 0..{self.value_bound}")
            valuation[f"v{i}"] = value
            valuation[hat(f"v{i}")] = self.value_bound - value
        return valuation

    def vass(self) -> Vass:
        return program_to_vass(self.program)


def ca_to_vass(
    a: CounterAutomaton, value_bound: int, test_budget: int
) -> VassReduction:
    """Replace zero tests by transfer gadgets; hat-mirror every update.

    Counter i becomes the pair (vi, vi^) with vi + vi^ = value_bound on
    every path (updates decrement before incrementing, so exceeding the
    bound strands the run).  Each zero-test transition becomes the pump/
    drop/pay gadget spending (2, 2*value_bound) from (u1, u2) exactly
    when the tested counter is zero.  After the final state: a mirrored
    drain returns the last pair to (0, bound) so a burn loop of tests on
    it can absorb the unused budget, then plain drain loops zero every
    pair.  Only runs whose tests were all honest and that performed
    exactly test_budget gadget entries (burn included) end all-zero.
    """
    if value_bound < 0 or test_budget < 0:
        raise ProgramError("bounds must be nonnegative")
    names = tuple(f"v{i}" for i in range(1, a.dim + 1))
    hats = tuple(hat(v) for v in names)
    asm = _Asm()

    def block(t: CaTransition) -> None:
        if t.test is not None:
            _emit_zero_test(asm, names[t.test - 1], hats[t.test - 1])
        else:
            # adjacent mirror halves, decrement first: the pair sum leaves
            # value_bound only while standing on its own completing half
            for i, c in enumerate(t.delta):
                if c > 0:
                    asm.emit(dec(hats[i], c))
                    asm.emit(inc(names[i], c))
                elif c < 0:
                    asm.emit(dec(names[i], -c))
                    asm.emit(inc(hats[i], -c))
        asm.goto(f"st.{t.target}")

    outgoing = a.outgoing()
    order = [a.initial]
    order += [q for q in a.states if q not in (a.initial, a.final)]
    if a.final != a.initial:
        order.append(a.final)
    for state in order:
        asm.label(f"st.{state}")
        if state == a.final:
            break
        ts = outgoing[state]
        if not ts:
            asm.goto(f"st.{state}")
        elif len(ts) == 1:
            block(ts[0])
        else:
            labels = []
            for k, t in enumerate(ts):
                labels.append(f"st.{state}.{k}")
            asm.goto(*labels)
            for label, t in zip(labels, ts):
                asm.label(label)
                block(t)

    uid = asm.fresh()
    asm.label(f"pd{uid}.head")
    asm.goto(f"pd{uid}.body", f"pd{uid}.out", tag=Tag("pre_drain", (names[-1],), uid))
    asm.label(f"pd{uid}.body")
    asm.emit(dec(names[-1]))
    asm.emit(inc(hats[-1]))
    asm.goto(f"pd{uid}.head")
    asm.label(f"pd{uid}.out")

    uid = asm.fresh()
    asm.label(f"bu{uid}.head")
    asm.goto(f"bu{uid}.body", f"bu{uid}.out", tag=Tag("u_drain", (U1,), uid))
    asm.label(f"bu{uid}.body")
    _emit_zero_test(asm, names[-1], hats[-1])
    asm.goto(f"bu{uid}.head")
    asm.label(f"bu{uid}.out")

    for name in names + hats:
        uid = asm.fresh()
        asm.label(f"dr{uid}.head")
        asm.goto(f"dr{uid}.body", f"dr{uid}.out", tag=Tag("fin_drain", (name,), uid))
        asm.label(f"dr{uid}.body")
        asm.emit(dec(name))
        asm.goto(f"dr{uid}.head")
        asm.label(f"dr{uid}.out")

    program = asm.build(names + hats + (U1, U2))
    return VassReduction(
        program=program, dim=a.dim, value_bound=value_bound, test_budget=test_budget
    )


def reduction_caps(reduction: VassReduction) -> dict[str, int]:
    """Value caps no run can exceed: pairs are bounded by construction,
    the testing counters only ever decrease."""
    caps = {U1: 2 * reduction.test_budget}
    caps[U2] = caps[U1] * reduction.value_bound
    for i in range(1, reduction.dim + 1):
        caps[f"v{i}"] = reduction.value_bound
        caps[hat(f"v{i}")] = reduction.value_bound
    return caps


def guarded_zero_reach(
    reduction: VassReduction,
    vector: Sequence[int],
    max_states: int = 5_000_000,
    max_seconds: float | None = None,
):
    """zero_reach on a reachability-equivalent hardening of the program.

    The spend guard forces every gadget entry to pay its budget in full
    and the checked exits prune partial transfers and partial drains;
    neither changes whether the all-zero halt is reachable, but together
    they collapse the doomed parts of the search space.
    """
    valuation = reduction.initial_valuation(vector)
    program = drain_checked(spend_guarded(reduction.program, reduction.value_bound))
    valuation[GUARD] = 0
    caps = reduction_caps(reduction)
    caps[GUARD] = 2 * reduction.value_bound
    limits = SearchLimits(max_states=max_states, max_seconds=max_seconds, value_cap=caps)
    return zero_reach(program, valuation, limits)


# ---------------------------------------------------------------------------
# JSON forms.


def tm_to_json(m: TuringMachine) -> str:
    return json.dumps(
        {
            "states": list(m.states),
            "sigma": list(m.sigma),
            "blank": m.blank,
            "delta": [
                {"q": q, "read": read, "write": write, "move": move, "q'": q2}
                for q, read, write, move, q2 in m.delta
            ],
            "q0": m.initial,
            "qacc": m.accept,
            "qrej": m.reject,
        },
        indent=2,
    )


def tm_from_json(text: str) -> TuringMachine:
    data = json.loads(text)
    try:
        return TuringMachine(
            states=tuple(data["states"]),
            sigma=tuple(data["sigma"]),
            blank=data["blank"],
            delta=tuple(
                (t["q"], t["read"], t["write"], t["move"], t["q'"])
                for t in data["delta"]
            ),
            initial=data["q0"],
            accept=data["qacc"],
            reject=data["qrej"],
        )
    except KeyError as exc:
        raise ProgramError(f"missing key in machine JSON: {exc}") from exc


def ca_to_json(a: CounterAutomaton) -> str:
    return json.dumps(
        {
            "dim": a.dim,
            "states": list(a.states),
            "initial": a.initial,
            "final": a.final,
            "transitions": [
                {"from": t.source, "delta": list(t.delta), "to": t.target, "zeta": t.test}
                for t in a.transitions
            ],
        },
        indent=2,
    )


def ca_from_json(text: str) -> CounterAutomaton:
    data = json.loads(text)
    try:
        return CounterAutomaton(
            dim=data["dim"],
            states=tuple(data["states"]),
            transitions=tuple(
                CaTransition(t["from"], tuple(t["delta"]), t["to"], t.get("zeta"))
                for t in data["transitions"]
            ),
            initial=data["initial"],
            final=data["final"],
        )
    except KeyError as exc:
        raise ProgramError(f"missing key in automaton JSON: {exc}") from exc
