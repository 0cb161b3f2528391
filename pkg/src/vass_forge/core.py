"""Counter programs: instructions, configurations, steps, substitution.

A counter program is a numbered list of instructions over a finite set of
counters holding naturals.  Lines are 1-based.  The last line is the unique
``halt``.  Counters never go negative: a decrement that would underflow is
simply not enabled.  Larger programs are built by substituting whole
programs into ``skip`` placeholder lines.

Plain counter programs have no zero tests; a ``zero-test x`` instruction
(enabled only when x is 0) is accepted by the data model for the
counter-automaton pipeline, and rejected by every VASS-only operation.

This module also owns the text format (parse/render/DOT) and the VASS
view: conversion between programs and vector addition systems with
states, plus JSON and DOT export for both.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_'^]*\Z")

KINDS = ("inc", "dec", "goto", "skip", "halt", "zerotest")


class ProgramError(ValueError):
    """A structurally invalid program, configuration or run."""


@dataclass(frozen=True)
class Tag:
    """Structured annotation on an instruction.

    Tags never affect program semantics or equality; they let builders mark
    choice points (loop heads, branch heads, pay lines) so that run
    synthesis and test accounting can find them after substitution has
    moved lines around.  ``uid`` disambiguates repeated kinds.
    """

    kind: str
    args: tuple = ()
    uid: int = 0


@dataclass(frozen=True)
class Instruction:
    kind: str
    counter: str | None = None
    amount: int = 0
    targets: tuple[int, ...] = ()
    tag: Tag | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ProgramError(f"unknown instruction kind {self.kind!r}")
        if self.kind in ("inc", "dec"):
            if self.counter is None or not NAME_RE.match(self.counter):
                raise ProgramError(f"bad counter name {self.counter!r}")
            if self.amount < 0:
                raise ProgramError(f"{self.kind} amount must be >= 0, got {self.amount}")
            if self.targets:
                raise ProgramError(f"{self.kind} takes no targets")
        elif self.kind == "zerotest":
            if self.counter is None or not NAME_RE.match(self.counter):
                raise ProgramError(f"bad counter name {self.counter!r}")
            if self.amount or self.targets:
                raise ProgramError("zero-test takes only a counter")
        elif self.kind == "goto":
            if not self.targets:
                raise ProgramError("goto needs at least one target")
            if self.counter is not None or self.amount:
                raise ProgramError("goto takes no counter")
        else:
            if self.counter is not None or self.amount or self.targets:
                raise ProgramError(f"{self.kind} takes no operands")

    def with_targets(self, targets: Iterable[int]) -> Instruction:
        return Instruction(self.kind, self.counter, self.amount, tuple(targets), self.tag)


def inc(counter: str, amount: int = 1, tag: Tag | None = None) -> Instruction:
    return Instruction("inc", counter, amount, (), tag)


def dec(counter: str, amount: int = 1, tag: Tag | None = None) -> Instruction:
    return Instruction("dec", counter, amount, (), tag)


def goto(*targets: int, tag: Tag | None = None) -> Instruction:
    return Instruction("goto", None, 0, targets, tag)


def skip(tag: Tag | None = None) -> Instruction:
    return Instruction("skip", None, 0, (), tag)


def halt() -> Instruction:
    return Instruction("halt")


def zero_test(counter: str, tag: Tag | None = None) -> Instruction:
    return Instruction("zerotest", counter, 0, (), tag)


@dataclass(frozen=True)
class CounterProgram:
    """An immutable counter program.

    ``counters`` fixes the counter order used by ``Configuration.values``.
    It may list counters no instruction touches.
    """

    counters: tuple[str, ...]
    lines: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        if not self.lines:
            raise ProgramError("a program needs at least one line")
        if self.lines[-1].kind != "halt":
            raise ProgramError("the last line must be halt")
        seen: set[str] = set()
        for name in self.counters:
            if not NAME_RE.match(name):
                raise ProgramError(f"bad counter name {name!r}")
            if name in seen:
                raise ProgramError(f"duplicate counter {name!r}")
            seen.add(name)
        m = len(self.lines)
        for number, ins in enumerate(self.lines, start=1):
            if ins.kind == "halt" and number != m:
                raise ProgramError(f"halt at line {number}, only the last line may halt")
            if ins.counter is not None and ins.counter not in seen:
                raise ProgramError(f"line {number} uses undeclared counter {ins.counter!r}")
            for t in ins.targets:
                if not 1 <= t <= m:
                    raise ProgramError(f"line {number} jumps to {t}, out of range 1..{m}")

    def __len__(self) -> int:
        return len(self.lines)

    @property
    def halt_line(self) -> int:
        return len(self.lines)

    def has_zero_tests(self) -> bool:
        return any(ins.kind == "zerotest" for ins in self.lines)

    def index(self, counter: str) -> int:
        try:
            return self.counters.index(counter)
        except ValueError:
            raise ProgramError(f"no counter {counter!r}") from None

    def with_counters(self, counters: Iterable[str]) -> CounterProgram:
        """Same lines over a larger counter set (order-preserving union)."""
        merged = list(self.counters)
        have = set(merged)
        for name in counters:
            if name not in have:
                merged.append(name)
                have.add(name)
        return CounterProgram(tuple(merged), self.lines)


@dataclass(frozen=True)
class Configuration:
    """A program location plus one value per counter, in program order."""

    line: int
    values: tuple[int, ...]

    @staticmethod
    def make(program: CounterProgram, line: int, valuation: Mapping[str, int] | None = None) -> Configuration:
        valuation = valuation or {}
        unknown = set(valuation) - set(program.counters)
        if unknown:
            raise ProgramError(f"valuation mentions unknown counters {sorted(unknown)}")
        vals = []
        for name in program.counters:
            v = valuation.get(name, 0)
            if v < 0:
                raise ProgramError(f"negative value for {name!r}")
            vals.append(v)
        if not 1 <= line <= len(program.lines):
            raise ProgramError(f"line {line} out of range")
        return Configuration(line, tuple(vals))

    def valuation(self, program: CounterProgram) -> dict[str, int]:
        return dict(zip(program.counters, self.values))


Run = tuple[Configuration, ...]


def straight(*instructions: Instruction, counters: Iterable[str] = ()) -> CounterProgram:
    """The program running the given instructions in order, then halting.

    Counter order: explicit ``counters`` first, then first-use order.
    """
    names = list(counters)
    have = set(names)
    for ins in instructions:
        if ins.counter is not None and ins.counter not in have:
            names.append(ins.counter)
            have.add(ins.counter)
    return CounterProgram(tuple(names), tuple(instructions) + (halt(),))


def successors(program: CounterProgram, config: Configuration) -> tuple[Configuration, ...]:
    """All one-step successors, in deterministic order.

    Total: a halted, blocked or out-of-program configuration yields ().
    """
    if len(config.values) != len(program.counters):
        raise ProgramError("configuration width does not match the program")
    if not 1 <= config.line <= len(program.lines):
        return ()
    ins = program.lines[config.line - 1]
    if ins.kind == "halt":
        return ()
    if ins.kind == "skip":
        return (Configuration(config.line + 1, config.values),)
    if ins.kind == "goto":
        out = []
        seen = set()
        for t in ins.targets:
            if t not in seen:
                seen.add(t)
                out.append(Configuration(t, config.values))
        return tuple(out)
    i = program.index(ins.counter)
    v = config.values[i]
    if ins.kind == "zerotest":
        if v != 0:
            return ()
        return (Configuration(config.line + 1, config.values),)
    if ins.kind == "dec":
        if v < ins.amount:
            return ()
        v -= ins.amount
    else:
        v += ins.amount
    vals = config.values[:i] + (v,) + config.values[i + 1 :]
    return (Configuration(config.line + 1, vals),)


def validate_run(program: CounterProgram, run: Run) -> bool:
    """True iff ``run`` is a nonempty sequence of well-formed configurations
    whose consecutive pairs are in the step relation."""
    if not run:
        return False
    for cfg in run:
        if len(cfg.values) != len(program.counters):
            return False
        if not 1 <= cfg.line <= len(program.lines):
            return False
        if any(v < 0 for v in cfg.values):
            return False
    for a, b in zip(run, run[1:]):
        if b not in successors(program, a):
            return False
    return True


def is_zero_terminating(program: CounterProgram, run: Run) -> bool:
    """True iff the run starts at line 1 and ends at halt with every counter 0."""
    if not validate_run(program, run):
        return False
    last = run[-1]
    return run[0].line == 1 and last.line == program.halt_line and not any(last.values)


def execute(program: CounterProgram, config: Configuration, choose, max_steps: int = 10**9) -> Run:
    """Drive one run: at a goto, ``choose(instruction, config)`` picks the
    target index; everything else is deterministic.  Stops at halt or when
    no step is enabled."""
    trace = [config]
    for _ in range(max_steps):
        ins = program.lines[config.line - 1]
        if ins.kind == "goto":
            pick = ins.targets[choose(ins, config)]
            config = Configuration(pick, config.values)
        else:
            nxt = successors(program, config)
            if not nxt:
                break
            config = nxt[0]
        trace.append(config)
    else:
        raise ProgramError(f"run exceeded {max_steps} steps")
    return tuple(trace)


def _remap(ins: Instruction, f) -> Instruction:
    if ins.kind != "goto":
        return ins
    return ins.with_targets(f(t) for t in ins.targets)


def substitute(outer: CounterProgram, k: int, inner: CounterProgram) -> CounterProgram:
    """Replace line k of ``outer`` (which must be a skip) with all of ``inner``.

    The result has len(outer)+len(inner)-1 lines: outer lines before k stay
    put, inner occupies k..k+len(inner)-1 with its halt turned into a skip,
    outer lines after k shift by len(inner)-1.  Jump targets are re-based on
    both sides so control flow is preserved; entering the region runs inner
    start to finish, then falls through to what followed line k.
    """
    m1, m2 = len(outer.lines), len(inner.lines)
    if not 1 <= k <= m1:
        raise ProgramError(f"substitution line {k} out of range")
    if outer.lines[k - 1].kind != "skip":
        raise ProgramError(f"line {k} is {outer.lines[k - 1].kind}, substitution needs skip")

    def f_outer(t: int) -> int:
        return t if t <= k else t + m2 - 1

    def f_inner(t: int) -> int:
        return t + k - 1

    lines: list[Instruction] = []
    for ins in outer.lines[: k - 1]:
        lines.append(_remap(ins, f_outer))
    for j, ins in enumerate(inner.lines, start=1):
        if j == m2:
            lines.append(skip())
        else:
            lines.append(_remap(ins, f_inner))
    for ins in outer.lines[k:]:
        lines.append(_remap(ins, f_outer))

    merged = list(outer.counters)
    have = set(merged)
    for name in inner.counters:
        if name not in have:
            merged.append(name)
            have.add(name)
    return CounterProgram(tuple(merged), tuple(lines))


def seq(*programs: CounterProgram) -> CounterProgram:
    """Run the given programs one after another."""
    if not programs:
        raise ProgramError("seq needs at least one program")
    if len(programs) == 1:
        return programs[0]
    first, rest = programs[0], seq(*programs[1:])
    host = CounterProgram((), (skip(), skip(), halt()))
    return substitute(substitute(host, 2, rest), 1, first)


def alt(left: CounterProgram, right: CounterProgram, tag: Tag | None = None) -> CounterProgram:
    """Nondeterministically run one of the two programs.

    Skeleton: head goto enters ``left`` (first target) and jumps over
    ``right`` to the end skip, or enters ``right`` and falls through.
    ``tag`` goes on the head goto.
    """
    host = CounterProgram(
        (),
        (goto(2, 4, tag=tag), skip(), goto(5), skip(), skip(), halt()),
    )
    return substitute(substitute(host, 4, right), 2, left)


def loop(body: CounterProgram, tag: Tag | None = None) -> CounterProgram:
    """Run the body any number of times (including zero).

    Skeleton: the head goto either enters the body (first target), whose
    end jumps back to the head, or leaves through the end skip (second
    target).  ``tag`` goes on the head goto.
    """
    host = CounterProgram(
        (),
        (goto(2, 4, tag=tag), skip(), goto(1), skip(), halt()),
    )
    return substitute(host, 2, body)


def find_tagged(program: CounterProgram, kind: str) -> Iterator[tuple[int, Instruction]]:
    """Yield (line number, instruction) for every tag of the given kind."""
    for number, ins in enumerate(program.lines, start=1):
        if ins.tag is not None and ins.tag.kind == kind:
            yield number, ins


def the_tagged_line(program: CounterProgram, kind: str, uid: int | None = None) -> int:
    """Line number of the unique instruction tagged (kind, uid)."""
    hits = [
        n
        for n, ins in find_tagged(program, kind)
        if uid is None or ins.tag.uid == uid
    ]
    if len(hits) != 1:
        raise ProgramError(f"expected one {kind!r} tag, found {len(hits)}")
    return hits[0]


# --------------------------------------------------------------------------
# Text format and DOT export.




class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


_COUNTERS_HEADER = re.compile(r"#\s*counters:\s*(.*)$")
_UPDATE = re.compile(r"([A-Za-z_][A-Za-z0-9_'^]*)\s*([+-]=)\s*(\d+)\s*$")
_GOTO = re.compile(r"goto\s+(.*)$")
_ZEROTEST = re.compile(r"zero-test\s+([A-Za-z_][A-Za-z0-9_'^]*)\s*$")


def parse_program(text: str) -> CounterProgram:
    """Parse DSL source into a CounterProgram.

    Raises ParseError with position info on malformed lines, out-of-range
    goto targets, or a missing/misplaced halt.
    """
    declared: list[str] | None = None
    instructions: list[Instruction] = []
    positions: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        header = _COUNTERS_HEADER.match(raw.strip())
        if header is not None and declared is None and not instructions:
            names = [n.strip() for n in header.group(1).split(",") if n.strip()]
            for n in names:
                if not NAME_RE.match(n):
                    raise ParseError(f"bad counter name {n!r}", lineno)
            declared = names
            continue
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        positions.append(lineno)
        m = _UPDATE.match(stripped)
        if m:
            name, op, amount = m.group(1), m.group(2), int(m.group(3))
            instructions.append(inc(name, amount) if op == "+=" else dec(name, amount))
            continue
        m = _GOTO.match(stripped)
        if m:
            parts = [p.strip() for p in m.group(1).split("or")]
            targets = []
            for p in parts:
                if not p.isdigit():
                    raise ParseError(f"bad goto target {p!r}", lineno)
                targets.append(int(p))
            instructions.append(goto(*targets))
            continue
        m = _ZEROTEST.match(stripped)
        if m:
            instructions.append(zero_test(m.group(1)))
            continue
        if stripped == "skip":
            instructions.append(skip())
            continue
        if stripped == "halt":
            instructions.append(halt())
            continue
        raise ParseError(f"cannot parse {stripped!r}", lineno)

    if not instructions:
        raise ParseError("no instructions", 1)

    used: list[str] = []
    have = set()
    for ins in instructions:
        if ins.counter is not None and ins.counter not in have:
            used.append(ins.counter)
            have.add(ins.counter)
    if declared is None:
        counters = used
    else:
        counters = list(declared)
        known = set(counters)
        for name in used:
            if name not in known:
                counters.append(name)
                known.add(name)

    try:
        return CounterProgram(tuple(counters), tuple(instructions))
    except ProgramError as exc:
        # Map structural complaints back to source positions where we can.
        msg = str(exc)
        m = re.search(r"line (\d+)", msg)
        at = positions[int(m.group(1)) - 1] if m and int(m.group(1)) <= len(positions) else positions[-1]
        raise ParseError(msg, at) from exc


def render_program(program: CounterProgram, numbered: bool = False) -> str:
    """Canonical text for a program; parse_program inverts it."""
    out = []
    if program.counters:
        out.append("# counters: " + ", ".join(program.counters))
    for number, ins in enumerate(program.lines, start=1):
        if ins.kind == "inc":
            text = f"{ins.counter} += {ins.amount}"
        elif ins.kind == "dec":
            text = f"{ins.counter} -= {ins.amount}"
        elif ins.kind == "goto":
            text = "goto " + " or ".join(str(t) for t in ins.targets)
        elif ins.kind == "zerotest":
            text = f"zero-test {ins.counter}"
        else:
            text = ins.kind
        if numbered:
            text = f"{text:<24}# {number}"
        out.append(text)
    return "\n".join(out) + "\n"


def program_to_dot(program: CounterProgram, name: str = "program") -> str:
    """Graphviz digraph: one node per line, edges for control flow."""
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=box, fontname=monospace];"]
    for number, ins in enumerate(program.lines, start=1):
        if ins.kind == "inc":
            label = f"{number}: {ins.counter} += {ins.amount}"
        elif ins.kind == "dec":
            label = f"{number}: {ins.counter} -= {ins.amount}"
        elif ins.kind == "goto":
            label = f"{number}: goto"
        elif ins.kind == "zerotest":
            label = f"{number}: zero-test {ins.counter}"
        else:
            label = f"{number}: {ins.kind}"
        shape = ', shape=doublecircle' if ins.kind == "halt" else ""
        lines.append(f'  n{number} [label="{label}"{shape}];')
    for number, ins in enumerate(program.lines, start=1):
        if ins.kind == "goto":
            for t in ins.targets:
                lines.append(f"  n{number} -> n{t};")
        elif ins.kind != "halt":
            lines.append(f"  n{number} -> n{number + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Vector addition systems with states.



State = int | str
Transition = tuple[State, tuple[int, ...], State]


@dataclass(frozen=True)
class Vass:
    dim: int
    counters: tuple[str, ...]
    states: tuple[State, ...]
    initial: State
    final: State
    transitions: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if self.dim != len(self.counters):
            raise ProgramError("dim does not match the counter list")
        have = set(self.states)
        if len(have) != len(self.states):
            raise ProgramError("duplicate states")
        if self.initial not in have or self.final not in have:
            raise ProgramError("initial/final state not in state list")
        for src, delta, dst in self.transitions:
            if src not in have or dst not in have:
                raise ProgramError(f"transition {src}->{dst} uses unknown state")
            if len(delta) != self.dim:
                raise ProgramError(f"transition {src}->{dst} has wrong delta width")
            if src == self.final:
                raise ProgramError("final state must have no outgoing transitions")

    def outgoing(self, state: State) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t[0] == state)


def program_to_vass(program: CounterProgram) -> Vass:
    """Lines become states 1..m; line 1 is initial, the halt line final.

    Each instruction becomes update transitions: goto gives one 0-delta
    transition per target, inc/dec a single signed delta to the next line,
    skip a 0-delta step.  Zero tests are outside the VASS model.
    """
    if program.has_zero_tests():
        raise ProgramError("program contains zero tests, not expressible as VASS")
    d = len(program.counters)
    zero = (0,) * d
    transitions: list[Transition] = []
    for number, ins in enumerate(program.lines, start=1):
        if ins.kind == "halt":
            continue
        if ins.kind == "skip":
            transitions.append((number, zero, number + 1))
        elif ins.kind == "goto":
            seen = set()
            for t in ins.targets:
                if t not in seen:
                    seen.add(t)
                    transitions.append((number, zero, t))
        else:
            i = program.index(ins.counter)
            c = ins.amount if ins.kind == "inc" else -ins.amount
            delta = zero[:i] + (c,) + zero[i + 1 :]
            transitions.append((number, delta, number + 1))
    return Vass(
        dim=d,
        counters=program.counters,
        states=tuple(range(1, len(program.lines) + 1)),
        initial=1,
        final=program.halt_line,
        transitions=tuple(transitions),
    )


def vass_to_program(vass: Vass) -> CounterProgram:
    """Serialize a VASS as a counter program preserving zero-reachability.

    States are laid out initial-first, final-last.  A state whose
    transitions all carry zero deltas becomes a single goto; a state with
    one single-counter transition into the very next state becomes that
    bare update.  Everything else becomes a head goto over per-transition
    blocks (decrements, then increments, then a jump), so a transition
    either executes atomically or strands the run midway without reaching
    any state line.  A non-final state with no outgoing transitions
    becomes a self-loop.
    """
    order: list[State] = [vass.initial]
    order += [q for q in vass.states if q not in (vass.initial, vass.final)]
    if vass.final != vass.initial:
        order.append(vass.final)
    elif len(vass.states) > 1:
        raise ProgramError("initial state equals final but other states exist")

    outgoing = {q: vass.outgoing(q) for q in order}
    position = {q: i for i, q in enumerate(order)}

    def shape(q: State) -> str:
        ts = outgoing[q]
        if q == vass.final:
            return "halt"
        if not ts:
            return "dead"
        if all(not any(delta) for _, delta, _ in ts):
            return "jump"
        if len(ts) == 1:
            _, delta, dst = ts[0]
            touched = [i for i, c in enumerate(delta) if c]
            if len(touched) == 1 and position[dst] == position[q] + 1:
                return "bare"
        return "blocks"

    def lines_needed(q: State) -> int:
        s = shape(q)
        if s in ("halt", "dead", "jump", "bare"):
            return 1
        total = 1  # head goto
        for _, delta, _ in outgoing[q]:
            ops = sum(1 for c in delta if c)
            total += max(ops, 0) + 1  # updates plus trailing jump
        return total

    head: dict[State, int] = {}
    at = 1
    for q in order:
        head[q] = at
        at += lines_needed(q)

    lines: list[Instruction] = []
    for q in order:
        s = shape(q)
        if s == "halt":
            lines.append(halt())
            continue
        if s == "dead":
            lines.append(goto(head[q]))
            continue
        ts = outgoing[q]
        if s == "jump":
            targets = []
            seen = set()
            for _, _, dst in ts:
                h = head[dst]
                if h not in seen:
                    seen.add(h)
                    targets.append(h)
            lines.append(goto(*targets))
            continue
        if s == "bare":
            _, delta, dst = ts[0]
            i = next(i for i, c in enumerate(delta) if c)
            name = vass.counters[i]
            lines.append(dec(name, -delta[i]) if delta[i] < 0 else inc(name, delta[i]))
            continue
        block_heads = []
        blocks: list[list[Instruction]] = []
        at_block = head[q] + 1
        for _, delta, dst in ts:
            ops: list[Instruction] = []
            for i, c in enumerate(delta):
                if c < 0:
                    ops.append(dec(vass.counters[i], -c))
            for i, c in enumerate(delta):
                if c > 0:
                    ops.append(inc(vass.counters[i], c))
            ops.append(goto(head[dst]))
            block_heads.append(at_block)
            blocks.append(ops)
            at_block += len(ops)
        lines.append(goto(*block_heads))
        for ops in blocks:
            lines.extend(ops)
    return CounterProgram(vass.counters, tuple(lines))


def vass_to_json(vass: Vass) -> str:
    return json.dumps(
        {
            "dim": vass.dim,
            "counters": list(vass.counters),
            "states": list(vass.states),
            "initial": vass.initial,
            "final": vass.final,
            "transitions": [
                {"from": src, "delta": list(delta), "to": dst}
                for src, delta, dst in vass.transitions
            ],
        },
        indent=2,
    )


def vass_from_json(text: str) -> Vass:
    data = json.loads(text)
    try:
        return Vass(
            dim=data["dim"],
            counters=tuple(data["counters"]),
            states=tuple(data["states"]),
            initial=data["initial"],
            final=data["final"],
            transitions=tuple(
                (t["from"], tuple(t["delta"]), t["to"]) for t in data["transitions"]
            ),
        )
    except KeyError as exc:
        raise ProgramError(f"missing key in VASS JSON: {exc}") from exc


def vass_to_dot(vass: Vass, name: str = "vass") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle, fontname=monospace];"]
    for q in vass.states:
        shape = "doublecircle" if q == vass.final else "circle"
        lines.append(f'  "{q}" [shape={shape}];')
    lines.append(f'  start [shape=point]; start -> "{vass.initial}";')
    for src, delta, dst in vass.transitions:
        parts = [
            f"{name}{c:+d}"
            for name, c in zip(vass.counters, delta)
            if c
        ]
        label = ", ".join(parts) if parts else "0"
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def valuation_vector(vass: Vass, valuation: Mapping[str, int]) -> tuple[int, ...]:
    unknown = set(valuation) - set(vass.counters)
    if unknown:
        raise ProgramError(f"valuation mentions unknown counters {sorted(unknown)}")
    return tuple(valuation.get(name, 0) for name in vass.counters)
