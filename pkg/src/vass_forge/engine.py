"""Bounded exhaustive zero-reachability search.

States are packed into single integers (line/state index in the low bits,
counter values in fixed-width fields above) so that instruction effects
become integer additions and the visited structure stays compact.  The
search is breadth-first with a fixed expansion order, giving deterministic
verdicts and shortest certificates.

Every counter is capped: either by an explicit per-counter cap, or by a
uniform default derived from the initial valuation.  A successor that
would exceed its cap is dropped and the search is marked truncated; a
truncated search never reports Unreachable, it reports LimitExceeded.
For hat-disciplined programs the natural bounds (N for bounded counters,
the initial values for the testing pair) make caps exact, so exhaustion
is genuine.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .core import Configuration, CounterProgram, ProgramError, Run
from .core import Vass

VassConfig = tuple[object, tuple[int, ...]]


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 5_000_000
    max_depth: int | None = None
    max_seconds: float | None = None
    value_cap: int | Mapping[str, int] | None = None

    def __post_init__(self) -> None:
        if self.max_states <= 0:
            raise ProgramError("max_states must be positive")
        if self.max_depth is not None and self.max_depth <= 0:
            raise ProgramError("max_depth must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ProgramError("max_seconds must be positive")


@dataclass(frozen=True)
class Reachable:
    run: tuple
    explored: int


@dataclass(frozen=True)
class Unreachable:
    explored: int
    exhaustive: bool


@dataclass(frozen=True)
class LimitExceeded:
    explored: int
    reason: str


ReachResult = Reachable | Unreachable | LimitExceeded


@dataclass(frozen=True)
class ReachSet:
    configurations: frozenset
    exhaustive: bool
    explored: int


@dataclass(frozen=True)
class HaltProfile:
    """End-of-program slice of the reachable set: one valuation tuple per
    distinct configuration sitting on the halt line / final state."""

    valuations: tuple[tuple[int, ...], ...]
    exhaustive: bool
    explored: int


class _Space:
    """Packing layout shared by all searches over one system."""

    __slots__ = (
        "counters", "caps", "shifts", "masks", "line_bits", "line_mask",
        "n_lines", "is_vass", "states", "state_index", "ops", "halt_index",
    )

    def __init__(self, system: CounterProgram | Vass, init: Mapping[str, int], limits: SearchLimits):
        self.is_vass = isinstance(system, Vass)
        self.counters = tuple(system.counters)
        unknown = set(init) - set(self.counters)
        if unknown:
            raise ProgramError(f"initial valuation mentions unknown counters {sorted(unknown)}")
        for name, v in init.items():
            if v < 0:
                raise ProgramError(f"negative initial value for {name!r}")

        cap_spec = limits.value_cap
        default = max([init.get(n, 0) for n in self.counters] + [7]) + 1
        caps = []
        for name in self.counters:
            if isinstance(cap_spec, int):
                cap = cap_spec
            elif isinstance(cap_spec, Mapping):
                cap = cap_spec.get(name, default)
            else:
                cap = default
            cap = max(cap, init.get(name, 0))
            caps.append(cap)
        self.caps = tuple(caps)

        if self.is_vass:
            self.states = tuple(system.states)
            self.state_index = {q: i for i, q in enumerate(self.states)}
            self.n_lines = len(self.states)
            self.line_bits = max(self.n_lines - 1, 1).bit_length()
        else:
            self.states = ()
            self.state_index = {}
            self.n_lines = len(system.lines)
            self.line_bits = self.n_lines.bit_length()
        self.line_mask = (1 << self.line_bits) - 1

        shifts = []
        masks = []
        at = self.line_bits
        for cap in self.caps:
            width = max(cap.bit_length(), 1)
            shifts.append(at)
            masks.append((1 << width) - 1)
            at += width
        self.shifts = tuple(shifts)
        self.masks = tuple(masks)

        self.ops = self._compile_vass(system) if self.is_vass else self._compile_program(system)
        self.halt_index = (
            self.state_index[system.final] if self.is_vass else len(system.lines)
        )

    def _compile_program(self, program: CounterProgram) -> list:
        ops: list = [None]  # 1-based lines
        idx = {name: i for i, name in enumerate(self.counters)}
        for number, ins in enumerate(program.lines, start=1):
            if ins.kind == "halt":
                ops.append((0,))
            elif ins.kind == "skip":
                ops.append((1, 1))
            elif ins.kind == "goto":
                seen, deltas = set(), []
                for t in ins.targets:
                    if t not in seen:
                        seen.add(t)
                        deltas.append(t - number)
                ops.append((1, deltas[0]) if len(deltas) == 1 else (4, tuple(deltas)))
            elif ins.kind == "zerotest":
                i = idx[ins.counter]
                ops.append((5, self.shifts[i], self.masks[i]))
            elif ins.kind == "inc":
                i = idx[ins.counter]
                if ins.amount == 0:
                    ops.append((1, 1))
                else:
                    ops.append((2, (ins.amount << self.shifts[i]) + 1,
                                self.shifts[i], self.masks[i], self.caps[i] - ins.amount))
            else:
                i = idx[ins.counter]
                if ins.amount == 0:
                    ops.append((1, 1))
                else:
                    ops.append((3, 1 - (ins.amount << self.shifts[i]),
                                self.shifts[i], self.masks[i], ins.amount))
        return ops

    def _compile_vass(self, vass: Vass) -> list:
        ops: list = []
        for q in self.states:
            moves = []
            for src, delta, dst in vass.transitions:
                if src != q:
                    continue
                total = self.state_index[dst] - self.state_index[q]
                needs = []
                caps = []
                for i, c in enumerate(delta):
                    if c < 0:
                        needs.append((self.shifts[i], self.masks[i], -c))
                        total -= (-c) << self.shifts[i]
                    elif c > 0:
                        caps.append((self.shifts[i], self.masks[i], self.caps[i] - c))
                        total += c << self.shifts[i]
                moves.append((total, tuple(needs), tuple(caps)))
            ops.append((0,) if not moves else (6, tuple(moves)))
        return ops

    def pack(self, line: int, valuation: Mapping[str, int]) -> int:
        s = line
        for name, shift in zip(self.counters, self.shifts):
            s += valuation.get(name, 0) << shift
        return s

    def values_of(self, s: int) -> tuple[int, ...]:
        return tuple((s >> sh) & mk for sh, mk in zip(self.shifts, self.masks))

    def decode(self, s: int):
        line = s & self.line_mask
        if self.is_vass:
            return (self.states[line], self.values_of(s))
        return Configuration(line, self.values_of(s))


def _root_and_target(space: _Space, system, init: Mapping[str, int]) -> tuple[int, int]:
    start = 0 if space.is_vass else 1
    if space.is_vass:
        start = space.state_index[system.initial]
    root = space.pack(start, init)
    return root, space.halt_index if space.is_vass else space.pack(space.halt_index, {})


def _expand(space: _Space, s: int, out: list) -> bool:
    """Append packed successors of s to out; True if a cap was hit."""
    op = space.ops[s & space.line_mask]
    code = op[0]
    if code == 0:
        return False
    if code == 1:
        out.append(s + op[1])
        return False
    if code == 2:
        if (s >> op[2]) & op[3] <= op[4]:
            out.append(s + op[1])
            return False
        return True
    if code == 3:
        if (s >> op[2]) & op[3] >= op[4]:
            out.append(s + op[1])
        return False
    if code == 4:
        for d in op[1]:
            out.append(s + d)
        return False
    if code == 5:
        if (s >> op[1]) & op[2] == 0:
            out.append(s + 1)
        return False
    capped = False
    for total, needs, caps in op[1]:
        ok = True
        for sh, mk, need in needs:
            if (s >> sh) & mk < need:
                ok = False
                break
        if not ok:
            continue
        for sh, mk, limit in caps:
            if (s >> sh) & mk > limit:
                ok = False
                capped = True
                break
        if ok:
            out.append(s + total)
    return capped


def zero_reach(
    system: CounterProgram | Vass,
    init: Mapping[str, int],
    limits: SearchLimits | None = None,
) -> ReachResult:
    """Decide whether (line 1 / initial state, init) reaches halt with all
    counters zero.  BFS; Reachable carries a shortest certificate."""
    limits = limits or SearchLimits()
    space = _Space(system, init, limits)
    root, target = _root_and_target(space, system, init)

    def finish(s: int, parents: dict) -> Reachable:
        chain = [s]
        while parents[s] != s:
            s = parents[s]
            chain.append(s)
        chain.reverse()
        return Reachable(tuple(space.decode(x) for x in chain), len(parents))

    parents = {root: root}
    if root == target:
        return finish(root, parents)

    dq = deque((root,))
    capped = False
    max_states = limits.max_states
    deadline = time.monotonic() + limits.max_seconds if limits.max_seconds else None
    succ: list[int] = []
    ticker = 0
    depth = 0
    sentinel = -1  # level marker; packed states are nonnegative
    if limits.max_depth is not None:
        dq.append(sentinel)
    while dq:
        s = dq.popleft()
        if s == sentinel:
            if not dq:
                break
            depth += 1
            if depth > limits.max_depth:
                return LimitExceeded(len(parents), "max_depth")
            dq.append(sentinel)
            continue
        succ.clear()
        capped |= _expand(space, s, succ)
        for ns in succ:
            if ns not in parents:
                parents[ns] = s
                if ns == target:
                    return finish(ns, parents)
                dq.append(ns)
        if len(parents) > max_states:
            return LimitExceeded(len(parents), "max_states")
        ticker += 1
        if deadline is not None and not ticker % 4096 and time.monotonic() > deadline:
            return LimitExceeded(len(parents), "max_seconds")
    if capped:
        return LimitExceeded(len(parents), "value_cap")
    return Unreachable(len(parents), True)


def _sweep(
    system: CounterProgram | Vass,
    init: Mapping[str, int],
    limits: SearchLimits,
    collect_halt_only: bool,
):
    """Shared full-exploration loop (no target, set-based visited)."""
    space = _Space(system, init, limits)
    root, _ = _root_and_target(space, system, init)
    visited = {root}
    dq = deque((root,))
    capped = False
    truncated = None
    max_states = limits.max_states
    deadline = time.monotonic() + limits.max_seconds if limits.max_seconds else None
    succ: list[int] = []
    ticker = 0
    while dq:
        s = dq.popleft()
        succ.clear()
        capped |= _expand(space, s, succ)
        grew = False
        for ns in succ:
            if ns not in visited:
                visited.add(ns)
                dq.append(ns)
                grew = True
        if grew and len(visited) > max_states:
            truncated = "max_states"
            break
        ticker += 1
        if deadline is not None and not ticker % 4096 and time.monotonic() > deadline:
            truncated = "max_seconds"
            break
    if truncated is None and capped:
        truncated = "value_cap"
    exhaustive = truncated is None
    if collect_halt_only:
        halt = space.halt_index
        mask = space.line_mask
        vals = tuple(
            space.values_of(s) for s in sorted(visited) if s & mask == halt
        )
        return HaltProfile(vals, exhaustive, len(visited)), space
    configs = frozenset(space.decode(s) for s in visited)
    return ReachSet(configs, exhaustive, len(visited)), space


def reach_set(
    system: CounterProgram | Vass,
    init: Mapping[str, int],
    limits: SearchLimits | None = None,
) -> ReachSet:
    """All configurations reachable from (start, init) within limits."""
    result, _ = _sweep(system, init, limits or SearchLimits(), False)
    return result


def halt_profile(
    system: CounterProgram | Vass,
    init: Mapping[str, int],
    limits: SearchLimits | None = None,
) -> tuple[HaltProfile, tuple[str, ...]]:
    """Exhaustively enumerate reachable halt-line valuations.

    Returns (profile, counter order).  Memory-lean variant of reach_set
    for iff-characterization sweeps."""
    limits = limits or SearchLimits()
    profile, space = _sweep(system, init, limits, True)
    return profile, space.counters


def zero_reach_dfs(
    system: CounterProgram | Vass,
    init: Mapping[str, int],
    limits: SearchLimits | None = None,
) -> tuple[str, int]:
    """Independent depth-first re-check of zero_reach verdicts.

    Returns ("reachable" | "unreachable" | "limit", states explored).
    Shares only the packing layer with the BFS; order, frontier and
    bookkeeping are separate on purpose.
    """
    limits = limits or SearchLimits()
    space = _Space(system, init, limits)
    root, target = _root_and_target(space, system, init)
    if root == target:
        return "reachable", 1
    visited = {root}
    stack = [root]
    capped = False
    max_states = limits.max_states
    deadline = time.monotonic() + limits.max_seconds if limits.max_seconds else None
    succ: list[int] = []
    ticker = 0
    while stack:
        s = stack.pop()
        succ.clear()
        capped |= _expand(space, s, succ)
        for ns in succ:
            if ns == target:
                return "reachable", len(visited)
            if ns not in visited:
                visited.add(ns)
                stack.append(ns)
        if len(visited) > max_states:
            return "limit", len(visited)
        ticker += 1
        if deadline is not None and not ticker % 4096 and time.monotonic() > deadline:
            return "limit", len(visited)
    if capped:
        return "limit", len(visited)
    return "unreachable", len(visited)


@dataclass(frozen=True)
class RunStats:
    steps: int
    zero_test_entries: int
    max_values: dict
    hat_violations: int
    testing_spend: tuple[int, int] | None


def run_stats(
    program: CounterProgram,
    run: Run,
    pay_lines: frozenset[int] = frozenset(),
    pairs: Mapping[str, str] | None = None,
    n_value: int | None = None,
    testing: tuple[str, str] | None = None,
) -> RunStats:
    """Accounting over a concrete run.

    zero_test_entries counts visits to the designated pay lines (each
    zero-test gadget has exactly one, crossed once per complete entry).
    Hat violations count configurations where some pair sums away from N.
    Mirrors are two unit instructions, so between the halves the sum is
    off by the mirrored amount; a configuration standing on the completing
    half of its own pair is not a violation.
    """
    if not run:
        raise ProgramError("empty run")
    idx = {name: i for i, name in enumerate(program.counters)}
    maxima = [0] * len(program.counters)
    entries = 0
    violations = 0

    def mid_pair(cfg, v: str, vh: str, s: int) -> bool:
        ins = program.lines[cfg.line - 1]
        if ins.kind == "inc" and ins.counter in (v, vh):
            return s + ins.amount == n_value
        if ins.kind == "dec" and ins.counter in (v, vh):
            return s - ins.amount == n_value
        return False

    for cfg in run:
        for i, v in enumerate(cfg.values):
            if v > maxima[i]:
                maxima[i] = v
        if cfg.line in pay_lines:
            entries += 1
        if pairs and n_value is not None:
            for v, vh in pairs.items():
                s = cfg.values[idx[v]] + cfg.values[idx[vh]]
                if s != n_value and not mid_pair(cfg, v, vh, s):
                    violations += 1
                    break
    spend = None
    if testing is not None:
        u1, u2 = testing
        spend = (
            run[0].values[idx[u1]] - run[-1].values[idx[u1]],
            run[0].values[idx[u2]] - run[-1].values[idx[u2]],
        )
    return RunStats(
        steps=len(run) - 1,
        zero_test_entries=entries,
        max_values={name: maxima[i] for name, i in idx.items()},
        hat_violations=violations,
        testing_spend=spend,
    )
