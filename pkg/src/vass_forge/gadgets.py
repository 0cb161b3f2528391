"""Zero-test machinery and the arithmetic component library.

A *bounded* counter v travels with a hat twin "v^" keeping v + v^ = N, so
v can never exceed N.  Mirror halves are emitted decrement-first, so no
counter overshoots N even between the halves of a mirror pair.

Two *testing* counters u1, u2 make zero tests expressible without a
zerotest instruction: a configuration is valid iff f(u2) = f(u1)*N, and a
run is valid iff its first and last configurations are.  One entry of the
zero-test gadget spends exactly 2 from u1 and at most 2N from u2, with
equality iff the tested counter is 0 on entry and both transfer loops run
to exhaustion.  Underspending strands u2 above u1*N forever (neither ever
increases), so reaching a valid end certifies every test was genuine.

The arithmetic components never test their argument counters directly:
they copy arguments into three shared slots "x'", "y'", "z'" (scratch
"t"), which also makes repeated arguments (e.g. checking x + x = z) work
and keeps the counter set independent of formula size.

A component's declared budget is a polynomial in N bounding zero-test
entries over its valid runs; sequencing adds budgets, branching takes the
coefficient-wise maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import (
    Configuration,
    CounterProgram,
    Instruction,
    ProgramError,
    Tag,
    alt as _alt_programs,
    dec,
    execute,
    find_tagged,
    goto,
    halt,
    inc,
    seq as _seq_programs,
    zero_test,
)
from .engine import SearchLimits, halt_profile

U1 = "u1"
U2 = "u2"
SLOT_X = "x'"
SLOT_Y = "y'"
SLOT_Z = "z'"
SCRATCH = "t"
ZERO_COUNTER = "c0"


def hat(v: str) -> str:
    """Hat-twin name of a base counter."""
    if v.endswith("^"):
        raise ProgramError(f"{v!r} is already a hat counter")
    return v + "^"


def mirror_of(v: str) -> str:
    """The other half of a counter's pair (hat of a base, base of a hat)."""
    return v[:-1] if v.endswith("^") else v + "^"


# --------------------------------------------------------------------------
# Budget polynomials.


@dataclass(frozen=True)
class Poly:
    """Polynomial in N with nonnegative integer coefficients, lowest first."""

    coeffs: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        cs = tuple(int(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            cs = (0,)
        if any(c < 0 for c in cs):
            raise ProgramError("negative coefficient")
        object.__setattr__(self, "coeffs", cs)

    @staticmethod
    def const(k: int) -> Poly:
        return Poly((k,))

    def __call__(self, n: int) -> int:
        return sum(c * n**i for i, c in enumerate(self.coeffs))

    def __add__(self, other: Poly | int) -> Poly:
        if isinstance(other, int):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(tuple(x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)))

    def __mul__(self, other: Poly | int) -> Poly:
        if isinstance(other, int):
            return Poly(tuple(c * other for c in self.coeffs))
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    def max_with(self, other: Poly) -> Poly:
        """Coefficient-wise maximum: a sound pointwise upper bound on N >= 0."""
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(
            tuple(
                max(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0)
                for i in range(n)
            )
        )

    def __pow__(self, k: int) -> Poly:
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def render(self, var: str = "N") -> str:
        parts = []
        for i in reversed(range(len(self.coeffs))):
            c = self.coeffs[i]
            if c == 0 and len(self.coeffs) > 1:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{var}" if c == 1 else f"{c}*{var}")
            else:
                parts.append(f"{var}^{i}" if c == 1 else f"{c}*{var}^{i}")
        return " + ".join(parts) if parts else "0"


POLY_N = Poly((0, 1))


# --------------------------------------------------------------------------
# Components.


@dataclass(frozen=True)
class Component:
    """A halt-terminated program fragment with zero-test accounting.

    ``pairs`` lists (base, hat) twins the fragment relies on; ``budget``
    bounds zero-test gadget entries over valid runs; ``dirty`` lists the
    base counters a valid run may leave changed (everything else touched
    is restored — hats follow their base).
    """

    program: CounterProgram
    pairs: tuple[tuple[str, str], ...]
    budget: Poly
    dirty: frozenset[str] = frozenset()
    testing: tuple[str, str] = (U1, U2)

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for v, vh in self.pairs:
            if seen.get(v, vh) != vh or v == vh:
                raise ProgramError(f"inconsistent hat pair for {v!r}")
            seen[v] = vh

    @property
    def bounded_counters(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.pairs)

    @property
    def touched_counters(self) -> frozenset[str]:
        return frozenset(self.program.counters)

    @property
    def zero_test_budget(self) -> Poly:
        return self.budget

    def pair_map(self) -> dict[str, str]:
        return dict(self.pairs)

    def pay_lines(self) -> frozenset[int]:
        return frozenset(n for n, _ in find_tagged(self.program, "zt_pay"))


def _merge_pairs(components: Iterable[Component]) -> tuple[tuple[str, str], ...]:
    merged: dict[str, str] = {}
    for c in components:
        for v, vh in c.pairs:
            if merged.get(v, vh) != vh:
                raise ProgramError(f"conflicting hat pair for {v!r}")
            merged[v] = vh
    return tuple(sorted(merged.items()))


# --------------------------------------------------------------------------
# A tiny two-pass assembler.  Gadget control flow (escape hatches out of
# nested loops, shared join points) does not fit the seq/alt/loop hosts,
# so gadget bodies are laid out with labels and resolved in one pass.


class _Asm:
    def __init__(self) -> None:
        self._lines: list = []
        self._labels: dict[str, int] = {}
        self._uid = 0

    def fresh(self) -> int:
        self._uid += 1
        return self._uid

    def label(self, name: str) -> None:
        if name in self._labels:
            raise ProgramError(f"duplicate label {name!r}")
        self._labels[name] = len(self._lines) + 1

    def emit(self, ins: Instruction) -> None:
        self._lines.append(ins)

    def goto(self, *targets: str | int, tag: Tag | None = None) -> None:
        self._lines.append(("goto", targets, tag))

    def splice(self, program: CounterProgram) -> None:
        """Inline a halt-terminated program minus its halt; targets that
        pointed at the halt land on whatever is emitted next."""
        offset = len(self._lines)
        for ins in program.lines[:-1]:
            if ins.targets:
                self._lines.append(ins.with_targets(t + offset for t in ins.targets))
            else:
                self._lines.append(ins)

    def build(self, counters: Iterable[str]) -> CounterProgram:
        self._lines.append(halt())
        resolved = []
        for item in self._lines:
            if isinstance(item, tuple):
                _, targets, tag = item
                nums = tuple(
                    t if isinstance(t, int) else self._labels[t] for t in targets
                )
                resolved.append(goto(*nums, tag=tag))
            else:
                resolved.append(item)
        order = tuple(sorted(set(counters)))
        return CounterProgram(order, tuple(resolved))


def _emit_mirrored_inc(a: _Asm, v: str, vh: str) -> None:
    a.emit(dec(vh))
    a.emit(inc(v))


def _emit_mirrored_dec(a: _Asm, v: str, vh: str) -> None:
    a.emit(dec(v))
    a.emit(inc(vh))


def _emit_zero_test(a: _Asm, v: str, vh: str) -> None:
    """The two transfer loops plus the u1 payment.

    Pump moves vh into v (u2 pays 1 per unit), drop moves it back; both
    loop counts are chosen by the run.  Total u2 spend is at most 2N and
    exactly 2N only from v = 0 with both loops maximal, which also
    restores v.  The pay line then charges u1 by 2.
    """
    uid = a.fresh()
    pump, pbody = f"zt{uid}.pump", f"zt{uid}.pbody"
    drop, dbody = f"zt{uid}.drop", f"zt{uid}.dbody"
    pay = f"zt{uid}.pay"
    a.label(pump)
    a.goto(pbody, drop, tag=Tag("zt_pump", (v,), uid))
    a.label(pbody)
    a.emit(dec(vh))
    a.emit(inc(v))
    a.emit(dec(U2))
    a.goto(pump)
    a.label(drop)
    a.goto(dbody, pay, tag=Tag("zt_drop", (v,), uid))
    a.label(dbody)
    a.emit(dec(v))
    a.emit(inc(vh))
    a.emit(dec(U2))
    a.goto(drop)
    a.label(pay)
    a.emit(dec(U1, 2, tag=Tag("zt_pay", (v,), uid)))


def _canonical_pair(v: str) -> tuple[str, str]:
    return (mirror_of(v), v) if v.endswith("^") else (v, mirror_of(v))


def _check_args(args: Iterable[str]) -> None:
    reserved = {SLOT_X, SLOT_Y, SLOT_Z, SCRATCH, U1, U2}
    for name in args:
        if name in reserved or name.endswith("^"):
            raise ProgramError(f"argument {name!r} collides with gadget machinery")


# --------------------------------------------------------------------------
# Gadget builders.


def zero_test_gadget(v: str, vh: str | None = None) -> Component:
    """Passable-iff-zero test on bounded counter v; budget 1."""
    vh = vh if vh is not None else mirror_of(v)
    if v == vh:
        raise ProgramError("counter cannot mirror itself")
    a = _Asm()
    _emit_zero_test(a, v, vh)
    program = a.build((v, vh, U1, U2))
    return Component(
        program=program,
        pairs=(_canonical_pair(v) if vh == mirror_of(v) else (v, vh),),
        budget=Poly.const(1),
        dirty=frozenset({U1, U2}),
    )


def _emit_copy(a: _Asm, src: str, dst: str) -> None:
    """Drain dst, move src into dst and scratch, test, move back, test."""
    uid = a.fresh()
    drain, dbody = f"cp{uid}.drain", f"cp{uid}.dbody"
    move, mbody = f"cp{uid}.move", f"cp{uid}.mbody"
    back, bbody = f"cp{uid}.back", f"cp{uid}.bbody"
    a.label(drain)
    a.goto(dbody, f"cp{uid}.z1", tag=Tag("cp_drain", (dst,), uid))
    a.label(dbody)
    _emit_mirrored_dec(a, dst, mirror_of(dst))
    a.goto(drain)
    a.label(f"cp{uid}.z1")
    _emit_zero_test(a, dst, mirror_of(dst))
    a.label(move)
    a.goto(mbody, f"cp{uid}.z2", tag=Tag("cp_move", (src, dst), uid))
    a.label(mbody)
    _emit_mirrored_dec(a, src, mirror_of(src))
    _emit_mirrored_inc(a, dst, mirror_of(dst))
    _emit_mirrored_inc(a, SCRATCH, mirror_of(SCRATCH))
    a.goto(move)
    a.label(f"cp{uid}.z2")
    _emit_zero_test(a, src, mirror_of(src))
    a.label(back)
    a.goto(bbody, f"cp{uid}.z3", tag=Tag("cp_back", (src,), uid))
    a.label(bbody)
    _emit_mirrored_dec(a, SCRATCH, mirror_of(SCRATCH))
    _emit_mirrored_inc(a, src, mirror_of(src))
    a.goto(back)
    a.label(f"cp{uid}.z3")
    _emit_zero_test(a, SCRATCH, mirror_of(SCRATCH))


def copy_gadget(src: str, dst: str) -> Component:
    """Set dst to src's value, restoring src and scratch; exactly 3 tests."""
    if src == dst:
        raise ProgramError("copy source and destination must differ")
    if src in (SCRATCH, U1, U2) or dst in (SCRATCH, U1, U2):
        raise ProgramError("copy cannot target the scratch or testing counters")
    a = _Asm()
    _emit_copy(a, src, dst)
    counters = {src, dst, SCRATCH, U1, U2}
    counters |= {mirror_of(src), mirror_of(dst), mirror_of(SCRATCH)}
    program = a.build(counters)
    pairs = {_canonical_pair(src), _canonical_pair(dst), _canonical_pair(SCRATCH)}
    return Component(
        program=program,
        pairs=tuple(sorted(pairs)),
        budget=Poly.const(3),
        dirty=frozenset({dst, U1, U2}),
    )


def _arith_component(program: CounterProgram, args: tuple[str, ...], budget: Poly) -> Component:
    pairs = {_canonical_pair(v) for v in args}
    pairs |= {
        _canonical_pair(SLOT_X),
        _canonical_pair(SLOT_Y),
        _canonical_pair(SLOT_Z),
        _canonical_pair(SCRATCH),
    }
    return Component(
        program=program,
        pairs=tuple(sorted(pairs)),
        budget=budget,
        dirty=frozenset({SLOT_X, SLOT_Y, SLOT_Z, SCRATCH, U1, U2}),
    )


def _arith_counters(args: Iterable[str]) -> set[str]:
    names = set(args) | {SLOT_X, SLOT_Y, SLOT_Z, SCRATCH, U1, U2}
    return names | {mirror_of(v) for v in names if v not in (U1, U2)}


def _emit_arith_prologue(a: _Asm, x: str, y: str, z: str) -> None:
    _emit_copy(a, x, SLOT_X)
    _emit_copy(a, y, SLOT_Y)
    _emit_copy(a, z, SLOT_Z)


def addition_gadget(x: str, y: str, z: str) -> Component:
    """Valid run exists iff x + y = z; exactly 12 tests on every valid run."""
    _check_args((x, y, z))
    a = _Asm()
    _emit_arith_prologue(a, x, y, z)
    uid = a.fresh()
    main, mbody = f"add{uid}.main", f"add{uid}.mbody"
    px, py = f"add{uid}.px", f"add{uid}.py"
    a.label(main)
    a.goto(mbody, f"add{uid}.tests", tag=Tag("add_main", (SLOT_Z,), uid))
    a.label(mbody)
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    a.goto(px, py, tag=Tag("add_pick", (SLOT_X, SLOT_Y), uid))
    a.label(px)
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    a.goto(main)
    a.label(py)
    _emit_mirrored_dec(a, SLOT_Y, mirror_of(SLOT_Y))
    a.goto(main)
    a.label(f"add{uid}.tests")
    _emit_zero_test(a, SLOT_X, mirror_of(SLOT_X))
    _emit_zero_test(a, SLOT_Y, mirror_of(SLOT_Y))
    _emit_zero_test(a, SLOT_Z, mirror_of(SLOT_Z))
    program = a.build(_arith_counters((x, y, z)))
    return _arith_component(program, (x, y, z), Poly.const(12))


def not_addition_gadget(x: str, y: str, z: str) -> Component:
    """Valid run exists iff x + y != z; at most 11 tests.

    After the joint drain loop the run commits: either z' is 0 while one
    of x', y' still holds a unit (z < x + y), or x' and y' are 0 while z'
    does (z > x + y).  Exact equality satisfies neither.
    """
    _check_args((x, y, z))
    a = _Asm()
    _emit_arith_prologue(a, x, y, z)
    uid = a.fresh()
    main, mbody = f"nadd{uid}.main", f"nadd{uid}.mbody"
    px, py = f"nadd{uid}.px", f"nadd{uid}.py"
    a.label(main)
    a.goto(mbody, f"nadd{uid}.branch", tag=Tag("add_main", (SLOT_Z,), uid))
    a.label(mbody)
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    a.goto(px, py, tag=Tag("add_pick", (SLOT_X, SLOT_Y), uid))
    a.label(px)
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    a.goto(main)
    a.label(py)
    _emit_mirrored_dec(a, SLOT_Y, mirror_of(SLOT_Y))
    a.goto(main)
    a.label(f"nadd{uid}.branch")
    a.goto(f"nadd{uid}.low", f"nadd{uid}.high", tag=Tag("na_branch", (), uid))
    # z' = 0 and at least one of x', y' is positive
    a.label(f"nadd{uid}.low")
    _emit_zero_test(a, SLOT_Z, mirror_of(SLOT_Z))
    a.goto(f"nadd{uid}.lx", f"nadd{uid}.ly", tag=Tag("na_pick", (SLOT_X, SLOT_Y), uid))
    a.label(f"nadd{uid}.lx")
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    a.goto(f"nadd{uid}.end")
    a.label(f"nadd{uid}.ly")
    _emit_mirrored_dec(a, SLOT_Y, mirror_of(SLOT_Y))
    a.goto(f"nadd{uid}.end")
    # x' = y' = 0 and z' is positive
    a.label(f"nadd{uid}.high")
    _emit_zero_test(a, SLOT_X, mirror_of(SLOT_X))
    _emit_zero_test(a, SLOT_Y, mirror_of(SLOT_Y))
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    a.label(f"nadd{uid}.end")
    program = a.build(_arith_counters((x, y, z)))
    return _arith_component(program, (x, y, z), Poly.const(11))


def _emit_mult_round(a: _Asm, uid: int, prefix: str) -> None:
    """One body of the outer product loop: move x' to t subtracting z'
    per unit, verify the move, move back, verify, consume one y'.

    Both verifications are real zero tests, so a complete round always
    returns the scratch counter to 0.
    """
    inner, ibody = f"{prefix}.inner", f"{prefix}.ibody"
    back, bbody = f"{prefix}.back", f"{prefix}.bbody"
    a.label(inner)
    a.goto(ibody, f"{prefix}.zx", tag=Tag("mul_in", (SLOT_X,), uid))
    a.label(ibody)
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    _emit_mirrored_inc(a, SCRATCH, mirror_of(SCRATCH))
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    a.goto(inner)
    a.label(f"{prefix}.zx")
    _emit_zero_test(a, SLOT_X, mirror_of(SLOT_X))
    a.label(back)
    a.goto(bbody, f"{prefix}.zt", tag=Tag("mul_back", (SCRATCH,), uid))
    a.label(bbody)
    _emit_mirrored_dec(a, SCRATCH, mirror_of(SCRATCH))
    _emit_mirrored_inc(a, SLOT_X, mirror_of(SLOT_X))
    a.goto(back)
    a.label(f"{prefix}.zt")
    _emit_zero_test(a, SCRATCH, mirror_of(SCRATCH))
    _emit_mirrored_dec(a, SLOT_Y, mirror_of(SLOT_Y))


def multiplication_gadget(x: str, y: str, z: str) -> Component:
    """Valid run exists iff x * y = z; at most 2N + 11 tests.

    Each outer round subtracts x' from z' (via the scratch shuttle, two
    tests per round) and consumes one y'; the final tests require y' and
    z' exhausted together, i.e. z = x * y.  A valid run performs
    9 + 2*y + 2 tests, at most 2N + 11.
    """
    _check_args((x, y, z))
    a = _Asm()
    _emit_arith_prologue(a, x, y, z)
    uid = a.fresh()
    outer = f"mul{uid}.outer"
    a.label(outer)
    a.goto(f"mul{uid}.round", f"mul{uid}.after", tag=Tag("mul_outer", (SLOT_Y,), uid))
    a.label(f"mul{uid}.round")
    _emit_mult_round(a, uid, f"mul{uid}")
    a.goto(outer)
    a.label(f"mul{uid}.after")
    _emit_zero_test(a, SLOT_Y, mirror_of(SLOT_Y))
    _emit_zero_test(a, SLOT_Z, mirror_of(SLOT_Z))
    program = a.build(_arith_counters((x, y, z)))
    return _arith_component(program, (x, y, z), Poly((11, 2)))


def not_multiplication_gadget(x: str, y: str, z: str) -> Component:
    """Valid run exists iff x * y != z; at most 2N + 10 tests.

    Two commitments: exhaust y' over full rounds and show z' still holds
    a unit (z > x*y), or run some full rounds and then cancel the
    leftover z' against x' one unit for one unit, never through the
    scratch, so t is 0 at every exit.  The cancel path then consumes one
    extra x' unit, checks z' = 0, and consumes one y' unit: such a run
    shows z = rounds*x + part with part < x and rounds < y, hence
    z < x*y; without the extra x' unit it would also accept z = x*y.
    """
    _check_args((x, y, z))
    a = _Asm()
    _emit_arith_prologue(a, x, y, z)
    uid = a.fresh()
    outer = f"nmul{uid}.outer"
    a.label(outer)
    a.goto(
        f"nmul{uid}.round",
        f"nmul{uid}.rem",
        f"nmul{uid}.high",
        tag=Tag("nm_outer", (SLOT_Y,), uid),
    )
    a.label(f"nmul{uid}.round")
    _emit_mult_round(a, uid, f"nmul{uid}")
    a.goto(outer)
    # y' = 0 and z' > 0
    a.label(f"nmul{uid}.high")
    _emit_zero_test(a, SLOT_Y, mirror_of(SLOT_Y))
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    a.goto(f"nmul{uid}.end")
    # cancel the remainder, then x' > 0, z' = 0, y' > 0 certified
    a.label(f"nmul{uid}.rem")
    a.goto(f"nmul{uid}.rbody", f"nmul{uid}.low", tag=Tag("nm_rem", (SLOT_Z,), uid))
    a.label(f"nmul{uid}.rbody")
    _emit_mirrored_dec(a, SLOT_Z, mirror_of(SLOT_Z))
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    a.goto(f"nmul{uid}.rem")
    a.label(f"nmul{uid}.low")
    _emit_mirrored_dec(a, SLOT_X, mirror_of(SLOT_X))
    _emit_zero_test(a, SLOT_Z, mirror_of(SLOT_Z))
    _emit_mirrored_dec(a, SLOT_Y, mirror_of(SLOT_Y))
    a.label(f"nmul{uid}.end")
    program = a.build(_arith_counters((x, y, z)))
    return _arith_component(program, (x, y, z), Poly((10, 2)))


def exists_gadget(v: str) -> Component:
    """Leave v at any chosen value in {0..N}; no zero tests.

    A drain loop precedes the pump so the gadget re-targets v from any
    entry value, which repeated entries (a quantifier under an enclosing
    loop) require.
    """
    vh = mirror_of(v)
    a = _Asm()
    uid = a.fresh()
    a.label("drain")
    a.goto("dbody", "pump", tag=Tag("ex_drain", (v,), uid))
    a.label("dbody")
    _emit_mirrored_dec(a, v, vh)
    a.goto("drain")
    a.label("pump")
    a.goto("pbody", "out", tag=Tag("ex_pump", (v,), uid))
    a.label("pbody")
    _emit_mirrored_inc(a, v, vh)
    a.goto("pump")
    a.label("out")
    program = a.build((v, vh, U1, U2))
    return Component(
        program=program,
        pairs=(_canonical_pair(v),),
        budget=Poly.const(0),
        dirty=frozenset({v}),
    )


def forall_gadget(v: str, body: Component) -> Component:
    """Run the body once for every v in {0..N}; budget (N+1)*B + 2.

    A validated reset (drain + zero test) pins v to 0 from any entry
    value, the do-loop runs the body then either bumps v and repeats or
    exits, and the final test on the hat certifies the exit happened at
    v = N — so bodies ran at v = 0, 1, ..., N, each exactly once on any
    valid run.
    """
    if v in body.dirty:
        raise ProgramError(f"loop body may not change {v!r} net")
    vh = mirror_of(v)
    a = _Asm()
    uid = a.fresh()
    a.label("reset")
    a.goto("rbody", "rz", tag=Tag("fa_reset", (v,), uid))
    a.label("rbody")
    _emit_mirrored_dec(a, v, vh)
    a.goto("reset")
    a.label("rz")
    _emit_zero_test(a, v, vh)
    a.label("body")
    a.splice(body.program)
    a.goto("step", "exit", tag=Tag("fa_continue", (v,), uid))
    a.label("step")
    _emit_mirrored_inc(a, v, vh)
    a.goto("body")
    a.label("exit")
    _emit_zero_test(a, vh, v)
    counters = set(body.program.counters) | {v, vh, U1, U2}
    program = a.build(counters)
    pairs = dict(body.pairs)
    if pairs.get(v, vh) != vh:
        raise ProgramError(f"conflicting hat pair for {v!r}")
    pairs[v] = vh
    return Component(
        program=program,
        pairs=tuple(sorted(pairs.items())),
        budget=body.budget * Poly((1, 1)) + 2,
        dirty=body.dirty | {v},
        testing=body.testing,
    )


def compose(*components: Component, mode: str = "seq", tag: Tag | None = None) -> Component:
    """Sequence (budgets add) or branch (budgets coefficient-wise max)."""
    if not components:
        raise ProgramError("compose needs at least one component")
    testings = {c.testing for c in components}
    if len(testings) != 1:
        raise ProgramError("components use different testing counters")
    pairs = _merge_pairs(components)
    dirty = frozenset().union(*(c.dirty for c in components))
    if mode == "seq":
        program = _seq_programs(*(c.program for c in components))
        budget = Poly.const(0)
        for c in components:
            budget = budget + c.budget
    elif mode == "alt":
        if len(components) != 2:
            raise ProgramError("alt composes exactly two components")
        program = _alt_programs(components[0].program, components[1].program, tag=tag)
        budget = components[0].budget.max_with(components[1].budget)
    else:
        raise ProgramError(f"unknown compose mode {mode!r}")
    counters = tuple(sorted({n for c in components for n in c.program.counters}))
    return Component(
        program=program.with_counters(counters),
        pairs=pairs,
        budget=budget,
        dirty=dirty,
        testing=components[0].testing,
    )


# --------------------------------------------------------------------------
# Public mirror expansion (mirror emitted after the instruction, same
# amount), for programs written without hats.


def hat_expand(program: CounterProgram, bounded: Iterable[str]) -> CounterProgram:
    """Mirror every inc/dec on a bounded counter inversely on its hat."""
    bounded = set(bounded)
    hats = {v: hat(v) for v in bounded}
    for v, vh in hats.items():
        if vh in program.counters:
            raise ProgramError(f"hat counter {vh!r} already present")
    new_of_old = {}
    count = 0
    for number, ins in enumerate(program.lines, start=1):
        new_of_old[number] = count + 1
        count += 2 if ins.kind in ("inc", "dec") and ins.counter in bounded else 1
    new_lines = []
    for ins in program.lines:
        if ins.kind == "goto":
            new_lines.append(ins.with_targets(new_of_old[t] for t in ins.targets))
        elif ins.kind in ("inc", "dec") and ins.counter in bounded:
            new_lines.append(ins)
            twin = dec if ins.kind == "inc" else inc
            new_lines.append(twin(hats[ins.counter], ins.amount))
        else:
            new_lines.append(ins)
    counters = tuple(program.counters) + tuple(
        hats[v] for v in sorted(bounded) if v in program.counters
    )
    return CounterProgram(counters, tuple(new_lines))


# --------------------------------------------------------------------------
# Directed execution: drive one honest run through a component using the
# loop-head tags.  No search — each rule reads the current values and
# picks the continuing or exiting target, so synthesis stays linear in
# run length and works at segment bounds far beyond enumeration reach.


def gadget_policy(
    program: CounterProgram,
    n: int,
    choices=None,
):
    """Target-choosing function for core.execute over gadget programs.

    ``choices`` resolves what values cannot: a mapping from a quantified
    variable name to its witness value (consulted at that variable's pump
    loop), or a callable (tag, configuration) -> index | value | None
    consulted first for every tagged choice.
    """
    index = {name: i for i, name in enumerate(program.counters)}

    def value(config: Configuration, name: str) -> int:
        return config.values[index[name]]

    def choose(ins: Instruction, config: Configuration) -> int:
        if len(ins.targets) == 1:
            return 0
        tag = ins.tag
        if tag is None:
            raise ProgramError(f"untagged choice at line {config.line}")
        if callable(choices):
            picked = choices(tag, config)
            if picked is not None:
                return picked
        kind, args = tag.kind, tag.args
        if kind == "zt_pump":
            return 0 if value(config, mirror_of(args[0])) > 0 else 1
        if kind == "zt_drop":
            return 0 if value(config, args[0]) > 0 else 1
        if kind in ("cp_drain", "fa_reset", "ex_drain", "fin_drain"):
            return 0 if value(config, args[0]) > 0 else 1
        if kind == "cp_move":
            return 0 if value(config, args[0]) > 0 else 1
        if kind in ("cp_back", "mul_back"):
            return 0 if value(config, SCRATCH) > 0 else 1
        if kind == "add_main":
            busy = value(config, SLOT_Z) > 0
            fuel = value(config, SLOT_X) + value(config, SLOT_Y) > 0
            return 0 if busy and fuel else 1
        if kind in ("add_pick", "na_pick"):
            return 0 if value(config, SLOT_X) > 0 else 1
        if kind == "na_branch":
            return 0 if value(config, SLOT_Z) == 0 else 1
        if kind == "mul_outer":
            return 0 if value(config, SLOT_Y) > 0 else 1
        if kind in ("mul_in", "nm_inner"):
            return 0 if value(config, SLOT_X) > 0 else 1
        if kind == "nm_outer":
            zv, xv, yv = (value(config, s) for s in (SLOT_Z, SLOT_X, SLOT_Y))
            if zv >= xv * yv:
                return 0 if yv > 0 else 2
            return 0 if zv >= xv else 1
        if kind == "nm_rem":
            return 0 if value(config, SLOT_Z) > 0 else 1
        if kind == "fa_continue":
            return 0 if value(config, args[0]) < n else 1
        if kind == "ex_pump":
            if choices is None or callable(choices):
                raise ProgramError(f"no witness value for {args[0]!r}")
            return 0 if value(config, args[0]) < choices[args[0]] else 1
        if kind == "u_drain":
            return 0 if value(config, U1) > 0 else 1
        raise ProgramError(f"no policy for tag kind {kind!r}")

    return choose


def witness_run(
    component: Component,
    n: int,
    values: Mapping[str, int] | None = None,
    choices=None,
    drain: bool = True,
    max_steps: int = 50_000_000,
):
    """Synthesize one honest zero-terminating run of the component.

    Appends the burn and drain stages (unless ``drain`` is false), starts
    from the provisioned entry, and follows the tag policy.  Returns the
    run; the caller decides what to assert about it.
    """
    full = drained(component) if drain else component
    entry = provision(full, n, values)
    policy = gadget_policy(full.program, n, choices)
    return full.program, execute(full.program, entry, policy, max_steps)


# --------------------------------------------------------------------------
# Spend guard: a reachability-preserving wrap for the zero-end question.

GUARD = "spend"


def spend_guarded(program: CounterProgram, n: int, guard: str = GUARD) -> CounterProgram:
    """Track u1*N - u2 in an extra counter so cheating dies locally.

    Appends ``inc guard a`` after every ``dec u2 a`` and ``dec guard a*N``
    after every ``dec u1 a``.  Nonnegativity of guard enforces
    u2 <= u1*N at every step, and the pay line's ``dec guard 2N`` blocks
    unless the enclosing test spent exactly 2N — which the pump/drop
    structure permits only from a genuinely zero counter, restored.

    Zero-termination is preserved exactly: any zero-terminating run of
    the original spends u2 down from u1*N to 0 under a per-test spend
    ceiling of 2N and a pay total of u1*N, so every test must spend
    exactly 2N and u2 = u1*N holds at every test boundary; such a run
    keeps guard >= 0 throughout and ends with guard = 0.  Conversely a
    guarded run projects to an original run with the same endpoints.
    The guard therefore changes no verdict, only how early doomed
    branches block.

    Requires the testing discipline the gadget builders guarantee (and
    asserts): u1, u2 never increase and are never zero-tested; u1
    decrements are pay lines; u2 decrements have amount 1.
    """
    if n < 0:
        raise ProgramError("segment bound must be nonnegative")
    if guard in program.counters:
        raise ProgramError(f"guard counter {guard!r} already present")
    for number, ins in enumerate(program.lines, start=1):
        if ins.counter in (U1, U2):
            if ins.kind == "inc" or ins.kind == "zerotest":
                raise ProgramError(f"line {number}: {ins.kind} on testing counter")
            if ins.kind == "dec" and ins.counter == U1:
                if ins.tag is None or ins.tag.kind != "zt_pay":
                    raise ProgramError(f"line {number}: untagged u1 spend")
            if ins.kind == "dec" and ins.counter == U2 and ins.amount != 1:
                raise ProgramError(f"line {number}: u2 spend must be unit")
    new_of_old = {}
    count = 0
    for number, ins in enumerate(program.lines, start=1):
        new_of_old[number] = count + 1
        count += 2 if ins.kind == "dec" and ins.counter in (U1, U2) else 1
    lines = []
    for ins in program.lines:
        if ins.targets:
            lines.append(ins.with_targets(new_of_old[t] for t in ins.targets))
            continue
        lines.append(ins)
        if ins.kind == "dec" and ins.counter == U2:
            lines.append(inc(guard, ins.amount))
        elif ins.kind == "dec" and ins.counter == U1:
            lines.append(dec(guard, ins.amount * n))
    return CounterProgram(tuple(program.counters) + (guard,), tuple(lines))


_CHECKED_EXITS = ("u_drain", "fin_drain", "pre_drain", "zt_pump", "zt_drop")


def _exit_condition(ins) -> str:
    """Counter that is zero exactly when this loop's honest exit fires."""
    v = ins.tag.args[0]
    return mirror_of(v) if ins.tag.kind == "zt_pump" else v


def drain_checked(program: CounterProgram) -> CounterProgram:
    """Gate every free-exit loop behind the zerotest its honest exit implies.

    The transfer and drain loops all exit nondeterministically: a search
    can leave a pump with hat units remaining, a drop or drain with a
    partial value, the burn with u1 still positive.  None of those exits
    ever reaches the all-zero halt (partial transfers underspend u2,
    partial drains halt nonzero), yet they combine into product lattices
    that flood breadth-first enumeration.  Each honest exit is a zero
    condition — pump empties the hat, drop/drain empty the counter, the
    burn empties u1 — so gating the exits preserves zero-reachability
    exactly.  The result contains zerotest instructions, making it an
    analysis device rather than a vector-addition artifact.
    """
    heads = [
        (number, ins)
        for kind in _CHECKED_EXITS
        for number, ins in find_tagged(program, kind)
        if ins.kind == "goto"
        and len(ins.targets) == 2
        and _exit_condition(ins) in program.counters
    ]
    if not heads:
        return program
    heads.sort()
    halt_line = len(program.lines)
    new_halt = halt_line + 2 * len(heads)

    def remap(t: int) -> int:
        return new_halt if t == halt_line else t

    block_of = {number: halt_line + 2 * k for k, (number, _) in enumerate(heads)}
    lines = []
    for number, ins in enumerate(program.lines[:-1], start=1):
        if number in block_of:
            lines.append(ins.with_targets((remap(ins.targets[0]), block_of[number])))
        elif ins.targets:
            lines.append(ins.with_targets(remap(t) for t in ins.targets))
        else:
            lines.append(ins)
    for number, ins in heads:
        lines.append(zero_test(_exit_condition(ins)))
        lines.append(goto(remap(ins.targets[1])))
    lines.append(halt())
    return CounterProgram(program.counters, tuple(lines))


# --------------------------------------------------------------------------
# Provisioning and the enumeration harness.


def burn_component(zero_counter: str = ZERO_COUNTER) -> Component:
    """Loop of zero tests on an always-zero counter.

    Drains any leftover (u1, u2) = (2r, 2rN) to (0, 0); a cheated u2
    surplus can never be burned off, so (0, 0) certifies a valid run.
    """
    vh = mirror_of(zero_counter)
    a = _Asm()
    uid = a.fresh()
    a.label("head")
    a.goto("body", "out", tag=Tag("u_drain", (U1,), uid))
    a.label("body")
    _emit_zero_test(a, zero_counter, vh)
    a.goto("head")
    a.label("out")
    program = a.build((zero_counter, vh, U1, U2))
    return Component(
        program=program,
        pairs=(_canonical_pair(zero_counter),),
        budget=Poly.const(0),
        dirty=frozenset({U1, U2}),
    )


def with_burn(component: Component, zero_counter: str = ZERO_COUNTER) -> Component:
    """Append the burn loop; the declared budget is unchanged (the burn
    only spends what the provisioning already granted)."""
    if zero_counter in component.dirty:
        raise ProgramError(f"burn counter {zero_counter!r} is not always zero here")
    burn = burn_component(zero_counter)
    combined = compose(component, burn, mode="seq")
    return Component(
        program=combined.program,
        pairs=combined.pairs,
        budget=component.budget,
        dirty=combined.dirty,
        testing=component.testing,
    )


def drained(component: Component, zero_counter: str = ZERO_COUNTER) -> Component:
    """Burn the testing counters, then drain every other counter to 0.

    Turns "a valid run exists" into plain zero-termination: after the
    burn, unmirrored drain loops erase whatever a valid run legitimately
    leaves behind (restored arguments, hats at N - v).  The testing
    counters are not drainable, so cheated runs still cannot end at zero.
    The first drain head is tagged fin_drain: hat pairs are live only
    before that line, since draining a pair necessarily leaves sum-of-N
    territory.
    """
    burned = with_burn(component, zero_counter)
    a = _Asm()
    a.splice(burned.program)
    for name in burned.program.counters:
        if name in (U1, U2):
            continue
        uid = a.fresh()
        head, body = f"dr{uid}.head", f"dr{uid}.body"
        a.label(head)
        a.goto(body, f"dr{uid}.out", tag=Tag("fin_drain", (name,), uid))
        a.label(body)
        a.emit(dec(name))
        a.goto(head)
        a.label(f"dr{uid}.out")
    program = a.build(burned.program.counters)
    return Component(
        program=program,
        pairs=burned.pairs,
        budget=component.budget,
        dirty=burned.dirty | frozenset(n for n in burned.program.counters if n not in (U1, U2)),
        testing=component.testing,
    )


def provision(
    component: Component, n: int, values: Mapping[str, int] | None = None
) -> Configuration:
    """Entry configuration: bounded counters at the given values (default
    0) with hats at N - value; u1 = 2*budget(N), u2 = u1*N."""
    values = dict(values or {})
    if n < 0:
        raise ProgramError("segment bound must be nonnegative")
    pair_map = component.pair_map()
    unknown = set(values) - set(pair_map)
    if unknown:
        raise ProgramError(f"values for non-bounded counters: {sorted(unknown)}")
    u1_0 = 2 * component.budget(n)
    hat_of_base = {vh: v for v, vh in pair_map.items()}
    valuation = {}
    for name in component.program.counters:
        if name == U1:
            valuation[name] = u1_0
        elif name == U2:
            valuation[name] = u1_0 * n
        elif name in pair_map:
            val = values.get(name, 0)
            if not 0 <= val <= n:
                raise ProgramError(f"{name}={val} out of range 0..{n}")
            valuation[name] = val
        elif name in hat_of_base:
            valuation[name] = n - values.get(hat_of_base[name], 0)
        else:
            valuation[name] = 0
    return Configuration.make(component.program, 1, valuation)


def tight_caps(component: Component, n: int) -> dict[str, int]:
    """Value caps making exhaustive search finite and honest: paired
    counters never exceed N, testing counters never exceed their start,
    the spend guard never exceeds one test's ceiling."""
    caps = {}
    for v, vh in component.pairs:
        caps[v] = n
        caps[vh] = n
    caps[U1] = 2 * component.budget(n)
    caps[U2] = caps[U1] * n
    caps[GUARD] = 2 * n
    return caps


def _halt_valuations(
    component: Component, n: int, values: Mapping[str, int] | None, max_states: int, guard: bool
) -> tuple[tuple[Mapping[str, int], ...], tuple[str, ...]]:
    entry = provision(component, n, values)
    program = component.program
    valuation = dict(zip(program.counters, entry.values))
    if guard:
        program = spend_guarded(program, n)
        valuation[GUARD] = 0
    limits = SearchLimits(max_states=max_states, value_cap=tight_caps(component, n))
    profile, counters = halt_profile(program, valuation, limits)
    if not profile.exhaustive:
        raise ProgramError(f"enumeration not exhaustive within {max_states} states")
    return tuple(dict(zip(counters, vals)) for vals in sorted(profile.valuations)), counters


def admits_valid_run(
    component: Component,
    n: int,
    values: Mapping[str, int] | None = None,
    max_states: int = 5_000_000,
    guard: bool = True,
) -> bool:
    """Exhaustively decide whether a valid run exists from the given entry.

    Appends the burn loop, then asks for any reachable halt configuration
    with u1 = u2 = 0 (equivalently u2 = u1*N: burning is always possible
    for genuine leftovers and impossible for cheated ones).  ``guard``
    applies the spend wrap, which shrinks the doomed part of the search
    space without changing the answer.
    """
    burned = with_burn(component)
    ends, _ = _halt_valuations(burned, n, values, max_states, guard)
    return any(vals[U1] == 0 and vals[U2] == 0 for vals in ends)


def valid_end_valuations(
    component: Component,
    n: int,
    values: Mapping[str, int] | None = None,
    max_states: int = 5_000_000,
    guard: bool = True,
) -> tuple[Mapping[str, int], ...]:
    """All halt valuations of valid runs (no burn; u2 = u1*N filter)."""
    ends, _ = _halt_valuations(component, n, values, max_states, guard)
    return tuple(vals for vals in ends if vals[U2] == vals[U1] * n)
