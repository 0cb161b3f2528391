"""First-order arithmetic over an initial segment, compiled to counter programs.

Formulas speak about numbers 0..N through the relations a+b=c and a*b=c
(plus sugar =, !=, <, <=), connectives, and quantifiers ranging over the
segment.  A formula with free variables x⃗ compiles to ONE fixed program;
N and the assignment enter only through the initial configuration, whose
per-counter values are polynomials in N and x⃗ (the reduction map).  The
program has a valid zero-terminating run iff the formula holds:
conjunction sequences components, disjunction branches, an existential
pumps a value into its counter, a universal iterates its body over
0..N, and every literal is an arithmetic gadget over shared slots.

Budget bookkeeping: a compiled formula with K literals and M quantified
variables is provisioned for T(N) = (K*(2N+12))**max(M,1) zero tests;
the terminal burn loop absorbs whatever an honest run leaves unspent.

Brute-force evaluation (eval_oracle) gives the independent semantics the
compiled programs are checked against.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .core import (
    Configuration,
    CounterProgram,
    ParseError,
    ProgramError,
    Tag,
    dec,
    execute,
    inc,
    is_zero_terminating,
    straight,
    validate_run,
)
from .engine import SearchLimits, zero_reach
from .gadgets import (
    GUARD,
    POLY_N,
    SCRATCH,
    SLOT_X,
    SLOT_Y,
    SLOT_Z,
    U1,
    U2,
    ZERO_COUNTER,
    Component,
    Poly,
    addition_gadget,
    compose,
    drain_checked,
    drained,
    exists_gadget,
    forall_gadget,
    gadget_policy,
    hat,
    multiplication_gadget,
    not_addition_gadget,
    not_multiplication_gadget,
    spend_guarded,
    tight_caps,
)


# --------------------------------------------------------------------------
# Terms and formulas.


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ProgramError(f"negative constant {self.value}")


Term = Union[Var, Const]


@dataclass(frozen=True)
class Add:
    a: Term
    b: Term
    c: Term


@dataclass(frozen=True)
class Mul:
    a: Term
    b: Term
    c: Term


@dataclass(frozen=True)
class Eq:
    a: Term
    b: Term


@dataclass(frozen=True)
class Neq:
    a: Term
    b: Term


@dataclass(frozen=True)
class Lt:
    a: Term
    b: Term


@dataclass(frozen=True)
class Le:
    a: Term
    b: Term


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


Formula = Union[Add, Mul, Eq, Neq, Lt, Le, And, Or, Not, Exists, ForAll]

_ATOMS = (Add, Mul, Eq, Neq, Lt, Le)
_SUGAR = (Eq, Neq, Lt, Le)


def _terms(f: Formula) -> tuple[Term, ...]:
    if isinstance(f, (Add, Mul)):
        return (f.a, f.b, f.c)
    return (f.a, f.b)


def free_variables(f: Formula) -> frozenset[str]:
    def walk(f: Formula, bound: frozenset[str]) -> frozenset[str]:
        if isinstance(f, _ATOMS):
            return frozenset(
                t.name for t in _terms(f) if isinstance(t, Var) and t.name not in bound
            )
        if isinstance(f, (And, Or)):
            return walk(f.left, bound) | walk(f.right, bound)
        if isinstance(f, Not):
            return walk(f.body, bound)
        return walk(f.body, bound | {f.var})

    return walk(f, frozenset())


def constants_of(f: Formula) -> frozenset[int]:
    if isinstance(f, _ATOMS):
        return frozenset(t.value for t in _terms(f) if isinstance(t, Const))
    if isinstance(f, (And, Or)):
        return constants_of(f.left) | constants_of(f.right)
    return constants_of(f.body)


def _all_names(f: Formula) -> set[str]:
    if isinstance(f, _ATOMS):
        return {t.name for t in _terms(f) if isinstance(t, Var)}
    if isinstance(f, (And, Or)):
        return _all_names(f.left) | _all_names(f.right)
    if isinstance(f, Not):
        return _all_names(f.body)
    return {f.var} | _all_names(f.body)


# --------------------------------------------------------------------------
# Concrete syntax.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(!=|<=|[+*=<().]))")
_KEYWORDS = frozenset({"exists", "forall", "and", "or", "not"})


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", 1, pos + 1)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            word = m.group(2)
            tokens.append(("kw" if word in _KEYWORDS else "name", word, m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, free: Iterable[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.scope: list[str] = list(free)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> ParseError:
        return ParseError(message, 1, self.peek()[2] + 1)

    def expect(self, text: str) -> None:
        kind, word, _ = self.peek()
        if word != text or kind == "end":
            raise self.fail(f"expected {text!r}")
        self.take()

    def formula(self) -> Formula:
        f = self.disjunction()
        if self.peek()[0] != "end":
            raise self.fail(f"unexpected {self.peek()[1]!r}")
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "or":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.operand()
        while self.peek()[1] == "and":
            self.take()
            f = And(f, self.operand())
        return f

    def operand(self) -> Formula:
        kind, word, _ = self.peek()
        if word == "not":
            self.take()
            return Not(self.operand())
        if word in ("exists", "forall"):
            self.take()
            k, name, _ = self.peek()
            if k != "name":
                raise self.fail("expected a variable name")
            self.take()
            self.expect(".")
            self.scope.append(name)
            body = self.disjunction()
            self.scope.pop()
            return (Exists if word == "exists" else ForAll)(name, body)
        if word == "(":
            self.take()
            f = self.disjunction()
            self.expect(")")
            return f
        return self.atom()

    def term(self) -> Term:
        kind, word, _ = self.peek()
        if kind == "num":
            self.take()
            return Const(int(word))
        if kind == "name":
            if word not in self.scope:
                raise self.fail(f"unbound variable {word!r}")
            self.take()
            return Var(word)
        raise self.fail("expected a term")

    def atom(self) -> Formula:
        t1 = self.term()
        word = self.peek()[1]
        if word in ("+", "*"):
            self.take()
            t2 = self.term()
            rel = self.peek()[1]
            if rel not in ("=", "!="):
                raise self.fail("expected '=' after a compound operand")
            self.take()
            t3 = self.term()
            lit = (Add if word == "+" else Mul)(t1, t2, t3)
            return Not(lit) if rel == "!=" else lit
        if word not in ("=", "!=", "<", "<="):
            raise self.fail("expected a relation")
        self.take()
        t2 = self.term()
        follow = self.peek()[1]
        if follow in ("+", "*") and word in ("=", "!="):
            self.take()
            t3 = self.term()
            lit = (Add if follow == "+" else Mul)(t2, t3, t1)
            return Not(lit) if word == "!=" else lit
        if follow in ("+", "*"):
            raise self.fail("comparisons take plain terms")
        return {"=": Eq, "!=": Neq, "<": Lt, "<=": Le}[word](t1, t2)


def parse_formula(text: str, free: Iterable[str] = ()) -> Formula:
    """Parse concrete syntax; names must be declared free or quantified."""
    return _Parser(text, free).formula()


def render_formula(f: Formula) -> str:
    def term(t: Term) -> str:
        return t.name if isinstance(t, Var) else str(t.value)

    def wrap(g: Formula) -> str:
        if isinstance(g, (Or, Exists, ForAll)):
            return f"({render_formula(g)})"
        return render_formula(g)

    if isinstance(f, Add):
        return f"{term(f.a)} + {term(f.b)} = {term(f.c)}"
    if isinstance(f, Mul):
        return f"{term(f.a)} * {term(f.b)} = {term(f.c)}"
    if isinstance(f, _SUGAR):
        op = {Eq: "=", Neq: "!=", Lt: "<", Le: "<="}[type(f)]
        return f"{term(f.a)} {op} {term(f.b)}"
    if isinstance(f, Not):
        return f"not ({render_formula(f.body)})"
    if isinstance(f, And):
        left = f"({render_formula(f.left)})" if isinstance(f.left, (Or, Exists, ForAll)) else render_formula(f.left)
        return f"{left} and {wrap(f.right)}"
    if isinstance(f, Or):
        left = f"({render_formula(f.left)})" if isinstance(f.left, (Exists, ForAll)) else render_formula(f.left)
        return f"{left} or {wrap(f.right)}"
    kw = "exists" if isinstance(f, Exists) else "forall"
    return f"{kw} {f.var}. {render_formula(f.body)}"


# --------------------------------------------------------------------------
# Normalization: sugar removal, negation normal form, prenex form.


def desugar(f: Formula) -> Formula:
    """Eliminate =, !=, <, <= in favor of Add/Mul literals and quantifiers.

    Negated comparisons flip instead of expanding, so no universal
    quantifier is ever introduced: not(a<b) becomes b<=a and not(a<=b)
    becomes b<a.  Fresh witness variables are d, d2, d3, ...
    """
    used = _all_names(f) | free_variables(f)

    def fresh() -> str:
        name = "d"
        k = 1
        while name in used:
            k += 1
            name = f"d{k}"
        used.add(name)
        return name

    def go(f: Formula) -> Formula:
        if isinstance(f, (Add, Mul)):
            return f
        if isinstance(f, Eq):
            return Add(f.a, Const(0), f.b)
        if isinstance(f, Neq):
            return Not(Add(f.a, Const(0), f.b))
        if isinstance(f, Lt):
            d = fresh()
            return Exists(d, And(Add(f.a, Var(d), f.b), Not(Add(f.a, Const(0), f.b))))
        if isinstance(f, Le):
            d = fresh()
            return Exists(d, Add(f.a, Var(d), f.b))
        if isinstance(f, Not):
            g = f.body
            if isinstance(g, Lt):
                return go(Le(g.b, g.a))
            if isinstance(g, Le):
                return go(Lt(g.b, g.a))
            if isinstance(g, Neq):
                return go(Eq(g.a, g.b))
            if isinstance(g, Eq):
                return Not(Add(g.a, Const(0), g.b))
            return Not(go(g))
        if isinstance(f, And):
            return And(go(f.left), go(f.right))
        if isinstance(f, Or):
            return Or(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, go(f.body))
        return ForAll(f.var, go(f.body))

    return go(f)


def _nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, (Add, Mul)):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        pair = (_nnf(f.left, positive), _nnf(f.right, positive))
        return And(*pair) if positive else Or(*pair)
    if isinstance(f, Or):
        pair = (_nnf(f.left, positive), _nnf(f.right, positive))
        return Or(*pair) if positive else And(*pair)
    if isinstance(f, Exists):
        body = _nnf(f.body, positive)
        return Exists(f.var, body) if positive else ForAll(f.var, body)
    if isinstance(f, ForAll):
        body = _nnf(f.body, positive)
        return ForAll(f.var, body) if positive else Exists(f.var, body)
    raise ProgramError(f"sugar survived desugaring: {f!r}")


def _subst_var(f: Formula, old: str, new: str) -> Formula:
    def st(t: Term) -> Term:
        return Var(new) if isinstance(t, Var) and t.name == old else t

    if isinstance(f, (Add, Mul)):
        return type(f)(st(f.a), st(f.b), st(f.c))
    if isinstance(f, Not):
        return Not(_subst_var(f.body, old, new))
    if isinstance(f, (And, Or)):
        return type(f)(_subst_var(f.left, old, new), _subst_var(f.right, old, new))
    if f.var == old:
        return f
    return type(f)(f.var, _subst_var(f.body, old, new))


def prenex_nnf(f: Formula) -> Formula:
    """Desugar, push negations to literals, pull quantifiers to a prefix.

    Binders are renamed apart deterministically (y, y_2, y_3, ...) so
    sibling quantifiers never collide with each other or with free
    variables; the relative quantifier order is preserved.
    """
    f = _nnf(desugar(f))
    used = set(free_variables(f))

    def fresh(v: str) -> str:
        k = 1
        name = v
        while name in used:
            k += 1
            name = f"{v}_{k}"
        return name

    def pull(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
        if isinstance(f, (Exists, ForAll)):
            v, body = f.var, f.body
            if v in used:
                v2 = fresh(v)
                body = _subst_var(body, v, v2)
                v = v2
            used.add(v)
            prefix, matrix = pull(body)
            kind = "exists" if isinstance(f, Exists) else "forall"
            return [(kind, v)] + prefix, matrix
        if isinstance(f, (And, Or)):
            pl, ml = pull(f.left)
            pr, mr = pull(f.right)
            return pl + pr, type(f)(ml, mr)
        return [], f

    prefix, matrix = pull(f)
    for kind, v in reversed(prefix):
        matrix = (Exists if kind == "exists" else ForAll)(v, matrix)
    return matrix


def split_prenex(f: Formula) -> tuple[tuple[tuple[str, str], ...], Formula]:
    prefix = []
    while isinstance(f, (Exists, ForAll)):
        prefix.append(("exists" if isinstance(f, Exists) else "forall", f.var))
        f = f.body
    return tuple(prefix), f


def is_normalized(f: Formula) -> bool:
    _, matrix = split_prenex(f)

    def quantifier_free_nnf(g: Formula) -> bool:
        if isinstance(g, (Add, Mul)):
            return True
        if isinstance(g, Not):
            return isinstance(g.body, (Add, Mul))
        if isinstance(g, (And, Or)):
            return quantifier_free_nnf(g.left) and quantifier_free_nnf(g.right)
        return False

    return quantifier_free_nnf(matrix)


# --------------------------------------------------------------------------
# Brute-force semantics.


def eval_oracle(f: Formula, n: int, values: Mapping[str, int] | None = None) -> bool:
    """Evaluate over {0..n} by exhaustion.  An atom holds only when every
    term value lies in the segment."""
    env = dict(values or {})
    for name, v in env.items():
        if not 0 <= v <= n:
            raise ProgramError(f"value {v} for {name!r} outside 0..{n}")

    def tv(t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Const):
            return t.value
        if t.name not in env:
            raise ProgramError(f"unbound variable {t.name!r}")
        return env[t.name]

    def ev(f: Formula, env: dict[str, int]) -> bool:
        if isinstance(f, _ATOMS):
            vals = [tv(t, env) for t in _terms(f)]
            if any(v > n for v in vals):
                return False
            if isinstance(f, Add):
                return vals[0] + vals[1] == vals[2]
            if isinstance(f, Mul):
                return vals[0] * vals[1] == vals[2]
            a, b = vals
            if isinstance(f, Eq):
                return a == b
            if isinstance(f, Neq):
                return a != b
            return a < b if isinstance(f, Lt) else a <= b
        if isinstance(f, Not):
            return not ev(f.body, env)
        if isinstance(f, And):
            return ev(f.left, env) and ev(f.right, env)
        if isinstance(f, Or):
            return ev(f.left, env) or ev(f.right, env)
        quantified = any if isinstance(f, Exists) else all
        return quantified(ev(f.body, {**env, f.var: w}) for w in range(n + 1))

    return ev(f, env)


# --------------------------------------------------------------------------
# Compilation.


@dataclass(frozen=True)
class InitPoly:
    """base(N) + Σ sign·x over free variables; nonnegative on the domain."""

    base: Poly
    terms: tuple[tuple[str, int], ...] = ()

    def __call__(self, n: int, values: Mapping[str, int]) -> int:
        total = self.base(n) + sum(sign * values[v] for v, sign in self.terms)
        if total < 0:
            raise ProgramError(f"negative initial value {total}")
        return total

    def render(self) -> str:
        parts = "" if self.base == Poly.const(0) else self.base.render()
        for v, sign in self.terms:
            if not parts:
                parts = v if sign > 0 else f"-{v}"
            else:
                parts += f" + {v}" if sign > 0 else f" - {v}"
        return parts or "0"


@dataclass(frozen=True)
class ReductionMap:
    entries: tuple[tuple[str, InitPoly], ...]

    def valuation(self, n: int, values: Mapping[str, int]) -> dict[str, int]:
        return {counter: poly(n, values) for counter, poly in self.entries}


@dataclass(frozen=True)
class CompiledProgram:
    formula: Formula
    component: Component
    layout: tuple[tuple[str, str], ...]  # role -> counter
    k: int
    m: int
    budget: Poly  # T(N): provisioned zero tests
    reduction_map: ReductionMap
    free_names: tuple[str, ...]
    prefix: tuple[tuple[str, str], ...]
    constants: tuple[int, ...]
    branches: tuple[tuple[int, Formula], ...]  # or-node id -> left disjunct

    def manifest(self) -> dict:
        return {
            "K": self.k,
            "M": self.m,
            "budget_poly": self.budget.render(),
            "layout": {role: counter for role, counter in self.layout},
            "reduction_map": {c: p.render() for c, p in self.reduction_map.entries},
        }


_NAME_OK = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_CONST_NAME = re.compile(r"c\d+$")
_RESERVED = frozenset({U1, U2, SCRATCH, GUARD, SLOT_X, SLOT_Y, SLOT_Z, "N"})


def _counter_name(t: Term) -> str:
    return t.name if isinstance(t, Var) else f"c{t.value}"


def _check_variable(name: str) -> None:
    if not _NAME_OK.match(name) or name in _RESERVED or _CONST_NAME.match(name):
        raise ProgramError(f"reserved counter name {name!r}")


def _literal_count(f: Formula) -> int:
    if isinstance(f, (Add, Mul)):
        return 1
    if isinstance(f, Not):
        return _literal_count(f.body)
    return _literal_count(f.left) + _literal_count(f.right)


def compile(f: Formula) -> CompiledProgram:
    """Compile a normalized formula to one fixed component.

    Layout: free and quantified variables keep their names (with hat
    twins), constant a lives in counter ``ca`` materialized by a mirrored
    prologue, literals share the operand slots, and the epilogue burns
    leftover tests on c0 and drains every counter.
    """
    if not is_normalized(f):
        raise ProgramError("formula must be normalized (prenex NNF, sugar-free)")
    prefix, matrix = split_prenex(f)
    free = tuple(sorted(free_variables(f)))
    for name in free + tuple(v for _, v in prefix):
        _check_variable(name)

    constants = tuple(sorted(constants_of(f) | {0}))
    k = _literal_count(matrix)
    m = len(prefix)
    budget = Poly((12 * k, 2 * k)) ** max(m, 1)

    branches: list[tuple[int, Formula]] = []

    def build(node: Formula) -> Component:
        negated = isinstance(node, Not)
        lit = node.body if negated else node
        if isinstance(lit, (Add, Mul)):
            args = tuple(_counter_name(t) for t in _terms(lit))
            if isinstance(lit, Add):
                make = not_addition_gadget if negated else addition_gadget
            else:
                make = not_multiplication_gadget if negated else multiplication_gadget
            return make(*args)
        if isinstance(node, And):
            return compose(build(node.left), build(node.right))
        if isinstance(node, Or):
            bid = len(branches)
            branches.append((bid, node.left))
            tag = Tag("or_branch", (bid,), 0)
            return compose(build(node.left), build(node.right), mode="alt", tag=tag)
        raise ProgramError(f"not a matrix formula: {node!r}")

    comp = build(matrix)
    for kind, v in reversed(prefix):
        if kind == "exists":
            comp = compose(exists_gadget(v), comp)
        else:
            comp = forall_gadget(v, comp)

    prologue_ins = []
    prologue_pairs = []
    for a in constants:
        c = f"c{a}"
        prologue_ins.append(dec(hat(c), a))
        prologue_ins.append(inc(c, a))
        prologue_pairs.append((c, hat(c)))
    prologue = Component(
        program=straight(*prologue_ins),
        pairs=tuple(prologue_pairs),
        budget=Poly.const(0),
        dirty=frozenset(),
    )

    full = drained(compose(prologue, comp))
    component = dataclasses.replace(full, budget=budget)
    program = component.program

    hat_of = {base: h for base, h in component.pairs}
    roles: dict[str, str] = {}
    for v in free:
        roles[v] = f"free:{v}"
    for _, v in prefix:
        roles[v] = f"quantified:{v}"
    for a in constants:
        roles[f"c{a}"] = f"constant:{a}"
    roles[SLOT_X] = "slot:left"
    roles[SLOT_Y] = "slot:right"
    roles[SLOT_Z] = "slot:total"
    roles[SCRATCH] = "scratch"
    roles[U1] = "testing:count"
    roles[U2] = "testing:spend"
    layout = []
    for counter in program.counters:
        if counter in roles:
            layout.append((roles[counter], counter))
        elif counter.endswith("^"):
            layout.append((f"hat:{counter[:-1]}", counter))
        else:
            raise ProgramError(f"counter {counter!r} has no role")
    if len({role for role, _ in layout}) != len(layout):
        raise ProgramError("layout roles collide")

    entries = []
    quantified = {v for _, v in prefix}
    for counter in program.counters:
        if counter == U1:
            poly = InitPoly(budget * 2)
        elif counter == U2:
            poly = InitPoly((budget * 2) * POLY_N)
        elif counter in free:
            poly = InitPoly(Poly.const(0), ((counter, 1),))
        elif counter.endswith("^") and counter[:-1] in free:
            poly = InitPoly(POLY_N, ((counter[:-1], -1),))
        elif counter.endswith("^"):
            poly = InitPoly(POLY_N)
        else:
            assert counter in quantified or counter in hat_of or counter == SCRATCH
            poly = InitPoly(Poly.const(0))
        entries.append((counter, poly))

    return CompiledProgram(
        formula=f,
        component=component,
        layout=tuple(layout),
        k=k,
        m=m,
        budget=budget,
        reduction_map=ReductionMap(tuple(entries)),
        free_names=free,
        prefix=prefix,
        constants=constants,
        branches=tuple(branches),
    )


def initial_configuration(
    compiled: CompiledProgram, n: int, values: Mapping[str, int] | None = None
) -> Configuration:
    """Entry configuration for segment size n and a free-variable assignment."""
    values = dict(values or {})
    for name in compiled.free_names:
        if name not in values:
            raise ProgramError(f"missing value for free variable {name!r}")
        if not 0 <= values[name] <= n:
            raise ProgramError(f"value {values[name]} for {name!r} outside 0..{n}")
    for a in compiled.constants:
        if a > n:
            raise ProgramError(f"constant {a} exceeds segment 0..{n}")
    valuation = compiled.reduction_map.valuation(n, values)
    return Configuration.make(compiled.component.program, 1, valuation)


# --------------------------------------------------------------------------
# Witness synthesis and the guarded reachability check.


def witness_run(
    compiled: CompiledProgram,
    n: int,
    values: Mapping[str, int] | None = None,
    max_steps: int = 50_000_000,
):
    """A validated zero-terminating run when the formula holds, else None.

    The run is steered, not searched: existential pumps stop at the least
    witness that makes the remaining formula true under the current
    environment, and disjunction heads take a branch the oracle approves.
    Both reread the live counter values, so choices stay correct across
    universal iterations.
    """
    values = dict(values or {})
    entry = initial_configuration(compiled, n, values)
    if not eval_oracle(compiled.formula, n, values):
        return None

    program = compiled.component.program
    index = {name: i for i, name in enumerate(program.counters)}
    body_of: dict[str, Formula] = {}
    rest = compiled.formula
    for _, v in compiled.prefix:
        rest = rest.body
        body_of[v] = rest
    branch_left = dict(compiled.branches)
    tracked = compiled.free_names + tuple(v for _, v in compiled.prefix)

    def environment(config: Configuration) -> dict[str, int]:
        return {name: config.values[index[name]] for name in tracked}

    def choose(tag: Tag, config: Configuration):
        if tag.kind == "ex_pump":
            v = tag.args[0]
            env = environment(config)
            for w in range(n + 1):
                if eval_oracle(body_of[v], n, {**env, v: w}):
                    return 0 if config.values[index[v]] < w else 1
            raise ProgramError(f"no witness for {v!r} at line {config.line}")
        if tag.kind == "or_branch":
            left = branch_left[tag.args[0]]
            return 0 if eval_oracle(left, n, environment(config)) else 1
        return None

    run = execute(program, entry, gadget_policy(program, n, choose), max_steps)
    validate_run(program, run)
    if not is_zero_terminating(program, run):
        raise ProgramError("synthesized run does not zero-terminate")
    return run


def guarded_zero_reach(
    compiled: CompiledProgram,
    n: int,
    values: Mapping[str, int] | None = None,
    max_states: int = 5_000_000,
    max_seconds: float | None = None,
):
    """zero_reach on a reachability-equivalent hardening of the program.

    The spend guard makes dishonest zero-test traffic block immediately
    instead of surviving to flood the search, and the drain gates prune
    partial epilogue exits that could never reach the all-zero halt, so
    exhaustive verdicts arrive in seconds; reachability of the zero-halt
    configuration is unchanged.
    """
    initial_configuration(compiled, n, values)  # range checks
    program = drain_checked(spend_guarded(compiled.component.program, n))
    valuation = compiled.reduction_map.valuation(n, dict(values or {}))
    valuation[GUARD] = 0
    caps = dict(tight_caps(compiled.component, n))
    caps[GUARD] = 2 * n
    limits = SearchLimits(max_states=max_states, max_seconds=max_seconds, value_cap=caps)
    return zero_reach(program, valuation, limits)
