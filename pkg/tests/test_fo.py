from __future__ import annotations

import json

import pytest

import corpus
from vass_forge import fo
from vass_forge.core import (
    ParseError,
    ProgramError,
    find_tagged,
    is_zero_terminating,
    render_program,
    validate_run,
)
from vass_forge.engine import Reachable, Unreachable, run_stats
from vass_forge.fo import (
    Add,
    And,
    Const,
    Eq,
    Exists,
    ForAll,
    Le,
    Lt,
    Mul,
    Neq,
    Not,
    Or,
    Var,
)

X, Y, Z = Var("x"), Var("y"), Var("z")


# --------------------------------------------------------------------------
# Parsing.


def test_parse_evenness_shape():
    f = fo.parse_formula("exists y. y + y = x", free=("x",))
    assert f == Exists("y", Add(Y, Y, X))


def test_parse_product_on_either_side():
    assert fo.parse_formula("x = y * z", free=("x", "y", "z")) == Mul(Y, Z, X)
    assert fo.parse_formula("y * z = x", free=("x", "y", "z")) == Mul(Y, Z, X)


def test_parse_primes_with_comparisons():
    f = fo.parse_formula(
        "not(x = 0) and not(x = 1) and forall y. forall z. "
        "not(x = y*z and y < x and z < x)",
        free=("x",),
    )
    assert f == And(
        And(Not(Eq(X, Const(0))), Not(Eq(X, Const(1)))),
        ForAll("y", ForAll("z", Not(And(And(Mul(Y, Z, X), Lt(Y, X)), Lt(Z, X))))),
    )


def test_parse_rejects_unbound_variable():
    with pytest.raises(ParseError, match="unbound variable 'z'"):
        fo.parse_formula("x = y * z", free=("x", "y"))


def test_parse_rejects_syntax_errors():
    with pytest.raises(ParseError):
        fo.parse_formula("exists . x = 0", free=("x",))
    with pytest.raises(ParseError):
        fo.parse_formula("x + = 1", free=("x",))
    with pytest.raises(ParseError):
        fo.parse_formula("x < y + z", free=("x", "y", "z"))


def test_quantifier_body_extends_right():
    f = fo.parse_formula("x = 0 or forall y. y <= x and y + y = y", free=("x",))
    assert isinstance(f, Or) and isinstance(f.right, ForAll)
    assert isinstance(f.right.body, And)


@pytest.mark.parametrize("name", corpus.NAMES)
def test_render_round_trips(name):
    f = corpus.raw(name)
    free = corpus.row(name)[2]
    assert fo.parse_formula(fo.render_formula(f), free=free) == f
    g = corpus.normalized(name)
    assert fo.parse_formula(fo.render_formula(g), free=free) == g


# --------------------------------------------------------------------------
# Desugaring.


def test_desugar_definitions():
    assert fo.desugar(Eq(X, Y)) == Add(X, Const(0), Y)
    assert fo.desugar(Neq(X, Y)) == Not(Add(X, Const(0), Y))
    assert fo.desugar(Le(X, Y)) == Exists("d", Add(X, Var("d"), Y))
    assert fo.desugar(Lt(X, Y)) == Exists(
        "d", And(Add(X, Var("d"), Y), Not(Add(X, Const(0), Y)))
    )


def test_desugar_negated_comparisons_flip():
    # no universal quantifier is introduced
    assert fo.desugar(Not(Lt(X, Y))) == fo.desugar(Le(Y, X))
    assert fo.desugar(Not(Le(X, Y))) == fo.desugar(Lt(Y, X))
    assert fo.desugar(Not(Neq(X, Y))) == Add(X, Const(0), Y)


def test_desugar_fresh_witnesses_do_not_collide():
    f = And(Lt(X, Y), Le(Var("d"), Y))
    g = fo.desugar(f)
    assert isinstance(g.left, Exists) and isinstance(g.right, Exists)
    assert g.left.var != g.right.var != "d"


@pytest.mark.parametrize("name", corpus.NAMES)
def test_desugar_idempotent_on_sugar_free(name):
    g = fo.desugar(corpus.raw(name))
    assert fo.desugar(g) == g


# --------------------------------------------------------------------------
# Prenex negation normal form.


def test_prenex_flips_negated_quantifier():
    f = Not(Exists("y", Add(Y, Y, X)))
    assert fo.prenex_nnf(f) == ForAll("y", Not(Add(Y, Y, X)))


def test_prenex_merges_sibling_quantifiers():
    f = fo.parse_formula("(exists y. y + y = x) and (exists z. z + z = x)", free=("x",))
    assert fo.prenex_nnf(f) == Exists(
        "y", Exists("z", And(Add(Y, Y, X), Add(Z, Z, X)))
    )


def test_prenex_renames_apart():
    f = fo.parse_formula("(exists y. y + y = x) and (exists y. y + 0 = x)", free=("x",))
    g = fo.prenex_nnf(f)
    assert g == Exists(
        "y", Exists("y_2", And(Add(Y, Y, X), Add(Y, Const(0), Var("y_2"))))
    ) or g == Exists(
        "y", Exists("y_2", And(Add(Y, Y, X), Add(Var("y_2"), Const(0), X)))
    )
    # exact pin: the second binder is renamed, its occurrences rewritten
    assert g.body.var == "y_2"
    assert fo.eval_oracle(g, 2, {"x": 2})


def test_prenex_fixes_already_normal_input():
    g = corpus.normalized("evenness")
    assert fo.prenex_nnf(g) == g
    assert fo.is_normalized(g)
    assert not fo.is_normalized(Lt(X, Y))


@pytest.mark.parametrize("name", corpus.NAMES)
def test_normalization_preserves_oracle(name):
    f = corpus.raw(name)
    g = corpus.normalized(name)
    for n in range(4):
        for env in corpus.assignments(name, n):
            assert fo.eval_oracle(f, n, env) == fo.eval_oracle(g, n, env)


# --------------------------------------------------------------------------
# Brute-force oracle.


def test_oracle_primes_to_ten():
    for name in ("primes",):
        f = corpus.raw(name)
        truths = {x for x in range(11) if fo.eval_oracle(f, 10, {"x": x})}
        assert truths == {2, 3, 5, 7}


def test_oracle_primes_comparison_form_to_ten():
    f = fo.parse_formula(
        "not(x = 0) and not(x = 1) and forall y. forall z. "
        "not(x = y*z and y < x and z < x)",
        free=("x",),
    )
    truths = {x for x in range(11) if fo.eval_oracle(f, 10, {"x": x})}
    assert truths == {2, 3, 5, 7}


def test_oracle_sum_may_exceed_segment():
    # 3 + 3 = 6 lands outside {0..5}: no z satisfies the atom
    assert not any(fo.eval_oracle(Add(Const(3), Const(3), Z), 5, {"z": z}) for z in range(6))


def test_oracle_rejects_out_of_segment_assignment():
    with pytest.raises(ProgramError):
        fo.eval_oracle(Add(X, X, X), 3, {"x": 4})


def test_oracle_rejects_unbound_variable():
    with pytest.raises(ProgramError, match="unbound"):
        fo.eval_oracle(Add(X, Y, X), 3, {"x": 1})


# --------------------------------------------------------------------------
# Compilation: shape, budgets, layout, reduction map.


def test_compile_requires_normalized_input():
    with pytest.raises(ProgramError, match="normalized"):
        fo.compile(Eq(X, Y))
    with pytest.raises(ProgramError, match="normalized"):
        fo.compile(And(Exists("y", Add(Y, Y, X)), Add(X, X, X)))


def test_compile_rejects_reserved_variable_names():
    for bad in ("t", "u1", "u2", "c0", "spend", "N"):
        f = Exists(bad, Add(Var(bad), Var(bad), X))
        with pytest.raises(ProgramError, match="reserved"):
            fo.compile(f)


def test_evenness_budget_and_counts():
    cp = corpus.compiled("evenness")
    assert (cp.k, cp.m) == (1, 1)
    assert cp.budget.coeffs == (12, 2)  # T(N) = 2N + 12
    assert cp.budget(3) == 18


def test_quantifier_free_literal_budget():
    cp = fo.compile(Add(X, Y, Z))
    assert (cp.k, cp.m) == (1, 0)
    assert cp.budget.coeffs == (12, 2)  # exponent floors at 1


def test_primes_budget():
    cp = corpus.compiled("primes")
    assert (cp.k, cp.m) == (5, 2)
    assert cp.budget(3) == (5 * 18) ** 2 == 8100


def test_layout_covers_every_counter():
    for name in corpus.NAMES:
        cp = corpus.compiled(name)
        counters = set(cp.component.program.counters)
        assert {c for _, c in cp.layout} == counters
        roles = dict(cp.layout)
        assert roles["testing:count"] == "u1"
        assert roles["testing:spend"] == "u2"
        assert roles["constant:0"] == "c0"
        assert roles["slot:left"] == "x'"


def test_manifest_is_json_round_trippable():
    cp = corpus.compiled("evenness")
    blob = json.dumps(cp.manifest(), sort_keys=True)
    back = json.loads(blob)
    assert back["K"] == 1 and back["M"] == 1
    assert back["budget_poly"] == "2*N + 12"
    assert back["reduction_map"]["x"] == "x"
    assert back["reduction_map"]["x^"] == "N - x"
    assert back["reduction_map"]["u1"] == "4*N + 24"
    assert back["reduction_map"]["u2"] == "4*N^2 + 24*N"


def test_compile_is_fixed():
    # same formula, same bytes: N and the assignment enter only via the
    # initial configuration
    for name in ("evenness", "primes"):
        a = fo.compile(corpus.normalized(name))
        b = fo.compile(corpus.normalized(name))
        assert render_program(a.component.program) == render_program(b.component.program)
        assert json.dumps(a.manifest(), sort_keys=True) == json.dumps(
            b.manifest(), sort_keys=True
        )


def test_initial_configuration_frozen_example():
    cp = corpus.compiled("evenness")
    init = fo.initial_configuration(cp, 3, {"x": 2})
    val = init.valuation(cp.component.program)
    assert val["x"] == 2 and val["x^"] == 1
    assert val["y"] == 0 and val["y^"] == 3
    assert val["c0"] == 0 and val["c0^"] == 3
    assert val["u1"] == 36 and val["u2"] == 108
    assert val["x'"] == 0 and val["x'^"] == 3
    assert val["t"] == 0 and val["t^"] == 3
    assert init.line == 1


def test_initial_configuration_range_errors():
    cp = corpus.compiled("evenness")
    with pytest.raises(ProgramError, match="outside"):
        fo.initial_configuration(cp, 3, {"x": 4})
    with pytest.raises(ProgramError, match="missing"):
        fo.initial_configuration(cp, 3, {})
    comp = corpus.compiled("compositeness")
    with pytest.raises(ProgramError, match="constant 1 exceeds"):
        fo.initial_configuration(comp, 0, {"x": 0})


# --------------------------------------------------------------------------
# Compiled programs against the oracle (hardened equivalent search).


@pytest.mark.parametrize("name", corpus.NAMES)
def test_hardened_reach_matches_oracle(name):
    cp = corpus.compiled(name)
    for n in range(4):
        if not corpus.in_domain(name, n):
            continue
        for env in corpus.assignments(name, n):
            want = fo.eval_oracle(cp.formula, n, env)
            got = fo.guarded_zero_reach(cp, n, env)
            if want:
                assert isinstance(got, Reachable), (name, n, env)
            else:
                assert isinstance(got, Unreachable) and got.exhaustive, (name, n, env)


def test_primes_verdicts_at_three():
    cp = corpus.compiled("primes")
    verdicts = [
        isinstance(fo.guarded_zero_reach(cp, 3, {"x": x}), Reachable) for x in range(4)
    ]
    assert verdicts == [False, False, True, True]


# --------------------------------------------------------------------------
# Witness synthesis.


def _pre_drain(program, run):
    cut = min(num for num, _ in find_tagged(program, "fin_drain"))
    return tuple(cfg for cfg in run if cfg.line < cut)


def test_witness_frozen_examples():
    cp = corpus.compiled("evenness")
    run = fo.witness_run(cp, 8, {"x": 6})
    assert run is not None and is_zero_terminating(cp.component.program, run)
    assert fo.witness_run(cp, 8, {"x": 5}) is None
    pp = corpus.compiled("primes")
    run = fo.witness_run(pp, 6, {"x": 5})
    assert run is not None and is_zero_terminating(pp.component.program, run)


def test_witness_entry_counts_meet_budget():
    # every provisioned test is paid: the burn absorbs the slack
    cp = corpus.compiled("evenness")
    program = cp.component.program
    pays = frozenset(num for num, _ in find_tagged(program, "zt_pay"))
    for n, x in ((2, 2), (5, 4)):
        run = fo.witness_run(cp, n, {"x": x})
        st = run_stats(program, run, pay_lines=pays)
        assert st.zero_test_entries == cp.budget(n)


@pytest.mark.parametrize("name", corpus.NAMES)
def test_witness_soundness_sampled(name):
    cp = corpus.compiled(name)
    program = cp.component.program
    for n in (0, 3, 8):
        if not corpus.in_domain(name, n):
            continue
        for env in corpus.assignments(name, n):
            want = fo.eval_oracle(cp.formula, n, env)
            run = fo.witness_run(cp, n, env)
            if not want:
                assert run is None, (name, n, env)
                continue
            assert validate_run(program, run)
            assert is_zero_terminating(program, run)


@pytest.mark.parametrize("name", ("evenness", "compositeness", "forall-exists"))
def test_witness_runs_keep_hat_invariant(name):
    cp = corpus.compiled(name)
    program = cp.component.program
    n = 3
    for env in corpus.assignments(name, n):
        if not fo.eval_oracle(cp.formula, n, env):
            continue
        run = fo.witness_run(cp, n, env)
        live = _pre_drain(program, run)
        st = run_stats(program, live, pairs=dict(cp.component.pairs), n_value=n)
        assert st.hat_violations == 0, (name, env)


def test_witness_validates_values_before_answering():
    cp = corpus.compiled("evenness")
    with pytest.raises(ProgramError):
        fo.witness_run(cp, 3, {"x": 9})
