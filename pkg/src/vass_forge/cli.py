"""Command-line front end: compile, evaluate, search, simulate, convert.

Exit codes: 0 reachable / accepting / true, 1 unreachable / rejecting /
false, 2 search or run limit exceeded, 3 invalid input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Mapping, Sequence
from typing import NoReturn

from . import fo, tm
from .core import (
    Configuration,
    ParseError,
    ProgramError,
    parse_program,
    program_to_dot,
    program_to_vass,
    render_program,
    vass_from_json,
    vass_to_dot,
    vass_to_json,
)
from .engine import Reachable, SearchLimits, Unreachable, zero_reach
from .gadgets import (
    addition_gadget,
    copy_gadget,
    drain_checked,
    drained,
    multiplication_gadget,
    not_addition_gadget,
    not_multiplication_gadget,
    provision,
    spend_guarded,
    zero_test_gadget,
)

REACHED, UNREACHED, LIMITED, INVALID = 0, 1, 2, 3

_STATE_BYTES = 100  # rough visited-set footprint per stored configuration


# --------------------------------------------------------------------------
# Small input helpers.


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _assignment(text: str | None) -> dict[str, int]:
    """Parse `x=2,y=0` (commas or whitespace between entries)."""
    values: dict[str, int] = {}
    for part in (text or "").replace(",", " ").split():
        name, eq, num = part.partition("=")
        try:
            value = int(num)
        except ValueError:
            eq = ""
        if not eq or not name:
            raise ProgramError(f"expected name=value, got {part!r}")
        values[name] = value
    return values


def _names(text: str | None) -> tuple[str, ...]:
    return tuple((text or "").replace(",", " ").split())


def _count(text: str) -> int:
    """Positive integer flag; scientific notation like 5e6 accepted."""
    value = float(text)
    if value <= 0 or value != int(value):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _seconds(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive duration, got {text!r}")
    return value


def _config_map(path: str | None) -> dict[str, str]:
    """key=value per line; # comments; keys use the flag spelling."""
    table: dict[str, str] = {}
    if path is None:
        return table
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq or not key.strip():
            raise ProgramError(f"{path}:{lineno}: expected key=value")
        table[key.strip().replace("_", "-")] = value.strip()
    return table


def _setting(args: argparse.Namespace, name: str, cast, default=None):
    """Flag value, else the config file's, else the built-in default."""
    value = getattr(args, name.replace("-", "_"))
    if value is not None:
        return value
    table: Mapping[str, str] = getattr(args, "config_table", {})
    if name in table:
        try:
            return cast(table[name])
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ProgramError(f"config {name}: {exc}") from None
    return default


def _mem_states() -> int | None:
    """VASS_FORGE_MAX_MEM (bytes, k/m/g suffixes) as a visited-set cap."""
    raw = os.environ.get("VASS_FORGE_MAX_MEM")
    if raw is None or not raw.strip():
        return None
    text = raw.strip().lower()
    scale = {"k": 1 << 10, "m": 1 << 20, "g": 1 << 30}.get(text[-1], 1)
    digits = text[:-1] if scale != 1 else text
    try:
        size = int(digits) * scale
    except ValueError:
        raise ProgramError(f"VASS_FORGE_MAX_MEM: cannot parse {raw!r}") from None
    return max(1, size // _STATE_BYTES)


# --------------------------------------------------------------------------
# Manifest polynomials (`4*N^2 + 24*N - x` and friends).


def _poly_value(text: str, n: int, values: Mapping[str, int]) -> int:
    total = 0
    for signed in text.replace(" - ", " + -").split(" + "):
        sign, term = (-1, signed[1:]) if signed.startswith("-") else (1, signed)
        coeff, star, power = term.partition("*")
        factor = int(coeff) if star else 1
        if not star:
            power = term
        if power == "N":
            value = n
        elif power.startswith("N^"):
            value = n ** int(power[2:])
        elif power.isdigit():
            value = int(power)
        elif power in values:
            value = values[power]
        else:
            raise ProgramError(f"missing value for free variable {power!r}")
        total += sign * factor * value
    return total


def _load_manifest(text: str) -> Mapping:
    data = json.loads(text)
    if not isinstance(data, dict) or "reduction_map" not in data:
        raise ProgramError("manifest has no reduction_map")
    return data


def _manifest_valuation(
    manifest: Mapping, n: int, values: Mapping[str, int]
) -> dict[str, int]:
    valuation = {}
    for counter, poly in manifest["reduction_map"].items():
        value = _poly_value(poly, n, values)
        if value < 0:
            raise ProgramError(f"negative initial value {value} for {counter!r}")
        valuation[counter] = value
    return valuation


def _compile_formula(text: str, free: tuple[str, ...]) -> fo.CompiledProgram:
    return fo.compile(fo.prenex_nnf(fo.parse_formula(text, free=free)))


# --------------------------------------------------------------------------
# Output helpers.


def _report_search(result, as_json: bool) -> int:
    if isinstance(result, Reachable):
        payload = {
            "verdict": "reachable",
            "explored": result.explored,
            "run_length": len(result.run),
        }
        code = REACHED
    elif isinstance(result, Unreachable):
        payload = {
            "verdict": "unreachable",
            "explored": result.explored,
            "exhaustive": result.exhaustive,
        }
        code = UNREACHED
    else:
        payload = {
            "verdict": "limit-exceeded",
            "explored": result.explored,
            "reason": result.reason,
        }
        code = LIMITED
    if as_json:
        print(json.dumps(payload))
    elif code == REACHED:
        print(f"reachable (run length {payload['run_length']}, explored {payload['explored']})")
    elif code == UNREACHED:
        kind = "exhaustive" if payload["exhaustive"] else "not exhaustive"
        print(f"unreachable ({kind}, explored {payload['explored']})")
    else:
        print(f"limit exceeded: {payload['reason']} (explored {payload['explored']})")
    return code


def _report_verdict(r, as_json: bool) -> int:
    name = {
        tm.Accept: "accept",
        tm.Reject: "reject",
        tm.SpaceExceeded: "space-exceeded",
        tm.FuelExceeded: "fuel-exceeded",
    }[type(r)]
    code = {"accept": REACHED, "reject": UNREACHED}.get(name, LIMITED)
    if as_json:
        print(json.dumps({"verdict": name, "steps": r.steps, "space": r.space}))
    else:
        print(f"{name} (steps {r.steps}, space {r.space})")
    return code


def _emit_run(path: str, system, run: Sequence) -> None:
    names = system.counters
    data = []
    for cfg in run:
        if isinstance(cfg, Configuration):
            data.append({"line": cfg.line, "values": dict(zip(names, cfg.values))})
        else:
            state, values = cfg
            data.append({"state": state, "values": dict(zip(names, values))})
    _write(path, json.dumps(data, indent=2))


def _valuation_line(valuation: Mapping[str, int]) -> str:
    return ",".join(f"{c}={v}" for c, v in sorted(valuation.items()))


def _codec_for(ca_text: str, sigma_flag: str | None) -> tm.WordCodec:
    if sigma_flag:
        return tm.WordCodec(_names(sigma_flag))
    data = json.loads(ca_text)
    if isinstance(data, dict) and "sigma" in data:
        return tm.WordCodec(tuple(data["sigma"]))
    raise ProgramError("alphabet unknown: pass --sigma (no sigma annotation in the JSON)")


def _graph_name(text: str | None, fallback: str) -> str:
    if text is None:
        return fallback
    if not text.replace("_", "a").isalnum() or text[0].isdigit():
        raise ProgramError(f"graph name {text!r} is not a dot identifier")
    return text


def _ca_dot(a: tm.CounterAutomaton, name: str) -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle, fontname=monospace];"]
    for q in a.states:
        shape = "doublecircle" if q == a.final else "circle"
        lines.append(f'  "{q}" [shape={shape}];')
    lines.append(f'  start [shape=point]; start -> "{a.initial}";')
    for t in a.transitions:
        if t.test is not None:
            label = f"zeta {t.test}"
        else:
            parts = [f"c{i}{c:+d}" for i, c in enumerate(t.delta, start=1) if c]
            label = ", ".join(parts) if parts else "0"
        lines.append(f'  "{t.source}" -> "{t.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Subcommand handlers.


def _cmd_compile(args) -> int:
    compiled = _compile_formula(_read(args.formula), _names(args.free))
    text = render_program(compiled.component.program)
    manifest = json.dumps(compiled.manifest(), indent=2)
    if args.out:
        _write(args.out, text)
    if args.manifest:
        _write(args.manifest, manifest)
    if args.json:
        print(json.dumps(compiled.manifest()))
    elif args.out is None:
        sys.stdout.write(text)
    else:
        print(
            f"compiled: K={compiled.k} M={compiled.m} budget {compiled.budget.render()}; "
            f"{len(compiled.component.program.lines)} lines, "
            f"{len(compiled.component.program.counters)} counters"
        )
    return REACHED


def _cmd_eval(args) -> int:
    values = _assignment(args.free)
    formula = fo.parse_formula(_read(args.formula), free=tuple(values))
    value = fo.eval_oracle(formula, args.n, values)
    print(json.dumps({"value": value}) if args.json else ("true" if value else "false"))
    return REACHED if value else UNREACHED


def _cmd_init_config(args) -> int:
    values = _assignment(args.free)
    if args.formula is not None:
        compiled = _compile_formula(_read(args.formula), tuple(values))
        entry = fo.initial_configuration(compiled, args.n, values)
        valuation = dict(zip(compiled.component.program.counters, entry.values))
    elif args.manifest is not None:
        valuation = _manifest_valuation(_load_manifest(_read(args.manifest)), args.n, values)
    else:
        raise ProgramError("pass --formula or --manifest")
    if args.json:
        print(json.dumps({"n": args.n, "valuation": valuation}))
    else:
        print(_valuation_line(valuation))
    return REACHED


def _sibling_manifest(program_path: str) -> str:
    if program_path == "-":
        raise ProgramError("reading the program from stdin needs --manifest")
    return os.path.splitext(program_path)[0] + ".json"


def _cmd_reach(args) -> int:
    if (args.init is None) == (args.n is None):
        raise ProgramError("pass exactly one of --init or --n")
    max_states = _setting(args, "max-states", _count, 5_000_000)
    mem_cap = _mem_states()
    if mem_cap is not None:
        max_states = min(max_states, mem_cap)
    max_depth = _setting(args, "max-depth", _count)
    max_seconds = _setting(args, "max-seconds", _seconds)
    value_cap = _setting(args, "value-cap", _count)

    text = _read(args.program) if args.program else None
    system = None
    if text is not None:
        system = vass_from_json(text) if text.lstrip().startswith("{") else parse_program(text)

    if args.init is not None:
        if system is None:
            raise ProgramError("searching from --init needs a program or VASS file")
        limits = SearchLimits(max_states, max_depth, max_seconds, value_cap)
        result = zero_reach(system, _assignment(args.init), limits)
    else:
        values = _assignment(args.free)
        if args.guarded:
            # The hardening transforms need the compiler's line tags, which
            # the DSL does not carry, so this mode re-derives the program.
            if args.formula is None:
                raise ProgramError("--guarded needs --formula (the DSL file has no tags)")
            if text is not None and text.lstrip().startswith("{"):
                raise ProgramError("--guarded cross-checks a program file, not a VASS")
            compiled = _compile_formula(_read(args.formula), tuple(values))
            if text is not None and render_program(compiled.component.program) != text:
                raise ProgramError("program file does not match the formula's compiled output")
            result = fo.guarded_zero_reach(
                compiled, args.n, values, max_states=max_states, max_seconds=max_seconds
            )
            system = drain_checked(spend_guarded(compiled.component.program, args.n))
        elif system is None and args.formula is not None:
            compiled = _compile_formula(_read(args.formula), tuple(values))
            system = compiled.component.program
            entry = fo.initial_configuration(compiled, args.n, values)
            valuation = dict(zip(system.counters, entry.values))
            limits = SearchLimits(max_states, max_depth, max_seconds, value_cap)
            result = zero_reach(system, valuation, limits)
        elif system is not None:
            manifest_path = args.manifest or _sibling_manifest(args.program)
            manifest = _load_manifest(_read(manifest_path))
            valuation = _manifest_valuation(manifest, args.n, values)
            limits = SearchLimits(max_states, max_depth, max_seconds, value_cap)
            result = zero_reach(system, valuation, limits)
        else:
            raise ProgramError("pass a program file or --formula")

    code = _report_search(result, args.json)
    if args.emit_run is not None and isinstance(result, Reachable):
        _emit_run(args.emit_run, system, result.run)
    return code


def _cmd_witness(args) -> int:
    values = _assignment(args.free)
    compiled = _compile_formula(_read(args.formula), tuple(values))
    max_steps = _setting(args, "max-steps", _count, 50_000_000)
    run = fo.witness_run(compiled, args.n, values, max_steps)
    if run is None:
        print(json.dumps({"witness": False}) if args.json else "no witness: the formula is false")
        return UNREACHED
    pays = compiled.component.pay_lines()
    entries = sum(1 for cfg in run if cfg.line in pays)
    if args.out:
        _emit_run(args.out, compiled.component.program, run)
    if args.json:
        print(json.dumps({"witness": True, "length": len(run), "zero_test_entries": entries}))
    else:
        print(f"witness run: {len(run)} configurations, {entries} zero-test entries")
    return REACHED


_GADGETS = {
    "zero-test": (zero_test_gadget, ("v",)),
    "copy": (copy_gadget, ("src", "dst")),
    "add": (addition_gadget, ("x", "y", "z")),
    "not-add": (not_addition_gadget, ("x", "y", "z")),
    "mul": (multiplication_gadget, ("x", "y", "z")),
    "not-mul": (not_multiplication_gadget, ("x", "y", "z")),
}


def _cmd_gadget(args) -> int:
    make, default_names = _GADGETS[args.name]
    names = _names(args.args) or default_names
    if len(names) != len(default_names):
        raise ProgramError(f"{args.name} takes {len(default_names)} counter names")
    component = make(*names)
    init = None
    if args.n is not None:
        # Runnable form: burn-and-drain harness plus a provisioned entry,
        # so zero-reach from the emitted valuation decides the property.
        component = drained(component)
        entry = provision(component, args.n, _assignment(args.values))
        init = dict(zip(component.program.counters, entry.values))
    text = render_program(component.program)
    if init is not None:
        text += f"# init: {_valuation_line(init)}\n"
    manifest = {
        "name": args.name,
        "budget_poly": component.budget.render(),
        "counters": list(component.program.counters),
    }
    if args.manifest:
        _write(args.manifest, json.dumps(manifest, indent=2))
    if args.json:
        payload = dict(manifest)
        payload["dsl"] = text
        if init is not None:
            payload["n"] = args.n
            payload["init"] = init
        print(json.dumps(payload))
    else:
        _write(args.out, text)
    return REACHED


def _cmd_tm_run(args) -> int:
    machine = tm.tm_from_json(_read(args.machine))
    space_bound = _setting(args, "space-bound", _count, 1_000_000)
    fuel = _setting(args, "fuel", _count, 1_000_000)
    return _report_verdict(tm.tm_run(machine, args.input, space_bound, fuel), args.json)


def _cmd_tm_compile(args) -> int:
    machine = tm.tm_from_json(_read(args.machine))
    data = json.loads(tm.ca_to_json(tm.tm_to_ca(machine)))
    data["sigma"] = list(machine.sigma)  # lets ca-run encode input words
    _write(args.out, json.dumps(data, indent=2))
    return REACHED


def _cmd_ca_run(args) -> int:
    text = _read(args.automaton)
    automaton = tm.ca_from_json(text)
    fuel = _setting(args, "fuel", _count, 1_000_000)
    if args.vector is not None:
        vector = tuple(int(p) for p in args.vector.replace(",", " ").split())
    elif args.input is not None:
        vector = tm.initial_vector(args.input, _codec_for(text, args.sigma))
    else:
        raise ProgramError("pass --input WORD or --vector v1,v2,...")
    return _report_verdict(tm.ca_run(automaton, vector, fuel), args.json)


def _cmd_ca_to_vass(args) -> int:
    text = _read(args.automaton)
    automaton = tm.ca_from_json(text)
    reduction = tm.ca_to_vass(automaton, args.value_bound, args.test_budget)
    dsl = render_program(reduction.program)
    init = None
    if args.init_for is not None:
        vector = tm.initial_vector(args.init_for, _codec_for(text, args.sigma))
        init = reduction.initial_valuation(vector)
    elif args.init_vector is not None:
        vector = tuple(int(p) for p in args.init_vector.replace(",", " ").split())
        init = reduction.initial_valuation(vector)
    if args.json:
        payload = {
            "value_bound": reduction.value_bound,
            "test_budget": reduction.test_budget,
            "counters": list(reduction.program.counters),
            "dsl": dsl,
        }
        if init is not None:
            payload["init"] = init
        print(json.dumps(payload))
        if args.out:
            _write(args.out, dsl)
        return REACHED
    if init is not None and args.out is None:
        raise ProgramError("--init-for/--init-vector need --out (the valuation goes to stdout)")
    _write(args.out, dsl)
    if init is not None:
        print(_valuation_line(init))
    return REACHED


def _cmd_to_vass(args) -> int:
    program = parse_program(_read(args.program))
    _write(args.out, vass_to_json(program_to_vass(program)))
    return REACHED


def _cmd_dot(args) -> int:
    text = _read(args.input)
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if isinstance(data, dict) and "counters" in data:
            out = vass_to_dot(vass_from_json(text), _graph_name(args.name, "vass"))
        elif isinstance(data, dict) and "states" in data:
            out = _ca_dot(tm.ca_from_json(text), _graph_name(args.name, "automaton"))
        else:
            raise ProgramError("unrecognized JSON: expected a VASS or a counter automaton")
    else:
        out = program_to_dot(parse_program(text), _graph_name(args.name, "program"))
    _write(args.out, out)
    return REACHED


# --------------------------------------------------------------------------
# Parser.


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--config", metavar="PATH", help="key=value file supplying flag defaults"
    )

    parser = _ArgumentParser(
        prog="vass-forge",
        description="Counter programs, zero-test gadgets, formula compilation, "
        "Turing-machine pipelines and bounded reachability.",
        epilog="Environment: VASS_FORGE_MAX_MEM caps visited-set memory "
        "(bytes; k/m/g suffixes).",
    )
    sub = parser.add_subparsers(
        dest="command", required=True, metavar="COMMAND", parser_class=_ArgumentParser
    )

    p = sub.add_parser(
        "compile", parents=[common], help="compile a formula to a program + manifest"
    )
    p.add_argument("--formula", required=True, metavar="PATH", help="formula file, - for stdin")
    p.add_argument("--free", metavar="NAMES", help="free variables, e.g. x,y")
    p.add_argument("--out", metavar="PATH", help="program file (default stdout)")
    p.add_argument("--manifest", metavar="PATH", help="write the manifest JSON here")
    p.set_defaults(handler=_cmd_compile)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula by brute force")
    p.add_argument("--formula", required=True, metavar="PATH")
    p.add_argument("--n", required=True, type=int, metavar="N", help="segment bound")
    p.add_argument("--free", metavar="ASSIGN", help="free-variable values, e.g. x=2,y=0")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser(
        "init-config", parents=[common], help="initial valuation for (N, assignment)"
    )
    p.add_argument("--formula", metavar="PATH", help="compile and use its reduction map")
    p.add_argument("--manifest", metavar="PATH", help="or evaluate this manifest's map")
    p.add_argument("--n", required=True, type=int, metavar="N")
    p.add_argument("--free", metavar="ASSIGN")
    p.set_defaults(handler=_cmd_init_config)

    p = sub.add_parser(
        "reach", parents=[common], help="decide zero-reachability of a program or VASS"
    )
    p.add_argument("program", nargs="?", metavar="FILE", help="program DSL or VASS JSON")
    p.add_argument("--init", metavar="ASSIGN", help="raw initial valuation, e.g. x=2,u1=4")
    p.add_argument("--n", type=int, metavar="N", help="segment bound (manifest mode)")
    p.add_argument("--free", metavar="ASSIGN", help="free-variable values for --n")
    p.add_argument("--manifest", metavar="PATH", help="default: program file with .json")
    p.add_argument("--formula", metavar="PATH", help="recompile instead of reading files")
    p.add_argument(
        "--guarded",
        action="store_true",
        help="search the hardened reachability-equivalent program (needs --formula)",
    )
    p.add_argument("--max-states", type=_count, metavar="M", help="default 5e6")
    p.add_argument("--max-depth", type=_count, metavar="D")
    p.add_argument("--max-seconds", type=_seconds, metavar="S")
    p.add_argument("--value-cap", type=_count, metavar="C", help="explicit counter cap")
    p.add_argument(
        "--threads",
        type=_count,
        metavar="K",
        help="worker hint; the search is deterministic, results do not depend on it",
    )
    p.add_argument("--emit-run", metavar="PATH", help="write a Reachable certificate as JSON")
    p.set_defaults(handler=_cmd_reach)

    p = sub.add_parser(
        "witness", parents=[common], help="synthesize a validated zero-terminating run"
    )
    p.add_argument("--formula", required=True, metavar="PATH")
    p.add_argument("--n", required=True, type=int, metavar="N")
    p.add_argument("--free", metavar="ASSIGN")
    p.add_argument("--max-steps", type=_count, metavar="M", help="default 5e7")
    p.add_argument("--out", metavar="PATH", help="write the run as JSON")
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("gadget", parents=[common], help="emit a gadget program + manifest")
    p.add_argument("name", choices=sorted(_GADGETS), metavar="NAME",
                   help=", ".join(sorted(_GADGETS)))
    p.add_argument("--args", metavar="NAMES", help="counter names (defaults per gadget)")
    p.add_argument("--n", type=int, metavar="N",
                   help="emit the runnable drained harness provisioned for N")
    p.add_argument("--values", metavar="ASSIGN", help="entry values with --n, e.g. x=1,y=2")
    p.add_argument("--out", metavar="PATH", help="program file (default stdout)")
    p.add_argument("--manifest", metavar="PATH", help="write {name, budget_poly, counters}")
    p.set_defaults(handler=_cmd_gadget)

    p = sub.add_parser("tm-run", parents=[common], help="run a Turing machine on a word")
    p.add_argument("machine", metavar="FILE", help="machine JSON, - for stdin")
    p.add_argument("--input", required=True, metavar="WORD")
    p.add_argument("--space-bound", type=_count, metavar="S", help="default 1e6 cells")
    p.add_argument("--fuel", type=_count, metavar="F", help="default 1e6 steps")
    p.set_defaults(handler=_cmd_tm_run)

    p = sub.add_parser(
        "tm-compile", parents=[common], help="compile a machine to a 3-counter automaton"
    )
    p.add_argument("machine", metavar="FILE", help="machine JSON, - for stdin")
    p.add_argument("--out", metavar="PATH", help="automaton JSON (default stdout)")
    p.set_defaults(handler=_cmd_tm_compile)

    p = sub.add_parser("ca-run", parents=[common], help="run a counter automaton")
    p.add_argument("automaton", nargs="?", default="-", metavar="FILE",
                   help="automaton JSON (default stdin)")
    p.add_argument("--input", metavar="WORD", help="word to encode into counter 1")
    p.add_argument("--vector", metavar="V", help="raw initial vector, e.g. 7,0,0")
    p.add_argument("--sigma", metavar="SYMS", help="alphabet when the JSON lacks one")
    p.add_argument("--fuel", type=_count, metavar="F", help="default 1e6 steps")
    p.set_defaults(handler=_cmd_ca_run)

    p = sub.add_parser(
        "ca-to-vass", parents=[common],
        help="reduce an automaton to a zero-test-free program",
    )
    p.add_argument("automaton", nargs="?", default="-", metavar="FILE")
    p.add_argument("--value-bound", required=True, type=int, metavar="N")
    p.add_argument("--test-budget", required=True, type=int, metavar="T")
    p.add_argument("--out", metavar="PATH", help="program file")
    p.add_argument("--init-for", metavar="WORD", help="print the valuation for this word")
    p.add_argument("--init-vector", metavar="V", help="or for this raw vector")
    p.add_argument("--sigma", metavar="SYMS", help="alphabet when the JSON lacks one")
    p.set_defaults(handler=_cmd_ca_to_vass)

    p = sub.add_parser(
        "to-vass", parents=[common], help="export a zero-test-free program as VASS JSON"
    )
    p.add_argument("program", metavar="FILE", help="program DSL, - for stdin")
    p.add_argument("--out", metavar="PATH", help="default stdout")
    p.set_defaults(handler=_cmd_to_vass)

    p = sub.add_parser("dot", parents=[common], help="Graphviz text for a program/VASS/CA")
    p.add_argument("input", metavar="FILE", help="program DSL or JSON, - for stdin")
    p.add_argument("--name", metavar="ID", help="digraph name")
    p.add_argument("--out", metavar="PATH", help="default stdout")
    p.set_defaults(handler=_cmd_dot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.config_table = _config_map(args.config)
        return args.handler(args)
    except (ProgramError, ParseError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    raise SystemExit(main())
