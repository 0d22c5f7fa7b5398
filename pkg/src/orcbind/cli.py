"""Command-line front end and the JSON file formats.

Exit codes are a stable contract: 0 for success or a positive verdict, 1 for
a negative verdict or no answer, 2 for unparsable input.  Verdicts produced
by bounded oracles are printed with an explicit ``bounded`` qualifier.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arn, ltl, pexpr
from .engine import Answer, Clause, Query, Repository, solve, solve_scripted
from .muller import (
    AllNonempty,
    Explicit,
    FinalFamily,
    GenBuchi,
    ImpliesFamily,
    MullerAutomaton,
    ProductFamily,
)
from .sigcat import ActionSignature


class InputError(ValueError):
    """Unparsable or structurally broken input files; mapped to exit code 2."""


# ---------------------------------------------------------------------------
# Automaton JSON


def _state_to_json(q):
    if isinstance(q, tuple):
        return [_state_to_json(x) for x in q]
    return q


def _state_from_json(q):
    if isinstance(q, list):
        return tuple(_state_from_json(x) for x in q)
    return q


def family_to_json(f: FinalFamily):
    if isinstance(f, AllNonempty):
        return "all-nonempty"
    if isinstance(f, ImpliesFamily):
        return f"implies({f.trigger}->{f.required})"
    if isinstance(f, Explicit):
        return sorted(
            (sorted(map(_state_to_json, s), key=repr) for s in f.sets), key=repr
        )
    if isinstance(f, GenBuchi):
        return {"gen-buchi": [sorted(map(_state_to_json, s), key=repr) for s in f.sets]}
    if isinstance(f, ProductFamily):
        return {"product": [[i, family_to_json(sub)] for i, sub in f.parts]}
    raise InputError(f"unserializable final family {f!r}")


def family_from_json(data) -> FinalFamily:
    if data == "all-nonempty":
        return AllNonempty()
    if isinstance(data, str) and data.startswith("implies(") and data.endswith(")"):
        body = data[len("implies(") : -1]
        if "->" not in body:
            raise InputError(f"malformed implies family: {data!r}")
        trigger, required = body.split("->", 1)
        return ImpliesFamily(trigger.strip(), required.strip())
    if isinstance(data, list):
        return Explicit(frozenset(frozenset(map(_state_from_json, s)) for s in data))
    if isinstance(data, dict) and "gen-buchi" in data:
        return GenBuchi(tuple(frozenset(map(_state_from_json, s)) for s in data["gen-buchi"]))
    if isinstance(data, dict) and "product" in data:
        return ProductFamily(tuple((i, family_from_json(sub)) for i, sub in data["product"]))
    raise InputError(f"unrecognized final family: {data!r}")


def automaton_to_json(a: MullerAutomaton):
    return {
        "actions": sorted(a.signature.actions),
        "states": sorted(map(_state_to_json, a.states), key=repr),
        "initial": sorted(map(_state_to_json, a.initial), key=repr),
        "transitions": [
            [_state_to_json(src), ltl.render_guard(g), _state_to_json(dst)]
            for src, g, dst in a.transitions
        ],
        "final": family_to_json(a.final),
    }


def automaton_from_json(data, signature: ActionSignature | None = None) -> MullerAutomaton:
    try:
        sig = (
            signature
            if signature is not None
            else ActionSignature(frozenset(data["actions"]))
        )
        states = frozenset(map(_state_from_json, data["states"]))
        initial = frozenset(map(_state_from_json, data["initial"]))
        transitions = tuple(
            (_state_from_json(src), ltl.parse_guard(g), _state_from_json(dst))
            for src, g, dst in data["transitions"]
        )
        final = family_from_json(data["final"])
        return MullerAutomaton(sig, states, transitions, initial, final)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad automaton: {e}") from e


# ---------------------------------------------------------------------------
# Network JSON


def port_to_json(p: arn.Port):
    return {"published": sorted(p.published), "delivered": sorted(p.delivered)}


def port_from_json(data) -> arn.Port:
    return arn.Port(frozenset(data.get("published", ())), frozenset(data.get("delivered", ())))


def network_to_json(n: arn.Arn):
    return {
        "points": {x: port_to_json(p) for x, p in n.ports},
        "processes": {
            name: {"points": sorted(proc.points), "automaton": automaton_to_json(proc.automaton)}
            for name, proc in n.processes
        },
        "connections": {
            name: {
                "points": sorted(n.incidence_of[name]),
                "messages": sorted(conn.messages),
                "automaton": automaton_to_json(conn.automaton),
                "attachments": {x: dict(mu) for x, mu in conn.attachments},
            }
            for name, conn in n.connections
        },
    }


def network_from_json(data) -> arn.Arn:
    try:
        ports = {x: port_from_json(p) for x, p in data.get("points", {}).items()}
        processes = {}
        incidence = {}
        for name, pd in data.get("processes", {}).items():
            points = list(pd["points"])
            proc_ports = {x: ports[x] for x in points if x in ports}
            automaton = automaton_from_json(pd["automaton"])
            processes[name] = arn.Process.make(proc_ports, automaton)
            incidence[name] = frozenset(points)
        connections = {}
        for name, cd in data.get("connections", {}).items():
            messages = frozenset(cd["messages"])
            if cd.get("automaton") == "immediate-delivery":
                from .travel import channel_automaton

                automaton = channel_automaton(messages)
            else:
                automaton = automaton_from_json(cd["automaton"])
            connections[name] = arn.Connection.make(
                messages, automaton, {x: dict(mu) for x, mu in cd.get("attachments", {}).items()}
            )
            incidence[name] = frozenset(cd["points"])
        return arn.Arn.make(ports, processes, connections, incidence)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"bad network: {e}") from e


def spec_from_json(data) -> arn.ArnSpec:
    try:
        return arn.ArnSpec(data["point"], ltl.parse_formula(data["formula"]))
    except (KeyError, TypeError, ltl.FormulaSyntaxError) as e:
        raise InputError(f"bad spec: {e}") from e


def spec_to_json(s: arn.ArnSpec):
    return {"point": s.point, "formula": ltl.render_formula(s.formula)}


# ---------------------------------------------------------------------------
# Repository / query / script files


def _load_json(path: Path):
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as e:
        raise InputError(f"no such file: {path}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: {e}") from e


def _network_ref(data, base: Path) -> arn.Arn:
    if "network" in data:
        return network_from_json(_load_json(base / data["network"]))
    if "network_inline" in data:
        return network_from_json(data["network_inline"])
    raise InputError("missing network / network_inline")


def load_network(path: Path) -> arn.Arn:
    return network_from_json(_load_json(path))


def load_repository(path: Path) -> Repository:
    data = _load_json(path)
    if data.get("scheme", "arn") != "arn":
        raise InputError("only arn-scheme repositories are file-loadable")
    base = path.parent
    clauses = []
    for cd in data.get("clauses", ()):
        try:
            clauses.append(
                Clause(
                    cd["name"],
                    _network_ref(cd, base),
                    spec_from_json(cd["provides"]),
                    tuple(spec_from_json(r) for r in cd.get("requires", ())),
                    hints=tuple(cd.get("hints", ())),
                )
            )
        except KeyError as e:
            raise InputError(f"clause missing field: {e}") from e
    try:
        return Repository(tuple(clauses))
    except ValueError as e:
        raise InputError(str(e)) from e


def load_query(path: Path) -> Query:
    data = _load_json(path)
    if data.get("scheme", "arn") != "arn":
        raise InputError("only arn-scheme queries are file-loadable")
    net = _network_ref(data, path.parent)
    return Query(net, tuple(spec_from_json(s) for s in data.get("requires", ())))


def parse_bounds(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    except ValueError as e:
        raise InputError(f"bad bounds {text!r}, expected LO..HI") from e


def load_pexpr_script(path: Path):
    data = _load_json(path)
    if data.get("scheme") != "pexpr":
        raise InputError("derivation scripts must declare scheme: pexpr")
    variables = tuple(data.get("variables", ()))
    try:
        term = pexpr.parse_program(data["term"], variables)
        requires = tuple(
            pexpr.PSpec(
                tuple(s.get("at", ())),
                pexpr.parse_condition(s["pre"]),
                pexpr.parse_condition(s["post"]),
            )
            for s in data["requires"]
        )
        steps = list(data["steps"])
    except (KeyError, pexpr.ProgramSyntaxError) as e:
        raise InputError(f"bad derivation script: {e}") from e
    return term, requires, steps, data


def pexpr_clause_for_step(step, variables):
    try:
        kind = step["module"]
        spec_index = int(step.get("spec", 0))
        params = {}
        if kind == "skip":
            params["pre"] = pexpr.parse_condition(step["pre"])
        elif kind == "assign":
            params["target"] = step["target"]
            params["expr"] = pexpr.parse_aexp(step["expr"])
            params["shape"] = pexpr.parse_condition(step["shape"])
            params["hole"] = step.get("hole", "v")
        elif kind == "seq":
            params["pre"] = pexpr.parse_condition(step["pre"])
            params["mid"] = pexpr.parse_condition(step["mid"])
            params["post"] = pexpr.parse_condition(step["post"])
        elif kind == "if":
            params["cond"] = pexpr.parse_condition(step["cond"])
            params["pre"] = pexpr.parse_condition(step["pre"])
            params["post"] = pexpr.parse_condition(step["post"])
        elif kind == "while":
            params["cond"] = pexpr.parse_condition(step["cond"])
            params["invariant"] = pexpr.parse_condition(step["invariant"])
        else:
            raise InputError(f"unknown module kind {kind!r}")
        return pexpr.hoare_module(kind, params), spec_index
    except (KeyError, pexpr.ProgramSyntaxError) as e:
        raise InputError(f"bad step {step!r}: {e}") from e


# ---------------------------------------------------------------------------
# Trace rendering


def render_step(scheme, index: int, step) -> str:
    clause_line = f"{step.clause_name}"
    left = f"<{scheme.render_orc(step.unifier.theta1.source)} | {scheme.render_spec(step.selected)}>"
    right = f"[{clause_line}]"
    top = f"{left}   x   {right}"
    morphism = f"theta1 = {scheme.render_morphism(step.unifier.theta1)}"
    bar = "-" * max(len(top), 24)
    derived = ", ".join(scheme.render_spec(s) for s in step.derived.requires) or "(empty)"
    bottom = f"<{scheme.render_orc(step.derived.orc)} | {derived}>"
    return f"step {index}:\n  {top}\n  {bar} {morphism}\n  {bottom}"


def render_answer(scheme, answer: Answer) -> str:
    lines = [render_step(scheme, i, s) for i, s in enumerate(answer.steps, start=1)]
    lines.append(f"computed answer: {scheme.render_morphism(answer.composed)}")
    lines.append(f"final orchestration: {scheme.render_orc(answer.final)}")
    return "\n".join(lines)


def trace_to_json(scheme, answers, partial=None):
    out = {"answers": []}
    for a in answers:
        out["answers"].append(
            {
                "steps": [
                    {
                        "clause": s.clause_name,
                        "selected": scheme.render_spec(s.selected),
                        "morphism": scheme.render_morphism(s.unifier.theta1),
                        "derived_requires": [scheme.render_spec(r) for r in s.derived.requires],
                    }
                    for s in a.steps
                ],
                "computed": scheme.render_morphism(a.composed),
                "final": scheme.render_orc(a.final),
            }
        )
    if partial is not None:
        out["unresolved"] = [scheme.render_spec(s) for s in partial]
    return out


# ---------------------------------------------------------------------------
# Commands


def cmd_arn(args) -> int:
    net = load_network(Path(args.network))
    if args.subcommand == "validate":
        issues = arn.validate(net)
        if issues:
            for issue in issues:
                print(issue)
            return 1
        print("OK")
        return 0
    # check NET POINT FORMULA
    try:
        formula = ltl.parse_formula(args.formula)
    except ltl.FormulaSyntaxError as e:
        raise InputError(str(e)) from e
    issues = arn.validate(net)
    if issues:
        raise InputError("network is not well-formed: " + "; ".join(issues))
    if args.point not in net.points:
        raise InputError(f"no such point: {args.point}")
    spec = arn.ArnSpec(args.point, formula)
    observed = arn.observed_automaton(net, args.point)
    if ltl.holds(observed, formula):
        print(f"holds: {spec.render()}")
        return 0
    witness = ltl.counterexample(observed, formula)
    print(f"fails: {spec.render()}")
    if witness is not None:
        print(f"counterexample trace: {ltl.render_lasso(witness)}")
    return 1


def cmd_ltl(args) -> int:
    try:
        f1 = ltl.parse_formula(args.formula)
        f2 = ltl.parse_formula(args.formula2) if args.subcommand == "entails" else None
    except ltl.FormulaSyntaxError as e:
        raise InputError(str(e)) from e
    if args.subcommand == "sat":
        witness = ltl.satisfiable(f1)
        if witness is None:
            print("unsatisfiable")
            return 1
        print(f"satisfiable: {ltl.render_lasso(witness)}")
        return 0
    sig = ActionSignature(ltl.atoms_of(f1) | ltl.atoms_of(f2))
    if ltl.entails(f1, f2, sig):
        print("yes")
        return 0
    witness = ltl.satisfiable(ltl.land(f1, ltl.lnot(f2)), sig)
    print("no")
    if witness is not None:
        print(f"counterexample trace: {ltl.render_lasso(witness)}")
    return 1


def cmd_solve(args) -> int:
    scheme = arn.ArnScheme()
    query = load_query(Path(args.query))
    repository = load_repository(Path(args.repository))
    issues = arn.validate(query.orc)
    if issues:
        raise InputError("query network is not well-formed: " + "; ".join(issues))
    for clause in repository.clauses:
        issues = arn.validate(clause.orc)
        if issues:
            raise InputError(f"clause {clause.name!r} network is not well-formed: " + "; ".join(issues))

    if args.script:
        data = _load_json(Path(args.script))
        steps = data.get("steps", [])

        def clause_for_step(step, q):
            c = repository.clause(step["clause"])
            hint = {"correspondence": step["correspondence"]} if "correspondence" in step else None
            return c, int(step.get("spec", 0)), hint

        try:
            answer, _ = solve_scripted(scheme, query, steps, clause_for_step)
            answers = [answer]
            partial = None
        except ValueError as e:
            print(str(e))
            return 1
    else:
        answers, partial = solve(
            scheme,
            query,
            repository,
            max_depth=args.max_depth,
            max_answers=args.max_answers,
            return_partial=True,
        )

    for i, a in enumerate(answers, start=1):
        print(f"=== answer {i} ===")
        print(render_answer(scheme, a))
    unresolved = None
    if not answers and partial is not None:
        steps, stuck = partial
        print("=== partial derivation (no answer) ===")
        for i, s in enumerate(steps, start=1):
            print(render_step(scheme, i, s))
        unresolved = [s for s in stuck.requires if not scheme.is_trivial(stuck.orc, s)]
        for s in unresolved:
            print(f"unresolved: {scheme.render_spec(s)}")
    if args.output:
        Path(args.output).write_text(
            json.dumps(trace_to_json(scheme, answers, partial=unresolved), indent=2) + "\n"
        )
    if not answers:
        print("no answer within limits")
        return 1
    return 0


def cmd_pexpr(args) -> int:
    bounds_range = parse_bounds(args.bounds)
    if args.subcommand == "derive":
        term, requires, steps, data = load_pexpr_script(Path(args.script))
        if "bounds" in data:
            bounds_range = parse_bounds(data["bounds"])
        scheme = pexpr.PexprScheme(bounds=_DefaultBounds(bounds_range), fuel=args.fuel)
        query = Query(term, requires)

        def clause_for_step(step, q):
            clause, spec_index = pexpr_clause_for_step(step, data.get("variables", ()))
            return clause, spec_index, None

        try:
            answer, final_query = solve_scripted(scheme, query, steps, clause_for_step)
        except ValueError as e:
            print(str(e))
            return 1
        print(render_answer(scheme, answer))
        print(f"final program: {pexpr.render_program(answer.final)}")
        lo, hi = bounds_range
        print(f"(refinements validated with the bounded oracle over {lo}..{hi})")
        if args.output:
            Path(args.output).write_text(
                json.dumps(trace_to_json(scheme, [answer]), indent=2) + "\n"
            )
        return 0

    # check PROGRAM SPEC
    try:
        program_text = Path(args.program).read_text()
    except FileNotFoundError as e:
        raise InputError(str(e)) from e
    try:
        term = pexpr.parse_program(program_text.strip())
        pre_text, post_text = _split_spec_pair(args.spec)
        spec = pexpr.PSpec(
            (), pexpr.parse_condition(pre_text), pexpr.parse_condition(post_text)
        )
    except pexpr.ProgramSyntaxError as e:
        raise InputError(str(e)) from e
    verdict = pexpr.check_ground_property(
        term, spec, _DefaultBounds(bounds_range), fuel=args.fuel
    )
    if isinstance(verdict, pexpr.Holds):
        print(f"holds (bounded: {args.bounds}, {verdict.states_checked} pre-states)")
        return 0
    if isinstance(verdict, pexpr.Fails):
        state = ", ".join(f"{k}={v}" for k, v in sorted(verdict.state.items()))
        print(f"fails (witness state: {state})")
        return 1
    print(f"inconclusive (bounded: {args.bounds}; {verdict.out_of_fuel_states} runs out of fuel)")
    return 1


class _DefaultBounds(dict):
    """Bounds mapping with a uniform default range for unlisted identifiers."""

    def __init__(self, default):
        super().__init__()
        self.default = tuple(default)

    def get(self, key, default=None):
        return super().get(key, self.default)

    def __missing__(self, key):
        return self.default


def _split_spec_pair(text: str):
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise InputError("spec must look like (PRE, POST)")
    depth = 0
    body = text[1:-1]
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i].strip(), body[i + 1 :].strip()
    raise InputError("spec must contain a top-level comma: (PRE, POST)")


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orcbind")
    sub = parser.add_subparsers(dest="command", required=True)

    p_arn = sub.add_parser("arn", help="validate networks, check point properties")
    arn_sub = p_arn.add_subparsers(dest="subcommand", required=True)
    v = arn_sub.add_parser("validate")
    v.add_argument("network")
    c = arn_sub.add_parser("check")
    c.add_argument("network")
    c.add_argument("point")
    c.add_argument("formula")

    p_ltl = sub.add_parser("ltl", help="satisfiability and entailment of formulas")
    ltl_sub = p_ltl.add_subparsers(dest="subcommand", required=True)
    s = ltl_sub.add_parser("sat")
    s.add_argument("formula")
    e = ltl_sub.add_parser("entails")
    e.add_argument("formula")
    e.add_argument("formula2")

    p_solve = sub.add_parser("solve", help="resolve a query against a repository")
    p_solve.add_argument("query")
    p_solve.add_argument("repository")
    p_solve.add_argument("--script", default=None, help="scripted derivation steps (JSON)")
    p_solve.add_argument("--max-depth", type=int, default=8)
    p_solve.add_argument("--max-answers", type=int, default=10)
    p_solve.add_argument("--output", default=None, help="write machine-readable trace JSON")

    p_pex = sub.add_parser("pexpr", help="program derivation and bounded checking")
    pex_sub = p_pex.add_subparsers(dest="subcommand", required=True)
    d = pex_sub.add_parser("derive")
    d.add_argument("script")
    d.add_argument("--bounds", default="0..8")
    d.add_argument("--fuel", type=int, default=10000)
    d.add_argument("--output", default=None)
    k = pex_sub.add_parser("check")
    k.add_argument("program")
    k.add_argument("spec")
    k.add_argument("--bounds", default="0..8")
    k.add_argument("--fuel", type=int, default=10000)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "arn":
            return cmd_arn(args)
        if args.command == "ltl":
            return cmd_ltl(args)
        if args.command == "solve":
            return cmd_solve(args)
        if args.command == "pexpr":
            return cmd_pexpr(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
