"""Command-line interface: adjoint-kit <validate|query|prove|tables|run>.

Exit codes: 0 all verdicts pass, 1 query failure or unproved goal,
2 axiom violation (including model build failures), 3 parse or resolution
error, 4 internal invariant breach (a proved goal that fails semantically).
Exit codes are a function of the verdicts alone; --json switches the
rendering, never the outcome.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .errors import AdjointKitError, InternalError, ParseError, ResolutionError
from . import derivation, maps, quantale as quantale_mod
from .epistemic import check_coclosure_consequences
from .derivation import NotProved, render_proof
from .scenario import Instantiated, instantiate, parse_scenario
from .semantics import entails, eval_term
from .terms import Sequent, render_term

SCHEMA_VERSION = 1


@dataclass
class Verdict:
    id: str
    kind: str
    ok: bool
    detail: str
    semantic: bool | None = None
    proof: dict | None = None
    element: str | None = None

    def as_dict(self):
        out = {"id": self.id, "kind": self.kind, "ok": self.ok, "detail": self.detail}
        if self.semantic is not None:
            out["semantic"] = self.semantic
        if self.proof is not None:
            out["proof"] = self.proof
        if self.element is not None:
            out["element"] = self.element
        return out


@dataclass
class AxiomCheck:
    name: str
    ok: bool | None            # None: informational hypothesis report
    detail: str = ""
    mandatory: bool = True

    def as_dict(self):
        return {
            "name": self.name,
            "ok": self.ok,
            "detail": self.detail,
            "mandatory": self.mandatory,
        }


@dataclass
class RunReport:
    scenario: str
    verdicts: list[Verdict] = field(default_factory=list)
    axioms: list[AxiomCheck] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    internal_breach: bool = False
    build_error: str | None = None

    @property
    def exit_code(self) -> int:
        if self.internal_breach:
            return 4
        if self.build_error is not None:
            return 2
        if any(c.mandatory and c.ok is False for c in self.axioms):
            return 2
        if any(not v.ok for v in self.verdicts):
            return 1
        return 0

    def as_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "axioms": [a.as_dict() for a in self.axioms],
            "timings": self.timings,
            "exit_code": self.exit_code,
            **({"build_error": self.build_error} if self.build_error else {}),
        }


def _load(path: str, flags) -> tuple[Instantiated, dict]:
    timings = {}
    t0 = time.perf_counter()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    doc = parse_scenario(text)
    timings["parse"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    inst = instantiate(doc, full_lattice_axioms=flags.full_lattice_axioms)
    timings["build"] = time.perf_counter() - t0
    return inst, timings


def _axiom_checks(inst: Instantiated, flags) -> list[AxiomCheck]:
    checks: list[AxiomCheck] = []
    model = inst.model
    if model is None:
        return checks
    alg = model.algebra
    lat = model.lattice

    violations = list(alg.no_miracle_violations(full_lattice=flags.full_lattice_axioms))
    checks.append(
        AxiomCheck(
            "no-miracle",
            not violations,
            "" if not violations else str(violations[0]),
        )
    )

    fact_report = alg.fact_stability_report(strict=True)
    checks.append(
        AxiomCheck(
            "fact-stability-forward",
            fact_report.forward_ok,
            "" if fact_report.forward_ok else str(fact_report.forward_witness),
        )
    )
    converse_detail = "; ".join(
        f"{a}: h({l.name}) <= {phi.name} but {l.name} is not"
        for a, phi, l in fact_report.converse_counterexamples[:4]
    )
    checks.append(
        AxiomCheck(
            "fact-stability-converse",
            not fact_report.converse_counterexamples,
            converse_detail,
            mandatory=flags.strict_facts,
        )
    )

    bad = None
    for agent in alg.mama.agents:
        pair = alg.mama.pairs[agent]
        bad = maps.verify_adjunction(pair.left, pair.right)
        if bad is not None:
            bad = f"agent {agent} at ({bad[0].name}, {bad[1].name})"
            break
    for name in alg.actions:
        if bad:
            break
        pair = alg.update[name]
        witness = maps.verify_adjunction(pair.left, pair.right)
        if witness is not None:
            bad = f"action {name} at ({witness[0].name}, {witness[1].name})"
    checks.append(AxiomCheck("adjunctions", bad is None, bad or ""))

    for act in alg.actions:
        report = alg.kernel(act)
        if report.declared is not None:
            detail = "" if report.matches else (
                "declared but not annihilated: "
                + ", ".join(e.name for e in report.undeclared_misses)
            )
            checks.append(AxiomCheck(f"kernel[{act}]", report.matches, detail))

    if alg.actions:
        q = quantale_mod.ActionQuantale(alg.actions, flags.word_bound)
        view = quantale_mod.indexed_to_binary(alg, q)
        report = quantale_mod.check_epistemic_system(view, non_paranoid=flags.non_paranoid)
        for c in report.checks:
            checks.append(AxiomCheck(c.name, c.ok, c.witness or ""))
        if not flags.non_paranoid:
            strict = quantale_mod.check_epistemic_quantale(q, view.lifts, non_paranoid=True)
            failed = strict.failures()
            checks.append(
                AxiomCheck(
                    "non-paranoid-equalities",
                    None,
                    "hold" if strict.ok else f"fail: {failed[0].name}",
                    mandatory=False,
                )
            )

    # optional hypotheses, reported but never mandatory
    for agent in alg.mama.agents:
        rep = check_coclosure_consequences(alg.mama, agent)
        if rep.hypotheses_hold:
            detail = "decreasing and weakly idempotent; consequences " + (
                "verified" if rep.consequences_hold else "FAILED"
            )
            ok = rep.consequences_hold
        else:
            wit = rep.decreasing_witness or rep.idempotent_witness
            detail = f"hypotheses not met, witness {wit.name}"
            ok = None
        checks.append(AxiomCheck(f"coclosure-hypotheses[{agent}]", ok, detail, mandatory=False))
    checks.append(
        AxiomCheck(
            "boolean-base",
            None,
            "Boolean" if lat.is_boolean else
            ("distributive" if lat.is_distributive else "plain lattice"),
            mandatory=False,
        )
    )
    return checks


def _run_query(inst: Instantiated, q, flags) -> Verdict:
    if q.kind == "validate-axioms":
        checks = _axiom_checks(inst, flags)
        failed = [c for c in checks if c.mandatory and c.ok is False]
        return Verdict(q.id, q.kind, not failed,
                       failed[0].name + ": " + failed[0].detail if failed else "all axioms hold")

    if q.kind == "evaluate":
        value = eval_term(inst.model, q.lhs)
        return Verdict(q.id, q.kind, True, f"{render_term(q.lhs)} = {value.name}",
                       element=value.name)

    if q.kind == "check":
        holds = entails(inst.model, q.lhs, q.rhs)
        expected = q.expect == "holds"
        ok = holds == expected
        detail = f"{render_term(q.lhs)} |= {render_term(q.rhs)}: " + (
            "holds" if holds else "fails"
        )
        if not ok:
            detail += f" (expected {q.expect})"
        return Verdict(q.id, q.kind, ok, detail)

    if q.kind == "prove":
        depth = flags.depth or q.depth or derivation.DEFAULT_MAX_DEPTH
        seq = Sequent(q.lhs, q.rhs)
        outcome = derivation.prove(
            seq, inst.assumptions, depth, no_kernel_shortcut=flags.no_kernel_shortcut
        )
        if isinstance(outcome, NotProved):
            frontier = "; ".join(s.render() for s in outcome.frontier[:4])
            return Verdict(q.id, q.kind, False, f"not proved ({outcome.reason}): {frontier}")
        semantic = None
        if inst.model is not None:
            semantic = entails(inst.model, q.lhs, q.rhs)
            if not semantic:
                raise InternalError(
                    f"query {q.id!r} was proved but fails semantically"
                )
        return Verdict(
            q.id, q.kind, True, f"proved with {len(outcome.sequents())} steps",
            semantic=semantic, proof=render_proof(outcome, "structured"),
        )

    raise InternalError(f"unknown query kind {q.kind!r}")


def _execute(path, flags, only_query=None, kinds=None, with_axioms=True) -> RunReport:
    try:
        inst, timings = _load(path, flags)
    except (ParseError, ResolutionError):
        raise
    except AdjointKitError as exc:
        return RunReport(scenario=path, build_error=f"{type(exc).__name__}: {exc}")

    report = RunReport(scenario=inst.doc.name, timings=timings)
    for warning in inst.realization_warnings:
        report.axioms.append(AxiomCheck("realization", None, warning, mandatory=False))

    t0 = time.perf_counter()
    if with_axioms:
        report.axioms.extend(_axiom_checks(inst, flags))
    matched = False
    seen_id = False
    for q in inst.queries:
        if only_query is not None and q.id != only_query:
            continue
        seen_id = True
        if kinds is not None and q.kind not in kinds:
            continue
        matched = True
        try:
            report.verdicts.append(_run_query(inst, q, flags))
        except InternalError as exc:
            report.internal_breach = True
            report.verdicts.append(Verdict(q.id, q.kind, False, str(exc)))
        except AdjointKitError as exc:
            report.verdicts.append(
                Verdict(q.id, q.kind, False, f"{type(exc).__name__}: {exc}")
            )
    if only_query is not None and not matched:
        if seen_id:
            raise ResolutionError(
                f"query {only_query!r} in {inst.doc.name} is not of kind "
                + "/".join(kinds or ())
            )
        raise ResolutionError(f"no query named {only_query!r} in {inst.doc.name}")
    report.timings["queries"] = time.perf_counter() - t0
    return report


def _print_report(report: RunReport, as_json: bool):
    if as_json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
        return
    print(f"scenario: {report.scenario}")
    if report.build_error:
        print(f"  BUILD FAILED: {report.build_error}")
        return
    for c in report.axioms:
        mark = "info" if c.ok is None else ("ok" if c.ok else "FAIL")
        optional = "" if c.mandatory else " (optional)"
        detail = f" -- {c.detail}" if c.detail else ""
        print(f"  axiom {c.name}: {mark}{optional}{detail}")
    for v in report.verdicts:
        mark = "ok" if v.ok else "FAIL"
        print(f"  query {v.id} [{v.kind}]: {mark} -- {v.detail}")
    timing = ", ".join(f"{k}={v * 1000:.1f}ms" for k, v in report.timings.items())
    print(f"  timings: {timing}")


def _cmd_tables(path, map_name, flags, as_json):
    inst, _ = _load(path, flags)
    if inst.model is None:
        raise ResolutionError("tables needs a semantic scenario")
    alg = inst.model.algebra
    import re

    m = re.fullmatch(r"(f|fi|upd|after)\[([A-Za-z_][A-Za-z0-9_]*)\]", map_name)
    if not m:
        raise ResolutionError(f"bad map name {map_name!r}; use f[A], fi[A], upd[a] or after[a]")
    head, who = m.groups()
    if head in ("f", "fi"):
        pair = alg.mama.pairs.get(who)
        if pair is None:
            raise ResolutionError(f"unknown agent {who!r}")
        primary, partner = (pair.left, pair.right)
        names = (f"f[{who}]", f"fi[{who}]")
    else:
        if who not in alg.actions:
            raise ResolutionError(f"unknown action {who!r}")
        pair = alg.update[who]
        primary, partner = (pair.left, pair.right)
        names = (f"upd[{who}]", f"after[{who}]")

    rows = [
        {
            "element": e.name,
            names[0]: primary(e).name,
            names[1]: partner(e).name,
        }
        for e in alg.lattice.elements
    ]
    if as_json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "scenario": inst.doc.name,
                          "map": map_name, "table": rows}, indent=2, sort_keys=True))
        return 0
    width = max(len(r["element"]) for r in rows)
    w1 = max(len(r[names[0]]) for r in rows + [{names[0]: names[0]}])
    print(f"{'element'.ljust(width)}  {names[0].ljust(w1)}  {names[1]}")
    for r in rows:
        print(f"{r['element'].ljust(width)}  {r[names[0]].ljust(w1)}  {r[names[1]]}")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adjoint-kit",
        description="validate, query and prove scenarios of adjoint modal algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="scenario file (.scn)")
        p.add_argument("--json", action="store_true", help="structured output")
        p.add_argument("--strict-facts", action="store_true",
                       help="make the converse fact-stability direction mandatory")
        p.add_argument("--non-paranoid", action="store_true",
                       help="check quantale appearance equalities instead of lax laws")
        p.add_argument("--no-kernel-shortcut", action="store_true",
                       help="try kernel discharge only after every other rule")
        p.add_argument("--full-lattice-axioms", action="store_true",
                       help="check no-miracle on all elements, not just generators")
        p.add_argument("--word-bound", type=int, default=3,
                       help="quantale word-length bound for system checks")
        p.add_argument("--depth", type=int, default=None,
                       help="proof search depth override")

    for name in ("validate", "run"):
        p = sub.add_parser(name)
        common(p)
    p = sub.add_parser("query")
    common(p)
    p.add_argument("query_id")
    p = sub.add_parser("prove")
    common(p)
    p.add_argument("query_id")
    p = sub.add_parser("tables")
    common(p)
    p.add_argument("map_name", help="f[A], fi[A], upd[a] or after[a]")
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.command == "tables":
            return _cmd_tables(args.file, args.map_name, args, args.json)
        if args.command == "validate":
            report = _execute(args.file, args, kinds=())
        elif args.command == "run":
            report = _execute(args.file, args)
        elif args.command == "query":
            report = _execute(args.file, args, only_query=args.query_id, with_axioms=False)
        elif args.command == "prove":
            report = _execute(
                args.file, args, only_query=args.query_id,
                kinds=("prove",), with_axioms=False,
            )
        else:  # pragma: no cover
            raise InternalError(f"unknown command {args.command}")
    except (ParseError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except AdjointKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    _print_report(report, args.json)
    if args.command == "prove" and not args.json:
        for v in report.verdicts:
            if v.proof is not None:
                print(render_proof(derivation.proof_from_dict(v.proof), "text"))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
