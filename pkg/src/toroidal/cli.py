"""Command line entry point.

    toroidal check|monomialize|verify|counterexample [options] [scenario ...]

A scenario is a path to a JSON file or the name of a bundled catalog entry.
The catalog directory can be overridden with $TOROIDAL_CATALOG.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from importlib import resources
from pathlib import Path

from .errors import EXIT_INTERNAL, EXIT_NEGATIVE, EXIT_OK, ParseError, ToroidalError
from .fields import FieldSpec, NoRoot, Scalar
from .logjac import is_log_smooth
from .monomialize import certify_counterexample, monomialize_pipeline, verify_diagram
from .scenario import (
    Scenario,
    diagram_to_list,
    dump_field,
    dump_scalar,
    dumps,
    parse_field,
    parse_scenario,
    result_from_dict,
    result_to_dict,
)
from .series import Series

CATALOG_ENV = "TOROIDAL_CATALOG"
SUBCOMMANDS = ("check", "monomialize", "verify", "counterexample")
_MODE_FLAGS = {"rational": "rational_residue", "root-capable": "root_capable"}


def catalog_dir() -> Path:
    override = os.environ.get(CATALOG_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("toroidal") / "catalog"))


def catalog_names() -> list[str]:
    return sorted(p.stem for p in catalog_dir().glob("*.json"))


def load_scenario(ref: str) -> Scenario:
    path = Path(ref)
    if not path.is_file():
        path = catalog_dir() / f"{ref}.json"
        if not path.is_file():
            raise ParseError(f"no scenario file or catalog entry named {ref!r}", ref)
    return parse_scenario(path.read_text())


def jsonable(x):
    """Render witnesses and other values for a report."""
    if isinstance(x, Scalar):
        return dump_scalar(x)
    if isinstance(x, Series):
        return str(x)
    if isinstance(x, NoRoot):
        return {"value": jsonable(x.value), "n": x.n, "certified": x.certified, "reason": x.reason}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


def _matrix(rows):
    return [[dump_scalar(v) for v in row] for row in rows]


def _check_assertions(scen: Scenario, observed: dict, mode, subcommand) -> list:
    """Compare with the scenario's expectations.

    Outcomes are only checked when monomializing in the scenario's own mode.
    """
    a = scen.assertions
    if mode != scen.mode or subcommand != "monomialize":
        observed = {k: v for k, v in observed.items() if k == "verdict"}
    out = []
    for key, expected in (
        ("verdict", a.verdict),
        ("outcome", a.outcome),
        ("E", None if a.E is None else [list(r) for r in a.E]),
        ("lambda", None if a.lambdas is None else [dump_scalar(x) for x in a.lambdas]),
    ):
        if expected is None or key not in observed:
            continue
        out.append({"key": key, "expected": expected, "actual": observed[key], "passed": expected == observed[key]})
    return out


def run(subcommand, scen=None, order=None, mode=None, stored=None, timing=False):
    """Run one subcommand; return ``(report, exit_code)``."""
    if subcommand not in SUBCOMMANDS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    start = time.perf_counter()
    report = {"subcommand": subcommand, "name": scen.name if scen is not None else "counterexample"}
    observed = {}
    code = EXIT_OK
    try:
        if subcommand == "counterexample":
            cert = certify_counterexample(order or 12)
            report["certificate"] = jsonable(cert)
            report["verdict"] = "certified" if cert["passed"] else "not_certified"
            code = EXIT_OK if cert["passed"] else EXIT_INTERNAL
        else:
            mode = mode or scen.mode
            report["mode"] = mode
            report["residue_field"] = dump_field(scen.residue_field)
            germ = scen.germ(order)
            report["order"] = germ.model.order
            verdict = is_log_smooth(germ)
            observed["verdict"] = verdict.label
            report["smoothness"] = verdict.label
            report["jacobian_at_point"] = _matrix(verdict.jacobian_at_point)
            report["rank"] = verdict.rank
            if subcommand == "check":
                report["verdict"] = verdict.label
                report["minor_columns"] = None if verdict.minor_columns is None else list(verdict.minor_columns)
                report["minor_det"] = None if verdict.minor_det is None else dump_scalar(verdict.minor_det)
                code = EXIT_OK if verdict.smooth else EXIT_NEGATIVE
            elif subcommand == "monomialize":
                res = monomialize_pipeline(germ, mode)
                body = result_to_dict(res)
                report.update(body)
                report["verdict"] = "monomialized"
                observed.update(outcome="monomialized", E=body["E"], **{"lambda": body["lambda"]})
            else:
                if stored is None:
                    raise ParseError("verify needs a stored result (--result)", None)
                res = result_from_dict(stored, germ)
                diag = verify_diagram(germ, res)
                report["E"] = [list(r) for r in res.E]
                report["checks"] = diagram_to_list(diag)
                report["verdict"] = "verified" if diag.passed else "diagram_fails"
                code = EXIT_OK if diag.passed else EXIT_NEGATIVE
    except ToroidalError as exc:
        observed["outcome"] = exc.kind
        report["verdict"] = "error"
        report["error"] = {"kind": exc.kind, "message": str(exc), "witness": jsonable(exc.witness)}
        code = exc.exit_code
    except Exception as exc:  # a bug, reported rather than crashing the batch
        report["verdict"] = "error"
        report["error"] = {"kind": type(exc).__name__, "message": str(exc), "witness": None}
        code = EXIT_INTERNAL
    if scen is not None:
        checks = _check_assertions(scen, observed, mode or scen.mode, subcommand)
        if checks:
            report["assertions"] = checks
            if not all(c["passed"] for c in checks):
                code = EXIT_INTERNAL
    if timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    return report, code


def _pretty(x, fld: FieldSpec):
    """Exact report values back to readable text."""
    if isinstance(x, list) and x and all(isinstance(v, list) for v in x):
        return "[" + ", ".join(_pretty(v, fld) for v in x) + "]"
    if isinstance(x, list) and len(x) == fld.degree and fld.degree > 1 and all(isinstance(v, str) for v in x):
        return str(Scalar(fld, fld.raw(x)))
    if isinstance(x, list):
        return "[" + ", ".join(_pretty(v, fld) for v in x) + "]"
    return str(x)


def summary(report: dict) -> str:
    fld = parse_field(report["residue_field"], "residue_field") if "residue_field" in report else FieldSpec()
    lines = [f"{report['subcommand']} {report['name']}: {report['verdict']}"]
    if "error" in report:
        e = report["error"]
        lines.append(f"  {e['kind']}: {e['message']}")
        w = e["witness"]
        if isinstance(w, dict) and "value" in w:
            w = w["value"]
        if w is not None:
            lines.append(f"  witness: {_pretty(w, fld)}")
    if "jacobian_at_point" in report:
        lines.append(f"  J(x) = {_pretty(report['jacobian_at_point'], fld)}")
    for key in ("E", "lambda", "t", "appended"):
        if report.get(key):
            lines.append(f"  {key} = {_pretty(report[key], fld)}")
    for c in report.get("checks", []):
        status = "ok" if c["passed"] else f"differs at {c['first_failure']}"
        lines.append(f"  character {c['character']}: {status} through weight {c['checked_through']}")
    if "certificate" in report:
        for name, part in report["certificate"]["checks"].items():
            lines.append(f"  {name}: {'pass' if part['passed'] else 'FAIL'}")
    for a in report.get("assertions", []):
        if not a["passed"]:
            lines.append(f"  assertion {a['key']} failed: expected {a['expected']}, got {a['actual']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toroidal", description="Log smoothness and monomialization of toroidal morphism germs.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("scenarios", nargs="*", help="scenario file or catalog name")
    p.add_argument("--order", type=int, help="truncation weight N (default: the scenario's)")
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), help="default: the scenario's")
    p.add_argument("--report", type=Path, help="write the JSON report here (a directory if several scenarios)")
    p.add_argument("--result", type=Path, help="stored monomialize report, for verify")
    p.add_argument("--timing", action="store_true", help="include wall time in reports")
    p.add_argument("--list", action="store_true", help="list the catalog and exit")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        print("\n".join(catalog_names()))
        return EXIT_OK
    if args.order is not None and args.order < 0:
        print("error: --order must be nonnegative", file=sys.stderr)
        return 2
    mode = _MODE_FLAGS[args.mode] if args.mode else None
    if args.subcommand == "counterexample":
        refs = [None]
    else:
        refs = args.scenarios
        if not refs:
            print("error: a scenario file or catalog name is required", file=sys.stderr)
            return 2
    stored = None
    if args.result is not None:
        try:
            stored = json.loads(args.result.read_text())
        except (OSError, ValueError) as exc:
            print(f"error: cannot read stored result: {exc}", file=sys.stderr)
            return 2
    worst = EXIT_OK
    for ref in refs:
        scen = None
        if ref is not None:
            try:
                scen = load_scenario(ref)
            except ToroidalError as exc:
                report = {
                    "subcommand": args.subcommand,
                    "name": ref,
                    "verdict": "error",
                    "error": {"kind": exc.kind, "message": str(exc), "witness": jsonable(exc.witness)},
                }
                code = exc.exit_code
                _emit(report, args.report, len(refs) > 1)
                worst = max(worst, code)
                continue
        report, code = run(args.subcommand, scen, args.order, mode, stored, args.timing)
        _emit(report, args.report, len(refs) > 1)
        worst = max(worst, code)
    return worst


def _emit(report, target, batch):
    print(summary(report))
    if target is None:
        return
    if batch:
        target.mkdir(parents=True, exist_ok=True)
        target = target / f"{report['name']}.json"
    target.write_text(dumps(report))


if __name__ == "__main__":
    sys.exit(main())
