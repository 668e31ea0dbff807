"""Batch front end: JSON problem files in, CSV iteration tables out.

simroots run <file> [--out DIR] [--validate-only] [--dump-normalized]
simroots compare <file> [--out DIR]

A problem file names a basis, a polynomial (coefficients or roots), the
initial approximations with their claimed multiplicities, and the methods
to run.  `run` writes one CSV per method plus a plain-text summary;
`compare` merges at least two methods side by side and appends a row with
the largest cross-method difference of the converged roots.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import basis as basis_mod
from .analysis import estimate_order
from .confluent import RootConfiguration
from .errors import (
    InsufficientHistory,
    ProblemFileError,
    SimrootsError,
)
from .genpoly import GeneralizedPolynomial, from_roots
from .solver import SolverSettings, SolveStatus, is_monomial_basis, solve

KNOWN_METHODS = ("method3", "method13", "ehrlich")
DEFAULT_SETTINGS = {"tolerance": 1e-11, "max_iterations": 50}


class Problem:
    def __init__(self, system, f, initial, multiplicities, methods,
                 settings, true_roots, normalized):
        self.system = system
        self.f = f
        self.initial = initial
        self.multiplicities = multiplicities
        self.methods = methods
        self.settings = settings
        self.true_roots = true_roots
        self.normalized = normalized


def _fail(field, message):
    raise ProblemFileError("field %r: %s" % (field, message))


def _require_number(field, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(field, "expected a number, got %r" % (value,))
    return float(value)


def _parse_domain(raw):
    if raw is None:
        return (-math.inf, math.inf), [None, None]
    if not isinstance(raw, list) or len(raw) != 2:
        _fail("domain", "expected [low, high] with null for an open end")
    lo = -math.inf if raw[0] is None else _require_number("domain", raw[0])
    hi = math.inf if raw[1] is None else _require_number("domain", raw[1])
    if not lo < hi:
        _fail("domain", "low bound %g is not below high bound %g" % (lo, hi))
    return (lo, hi), [raw[0] if raw[0] is None else lo,
                      raw[1] if raw[1] is None else hi]


def _parse_basis_entry(entry, index, cap):
    if not isinstance(entry, dict) or "kind" not in entry:
        _fail("basis", "entry %d must be an object with a 'kind'" % index)
    kind = entry["kind"]
    if kind == "constant":
        return basis_mod.constant(), {"kind": "constant"}
    if kind == "power":
        if "s" not in entry or isinstance(entry["s"], bool) \
                or not isinstance(entry["s"], int) or entry["s"] < 0:
            _fail("basis", "entry %d: power needs a nonnegative integer 's'" % index)
        return basis_mod.power(entry["s"]), {"kind": "power", "s": entry["s"]}
    if kind == "sine":
        omega = _require_number("basis", entry.get("omega"))
        return basis_mod.sine(omega), {"kind": "sine", "omega": omega}
    if kind == "cosine":
        omega = _require_number("basis", entry.get("omega"))
        return basis_mod.cosine(omega), {"kind": "cosine", "omega": omega}
    if kind == "exponential":
        rate = _require_number("basis", entry.get("lambda"))
        return basis_mod.exponential(rate), {"kind": "exponential", "lambda": rate}
    if kind == "inverse-quadratic":
        return basis_mod.inverse_quadratic(), {"kind": "inverse-quadratic"}
    if kind in ("expr", "expression"):
        tree = entry.get("tree")
        if not isinstance(tree, str):
            _fail("basis", "entry %d: expr needs a 'tree' string" % index)
        try:
            member = basis_mod.expression(tree, derivative_cap=cap)
        except SimrootsError as exc:
            _fail("basis", "entry %d: %s" % (index, exc))
        return member, {"kind": "expr", "tree": tree}
    _fail("basis", "entry %d: unknown kind %r" % (index, kind))


def load_problem(path):
    """Parse and validate a JSON problem file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError("cannot read %s: %s" % (path, exc))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError("invalid JSON at line %d: %s" % (exc.lineno, exc.msg))
    if not isinstance(doc, dict):
        raise ProblemFileError("the problem file must hold a JSON object")

    multiplicities = doc.get("multiplicities")
    if not isinstance(multiplicities, list) or not multiplicities or any(
            isinstance(m, bool) or not isinstance(m, int) or m < 1
            for m in multiplicities):
        _fail("multiplicities", "expected a nonempty list of positive integers")

    # diagnostics touch derivatives up to alpha + 2
    cap = max(8, max(multiplicities) + 2)

    raw_basis = doc.get("basis")
    if not isinstance(raw_basis, list) or len(raw_basis) < 2:
        _fail("basis", "expected a list of at least 2 entries")
    members = []
    normalized_basis = []
    for index, entry in enumerate(raw_basis):
        member, canon = _parse_basis_entry(entry, index, cap)
        members.append(member)
        normalized_basis.append(canon)

    domain, normalized_domain = _parse_domain(doc.get("domain"))
    system = basis_mod.BasisSystem(tuple(members), domain)

    n = len(system) - 1
    if sum(multiplicities) != n:
        _fail("multiplicities",
              "sum %d does not match the basis degree %d"
              % (sum(multiplicities), n))

    initial = doc.get("initial")
    if not isinstance(initial, list) or len(initial) != len(multiplicities):
        _fail("initial", "expected a list matching 'multiplicities' in length")
    initial = [_require_number("initial", v) for v in initial]

    poly = doc.get("polynomial")
    if not isinstance(poly, dict) or ("coefficients" in poly) == ("roots" in poly):
        _fail("polynomial", "expected exactly one of 'coefficients' or 'roots'")
    true_roots = None
    if "coefficients" in poly:
        coeffs = poly["coefficients"]
        if not isinstance(coeffs, list) or len(coeffs) != len(system):
            _fail("polynomial", "'coefficients' must list %d numbers" % len(system))
        coeffs = [_require_number("polynomial", v) for v in coeffs]
        try:
            f = GeneralizedPolynomial(system, np.array(coeffs))
        except SimrootsError as exc:
            _fail("polynomial", str(exc))
        normalized_poly = {"coefficients": coeffs}
    else:
        roots = poly["roots"]
        if not isinstance(roots, list) or not roots:
            _fail("polynomial", "'roots' must be a nonempty list")
        pairs = []
        for entry in roots:
            if not isinstance(entry, dict) or "x" not in entry \
                    or "multiplicity" not in entry:
                _fail("polynomial", "each root needs 'x' and 'multiplicity'")
            mult = entry["multiplicity"]
            if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
                _fail("polynomial", "'multiplicity' must be a positive integer")
            pairs.append((_require_number("polynomial", entry["x"]), mult))
        try:
            true_roots = RootConfiguration(tuple(pairs))
            f = from_roots(system, true_roots)
        except SimrootsError as exc:
            _fail("polynomial", str(exc))
        normalized_poly = {
            "roots": [{"x": x, "multiplicity": m} for x, m in pairs]
        }

    methods = doc.get("methods")
    if not isinstance(methods, list) or not methods:
        _fail("methods", "expected a nonempty list")
    for m in methods:
        if m not in KNOWN_METHODS:
            _fail("methods", "unknown method %r (known: %s)"
                  % (m, ", ".join(KNOWN_METHODS)))
    if len(set(methods)) != len(methods):
        _fail("methods", "duplicate entries")
    if "ehrlich" in methods and not is_monomial_basis(system):
        _fail("methods", "'ehrlich' needs the monomial basis {1, x, ..., x^n}")

    settings = dict(DEFAULT_SETTINGS)
    raw_settings = doc.get("settings", {})
    if not isinstance(raw_settings, dict):
        _fail("settings", "expected an object")
    for key, value in raw_settings.items():
        if key == "tolerance":
            value = _require_number("settings", value)
            if value <= 0:
                _fail("settings", "'tolerance' must be positive")
            settings["tolerance"] = value
        elif key == "max_iterations":
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                _fail("settings", "'max_iterations' must be a positive integer")
            settings["max_iterations"] = value
        else:
            _fail("settings", "unknown key %r" % (key,))

    normalized = {
        "basis": normalized_basis,
        "domain": normalized_domain,
        "polynomial": normalized_poly,
        "initial": initial,
        "multiplicities": list(multiplicities),
        "methods": list(methods),
        "settings": settings,
    }
    return Problem(system, f, initial, multiplicities, list(methods),
                   settings, true_roots, normalized)


def _fmt(value):
    return format(float(value), ".10g")


def _iteration_rows(report):
    rows = []
    for entry in report.history:
        cells = [str(entry.k)]
        cells.extend(_fmt(x) for x in entry.approximations)
        if entry.last_corrections is None:
            cells.append("")
        else:
            cells.append(_fmt(np.max(np.abs(entry.last_corrections))))
        rows.append(",".join(cells))
    return rows


def _write_method_csv(path, report, m):
    header = "k," + ",".join("x_%d" % (r + 1) for r in range(m)) + ",correction_max"
    body = "\n".join([header] + _iteration_rows(report)) + "\n"
    path.write_text(body, encoding="utf-8", newline="")
    return path


def _summary_block(method, report, true_roots):
    lines = ["%s: status=%s iterations=%d"
             % (method, report.status.value, report.iterations_used)]
    lines.append("  final approximations: "
                 + " ".join(_fmt(x) for x in report.history[-1].approximations))
    lines.append("  final residuals: "
                 + " ".join(format(r, ".3e") for r in report.final_residuals))
    if true_roots is not None and len(true_roots) == len(
            report.history[-1].approximations):
        try:
            estimate = estimate_order(report.history, true_roots.locations)
            lines.append("  order estimates: " + " ".join(
                "x_%d~%.3f" % (r + 1, order) for r, order in estimate.per_root))
        except InsufficientHistory as exc:
            lines.append("  order estimates: unavailable (%s)" % exc)
    else:
        lines.append("  order estimates: unavailable (true roots not given)")
    return lines


def _solve_all(problem):
    reports = {}
    for method in problem.methods:
        settings = SolverSettings(
            method=method,
            tolerance=problem.settings["tolerance"],
            max_iterations=problem.settings["max_iterations"],
        )
        reports[method] = solve(problem.f, problem.initial,
                                problem.multiplicities, settings)
    return reports


def cmd_run(args):
    problem = load_problem(args.problem)
    if args.dump_normalized:
        print(json.dumps(problem.normalized, indent=2, sort_keys=True))
        return 0
    if args.validate_only:
        print("%s: valid" % args.problem)
        return 0
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.problem).stem
    reports = _solve_all(problem)
    summary_lines = []
    for method in problem.methods:
        report = reports[method]
        csv_path = _write_method_csv(
            out_dir / ("%s.%s.csv" % (stem, method)), report,
            len(problem.initial))
        print("%s: %s after %d iterations -> %s"
              % (method, report.status.value, report.iterations_used, csv_path))
        summary_lines.extend(_summary_block(method, report, problem.true_roots))
    summary_path = out_dir / ("%s.summary.txt" % stem)
    summary_path.write_text("\n".join(summary_lines) + "\n",
                            encoding="utf-8", newline="")
    print("summary -> %s" % summary_path)
    if all(r.status is SolveStatus.converged for r in reports.values()):
        return 0
    return 2


def cmd_compare(args):
    problem = load_problem(args.problem)
    if len(problem.methods) < 2:
        _fail("methods", "compare needs at least 2 methods")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.problem).stem
    reports = _solve_all(problem)
    m = len(problem.initial)
    header = ["k"]
    for method in problem.methods:
        header.extend("x_%d_%s" % (r + 1, method) for r in range(m))
    depth = max(len(reports[method].history) for method in problem.methods)
    lines = [",".join(header)]
    for k in range(depth):
        cells = [str(k)]
        for method in problem.methods:
            history = reports[method].history
            if k < len(history):
                cells.extend(_fmt(x) for x in history[k].approximations)
            else:
                cells.extend("" for _ in range(m))
        lines.append(",".join(cells))
    converged = [method for method in problem.methods
                 if reports[method].status is SolveStatus.converged]
    agreement = ""
    if len(converged) >= 2:
        finals = np.array([reports[method].history[-1].approximations
                           for method in converged])
        agreement = _fmt(np.max(np.abs(finals - finals[0])))
    cells = ["agreement", agreement]
    cells.extend("" for _ in range(len(header) - 2))
    lines.append(",".join(cells))
    csv_path = out_dir / ("%s.compare.csv" % stem)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
    for method in problem.methods:
        report = reports[method]
        print("%s: %s after %d iterations"
              % (method, report.status.value, report.iterations_used))
    print("compare table -> %s" % csv_path)
    if len(converged) == len(problem.methods):
        return 0
    return 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="simroots",
        description="Simultaneous root extraction for generalized polynomials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="solve a problem file")
    run_parser.add_argument("problem", help="path to a JSON problem file")
    run_parser.add_argument("--out", default=".", help="output directory")
    run_parser.add_argument("--validate-only", action="store_true",
                            help="check the file and exit")
    run_parser.add_argument("--dump-normalized", action="store_true",
                            help="print the canonical problem JSON and exit")
    run_parser.set_defaults(func=cmd_run)
    compare_parser = sub.add_parser("compare",
                                    help="run several methods side by side")
    compare_parser.add_argument("problem", help="path to a JSON problem file")
    compare_parser.add_argument("--out", default=".", help="output directory")
    compare_parser.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimrootsError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
