"""Command-line front end.

Four commands tie the library together:

- analyze:       construct a function from JSON, count its half-plane
                 valences, extract its valence tree, cross-check the tree
                 against direct root counts, and probe its integral means.
- enumerate:     list every admissible tree shape for given half-plane
                 valences, with the interval constraints each shape imposes.
- validate-tree: check a tree file against the axioms and print violations.
- synthesize:    realize a target tree, catalog first with search fallback.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 infeasible
target, 4 numerical failure.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from .blaschke_smirnov import (
    BoundaryNotReal,
    DenominatorVanishesInDisk,
    InconsistentValence,
    NotRelativelyPrime,
    QuadratureUnstable,
    RealSmirnov,
    deficiency_indices,
    integral_means,
)
from .complex_poly import NonConvergence
from .region_extraction import ExtractionError, crosscheck, extract_full, render_svg
from .synthesis import (
    BudgetExhausted,
    InfeasibleTarget,
    NotInCatalog,
    SynthesisProblem,
    SynthesisResult,
    catalog_realize,
    synthesize_search,
)
from .valence_tree import InvalidTree, Tree, profile, to_dot, validate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

ENUMERATE_CAP = 6

# integral-means probe: radii from the divergence test, exponents placed
# below and above the H^p threshold 1/(2m) for real multiplicity m
MEANS_RADII = (0.99, 0.9999)


class CapExceeded(ValueError):
    """Enumeration request beyond the combinatorial cap."""


class ParseFailure(ValueError):
    """Input file could not be read or decoded."""


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseFailure("cannot read %s: %s" % (path, exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParseFailure("%s is not valid JSON: %s" % (path, exc)) from exc


def _dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt_x(x):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return "%g" % x


def _fmt_interval(iv):
    return "(%s, %s)" % (_fmt_x(iv.lo), _fmt_x(iv.hi))


def _describe(phi):
    if phi.b1 is not None and phi.b2 is not None:
        return "Blaschke pair, deg B1 = %d, deg B2 = %d" % (
            phi.b1.degree, phi.b2.degree)
    return "rational, deg N = %d, deg D = %d" % (phi.num.degree, phi.den.degree)


def _means_rows(phi, m):
    """Probe M_p(r) below and above the H^p threshold 1/(2m)."""
    if m >= 1:
        ps = (1.0 / (4.0 * m), 3.0 / (4.0 * m))
    else:
        ps = (0.25, 0.75)
    rows = []
    for p in ps:
        row = {"p": p, "inner": None, "outer": None, "ratio": None}
        try:
            row["inner"] = integral_means(phi, p, MEANS_RADII[0])
            row["outer"] = integral_means(phi, p, MEANS_RADII[1])
            row["ratio"] = row["outer"] / row["inner"]
        except (QuadratureUnstable, OverflowError):
            pass
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def cmd_analyze(args):
    try:
        data = _load_json(args.input)
    except ParseFailure as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE

    # a synthesize result file carries its function under "candidate"
    if isinstance(data, dict) and isinstance(data.get("candidate"), dict):
        data = data["candidate"]

    try:
        phi = RealSmirnov.from_json(data)
    except (KeyError, TypeError, IndexError) as exc:
        print("parse error: not a function description: %s" % exc,
              file=sys.stderr)
        return EXIT_PARSE
    except (NotRelativelyPrime, DenominatorVanishesInDisk, BoundaryNotReal,
            ValueError) as exc:
        print("invalid function: %s" % exc, file=sys.stderr)
        return EXIT_INVALID

    try:
        v_plus, v_minus = deficiency_indices(phi, seed=args.seed)
        ext = extract_full(phi, resolution=args.resolution, seed=args.seed)
        report = crosscheck(phi, ext.tree, n_samples=args.samples,
                            seed=args.seed + 1)
    except (InconsistentValence, ExtractionError, NonConvergence) as exc:
        print("numerical failure: %s: %s" % (type(exc).__name__, exc),
              file=sys.stderr)
        return EXIT_NUMERICAL

    prof = profile(ext.tree)
    means = _means_rows(phi, prof.sup_real)

    print("input: %s" % _describe(phi))
    print("valences: %d on C+, %d on C-" % (v_plus, v_minus))
    print("deficiency indices: (%d, %d)" % (v_plus, v_minus))
    print("tree: %d nodes, %d edges (resolution %d)"
          % (len(ext.tree.nodes), len(ext.tree.edges), ext.resolution))
    for a, b, iv in ext.tree.edges:
        na, nb = ext.tree.nodes[a], ext.tree.nodes[b]
        print("  %s [%s:%d] -- %s [%s:%d]  %s" % (
            a, "C+" if na.sign > 0 else "C-", na.valence,
            b, "C+" if nb.sign > 0 else "C-", nb.valence,
            _fmt_interval(iv)))
    print("real profile:")
    for lo, hi, mult in prof.pieces():
        print("  (%s, %s): %d" % (_fmt_x(lo), _fmt_x(hi), mult))
    print("crosscheck: %s (%d samples, %d mismatches)" % (
        "ok" if report.ok else "MISMATCH", report.samples,
        len(report.mismatches)))
    print("integral means (m = %d):" % prof.sup_real)
    for row in means:
        if row["ratio"] is None:
            print("  p = %.4g: unstable quadrature" % row["p"])
        else:
            print("  p = %.4g: M(%g) = %.6g, M(%g) = %.6g, ratio = %.6g" % (
                row["p"], MEANS_RADII[0], row["inner"],
                MEANS_RADII[1], row["outer"], row["ratio"]))

    if args.json:
        _dump_json({
            "input": _describe(phi),
            "function": phi.to_json(),
            "valences": [v_plus, v_minus],
            "deficiency": [v_plus, v_minus],
            "resolution": ext.resolution,
            "tree": ext.tree.to_json(),
            "profile": prof.to_json(),
            "crosscheck": report.to_json(),
            "integral_means": {"m": prof.sup_real, "radii": list(MEANS_RADII),
                               "rows": means},
        }, args.json)
    if args.plot:
        svg = render_svg(ext.partition, ext.segments, ext.collections)
        Path(args.plot).write_text(svg, encoding="utf-8")

    if not report.ok:
        for mm in report.mismatches[:10]:
            print("  mismatch: %s" % mm, file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------


def cmd_enumerate(args):
    from .valence_tree import enumerate_shapes

    try:
        if args.v_plus > ENUMERATE_CAP or args.v_minus > ENUMERATE_CAP:
            raise CapExceeded(
                "valences are capped at %d for enumeration" % ENUMERATE_CAP)
        entries = enumerate_shapes(args.v_plus, args.v_minus)
    except (CapExceeded, ValueError) as exc:
        print("invalid request: %s" % exc, file=sys.stderr)
        return EXIT_INVALID

    print("%d shape(s) for valences (%d, %d)"
          % (len(entries), args.v_plus, args.v_minus))
    for k, entry in enumerate(entries, 1):
        print("shape %d: %d nodes, %d edges"
              % (k, len(entry.tree.nodes), len(entry.tree.edges)))
        for constraint in entry.constraints:
            print("  %s" % constraint)

    if args.dot:
        out = Path(args.dot)
        out.mkdir(parents=True, exist_ok=True)
        for k, entry in enumerate(entries, 1):
            (out / ("shape_%03d.dot" % k)).write_text(
                to_dot(entry.tree), encoding="utf-8")
    if args.json:
        _dump_json([
            {"code": entry.code, "tree": entry.tree.to_json(),
             "edge_names": list(entry.edge_names),
             "constraints": [str(c) for c in entry.constraints]}
            for entry in entries
        ], args.json)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate-tree
# ---------------------------------------------------------------------------


def _load_tree(path):
    data = _load_json(path)
    try:
        return Tree.from_json(data)
    except (InvalidTree, KeyError, TypeError, ValueError) as exc:
        raise ParseFailure("not a tree description: %s" % exc) from exc


def cmd_validate_tree(args):
    try:
        tree = _load_tree(args.input)
    except ParseFailure as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE

    violations = validate(tree)
    if not violations:
        print("valid: %d nodes, %d edges"
              % (len(tree.nodes), len(tree.edges)))
        return EXIT_OK
    print("invalid: %d violation(s)" % len(violations))
    for v in violations:
        print("  %s" % v)
    return EXIT_INVALID


# ---------------------------------------------------------------------------
# synthesize
# ---------------------------------------------------------------------------


def cmd_synthesize(args):
    try:
        target = _load_tree(args.input)
    except ParseFailure as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE

    notes = []
    try:
        result = catalog_realize(target)
    except InfeasibleTarget as exc:
        print("infeasible target: %d violation(s)" % len(exc.violations),
              file=sys.stderr)
        for v in exc.violations:
            print("  %s" % v, file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotInCatalog as exc:
        notes.append("NotInCatalog: %s" % exc)
        problem = SynthesisProblem(target, restarts=args.restarts,
                                   budget=args.budget, seed=args.seed,
                                   tol=args.tol)
        try:
            result = synthesize_search(problem)
        except BudgetExhausted as exc2:
            notes.append("BudgetExhausted: no shape-matching candidate "
                         "within %d evaluations" % args.budget)
            result = exc2.best
        except ValueError as exc2:
            notes.append("search unavailable: %s" % exc2)
            result = SynthesisResult(None, math.inf, None, "failed")

    out = result.to_json()
    out["notes"] = notes
    text = json.dumps(out, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return EXIT_OK if result.status in ("exact", "approximate") else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _parser():
    parser = argparse.ArgumentParser(
        prog="rsmirnov",
        description="Valence analysis and synthesis for rational real "
                    "Smirnov functions on the unit disk.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline on a function file")
    p.add_argument("input", help="function JSON (Blaschke pair or rational)")
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", metavar="OUT.SVG", default=None)
    p.add_argument("--json", metavar="OUT.JSON", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("enumerate", help="all tree shapes for given valences")
    p.add_argument("v_plus", type=int)
    p.add_argument("v_minus", type=int)
    p.add_argument("--dot", metavar="DIR", default=None,
                   help="write one DOT file per shape")
    p.add_argument("--json", metavar="OUT.JSON", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("validate-tree", help="check a tree file")
    p.add_argument("input", help="tree JSON")
    p.set_defaults(func=cmd_validate_tree)

    p = sub.add_parser("synthesize", help="realize a target tree")
    p.add_argument("input", help="tree JSON")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--out", metavar="OUT.JSON", default=None)
    p.set_defaults(func=cmd_synthesize)

    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
