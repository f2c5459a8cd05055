"""``framelab`` command-line interface.

Exit codes: 0 success, 1 usage/parse/validation error, 2 not a frame,
3 Gram operator with nontrivial kernel, 4 degradation envelope violated.

Random probe vectors come from ``numpy.random.default_rng(seed)`` (PCG64)
drawing standard normals, so identical inputs and seeds give byte-identical
output.
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import (ConditioningWarning, FramelabError,
                         KernelNotTrivialError, NotAFrameError)
from .frames import (DualVariant, FrameFamily, dual_frame, four_way_bounds,
                     frame_decompose, frame_operator, optimal_bounds_oracle,
                     tight_jonb_check)
from .io import MatrixFile, digest, dumps_json, load_problem
from .wmetric import (GramModel, WKreinSpace, completeness_certificate,
                      degradation_sweep, naive_frame_bounds, transfer_frame)

EXIT_OK, EXIT_ERROR, EXIT_NOT_FRAME, EXIT_KERNEL, EXIT_ENVELOPE = 0, 1, 2, 3, 4
N_PROBES = 50


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    parser = _Parser(prog="framelab", description="Frame analysis in Krein spaces and W-metric transfers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("file", help="problem JSON file")
    common.add_argument("--seed", type=int, default=0, help="probe generator seed (default 0)")
    common.add_argument("--out", help="write the result here instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="frame operators, bounds and flags")
    dual = sub.add_parser("dual", parents=[common], help="canonical dual frame")
    dual.add_argument("--variant", default=DualVariant.CANONICAL_KREIN.value,
                      choices=[v.value for v in DualVariant])
    rec = sub.add_parser("reconstruct", parents=[common], help="frame decomposition of a vector")
    rec.add_argument("--vector", type=_floats, help="comma-separated vector (default: random probe)")
    sub.add_parser("transfer", parents=[common], help="transfer the frame into the W-metric space")
    sweep = sub.add_parser("sweep", parents=[common], help="W-metric bound degradation curve")
    sweep.add_argument("--direction", choices=["floor", "ceiling"], default="floor")
    sweep.add_argument("--params", type=_floats, required=True,
                       help="comma-separated, strictly monotone positive parameters")
    return parser


def _columns(k):
    return np.asarray(k).T.tolist()


def _input_block(problem):
    docs = problem.documents
    return {"sha256": problem.sha256,
            "digests": {key: digest(v) for key, v in docs.items() if isinstance(v, MatrixFile)}}


def _probes(rng, dim, n=N_PROBES):
    return rng.standard_normal((n, dim))


def _max_relative(residuals, norms):
    rel = [r / n for r, n in zip(residuals, norms) if n > 0]
    return max(rel) if rel else 0.0


def cmd_analyze(problem, args):
    fam = problem.family
    analysis = frame_operator(fam)
    a, b = analysis.bounds
    oa, ob = optimal_bounds_oracle(fam)
    four = four_way_bounds(fam)
    jonb = tight_jonb_check(fam)
    report = {
        "command": "analyze",
        "input": _input_block(problem),
        "dim": fam.dim, "m": fam.m, "signature": list(fam.space.signature),
        "bounds": {"lower": a, "upper": b},
        "oracle_bounds": {"lower": oa, "upper": ob},
        "four_way": {name: list(pair) for name, pair in four._asdict().items()},
        "flags": {"is_frame": analysis.is_frame, "is_tight": analysis.is_tight,
                  "is_exact": analysis.is_exact, "is_tight_1": jonb.is_tight_1,
                  "self_products_unit": jonb.self_products_unit, "is_jonb": jonb.is_jonb},
        "operator_residuals": analysis.operator_residuals(),
        "dual_bounds": None, "reconstruction": None, "warnings": [],
    }
    if problem.gram is not None:
        report["completeness"] = completeness_certificate(problem.gram).as_dict()
    if not analysis.is_frame:
        report["warnings"].append("family is not a frame: lower bound is not positive")
        return report, EXIT_NOT_FRAME
    probes = _probes(np.random.default_rng(args.seed), fam.dim)
    norms = np.linalg.norm(probes, axis=1)
    duals = {}
    for variant in DualVariant:
        d = dual_frame(analysis, variant)
        dl, du = d.bounds()
        duals[variant.value] = {
            "lower": dl, "upper": du,
            "duality_residual": _max_relative([d.residual(x) for x in probes], norms)}
    report["dual_bounds"] = duals
    report["expected_dual_bounds"] = [1.0 / b, 1.0 / a]
    residuals = [frame_decompose(analysis, x).residual for x in probes]
    report["reconstruction"] = {"probes": len(probes), "seed": args.seed,
                                "max_relative_residual": _max_relative(residuals, norms)}
    return report, EXIT_OK


def cmd_dual(problem, args):
    analysis = frame_operator(problem.family)
    analysis.require_frame()
    d = dual_frame(analysis, args.variant)
    probes = _probes(np.random.default_rng(args.seed), problem.family.dim)
    a, b = analysis.bounds
    dl, du = d.bounds()
    return {
        "command": "dual", "input": _input_block(problem), "variant": d.variant.value,
        "vectors": _columns(d.vectors),
        "bounds": {"lower": dl, "upper": du},
        "expected_bounds": {"lower": 1.0 / b, "upper": 1.0 / a},
        "duality_residual": _max_relative([d.residual(x) for x in probes],
                                          np.linalg.norm(probes, axis=1)),
    }, EXIT_OK


def cmd_reconstruct(problem, args):
    fam = problem.family
    analysis = frame_operator(fam)
    analysis.require_frame()
    if args.vector is None:
        x = _probes(np.random.default_rng(args.seed), fam.dim, 1)[0]
    else:
        x = np.asarray(args.vector, dtype=float)
        if x.shape != (fam.dim,):
            raise FramelabError(f"--vector has {x.size} entries, expected {fam.dim}")
    dec = frame_decompose(analysis, x)
    norm = float(np.linalg.norm(x))
    return {
        "command": "reconstruct", "input": _input_block(problem), "vector": x,
        "coefficients": dec.coefficients, "reconstruction": dec.reconstruction,
        "analysis_coefficients": dec.analysis_coefficients,
        "analysis_reconstruction": dec.analysis_reconstruction,
        "residual": dec.residual,
        "relative_residual": dec.residual / norm if norm > 0 else 0.0,
    }, EXIT_OK


def _require_gram(problem):
    if problem.gram is None:
        raise FramelabError("this command needs a 'gram' matrix or a 'grid' in the problem file")
    return problem.gram


def cmd_transfer(problem, args):
    model = _require_gram(problem)
    ws = WKreinSpace(model)
    k = problem.euclidean_frame
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConditioningWarning)
        result = transfer_frame(ws, k)
    moved = result.synthesis
    if problem.grid is not None:
        moved = problem.grid.from_coordinates(moved)
    krein = frame_operator(result.as_krein_family())
    report = {
        "command": "transfer", "input": _input_block(problem),
        "coordinates": "samples" if problem.grid is not None else "euclidean",
        "transferred": {"columns": _columns(moved),
                        "matrix": MatrixFile.from_array("transferred", moved).to_dict()},
        "euclidean_bounds": {"lower": result.source_bounds[0], "upper": result.source_bounds[1]},
        "w_metric_bounds": {"lower": result.bounds[0], "upper": result.bounds[1]},
        "krein_bounds": {"lower": krein.lower_bound, "upper": krein.upper_bound},
        "naive_bounds": dict(zip(("lower", "upper"), naive_frame_bounds(ws, k))),
        "condition": model.condition,
        "completeness": completeness_certificate(model).as_dict(),
        "warnings": [str(w.message) for w in caught],
    }
    return report, EXIT_OK


def cmd_sweep(problem, args):
    base = problem.gram
    if base is None:
        base = GramModel.from_eigendata(np.ones(problem.family.dim), np.eye(problem.family.dim))
    curve = degradation_sweep(FrameFamily(np.eye(problem.family.dim), problem.euclidean_frame),
                              args.direction, args.params, base)
    bad = curve.violations()
    summary = {
        "command": "sweep", "input": _input_block(problem),
        "direction": curve.direction, "parameter_name": curve.parameter_name,
        "family_bounds": {"lower": curve.family_bounds[0], "upper": curve.family_bounds[1]},
        "samples": [{"parameter": s.parameter, "lower_bound": s.lower_bound,
                     "upper_bound": s.upper_bound, "envelope": s.envelope,
                     "envelope_ok": s.envelope_ok, "witness_norm": s.witness_norm,
                     "witness_window": s.witness_window, "witness_sum": s.witness_sum,
                     "witness_ok": s.witness_ok} for s in curve.samples],
        "all_envelopes_satisfied": not bad,
    }
    return (summary, curve.to_csv()), (EXIT_ENVELOPE if bad else EXIT_OK)


COMMANDS = {"analyze": cmd_analyze, "dual": cmd_dual, "reconstruct": cmd_reconstruct,
            "transfer": cmd_transfer, "sweep": cmd_sweep}


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors, --help, --version
        return exc.code
    try:
        problem = load_problem(args.file)
        result, code = COMMANDS[args.command](problem, args)
    except NotAFrameError as exc:
        print(f"framelab: not a frame: {exc}", file=sys.stderr)
        return EXIT_NOT_FRAME
    except KernelNotTrivialError as exc:
        print(f"framelab: kernel_not_trivial: {exc}", file=sys.stderr)
        return EXIT_KERNEL
    except (FramelabError, ValueError) as exc:
        print(f"framelab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "sweep":
        summary, csv_text = result
        # CSV goes to --out (summary on stdout) or to stdout (summary on stderr)
        if args.out:
            _emit(csv_text, args.out)
            sys.stdout.write(dumps_json(summary))
        else:
            sys.stdout.write(csv_text)
            sys.stderr.write(dumps_json(summary))
    else:
        _emit(dumps_json(result), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
