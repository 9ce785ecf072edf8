"""Command-line front end: fit, predict, shadow, bench.

Datasets are plain CSV with a header row; the target column (default
name ``f``) holds observed values and every other column is a feature.
Fitted models are stored as JSON documents that round-trip byte for
byte.  Exit codes: 0 on success, 1 on usage or data errors, 2 when the
solver's line search fails.
"""

import argparse
import ast
import csv
import json
import sys
from math import comb

import numpy as np

from .basis import FAMILIES, AffineMap
from .grassmann import as_subspace
from .solver import (
    STATUS_LINE_SEARCH_FAILURE,
    RidgeModel,
    SolverConfig,
    evaluate_model,
    evaluate_profile,
    fit_alternating,
    fit_gauss_newton,
)
from .testbed import EXPERIMENTS, run_experiment
from .varpro import ProjectedProblem

MODEL_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER_FAILURE = 2


class DataError(Exception):
    """Malformed input data; reported with a line/column diagnostic."""


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def read_table(path):
    """Read a CSV file into (header, M x W float array).

    Rejects ragged rows, unparsable cells, and non-finite values with a
    1-based line (and column) diagnostic.  A zero-byte file yields an
    empty header and a (0, 0) array.
    """
    with open(path, newline="") as fh:
        raw = [row for row in csv.reader(fh) if row != []]
    if not raw:
        return [], np.zeros((0, 0))
    header = [name.strip() for name in raw[0]]
    width = len(header)
    data = np.zeros((len(raw) - 1, width))
    for i, row in enumerate(raw[1:]):
        line_no = i + 2
        if len(row) != width:
            raise DataError(f"line {line_no}: expected {width} fields, found {len(row)}")
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"line {line_no}, column {header[j]!r}: cannot parse {cell.strip()!r} as a number"
                ) from None
            if not np.isfinite(value):
                raise DataError(f"line {line_no}, column {header[j]!r}: non-finite value {cell.strip()}")
            data[i, j] = value
    return header, data


def read_dataset(path, target):
    """Split a CSV table into feature matrix and target vector."""
    header, data = read_table(path)
    if target not in header:
        raise DataError(f"target column {target!r} not found; columns are {header}")
    t = header.index(target)
    features = [name for j, name in enumerate(header) if j != t]
    if not features:
        raise DataError("no feature columns besides the target")
    cols = [j for j in range(len(header)) if j != t]
    return features, data[:, cols], data[:, t]


def model_to_document(model: RidgeModel, metadata: dict) -> dict:
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "m": model.m,
        "n": model.n,
        "p": model.degree,
        "family": model.family,
        "affine": {"a": model.affine.a.tolist(), "d": model.affine.d.tolist()},
        "subspace": model.U.tolist(),  # row-major m x n
        "coefficients": model.coefficients.tolist(),
        "metadata": metadata,
    }


def model_from_document(doc: dict) -> RidgeModel:
    try:
        U = as_subspace(np.array(doc["subspace"], dtype=float).reshape(doc["m"], doc["n"]))
        affine = AffineMap(a=np.array(doc["affine"]["a"]), d=np.array(doc["affine"]["d"]))
        model = RidgeModel(
            family=doc["family"],
            U=U,
            affine=affine,
            coefficients=np.array(doc["coefficients"], dtype=float),
            degree=int(doc["p"]),
            training_residual_norm=float(doc["metadata"].get("residual_norm", np.nan)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise DataError(f"invalid model document: {exc}") from exc
    if model.affine.n != model.n or len(model.coefficients) != comb(model.n + model.p, model.p):
        raise DataError("model document dimensions are inconsistent")
    return model


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"cannot parse model file {path}: {exc}") from exc


def _open_output(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _write_csv(path, header, rows):
    fh, needs_close = _open_output(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        writer.writerows(rows)
    finally:
        if needs_close:
            fh.close()


def cmd_fit(args) -> int:
    features, points, values = read_dataset(args.input, args.target)
    if points.shape[0] < 1:
        raise DataError("no data rows in input")
    problem = ProjectedProblem(points=points, values=values, degree=args.degree, family=args.basis)
    seed = args.seed if args.seed is not None else int(np.random.SeedSequence().entropy % 2**32)
    config = SolverConfig(
        gamma=args.gamma,
        beta=args.beta,
        max_iter=args.max_iter,
        max_backtracks=args.max_backtracks,
        tol_residual_change=args.tol_residual_change,
        tol_grad=args.tol_grad,
        tol_subspace=args.tol_subspace,
        seed=seed,
        restarts=args.restarts,
    )
    if args.solver == "gauss-newton":
        model, report = fit_gauss_newton(problem, args.dim, config)
    else:
        model, report = fit_alternating(problem, args.dim, config, inner_steps=args.inner_steps)
    f_norm = float(np.linalg.norm(values))
    metadata = {
        "M": int(points.shape[0]),
        "residual_norm": float(model.training_residual_norm),
        "seed": seed,
        "solver": args.solver,
        "columns": features,
        "target": args.target,
    }
    with open(args.output, "w") as fh:
        fh.write(dumps_document(model_to_document(model, metadata)))
    normalized = model.training_residual_norm / f_norm if f_norm > 0 else 0.0
    print(f"fitted ridge model: m={model.m} n={model.n} p={model.p} family={model.family}")
    print(f"status: {report.status} after {len(report.iterations)} iterations "
          f"(restart {report.restart_index} of {config.restarts})")
    print(f"residual norm: {model.training_residual_norm:.6e} "
          f"(normalized {normalized:.6e}, from {report.initial_residual_norm:.6e})")
    print(f"seed: {seed}")
    print(f"model written to {args.output}")
    if report.status == STATUS_LINE_SEARCH_FAILURE:
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


def _feature_matrix(header, data, doc, model):
    """Pick the model's feature columns out of a table.

    Uses the column names recorded at fit time when they are all
    present; otherwise accepts a table of exactly the feature width,
    with or without the target column."""
    stored = doc.get("metadata", {}).get("columns")
    target = doc.get("metadata", {}).get("target")
    if stored and all(name in header for name in stored):
        return data[:, [header.index(name) for name in stored]]
    if target in header and len(header) - 1 == model.m:
        return data[:, [j for j, name in enumerate(header) if name != target]]
    if len(header) == model.m:
        return data
    raise DataError(
        f"input has {len(header)} columns but the model expects {model.m} features"
    )


def cmd_predict(args) -> int:
    doc = load_document(args.model)
    model = model_from_document(doc)
    header, data = read_table(args.input)
    if not header:
        _write_csv(args.output, [], [])
        return EXIT_OK
    X = _feature_matrix(header, data, doc, model)
    g = evaluate_model(model, X) if X.shape[0] else np.zeros(0)
    rows = [list(data[i]) + [g[i]] for i in range(X.shape[0])]
    _write_csv(args.output, header + ["g"], rows)
    return EXIT_OK


def cmd_shadow(args) -> int:
    doc = load_document(args.model)
    model = model_from_document(doc)
    header, data = read_table(args.input)
    if not header:
        _write_csv(args.output, [], [])
        return EXIT_OK
    X = _feature_matrix(header, data, doc, model)
    target = doc.get("metadata", {}).get("target")
    observed = None
    if target in header:
        observed = data[:, header.index(target)]
    Y = X @ model.U if X.shape[0] else np.zeros((0, model.n))
    g = evaluate_profile(model, Y) if X.shape[0] else np.zeros(0)
    out_header = [f"y{k + 1}" for k in range(model.n)]
    columns = [Y[:, k] for k in range(model.n)]
    if observed is not None:
        out_header.append("f")
        columns.append(observed)
    out_header.append("g")
    columns.append(g)
    order = np.argsort(Y[:, 0], kind="stable") if model.n == 1 and X.shape[0] else np.arange(X.shape[0])
    rows = [[col[i] for col in columns] for i in order]
    _write_csv(args.output, out_header, rows)
    if model.n == 1 and X.shape[0]:
        curve_path = args.curve
        if curve_path is None and args.output != "-":
            curve_path = args.output + ".curve.csv"
        if curve_path is not None:
            grid = np.linspace(Y[:, 0].min(), Y[:, 0].max(), 200)
            fit_curve = evaluate_profile(model, grid.reshape(-1, 1))
            _write_csv(curve_path, ["y1", "g"], [[grid[i], fit_curve[i]] for i in range(200)])
    return EXIT_OK


def _parse_option(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise DataError(f"options must look like key=value, got {text!r}")
    try:
        parsed = ast.literal_eval(value)
    except (ValueError, SyntaxError):
        parsed = value
    return key, parsed


def cmd_bench(args) -> int:
    config = {}
    if args.seed is not None:
        config["seed"] = args.seed
    if args.replicates is not None:
        config["replicates"] = args.replicates
    for item in args.option:
        key, value = _parse_option(item)
        config[key] = value
    try:
        result = run_experiment(args.experiment, config)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    fh, needs_close = _open_output(args.output)
    try:
        result.write_csv(fh)
    finally:
        if needs_close:
            fh.close()
    return EXIT_OK


def _build_parser():
    parser = _Parser(prog="polyridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", parents=[], help="fit a polynomial ridge model to CSV data")
    fit.add_argument("input", help="training CSV with a header row")
    fit.add_argument("--target", default="f", help="name of the target column (default f)")
    fit.add_argument("--dim", type=int, required=True, help="subspace dimension n")
    fit.add_argument("--degree", type=int, required=True, help="total polynomial degree p")
    fit.add_argument("--basis", default="legendre", choices=FAMILIES)
    fit.add_argument("--solver", default="gauss-newton", choices=("gauss-newton", "alternating"))
    fit.add_argument("--inner-steps", type=int, default=100,
                     help="steepest-descent steps per alternating iteration")
    fit.add_argument("--restarts", type=int, default=1)
    fit.add_argument("--seed", type=int, default=None)
    fit.add_argument("--output", default="model.json", help="model file to write")
    fit.add_argument("--gamma", type=float, default=0.5, help="backtracking reduction factor")
    fit.add_argument("--beta", type=float, default=1e-6, help="Armijo tolerance")
    fit.add_argument("--max-iter", type=int, default=200)
    fit.add_argument("--max-backtracks", type=int, default=40)
    fit.add_argument("--tol-grad", type=float, default=None)
    fit.add_argument("--tol-residual-change", type=float, default=1e-12)
    fit.add_argument("--tol-subspace", type=float, default=1e-9)
    fit.set_defaults(func=cmd_fit)

    predict = sub.add_parser("predict", help="evaluate a fitted model on CSV points")
    predict.add_argument("model", help="model JSON file")
    predict.add_argument("input", help="CSV of points")
    predict.add_argument("--output", default="-", help="output CSV path or - for stdout")
    predict.set_defaults(func=cmd_predict)

    shadow = sub.add_parser("shadow", help="emit projected coordinates, data and fit values")
    shadow.add_argument("model")
    shadow.add_argument("input")
    shadow.add_argument("--output", default="-")
    shadow.add_argument("--curve", default=None,
                        help="where to write the dense fitted-curve table (n=1 models)")
    shadow.set_defaults(func=cmd_shadow)

    bench = sub.add_parser("bench", help="run a named experiment and emit CSV records")
    bench.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--replicates", type=int, default=None)
    bench.add_argument("--option", action="append", default=[], metavar="KEY=VALUE",
                       help="extra experiment options (repeatable)")
    bench.add_argument("--output", default="-")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
