"""Command-line entry point: verify, sweep, transform, entropy, selftest.

Exit codes: 0 when every slack is within tolerance, 2 when a violation is
found, 3 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .entropy import renyi_entropy, shannon_entropy
from .grid import load_wavefunction, save_wavefunction, wavefunction_to_csv, wavefunction_to_dict
from .harness import RELATIONS, SWEEP_AXES, ExperimentSpec, run_experiment, sweep, sweep_to_csv
from .lct import lct_apply, lct_apply_direct
from .selftest import run_selftest
from .symplectic import SymplecticMatrix, fourier_form, identity, rotation

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not violations
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _matrix_arg(value):
    if value is None or value in ("identity", "fourier", "rotation", "random"):
        return value
    return _load_json(value)


def _rows_arg(value):
    if value is None or value == "random":
        return value
    return _load_json(value)


def _state_arg(value):
    if value in ("vacuum", "squeezed", "correlated", "fock", "cat", "file"):
        return value
    return _load_json(value)


TEMPLATE_FLAGS = {
    "relation": "relation",
    "n": "n",
    "N": "N",
    "seed": "seed",
    "grid_points": "grid_points",
    "grid_extent": "grid_extent",
    "alpha": "alpha",
    "beta": "beta",
    "theta": "theta",
    "phi": "phi",
    "state_param": "state_param",
    "state_file": "state_file",
}


def _spec_from_args(args) -> ExperimentSpec:
    data = _load_json(args.spec) if args.spec else {}
    for flag, field in TEMPLATE_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            data[field] = value
    if args.state is not None:
        data["state"] = _state_arg(args.state)
    for flag, conv in (("A", _matrix_arg), ("B", _matrix_arg), ("rows_a", _rows_arg), ("rows_b", _rows_arg)):
        value = getattr(args, flag)
        if value is not None:
            data[flag] = conv(value)
    if args.grid:
        data["use_grid"] = True
    if "relation" not in data:
        raise InputError("no relation given (use --relation or a spec file)")
    return ExperimentSpec.from_dict(data)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    report = run_experiment(spec)
    if args.format == "csv":
        text = sweep_to_csv([{"param": 0.0, "report": report, "error": ""}], spec.relation)
    else:
        text = report.to_json()
    _emit(text, args.out)
    return EXIT_VIOLATION if report.status == "violation" else EXIT_OK


def cmd_sweep(args) -> int:
    template = _spec_from_args(args)
    values = np.linspace(args.start, args.stop, args.num)
    if args.open:
        values = values[1:-1] if args.num > 2 else values
    rows = sweep(template, args.axis, values, workers=args.workers)
    if args.format == "json":
        text = json.dumps(
            [{"param": r["param"], "error": r["error"], "report": r["report"].to_dict(timing=False) if r["report"] else None} for r in rows],
            indent=2,
        )
    else:
        text = sweep_to_csv(rows, template.relation)
    _emit(text, args.out)
    if any(r["report"] is not None and r["report"].status == "violation" for r in rows):
        return EXIT_VIOLATION
    return EXIT_OK


def _named_matrix(value: str, n: int) -> SymplecticMatrix:
    if value == "identity":
        return identity(n)
    if value == "fourier":
        return fourier_form(n)
    if value.startswith("rotation:"):
        return rotation(float(value.split(":", 1)[1]), n)
    return SymplecticMatrix.from_dict(_load_json(value))


def cmd_transform(args) -> int:
    wf = load_wavefunction(args.input)
    S = _named_matrix(args.matrix, wf.grid.n)
    out = lct_apply_direct(wf, S) if args.method == "direct" else lct_apply(wf, S)
    if args.format == "csv":
        _emit(wavefunction_to_csv(out), args.out)
    elif args.out:
        save_wavefunction(out, args.out, encoding=args.encoding)
    else:
        _emit(json.dumps(wavefunction_to_dict(out, args.encoding)), None)
    return EXIT_OK


def cmd_entropy(args) -> int:
    wf = load_wavefunction(args.input)
    density = wf.density()
    result = {"norm": wf.norm(), "shannon": shannon_entropy(density, wf.grid)}
    if args.alpha is not None:
        result["renyi"] = renyi_entropy(density, wf.grid, args.alpha)
        result["alpha"] = args.alpha
    if args.format == "csv":
        keys = list(result)
        _emit(",".join(keys) + "\n" + ",".join(repr(float(result[k])) for k in keys), args.out)
    else:
        _emit(json.dumps(result, indent=2), args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_VIOLATION


def _add_template_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", help="ExperimentSpec JSON file; flags override its fields")
    p.add_argument("--relation", choices=RELATIONS)
    p.add_argument("--n", type=int, help="number of measured quadratures")
    p.add_argument("--N", type=int, help="number of modes (defaults to n)")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--grid-extent", dest="grid_extent", type=float, help="grid half-width")
    p.add_argument("--alpha", type=float, help="Renyi order for theorem2")
    p.add_argument("--beta", type=float, help="conjugate order (default 1/(2 - 1/alpha))")
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--state", help="vacuum|squeezed|correlated|fock|cat|file or a GaussianState JSON file")
    p.add_argument("--state-param", dest="state_param", type=float, help="squeezing, Fock index or cat amplitude")
    p.add_argument("--state-file", dest="state_file", help="wavefunction JSON for --state file")
    p.add_argument("--A", dest="A", help="identity|fourier|rotation|random or a matrix JSON file")
    p.add_argument("--B", dest="B", help="identity|fourier|rotation|random or a matrix JSON file")
    p.add_argument("--rows-a", dest="rows_a", help="random or a row-set JSON file")
    p.add_argument("--rows-b", dest="rows_b", help="random or a row-set JSON file")
    p.add_argument("--grid", action="store_true", help="force the grid path for Gaussian states")
    p.add_argument("--out", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lctur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run one experiment")
    _add_template_flags(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run an experiment template over a parameter range")
    _add_template_flags(p)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--num", type=int, default=50)
    p.add_argument("--open", action="store_true", help="drop both endpoints of the range")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("transform", help="apply an LCT to a wavefunction file")
    p.add_argument("--input", required=True)
    p.add_argument("--matrix", required=True, help="identity|fourier|rotation:<angle> or a matrix JSON file")
    p.add_argument("--method", choices=("auto", "direct"), default="auto")
    p.add_argument("--encoding", choices=("base64", "array"), default="base64")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("entropy", help="estimate entropies of a wavefunction file")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, TypeError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
