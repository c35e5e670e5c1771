"""Command-line interface: ``fockpipe run | paper | validate``.

Exit codes: 0 success, 1 validation failure, 2 circuit parse error, 3 truncation
guard, 4 invalid flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, metrics, scheme, validation
from .circuit import default_circuit_cutoff, run_circuit
from .fock import SqueezerOrder, TruncationError
from .textformat import CircuitParseError, parse_circuit

EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_TRUNCATION = 3
EXIT_FLAGS = 4
CUTOFF_ENV = "FOCKPIPE_CUTOFF"
SWEEP_PARAMS = ("alpha", "beta", "g")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> float:
    """Round to 12 significant digits (round-half-even on the decimal expansion)."""
    return float(format(x, ".12g"))


def _clean(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return None
        return fmt(float(value))
    if isinstance(value, complex):
        return {"re": fmt(value.real), "im": fmt(value.imag)}
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _cell(value) -> str:
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def resolve_cutoff(flag: int | None, circuit) -> int:
    if flag is not None:
        if flag < 0:
            raise UsageError("--cutoff must be non-negative")
        return flag
    env = os.environ.get(CUTOFF_ENV)
    if env is not None and env.strip():
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{CUTOFF_ENV}={env!r} is not an integer") from None
        if value < 0:
            raise UsageError(f"{CUTOFF_ENV} must be non-negative")
        return value
    return default_circuit_cutoff(circuit)


# -- run ------------------------------------------------------------------------

RUN_COLUMNS = [
    "outcome", "probability", "weight", "relative", "fidelity_to_expected",
    "entropy", "log_negativity", "tail_mass",
]


def _outcome_label(outcome: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in outcome.items())


def run_report(text: str, cutoff_flag: int | None) -> dict:
    circuit = parse_circuit(text)
    cutoff = resolve_cutoff(cutoff_flag, circuit)
    branches = run_circuit(circuit, cutoff)
    params = scheme.match_paper_circuit(circuit)
    expected = {}
    if params is not None:
        for r in scheme.compare_branches(params, branches, cutoff):
            expected[r.outcome] = r.fidelity
    records = []
    for b in branches:
        fid = None
        if params is not None:
            fid = expected.get((b.outcome["a_i"], b.outcome["b_i"]))
        two_sided = b.state.mode_count >= 2
        records.append(
            {
                "outcome": _outcome_label(b.outcome),
                "probability": b.probability,
                "weight": b.weight,
                "relative": b.relative,
                "fidelity_to_expected": fid,
                "entropy": metrics.entanglement_entropy(b.state, (0,)) if two_sided else None,
                "log_negativity": metrics.log_negativity(b.state, (0,)) if two_sided else None,
                "tail_mass": b.state.tail_mass(),
            }
        )
    return {
        "tool": "fockpipe",
        "version": __version__,
        "command": "run",
        "cutoff": cutoff,
        "modes": list(circuit.mode_names),
        "scheme_params": _params_echo(params) if params is not None else None,
        "branches": records,
    }


def _params_echo(p: scheme.SchemeParams) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "g": p.g, "squeezer_order": p.squeezer_order.value}


def cmd_run(args) -> int:
    try:
        if args.circuit_file == "-":
            text = sys.stdin.read()
        else:
            with open(args.circuit_file, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {args.circuit_file}: {exc}") from None
    start = time.perf_counter()
    report = run_report(text, args.cutoff)
    if args.timing:
        report["timing_seconds"] = time.perf_counter() - start
    if args.format == "json":
        sys.stdout.write(to_json(report))
    else:
        columns = RUN_COLUMNS + ["cutoff"]
        rows = [dict(r, cutoff=report["cutoff"]) for r in report["branches"]]
        sys.stdout.write(to_csv(rows, columns))
    return 0


# -- paper ----------------------------------------------------------------------

PAPER_COLUMNS = [
    "alpha_re", "alpha_im", "beta_re", "beta_im", "g", "cutoff", "a_click", "b_click",
    "probability", "weight", "expected_weight", "fidelity", "entropy", "entropy_oracle",
    "log_negativity", "tail_mass", "ideal_fidelity", "omega",
]


def parse_complex(text: str) -> complex:
    try:
        value = complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise UsageError(f"not finite: {text!r}")
    return value


def parse_sweep(text: str) -> tuple[str, list[float]]:
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in SWEEP_PARAMS:
        raise UsageError(f"sweep must be <{'|'.join(SWEEP_PARAMS)}>:start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"malformed sweep {text!r}") from None
    if steps < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError("sweep needs finite bounds and at least one step")
    values = [start] if steps == 1 else [float(v) for v in np.linspace(start, stop, steps)]
    return parts[0], values


def paper_rows(params: scheme.SchemeParams, cutoff_flag: int | None) -> list[dict]:
    circuit = scheme.build_paper_circuit(params)
    cutoff = resolve_cutoff(cutoff_flag, circuit)
    records = scheme.compare_branches(params, run_circuit(circuit, cutoff), cutoff)
    rows = []
    for r in records:
        ideal_fid = omega = None
        if params.beta == 0 and r.outcome != (0, 0) and not r.empty:
            ideal = scheme.idealize_hybrid(scheme.expected_branch(params, r.outcome))
            ideal_fid, omega = ideal.fidelity, ideal.omega
        rows.append(
            {
                "alpha_re": params.alpha.real, "alpha_im": params.alpha.imag,
                "beta_re": params.beta.real, "beta_im": params.beta.imag,
                "g": params.g, "cutoff": cutoff,
                "a_click": r.outcome[0], "b_click": r.outcome[1],
                "probability": r.probability, "weight": r.weight,
                "expected_weight": r.expected_weight, "fidelity": r.fidelity,
                "entropy": r.entropy, "entropy_oracle": r.entropy_oracle,
                "log_negativity": r.log_negativity, "tail_mass": r.tail_mass,
                "ideal_fidelity": ideal_fid, "omega": omega,
            }
        )
    return rows


def monotonicity(values) -> str:
    vals = [v for v in values if v is not None]
    if len(vals) < 2:
        return "n/a"
    diffs = np.diff(vals)
    if np.all(diffs >= -1e-12):
        return "nondecreasing"
    if np.all(diffs <= 1e-12):
        return "nonincreasing"
    return "not monotone"


def cmd_paper(args) -> int:
    base = {"alpha": parse_complex(args.alpha), "beta": parse_complex(args.beta), "g": args.g}
    points = [dict(base)]
    sweep = None
    if args.sweep:
        name, values = parse_sweep(args.sweep)
        sweep = {"param": name, "values": values}
        points = [dict(base, **{name: v}) for v in values]
    rows = []
    for point in points:
        try:
            params = scheme.SchemeParams(point["alpha"], point["beta"], point["g"], args.order)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows.extend(paper_rows(params, args.cutoff))
    diagnostics = {}
    if sweep is not None:
        for a, b in scheme.OUTCOMES:
            series = [r["entropy"] for r in rows if (r["a_click"], r["b_click"]) == (a, b)]
            diagnostics[f"entropy_{a}{b}"] = monotonicity(series)
    if args.format == "json":
        report = {
            "tool": "fockpipe", "version": __version__, "command": "paper",
            "squeezer_order": args.order, "sweep": sweep, "rows": rows,
            "diagnostics": diagnostics,
        }
        sys.stdout.write(to_json(report))
    else:
        sys.stdout.write(to_csv(rows, PAPER_COLUMNS))
        for key, value in diagnostics.items():
            print(f"# {key}: {value}", file=sys.stderr)
    return 0


# -- validate -------------------------------------------------------------------


def cmd_validate(args) -> int:
    checks = validation.run_checks(args.inject_fault)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}: residual={format(c.residual, '.12g')} tolerance={format(c.tolerance, '.12g')}")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"{len(failed)} of {len(checks)} checks failed: {', '.join(failed)}")
        return EXIT_VALIDATION
    print(f"all {len(checks)} checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockpipe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fockpipe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a circuit file ('-' for stdin)")
    run.add_argument("circuit_file")
    run.add_argument("--cutoff", type=int)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--timing", action="store_true", help="include wall-clock timing (non-deterministic)")
    run.set_defaults(func=cmd_run)

    paper = sub.add_parser("paper", help="reproduce the conditional branch table")
    paper.add_argument("--alpha", default="1.2")
    paper.add_argument("--beta", default="0.7")
    paper.add_argument("--g", type=float, default=0.05)
    paper.add_argument("--order", choices=[o.value for o in SqueezerOrder], default="first")
    paper.add_argument("--sweep", help="param:start:stop:steps, param in alpha|beta|g")
    paper.add_argument("--cutoff", type=int)
    paper.add_argument("--format", choices=("json", "csv"), default="csv")
    paper.set_defaults(func=cmd_paper)

    val = sub.add_parser("validate", help="run the embedded golden checks")
    val.add_argument("--inject-fault", choices=validation.FAULTS, help=argparse.SUPPRESS)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fockpipe: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except CircuitParseError as exc:
        name = getattr(args, "circuit_file", "<input>")
        print(f"{name}:{exc.diagnostic}", file=sys.stderr)
        return EXIT_PARSE
    except TruncationError as exc:
        print(f"fockpipe: truncation guard: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION


if __name__ == "__main__":
    sys.exit(main())
