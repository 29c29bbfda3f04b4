"""Command-line entry point.

Truncation settings resolve as flag > environment variable > built-in
default, using ``QCSIM_MPS_MAX_BOND``, ``QCSIM_MPS_ABS_CUTOFF`` and
``QCSIM_MPS_RELATIVE_CUTOFF``.

Exit codes: 0 success, 1 usage error, 2 infeasible simulation.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from qcsim.backends import BACKENDS
from qcsim.bench.fitting import MODELS, FitError, best_fit, fit_scaling
from qcsim.bench.harness import (
    DEFAULT_REPETITIONS,
    DEFAULT_SHOTS,
    DEFAULT_WARMUP,
    CircuitSpec,
    records_to_csv,
    run_bench,
    simulate,
    sweep,
)
from qcsim.bench.memory import InfeasibleSimulation, estimate_memory, parse_bytes
from qcsim.bench.validate import DEFAULT_CHIS, VALIDATION_SHOTS, validate_topk
from qcsim.circuit import BUILDERS, CircuitError, QasmError, build, emit_qasm, metrics, parse_qasm_subset
from qcsim.tensor import DEFAULT_ABS_CUTOFF, DEFAULT_MAX_BOND, DEFAULT_REL_CUTOFF, TruncationConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2

ENV_MAX_BOND = "QCSIM_MPS_MAX_BOND"
ENV_ABS_CUTOFF = "QCSIM_MPS_ABS_CUTOFF"
ENV_REL_CUTOFF = "QCSIM_MPS_RELATIVE_CUTOFF"

COMMANDS = ("run", "sweep", "validate", "fit", "estimate", "parse")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Fully resolved invocation."""

    command: str
    circuit: str | None = None
    n_qubits: int | None = None
    backend: str = "mps"
    shots: int = DEFAULT_SHOTS
    seed: int | None = 0
    truncation: TruncationConfig = field(default_factory=TruncationConfig)
    output: str | None = None
    fmt: str = "json"


def resolve_truncation(args: argparse.Namespace, env: Mapping[str, str]) -> TruncationConfig:
    def pick(flag, name: str, default, cast):
        if flag is not None:
            return flag
        raw = env.get(name)
        if raw is not None and raw.strip():
            try:
                return cast(raw)
            except ValueError:
                raise UsageError(f"{name}={raw!r} is not a valid {cast.__name__}") from None
        return default

    try:
        return TruncationConfig(
            max_bond=pick(args.max_bond, ENV_MAX_BOND, DEFAULT_MAX_BOND, int),
            abs_cutoff=pick(args.abs_cutoff, ENV_ABS_CUTOFF, DEFAULT_ABS_CUTOFF, float),
            rel_cutoff=pick(args.rel_cutoff, ENV_REL_CUTOFF, DEFAULT_REL_CUTOFF, float),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    """``"8,12,16"`` or ``"10:90:10"`` (inclusive stop)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step <= 0:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list like 8,12,16 or a range like 10:90:10, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcsim", description="State-vector and MPS quantum circuit simulation.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--circuit", help=f"one of {sorted(BUILDERS)}")
        p.add_argument("--in", dest="infile", help="QASM-subset file instead of --circuit")
        p.add_argument("--backend", default="mps", help="sv or mps")
        p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-bond", type=int, default=None)
        p.add_argument("--abs-cutoff", type=float, default=None)
        p.add_argument("--rel-cutoff", type=float, default=None)
        p.add_argument("--guard", default=None, help="memory guard, e.g. 4GiB (default: 75%% of free memory)")
        p.add_argument("--threads", type=int, default=None, help="BLAS thread count")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    p = sub.add_parser("run", help="sample one circuit")
    common(p)
    p.add_argument("--qubits", type=int)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--warmup", type=int, default=0)

    p = sub.add_parser("sweep", help="benchmark over a range of qubit counts")
    common(p)
    p.add_argument("--qubits", type=_int_list, required=True, help="8,12,16 or 10:90:10")
    p.add_argument("--repetitions", type=int, default=DEFAULT_REPETITIONS)
    p.add_argument("--warmup", type=int, default=DEFAULT_WARMUP)
    p.add_argument("--no-fit", action="store_true")
    p.add_argument("--workers", type=int, default=1, help="run points concurrently (off by default)")

    p = sub.add_parser("validate", help="top-k agreement of MPS against the exact reference")
    common(p)
    p.set_defaults(shots=VALIDATION_SHOTS)
    p.add_argument("--qubits", type=int)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--chi", type=_int_list, default=list(DEFAULT_CHIS))
    p.add_argument("--exact", action="store_true", help="use exact MPS probabilities instead of sampling")

    p = sub.add_parser("fit", help="fit runtime models to (n, seconds) points")
    p.add_argument("--in", dest="infile", required=True, help="CSV with columns n and seconds (or median_s)")
    p.add_argument("--model", choices=MODELS + ("best",), default="best")
    p.add_argument("--out", default=None)

    p = sub.add_parser("estimate", help="memory estimate and feasibility verdict")
    p.add_argument("--backend", default="sv")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--precision", choices=("single", "double"), default="double")
    p.add_argument("--max-bond", type=int, default=None)
    p.add_argument("--budget", default=None, help="e.g. 96GiB")
    p.add_argument("--out", default=None)

    p = sub.add_parser("parse", help="read a QASM-subset file and report metrics")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--emit", action="store_true", help="print normalised QASM instead of JSON")
    p.add_argument("--out", default=None)
    return parser


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _check_backend(name: str) -> None:
    if name not in BACKENDS:
        raise UsageError(f"unknown backend {name!r}; candidates: {', '.join(BACKENDS)}")


def _circuit(args: argparse.Namespace, n: int | None):
    if getattr(args, "infile", None):
        with open(args.infile) as fh:
            return parse_qasm_subset(fh.read(), name=os.path.basename(args.infile))
    if not args.circuit:
        raise UsageError(f"--circuit is required; candidates: {', '.join(sorted(BUILDERS))}")
    if args.circuit.lower().replace("-", "_") not in set(BUILDERS) | {"cc", "quantum_volume"}:
        raise UsageError(f"unknown circuit {args.circuit!r}; candidates: {', '.join(sorted(BUILDERS))}")
    if n is None:
        raise UsageError("--qubits is required")
    return build(args.circuit, n, seed=args.seed)


def _threads(count: int | None):
    if count is None:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=count)


def _cmd_run(args, rc: RunConfig, guard: int | None) -> int:
    cfg = rc.truncation
    circuit = _circuit(args, args.qubits)
    if args.infile:
        result = simulate(circuit, args.backend, args.shots, cfg, args.seed, guard)
        payload = {
            "circuit": circuit.name,
            "n_qubits": circuit.n_qubits,
            "backend": args.backend,
            "shots": args.shots,
            "seed": args.seed,
            "histogram": result.histogram,
            "timing": {"phase_timers": result.stats.get("phase_timers", {})},
        }
        _write(_dump(payload), args.out)
        return EXIT_OK
    spec = CircuitSpec(args.circuit, args.qubits, args.seed)
    record = run_bench(spec, args.backend, args.shots, cfg, args.seed, args.repetitions, args.warmup, guard)
    record_dict = record.as_dict()
    record_dict["metrics"] = metrics(circuit).as_dict()
    _write(records_to_csv([record]) if args.fmt == "csv" else _dump(record_dict), args.out)
    if not record.ok:
        print(record.status, file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_sweep(args, rc: RunConfig, guard: int | None) -> int:
    cfg = rc.truncation
    _circuit(args, args.qubits[0] if args.qubits else None)
    result = sweep(
        args.circuit, args.backend, args.qubits, cfg, args.seed, args.shots,
        args.repetitions, args.warmup, not args.no_fit, guard, args.workers,
    )
    _write(records_to_csv(result.records) if args.fmt == "csv" else _dump(result.as_dict()), args.out)
    if result.best is not None:
        print(f"best model: {result.best.model} (R2={result.best.r2:.4f})", file=sys.stderr)
    return EXIT_OK


def _cmd_validate(args, rc: RunConfig, guard: int | None) -> int:
    cfg = rc.truncation
    circuit = _circuit(args, args.qubits)
    shots = None if args.exact else args.shots
    try:
        report = validate_topk(circuit, args.k, shots, args.chi, args.seed, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(report.table(), file=sys.stderr if args.out is None else sys.stdout)
    _write(_dump(report.as_dict()), args.out)
    return EXIT_OK


def _read_points(path: str) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    points = []
    for row in rows:
        if row.get("status", "ok") not in ("ok", ""):
            continue
        t = row.get("seconds") or row.get("median_s")
        if t in (None, ""):
            raise UsageError(f"{path}: rows need 'n' and 'seconds' (or 'median_s') columns")
        points.append((float(row["n"]), float(t)))
    return points


def _cmd_fit(args) -> int:
    points = _read_points(args.infile)
    try:
        if args.model == "best":
            best, fits = best_fit(points)
            payload = {"best_model": best.model, "fits": {k: v.as_dict() for k, v in fits.items()}}
        else:
            payload = fit_scaling(points, args.model).as_dict()
    except FitError as exc:
        raise UsageError(str(exc)) from None
    _write(_dump(payload), args.out)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    _check_backend(args.backend)
    if args.backend == "mps" and args.max_bond is None:
        args.max_bond = DEFAULT_MAX_BOND
    try:
        est = estimate_memory(args.backend, args.qubits, args.precision, args.max_bond, args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(est.verdict())
    if args.out:
        _write(_dump(est.as_dict()), args.out)
    return EXIT_OK


def _cmd_parse(args) -> int:
    with open(args.infile) as fh:
        text = fh.read()
    try:
        circuit = parse_qasm_subset(text, name=os.path.basename(args.infile))
    except QasmError as exc:
        raise UsageError(f"{args.infile}: {exc}") from None
    if args.emit:
        _write(emit_qasm(circuit), args.out)
    else:
        payload = {"name": circuit.name, "n_qubits": circuit.n_qubits, "n_clbits": circuit.n_clbits,
                   "ops": len(circuit.ops), "metrics": metrics(circuit).as_dict()}
        _write(_dump(payload), args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None, env: Mapping[str, str] | None = None) -> int:
    env = os.environ if env is None else env
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "parse":
            return _cmd_parse(args)
        _check_backend(args.backend)
        rc = RunConfig(
            command=args.command,
            circuit=args.circuit,
            n_qubits=args.qubits if isinstance(args.qubits, int) else None,
            backend=args.backend,
            shots=args.shots,
            seed=args.seed,
            truncation=resolve_truncation(args, env),
            output=args.out,
            fmt=args.fmt,
        )
        try:
            guard = parse_bytes(args.guard) if args.guard else None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        handler = {"run": _cmd_run, "sweep": _cmd_sweep, "validate": _cmd_validate}[args.command]
        with _threads(args.threads):
            return handler(args, rc, guard)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleSimulation as exc:
        print(f"qcsim: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CircuitError, QasmError, OSError) as exc:
        print(f"qcsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
