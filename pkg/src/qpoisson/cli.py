"""Command-line front end: ``qpoisson {parse,simulate,solve,sweep,metrics}``."""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import analysis
from .core import StateVector
from .gates import Circuit, CircuitError
from .noise import CHANNEL_CODES
from .poisson import (
    PoissonInstance,
    build_sine_transform,
    build_solver,
    builtin_instance,
    solve,
)
from .qasm import ParseError, parse, serialize
from .sim import outcome_distribution, run_ideal, sample

OUT_ENV = "QPOISSON_OUT_DIR"
BUILTINS = ("listing_n2", "listing_n3", "solver_n<k>", "sine_n<k>")


class StageError(Exception):
    """Failure tagged with the pipeline stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def _builtin(name: str) -> Circuit | None:
    m = re.fullmatch(r"(listing|solver|sine)_n(\d+)", name)
    if not m:
        return None
    kind, n = m.group(1), int(m.group(2))
    try:
        if kind == "listing":
            return analysis.reference_circuit(n)
        if kind == "solver":
            return build_solver(builtin_instance(n))
        return build_sine_transform(n)
    except (ValueError, KeyError) as exc:
        raise StageError("build", str(exc)) from None


def load_circuit(source: str) -> Circuit:
    circuit = _builtin(source)
    if circuit is not None:
        return circuit
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise StageError("io", f"cannot read {source}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise StageError("io", f"{source} is not UTF-8 text") from None
    try:
        return parse(text)
    except ParseError as exc:
        raise StageError("parse", str(exc)) from None


def _cmd_parse(args) -> int:
    print(serialize(load_circuit(args.file)))
    return 0


def _readout_qubits(circuit: Circuit) -> list[int]:
    meas = circuit.measurements()
    if not meas:
        return list(range(circuit.num_qubits - 1, -1, -1))
    # classical bit order, highest clbit leftmost
    by_clbit = {}
    for op in meas:
        by_clbit[op.clbit] = op.qubits[0]
    return [by_clbit[c] for c in sorted(by_clbit, reverse=True)]


def _cmd_simulate(args) -> int:
    circuit = load_circuit(args.source)
    qubits = _readout_qubits(circuit)
    try:
        state = run_ideal(circuit.without_measurements(), StateVector.zero(circuit.num_qubits))
    except (ValueError, CircuitError) as exc:
        raise StageError("simulate", str(exc)) from None
    if args.shots is None:
        for o in outcome_distribution(state, qubits):
            if o.probability > 1e-12:
                print(f"{o.bitstring} {o.probability:.10f}")
    else:
        counts = sample(state, args.shots, args.seed, qubits)
        for bits in sorted(counts):
            print(f"{bits} {counts[bits]}")
    return 0


def _load_instance(args) -> PoissonInstance:
    if args.b_file is None:
        try:
            return builtin_instance(args.n)
        except (KeyError, ValueError):
            raise StageError("solve", f"no built-in instance for n={args.n}; pass --b-file") from None
    try:
        data = json.loads(Path(args.b_file).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StageError("io", f"cannot read {args.b_file}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise StageError("io", f"{args.b_file}: invalid JSON ({exc.msg})") from None
    b = data.get("b") if isinstance(data, dict) else data
    n = data.get("n", args.n) if isinstance(data, dict) else args.n
    if n != args.n:
        raise StageError("solve", f"--n {args.n} disagrees with n={n} in {args.b_file}")
    try:
        return PoissonInstance(args.n, [float(x) for x in b])
    except (TypeError, ValueError) as exc:
        raise StageError("solve", str(exc)) from None


def _cmd_solve(args) -> int:
    instance = _load_instance(args)
    try:
        result = solve(instance)
    except (ValueError, CircuitError) as exc:
        raise StageError("solve", str(exc)) from None
    width = instance.n
    print(f"n = {instance.n}, N = {instance.N}")
    print("post-selected probabilities (register B):")
    for k, p in result.post_selected_probs.items():
        print(f"  |{k:0{width}b}>  {p:.6f}   oracle {result.oracle_probs[k]:.6f}")
    print(f"success probability: {result.success_probability:.6f}")
    print("solution  quantum            classical          abs diff")
    for k, (q, c) in enumerate(zip(result.solution_estimate, result.oracle_solution), start=1):
        print(f"  v[{k}]  {q: .12e}  {c: .12e}  {abs(q - c):.2e}")
    worst = float(np.max(np.abs(result.solution_estimate - result.oracle_solution)))
    print(f"max abs difference: {worst:.3e}")
    return 0


def _cmd_sweep(args) -> int:
    codes = ["ad", "pd", "bf", "dp"] if args.noise == "all" else [args.noise]
    config = analysis.SweepConfig(
        n=args.n, noise_types=tuple(codes), i_range=tuple(range(args.i_min, args.i_max + 1)),
        mode=args.mode, trials=args.trials, shots=args.shots, seed=args.seed,
        circuit=args.circuit, gate_set=args.noisy_gates, workers=args.workers)
    start = time.perf_counter()
    try:
        report = analysis.run_sweep(config)
    except (ValueError, CircuitError) as exc:
        raise StageError("sweep", str(exc)) from None
    elapsed = time.perf_counter() - start
    out = args.out or os.environ.get(OUT_ENV)
    csv_text = report.to_csv()
    json_text = report.to_json()
    if out is None:
        sys.stdout.write(csv_text)
    else:
        try:
            path = Path(out)
            path.mkdir(parents=True, exist_ok=True)
            stem = f"sweep_n{args.n}_{args.noise}"
            (path / f"{stem}.csv").write_text(csv_text, encoding="utf-8")
            (path / f"{stem}.json").write_text(json_text + "\n", encoding="utf-8")
        except OSError as exc:
            raise StageError("io", f"cannot write to {out}: {exc.strerror or exc}") from None
        print(f"wrote {path / stem}.csv and .json")
    for code, p in report.thresholds().items():
        shown = "not reached" if p is None else f"{p:.3e}"
        print(f"threshold D=0.10 {code}: {shown}", file=sys.stderr)
    print(f"elapsed {elapsed:.1f}s", file=sys.stderr)
    return 0


def _cmd_metrics(args) -> int:
    m = analysis.circuit_metrics(load_circuit(args.source))
    print(json.dumps(asdict(m), indent=2, sort_keys=True))
    return 0


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpoisson", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    builtin_help = "QASM file or built-in name (" + ", ".join(BUILTINS) + ")"

    p = sub.add_parser("parse", help="parse a QASM file and print it normalized")
    p.add_argument("file")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("simulate", help="ideal run; exact distribution or sampled counts")
    p.add_argument("source", help=builtin_help)
    p.add_argument("--shots", type=_positive)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("solve", help="run the Poisson solver on a built-in or custom b")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b-file", help='JSON file {"n": n, "b": [...]} with 2**n - 1 entries')
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="noise-intensity sweep of the mean deviation")
    p.add_argument("--n", type=int, choices=(2, 3), required=True)
    p.add_argument("--noise", choices=sorted(CHANNEL_CODES) + ["all"], default="all")
    p.add_argument("--i-min", type=_positive, default=1)
    p.add_argument("--i-max", type=_positive, default=9)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--trials", type=_positive, default=1)
    p.add_argument("--shots", type=_positive, default=16384)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--circuit", choices=("reference", "builder"), default="reference")
    p.add_argument("--noisy-gates", choices=("uniform", "listed"), default="uniform")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV}, else stdout)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("metrics", help="gate counts and depth")
    p.add_argument("source", help=builtin_help)
    p.set_defaults(func=_cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.i_min > args.i_max:
        parser.error(f"--i-min {args.i_min} exceeds --i-max {args.i_max}")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
