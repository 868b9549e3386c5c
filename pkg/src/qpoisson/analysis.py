"""Noise-intensity sweeps with their deviation metric, plus circuit metrics."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import DensityMatrix, StateVector
from .gates import Circuit, GateKind, GateOp
from .noise import CHANNEL_CODES, channel_by_name
from .poisson import PoissonInstance, SolverLayout, build_solver, builtin_instance
from .qasm import parse, serialize
from .sim import NoiseModel, register_probabilities, run_ideal, run_noisy, sample

__all__ = [
    "NOISE_ORDER",
    "SweepConfig",
    "SweepRow",
    "DeviationReport",
    "CircuitMetrics",
    "SolverSetup",
    "sweep_schedule",
    "deviation",
    "find_threshold",
    "circuit_metrics",
    "reference_circuit",
    "reference_setup",
    "builder_setup",
    "solver_setup",
    "noisy_probabilities",
    "run_sweep",
    "CCX_DECOMPOSITION_COST",
]

NOISE_ORDER = ("ad", "pd", "bf", "dp", "composite")

# Toffoli as 6 CNOT + 2 H + 7 T/Tdg
CCX_DECOMPOSITION_COST = 15


def sweep_schedule(i_range: Sequence[int]) -> list[float]:
    """Geometric intensities ``1e-4 * 700**(0.1 i)``."""
    out = []
    for i in i_range:
        if i < 1:
            raise ValueError(f"sweep index must be >= 1, got {i}")
        out.append(1e-4 * 700 ** (0.1 * i))
    return out


def deviation(p_noise, p_theory) -> tuple[np.ndarray, float]:
    """Per-basis relative deviation ``|p_noise - p_theory| / p_theory`` and its mean.

    Accepts equal-length sequences or mappings with identical keys; for
    mappings the per-basis array follows ``sorted(keys)``.
    """
    if isinstance(p_theory, Mapping):
        if not isinstance(p_noise, Mapping) or set(p_noise) != set(p_theory):
            raise ValueError("noisy and theoretical probabilities must cover the same bases")
        keys = sorted(p_theory)
        p_noise = [p_noise[k] for k in keys]
        p_theory = [p_theory[k] for k in keys]
    noise = np.asarray(p_noise, dtype=float)
    theory = np.asarray(p_theory, dtype=float)
    if noise.shape != theory.shape or theory.ndim != 1 or theory.size == 0:
        raise ValueError("noisy and theoretical probabilities must cover the same bases")
    if np.any(theory <= 0):
        raise ValueError("theoretical probability of a targeted basis is zero")
    d = np.abs((noise - theory) / theory)
    return d, float(d.mean())


def find_threshold(curve: Sequence[tuple[float, float]], target: float = 0.10) -> float:
    """Intensity at which the mean deviation first reaches ``target``.

    Interpolates linearly in the deviation and logarithmically in ``p``
    between the two points straddling the first upward crossing.
    """
    pts = sorted((float(p), float(d)) for p, d in curve)
    if len(pts) < 2:
        raise ValueError("threshold search needs at least two points")
    if pts[0][1] >= target:
        raise ValueError(f"deviation already {pts[0][1]:.4g} >= {target} at the smallest p")
    for (p0, d0), (p1, d1) in zip(pts, pts[1:]):
        if d1 >= target:
            if p0 <= 0:
                raise ValueError("log interpolation needs positive p")
            frac = (target - d0) / (d1 - d0)
            return float(math.exp(math.log(p0) + frac * (math.log(p1) - math.log(p0))))
    raise ValueError(f"deviation never reaches {target} in the swept range")


@dataclass(frozen=True)
class CircuitMetrics:
    """Gate tallies under two accountings plus the critical-path depth.

    ``one_two_qubit_gate_count`` counts every listed gate once, Toffolis
    included, which is how the reference listings tally themselves.
    ``decomposed_basic_gate_count`` expands each Toffoli into 15 one- and
    two-qubit gates.  Barriers and measurements are not gates here.
    """

    one_two_qubit_gate_count: int
    ccx_count: int
    decomposed_basic_gate_count: int
    depth: int
    strict_one_two_qubit_count: int


def circuit_metrics(circuit: Circuit) -> CircuitMetrics:
    gates = [op for op in circuit.ops if op.kind.is_unitary]
    ccx = sum(op.kind is GateKind.CCX for op in gates)
    level = [0] * circuit.num_qubits
    for op in gates:
        top = max(level[q] for q in op.qubits) + 1
        for q in op.qubits:
            level[q] = top
    return CircuitMetrics(
        one_two_qubit_gate_count=len(gates),
        ccx_count=ccx,
        decomposed_basic_gate_count=len(gates) - ccx + CCX_DECOMPOSITION_COST * ccx,
        depth=max(level, default=0),
        strict_one_two_qubit_count=len(gates) - ccx,
    )


def reference_circuit(n: int) -> Circuit:
    """The reference listing for ``n`` in {2, 3}, parsed."""
    if n not in (2, 3):
        raise ValueError(f"reference listings exist for n=2 and n=3, not n={n}")
    text = resources.files("qpoisson.data").joinpath(f"appendix_n{n}.qasm").read_text()
    return parse(text)


@dataclass(frozen=True)
class SolverSetup:
    """A solver circuit plus how its output is read.

    ``conditions`` select the success branch; ``register`` lists the
    solution qubits, least significant first; ``bases`` are the targeted
    register values.
    """

    name: str
    n: int
    circuit: Circuit
    conditions: tuple[tuple[int, int], ...]
    register: tuple[int, ...]
    bases: tuple[int, ...]

    def label(self, basis: int) -> str:
        return format(basis, f"0{len(self.register)}b")

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.conditions) + self.register


def _with_measurements(circuit: Circuit, qubits: Sequence[int]) -> Circuit:
    if circuit.measurements():
        return circuit
    ops = tuple(GateOp(GateKind.MEASURE, (q,), clbit=i) for i, q in enumerate(qubits))
    return Circuit(circuit.num_qubits, max(circuit.num_clbits, len(qubits)), circuit.ops + ops)


def reference_setup(n: int) -> SolverSetup:
    circuit = reference_circuit(n)
    N = 1 << n
    if n == 2:
        # E = q0, C = q2 (X module undone before readout), B = q3 q1
        return SolverSetup("reference", 2, circuit, ((0, 1), (2, 1)), (1, 3), tuple(range(1, N)))
    # flag = q0, B = q7 q5 q3
    return SolverSetup("reference", 3, circuit, ((0, 1),), (3, 5, 7), tuple(range(1, N)))


def builder_setup(n: int, b: Optional[Sequence[float]] = None) -> SolverSetup:
    instance = builtin_instance(n) if b is None else PoissonInstance(n, b)
    lay = SolverLayout.for_n(n)
    conditions = tuple(lay.success_conditions())
    circuit = _with_measurements(build_solver(instance), [q for q, _ in conditions] + list(lay.b))
    return SolverSetup("builder", n, circuit, conditions, lay.b, tuple(range(1, instance.N)))


def solver_setup(n: int, circuit: str = "reference") -> SolverSetup:
    if circuit == "reference":
        return reference_setup(n)
    if circuit == "builder":
        return builder_setup(n)
    raise ValueError(f"unknown circuit source {circuit!r}; use 'reference' or 'builder'")


def targeted_probabilities(state, setup: SolverSetup) -> dict[int, float]:
    probs, _ = register_probabilities(state, setup.conditions, setup.register)
    return {k: probs[k] for k in setup.bases}


def ideal_probabilities(setup: SolverSetup) -> dict[int, float]:
    state = run_ideal(setup.circuit.without_measurements(), StateVector.zero(setup.circuit.num_qubits))
    return targeted_probabilities(state, setup)


def _noise_model(code: str, p: float, gate_set: str) -> NoiseModel:
    channel = channel_by_name(code, p)
    if gate_set == "uniform":
        return NoiseModel.uniform(channel)
    if gate_set == "listed":
        return NoiseModel.listed(channel)
    raise ValueError(f"unknown noisy gate set {gate_set!r}; use 'uniform' or 'listed'")


def noisy_probabilities(setup: SolverSetup, code: str, p: float,
                        gate_set: str = "uniform") -> tuple[dict[int, float], DensityMatrix]:
    """Exact targeted probabilities under one channel at intensity ``p``."""
    rho = run_noisy(setup.circuit, DensityMatrix.zero(setup.circuit.num_qubits),
                    _noise_model(code, p, gate_set))
    return targeted_probabilities(rho, setup), rho


def _sampled_probabilities(rho: DensityMatrix, setup: SolverSetup, shots: int, seed: int) -> dict[int, float]:
    qubits = setup.measured_qubits
    counts = sample(rho, shots, seed, qubits=qubits)
    ncond = len(setup.conditions)
    want = "".join(str(v) for _, v in setup.conditions)
    out = {k: 0.0 for k in setup.bases}
    for bits, c in counts.items():
        if bits[:ncond] != want:
            continue
        value = sum(int(ch) << pos for pos, ch in enumerate(bits[ncond:]))
        if value in out:
            out[value] += c / shots
    return out


@dataclass(frozen=True)
class SweepConfig:
    n: int = 2
    noise_types: tuple[str, ...] = ("ad", "pd", "bf", "dp")
    i_range: tuple[int, ...] = tuple(range(1, 10))
    mode: str = "exact"
    trials: int = 1
    shots: int = 16384
    seed: int = 0
    circuit: str = "reference"
    gate_set: str = "uniform"
    workers: int = 1

    def __post_init__(self):
        if not self.i_range:
            raise ValueError("i_range must not be empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        for code in self.noise_types:
            if code not in CHANNEL_CODES:
                raise ValueError(f"unknown noise type {code!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        object.__setattr__(self, "noise_types", tuple(self.noise_types))
        object.__setattr__(self, "i_range", tuple(int(i) for i in self.i_range))


@dataclass(frozen=True)
class SweepRow:
    noise: str
    i: int
    p: float
    D: dict
    Dbar: float
    p_noise: dict


@dataclass
class DeviationReport:
    rows: list[SweepRow]
    theory: dict
    labels: dict
    metadata: dict = field(default_factory=dict)

    def curve(self, noise: str) -> list[tuple[float, float]]:
        return [(r.p, r.Dbar) for r in self.rows if r.noise == noise]

    def dbar(self, noise: str, i: int) -> float:
        for r in self.rows:
            if r.noise == noise and r.i == i:
                return r.Dbar
        raise KeyError((noise, i))

    def thresholds(self, target: float = 0.10) -> dict:
        out = {}
        for noise in dict.fromkeys(r.noise for r in self.rows):
            try:
                out[noise] = find_threshold(self.curve(noise), target)
            except ValueError:
                out[noise] = None
        return out

    def worst_threshold(self, target: float = 0.10) -> Optional[float]:
        found = [p for p in self.thresholds(target).values() if p is not None]
        return min(found) if found else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["noise", "i", "p", "basis", "D", "Dbar"])
        for r in self.rows:
            for basis, d in sorted(r.D.items()):
                writer.writerow([r.noise, r.i, repr(r.p), self.labels[basis], repr(d), repr(r.Dbar)])
        return buf.getvalue()

    def summary(self, target: float = 0.10) -> dict:
        return {
            "target": target,
            "thresholds": self.thresholds(target),
            "worst_threshold": self.worst_threshold(target),
            "theory": {self.labels[k]: v for k, v in sorted(self.theory.items())},
            "metadata": self.metadata,
        }

    def to_json(self, target: float = 0.10) -> str:
        return json.dumps(self.summary(target), indent=2, sort_keys=True)


def _cell_seed(seed: int, code: str, i: int, trial: int) -> int:
    ss = np.random.SeedSequence([seed, NOISE_ORDER.index(code), i, trial])
    return int(ss.generate_state(1)[0])


def _run_cell(setup: SolverSetup, config: SweepConfig, theory: dict, code: str, i: int) -> SweepRow:
    p = sweep_schedule([i])[0]
    exact, rho = noisy_probabilities(setup, code, p, config.gate_set)
    if config.mode == "exact":
        p_noise = exact
    else:
        acc = {k: 0.0 for k in setup.bases}
        for trial in range(config.trials):
            got = _sampled_probabilities(rho, setup, config.shots, _cell_seed(config.seed, code, i, trial))
            for k in acc:
                acc[k] += got[k] / config.trials
        p_noise = acc
    d, dbar = deviation(p_noise, theory)
    keys = sorted(theory)
    return SweepRow(code, i, p, dict(zip(keys, d.tolist())), dbar, p_noise)


def circuit_hash(circuit: Circuit) -> str:
    return hashlib.sha256(serialize(circuit).encode()).hexdigest()


def run_sweep(config: SweepConfig, setup: Optional[SolverSetup] = None) -> DeviationReport:
    """Deviation of the targeted probabilities over the intensity schedule."""
    setup = setup or solver_setup(config.n, config.circuit)
    theory = ideal_probabilities(setup)
    cells = [(code, i) for code in sorted(config.noise_types, key=NOISE_ORDER.index)
             for i in sorted(config.i_range)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            futures = [pool.submit(_run_cell, setup, config, theory, code, i) for code, i in cells]
            rows = [f.result() for f in futures]
    else:
        rows = [_run_cell(setup, config, theory, code, i) for code, i in cells]
    metrics = circuit_metrics(setup.circuit)
    metadata = {
        "n": setup.n,
        "circuit": setup.name,
        "circuit_sha256": circuit_hash(setup.circuit),
        "gate_counts": asdict(metrics),
        "mode": config.mode,
        "trials": config.trials if config.mode == "sampled" else 1,
        "shots": config.shots if config.mode == "sampled" else None,
        "seed": config.seed,
        "noisy_gates": config.gate_set,
        "placement": "before",
    }
    labels = {k: setup.label(k) for k in setup.bases}
    return DeviationReport(rows, theory, labels, metadata)
