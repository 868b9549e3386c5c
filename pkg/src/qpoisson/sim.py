"""Exact statevector and density-matrix execution of circuits."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .core import (
    DensityMatrix,
    StateVector,
    apply_kraus,
    apply_unitary,
    apply_unitary_dm,
)
from .gates import Circuit, GateKind
from .noise import KrausChannel

__all__ = [
    "NoiseModel",
    "MeasurementOutcome",
    "run_ideal",
    "run_noisy",
    "sample",
    "post_select",
    "register_probabilities",
    "outcome_distribution",
    "LISTED_NOISY_KINDS",
]


State = Union[StateVector, DensityMatrix]

# gate names that carry an error in the reference noise script
LISTED_NOISY_KINDS = frozenset({
    GateKind.H, GateKind.X, GateKind.CX, GateKind.CRY, GateKind.CP, GateKind.CCX,
})


@dataclass(frozen=True)
class NoiseModel:
    """Which single-qubit channel precedes each gate kind, plus readout error.

    A gate on ``k`` qubits gets one independent copy of its channel on each
    qubit it touches, i.e. the ``k``-fold tensor product.
    """

    per_gate: Mapping[GateKind, KrausChannel] = field(default_factory=dict)
    readout: Optional[KrausChannel] = None

    def __post_init__(self):
        for kind, channel in self.per_gate.items():
            if not kind.is_unitary:
                raise ValueError(f"cannot attach gate noise to {kind.value}")
            self._validate(channel, kind.value)
        if self.readout is not None:
            self._validate(self.readout, "measure")

    @staticmethod
    def _validate(channel: KrausChannel, where: str):
        if channel.num_qubits != 1:
            raise ValueError(f"{where}: gate noise must be a single-qubit channel")
        if not channel.is_valid(1e-12):
            raise ValueError(f"{where}: channel {channel.name.value} violates completeness "
                             f"(error {channel.completeness_error():.2e})")

    @classmethod
    def uniform(cls, channel: KrausChannel, readout: bool = True) -> "NoiseModel":
        """Same channel before every gate kind, tensored by arity."""
        kinds = [k for k in GateKind if k.is_unitary]
        return cls({k: channel for k in kinds}, channel if readout else None)

    @classmethod
    def listed(cls, channel: KrausChannel, readout: bool = True) -> "NoiseModel":
        """Only the gate names listed in the reference noise script."""
        return cls({k: channel for k in LISTED_NOISY_KINDS}, channel if readout else None)

    @property
    def is_empty(self) -> bool:
        return not self.per_gate and self.readout is None


@dataclass(frozen=True)
class MeasurementOutcome:
    bitstring: str
    probability: float


def _strip_measurements(circuit: Circuit) -> Circuit:
    if circuit.measurements():
        warnings.warn("measurements stripped for ideal statevector run", stacklevel=3)
        return circuit.without_measurements()
    return circuit


def run_ideal(circuit: Circuit, initial: Optional[StateVector] = None) -> StateVector:
    """Apply every gate of ``circuit`` in order to a pure state."""
    if initial is None:
        initial = StateVector.zero(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise ValueError(f"circuit has {circuit.num_qubits} qubits, state has {initial.num_qubits}")
    circuit = _strip_measurements(circuit)
    state = initial
    for op in circuit.ops:
        if op.kind is GateKind.BARRIER:
            continue
        state = apply_unitary(state, op.matrix(), op.qubits)
    return state


def run_noisy(circuit: Circuit, initial: Optional[DensityMatrix] = None,
              noise: Optional[NoiseModel] = None) -> DensityMatrix:
    """Density-matrix run with each gate's channel applied just before it.

    Measurements apply the readout channel to their qubit and leave the state
    otherwise untouched; probabilities are read from the final diagonal.
    """
    if initial is None:
        initial = DensityMatrix.zero(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise ValueError(f"circuit has {circuit.num_qubits} qubits, state has {initial.num_qubits}")
    noise = noise or NoiseModel()
    rho = initial
    for op in circuit.ops:
        if op.kind is GateKind.BARRIER:
            continue
        if op.kind is GateKind.MEASURE:
            if noise.readout is not None:
                rho = apply_kraus(rho, noise.readout, op.qubits)
            continue
        channel = noise.per_gate.get(op.kind)
        if channel is not None:
            for q in op.qubits:
                rho = apply_kraus(rho, channel, [q])
        rho = apply_unitary_dm(rho, op.matrix(), op.qubits)
    return rho


def _probabilities(state: State) -> np.ndarray:
    p = state.probabilities()
    return p / p.sum()


def _marginal(probs: np.ndarray, num_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    """Distribution over ``qubits`` with ``qubits[-1]`` the least significant bit."""
    t = probs.reshape((2,) * num_qubits)
    axes = [num_qubits - 1 - q for q in qubits]
    keep = set(axes)
    summed = t.sum(axis=tuple(a for a in range(num_qubits) if a not in keep))
    # summed keeps axes in increasing order; reorder to requested order
    order = sorted(axes)
    summed = np.transpose(summed, [order.index(a) for a in axes])
    return summed.reshape(-1)


def outcome_distribution(state: State, qubits: Optional[Sequence[int]] = None) -> list[MeasurementOutcome]:
    """Exact Born distribution; bitstrings list ``qubits`` left to right.

    The default order is the usual ``q[n-1] ... q[0]``.
    """
    n = state.num_qubits
    qubits = list(range(n - 1, -1, -1)) if qubits is None else list(qubits)
    probs = _marginal(_probabilities(state), n, qubits)
    k = len(qubits)
    return [MeasurementOutcome(format(i, f"0{k}b"), float(p)) for i, p in enumerate(probs)]


def sample(state: State, shots: int, seed: int,
           qubits: Optional[Sequence[int]] = None) -> dict[str, int]:
    """Multinomial shot histogram, deterministic for a given ``seed``."""
    if int(shots) < 1:
        raise ValueError("shots must be >= 1")
    outcomes = outcome_distribution(state, qubits)
    probs = np.array([o.probability for o in outcomes])
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(int(shots), probs / probs.sum())
    return {o.bitstring: int(c) for o, c in zip(outcomes, counts) if c}


def _conditioned(state: State, conditions: Iterable[tuple[int, int]]):
    n = state.num_qubits
    conditions = [(int(q), int(v)) for q, v in conditions]
    qubits = [q for q, _ in conditions]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"conditioned qubits must be distinct: {qubits}")
    for q, v in conditions:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range")
        if v not in (0, 1):
            raise ValueError(f"required bit must be 0 or 1, got {v}")
    probs = state.probabilities()
    idx = np.arange(probs.size)
    mask = np.ones(probs.size, dtype=bool)
    for q, v in conditions:
        mask &= ((idx >> q) & 1) == v
    return probs, idx, mask, set(qubits)


def post_select(state: State, conditions: Iterable[tuple[int, int]]) -> tuple[dict[int, float], float]:
    """Unnormalized probabilities of the unconditioned qubits on the selected branch.

    Keys pack the remaining qubits in increasing order, lowest qubit as the
    least significant bit.  Values sum to the success probability.
    """
    probs, idx, mask, fixed = _conditioned(state, conditions)
    rest = [q for q in range(state.num_qubits) if q not in fixed]
    out: dict[int, float] = {}
    for i in idx[mask]:
        if probs[i] == 0.0:
            continue
        key = sum(((int(i) >> q) & 1) << pos for pos, q in enumerate(rest))
        out[key] = out.get(key, 0.0) + float(probs[i])
    return out, float(probs[mask].sum())


def register_probabilities(state: State, conditions: Iterable[tuple[int, int]],
                           register: Sequence[int]) -> tuple[dict[int, float], float]:
    """Post-select, then marginalize onto ``register`` (``register[0]`` least significant)."""
    probs, idx, mask, fixed = _conditioned(state, conditions)
    if fixed & set(register):
        raise ValueError("register overlaps the conditioned qubits")
    values = np.zeros(idx.size, dtype=np.int64)
    for pos, q in enumerate(register):
        values |= ((idx >> q) & 1) << pos
    sel = np.bincount(values[mask], weights=probs[mask], minlength=1 << len(register))
    return {k: float(p) for k, p in enumerate(sel)}, float(probs[mask].sum())
