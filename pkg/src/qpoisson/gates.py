"""Gate set and the immutable circuit IR every other module builds on."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "GateKind",
    "GateOp",
    "Circuit",
    "CircuitError",
    "unitary_of",
    "append",
    "inverse",
]


class CircuitError(ValueError):
    """Invalid gate or circuit construction."""


class GateKind(enum.Enum):
    H = "h"
    X = "x"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    P = "p"
    SWAP = "swap"
    CX = "cx"
    CH = "ch"
    CRY = "cry"
    CRZ = "crz"
    CP = "cp"
    CCX = "ccx"
    BARRIER = "barrier"
    MEASURE = "measure"

    @property
    def arity(self) -> Optional[int]:
        """Number of qubits, or ``None`` for the variadic barrier."""
        return _ARITY[self]

    @property
    def parameterized(self) -> bool:
        return self in _PARAMETERIZED

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.BARRIER, GateKind.MEASURE)


_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
    GateKind.P: 1, GateKind.SWAP: 2, GateKind.CX: 2, GateKind.CH: 2, GateKind.CRY: 2,
    GateKind.CRZ: 2, GateKind.CP: 2, GateKind.CCX: 3, GateKind.BARRIER: None,
    GateKind.MEASURE: 1,
}
_PARAMETERIZED = frozenset({
    GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.P,
    GateKind.CRY, GateKind.CRZ, GateKind.CP,
})
_SELF_INVERSE = frozenset({
    GateKind.H, GateKind.X, GateKind.SWAP, GateKind.CX, GateKind.CH, GateKind.CCX,
    GateKind.BARRIER,
})


@dataclass(frozen=True)
class GateOp:
    """One gate application; controls are listed before targets."""

    kind: GateKind
    qubits: tuple[int, ...]
    angle: Optional[float] = None
    clbit: Optional[int] = None

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        arity = self.kind.arity
        if arity is None:
            if not qubits:
                raise CircuitError("barrier needs at least one qubit")
        elif len(qubits) != arity:
            raise CircuitError(
                f"{self.kind.value} acts on {arity} qubit(s), got {len(qubits)}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"{self.kind.value} has duplicate qubits {list(qubits)}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {list(qubits)}")
        if self.kind.parameterized:
            if self.angle is None:
                raise CircuitError(f"{self.kind.value} needs an angle")
            if not math.isfinite(self.angle):
                raise CircuitError(f"{self.kind.value} angle must be finite")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind.value} takes no angle")
        if self.kind is GateKind.MEASURE:
            if self.clbit is None or self.clbit < 0:
                raise CircuitError("measure needs a classical bit")
        elif self.clbit is not None:
            raise CircuitError(f"{self.kind.value} takes no classical bit")

    def matrix(self) -> np.ndarray:
        return unitary_of(self.kind, self.angle)

    def adjoint(self) -> "GateOp":
        if self.kind is GateKind.MEASURE:
            raise CircuitError("measure has no adjoint")
        if self.kind in _SELF_INVERSE:
            return self
        return GateOp(self.kind, self.qubits, -self.angle)

    def __str__(self):
        name = self.kind.value
        if self.angle is not None:
            name += f"({self.angle:.6g})"
        if self.kind is GateKind.MEASURE:
            return f"{name} q[{self.qubits[0]}] -> c[{self.clbit}]"
        return name + " " + ",".join(f"q[{q}]" for q in self.qubits)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    ops: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        if self.num_clbits < 0:
            raise CircuitError("negative classical register size")
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        for op in ops:
            self._check(op)

    def _check(self, op: GateOp):
        for q in op.qubits:
            if q >= self.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.num_qubits}-qubit circuit")
        if op.clbit is not None and op.clbit >= self.num_clbits:
            raise CircuitError(f"classical bit {op.clbit} out of range for {self.num_clbits} bit(s)")

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def append(self, op: GateOp) -> "Circuit":
        return append(self, op)

    def extend(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(self.num_qubits, self.num_clbits, self.ops + tuple(ops))

    def compose(self, other: "Circuit", qubits: Optional[Sequence[int]] = None) -> "Circuit":
        """Append ``other`` with its qubit ``i`` mapped onto ``qubits[i]``."""
        if qubits is None:
            qubits = range(other.num_qubits)
        return self.extend(remap(other, qubits).ops)

    def inverse(self) -> "Circuit":
        return inverse(self)

    def without_measurements(self) -> "Circuit":
        ops = tuple(op for op in self.ops if op.kind is not GateKind.MEASURE)
        return Circuit(self.num_qubits, self.num_clbits, ops)

    def measurements(self) -> list[GateOp]:
        return [op for op in self.ops if op.kind is GateKind.MEASURE]

    def count(self, kind: GateKind) -> int:
        return sum(op.kind is kind for op in self.ops)


def remap(circuit: Circuit, qubits: Sequence[int]) -> Circuit:
    """Relabel qubit ``i`` of ``circuit`` as ``qubits[i]``."""
    qubits = [int(q) for q in qubits]
    if len(qubits) != circuit.num_qubits:
        raise CircuitError(f"need {circuit.num_qubits} qubit labels, got {len(qubits)}")
    ops = tuple(
        GateOp(op.kind, tuple(qubits[q] for q in op.qubits), op.angle, op.clbit)
        for op in circuit.ops)
    return Circuit(max(qubits) + 1, circuit.num_clbits, ops)


def append(circuit: Circuit, op: GateOp) -> Circuit:
    circuit._check(op)
    return Circuit(circuit.num_qubits, circuit.num_clbits, circuit.ops + (op,))


def inverse(circuit: Circuit) -> Circuit:
    """Adjoint circuit: reversed order, each gate replaced by its inverse."""
    if any(op.kind is GateKind.MEASURE for op in circuit.ops):
        raise CircuitError("cannot invert a circuit containing measurements")
    ops = tuple(op.adjoint() for op in reversed(circuit.ops))
    return Circuit(circuit.num_qubits, circuit.num_clbits, ops)


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)


def _rx(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _p(t):
    return np.diag([1.0, np.exp(1j * t)]).astype(np.complex128)


def _controlled(u: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    out = np.eye(2 * d, dtype=np.complex128)
    out[d:, d:] = u
    return out


def unitary_of(kind: GateKind, angle: Optional[float] = None) -> np.ndarray:
    """Exact matrix of a gate, first listed qubit most significant."""
    if not kind.is_unitary:
        raise CircuitError(f"{kind.value} has no unitary")
    if kind.parameterized and angle is None:
        raise CircuitError(f"{kind.value} needs an angle")
    if not kind.parameterized and angle is not None:
        raise CircuitError(f"{kind.value} takes no angle")
    if kind is GateKind.H:
        return _H.copy()
    if kind is GateKind.X:
        return _X.copy()
    if kind is GateKind.SWAP:
        return _SWAP.copy()
    if kind is GateKind.CX:
        return _controlled(_X)
    if kind is GateKind.CH:
        return _controlled(_H)
    if kind is GateKind.CCX:
        return _controlled(_controlled(_X))
    single = {
        GateKind.RX: _rx, GateKind.RY: _ry, GateKind.RZ: _rz, GateKind.P: _p,
        GateKind.CRY: _ry, GateKind.CRZ: _rz, GateKind.CP: _p,
    }[kind](angle)
    if kind in (GateKind.CRY, GateKind.CRZ, GateKind.CP):
        return _controlled(single)
    return single
