"""Dense state representations and the primitive maps acting on them.

Basis convention: qubit ``q`` is bit ``q`` of the basis index, so qubit 0 is
the least significant bit.  A local operator acting on ``targets`` uses the
opposite, textbook ordering inside its own matrix: ``targets[0]`` is the most
significant bit of the local index.  With that choice a controlled gate listed
as ``(control, target)`` has the familiar block form ``diag(I, U)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "StateVector",
    "DensityMatrix",
    "apply_unitary",
    "apply_unitary_dm",
    "apply_kraus",
    "basis_probability",
    "superoperator",
]


def _num_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state over ``2**num_qubits`` computational basis states."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        _num_qubits_for(amps.size)
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self.amplitudes.size)

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state as a dense ``2**n x 2**n`` Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        _num_qubits_for(rho.shape[0])
        if not np.all(np.isfinite(rho)):
            raise ValueError("density matrix entries must be finite")
        object.__setattr__(self, "matrix", rho)

    @property
    def num_qubits(self) -> int:
        return _num_qubits_for(self.matrix.shape[0])

    @classmethod
    def zero(cls, num_qubits: int) -> "DensityMatrix":
        return StateVector.zero(num_qubits).to_density_matrix()

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def probabilities(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.matrix)), 0.0, None)

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())


def _check_targets(targets: Sequence[int], num_qubits: int, arity: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(targets) != arity:
        raise ValueError(f"operator acts on {arity} qubit(s) but {len(targets)} target(s) given")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise ValueError(f"target {t} out of range for {num_qubits} qubit(s)")
    return targets


def _local_arity(u: np.ndarray) -> int:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"operator must be square, got shape {u.shape}")
    return _num_qubits_for(u.shape[0])


def _contract(tensor: np.ndarray, op: np.ndarray, axes: list[int]) -> np.ndarray:
    # op is already reshaped to (2,)*2k: k output axes followed by k input axes
    k = len(axes)
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def _axes(targets: Sequence[int], num_qubits: int, offset: int = 0) -> list[int]:
    # C-order reshape puts the most significant bit on axis 0
    return [offset + num_qubits - 1 - t for t in targets]


def apply_unitary(state: StateVector, u: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Apply the local operator ``u`` to ``targets`` of a pure state."""
    u = np.asarray(u, dtype=np.complex128)
    k = _local_arity(u)
    n = state.num_qubits
    targets = _check_targets(targets, n, k)
    psi = state.amplitudes.reshape((2,) * n)
    out = _contract(psi, u.reshape((2,) * (2 * k)), _axes(targets, n))
    return StateVector(out.reshape(-1))


def apply_unitary_dm(rho: DensityMatrix, u: np.ndarray, targets: Sequence[int]) -> DensityMatrix:
    """Conjugate a density matrix by a local unitary: rho -> U rho U^dagger."""
    u = np.asarray(u, dtype=np.complex128)
    k = _local_arity(u)
    n = rho.num_qubits
    targets = _check_targets(targets, n, k)
    t = rho.matrix.reshape((2,) * (2 * n))
    t = _contract(t, u.reshape((2,) * (2 * k)), _axes(targets, n))
    t = _contract(t, u.conj().reshape((2,) * (2 * k)), _axes(targets, n, offset=n))
    return DensityMatrix(t.reshape(1 << n, 1 << n))


def superoperator(operators: Sequence[np.ndarray]) -> np.ndarray:
    """Row-major superoperator ``sum_k E_k (x) conj(E_k)`` of a Kraus set.

    Indexing is ``[(row_out, col_out), (row_in, col_in)]``.
    """
    ops = [np.asarray(e, dtype=np.complex128) for e in operators]
    return sum(np.kron(e, e.conj()) for e in ops)


def apply_kraus(rho: DensityMatrix, channel, targets: Sequence[int]) -> DensityMatrix:
    """Apply ``rho -> sum_k E_k rho E_k^dagger`` on ``targets``.

    ``channel`` is a :class:`~qpoisson.noise.KrausChannel` or a plain sequence
    of Kraus matrices.
    """
    ops = getattr(channel, "operators", channel)
    ops = [np.asarray(e, dtype=np.complex128) for e in ops]
    if not ops:
        raise ValueError("channel has no Kraus operators")
    k = _local_arity(ops[0])
    if any(e.shape != ops[0].shape for e in ops):
        raise ValueError("Kraus operators must share one shape")
    n = rho.num_qubits
    targets = _check_targets(targets, n, k)
    s = getattr(channel, "superoperator", None)
    if s is None:
        s = superoperator(ops)
    # superoperator axes: row_out, col_out, row_in, col_in (k bits each)
    s = s.reshape((2,) * (4 * k))
    t = rho.matrix.reshape((2,) * (2 * n))
    in_axes = _axes(targets, n) + _axes(targets, n, offset=n)
    out = np.tensordot(s, t, axes=(list(range(2 * k, 4 * k)), in_axes))
    out = np.moveaxis(out, list(range(2 * k)), in_axes)
    return DensityMatrix(out.reshape(1 << n, 1 << n))


def basis_probability(state: StateVector, index: int) -> float:
    """Born-rule probability of a single computational basis state."""
    dim = state.amplitudes.size
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for dimension {dim}")
    return float(abs(state.amplitudes[index]) ** 2)
