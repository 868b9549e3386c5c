"""1D Poisson problem: classical oracle and the solver circuit builders.

Register layout of the solver (``3n`` qubits, ``N = 2**n``)::

    Anc   qubit 0                 success flag
    E     qubits 1 .. n-1         rotation register
    C     qubits n .. 2n-2        carries of the adder, reused for rotations
    B     qubits 2n-1 .. 3n-2     solution register, B[0] least significant
    Anc2  qubit 3n-1              sine-transform extraction qubit

The solver prepares ``|b>`` on B, applies the sine transform, writes
``8/lambda_j`` onto the all-ones amplitude of E and C, flags that branch on
Anc, flips C back to zero and undoes the sine transform.  Conditioning on
``Anc = 1, E = 1..1, C = 0..0`` leaves ``8 A^{-1} b`` on register B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .core import StateVector
from .gates import Circuit, CircuitError, GateKind, GateOp
from .sim import register_probabilities, run_ideal

__all__ = [
    "PoissonInstance",
    "EigenSystem",
    "SolverLayout",
    "SolverResult",
    "BUILTIN_B",
    "builtin_instance",
    "poisson_matrix",
    "eigen_system",
    "solve_classical",
    "oracle_distribution",
    "eigen_recip",
    "recip_factors",
    "two_adic_valuation",
    "build_add_one",
    "controlled_add_one",
    "fourier_ops",
    "build_sine_transform",
    "multiplexed_ry",
    "multi_controlled_x",
    "build_ry_ladder",
    "prepare_b_state",
    "build_solver",
    "solve",
]


@dataclass(frozen=True, eq=False)
class PoissonInstance:
    """Discretized problem ``-v'' = b`` on ``N = 2**n`` intervals.

    ``b`` holds the ``N - 1`` interior values ``b_1 .. b_{N-1}``.
    """

    n: int
    b: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != (1 << self.n) - 1:
            raise ValueError(f"b must have {(1 << self.n) - 1} entries for n={self.n}, got {b.size}")
        if not np.all(np.isfinite(b)) or not np.any(b):
            raise ValueError("b must be finite and not all zero")
        object.__setattr__(self, "b", b)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def h(self) -> float:
        return 1.0 / self.N

    def normalized_b(self) -> np.ndarray:
        return self.b / np.linalg.norm(self.b)

    def amplitudes(self) -> np.ndarray:
        """Length-``N`` amplitude vector of ``|b>``; index 0 is zero."""
        return np.concatenate([[0.0], self.normalized_b()])


# right-hand sides used in the n=2 and n=3 demonstrations
BUILTIN_B = {
    2: np.array([1 / math.sqrt(2), 0.5, 0.5]),
    3: np.array([0.5] + [math.sqrt(2) / 4] * 6),
}


def builtin_instance(n: int) -> PoissonInstance:
    if n not in BUILTIN_B:
        raise ValueError(f"no built-in instance for n={n}; built-ins: {sorted(BUILTIN_B)}")
    return PoissonInstance(n, BUILTIN_B[n])


def poisson_matrix(n: int) -> np.ndarray:
    """Dense ``h^-2 tridiag(-1, 2, -1)`` of size ``N - 1``."""
    N = 1 << n
    m = N - 1
    A = 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
    return A * N * N


@dataclass(frozen=True, eq=False)
class EigenSystem:
    lambdas: np.ndarray  # lambda_j for j = 1..N-1
    vectors: np.ndarray  # vectors[j-1, k-1] = u_j(k)


def eigen_system(n: int) -> EigenSystem:
    N = 1 << n
    j = np.arange(1, N)
    lambdas = 4.0 * N * N * np.sin(j * np.pi / (2 * N)) ** 2
    vectors = math.sqrt(2.0 / N) * np.sin(np.outer(j, j) * np.pi / N)
    return EigenSystem(lambdas, vectors)


def solve_classical(instance: PoissonInstance) -> np.ndarray:
    """Solve ``A v = b`` with the banded (tridiagonal) direct solver."""
    N = instance.N
    m = N - 1
    scale = float(N * N)
    ab = np.zeros((3, m))
    ab[0, 1:] = -scale
    ab[1, :] = 2.0 * scale
    ab[2, :-1] = -scale
    return solve_banded((1, 1), ab, instance.b)


def oracle_distribution(instance: PoissonInstance) -> dict:
    """Expected post-selected register-B probabilities.

    The solver leaves amplitude ``8 (A^{-1} b)_k`` on ``|k>`` for normalized
    ``b``, so the joint probabilities are ``64 v_k^2``.  Also returns the
    conditional distribution ``|C v_k|^2`` with ``C = 1/||v||``.
    """
    v = solve_classical(PoissonInstance(instance.n, instance.normalized_b()))
    joint = 64.0 * v ** 2
    return {
        "solution": v,
        "joint": joint,
        "success_probability": float(joint.sum()),
        "normalized": v ** 2 / float(v @ v),
        "normalizing_constant": 1.0 / float(np.linalg.norm(8.0 * v)),
    }


def two_adic_valuation(j: int) -> int:
    """Largest ``m`` with ``2**m`` dividing ``j``."""
    if j <= 0:
        raise ValueError("valuation needs a positive integer")
    return (j & -j).bit_length() - 1


def recip_factors(j: int, n: int) -> list[float]:
    """The ``n - 1`` sine factors whose product squared is ``8 / lambda_j``.

    With ``m`` the 2-adic valuation of ``j``: ``m`` copies of ``sin(pi/6)``
    followed by ``sin(((2**k - j / 2**m) mod 2**(k+1)) pi / 2**(k+1))`` for
    ``k = 2 .. n - m``.
    """
    N = 1 << n
    if not 1 <= j < N:
        raise ValueError(f"j must be in 1..{N - 1}, got {j}")
    m = two_adic_valuation(j)
    odd = j >> m
    factors = [0.5] * m
    for k in range(2, n - m + 1):
        num = ((1 << k) - odd) % (1 << (k + 1))
        factors.append(math.sin(num * math.pi / (1 << (k + 1))))
    return factors


def eigen_recip(j: int, n: int) -> float:
    """``8 / lambda_j`` from the product-of-sines formula."""
    return math.prod(recip_factors(j, n)) ** 2


# -- circuit pieces ---------------------------------------------------------

def _op(kind, *qubits, angle=None):
    return GateOp(kind, tuple(qubits), angle)


def build_add_one(n_plus_1: int) -> Circuit:
    """Ripple-carry increment ``|j>|0..0> -> |j+1 mod 2**m>|0..0>``.

    Qubits ``0 .. m-1`` hold ``j`` (qubit 0 least significant); qubits
    ``m .. 2m-2`` are the ``m - 1`` carries, returned to zero.
    """
    m = int(n_plus_1)
    if m < 1:
        raise CircuitError("adder needs at least one data qubit")
    data = list(range(m))
    carries = list(range(m, 2 * m - 1))
    ops = []
    # carries[k-1] = b_0 & ... & b_{k-1}
    if m > 1:
        ops.append(_op(GateKind.CX, data[0], carries[0]))
    for k in range(2, m):
        ops.append(_op(GateKind.CCX, carries[k - 2], data[k - 1], carries[k - 1]))
    for k in range(m - 1, 0, -1):
        ops.append(_op(GateKind.CX, carries[k - 1], data[k]))
        if k >= 2:
            ops.append(_op(GateKind.CCX, carries[k - 2], data[k - 1], carries[k - 1]))
        else:
            ops.append(_op(GateKind.CX, data[0], carries[0]))
    ops.append(_op(GateKind.X, data[0]))
    return Circuit(max(1, 2 * m - 1), 0, tuple(ops))


def controlled_add_one(control: int, data: Sequence[int], carries: Sequence[int]) -> list[GateOp]:
    """Add the control bit into ``data`` with a ripple of Toffolis.

    ``data[0]`` is least significant; ``len(carries) == len(data) - 1`` and
    the carries start and end in zero.
    """
    n = len(data)
    if len(carries) != n - 1:
        raise CircuitError(f"{n} data qubits need {n - 1} carries, got {len(carries)}")
    ops = []
    if n > 1:
        ops.append(_op(GateKind.CCX, control, data[0], carries[0]))
    for k in range(2, n):
        ops.append(_op(GateKind.CCX, carries[k - 2], data[k - 1], carries[k - 1]))
    for k in range(n - 1, 0, -1):
        ops.append(_op(GateKind.CX, carries[k - 1], data[k]))
        if k >= 2:
            ops.append(_op(GateKind.CCX, carries[k - 2], data[k - 1], carries[k - 1]))
        else:
            ops.append(_op(GateKind.CCX, control, data[0], carries[0]))
    ops.append(_op(GateKind.CX, control, data[0]))
    return ops


def fourier_ops(qubits: Sequence[int], sign: int = 1) -> list[GateOp]:
    """Exact Fourier transform, ``qubits[0]`` most significant.

    ``sign=+1`` gives ``|x> -> sum_k exp(+2 pi i x k / 2**m) |k>``; ``sign=-1``
    the conjugate kernel.  Ends with the bit-reversal swaps.
    """
    qubits = list(qubits)
    m = len(qubits)
    ops = []
    for i, q in enumerate(qubits):
        ops.append(_op(GateKind.H, q))
        for d, c in enumerate(qubits[i + 1:], start=1):
            ops.append(_op(GateKind.CP, c, q, angle=sign * math.pi / (1 << d)))
    for i in range(m // 2):
        ops.append(_op(GateKind.SWAP, qubits[i], qubits[m - 1 - i]))
    return ops


def _sine_transform_ops(data: Sequence[int], anc: int, carries: Sequence[int]) -> list[GateOp]:
    # T: |1>|j> -> (|j> - |2N - j>)/sqrt(2) with anc as the top bit of 2N
    t_ops = [_op(GateKind.H, anc)]
    t_ops += [_op(GateKind.CX, anc, q) for q in reversed(data)]
    t_ops += controlled_add_one(anc, data, carries)
    t_dag = [op.adjoint() for op in reversed(t_ops)]
    # conjugate kernel puts -i (not +i) in front of the sine block
    fourier = fourier_ops([anc] + list(reversed(data)), sign=-1)
    return t_ops + fourier + t_dag


def build_sine_transform(n: int) -> Circuit:
    """Sine transform of size ``N - 1`` through ``T^dagger F T``.

    Qubits ``0 .. n-1`` carry ``j`` (qubit 0 least significant), qubit ``n``
    is the extraction ancilla prepared in ``|1>`` and qubits ``n+1 .. 2n-1``
    are carries in ``|0>``.  On that subspace the circuit acts as
    ``-i * ST`` with ``ST[i, j] = sqrt(2/N) sin(pi i j / N)``.
    """
    if n < 2:
        raise CircuitError("sine transform needs n >= 2")
    data = list(range(n))
    ops = _sine_transform_ops(data, n, list(range(n + 1, 2 * n)))
    return Circuit(2 * n, 0, tuple(ops))


def multiplexed_ry(angles: Sequence[float], controls: Sequence[int], target: int,
                   atol: float = 1e-14) -> list[GateOp]:
    """Uniformly controlled ``RY(angles[c])`` on ``target``.

    ``c`` is the integer value of ``controls`` with ``controls[0]`` least
    significant.  Uses the Gray-code sequence of ``2**k`` rotations and CNOTs.
    """
    k = len(controls)
    angles = np.asarray(angles, dtype=float)
    if angles.size != 1 << k:
        raise ValueError(f"{k} controls need {1 << k} angles, got {angles.size}")
    if k == 0:
        return [] if abs(angles[0]) < atol else [_op(GateKind.RY, target, angle=float(angles[0]))]
    gray = [i ^ (i >> 1) for i in range(1 << k)]
    signs = np.array([[(-1) ** bin(c & g).count("1") for g in gray] for c in range(1 << k)])
    phis = signs.T @ angles / (1 << k)
    ops = []
    for i, phi in enumerate(phis):
        if abs(phi) > atol:
            ops.append(_op(GateKind.RY, target, angle=float(phi)))
        flip = min(((i + 1) & -(i + 1)).bit_length() - 1, k - 1)
        ops.append(_op(GateKind.CX, controls[flip], target))
    if np.all(np.abs(phis) <= atol):
        return []
    return ops


def multi_controlled_x(controls: Sequence[int], target: int,
                       ancillas: Sequence[int] = ()) -> list[GateOp]:
    """Toffoli ladder for an ``m``-controlled NOT.

    Needs ``m - 2`` ancillas for ``m >= 3``; they may hold any state and are
    restored.
    """
    controls = list(controls)
    m = len(controls)
    if m == 0:
        return [_op(GateKind.X, target)]
    if m == 1:
        return [_op(GateKind.CX, controls[0], target)]
    if m == 2:
        return [_op(GateKind.CCX, controls[0], controls[1], target)]
    if len(ancillas) < m - 2:
        raise CircuitError(f"{m} controls need {m - 2} ancillas, got {len(ancillas)}")
    a = list(ancillas[: m - 2])

    def down():
        return [_op(GateKind.CCX, controls[i], a[i - 2], a[i - 1]) for i in range(m - 2, 1, -1)]

    def up():
        return [_op(GateKind.CCX, controls[i], a[i - 2], a[i - 1]) for i in range(2, m - 1)]

    top = _op(GateKind.CCX, controls[m - 1], a[m - 3], target)
    base = _op(GateKind.CCX, controls[0], controls[1], a[0])
    half = [top] + down() + [base] + up()
    return half + half


@dataclass(frozen=True)
class SolverLayout:
    n: int
    anc: int
    e: tuple[int, ...]
    c: tuple[int, ...]
    b: tuple[int, ...]
    anc2: int

    @classmethod
    def for_n(cls, n: int) -> "SolverLayout":
        if n < 2:
            raise CircuitError("solver needs n >= 2")
        e = tuple(range(1, n))
        c = tuple(range(n, 2 * n - 1))
        b = tuple(range(2 * n - 1, 3 * n - 1))
        return cls(n, 0, e, c, b, 3 * n - 1)

    @property
    def num_qubits(self) -> int:
        return 3 * self.n

    def success_conditions(self) -> list[tuple[int, int]]:
        return [(self.anc, 1)] + [(q, 1) for q in self.e] + [(q, 0) for q in self.c]


def _ladder_ops(n: int, b: Sequence[int], e: Sequence[int], c: Sequence[int]) -> list[GateOp]:
    N = 1 << n
    table = np.zeros((N, n - 1))
    for j in range(1, N):
        table[j] = [2.0 * math.asin(f) for f in recip_factors(j, n)]
    ops = []
    for t in range(n - 1):
        ops += multiplexed_ry(table[:, t], b, e[t])
        ops += multiplexed_ry(table[:, t], b, c[t])
    return ops


def build_ry_ladder(n: int) -> Circuit:
    """Rotations giving the E and C all-ones configuration amplitude ``8/lambda_j``.

    Acts on ``2n - 1`` qubits: B on ``0 .. n-1`` (control, ``|j>``), E on
    ``n .. 2n-2``, C on ``2n-1 .. 3n-3``.  Each factor of the sine product is
    written once on E and once on C, so the all-ones amplitude is the square.
    """
    if n < 2:
        raise CircuitError("ladder needs n >= 2")
    b = list(range(n))
    e = list(range(n, 2 * n - 1))
    c = list(range(2 * n - 1, 3 * n - 2))
    return Circuit(3 * n - 2, 0, tuple(_ladder_ops(n, b, e, c)))


def _state_prep_ops(amplitudes: np.ndarray, qubits: Sequence[int]) -> list[GateOp]:
    # binary-tree amplitude loading, most significant qubit first
    n = len(qubits)
    amps = np.asarray(amplitudes, dtype=float)
    ops = []
    for level in range(n):
        width = 1 << (n - level)
        blocks = amps.reshape(1 << level, width)
        half = width // 2
        if level == n - 1:
            angles = 2.0 * np.arctan2(blocks[:, 1], blocks[:, 0])
        else:
            lo = np.linalg.norm(blocks[:, :half], axis=1)
            hi = np.linalg.norm(blocks[:, half:], axis=1)
            angles = 2.0 * np.arctan2(hi, lo)
        target = qubits[n - 1 - level]
        controls = list(qubits[n - level:])
        ops += multiplexed_ry(angles, controls, target)
    return ops


def prepare_b_state(instance: PoissonInstance, qubits: Optional[Sequence[int]] = None) -> Circuit:
    """Map ``|0..0>`` on ``n`` qubits to ``sum_k b_k |k>`` (qubits[0] least significant)."""
    amps = instance.amplitudes()
    if qubits is None:
        qubits = list(range(instance.n))
    ops = _state_prep_ops(amps, list(qubits))
    return Circuit(max(qubits) + 1, 0, tuple(ops))


def build_solver(instance: PoissonInstance) -> Circuit:
    """Full optimized solver circuit on the :class:`SolverLayout` registers."""
    n = instance.n
    lay = SolverLayout.for_n(n)
    if 2 * n - 4 > n + 1:
        raise CircuitError(f"flag Toffoli ladder has too few spare qubits for n={n}")
    ops = [_op(GateKind.X, lay.anc2)]
    ops += _state_prep_ops(instance.amplitudes(), lay.b)
    st = _sine_transform_ops(lay.b, lay.anc2, lay.c)
    ops += st
    ops += _ladder_ops(n, lay.b, lay.e, lay.c)
    ops += multi_controlled_x(lay.e + lay.c, lay.anc, ancillas=lay.b + (lay.anc2,))
    ops += [_op(GateKind.X, q) for q in lay.c]
    ops += [op.adjoint() for op in reversed(st)]
    ops.append(_op(GateKind.X, lay.anc2))
    return Circuit(lay.num_qubits, 0, tuple(ops))


@dataclass
class SolverResult:
    post_selected_probs: dict
    success_probability: float
    solution_estimate: np.ndarray
    oracle_solution: np.ndarray
    oracle_probs: dict = field(default_factory=dict)


def solve(instance: PoissonInstance) -> SolverResult:
    """Simulate the solver for ``instance`` and read the success branch."""
    lay = SolverLayout.for_n(instance.n)
    circuit = build_solver(instance)
    state = run_ideal(circuit, StateVector.zero(circuit.num_qubits))
    probs, success = register_probabilities(state, lay.success_conditions(), lay.b)
    N = instance.N
    oracle = oracle_distribution(instance)
    # the success amplitudes are 8 * A^{-1} b_hat with no residual phase
    estimate = _success_amplitudes(state, lay).real / 8.0 * np.linalg.norm(instance.b)
    return SolverResult(
        post_selected_probs={k: float(probs.get(k, 0.0)) for k in range(1, N)},
        success_probability=float(success),
        solution_estimate=estimate,
        oracle_solution=solve_classical(instance),
        oracle_probs={k: float(p) for k, p in zip(range(1, N), oracle["joint"])},
    )


def _success_amplitudes(state, lay: SolverLayout) -> np.ndarray:
    amps = state.amplitudes
    base = (1 << lay.anc) | sum(1 << q for q in lay.e)
    return np.array([amps[base | sum(((k >> i) & 1) << q for i, q in enumerate(lay.b))]
                     for k in range(1, 1 << lay.n)])
