import math

import numpy as np
import pytest
from conftest import random_state

from qpoisson.core import StateVector
from qpoisson.gates import (
    Circuit,
    CircuitError,
    GateKind,
    GateOp,
    inverse,
    remap,
    unitary_of,
)
from qpoisson.sim import run_ideal


def op(kind, *qubits, angle=None):
    return GateOp(kind, tuple(qubits), angle)


@pytest.mark.parametrize("kind", [k for k in GateKind if k.is_unitary])
def test_every_unitary_gate_is_unitary(kind):
    u = unitary_of(kind, 0.37 if kind.parameterized else None)
    assert u.shape == (1 << kind.arity,) * 2
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-14)


def test_controlled_gates_are_block_diagonal():
    ry = unitary_of(GateKind.RY, 0.8)
    cry = unitary_of(GateKind.CRY, 0.8)
    assert np.allclose(cry[:2, :2], np.eye(2))
    assert np.allclose(cry[2:, 2:], ry)
    assert np.allclose(cry[:2, 2:], 0)


def test_ry_rotates_zero_towards_one():
    u = unitary_of(GateKind.RY, math.pi)
    assert np.allclose(u @ [1, 0], [0, 1])


def test_cx_control_first():
    c = Circuit(2, 0, (op(GateKind.X, 1), op(GateKind.CX, 1, 0)))
    s = run_ideal(c)
    assert abs(s.amplitudes[3]) == pytest.approx(1.0)


def test_ccx_flips_only_when_both_controls_set():
    for controls in range(4):
        ops = [op(GateKind.X, q) for q in (0, 1) if (controls >> q) & 1]
        ops.append(op(GateKind.CCX, 0, 1, 2))
        s = run_ideal(Circuit(3, 0, tuple(ops)))
        expect = controls | (4 if controls == 3 else 0)
        assert abs(s.amplitudes[expect]) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [
    lambda: op(GateKind.CX, 0),
    lambda: op(GateKind.CX, 1, 1),
    lambda: op(GateKind.RY, 0),
    lambda: op(GateKind.H, 0, angle=1.0),
    lambda: op(GateKind.RY, 0, angle=float("nan")),
    lambda: op(GateKind.X, -1),
    lambda: GateOp(GateKind.MEASURE, (0,)),
    lambda: Circuit(2, 0, (op(GateKind.X, 2),)),
    lambda: Circuit(0),
])
def test_malformed_gates_rejected(bad):
    with pytest.raises(CircuitError):
        bad()


def test_circuit_is_immutable_and_append_returns_new():
    c = Circuit(2)
    d = c.append(op(GateKind.H, 0))
    assert len(c) == 0 and len(d) == 1
    with pytest.raises(AttributeError):
        c.ops = ()


def test_inverse_undoes_circuit(rng):
    ops = []
    for _ in range(40):
        kind = rng.choice([GateKind.H, GateKind.RY, GateKind.CRZ, GateKind.CP, GateKind.CCX, GateKind.SWAP])
        qubits = tuple(int(q) for q in rng.permutation(4)[:kind.arity])
        ops.append(GateOp(kind, qubits, float(rng.normal()) if kind.parameterized else None))
    c = Circuit(4, 0, tuple(ops))
    psi = StateVector(random_state(rng, 4))
    back = run_ideal(inverse(c), run_ideal(c, psi))
    assert np.allclose(back.amplitudes, psi.amplitudes, atol=1e-12)


def test_inverse_refuses_measurements():
    c = Circuit(1, 1, (GateOp(GateKind.MEASURE, (0,), clbit=0),))
    with pytest.raises(CircuitError):
        inverse(c)


def test_remap_and_compose():
    inner = Circuit(2, 0, (op(GateKind.CX, 0, 1),))
    moved = remap(inner, [3, 1])
    assert moved.ops[0].qubits == (3, 1)
    outer = Circuit(4).compose(inner, [2, 0])
    assert outer.ops[0].qubits == (2, 0)
    with pytest.raises(CircuitError):
        remap(inner, [0])
