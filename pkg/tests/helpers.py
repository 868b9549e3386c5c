import numpy as np

from qpoisson.core import StateVector
from qpoisson.sim import run_ideal


def circuit_unitary(circuit):
    n = circuit.num_qubits
    cols = [run_ideal(circuit, StateVector.basis(n, k)).amplitudes for k in range(1 << n)]
    return np.array(cols).T


def basis_image(circuit, index):
    """Index of the basis state ``circuit`` maps ``|index>`` onto (must be a permutation)."""
    amps = run_ideal(circuit, StateVector.basis(circuit.num_qubits, index)).amplitudes
    out = int(np.argmax(np.abs(amps)))
    assert abs(abs(amps[out]) - 1) < 1e-9
    return out


def sine_block(n):
    N = 1 << n
    j = np.arange(1, N)
    return np.sqrt(2.0 / N) * np.sin(np.outer(j, j) * np.pi / N)


def extract_sine_block(circuit, n):
    """Data-subspace block of ``build_sine_transform(n)``: anc=1, carries=0, data 1..N-1."""
    N = 1 << n
    anc = 1 << n
    block = np.zeros((N - 1, N - 1), dtype=complex)
    for j in range(1, N):
        amps = run_ideal(circuit, StateVector.basis(circuit.num_qubits, anc | j)).amplitudes
        block[:, j - 1] = amps[[anc | i for i in range(1, N)]]
    return block
