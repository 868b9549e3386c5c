"""
The sine transform hiding inside a Fourier transform
====================================================

Conjugating a Fourier transform by an add-one permutation leaves the
orthogonal sine matrix on a subspace.  Pull that block out of the
simulated unitary and look at it.
"""

import numpy as np

from qpoisson import StateVector, build_sine_transform, circuit_metrics, run_ideal

n = 3
N = 2 ** n
circuit = build_sine_transform(n)
print(circuit.num_qubits, "qubits,", len(circuit), "gates")

# ancilla (qubit n) in |1>, carries in |0>, data j = 1..N-1
anc = 1 << n
block = np.zeros((N - 1, N - 1), dtype=complex)
for j in range(1, N):
    out = run_ideal(circuit, StateVector.basis(circuit.num_qubits, anc | j)).amplitudes
    block[:, j - 1] = out[[anc | i for i in range(1, N)]]

k = np.arange(1, N)
st = np.sqrt(2 / N) * np.sin(np.outer(k, k) * np.pi / N)

# the block is the sine matrix times -i
print(np.round(block.imag, 3))
print("error vs -i ST:", np.abs(block + 1j * st).max())

# sine matrix diagonalizes the Poisson matrix
A = N * N * (2 * np.eye(N - 1) - np.eye(N - 1, k=1) - np.eye(N - 1, k=-1))
print(np.round(np.diag(st @ A @ st), 3))

for m in range(2, 6):
    print(m, circuit_metrics(build_sine_transform(m)))
