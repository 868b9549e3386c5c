"""
Running the expected gate listings
===================================

The two reference listings ship as QASM files inside the package.  Load
them and draw shots the way a device would.
"""

from qpoisson import (
    circuit_metrics,
    outcome_distribution,
    parse,
    run_ideal,
    sample,
    serialize,
)
from qpoisson.analysis import ideal_probabilities, reference_circuit, reference_setup

c2 = reference_circuit(2)
print(c2.num_qubits, "qubits,", len(c2), "statements")
print(circuit_metrics(c2))

# text round trip
assert parse(serialize(c2)) == c2

# exact register probabilities on the success branch
print(ideal_probabilities(reference_setup(2)))

# shots, deterministic under a fixed seed
state = run_ideal(c2.without_measurements())
counts = sample(state, 16384, seed=1)
print(sorted(counts.items(), key=lambda kv: -kv[1])[:5])

top = sorted(outcome_distribution(state), key=lambda o: -o.probability)[:5]
for o in top:
    print(o.bitstring, round(o.probability, 4))

c3 = reference_circuit(3)
m3 = circuit_metrics(c3)
print("n=3:", m3.one_two_qubit_gate_count, "gates,", m3.ccx_count, "Toffolis, depth", m3.depth)
