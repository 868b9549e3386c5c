"""
Solving a small Poisson problem on a simulated circuit
======================================================

Run the solver for the built-in right-hand sides on the statevector
simulator and hold it up against a direct tridiagonal solve.
"""

import numpy as np

from qpoisson import PoissonInstance, builtin_instance, solve

# two qubits of grid: N = 4 intervals, three interior points
res = solve(builtin_instance(2))
print("register B probabilities:", {k: round(p, 4) for k, p in res.post_selected_probs.items()})
print("success probability:", round(res.success_probability, 4))

# the post-selected amplitudes carry the solution itself, sign included
print(np.column_stack([res.solution_estimate, res.oracle_solution]))

# three qubits of grid
res3 = solve(builtin_instance(3))
print([round(p, 3) for p in res3.post_selected_probs.values()])

# any right-hand side works; a point load in the middle
b = np.zeros(7)
b[3] = 1.0
res_pt = solve(PoissonInstance(3, b))
print("max error:", np.abs(res_pt.solution_estimate - res_pt.oracle_solution).max())
