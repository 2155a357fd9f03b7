"""
Runtime versus qubit count
==========================

Kernel evaluation is polynomial in N: compiling R is linear in the gate
count, and the Pfaffian of the 2N x 2N contraction matrix is cubic.
"""

import numpy as np

from matchkernel import experiments

rows, b_kernel, b_row = experiments.run_bench([8, 16, 32, 64], repeats=3)
print(experiments.bench_csv(rows))
print(f"fitted exponent: single kernel {b_kernel:.2f}, Gram row {b_row:.2f}")

# a log-log slope by hand, for comparison
ns = np.array([r.n_qubits for r in rows])
ts = np.array([r.kernel_s for r in rows])
print(np.polyfit(np.log(ns), np.log(ts), 1)[0])
