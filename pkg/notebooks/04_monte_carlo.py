"""Monte Carlo checks of the expectation machinery.

Run: python3 notebooks/04_monte_carlo.py
"""

import math

import numpy as np

from cantordiff.simulate import (
    column_histogram,
    expected_column_decay,
    expected_level1_columns,
    run_experiment,
    sample,
)
from cantordiff.spectrum import CantorSpec

np.set_printoptions(precision=4, suppress=True)

# One realisation and its column histogram.
spec = CantorSpec.from_probs([0.9, 0.5, 0.9])
a, b = sample(spec, 3, seed=1, side=1), sample(spec, 3, seed=1, side=2)
h = column_histogram(a, b, 3)
print("survivors per level:", [len(x) for x in a.levels], [len(x) for x in b.levels])
print("triangles:", h.total, "= 2 *", len(a.survivors(3)), "*", len(b.survivors(3)))

# Level-1 column means against the exact expectations.
stats = run_experiment(spec, 1, 50000, seed=3)
mL, mR, gL, gR = expected_level1_columns(spec)
print("per-column L means", np.array(stats.gamma_mean_L), "expected", gL)
print("per-column R means", np.array(stats.gamma_mean_R), "expected", gR)

# Dimension estimate for Mandelbrot percolation.
mand = run_experiment(CantorSpec.from_probs([0.8] * 3), 7, 4000, seed=7, constant_columns=False)
print("dimension estimate", round(mand.dim_estimate[-1], 4), "limit", round(math.log(2.4) / math.log(3), 4))
print(mand.to_csv())

# Columns whose address repeats a digit with both correlations below 1 empty out.
sub = run_experiment(CantorSpec.from_probs([1, 0, 0.75]), 5, 3000, seed=4)
print("empty rate of the constant-1 column by level:", [round(r[1], 3) for r in sub.empty_constant_rate])
print("Markov bound from the matrices:", [round(x, 3) for x in expected_column_decay(CantorSpec.from_probs([1, 0, 0.75]), (), 1, 5)])
