"""Correlations, expectation matrices and higher-order lifts.

Run: python3 notebooks/01_correlations_and_matrices.py
"""

import numpy as np

from cantordiff.spectrum import (
    CantorSpec,
    correlations,
    expectation_matrix,
    gamma_at,
    higher_order,
    pf_eigenvalue,
    word_matrix,
)

np.set_printoptions(precision=4, suppress=True)

# A base-4 family with one free parameter in the last digit.
rho = 0.3
spec = CantorSpec.from_probs([1, 0, 1, rho])
print("gamma:", correlations(spec))

# Each column digit k has a 2x2 matrix of expected offspring counts.
# Its column sums are the two neighbouring correlations (gamma_{k+1}, gamma_k).
for k in range(spec.M):
    m = expectation_matrix(spec, k)
    print(f"M({k}) =\n{m}\n  column sums {m.sum(axis=0)}")

# Longer column addresses multiply the matrices left to right.
w = word_matrix(spec, (0, 3))
print("M(0)M(3) =\n", w, "\n  Perron-Frobenius eigenvalue", round(pf_eigenvalue(w), 5))

# The same numbers come out of the order-2 lift, where (0, 3) is the single digit 3.
lifted = higher_order(spec, 2)
print("order-2 gamma[3] via lift:", correlations(lifted)[3], " via words:", gamma_at(spec, 2, 3))

# Two different vectors for the two sets give cross-correlations.
two = CantorSpec.from_probs([1, 0], [0, 1])
print("cross-correlations of (1,0) against (0,1):", correlations(two))
