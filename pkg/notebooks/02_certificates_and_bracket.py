"""Interval / no-interval certificates and bracketing a critical parameter.

Run: python3 notebooks/02_certificates_and_bracket.py
"""

from cantordiff.decision import analyze, critical_bracket, decide_order1
from cantordiff.spectrum import CantorSpec, correlations

# Order one settles many cases outright.
for p in ([0.8, 0.8], [1, 0, 0.75], [1, 0, 1, 0.3]):
    d = decide_order1(correlations(CantorSpec.from_probs(p)))
    print(p, "->", d.verdict.value, d.to_dict())

# Where order one is silent, higher orders and eigenvalue words may speak.
for rho in (0.2, 0.3, 0.4):
    d = analyze(CantorSpec.from_probs([1, 0, 1, rho]), max_order=6, max_word_len=4)
    print(f"rho={rho}:", d.verdict.value, d.to_dict())

# Some vectors stay undecided at every order: one correlation is exactly 1.
d = analyze(CantorSpec.from_probs([1, 0, 0.6, 0, 1]), max_order=4, max_word_len=3)
print("(1,0,0.6,0,1):", d.verdict.value)

# Bisection over the parameter, assuming the verdict flips only once.
b = critical_bracket([1, 0, 1, "rho"], 0.2, 0.5, tol=1e-4, max_order=8, max_word_len=5)
print(f"{b.lo:.5f} < rho_c < {b.hi:.5f}  ({b.assumption})")
print("  lower end:", b.lo_certificate.to_dict())
print("  upper end:", b.hi_certificate.to_dict())
print("  effort:", b.effort)
