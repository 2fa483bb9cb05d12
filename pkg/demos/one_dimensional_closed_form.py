"""Closed-form ground truth for the nearest-neighbour walk on the half-line.

For steps +1 (prob p) and -1 (prob q) started at x, the survival generating
function is (1 - phi(t)^{x+1}) / (1 - t) with phi the first-passage transform,
so every term is computable by exact truncated series arithmetic — entirely
independent of the dynamic-programming engine. This script compares both
routes and the three drift regimes.

Run:  python3 demos/one_dimensional_closed_form.py
"""

import math
from fractions import Fraction as F

from conewalk import (
    OneDimModel,
    asymptotic_reference,
    closed_form_coefficients,
    escape_prob_1d,
    survival_sequence,
)

for p in (F(1, 2), F(1, 4), F(3, 4)):
    m = OneDimModel(p=p, q=1 - p)
    series = closed_form_coefficients(m, 40)
    dp = survival_sequence(m.to_walk_model(), 40).terms
    agree = series == list(dp)
    print(f"p = {p}: closed form == DP on 41 terms: {agree}")
    assert agree

print("\nregimes at n = 400 (started from 0):")
for p in (F(1, 2), F(1, 4), F(3, 4)):
    m = OneDimModel(p=p, q=1 - p)
    a = closed_form_coefficients(m, 400)
    ref = asymptotic_reference(m, 400)
    print(f"  p = {p} ({ref.regime}):")
    print(f"    exact a_400     = {float(a[400]):.6e}")
    print(f"    predicted       = {ref.predicted:.6e}")
    if ref.regime == "positive-drift":
        print(f"    escape prob     = {escape_prob_1d(m)} "
              f"(exact limit of a_n)")
    elif ref.regime == "negative-drift":
        print(f"    decay rate rho  = {ref.rho:.6f} "
              f"(= 2 sqrt(pq) = {2 * math.sqrt(float(p * (1 - p))):.6f})")
