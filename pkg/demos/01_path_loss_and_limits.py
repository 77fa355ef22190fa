"""Bounded path loss and the dense-network ASE plateau.

Walks through the model family: which laws are physically feasible, their
area integral gamma, and the limit L0 / (2 pi ln2 gamma) that the average
ASE approaches as base stations become dense.

Run:  python demos/01_path_loss_and_limits.py
"""
import math

import numpy as np

from ase_lab.analytic import ase_limit, multislope_limit
from ase_lab.models import (ElevatedPowerLaw, InversePoly, MinPowerLaw, MultiSlope,
                            ShiftedPowerLaw, StretchedExp, UnboundedPowerLaw, check_feasibility)

# The usual power law blows up at the origin, so it fails the first test.
report = check_feasibility(UnboundedPowerLaw(1.0, 4.0))
print("unbounded power law feasible?", report.feasible, "failed property:", report.failed_property)

# An exponent of 2 keeps the gain bounded but the area integral diverges.
report = check_feasibility(ShiftedPowerLaw(1.0, 1.0, 2.0))
print("shifted law with eta=2 feasible?", report.feasible, "failed property:", report.failed_property)

models = {
    "min(c0, r^-4)": MinPowerLaw(1.0, 1.0, 4.0),
    "(1 + r)^-4": ShiftedPowerLaw(1.0, 1.0, 4.0),
    "1 / (1 + r^4)": InversePoly(1.0, 1.0, 4.0),
    "(1 + r^2)^-2": ElevatedPowerLaw(1.0, 1.0, 4.0),
    "exp(-r)": StretchedExp(1.0, 1.0, 1.0),
}
print()
print(f"{'model':>16} {'gamma':>10} {'limit':>10} {'closed form':>12}")
for name, m in models.items():
    lim = ase_limit(m)
    print(f"{name:>16} {lim.gamma:10.6f} {lim.general_value:10.6f} {lim.closed_form_value:12.6f}")

# The gain scale A cancels: only the shape of L matters for the plateau.
for A in (0.1, 1.0, 10.0):
    print("A =", A, "->", ase_limit(ElevatedPowerLaw(A, 1.0, 4.0)).general_value)

# Raising the antenna (c0) lowers the plateau as 1/c0^2.
c0 = np.array([0.5, 1.0, 2.0, 4.0])
plateau = np.array([ase_limit(ElevatedPowerLaw(1.0, c, 4.0)).general_value for c in c0])
print("\nplateau * c0^2:", plateau * c0**2, "(constant = 1/(pi ln2) =", 1 / (math.pi * math.log(2)), ")")

# Multi-slope law: flat near the station, then r^-4 beyond r = 2.
two_slope = MultiSlope((1.0, 16.0), (0.0, 4.0), (2.0,))
res = multislope_limit(two_slope)
print("\ntwo-slope gamma:", two_slope.gamma_closed_form())
print("two-slope limit from gamma:", res.value)
print("published multi-slope expression:", res.printed_formula,
      f"({res.relative_difference:.1%} off; its last term divides by eta_n instead of eta_n - 2)")
