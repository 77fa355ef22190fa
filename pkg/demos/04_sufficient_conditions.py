"""Checking the sufficient conditions on the path loss alone.

For Rayleigh fading the plateau follows from two properties of L: the ratio
r L(r) / (-L'(r)) stays away from zero, and a Gaussian-weighted integral of
1/L^2 converges.  Random-state laws are handled through a deterministic lower
bound.

Run:  python demos/04_sufficient_conditions.py
"""
import math

from ase_lab.conditions import check_corollary2, check_corollary5
from ase_lab.models import (ExpDecay, LosNlosComposite, MultiSlope, ShiftedPowerLaw,
                            StretchedExp)

v = check_corollary2(ShiftedPowerLaw(1.0, 1.0, 4.0), r0=1.0)
print("shifted power law: holds =", v.holds, " zeta =", v.zeta)

# With beta = 2 the integral converges only once pi lambda0 exceeds 2 alpha.
v = check_corollary2(StretchedExp(1.0, 1.0, 2.0), r0=1.0)
print("Gaussian path loss: holds =", v.holds, " lambda_c =", v.lambda_c, " (2/pi =", 2 / math.pi, ")")
for lam0, res in v.details.items():
    print(f"   lambda0 = {lam0:8.3f}: {res.status}")

# A LoS/NLoS law whose NLoS branch is always the weaker one.
los = MultiSlope.continuous(1.0, (2.09, 3.75), (20.0,), elevation=1.0)
nlos = MultiSlope.continuous(0.1, (3.0, 4.0), (30.0,), elevation=1.0)
urban = LosNlosComposite(los, nlos, ExpDecay(18.0))
v = check_corollary5(urban)
print("\nLoS/NLoS composite: holds =", v.holds, " r0 =", v.r0, " zeta =", v.zeta)

# A "lower bound" that is not below the model is caught with a witness.
v = check_corollary5(ShiftedPowerLaw(1.0, 1.0, 4.0), lower_bound=ShiftedPowerLaw(2.0, 1.0, 4.0), r0=1.0)
print("misused lower bound: holds =", v.holds, " witness r =", v.witness)
