"""The second negative moment of interference, two ways.

The plateau argument needs E[I^-2] < inf for the interference from stations
beyond the nearest one.  Here it is computed from the Laplace transform of
the interference and compared with direct simulation.

Run:  python demos/03_interference_moments.py
"""
from ase_lab.conditions import (InterferenceFunctional, corollary1_max_bound,
                                interference_laplace, mc_negative_moment_oracle,
                                second_negative_moment)
from ase_lab.models import Deterministic, NakagamiM, Rayleigh, ShiftedPowerLaw, StretchedExp

fn = InterferenceFunctional(ShiftedPowerLaw(1.0, 1.0, 4.0), Rayleigh(), lambda0=1.0)
print("mean interference 2 pi lambda0 gamma:", fn.mean_interference)
for t in (0.1, 1.0, 10.0):
    print(f"E[exp(-{t} I)] = {interference_laplace(fn, t):.6f}")

for lam0 in (0.5, 1.0, 2.0, 4.0):
    fn = InterferenceFunctional(ShiftedPowerLaw(1.0, 1.0, 4.0), Rayleigh(), lam0)
    quad = second_negative_moment(fn)
    mc = mc_negative_moment_oracle(fn, n=100_000, seed=0)
    print(f"lambda0={lam0:4}: quadrature {quad.value:.5f} ({quad.status}), "
          f"simulation {mc.mean:.5f} +/- {mc.stderr:.5f}")

# The bound through the strongest interferer is looser but also finite.
fn = InterferenceFunctional(ShiftedPowerLaw(1.0, 1.0, 4.0), Rayleigh(), 1.0)
print("bound via strongest interferer:", corollary1_max_bound(fn).value)

# Fading enters only through E[1 - exp(-h s)].
for fading in (Deterministic(), NakagamiM(2.0), Rayleigh()):
    fn = InterferenceFunctional(StretchedExp(1.0, 1.0, 1.0), fading, 1.0)
    print(f"{fading.kind:>14}: E[I^-2] = {second_negative_moment(fn).value:.5f}")
