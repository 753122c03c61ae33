"""
Closed-form mass properties
===========================

Volume and moments of inertia of the oloid reduce to two complete elliptic
integrals at parameter 3/4, evaluated here with the arithmetic-geometric mean.
"""

import numpy as np

from oloid import OloidSpec, closed_form_properties, ellint_E, ellint_K

# the two constants everything is built from
K, E = ellint_K(0.75), ellint_E(0.75)
print(f"K(3/4) = {K:.16f}")
print(f"E(3/4) = {E:.16f}")

# unit radius, unit density
mp = closed_form_properties(OloidSpec())
print(f"area   = {mp.area:.15f}  (4 pi = {4 * np.pi:.15f})")
print(f"volume = {mp.volume:.15f}")
print("inertia about the centre:")
print(np.array2string(mp.inertia, precision=15, suppress_small=True))

# inertia grows like rho * r**5
for r in (0.5, 1.0, 2.0):
    I = closed_form_properties(OloidSpec(radius=r)).inertia
    print(f"r = {r:3}:  I_xx / r^5 = {I[0, 0] / r**5:.15f}")
