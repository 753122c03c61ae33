"""
Monte Carlo estimate
====================

Uniform points from the bounding box ``[-3/2, 3/2] x [-1, 1] x [-1, 1]`` are
kept when they lie in the hull of the two circles. A million points pin the
moments down to about three decimals.
"""

import numpy as np

from oloid import OloidSpec, closed_form_properties
from oloid.montecarlo import McConfig, contains, mc_mass_properties, support_function

# the support function gives membership: p is inside iff n.p <= h(n) for all n
print("h(e_x) =", support_function([1.0, 0.0, 0.0]))
print("origin:", contains([0.0, 0.0, 0.0]))
print("beyond the apex:", contains([1.52, 0.0, 0.0]))

cf = closed_form_properties(OloidSpec())
for n in (10_000, 100_000, 1_000_000):
    mc = mc_mass_properties(cfg=McConfig(samples=n), workers=4)
    err = np.diag(mc.inertia) - np.diag(cf.inertia)
    se = [mc.std_error[k] for k in ("Ixx", "Iyy", "Izz")]
    print(f"n = {n:>9}: volume {mc.volume:.4f}  I_diag error {np.round(err, 5)}  se {np.round(se, 5)}")
