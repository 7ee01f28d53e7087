# Which catalog maps are isometries, and with which constant?
#
# A map f from the n-ball into a Type IV domain D_m is an isometry up to a
# constant when f* omega_D = lam * omega_B. The constant is forced to be
# m/(n+1), so we ask the checker at exactly that value.

import numpy as np

from typeiv.maps import flat, gk, itheta, riv, whitney_iv
from typeiv.metrics import boundary_check, expected_lambda, isometry_check

cases = [riv(2), riv(3), itheta(2, np.pi / 12), itheta(3, np.pi / 6), flat(2, 4), flat(3, 5)]
for f in cases:
    (lam,) = expected_lambda(f.source.n, f.target.m)
    v = isometry_check(f, float(lam), samples=200, seed=0)
    print(f"{f.name:28s} lambda={lam}  max residual {v.max_residual:.1e}  pass={v.passed}")

# The Whitney-type map is proper (it sends the sphere into the boundary) but
# it does not preserve the metric at the expected constant.
w = whitney_iv(3)
print()
print("whitneyIV(3) proper:", boundary_check(w).passed)
v = isometry_check(w, 2 * 3 / 4)
print(f"whitneyIV(3) isometry at 3/2: residual {v.max_residual:.3f}")

# z -> z^k into the disc is an isometry only for k = 1.
for k in (1, 2):
    print(f"G_{k}: isometry at lambda=1 -> {isometry_check(gk(k), 1.0).passed}")
