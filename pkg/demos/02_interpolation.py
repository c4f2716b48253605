"""The K-functional and logarithmic real interpolation.

For the couple (L^1, L^inf) the K-functional is the integral of f_* up to t.
The truncation search used for general couples reproduces it, and the
logarithmic interpolation norm built from K is compared with the norm of the
space it is identified with.
"""

import numpy as np

from rispace import CoupleSpec, InterpParams, SpaceSpec
from rispace.families import power_log, power_log_family, random_simple
from rispace.interp import identify_interp_space, k_functional_grid, log_interp_norm, verify_identification
from rispace.spaces import INF, space_norm

L1, L2, LINF = SpaceSpec.lebesgue(1), SpaceSpec.lebesgue(2), SpaceSpec.lebesgue(INF)

f = random_simple(np.random.default_rng(0), 12)
ts = np.geomspace(1e-3, 1, 6)
exact = k_functional_grid(f, ts, CoupleSpec(L1, LINF))
search = k_functional_grid(f, ts, CoupleSpec(L1, LINF), fast=False)
print("t        integral of f_*   truncation search")
for t, a, b in zip(ts, exact, search):
    print(f"{t:8.1e} {a:16.8f} {b:16.8f}")

# For (L^1, L^2) there is no closed form; the search still returns an upper
# bound that is concave in t.
print("\nK(f, t; L^1, L^2):", np.round(k_functional_grid(f, ts, CoupleSpec(L1, L2)), 6))

# (L^1, L^2) with theta = 1/2, q = 1 and a logarithmic weight of order alpha
# is the Lorentz-Zygmund space L^{4/3,1}(log L)^alpha.
couple = CoupleSpec(L1, L2)
for alpha in (-0.5, 0.0, 1.0):
    params = InterpParams(0.5, 1.0, alpha)
    target = identify_interp_space(couple, params)
    h = power_log(2.0, 1.0, n=1024)
    a = log_interp_norm(h, couple, params, n_grid=1024)
    b = space_norm(h, target)
    print(f"\nalpha={alpha:g}: identified {target}")
    print(f"  interpolation norm {a:.4f}, space norm {b:.4f}, ratio {a / b:.3f}")

# Over a family of power-log profiles the ratio stays in a narrow band.
fam = power_log_family([1.5, 2.0, 3.0, 6.0], (0.0, 0.5, 1.5), n=1024)
rep = verify_identification(couple, InterpParams(0.5, 1.0), fam, n_grid=1024)
print(f"\nratio band over {len(fam)} profiles: [{rep.min:.3f}, {rep.max:.3f}]")
print("slowly varying quotient at t = 1e-4, 1e-8, 1e-12:",
      [round(v, 4) for v in rep.quotients.values()], "limit", rep.limit)
