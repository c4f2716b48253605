"""Rearrangements and rearrangement-invariant norms of simple functions.

A simple function is a list of (value, measure) pieces on a set of measure
one.  Every norm below depends on it only through its decreasing
rearrangement, so we start there.
"""

import numpy as np

from rispace import LogPowerWeight, SimpleFunction, SpaceSpec, rearrange, space_norm
from rispace.families import power_log, random_family
from rispace.spaces import INF, embedding_report, inclusion_chains

f = SimpleFunction.from_pieces([(3.0, 0.2), (-1.0, 0.5), (2.0, 0.3)])
g = rearrange(f)
print("levels of f_*:     ", g.levels)
print("breakpoints of f_*:", g.breakpoints)

# The same function measured in several spaces.  Lorentz spaces refine the
# Lebesgue scale with a second index; a logarithmic factor refines further.
specs = [
    SpaceSpec.lebesgue(2),
    SpaceSpec.lorentz(2, 1),
    SpaceSpec.lorentz(2, INF),
    SpaceSpec.lorentz_zygmund(2, 2, 1.0),
    SpaceSpec.grand(2, 1.0),
    SpaceSpec.small(2, 1.0),
    SpaceSpec.ggamma(2, 1, LogPowerWeight(-1.0, -0.5)),
]
for s in specs:
    print(f"{str(s):60s} {space_norm(f, s):.6f}")

# A profile t**(-1/2) (1 - log t)**(-delta) sits at the edge of L^2: it is in
# L^2 only for delta > 1/2, while the weak space L^{2,inf} holds it for any
# delta >= 0.  Truncated at t = 1e-250 the growth is plainly visible.
print("\nedge of L^2")
for delta in (1.0, 0.7, 0.55, 0.5):
    h = power_log(2.0, delta, t_min=1e-250)
    print(f"delta={delta:<5g} L^2 {space_norm(h, SpaceSpec.lebesgue(2)):10.4f}"
          f"   L^(2,inf) {space_norm(h, SpaceSpec.lorentz(2, INF)):8.4f}")

# Each inclusion of a chain is checked by the ratio ||f||_big / ||f||_small
# over random functions; a bounded ratio is the numerical face of X c Y.
print("\ninclusion chain at p = 2")
fam = random_family(200, seed=1)
chain = inclusion_chains(2.0, 1.0)[0]
for a, b in zip(chain, chain[1:]):
    rep = embedding_report(a, b, fam)
    print(f"{str(a):45s} -> {str(b):45s} max ratio {rep.max:.3f}")

# Hardy's inequality: the maximal-function variant of the Lorentz norm is
# equivalent, with constant at most p' = p/(p - 1).
r = [space_norm(h, SpaceSpec.lorentz(2, 2, maximal=True)) / space_norm(h, SpaceSpec.lorentz(2, 2)) for h in fam]
print(f"\nf_** versus f_* at p = 2: ratio in [{min(r):.3f}, {max(r):.3f}], bound 2")
print("median ratio", float(np.median(r)))
