"""Automorphisms of the canonical domains and normal-family classification.

The ball involutions S_a, the coordinatewise polydisc maps and the
half-space Cayley transform come with numerical verifiers: the Schwarz
norm-shrinking check for origin-fixing maps and the identity
certification for self-maps with unit derivative.  The proximity metric
on compact grids powers a desk-scale Montel-style subsequence extractor.
"""

import numpy as np

from cdconf.algebra import CdNumber, cd, mul
from cdconf.domains import (
    BallAutomorphism,
    HomogeneousNorm,
    PolydiscAutomorphism,
    ball_apply,
    ball_to_halfspace,
    cartan_check,
    cayley_to_ball,
    halfspace_coordinate,
    polydisc_apply,
    schwarz_check,
)
from cdconf.normal import AffineMap, CompactGrid, classify_sequence, rho

rng = np.random.default_rng(2)

# the ball involution over the octonions
a = cd(rng.normal(size=8) * 0.2)
s = BallAutomorphism((a,))
z = cd(rng.normal(size=8) * 0.25)
w = ball_apply(s, z)
print("S_a(a) =", ball_apply(s, a).norm())
print("|S_a(z)| < 1:", w.norm(), "< 1")
print("involution error:", (ball_apply(s, w) - z).norm())

# polydisc involution: solve the unit multipliers for the zero preimage
one = CdNumber.one(2)
u1 = cd(rng.normal(size=4)); u1 = cd(u1.coeffs / u1.norm())
u2 = cd(rng.normal(size=4)); u2 = cd(u2.coeffs / u2.norm())
psi = PolydiscAutomorphism((cd([0.3, 0.2, 0, 0]),), ((u1, u2, one, one),))
from cdconf.domains import polydisc_zero_preimage
z0 = polydisc_zero_preimage(psi)
print("\npolydisc zero preimage maps to:", polydisc_apply(psi, z0).norm())

# half space <-> unit ball
m = CdNumber.basis(2, 2)
zh = cd([0.7, 0.1, 1.2, -0.4])
if halfspace_coordinate(zh, m) <= 0:
    zh = -zh
wb = cayley_to_ball(zh, m)
print("\nCayley: |W| =", wb.norm(), "< 1;",
      "round trip error:", (ball_to_halfspace(wb, m) - zh).norm())

# Schwarz: an origin-fixing automorphism never grows the norm
eu = HomogeneousNorm("euclidean")
g = lambda q: mul(mul(u1, q), u2)
samples = [cd(rng.normal(size=4) * 0.2) for _ in range(200)]
res = schwarz_check(g, eu, eu, samples)
print("\nSchwarz holds:", res.holds, "worst ratio:", res.worst_ratio)

# Cartan-style certification: S_a o S_a has f(0)=0 and f'(0)=I, so it IS id
sq = lambda q: ball_apply(s, ball_apply(s, q))
samples8 = [cd(rng.normal(size=8) * 0.2) for _ in range(100)]
cres = cartan_check(sq, CdNumber.zero(3), samples8)
print("identity certified:", cres.is_identity, "max deviation:", cres.max_deviation)

# normal families at desk scale: a bounded affine family with a planted
# convergent branch yields an extracted proximity-Cauchy subsequence
astar, bstar, cstar = (cd(rng.normal(size=4) * 0.5) for _ in range(3))
family = []
for k in range(64):
    if k % 2 == 0:
        family.append(AffineMap(astar + CdNumber.real(2.0 ** (-k / 2 - 2), 2),
                                bstar, cstar))
    else:
        family.append(AffineMap(cd(rng.normal(size=4)), cd(rng.normal(size=4)),
                                cd(rng.normal(size=4))))
grid = CompactGrid(CdNumber.zero(2), 1.0, resolution=300)
out = classify_sequence(family, grid, tol=1e-3)
print("\nclassification:", out.kind, "subsequence size:", len(out.indices))
print("rho between first two extracted members:",
      rho(family[out.indices[0]], family[out.indices[1]], grid).value)
