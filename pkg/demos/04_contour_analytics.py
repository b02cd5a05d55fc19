"""Line integrals, winding numbers and zero counting on planar loops.

Loops live in a plane spanned by 1 and a unit imaginary direction M.  The
integral operator applies the hat of the phrase's antiderivative to the
segment displacements; the argument principle counts enclosed zeros from
the accumulated phase of the image curve.
"""

import numpy as np

from cdconf import phrase as ph
from cdconf.algebra import CdNumber, cd, mul
from cdconf.contour import (
    PlanarLoop,
    PlanarPath,
    PlaneRect,
    count_zeros,
    line_integral,
    locate_zeros,
    rouche_equal,
    winding,
)

I1 = CdNumber.basis(1, 2)
ZERO = CdNumber.zero(2)

# fundamental theorem on an open path: integral = endpoint difference
seg = PlanarPath.segment(ZERO, I1, (0.0, -0.4), (0.9, 0.7), n=16)
nu = ph.parse("[0,1,0,0] z [1,1,0,0]")
mu = nu.antiderive()
val = line_integral(nu, seg)
want = mu.eval(seg.point(len(seg.pts) - 1)) - mu.eval(seg.point(0))
print(f"open-path integral error: {(val - want).norm():.2e}")

# and a closed loop of any z-only phrase integrates to zero
loop = PlanarLoop.circle(ZERO, I1, radius=1.0, n=64)
print(f"closed loop of a z^2 b z^3: "
      f"{line_integral(ph.parse('[0,1,0,0] z^2 [0,0,1,0] z^3'), loop).norm():.2e}")

# winding numbers are exact on polylines
print("\nwinding about the center:", winding(loop, ZERO).turns)
print("winding about 3:        ", winding(loop, CdNumber.real(3.0, 2)).turns)

# argument principle: orders add up
za = CdNumber.real(0.2, 2) + I1 * 0.3
f_simple = lambda z: mul(mul(cd([1, 2, 0, 1]), z - za), cd([0, 1, 1, 0]))
f_double = lambda z: mul(z - za, z - za)
print("\ncount c(z-a)d  :", count_zeros(f_simple, loop))
print("count (z-a)^2  :", count_zeros(f_double, loop))

# Rouche: a small perturbation cannot change the count
res = rouche_equal(lambda z: CdNumber.real(0.1, 2), lambda z: z, loop)
print(f"Rouche |0.1| < |z|: counts {res.n_g} = {res.n_h} -> holds: {res.holds}")

# quadtree zero localization with conserved total order
g = lambda z: mul(mul(z - za, z - za), z + CdNumber.real(0.5, 2))
rect = PlaneRect(ZERO, I1, -0.9, 0.9, -0.85, 0.95)
print("\nlocated zeros of (z-a)^2 (z+1/2):")
for center, order in locate_zeros(g, rect, min_cell=0.01):
    print(f"  order {order} near ({center.coeffs[0]:+.3f}, {center.coeffs[1]:+.3f})")
