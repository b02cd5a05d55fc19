"""The fractional R-linear group, hypersphere images and symmetric points.

Words are generator sequences on the compactified algebra; they map
hyperspheres (E z conj(z) + J conj(z) + z conj(J) + D = 0) to hyperspheres
with closed-form parameter updates, and commute with inversion symmetry.
"""

import numpy as np

from cdconf.algebra import CdNumber, cd
from cdconf.calculus import is_pseudoconformal_at
from cdconf.moebius import (
    INF,
    Hypersphere,
    Inv,
    MoebiusWord,
    MulQ,
    Shift,
    apply_word,
    compose,
    inverse,
    map_hypersphere,
    reflect_conjugate,
    sphere_residual,
    symmetric_point,
)

rng = np.random.default_rng(5)

# infinity bookkeeping is exact
w = MoebiusWord([Shift(CdNumber.one(2)), Inv()])
print("z=1 through shift+inv:", apply_word(w, CdNumber.one(2)).coeffs)
print("Inv(0) =", apply_word(MoebiusWord([Inv()], 2), CdNumber.zero(2)))

# words form a group: inverses undo generator by generator
word = MoebiusWord([
    Shift(cd([0.5, 1.0, -0.3, 0.2])),
    Inv(),
    MulQ(cd([0, 1, 0, 0]), cd([1, 0, 1, 0])),
])
z = cd(rng.normal(size=4))
print("inverse round-trip error:",
      (apply_word(compose(word, inverse(word)), z) - z).norm())

# hypersphere images verified by sampling
s = Hypersphere.from_center_radius(cd([1, 0.5, 0, -0.2]), 1.2)
img = map_hypersphere(word, s)
pts = word.apply_many(s.sample(500, rng))
print(f"image-sphere residual over 500 samples: {sphere_residual(img, pts):.2e}")

# the unit sphere is fixed by inversion, parameters and all
unit = Hypersphere.from_center_radius(CdNumber.zero(2), 1.0)
print("unit sphere under Inv:",
      map_hypersphere(MoebiusWord([Inv()], 2), unit).to_json())

# symmetric points: z2 = z0 + R^2 (conj(z1) - conj(z0))^{-1}
print("\npartner of 2 in the unit sphere:",
      symmetric_point(CdNumber.real(2.0, 2), unit).coeffs)
z1 = cd([1.4, 0.7, -0.2, 0.5])
z2 = symmetric_point(z1, s)
w1, w2 = apply_word(word, z1), apply_word(word, z2)
lhs = symmetric_point(w1, img)
print("symmetry commutes with the word:", (lhs - w2).norm())

# every word is pseudoconformal where finite
v = is_pseudoconformal_at(lambda q: apply_word(word, q), z, tol=1e-5)
print("\nword verdict:", v.status, "lambda =", v.lam)

# reflection across the last-coefficient hyperplane
print("theta(1 + i3) =", reflect_conjugate(CdNumber.one(2) + CdNumber.basis(3, 2)).coeffs)
