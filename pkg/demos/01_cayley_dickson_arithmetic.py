"""A tour of exact Cayley-Dickson arithmetic.

Elements of A_r are plain coefficient vectors over the generators
i_0 = 1, i_1, ..., i_{2^r-1}; the product table comes from the doubling
rule applied recursively, so quaternions (r=2), octonions (r=3) and the
non-division algebras above them all share one implementation.
"""

import numpy as np

from cdconf.algebra import CdNumber, cd, exp, inv, ln_principal, mul, polar, pow_real, proj

# quaternion generator products: i1 i2 = i3, anticommuting
i1, i2, i3 = (CdNumber.basis(k, 2) for k in (1, 2, 3))
print("i1 * i2 =", mul(i1, i2).coeffs)
print("i2 * i1 =", mul(i2, i1).coeffs)

# octonions are nonassociative but alternative
rng = np.random.default_rng(0)
x, y = cd(rng.normal(size=8)), cd(rng.normal(size=8))
assoc_defect = (mul(mul(x, y), x) - mul(x, mul(y, x))).norm()
alt_defect = (mul(x, mul(x, y)) - mul(mul(x, x), y)).norm()
print(f"octonion (xy)x vs x(yx): {assoc_defect:.2e} (zero: alternativity)")
print(f"octonion x(xy) vs (xx)y: {alt_defect:.2e}")

# ... while a generic triple genuinely fails to associate
z = cd(rng.normal(size=8))
print(f"octonion (xy)z vs x(yz): {(mul(mul(x, y), z) - mul(x, mul(y, z))).norm():.2e}")

# the norm is multiplicative on H and O
print(f"|xy| - |x||y| = {mul(x, y).norm() - x.norm() * y.norm():.2e}")

# sedenions (r=4) keep the ring laws but admit zero divisors
s = CdNumber.basis(3, 4) + CdNumber.basis(10, 4)
t = CdNumber.basis(6, 4) - CdNumber.basis(15, 4)
print(f"sedenion zero divisor: |s|=|t|={s.norm():.3f}, |s t| = {mul(s, t).norm():.1e}")

# coefficients can be recovered through the algebraic projection identity
h = cd([3.0, 2.0, -1.0, 0.5])
print("proj:", [proj(j, h) for j in range(4)], "vs coeffs", h.coeffs.tolist())

# exponential, logarithm, polar form
print("exp(pi i1) =", exp(i1 * np.pi).coeffs)
print("Ln(-1)     =", ln_principal(CdNumber.real(-1.0, 2)).coeffs)
w = cd(rng.normal(size=8))
p = polar(w)
print(f"polar reconstruction error: {(p.reconstruct() - w).norm():.2e}")
r = pow_real(w, 0.5)
print(f"sqrt check |r^2 - w|: {(mul(r, r) - w).norm():.2e}")
print(f"w * inv(w) = 1 error: {(mul(w, inv(w)) - CdNumber.one(3)).norm():.2e}")
