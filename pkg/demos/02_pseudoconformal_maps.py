"""Verifying pseudoconformality and factoring the derivative.

A map is pseudoconformal at a point when its real Jacobian there is a
positive-determinant similarity.  Over the quaternions every such
Jacobian factors as lambda * (h -> a h b) with unit quaternions (a, b);
over the octonions it factors into at most 28 coordinate-plane rotations.
"""

import numpy as np

from cdconf.algebra import CdNumber, cd, exp, inv, mul
from cdconf.calculus import (
    RealJacobian,
    factor_octonion_givens,
    factor_quaternion,
    is_pseudoconformal_at,
    jacobian,
    left_mul_matrix,
    right_mul_matrix,
)

rng = np.random.default_rng(1)

# shifts, sandwich maps and inversion all pass the test
z0 = cd([0.4, 0.3, -0.2, 0.1])
for name, f in [
    ("z + c", lambda z: z + cd([1, 2, 3, 4])),
    ("a z b", lambda z: mul(mul(cd([0, 1, 0, 0]), z), cd([1, 1, 0, 0]))),
    ("Inv", lambda z: inv(z)),
    ("conj", lambda z: z.conj()),
    ("exp at a real point", lambda z: exp(z)),
]:
    point = CdNumber.real(0.3, 2) if "real" in name else z0
    v = is_pseudoconformal_at(f, point)
    print(f"{name:22s} -> {v.status:20s} lambda={v.lam}")

# the literal similarity test knows exp is NOT angle-preserving off-axis
v = is_pseudoconformal_at(lambda z: exp(z), CdNumber.basis(1, 2) * (np.pi / 2), tol=1e-3)
print(f"exp at (pi/2) i1       -> {v.status} (residual {v.residual:.3f})")

# recover (a, b, lambda) from a quaternion similarity
a = cd(rng.normal(size=4)); a = cd(a.coeffs / a.norm())
b = cd(rng.normal(size=4)); b = cd(b.coeffs / b.norm())
J = RealJacobian(2, 2.5 * left_mul_matrix(a) @ right_mul_matrix(b))
fac = factor_quaternion(J)
print("\nisoclinic factors: lambda =", fac.lam)
print("  a =", np.round(fac.a.coeffs, 6), " (input", np.round(a.coeffs, 6), ")")
print("  reconstruction error:", np.linalg.norm(fac.matrix() - J.entries, 2))

# octonion similarity -> ordered plane rotations
q, _ = np.linalg.qr(rng.normal(size=(8, 8)))
if np.linalg.det(q) < 0:
    q[:, 0] = -q[:, 0]
fo = factor_octonion_givens(RealJacobian(3, 1.7 * q))
print(f"\noctonion Givens sweep: lambda = {fo.lam:.6f}, {len(fo.angles)} angles")
print("  first three:", [(k, m, round(t, 4)) for k, m, t in fo.angles[:3]])
print("  reconstruction error:", np.linalg.norm(fo.matrix() - 1.7 * q, 2))

# curved maps: the square is a similarity along the real axis only.  At a
# generic point its derivative h -> z h + h z mixes directions unevenly,
# the same discrepancy the literal test reports for exp off-axis.
f = lambda z: mul(mul(a, mul(z, z)), b)
x0 = CdNumber.real(-0.7, 2)
v = is_pseudoconformal_at(jacobian(f, x0), x0)
print(f"\na z^2 b at -0.7 -> {v.status}, lambda = {v.lam:.6f} (= 2 |x0| = {2 * x0.norm():.6f})")
v = is_pseudoconformal_at(jacobian(f, z0), z0, tol=1e-3)
print(f"a z^2 b at a generic point -> {v.status} (residual {v.residual:.3f})")
