"""Numerical super-differentiation and derivative factorization.

The derivative of a map f: A_r -> A_r at a point is an R-linear operator,
held here as its real 2^r x 2^r matrix (column k = directional derivative
along the generator i_k).  A map is accepted as pseudoconformal at a point
when that operator has no conjugation-anticommuting part, is nonzero, and
is a positive-determinant similarity lambda * (rotation).  Over H the
rotation factors into unit-quaternion left/right multiplications (the
isoclinic decomposition of SO(4)); over O it factors into at most 28
coordinate-plane rotations via a Givens sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import CdNumber, mul_coeffs
from .errors import (
    DimensionError,
    EvaluationError,
    NonproperRotationError,
    NotSimilarityError,
)

__all__ = [
    "RealJacobian",
    "DzDecomposition",
    "QuatFactorization",
    "OctGivensFactorization",
    "Verdict",
    "DEFAULT_STEP",
    "jacobian",
    "left_mul_matrix",
    "right_mul_matrix",
    "split_dz",
    "is_pseudoconformal_at",
    "factor_quaternion",
    "factor_octonion_givens",
    "givens_matrix",
]

DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class RealJacobian:
    """Real matrix of a directional-derivative operator plus its provenance."""

    level: int
    entries: np.ndarray
    step: float = 0.0
    method: str = "analytic"

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        dim = 1 << self.level
        if m.shape != (dim, dim):
            raise DimensionError(f"expected a {dim}x{dim} matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise EvaluationError("non-finite Jacobian entries")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return 1 << self.level

    def apply(self, h: CdNumber) -> CdNumber:
        return CdNumber(self.entries @ h.coeffs)


@dataclass(frozen=True)
class DzDecomposition:
    """Split of a real-linear operator into dz and dz-bar parts.

    dz_part + dzbar_part o C equals the full operator (C = coefficient
    conjugation).  Holomorphic maps have vanishing dzbar_part; conjugation
    itself has vanishing dz_part.

    Sandwich operators h -> a h b span the whole operator space once the
    algebra is noncommutative (conj(h) itself is such a sum), so no linear
    projection can separate the two parts.  What does distinguish a
    derivative with a z-only shortest representation from one whose
    shortest representation needs the conjugated variable is orientation:
    z-only derivatives compose proper rotations, conjugated ones improper.
    The split therefore assigns the whole operator to the dz side exactly
    when its determinant is nonnegative.
    """

    dz_part: RealJacobian
    dzbar_part: RealJacobian


def _conj_matrix(dim: int) -> np.ndarray:
    c = np.eye(dim)
    c[1:, 1:] *= -1.0
    return c


def left_mul_matrix(a: CdNumber) -> np.ndarray:
    """Matrix of h -> a h on coefficient vectors."""
    dim = a.dim
    cols = mul_coeffs(a.coeffs[None, :], np.eye(dim))
    return cols.T


def right_mul_matrix(b: CdNumber) -> np.ndarray:
    """Matrix of h -> h b on coefficient vectors."""
    dim = b.dim
    cols = mul_coeffs(np.eye(dim), b.coeffs[None, :])
    return cols.T


def jacobian(f, z: CdNumber, step: float = DEFAULT_STEP) -> RealJacobian:
    """Second-order central-difference Jacobian of f at z.

    f must be defined on a ball of radius 2*step around z; a non-finite
    sample raises EvaluationError carrying the offending point.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    dim = z.dim
    cols = np.empty((dim, dim))
    for k in range(dim):
        e = CdNumber.basis(k, z.level) * step
        for sign, point in ((1.0, z + e), (-1.0, z - e)):
            w = f(point)
            if not isinstance(w, CdNumber) or not np.all(np.isfinite(w.coeffs)):
                raise EvaluationError("non-finite sample in jacobian", point=point)
            if sign > 0:
                plus = w
            else:
                minus = w
        cols[:, k] = (plus.coeffs - minus.coeffs) / (2.0 * step)
    return RealJacobian(z.level, cols, step=step, method="central-2")


def split_dz(j: RealJacobian) -> DzDecomposition:
    """Orientation splitting J = dz_part + dzbar_part o C, C = diag(1,-1,...,-1)."""
    dim = j.dim
    zero = np.zeros((dim, dim))
    if np.linalg.det(j.entries) >= 0.0:
        sym, anti = j.entries, zero
    else:
        sym, anti = zero, j.entries @ _conj_matrix(dim)
    return DzDecomposition(
        RealJacobian(j.level, sym, j.step, j.method),
        RealJacobian(j.level, anti, j.step, j.method),
    )


@dataclass(frozen=True)
class Verdict:
    """Outcome of the pointwise pseudoconformality test."""

    status: str  # Pseudoconformal | ZeroDerivative | AntiholomorphicPart | NotSimilarity
    lam: float | None = None
    residual: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == "Pseudoconformal"

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.residual is not None:
            out["residual"] = self.residual
        return out


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def is_pseudoconformal_at(f, z: CdNumber, tol: float = 1e-6,
                          step: float = DEFAULT_STEP) -> Verdict:
    """Test whether the derivative of f at z is a positive similarity.

    Checks: nonzero derivative, then J^T J = lambda^2 I within tol, then
    orientation.  An improper similarity reports AntiholomorphicPart with
    the magnitude of the conjugated component as residual; a proper one
    returns Pseudoconformal with the dilation lambda.  f may be a callable
    on CdNumber or a precomputed RealJacobian.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    jac = f if isinstance(f, RealJacobian) else jacobian(f, z, step)
    j = jac.entries
    scale = _spectral_norm(j)
    if scale <= tol:
        return Verdict("ZeroDerivative", residual=scale)
    g = j.T @ j
    lam2 = float(np.trace(g)) / jac.dim
    sim_res = _spectral_norm(g - lam2 * np.eye(jac.dim)) / lam2
    if sim_res >= tol:
        return Verdict("NotSimilarity", residual=sim_res)
    anti = _spectral_norm(split_dz(jac).dzbar_part.entries)
    if anti >= tol:
        return Verdict("AntiholomorphicPart", residual=anti)
    return Verdict("Pseudoconformal", lam=math.sqrt(lam2), residual=sim_res)


# ---------------------------------------------------------------------------
# quaternion factorization: J = lambda * L_a R_b
# ---------------------------------------------------------------------------

def _similarity_scale(j: np.ndarray, tol: float) -> float:
    """Validate J = lambda * (proper rotation) and return lambda."""
    dim = j.shape[0]
    g = j.T @ j
    lam2 = float(np.trace(g)) / dim
    if lam2 <= 0:
        raise NotSimilarityError("zero operator is not a similarity", residual=0.0)
    res = _spectral_norm(g - lam2 * np.eye(dim)) / lam2
    if res > tol:
        raise NotSimilarityError(f"J^T J deviates from lambda^2 I by {res:.3e}", residual=res)
    if np.linalg.det(j) < 0:
        raise NonproperRotationError("negative determinant: improper rotation")
    return math.sqrt(lam2)


@dataclass(frozen=True)
class QuatFactorization:
    """Dilation and unit quaternion pair with J h = lambda * a h b."""

    a: CdNumber
    b: CdNumber
    lam: float

    def matrix(self) -> np.ndarray:
        return self.lam * left_mul_matrix(self.a) @ right_mul_matrix(self.b)


def _sign_normalize(a: CdNumber, b: CdNumber) -> tuple[CdNumber, CdNumber]:
    """Fix the {(1,1),(-1,-1)} kernel: Re(a) >= 0, first nonzero coefficient
    of a positive on a tie."""
    flip = False
    if a.re < 0:
        flip = True
    elif a.re == 0:
        nz = np.nonzero(a.coeffs)[0]
        if nz.size and a.coeffs[nz[0]] < 0:
            flip = True
    if flip:
        return -a, -b
    return a, b


def factor_quaternion(j: RealJacobian, tol: float = 1e-8) -> QuatFactorization:
    """Recover (a, b, lambda) from a positive quaternion similarity.

    Uses the isoclinic decomposition of SO(4): the Frobenius projections
    A_pq = <J, L_{i_p} R_{i_q}> / 4 assemble the rank-one matrix
    lambda * a b^T, whose leading singular triple yields the factors.
    """
    if j.level != 2:
        raise DimensionError("quaternion factorization requires level 2")
    lam = _similarity_scale(j.entries, tol)
    basis = [CdNumber.basis(k, 2) for k in range(4)]
    assoc = np.empty((4, 4))
    for p in range(4):
        lp = left_mul_matrix(basis[p])
        for q in range(4):
            assoc[p, q] = np.tensordot(j.entries, lp @ right_mul_matrix(basis[q])) / 4.0
    u, s, vt = np.linalg.svd(assoc)
    if s[0] <= 0 or (s.size > 1 and s[1] > tol * max(s[0], 1.0)):
        raise NotSimilarityError("associate matrix is not rank one", residual=float(s[1]))
    a = CdNumber(u[:, 0])
    b = CdNumber(vt[0, :])
    # the SVD can only flip (a, b) -> (-a, -b), which is exactly the kernel
    a, b = _sign_normalize(a, b)
    out = QuatFactorization(a, b, lam)
    err = _spectral_norm(out.matrix() - j.entries) / max(lam, 1.0)
    if err > max(tol, 1e-8):
        raise NotSimilarityError(f"reconstruction residual {err:.3e}", residual=err)
    return out


# ---------------------------------------------------------------------------
# octonion factorization: Givens sweep over coordinate planes
# ---------------------------------------------------------------------------

def givens_matrix(k: int, m: int, t: float, dim: int = 8) -> np.ndarray:
    """Plane rotation acting on coefficients by
    h_k -> cos(t) h_k + sin(t) h_m,  h_m -> -sin(t) h_k + cos(t) h_m."""
    if not 0 <= k < m < dim:
        raise IndexError(f"plane indices ({k},{m}) out of range")
    g = np.eye(dim)
    c, s = math.cos(t), math.sin(t)
    g[k, k] = c
    g[k, m] = s
    g[m, k] = -s
    g[m, m] = c
    return g


@dataclass(frozen=True)
class OctGivensFactorization:
    """Dilation and plane angles with J = lambda * prod G(k, m, t).

    Angles are listed in lexicographic (k, m) order; the matrix product is
    taken in that order (rightmost factor acts first on a vector).
    """

    lam: float
    angles: tuple = field(default_factory=tuple)
    level: int = 3

    def matrix(self) -> np.ndarray:
        dim = 1 << self.level
        out = np.eye(dim)
        for k, m, t in self.angles:
            out = out @ givens_matrix(k, m, t, dim)
        return self.lam * out


def factor_octonion_givens(j: RealJacobian, tol: float = 1e-8,
                           drop_below: float = 1e-12) -> OctGivensFactorization:
    """QR-style Givens sweep of an 8x8 positive similarity.

    Eliminates the below-diagonal entries column by column; the inverse
    rotations, read back in lexicographic plane order, reconstruct J/lambda.
    At most 28 angles; angles below drop_below are omitted.
    """
    if j.level != 3:
        raise DimensionError("octonion Givens factorization requires level 3")
    lam = _similarity_scale(j.entries, tol)
    dim = 8
    a = j.entries / lam
    angles = []
    for k in range(dim - 1):
        for m in range(k + 1, dim):
            t = math.atan2(a[m, k], a[k, k])
            if t != 0.0:
                a = givens_matrix(k, m, t, dim) @ a
            if abs(t) > drop_below:
                angles.append((k, m, -t))
    out = OctGivensFactorization(lam, tuple(angles))
    err = _spectral_norm(out.matrix() - j.entries) / max(lam, 1.0)
    if err > max(tol, 1e-8):
        raise NotSimilarityError(f"reconstruction residual {err:.3e}", residual=err)
    return out
