"""Planar contours, line integrals, winding numbers and zero counting.

Loops live in affine planes a0 + R + R*M with a directing unit imaginary
element M; they are closed polylines given by in-plane coordinates (x, y).
The line-integral operator realizes the partition sums of the operator
kernel (the hat of the phrase's antiderivative) with per-segment Gauss
nodes and dyadic refinement; for a one-sided tagged sum the limit is the
same but first-order slow, so the segment rule is used instead.

Winding numbers of the polylines themselves are exact (per-segment phase
increments never reach pi for an off-curve reference point).  Image curves
under a map f are tracked adaptively: the accumulated principal-logarithm
increments of consecutive image samples add to 2 pi N u, with u the image
orientation direction obtained by pushing the plane frame (1, M) through a
directional derivative of f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import CdNumber, inv, ln_principal, mul
from .errors import (
    BoundaryZeroError,
    DegenerateLoopError,
    DomainError,
    EvaluationError,
    PreconditionError,
    QuadratureError,
)
from .phrase import Phrase, hat_operator

__all__ = [
    "PlanarPath",
    "PlanarLoop",
    "PlaneRect",
    "WindingResult",
    "line_integral",
    "winding",
    "count_zeros",
    "rouche_equal",
    "RoucheResult",
    "max_principle_check",
    "MaxPrincipleResult",
    "locate_zeros",
    "disc_samples",
]

PHASE_STEP_LIMIT = math.pi / 4  # re-sample an image curve above this per-step phase


def _check_directing(m: CdNumber, tol: float = 1e-12):
    if abs(m.re) > tol or abs(m.norm() - 1.0) > tol:
        raise DomainError("directing element must be unit imaginary")


class PlanarPath:
    """Open or closed polyline in the plane a0 + R + R*M."""

    min_segments = 1

    def __init__(self, a0: CdNumber, m: CdNumber, pts):
        _check_directing(m)
        if m.dim != a0.dim:
            raise DomainError("a0 and M must share one algebra level")
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < self.min_segments + 1:
            raise DomainError(
                f"need at least {self.min_segments} segments of (x, y) samples")
        if not np.all(np.isfinite(pts)):
            raise DomainError("non-finite path samples")
        self.a0 = a0
        self.m = m
        self.pts = pts

    @property
    def level(self) -> int:
        return self.a0.level

    @property
    def closed(self) -> bool:
        return bool(np.array_equal(self.pts[0], self.pts[-1]))

    def embedded(self) -> np.ndarray:
        """(n, 2^r) coefficient array of the vertices inside the algebra."""
        base = np.tile(self.a0.coeffs, (len(self.pts), 1))
        base[:, 0] += self.pts[:, 0]
        return base + np.outer(self.pts[:, 1], self.m.coeffs)

    def point(self, k: int) -> CdNumber:
        return CdNumber(self.embedded()[k])

    def refined(self) -> "PlanarPath":
        """Split every segment at its parameter midpoint."""
        mids = (self.pts[:-1] + self.pts[1:]) / 2.0
        out = np.empty((2 * len(self.pts) - 1, 2))
        out[0::2] = self.pts
        out[1::2] = mids
        return type(self)(self.a0, self.m, out)

    def length(self) -> float:
        return float(np.sum(np.hypot(*np.diff(self.pts, axis=0).T)))

    def to_json(self):
        return {
            "a0": self.a0.to_json(),
            "M": self.m.to_json(),
            "pts": [[float(x), float(y)] for x, y in self.pts],
        }

    @classmethod
    def from_json(cls, payload):
        return cls(CdNumber(payload["a0"]), CdNumber(payload["M"]), payload["pts"])

    @classmethod
    def segment(cls, a0, m, start, end, n: int = 16):
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        pts = np.asarray(start, float) * (1 - t) + np.asarray(end, float) * t
        return cls(a0, m, pts)


class PlanarLoop(PlanarPath):
    """Closed polyline with at least 16 segments."""

    min_segments = 16

    def __init__(self, a0, m, pts):
        super().__init__(a0, m, pts)
        if not self.closed:
            raise DomainError("loop samples must close (first point = last point)")

    @classmethod
    def circle(cls, a0, m, center=(0.0, 0.0), radius: float = 1.0, n: int = 64):
        th = np.linspace(0.0, 2.0 * math.pi, n + 1)
        pts = np.column_stack([
            center[0] + radius * np.cos(th),
            center[1] + radius * np.sin(th),
        ])
        pts[-1] = pts[0]
        return cls(a0, m, pts)

    @classmethod
    def rectangle(cls, a0, m, x0, x1, y0, y1, per_edge: int = 8):
        corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
        pts = []
        for (ax, ay), (bx, by) in zip(corners[:-1], corners[1:]):
            t = np.linspace(0.0, 1.0, per_edge + 1)[:-1]
            pts.extend(zip(ax + (bx - ax) * t, ay + (by - ay) * t))
        pts.append((x0, y0))
        return cls(a0, m, np.asarray(pts))


# ---------------------------------------------------------------------------
# line integral
# ---------------------------------------------------------------------------

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GAUSS_NODES = (_GAUSS_NODES + 1.0) / 2.0
_GAUSS_WEIGHTS = _GAUSS_WEIGHTS / 2.0


def _partition_sum(kernel: Phrase, path: PlanarPath) -> np.ndarray:
    verts = path.embedded()
    deltas = np.diff(verts, axis=0)  # (nseg, dim)
    # evaluation points: nseg x nodes, each segment traversed by Gauss nodes
    pts = verts[:-1, None, :] + _GAUSS_NODES[None, :, None] * deltas[:, None, :]
    hs = np.broadcast_to(deltas[:, None, :], pts.shape)
    vals = kernel.eval(pts, h=hs)  # (nseg, nodes, dim)
    return np.einsum("j,ijk->k", _GAUSS_WEIGHTS, vals)


def line_integral(nu: Phrase, gamma: PlanarPath, refine: float = 1e-10,
                  side: str = "left", max_levels: int = 20) -> CdNumber:
    """Integral of the phrase nu along the polyline.

    The integrand is the operator kernel hat(nu) applied to the segment
    displacements; each segment contributes a Gauss-rule tagged sum, and
    the partition is refined dyadically until two successive estimates
    agree within `refine`.  Closed paths of z-only phrases integrate to
    zero; open paths reproduce the endpoint difference of the
    antiderivative (branch chosen by `side`).
    """
    kernel = hat_operator(nu, side=side)
    path = gamma
    prev = cur = _partition_sum(kernel, path)
    for _ in range(max_levels):
        path = path.refined()
        cur = _partition_sum(kernel, path)
        if np.linalg.norm(cur - prev) <= refine:
            return CdNumber(cur)
        prev = cur
    raise QuadratureError(
        "partition refinement did not converge",
        estimates=(CdNumber(prev), CdNumber(cur)),
    )


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindingResult:
    turns: int
    m: CdNumber
    raw_phase: float


def _plane_coords(loop: PlanarPath, a: CdNumber, tol: float = 1e-9):
    """Coordinates of a in the loop's plane; DomainError when off-plane."""
    d = a - loop.a0
    x = d.re
    y = float(np.dot(d.coeffs, loop.m.coeffs))
    resid = (d - CdNumber.real(x, a.level) - loop.m * y).norm()
    if resid > tol * (1.0 + d.norm()):
        raise DomainError("reference point lies outside the loop's plane")
    return x, y


def winding(gamma: PlanarLoop, a: CdNumber, on_curve_tol: float = 1e-12) -> WindingResult:
    """Exact turn count of the polyline about an in-plane point a.

    Phase increments are the signed angles between consecutive difference
    vectors, each strictly inside (-pi, pi) for a point off the polyline,
    so no lifting ambiguity arises.
    """
    ax, ay = _plane_coords(gamma, a)
    vx = gamma.pts[:, 0] - ax
    vy = gamma.pts[:, 1] - ay
    r2 = vx * vx + vy * vy
    # distance from a to each segment, not only to vertices
    ex, ey = np.diff(gamma.pts[:, 0]), np.diff(gamma.pts[:, 1])
    seglen2 = ex * ex + ey * ey
    t = np.clip(np.divide(vx[:-1] * ex + vy[:-1] * ey, seglen2,
                          out=np.zeros_like(ex), where=seglen2 > 0), 0.0, 1.0)
    dist2 = (vx[:-1] - t * ex) ** 2 + (vy[:-1] - t * ey) ** 2
    if np.min(dist2) <= on_curve_tol ** 2 or np.min(r2) <= on_curve_tol ** 2:
        raise DegenerateLoopError("reference point touches the curve")
    cross = vx[:-1] * vy[1:] - vy[:-1] * vx[1:]
    dot = vx[:-1] * vx[1:] + vy[:-1] * vy[1:]
    phase = float(np.sum(np.arctan2(cross, dot)))
    turns = round(phase / (2.0 * math.pi))
    return WindingResult(turns, gamma.m, phase)


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------

def _adaptive_image(f, loop: PlanarLoop, boundary_tol: float, max_rounds: int = 14):
    """Sample f along the loop, refining parameters until consecutive image
    samples subtend at most PHASE_STEP_LIMIT."""
    pts = [np.asarray(p, float) for p in loop.pts]

    def value(xy):
        z = loop.a0 + CdNumber.real(float(xy[0]), loop.level) + loop.m * float(xy[1])
        w = f(z)
        if not isinstance(w, CdNumber) or not np.all(np.isfinite(w.coeffs)):
            raise EvaluationError("map not evaluable on the contour", point=z)
        if w.norm() <= boundary_tol:
            raise BoundaryZeroError("|f| fell below tolerance on the contour")
        return w

    vals = [value(p) for p in pts]
    for _ in range(max_rounds):
        new_pts, new_vals = [pts[0]], [vals[0]]
        split = False
        for k in range(len(pts) - 1):
            va, vb = vals[k], vals[k + 1]
            cosang = np.dot(va.coeffs, vb.coeffs) / (va.norm() * vb.norm())
            if cosang < math.cos(PHASE_STEP_LIMIT):
                mid = (pts[k] + pts[k + 1]) / 2.0
                new_pts.append(mid)
                new_vals.append(value(mid))
                split = True
            new_pts.append(pts[k + 1])
            new_vals.append(vals[k + 1])
        pts, vals = new_pts, new_vals
        if not split:
            return vals
    # persistent aliasing means the image spins without bound between
    # samples, i.e. the contour passes next to (or through) a zero
    raise BoundaryZeroError(
        "image phase keeps aliasing after refinement; "
        "a zero lies on or next to the contour")


def _image_direction(f, loop: PlanarLoop, boundary_tol: float) -> CdNumber:
    """Push the oriented frame (1, M) of the loop's plane through f.

    Returns the unit imaginary part of E1^{-1} E2, the directing element
    of the image orientation; used to sign the accumulated phase.
    """
    lvl = loop.level
    scale = max(loop.length() / max(len(loop.pts) - 1, 1), 1e-6)
    step = 1e-4 * scale
    for k in range(0, len(loop.pts) - 1, max(1, (len(loop.pts) - 1) // 8)):
        z0 = CdNumber(loop.embedded()[k])
        try:
            e1 = (f(z0 + CdNumber.real(step, lvl)) - f(z0 - CdNumber.real(step, lvl))) * (0.5 / step)
            e2 = (f(z0 + loop.m * step) - f(z0 - loop.m * step)) * (0.5 / step)
        except Exception:
            continue
        if e1.norm() < 1e-12 or e2.norm() < 1e-12:
            continue
        u = mul(inv(e1), e2).imag()
        if u.norm() > 1e-8:
            return u * (1.0 / u.norm())
    raise EvaluationError("could not orient the image curve (degenerate frame)")


def count_zeros(f, gamma: PlanarLoop, boundary_tol: float = 1e-9) -> int:
    """Zeros of f enclosed by the loop, counted with orders.

    Realizes the argument principle: the winding of the image curve about
    zero equals the sum of enclosed zero orders times the loop's own
    winding.  The image phase is accumulated through principal logarithms
    of consecutive sample quotients and projected on the pushed-forward
    orientation direction.
    """
    vals = _adaptive_image(f, gamma, boundary_tol)
    acc = np.zeros(1 << gamma.level)
    for va, vb in zip(vals[:-1], vals[1:]):
        acc += ln_principal(mul(inv(va), vb)).coeffs
    total = CdNumber(acc)
    u = _image_direction(f, gamma, boundary_tol)
    signed = float(np.dot(total.coeffs, u.coeffs)) / (2.0 * math.pi)
    n = round(signed)
    if abs(signed - n) > 0.25:
        raise EvaluationError(
            f"accumulated phase {signed:.3f} turns is not close to an integer")
    return n


@dataclass(frozen=True)
class RoucheResult:
    holds: bool
    n_g: int
    n_h: int


def rouche_equal(f, g, gamma: PlanarLoop, boundary_tol: float = 1e-9) -> RoucheResult:
    """Zero-count comparison of g and f + g under |f| < |g| on the contour.

    The strict boundary inequality is verified on the loop samples; a
    violation raises PreconditionError carrying a witness point.
    """
    for row in gamma.embedded()[:-1]:
        zl = CdNumber(row)
        fv, gv = f(zl), g(zl)
        if not (fv.norm() < gv.norm()):
            raise PreconditionError(
                f"|f| >= |g| on the contour ({fv.norm():.3e} >= {gv.norm():.3e})",
                witness=zl,
            )
    n_g = count_zeros(g, gamma, boundary_tol)
    n_h = count_zeros(lambda z: f(z) + g(z), gamma, boundary_tol)
    return RoucheResult(n_g == n_h, n_g, n_h)


# ---------------------------------------------------------------------------
# maximum principle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxPrincipleResult:
    holds: bool
    sup_interior: float
    sup_boundary: float
    witness: CdNumber | None = None


def disc_samples(loop_center, radius, n, rng, a0=None, m=None, level=2):
    """n in-plane sample points of the open disc, as CdNumbers."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    th = rng.uniform(0.0, 2.0 * math.pi, size=n)
    xs = loop_center[0] + r * np.cos(th)
    ys = loop_center[1] + r * np.sin(th)
    a0 = a0 if a0 is not None else CdNumber.zero(level)
    m = m if m is not None else CdNumber.basis(1, level)
    return [a0 + CdNumber.real(float(x), a0.level) + m * float(y) for x, y in zip(xs, ys)]


def max_principle_check(f, gamma: PlanarLoop, interior_samples,
                        tol: float = 1e-9) -> MaxPrincipleResult:
    """Check sup |f| over interior samples against sup |f| over the loop.

    Evaluation failures and poles on the samples surface as
    PreconditionError with the witness point.
    """
    def modulus(z):
        try:
            w = f(z)
        except Exception as exc:
            raise PreconditionError(f"map not evaluable: {exc}", witness=z) from exc
        if not isinstance(w, CdNumber) or not np.all(np.isfinite(w.coeffs)):
            raise PreconditionError("non-finite value (pole?) at a sample", witness=z)
        return w.norm()

    sup_boundary = max(modulus(CdNumber(row)) for row in gamma.embedded()[:-1])
    sup_interior = 0.0
    worst = None
    for z in interior_samples:
        v = modulus(z)
        if v > sup_interior:
            sup_interior, worst = v, z
    holds = sup_interior <= sup_boundary + tol
    return MaxPrincipleResult(holds, sup_interior, sup_boundary,
                              None if holds else worst)


# ---------------------------------------------------------------------------
# zero localization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneRect:
    """Axis-aligned rectangle in the plane a0 + R + R*M."""

    a0: CdNumber
    m: CdNumber
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        _check_directing(self.m)
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DomainError("rectangle bounds must be increasing")

    def boundary(self, per_edge: int = 12) -> PlanarLoop:
        return PlanarLoop.rectangle(self.a0, self.m, self.x0, self.x1,
                                    self.y0, self.y1, per_edge)

    def center_point(self) -> CdNumber:
        cx, cy = (self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0
        return self.a0 + CdNumber.real(cx, self.a0.level) + self.m * cy

    def size(self) -> float:
        return max(self.x1 - self.x0, self.y1 - self.y0)


def _cell_count(f, rect: PlaneRect, boundary_tol: float) -> int:
    return count_zeros(f, rect.boundary(), boundary_tol)


def locate_zeros(f, rect: PlaneRect, min_cell: float,
                 boundary_tol: float = 1e-9) -> list:
    """Quadtree localization of zeros inside the rectangle.

    Returns (center, order) pairs for cells of size at most min_cell.
    A zero sitting on a subdivision line triggers one jitter of the cut by
    min_cell / 7; a second failure propagates BoundaryZeroError.  The total
    order is conserved across every split.
    """
    total = _cell_count(f, rect, boundary_tol)
    if total == 0:
        return []
    if rect.size() <= min_cell:
        return [(rect.center_point(), total)]

    def children(mx, my):
        return [
            PlaneRect(rect.a0, rect.m, rect.x0, mx, rect.y0, my),
            PlaneRect(rect.a0, rect.m, mx, rect.x1, rect.y0, my),
            PlaneRect(rect.a0, rect.m, rect.x0, mx, my, rect.y1),
            PlaneRect(rect.a0, rect.m, mx, rect.x1, my, rect.y1),
        ]

    mx, my = (rect.x0 + rect.x1) / 2.0, (rect.y0 + rect.y1) / 2.0
    try:
        cells = children(mx, my)
        counts = [_cell_count(f, c, boundary_tol) for c in cells]
    except BoundaryZeroError:
        jitter = min_cell / 7.0
        cells = children(mx + jitter, my + jitter)
        counts = [_cell_count(f, c, boundary_tol) for c in cells]
    if sum(counts) != total:
        raise BoundaryZeroError(
            f"subdivision lost zeros ({total} -> {sum(counts)}); "
            "a zero may sit on a cell boundary")
    out = []
    for cell, cnt in zip(cells, counts):
        if cnt:
            out.extend(locate_zeros(f, cell, min_cell, boundary_tol))
    return out
