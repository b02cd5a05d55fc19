import math

import numpy as np
import pytest

from cdconf import phrase as ph
from cdconf.algebra import CdNumber, cd, inv, mul
from cdconf.contour import (
    PlanarLoop,
    PlanarPath,
    PlaneRect,
    count_zeros,
    disc_samples,
    line_integral,
    locate_zeros,
    max_principle_check,
    rouche_equal,
    winding,
)
from cdconf.errors import (
    BoundaryZeroError,
    DegenerateLoopError,
    DomainError,
    PreconditionError,
    QuadratureError,
)
from cdconf.moebius import Inv, MoebiusWord, MulQ, Shift, apply_word


I1 = CdNumber.basis(1, 2)
I2 = CdNumber.basis(2, 2)
ZERO = CdNumber.zero(2)


@pytest.fixture
def rng():
    return np.random.default_rng(99)


@pytest.fixture
def unit_loop():
    return PlanarLoop.circle(ZERO, I1, radius=1.0, n=64)


# ---------------------------------------------------------------------------
# loops
# ---------------------------------------------------------------------------

def test_loop_validation():
    with pytest.raises(DomainError):
        PlanarLoop(ZERO, I1, [[0, 0], [1, 0], [0, 1]])  # too few, not closed
    with pytest.raises(DomainError):
        PlanarLoop.circle(ZERO, CdNumber.one(2))  # directing not imaginary
    loop = PlanarLoop.circle(ZERO, I1, n=16)
    assert loop.closed and len(loop.pts) == 17


def test_loop_json_roundtrip(unit_loop):
    again = PlanarLoop.from_json(unit_loop.to_json())
    assert np.allclose(again.pts, unit_loop.pts)
    assert again.a0 == unit_loop.a0 and again.m == unit_loop.m


def test_refined_keeps_geometry(unit_loop):
    fine = unit_loop.refined()
    assert len(fine.pts) == 2 * len(unit_loop.pts) - 1
    assert np.allclose(fine.pts[0::2], unit_loop.pts)


# ---------------------------------------------------------------------------
# line integral
# ---------------------------------------------------------------------------

def test_integral_of_constant_is_endpoint_difference():
    seg = PlanarPath.segment(ZERO, I1, (0.2, -0.3), (1.0, 0.8), n=16)
    val = line_integral(ph.parse("e"), seg)
    want = seg.point(len(seg.pts) - 1) - seg.point(0)
    assert (val - want).norm() <= 1e-12


def test_integral_of_z_closed_loop(unit_loop):
    assert line_integral(ph.parse("z"), unit_loop).norm() <= 1e-8


def test_integral_endpoint_formula(rng):
    a, b = cd(rng.normal(size=4)), cd(rng.normal(size=4))
    nu = ph.const(a) * ph.z() * ph.const(b)
    mu = nu.antiderive()
    seg = PlanarPath.segment(ZERO, I1, (-0.5, 0.2), (0.7, 0.9), n=16)
    val = line_integral(nu, seg)
    z0, z1 = seg.point(0), seg.point(len(seg.pts) - 1)
    want = ph.eval_phrase(mu, z1) - ph.eval_phrase(mu, z0)
    assert (val - want).norm() <= 1e-8


def test_integral_closed_random_phrases(rng):
    for _ in range(5):
        a, b = cd(rng.normal(size=4)), cd(rng.normal(size=4))
        nu = ph.const(a) * ph.z(2) * ph.const(b) * ph.z(3)
        loop = PlanarLoop.circle(ZERO, I1, center=(0.2, -0.1), radius=0.8, n=32)
        assert line_integral(nu, loop).norm() <= 1e-8


def test_integral_respects_branch(rng):
    a, b, c = (cd(rng.normal(size=4)) for _ in range(3))
    nu = ph.const(a) * ph.z() * ph.const(b) * ph.z() * ph.const(c)
    seg = PlanarPath.segment(ZERO, I2, (0.0, 0.1), (0.5, 0.6), n=16)
    z0, z1 = seg.point(0), seg.point(len(seg.pts) - 1)
    for side in ("left", "right"):
        mu = nu.antiderive(side)
        val = line_integral(nu, seg, side=side)
        want = ph.eval_phrase(mu, z1) - ph.eval_phrase(mu, z0)
        assert (val - want).norm() <= 1e-8


def test_integral_nonconvergence_error():
    seg = PlanarPath.segment(ZERO, I1, (0.0, 0.0), (1.0, 0.0), n=2)
    with pytest.raises(QuadratureError) as err:
        line_integral(ph.parse("z^3"), seg, refine=0.0, max_levels=1)
    assert err.value.estimates is not None


# ---------------------------------------------------------------------------
# winding
# ---------------------------------------------------------------------------

def test_winding_center_and_outside(unit_loop):
    res = winding(unit_loop, ZERO)
    assert res.turns == 1
    assert abs(res.raw_phase - 2 * math.pi) <= 1e-9
    assert winding(unit_loop, CdNumber.real(3.0, 2)).turns == 0


def test_winding_reversed_loop(unit_loop):
    rev = PlanarLoop(ZERO, I1, unit_loop.pts[::-1])
    assert winding(rev, ZERO).turns == -1


def test_winding_figure_eight():
    th = np.linspace(0, 2 * math.pi, 129)
    pts = np.column_stack([np.cos(th), np.sin(th) * np.cos(th)])
    pts[-1] = pts[0]
    loop = PlanarLoop(ZERO, I1, pts)
    probe = I1 * 0.3  # inside one lobe... lobes wind oppositely around it
    assert winding(loop, probe).turns == 0


def test_winding_phase_lift_oracle():
    # dense sampling: accumulated phase equals the analytic total
    th = np.linspace(0, 2 * math.pi, 10_001)
    pts = np.column_stack([np.cos(3 * th), np.sin(3 * th)])
    pts[-1] = pts[0]
    loop = PlanarLoop(ZERO, I2, pts)
    res = winding(loop, ZERO)
    assert res.turns == 3
    assert abs(res.raw_phase - 6 * math.pi) <= 1e-6


def test_winding_point_on_curve(unit_loop):
    with pytest.raises(DegenerateLoopError):
        winding(unit_loop, CdNumber.real(1.0, 2))


def test_winding_off_plane(unit_loop):
    with pytest.raises(DomainError):
        winding(unit_loop, I2 * 0.5)


# ---------------------------------------------------------------------------
# count_zeros / argument principle
# ---------------------------------------------------------------------------

def test_count_simple_zero(rng, unit_loop):
    c_, d_ = cd(rng.normal(size=4)), cd(rng.normal(size=4))
    za = CdNumber.real(0.2, 2) + I1 * 0.3
    f = lambda z: mul(mul(c_, z - za), d_)
    assert count_zeros(f, unit_loop) == 1


def test_count_double_zero(unit_loop):
    za = CdNumber.real(-0.1, 2) + I1 * 0.2
    f = lambda z: mul(z - za, z - za)
    assert count_zeros(f, unit_loop) == 2


def test_count_no_zeros(rng, unit_loop):
    c_ = cd(rng.normal(size=4))
    f = lambda z: mul(c_, z - CdNumber.real(5.0, 2))
    assert count_zeros(f, unit_loop) == 0


def test_count_boundary_zero_raises(unit_loop):
    f = lambda z: z - CdNumber.real(1.0, 2)
    with pytest.raises(BoundaryZeroError):
        count_zeros(f, unit_loop)


def test_count_octonion_plane():
    m = CdNumber.basis(5, 3)
    loop = PlanarLoop.circle(CdNumber.zero(3), m, radius=1.0, n=64)
    za = CdNumber.real(0.3, 3) + m * (-0.2)
    f = lambda z: mul(z - za, z - za)
    assert count_zeros(f, loop) == 2


def test_moebius_word_winding_matches_prediction(rng):
    # in-plane words restricted to C_M act as complex Moebius maps whose
    # zero/pole positions are tracked by a complex oracle
    for _ in range(10):
        gens = []
        zc = complex(rng.normal(), rng.normal()) * 0.3

        def to_plane(w):
            return CdNumber.real(w.real, 2) + I1 * w.imag

        cur = zc
        # word: shift then invert then shift, all in the plane
        s1 = complex(rng.normal(), rng.normal())
        s2 = complex(rng.normal(), rng.normal())
        word = [Shift(to_plane(s1)), Inv(), Shift(to_plane(s2))]
        f = lambda z: apply_word(MoebiusWord(word, 2), z)
        # complex oracle for f(z) = 1/(z + s1) + s2: zeros of f
        # f(z) = (1 + s2 (z + s1)) / (z + s1): zero at z = -s1 - 1/s2
        zero_at = -s1 - 1 / s2
        pole_at = -s1
        loop = PlanarLoop.circle(ZERO, I1, radius=1.0, n=128)
        if abs(abs(zero_at) - 1) < 0.1 or abs(abs(pole_at) - 1) < 0.1:
            continue
        want = (1 if abs(zero_at) < 1 else 0) - (1 if abs(pole_at) < 1 else 0)
        got = count_zeros(f, loop)
        assert got == want


# ---------------------------------------------------------------------------
# Rouche
# ---------------------------------------------------------------------------

def test_rouche_examples(unit_loop):
    res = rouche_equal(lambda z: CdNumber.real(0.1, 2), lambda z: z, unit_loop)
    assert res.holds and res.n_g == 1 and res.n_h == 1
    loop2 = PlanarLoop.circle(ZERO, I2, radius=1.0, n=64)
    res = rouche_equal(lambda z: z * 0.1, lambda z: mul(z, z), loop2)
    assert res.holds and res.n_g == 2 and res.n_h == 2


def test_rouche_precondition(unit_loop):
    with pytest.raises(PreconditionError) as err:
        rouche_equal(lambda z: CdNumber.real(3.0, 2), lambda z: z, unit_loop)
    assert err.value.witness is not None


# ---------------------------------------------------------------------------
# maximum principle
# ---------------------------------------------------------------------------

def test_max_principle_constant(rng, unit_loop):
    f = lambda z: cd([2.0, 1.0, 0, 0])
    samples = disc_samples((0, 0), 0.9, 100, rng)
    res = max_principle_check(f, unit_loop, samples)
    assert res.holds
    assert res.sup_interior == pytest.approx(res.sup_boundary)


def test_max_principle_identity(rng, unit_loop):
    samples = disc_samples((0, 0), 0.95, 1000, rng)
    res = max_principle_check(lambda z: z, unit_loop, samples)
    assert res.holds


def test_max_principle_pole_reported(rng, unit_loop):
    pole = CdNumber.real(0.5, 2)

    def f(z):
        return inv(z - pole)

    samples = [pole] + disc_samples((0, 0), 0.9, 10, rng)
    with pytest.raises(PreconditionError):
        max_principle_check(f, unit_loop, samples)


def test_max_principle_violation_witness(rng, unit_loop):
    # a map peaking strictly inside must be flagged
    f = lambda z: CdNumber.real(1.0 / (0.01 + z.norm2()), 2)
    samples = disc_samples((0, 0), 0.9, 200, rng)
    res = max_principle_check(f, unit_loop, samples)
    assert not res.holds
    assert res.witness is not None


# ---------------------------------------------------------------------------
# zero localization
# ---------------------------------------------------------------------------

def test_locate_two_simple_zeros():
    f = lambda z: mul(z, z - CdNumber.real(1.0, 2))
    rect = PlaneRect(ZERO, I1, -0.5, 1.5, -0.8, 0.9)
    found = locate_zeros(f, rect, min_cell=0.02)
    assert sorted(order for _, order in found) == [1, 1]
    centers = sorted(pt.coeffs[0] for pt, _ in found)
    assert abs(centers[0] - 0.0) <= 0.02
    assert abs(centers[1] - 1.0) <= 0.02


def test_locate_double_zero():
    f = lambda z: mul(z, z)
    rect = PlaneRect(ZERO, I1, -0.6, 0.7, -0.55, 0.65)
    found = locate_zeros(f, rect, min_cell=0.02)
    assert len(found) == 1
    assert found[0][1] == 2


def test_locate_empty():
    f = lambda z: z - CdNumber.real(9.0, 2)
    rect = PlaneRect(ZERO, I1, -1, 1, -1, 1)
    assert locate_zeros(f, rect, min_cell=0.1) == []


def test_subdivision_conserves_order():
    # total order is conserved across every split by construction; verify
    # through the recursion on a two-zero configuration
    za = CdNumber.real(0.31, 2) + I1 * 0.17
    zb = CdNumber.real(-0.43, 2) + I1 * (-0.29)
    f = lambda z: mul(mul(z - za, z - za), z - zb)
    rect = PlaneRect(ZERO, I1, -1, 1.1, -1, 1.05)
    found = locate_zeros(f, rect, min_cell=0.05)
    assert sum(order for _, order in found) == 3


def test_homotopy_invariance(rng):
    # two loops around the same zero, deformable into one another inside
    # the annulus, count the same zeros
    za = CdNumber.real(0.1, 2) + I1 * 0.05
    f = lambda z: mul(z - za, z - za)
    small = PlanarLoop.circle(ZERO, I1, radius=0.6, n=48)
    th = np.linspace(0, 2 * math.pi, 65)
    wobble = 0.8 + 0.1 * np.sin(5 * th)
    pts = np.column_stack([wobble * np.cos(th), wobble * np.sin(th)])
    pts[-1] = pts[0]
    big = PlanarLoop(ZERO, I1, pts)
    assert count_zeros(f, small) == count_zeros(f, big) == 2
