import math

import numpy as np
import pytest

from cdconf.algebra import CdNumber, cd, conj, exp, inv, mul
from cdconf.calculus import factor_quaternion, is_pseudoconformal_at, jacobian
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
    polydisc_zero_preimage,
    schwarz_check,
)
from cdconf.errors import DomainError, PreconditionError
from cdconf.moebius import INF

ONE = CdNumber.one(2)


@pytest.fixture
def rng():
    return np.random.default_rng(31415)


def rand_in_ball(rng, level, scale=0.8):
    v = rng.normal(size=1 << level)
    v = v / np.linalg.norm(v) * rng.uniform(0.05, scale)
    return cd(v)


def rand_unit(rng, level):
    v = rng.normal(size=1 << level)
    return cd(v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# homogeneous norms
# ---------------------------------------------------------------------------

def test_norm_homogeneity(rng):
    for kind in ("euclidean", "max"):
        nrm = HomogeneousNorm(kind)
        z = (rand_in_ball(rng, 2), rand_in_ball(rng, 2))
        c = cd(rng.normal(size=4))
        cz = tuple(mul(c, zj) for zj in z)
        assert nrm(cz) == pytest.approx(c.norm() * nrm(z), rel=1e-12)
        w = (rand_in_ball(rng, 2), rand_in_ball(rng, 2))
        zw = tuple(a + b for a, b in zip(z, w))
        assert nrm(zw) <= nrm(z) + nrm(w) + 1e-12
    with pytest.raises(ValueError):
        HomogeneousNorm("spectral")


# ---------------------------------------------------------------------------
# ball automorphisms
# ---------------------------------------------------------------------------

def test_ball_sends_parameter_to_zero(rng):
    for level in (2, 3):
        a = rand_in_ball(rng, level, 0.7)
        s = BallAutomorphism((a,))
        assert ball_apply(s, a).norm() <= 1e-9


def test_ball_zero_parameter_is_identity(rng):
    s = BallAutomorphism((CdNumber.zero(2),))
    z = rand_in_ball(rng, 2)
    assert ball_apply(s, z) == z


def test_ball_involution_and_modulus(rng):
    for level in (2, 3):
        for _ in range(200):
            a = rand_in_ball(rng, level, 0.7)
            s = BallAutomorphism((a,))
            z = rand_in_ball(rng, level, 0.95)
            w = ball_apply(s, z)
            assert w.norm() < 1.0
            assert (ball_apply(s, w) - z).norm() <= 1e-9


def test_ball_rejects_outside(rng):
    s = BallAutomorphism((rand_in_ball(rng, 2, 0.5),))
    with pytest.raises(DomainError):
        ball_apply(s, cd([1.5, 0, 0, 0]))
    with pytest.raises(DomainError):
        BallAutomorphism((cd([1.2, 0, 0, 0]),))


def test_ball_two_coordinates(rng):
    a = (rand_in_ball(rng, 2, 0.4), rand_in_ball(rng, 2, 0.4))
    s = BallAutomorphism(a)
    out = ball_apply(s, a)
    assert max(w.norm() for w in out) <= 1e-9
    z = (rand_in_ball(rng, 2, 0.5), rand_in_ball(rng, 2, 0.5))
    w = ball_apply(s, z)
    assert sum(x.norm2() for x in w) < 1.0
    back = ball_apply(s, w)
    assert max((x - y).norm() for x, y in zip(back, z)) <= 1e-9


def test_ball_frame(rng):
    u, v = rand_unit(rng, 2), rand_unit(rng, 2)
    s = BallAutomorphism((CdNumber.zero(2),), frame=((u, v),))
    z = rand_in_ball(rng, 2)
    assert (ball_apply(s, z) - mul(mul(u, z), v)).norm() <= 1e-13


def test_ball_group_closure_n1(rng):
    # S_b o S_a equals S_{a'} followed by a unit frame, where a' is the
    # preimage of 0; the frame is recovered from the derivative at 0
    a, b = rand_in_ball(rng, 2, 0.5), rand_in_ball(rng, 2, 0.5)
    sa, sb = BallAutomorphism((a,)), BallAutomorphism((b,))
    g = lambda z: ball_apply(sb, ball_apply(sa, z))
    aprime = ball_apply(sa, b)  # g(aprime) = S_b(b) = 0
    assert g(aprime).norm() <= 1e-12
    sap = BallAutomorphism((aprime,))
    u_of = lambda z: g(ball_apply(sap, z))  # fixes 0, unitary frame
    fac = factor_quaternion(jacobian(u_of, CdNumber.zero(2), 1e-5), tol=1e-6)
    frame_map = lambda z: mul(mul(fac.a, z), fac.b) * fac.lam
    for _ in range(50):
        z = rand_in_ball(rng, 2, 0.8)
        want = g(z)
        got = frame_map(ball_apply(sap, z))
        assert (got - want).norm() <= 1e-8


def test_ball_automorphisms_pseudoconformal(rng):
    for level in (2, 3):
        a = rand_in_ball(rng, level, 0.6)
        s = BallAutomorphism((a,))
        for _ in range(5):
            z = rand_in_ball(rng, level, 0.6)
            v = is_pseudoconformal_at(lambda q: ball_apply(s, q), z, tol=1e-6)
            assert v.status == "Pseudoconformal"


# ---------------------------------------------------------------------------
# polydisc automorphisms
# ---------------------------------------------------------------------------

def test_polydisc_literal_zero_parameter(rng):
    # the printed disc involution at b = 0 is zeta -> -zeta; the identity
    # needs c1 = -1
    z = rand_in_ball(rng, 2)
    neg = PolydiscAutomorphism((CdNumber.zero(2),), ((ONE, ONE, ONE, ONE),))
    assert (polydisc_apply(neg, z) + z).norm() <= 1e-13
    ident = PolydiscAutomorphism((CdNumber.zero(2),), ((-ONE, ONE, ONE, ONE),))
    assert (polydisc_apply(ident, z) - z).norm() <= 1e-13


def test_polydisc_zero_preimage(rng):
    for level in (2, 3):
        one = CdNumber.one(level)
        b = rand_in_ball(rng, level, 0.8)
        if level == 2:
            mult = (rand_unit(rng, 2), rand_unit(rng, 2), one, one)
        else:
            mult = tuple(rand_unit(rng, 3) for _ in range(4))
        psi = PolydiscAutomorphism((b,), (mult,))
        z0 = polydisc_zero_preimage(psi)
        assert polydisc_apply(psi, z0).norm() <= 1e-12
        assert z0.norm() < 1.0


def test_polydisc_stays_inside(rng):
    for level in (2, 3):
        one = CdNumber.one(level)
        b = rand_in_ball(rng, level, 0.8)
        mult = (rand_unit(rng, level), rand_unit(rng, level), one, one) \
            if level == 2 else tuple(rand_unit(rng, 3) for _ in range(4))
        psi = PolydiscAutomorphism((b,), (mult,))
        for _ in range(300):
            z = rand_in_ball(rng, level, 0.99)
            assert polydisc_apply(psi, z).norm() < 1.0


def test_polydisc_permutation(rng):
    one = ONE
    b = (CdNumber.zero(2), CdNumber.zero(2))
    mult = ((-one, one, one, one), (-one, one, one, one))
    psi = PolydiscAutomorphism(b, mult, sigma=(1, 0))
    z = (rand_in_ball(rng, 2), rand_in_ball(rng, 2))
    out = polydisc_apply(psi, z)
    assert (out[0] - z[1]).norm() <= 1e-13
    assert (out[1] - z[0]).norm() <= 1e-13


def test_polydisc_norm_preserved_when_fixing_zero(rng):
    # automorphisms fixing 0 (b = 0, unit multipliers) keep the max norm
    one = ONE
    u1, u2 = rand_unit(rng, 2), rand_unit(rng, 2)
    psi = PolydiscAutomorphism(
        (CdNumber.zero(2), CdNumber.zero(2)),
        ((u1, u2, one, one), (u2, u1, one, one)),
        sigma=(1, 0),
    )
    nrm = HomogeneousNorm("max")
    for _ in range(200):
        z = (rand_in_ball(rng, 2, 0.9), rand_in_ball(rng, 2, 0.9))
        out = polydisc_apply(psi, z)
        assert nrm(out) == pytest.approx(nrm(z), abs=1e-9)


def test_polydisc_validation(rng):
    with pytest.raises(DomainError):
        PolydiscAutomorphism((cd([1.5, 0, 0, 0]),), ((ONE, ONE, ONE, ONE),))
    with pytest.raises(DomainError):
        PolydiscAutomorphism((CdNumber.zero(2),),
                             ((ONE * 2.0, ONE, ONE, ONE),))
    with pytest.raises(DomainError):
        # over H the outer multipliers are pinned to 1
        u = rand_unit(rng, 2)
        PolydiscAutomorphism((CdNumber.zero(2),), ((ONE, ONE, u, ONE),))


# ---------------------------------------------------------------------------
# Cayley transform
# ---------------------------------------------------------------------------

def test_cayley_examples():
    for level in (2, 3):
        m = CdNumber.basis(1, level)
        assert cayley_to_ball(m, m).norm() <= 1e-15
        # pole and its partner
        assert cayley_to_ball(-m, m) is INF
        assert ball_to_halfspace(CdNumber.one(level), m) is INF


def test_cayley_boundary_to_boundary(rng):
    for level in (2, 3):
        m = cd(np.r_[0.0, rng.normal(size=(1 << level) - 1)])
        m = cd(m.coeffs / m.norm())
        z = cd(rng.normal(size=1 << level))
        z = z - m * halfspace_coordinate(z, m)  # project to the boundary
        assert abs(halfspace_coordinate(z, m)) <= 1e-12
        w = cayley_to_ball(z, m)
        assert abs(w.norm() - 1.0) <= 1e-10


def test_cayley_roundtrip_and_positivity(rng):
    for level in (2, 3):
        for _ in range(200):
            m = cd(np.r_[0.0, rng.normal(size=(1 << level) - 1)])
            m = cd(m.coeffs / m.norm())
            z = cd(rng.normal(size=1 << level))
            t = halfspace_coordinate(z, m)
            if t <= 0:
                z = z - m * (2.0 * t)
            if halfspace_coordinate(z, m) < 1e-3:
                continue
            w = cayley_to_ball(z, m)
            assert w.norm() < 1.0
            back = ball_to_halfspace(w, m)
            assert (back - z).norm() <= 1e-10 * (1.0 + z.norm())
            # 1 - W conj(W) = -4 (z+M)^{-1} Re(zM) (conj(z)-M)^{-1}
            lhs = 1.0 - w.norm2()
            rhs = mul(mul(inv(z + m) * (-4.0),
                          CdNumber.real(mul(z, m).re, level)),
                      inv(conj(z) - m))
            assert abs(lhs - rhs.re) + rhs.imag().norm() <= 1e-10


def test_cayley_requires_unit_imaginary():
    with pytest.raises(DomainError):
        cayley_to_ball(ONE, ONE)


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------

def test_schwarz_identity_and_violation(rng):
    eu = HomogeneousNorm("euclidean")
    samples = [rand_in_ball(rng, 2, 0.9) for _ in range(100)]
    res = schwarz_check(lambda z: z, eu, eu, samples)
    assert res.holds and res.worst_ratio == pytest.approx(1.0)
    res = schwarz_check(lambda z: z * 1.1, eu, eu, samples)
    assert not res.holds and res.witness is not None


def test_schwarz_requires_origin_fixed(rng):
    eu = HomogeneousNorm("euclidean")
    c = cd([0.3, 0, 0, 0])
    with pytest.raises(PreconditionError):
        schwarz_check(lambda z: z + c, eu, eu, [rand_in_ball(rng, 2)])


def test_schwarz_frame_automorphism(rng):
    eu, mx = HomogeneousNorm("euclidean"), HomogeneousNorm("max")
    u, v = rand_unit(rng, 2), rand_unit(rng, 2)
    f = lambda z: mul(mul(u, z), v)
    samples = [rand_in_ball(rng, 2, 0.95) for _ in range(100)]
    for nrm in (eu, mx):
        res = schwarz_check(f, nrm, nrm, samples)
        assert res.holds
        assert res.worst_ratio <= 1.0 + 1e-12


def test_cartan_identity(rng):
    samples = [rand_in_ball(rng, 2, 0.8) for _ in range(50)]
    res = cartan_check(lambda z: z, CdNumber.zero(2), samples)
    assert res.is_identity and res.max_deviation == 0.0


def test_cartan_involution_square(rng):
    for level in (2, 3):
        a = rand_in_ball(rng, level, 0.5)
        s = BallAutomorphism((a,))
        f = lambda z: ball_apply(s, ball_apply(s, z))
        samples = [rand_in_ball(rng, level, 0.8) for _ in range(100)]
        res = cartan_check(f, CdNumber.zero(level), samples, tol=1e-8)
        assert res.is_identity
        assert res.max_deviation <= 1e-8


def test_cartan_rotation_fails_precondition(rng):
    q = exp(CdNumber.basis(1, 2) * 0.2)
    f = lambda z: mul(mul(q, z), inv(q))
    samples = [rand_in_ball(rng, 2, 0.5) for _ in range(10)]
    with pytest.raises(PreconditionError) as err:
        cartan_check(f, CdNumber.zero(2), samples)
    assert "identity" in str(err.value)


def test_cartan_moving_base_fails(rng):
    c = cd([0.2, 0, 0, 0])
    with pytest.raises(PreconditionError) as err:
        cartan_check(lambda z: z + c, CdNumber.zero(2), [])
    assert "base" in str(err.value)
