import math

import mpmath
import pytest

from robin_eigen import explorer
from robin_eigen.errors import BracketFailure, DomainError
from robin_eigen.explorer import (
    a0,
    alpha_limit,
    find_crossing,
    find_y0,
    intersection_F,
    intersection_curve,
    linear_grid,
    nr_annulus_near_disk,
    sweep,
)
from robin_eigen.geometry import PlanarSummary, radii_from_summary
from robin_eigen.secular import SecularProblem, solve_lambda1
from robin_eigen.specfun import bessel_i

# 50-digit mpmath solve of the unscaled a0
Y0 = 2.2621424958293055457
ALPHA_LIMIT_R3_1 = -1.6659601177436802109
DISK_K = 1.6082794717268792669
SQ2 = math.sqrt(2.0)


def _pair(alpha=0.0):
    return SecularProblem.ball(2, 1.0, alpha), SecularProblem.shell(2, 1.0, SQ2, alpha)


# -- sweeps -------------------------------------------------------------------

def test_sweep_at_zero():
    t = sweep(*_pair(), [0.0])
    assert len(t) == 1
    r = t.rows[0]
    assert (r.alpha, r.lambda_ball, r.lambda_partner, r.difference) == (0.0, 0.0, 0.0, 0.0)


def test_sweep_disk_matches_golden():
    t = sweep(*_pair(), [-1.0])
    assert t.rows[0].lambda_ball == pytest.approx(-DISK_K ** 2, rel=1e-12)


def test_sweep_ordering_is_deterministic():
    grid = [-0.3, 0.0, -2.0, -0.3, -1.1]
    a = sweep(*_pair(), grid)
    b = sweep(*_pair(), list(reversed(grid)))
    assert a.alphas() == [0.0, -0.3, -1.1, -2.0]
    assert a.rows == b.rows


def test_sweep_rejects_positive_alpha():
    with pytest.raises(DomainError):
        sweep(*_pair(), [0.5, -1.0])


def test_sweep_records_row_failures(monkeypatch):
    real = explorer.solve_lambda1

    def flaky(p):
        if p.alpha == -2.0:
            raise BracketFailure("synthetic")
        return real(p)

    monkeypatch.setattr(explorer, "solve_lambda1", flaky)
    t = sweep(*_pair(), [-1.0, -2.0, -3.0])
    assert [r.error is None for r in t.rows] == [True, False, True]
    bad = t.rows[1]
    assert bad.lambda_ball is None and bad.difference is None and "synthetic" in bad.error


def test_linear_grid():
    g = linear_grid(0.0, -1.0, 3)
    assert g == [0.0, -0.5, -1.0]
    assert linear_grid(-0.1, -50.0, 500)[-1] == -50.0
    with pytest.raises(DomainError):
        linear_grid(0.0, -1.0, 1)


# -- ball against the volume-matched shell ------------------------------------

def test_planar_crossing():
    rep = find_crossing(2, 1.0, 1.0, (-50.0, -0.1))
    assert rep.certified and rep.sign_changes == 1
    lo, hi = rep.bracket
    assert hi - lo <= 1e-8 and lo <= rep.alpha_cross <= hi
    assert rep.r2 == pytest.approx(SQ2)
    ball, shell = _pair()
    diff = lambda a: solve_lambda1(shell.with_alpha(a)).lambda1 - solve_lambda1(ball.with_alpha(a)).lambda1
    assert diff(lo) * diff(hi) <= 0
    assert diff(-50.0) > 0
    assert diff(-0.1) < 0


def test_spatial_crossing():
    rep = find_crossing(3, 1.0, 1.0, (-100.0, -0.1), resolution=0.5)
    assert rep.certified
    assert rep.r2 == pytest.approx(2 ** (1 / 3))


def test_no_crossing_near_zero():
    rep = find_crossing(2, 1.0, 1.0, (-0.01, -0.001), resolution=0.001)
    assert not rep.certified and math.isnan(rep.alpha_cross)
    assert all(d < 0 for d in rep.samples.differences())


def test_crossing_range_must_be_negative():
    with pytest.raises(DomainError):
        find_crossing(2, 1.0, 1.0, (-1.0, 0.0))


# -- annulus against the disk of equal area -----------------------------------

def test_a0_matches_unscaled_formula():
    for y in (0.01, 0.5, 2.0, 5.0, 12.0):
        i0, i1 = bessel_i(0, y), bessel_i(1, y)
        ref = (-y * i0 ** 2 + i0 * i1 + y * (1 + i1 ** 2)) / (math.sqrt(2) * y)
        assert a0(y) == pytest.approx(ref, rel=1e-9, abs=1e-12)
    assert a0(0.01) > 0


def test_a0_single_sign_change_on_0_20():
    ys = [20 * (j + 1) / 4000 for j in range(4000)]
    vals = [a0(y) for y in ys]
    changes = [j for j in range(len(vals) - 1) if (vals[j] > 0) != (vals[j + 1] > 0)]
    assert len(changes) == 1


def test_a0_domain():
    with pytest.raises(DomainError):
        a0(0.0)


def test_y0_golden_and_bracketing():
    y0 = find_y0()
    assert y0 == pytest.approx(Y0, abs=1e-12)
    assert abs(a0(y0)) <= 1e-12
    assert abs(a0(Y0)) <= 1e-10
    assert a0(y0 - 0.1) * a0(y0 + 0.1) < 0


def test_y0_two_methods():
    yb, ys = find_y0(method="bisection"), find_y0(method="secant")
    assert abs(yb - ys) <= 1e-10
    assert abs(alpha_limit(yb, 1.0) - alpha_limit(ys, 1.0)) <= 1e-10
    assert alpha_limit(yb, 1.0) == pytest.approx(ALPHA_LIMIT_R3_1, abs=1e-12)
    assert alpha_limit(yb, 2.0) == 0.5 * alpha_limit(yb, 1.0)
    with pytest.raises(DomainError):
        find_y0(method="newton")


def test_y0_uniqueness_is_enforced():
    with pytest.raises(BracketFailure):
        find_y0(y_max=2.0)


def test_near_disk_annulus_has_disk_area():
    for r3 in (0.5, 1.0, 3.0):
        for eps in (1e-1, 1e-4):
            r1, r2 = nr_annulus_near_disk(r3, eps)
            assert r2 ** 2 - r1 ** 2 == pytest.approx(r3 ** 2, rel=1e-12)
    with pytest.raises(DomainError):
        nr_annulus_near_disk(1.0, 0.0)


EPS = (1e-1, 1e-2, 1e-3, 1e-4)


@pytest.fixture(scope="module")
def curve():
    return intersection_curve(1.0, EPS)


def test_intersection_trend(curve):
    assert all(p.found for p in curve)
    dist = [abs(p.k - Y0) for p in curve]
    assert all(b < a for a, b in zip(dist, dist[1:]))


def test_intersection_residuals(curve):
    for p in curve:
        assert abs(p.residual) <= 1e-10 * p.scale
        assert abs(intersection_F(p.epsilon, p.k, 1.0)) <= 1e-10 * p.scale


def test_intersection_alpha_map(curve):
    for p in curve:
        assert p.alpha < 0
        assert p.alpha == pytest.approx(-p.k * bessel_i(1, p.k) / bessel_i(0, p.k), rel=1e-13)


def test_intersection_is_genuine(curve):
    for p in curve:
        r1, r2 = nr_annulus_near_disk(1.0, p.epsilon)
        mu = solve_lambda1(SecularProblem.annulus_nr(r1, r2, p.alpha)).lambda1
        lam = solve_lambda1(SecularProblem.ball(2, 1.0, p.alpha)).lambda1
        assert mu == pytest.approx(lam, rel=1e-8)
        assert mu == pytest.approx(-p.k ** 2, rel=1e-8)


def test_intersection_domain():
    with pytest.raises(DomainError):
        intersection_curve(0.0, [1e-2])
    with pytest.raises(DomainError):
        intersection_F(1e-2, 0.0, 1.0)


def test_intersection_reports_missing_roots():
    pts = intersection_curve(1.0, [1e-2], k_max=1.0, points=50)
    assert not pts[0].found and math.isnan(pts[0].k)


# -- inequalities between the annulus problems and the disk -------------------

DYADIC = [-(2.0 ** j) for j in range(-6, 7)]


def lambda_tolerance(k):
    """Certified accuracy of -k^2 given |dk| <= 1e-12 max(1, k)."""
    return 2.0 * k * 1e-12 * max(1.0, k)


def test_annulus_self_comparison():
    r1, r2 = radii_from_summary(PlanarSummary(4 * math.pi, 3 * math.pi))
    assert (r1, r2) == (pytest.approx(1.0), pytest.approx(2.0))
    for a in DYADIC:
        rr = solve_lambda1(SecularProblem.shell(2, r1, r2, a))
        nr = solve_lambda1(SecularProblem.annulus_nr(r1, r2, a))
        # the two differ only through e^{-2k(r2-r1)}: a tie at double precision is allowed
        assert rr.lambda1 <= nr.lambda1 + lambda_tolerance(rr.k) + lambda_tolerance(nr.k)
        if a >= -16:
            assert rr.lambda1 < nr.lambda1


def _mp_annulus_det(k, a, a_inner, r1, r2):
    i0, i1 = mpmath.besseli(0, k * r1), mpmath.besseli(1, k * r1)
    k0, k1 = mpmath.besselk(0, k * r1), mpmath.besselk(1, k * r1)
    j0, j1 = mpmath.besseli(0, k * r2), mpmath.besseli(1, k * r2)
    l0, l1 = mpmath.besselk(0, k * r2), mpmath.besselk(1, k * r2)
    m11, m12 = -k * k1 - a_inner * k0, k * i1 - a_inner * i0
    m21, m22 = -k * l1 + a * l0, k * j1 + a * j0
    return m11 * m22 - m12 * m21


@pytest.mark.parametrize("a", [-32.0, -64.0])
def test_annulus_self_comparison_beyond_double_precision(a):
    # gap ~ e^{-2k}: resolve it with enough digits to see the sign
    with mpmath.workdps(int(2 * abs(a) / 2.3) + 30):
        roots = []
        for a_inner, p in ((a, SecularProblem.shell(2, 1.0, 2.0, a)), (0.0, SecularProblem.annulus_nr(1.0, 2.0, a))):
            k = mpmath.mpf(solve_lambda1(p).k)
            bracket = (k * (1 - mpmath.mpf("1e-9")), k * (1 + mpmath.mpf("1e-9")))
            roots.append(mpmath.findroot(lambda x: _mp_annulus_det(x, a, a_inner, 1, 2), bracket, solver="anderson"))
        k_rr, k_nr = roots
        assert k_rr > k_nr  # i.e. lambda(Robin-Robin) < mu(Neumann-Robin)


def test_disk_beats_annulus_only_near_zero():
    r3 = math.sqrt(3.0)
    for a in (-64.0, -32.0, -16.0):
        mu = solve_lambda1(SecularProblem.annulus_nr(1.0, 2.0, a)).lambda1
        assert mu > solve_lambda1(SecularProblem.ball(2, r3, a)).lambda1
    for a in (-1e-3, -1e-4, -2.0 ** -6):
        mu = solve_lambda1(SecularProblem.annulus_nr(1.0, 2.0, a)).lambda1
        assert mu <= solve_lambda1(SecularProblem.ball(2, r3, a)).lambda1
