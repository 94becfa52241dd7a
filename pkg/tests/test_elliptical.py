import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad
from scipy.special import ndtr

from betascale import (
    DomainError,
    EllipticalModel,
    Gamma,
    Kotz,
    NoDensityError,
    PointMass,
    Rayleigh,
    TabulatedCdf,
    conditional_density_point,
    conditional_sf_exceed,
    convergence_diagnostic,
    gaussian_approx_sf,
    mda_classify,
    sample_elliptical,
)

GAUSS = EllipticalModel(rho=0.0, radial=Rayleigh(1.0))


def phi(t):
    return math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# sampling

def test_unit_circle_sampling():
    pairs = sample_elliptical(EllipticalModel(0.0, PointMass(1.0)), 500, seed=3)
    r2 = pairs[:, 0] ** 2 + pairs[:, 1] ** 2
    assert np.max(np.abs(r2 - 1.0)) <= 1e-12


def test_squared_coordinate_moment():
    pairs = sample_elliptical(EllipticalModel(0.0, PointMass(1.0)), 100000, seed=4)
    assert abs(np.mean(pairs[:, 0] ** 2) - 0.5) <= 0.01


def test_correlation_sign():
    for rho in (0.5, -0.5):
        pairs = sample_elliptical(EllipticalModel(rho, Rayleigh(1.0)), 100000, seed=5)
        emp = np.corrcoef(pairs[:, 0], pairs[:, 1])[0, 1]
        assert math.copysign(1.0, emp) == math.copysign(1.0, rho)


def test_u_v_same_distribution():
    pairs = sample_elliptical(EllipticalModel(0.4, Rayleigh(1.0)), 100000, seed=6)
    ks = stats.ks_2samp(pairs[:, 0], pairs[:, 1]).statistic
    assert ks <= 0.02


def test_squared_angle_is_arcsine():
    pairs = sample_elliptical(EllipticalModel(0.0, Rayleigh(1.0)), 100000, seed=8)
    u, v = pairs[:, 0], pairs[:, 1]
    o1sq = u ** 2 / (u ** 2 + v ** 2)
    ks = stats.kstest(o1sq, lambda t: stats.beta(0.5, 0.5).cdf(t)).statistic
    assert ks <= 0.02


# ---------------------------------------------------------------------------
# point conditioning

def test_rayleigh_point_density_is_gaussian():
    for x in (1.0, 5.0, 10.0):
        for t in np.linspace(-3.0, 3.0, 13):
            val = conditional_density_point(GAUSS, x, float(t))
            assert abs(val - phi(t)) <= 1e-8


def test_point_density_symmetric():
    m = EllipticalModel(0.3, Gamma(2.0, 1.0))
    for t in (0.5, 1.0, 2.5):
        a = conditional_density_point(m, 2.0, t)
        b = conditional_density_point(m, 2.0, -t)
        assert abs(a - b) <= 1e-10


def test_kotz_point_density_near_gaussian_at_large_x():
    m = EllipticalModel(0.0, Kotz(1.0, 0.0, 1.0, 1.0))
    ts = np.linspace(-3.0, 3.0, 61)
    sup = max(abs(conditional_density_point(m, 15.0, float(t)) - phi(t)) for t in ts)
    assert sup <= 0.05


def test_point_density_integrates_to_one():
    for m in (GAUSS, EllipticalModel(0.2, Gamma(3.0, 1.0))):
        total, _ = quad(lambda t: conditional_density_point(m, 2.0, t), -12.0, 12.0,
                        limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)


def test_point_density_requires_density():
    with pytest.raises((NoDensityError, DomainError)):
        conditional_density_point(EllipticalModel(0.0, PointMass(1.0)), 0.5, 0.0)


# ---------------------------------------------------------------------------
# exceedance conditioning

def test_exceed_gauss_symmetry():
    for x in (0.5, 1.0, 2.0):
        assert conditional_sf_exceed(GAUSS, x, 0.0) == pytest.approx(0.5, abs=1e-8)


def test_exceed_gauss_independence():
    val = conditional_sf_exceed(GAUSS, 1.0, 1.0)
    assert val == pytest.approx(1.0 - ndtr(1.0), abs=1e-8)


def test_exceed_approaches_half_at_center():
    m = EllipticalModel(0.5, Rayleigh(1.0))
    val = conditional_sf_exceed(m, 2.0, 1.0)
    assert abs(val - 0.5) <= 0.1


def test_exceed_methods_agree():
    m = EllipticalModel(0.5, Rayleigh(1.0))
    for x, y in [(1.0, 1.0), (2.0, 1.5)]:
        q = conditional_sf_exceed(m, x, y, method="quadrature")
        mc = conditional_sf_exceed(m, x, y, method="montecarlo", n=200000, seed=13)
        se = math.sqrt(max(q * (1 - q), 1e-12) / 200000)
        assert abs(q - mc) <= max(0.02, 3 * se / math.sqrt(max(m.radial.sf(x), 1e-12)))


def test_exceed_pointmass_arc_geometry():
    # unit-circle radial: exact arc-overlap solution
    m = EllipticalModel(0.0, PointMass(1.0))
    val = conditional_sf_exceed(m, 0.5, 0.5)
    a = math.acos(0.5)
    assert val == pytest.approx((a - (math.pi / 2 - a)) / (2 * a), abs=1e-10)


def test_exceed_deep_tail_importance_sampling():
    m = EllipticalModel(0.5, Rayleigh(1.0))
    val = conditional_sf_exceed(m, 6.0, 3.0, method="montecarlo", n=100000, seed=17)
    assert 0.0 < val < 1.0


# ---------------------------------------------------------------------------
# Gaussian approximation and diagnostics

def test_gaussian_approx_rho_zero_rayleigh():
    for x in (1.0, 4.0, 9.0):
        for y in (0.0, 0.7, 2.2):
            assert gaussian_approx_sf(GAUSS, x, y) == pytest.approx(1.0 - ndtr(y), rel=1e-10)


def test_gaussian_approx_center():
    m = EllipticalModel(0.5, Rayleigh(1.0))
    assert gaussian_approx_sf(m, 3.0, 1.5) == pytest.approx(0.5, abs=1e-12)


def test_gaussian_approx_vs_exceed_kotz():
    m = EllipticalModel(0.5, Kotz(1.0, 0.0, 1.0, 2.0))
    x = 6.0
    # y at the 0.9 approximation quantile
    from scipy.special import ndtri

    w = mda_classify(m.radial).w
    cx = math.sqrt(w(x) / x)
    y = 0.5 * x + math.sqrt(1 - 0.25) * ndtri(0.9) / cx
    approx = gaussian_approx_sf(m, x, y)
    mc = conditional_sf_exceed(m, x, y, method="montecarlo", n=400000, seed=23)
    assert abs(approx - mc) <= 0.03


def test_gaussian_approx_requires_gumbel():
    with pytest.raises(DomainError):
        gaussian_approx_sf(EllipticalModel(0.0, PointMass(1.0)), 1.0, 0.5)


def test_convergence_diagnostic_rayleigh_noise_floor():
    exceed, point = convergence_diagnostic(GAUSS, [2.0, 4.0], n=100000, seed=31)
    noise = 3.0 / math.sqrt(100000)
    assert np.all(point <= noise + 1e-3)
    assert np.all(exceed <= noise + 1e-3)


def test_convergence_diagnostic_kotz_improves():
    m = EllipticalModel(0.0, Kotz(1.0, 0.0, 1.0, 1.0))
    exceed, point = convergence_diagnostic(m, [5.0, 10.0, 15.0], n=100000, seed=32)
    noise = 3.0 / math.sqrt(100000)
    assert exceed[-1] <= 0.05
    assert point[-1] <= 0.05
    assert all(b <= a + noise for a, b in zip(exceed, exceed[1:]))
    assert all(b <= a + noise for a, b in zip(point, point[1:]))


def test_convergence_diagnostic_pointmass_rejected():
    with pytest.raises((DomainError, NoDensityError)):
        convergence_diagnostic(EllipticalModel(0.0, PointMass(1.0)), [1.0, 2.0])


def test_abs_u_marginal_classifies_gumbel():
    pairs = sample_elliptical(GAUSS, 100000, seed=41)
    au = np.sort(np.abs(pairs[:, 0]))
    grid = np.quantile(au, np.linspace(0.01, 0.999, 250))
    grid = np.unique(grid)
    emp = np.searchsorted(au, grid, side="right") / au.size
    tab = TabulatedCdf(grid, emp, rectify=True)
    assert mda_classify(tab).label == "gumbel"
