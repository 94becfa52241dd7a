import math

import numpy as np
import pytest
from scipy import stats

from betascale import (
    Beta,
    DomainError,
    Exponential,
    Gamma,
    Kotz,
    NoDensityError,
    Pareto,
    PointMass,
    Rayleigh,
    TabulatedCdf,
    Uniform,
    beta_moment,
    dist_from_json,
    dist_to_json,
    ln_gamma,
    make_rng,
    mda_classify,
    power_transform_w,
    reg_inc_beta,
    scaling_function_w,
)

CONTINUOUS = [
    Uniform(0.0, 1.0),
    Beta(2.0, 3.0),
    Gamma(2.0, 1.5),
    Exponential(1.0),
    Pareto(2.0, 1.0),
    Rayleigh(1.0),
    Kotz(1.0, 0.0, 1.0, 1.0),
]


# ---------------------------------------------------------------------------
# special functions

def test_ln_gamma_values():
    assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
    assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-12)
    assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-12)


def test_ln_gamma_domain():
    with pytest.raises(DomainError):
        ln_gamma(0.0)
    with pytest.raises(DomainError):
        ln_gamma(-1.0)


def test_reg_inc_beta_values():
    assert reg_inc_beta(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-12)
    assert reg_inc_beta(0.5, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)
    # 3x^2 - 2x^3 at x = 0.25
    assert reg_inc_beta(2.0, 2.0, 0.25) == pytest.approx(0.15625, abs=1e-12)


def test_reg_inc_beta_domain():
    with pytest.raises(DomainError):
        reg_inc_beta(1.0, 1.0, 1.5)


def test_beta_moment():
    assert beta_moment(1.0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-12)
    assert beta_moment(1.0, 1.0, 1.0) == pytest.approx(0.5, rel=1e-12)
    assert beta_moment(1.0, 1.0, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-12)


# ---------------------------------------------------------------------------
# evaluation

def test_eval_examples():
    assert Exponential(1.0).sf(2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)
    assert Pareto(2.0, 1.0).sf(3.0) == pytest.approx(1.0 / 9.0, rel=1e-12)
    assert Beta(2.0, 2.0).cdf(0.25) == pytest.approx(reg_inc_beta(2.0, 2.0, 0.25), abs=1e-12)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_cdf_sf_complement(dist):
    rng = make_rng(101)
    lo = dist.lower
    hi = dist.upper if math.isfinite(dist.upper) else dist.quantile(0.999)
    x = lo + (hi - lo) * rng.random(100)
    for xi in x:
        assert abs(dist.cdf(xi) + dist.sf(xi) - 1.0) <= 1e-12


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_quantile_roundtrip(dist):
    rng = make_rng(7)
    lo = dist.lower
    hi = dist.upper if math.isfinite(dist.upper) else dist.quantile(0.99)
    for xi in lo + (hi - lo) * rng.random(25):
        if xi <= lo:
            continue
        assert dist.quantile(dist.cdf(xi)) == pytest.approx(xi, abs=1e-8, rel=1e-8)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_pdf_integrates_to_one(dist):
    from scipy.integrate import quad

    hi = dist.upper if math.isfinite(dist.upper) else dist.quantile(1.0 - 1e-12)
    mid = dist.quantile(0.99)
    total = (quad(dist.pdf, dist.lower, mid, limit=200)[0]
             + quad(dist.pdf, mid, hi, limit=200)[0])
    assert total == pytest.approx(1.0, abs=1e-8)


def test_pointmass_has_no_density():
    with pytest.raises(NoDensityError):
        PointMass(1.0).pdf(0.5)


# ---------------------------------------------------------------------------
# sampling

def test_sample_pointmass():
    assert np.all(PointMass(1.0).sample(3, seed=5) == 1.0)


def test_sample_means():
    u = Uniform(0.0, 1.0).sample(100000, seed=11)
    assert abs(u.mean() - 0.5) <= 0.005
    b = Beta(2.0, 3.0).sample(100000, seed=12)
    assert abs(b.mean() - 0.4) <= 0.006


def test_sampling_reproducible():
    a = Gamma(2.0, 1.0).sample(1000, seed=3)
    b = Gamma(2.0, 1.0).sample(1000, seed=3)
    assert np.array_equal(a, b)
    c = Gamma(2.0, 1.0).sample(1000, seed=4)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: type(d).__name__)
def test_sample_kolmogorov(dist):
    x = dist.sample(100000, seed=21)
    ks = stats.kstest(x, dist.cdf).statistic
    assert ks <= 0.01


# ---------------------------------------------------------------------------
# scaling function w

def test_scaling_w_exponential():
    w = scaling_function_w(Exponential(1.0))
    assert w.form == "constant"
    assert w(123.0) == pytest.approx(1.0, rel=1e-12)


def test_scaling_w_rayleigh():
    w = scaling_function_w(Rayleigh(1.0))
    assert w.form == "power"
    assert w(3.0) == pytest.approx(3.0, rel=1e-12)  # w(x) = x


def test_scaling_w_gamma_asymptotic():
    w = scaling_function_w(Gamma(2.0, 1.5))
    assert w(1e6) == pytest.approx(1.5, rel=1e-6)


def test_scaling_w_frechet_rejected():
    with pytest.raises(DomainError):
        scaling_function_w(Pareto(2.0, 1.0))


def test_self_neglecting_improves_with_x():
    w = scaling_function_w(Rayleigh(1.0))
    devs = [w.self_neglect_deviation(x, t_span=3.0, n=31) for x in (5.0, 10.0, 20.0)]
    assert devs[0] > devs[1] > devs[2]


# ---------------------------------------------------------------------------
# MDA classification

def test_mda_pareto():
    cls = mda_classify(Pareto(2.0, 1.0))
    assert cls.label == "frechet"
    assert cls.gamma == pytest.approx(2.0)


def test_mda_uniform():
    cls = mda_classify(Uniform(0.0, 1.0))
    assert cls.label == "weibull"
    assert cls.gamma == pytest.approx(1.0)
    assert cls.r_upper == pytest.approx(1.0)


def test_mda_kotz():
    cls = mda_classify(Kotz(1.5, 0.0, 0.5, 2.0))
    assert cls.label == "gumbel"
    assert cls.w.form == "power"
    assert cls.w.r == pytest.approx(0.5)
    assert cls.w.theta == pytest.approx(2.0)


def test_mda_tabulated_numeric():
    # tabulation of an exponential tail classifies as Gumbel
    grid = np.linspace(0.05, 25.0, 400)
    tab = TabulatedCdf(grid, 1.0 - np.exp(-grid))
    cls = mda_classify(tab)
    assert cls.label == "gumbel"
    assert cls.confident


def test_mda_unclassified_is_not_exception():
    grid = np.linspace(0.1, 1.0, 12)
    vals = np.linspace(0.0, 1.0, 12) ** 0.5
    # too-short, ambiguous grid: must come back unclassified, not raise
    cls = mda_classify(TabulatedCdf(grid, vals, tail_hint="none"))
    assert cls.label == "unclassified"


# ---------------------------------------------------------------------------
# tabulated CDFs and serialization

def test_tabulated_monotone_interpolant():
    grid = np.linspace(0.0, 1.0, 50)
    tab = TabulatedCdf(grid, grid ** 2)
    fine = np.linspace(0.0, 1.0, 999)
    vals = np.array([tab.cdf(x) for x in fine])
    assert np.all(np.diff(vals) >= -1e-13)
    assert all(tab.pdf(x) >= 0.0 for x in grid[1:-1])


def test_tabulated_quantile_bisection():
    grid = np.linspace(0.0, 2.0, 80)
    tab = TabulatedCdf(grid, 1.0 - np.exp(-grid ** 2))
    for q in (0.1, 0.5, 0.9):
        x = tab.quantile(q)
        assert tab.cdf(x) == pytest.approx(q, abs=1e-9)


def test_json_roundtrip(tmp_path):
    for dist in [Pareto(2.0, 1.0), Uniform(0.0, 1.0), PointMass(1.0), Rayleigh(2.0)]:
        back = dist_from_json(dist_to_json(dist))
        assert type(back) is type(dist)
        x = 0.5 if math.isfinite(dist.upper) else 2.0
        assert back.cdf(x) == pytest.approx(dist.cdf(x), abs=1e-14)


def test_tabulated_csv_roundtrip(tmp_path):
    grid = np.linspace(0.0, 1.0, 11)
    path = tmp_path / "h.csv"
    path.write_text("x,cdf\n" + "\n".join(f"{x},{x**2}" for x in grid))
    tab = dist_from_json({"family": "tabulated", "path": "h.csv"}, base_dir=str(tmp_path))
    assert tab.cdf(0.5) == pytest.approx(0.25, abs=1e-6)
