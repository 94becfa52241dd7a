"""Univariate distributions with evaluation, sampling and tail metadata.

Every law exposes ``cdf``, ``sf``, ``pdf``, ``quantile`` and ``sample`` plus
its support endpoints.  Laws in the Gumbel max-domain additionally expose a
scaling function, and every analytic family knows which extreme value class
attracts its maxima.  Tabulated CDFs are carried by a monotone piecewise
cubic interpolant so that densities and quantiles stay well defined.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, NoDensityError

__all__ = [
    "ln_gamma",
    "reg_inc_beta",
    "beta_moment",
    "ScalingFunction",
    "MdaClass",
    "WeibullTailModel",
    "Distribution",
    "Uniform",
    "Beta",
    "Gamma",
    "Exponential",
    "Pareto",
    "Rayleigh",
    "Kotz",
    "PointMass",
    "TabulatedCdf",
    "make_rng",
    "mda_classify",
    "scaling_function_w",
    "dist_from_json",
    "dist_to_json",
    "load_tabulated_csv",
]


# ---------------------------------------------------------------------------
# special functions

def ln_gamma(x):
    """log Gamma(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("ln_gamma requires x > 0")
    out = sc.gammaln(x)
    return float(out) if out.ndim == 0 else out


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta: P(B_{a,b} <= x) for x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise DomainError("beta parameters must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)):
        raise DomainError("reg_inc_beta requires x in [0, 1]")
    out = sc.betainc(a, b, xa)
    return float(out) if out.ndim == 0 else out


def beta_moment(alpha, beta, gamma):
    """E[B_{alpha,beta}^gamma] = Gamma(a+b)Gamma(a+g) / (Gamma(a)Gamma(a+b+g))."""
    if alpha <= 0 or beta <= 0:
        raise DomainError("beta parameters must be positive")
    if gamma < 0:
        raise DomainError("moment order must be nonnegative")
    return math.exp(
        sc.gammaln(alpha + beta) + sc.gammaln(alpha + gamma)
        - sc.gammaln(alpha) - sc.gammaln(alpha + beta + gamma)
    )


def make_rng(seed, stream=0):
    """Counter-based generator keyed by (seed, stream); streams are independent."""
    return np.random.Generator(np.random.Philox(key=[int(seed), int(stream)]))


# ---------------------------------------------------------------------------
# scaling functions (Gumbel auxiliary functions, Berman's convention)

@dataclass
class ScalingFunction:
    """The w in sf(x + t/w(x)) / sf(x) -> exp(-t).

    Forms: ``constant`` (w == value), ``power`` (w(x) = r*theta*x**(theta-1))
    and ``von_mises`` (numeric hazard pdf/sf).  ``l1`` optionally describes a
    regularly varying relative correction to the power form.
    """

    form: str
    value: float | None = None          # constant form
    r: float | None = None              # power form
    theta: float | None = None
    pdf: object = None                  # von_mises form: callables
    sf: object = None
    fn: object = None                   # custom form: direct callable
    l1: object = None                   # optional correction descriptor

    @classmethod
    def constant(cls, value):
        return cls(form="constant", value=float(value))

    @classmethod
    def power(cls, r, theta):
        if theta == 1.0:
            return cls.constant(r)
        return cls(form="power", r=float(r), theta=float(theta))

    @classmethod
    def von_mises(cls, pdf, sf):
        return cls(form="von_mises", pdf=pdf, sf=sf)

    @classmethod
    def custom(cls, fn):
        return cls(form="custom", fn=fn)

    def __call__(self, x):
        if self.form == "constant":
            return self.value if np.isscalar(x) else np.full(np.shape(x), self.value)
        if self.form == "power":
            xa = np.asarray(x, dtype=float)
            out = self.r * self.theta * xa ** (self.theta - 1.0)
            return float(out) if out.ndim == 0 else out
        if self.form == "custom":
            return self.fn(x)
        num = self.pdf(x)
        den = self.sf(x)
        return num / den

    def self_neglect_deviation(self, x, t_span=3.0, n=13):
        """max over t in [-t_span, t_span] of |w(x + t/w(x))/w(x) - 1|."""
        w0 = float(self(x))
        ts = np.linspace(-t_span, t_span, n)
        dev = 0.0
        for t in ts:
            dev = max(dev, abs(float(self(x + t / w0)) / w0 - 1.0))
        return dev


@dataclass
class MdaClass:
    """Max-domain-of-attraction label with its index / scaling function."""

    label: str                              # "gumbel" | "frechet" | "weibull" | "unclassified"
    gamma: float | None = None              # frechet / weibull index
    r_upper: float | None = None            # weibull endpoint
    w: ScalingFunction | None = None        # gumbel scaling function
    confident: bool = True
    r_squared: float | None = None

    @property
    def is_gumbel(self):
        return self.label == "gumbel"


@dataclass
class WeibullTailModel:
    """sf(x) = exp(-r * x**theta * (1 + o(1))); theta**-1 is the tail coefficient."""

    r: float
    theta: float
    l2: object = None   # optional slowly varying correction descriptor

    def __post_init__(self):
        if self.r <= 0 or self.theta <= 0:
            raise DomainError("Weibull tail model requires r > 0 and theta > 0")

    def sf(self, x):
        return np.exp(-self.r * np.asarray(x, dtype=float) ** self.theta)

    def quantile(self, q):
        """Exact quantile when the o(1) correction vanishes."""
        return (-np.log1p(-np.asarray(q, dtype=float)) / self.r) ** (1.0 / self.theta)

    def scaling_w(self):
        return ScalingFunction.power(self.r, self.theta)


# ---------------------------------------------------------------------------
# distribution base

class Distribution:
    """Base class: a univariate law on [lower, upper]."""

    lower = 0.0
    upper = math.inf

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        out = 1.0 - np.asarray(self.cdf(x), dtype=float)
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        raise NoDensityError(f"{type(self).__name__} has no density")

    def quantile(self, q):
        raise NotImplementedError

    def isf(self, s):
        """Inverse survivor: the x with sf(x) = s.  The default goes through
        quantile(1 - s) and loses precision once s is below machine epsilon;
        laws with an analytic tail override it."""
        return self.quantile(1.0 - np.asarray(s, dtype=float))

    def sample(self, n, seed, stream=0):
        """n i.i.d. draws by inverse transform; reproducible under (seed, stream)."""
        if n < 1:
            raise DomainError("sample size must be >= 1")
        rng = make_rng(seed, stream)
        return np.asarray(self.quantile(rng.random(n)), dtype=float)

    def mda(self) -> MdaClass:
        raise NotImplementedError

    def scaling_w(self) -> ScalingFunction:
        m = self.mda()
        if not m.is_gumbel:
            raise DomainError(f"{type(self).__name__} is not in the Gumbel MDA")
        return m.w

    def has_density(self):
        try:
            self.pdf(0.5 * (self.lower + min(self.upper, self.lower + 1.0)) + 1e-9)
        except NoDensityError:
            return False
        except Exception:
            pass
        return True


def _as_float(x, fn):
    out = fn(np.asarray(x, dtype=float))
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


class Uniform(Distribution):
    def __init__(self, a=0.0, b=1.0):
        if not b > a:
            raise DomainError("uniform requires b > a")
        self.a, self.b = float(a), float(b)
        self.lower, self.upper = self.a, self.b

    def cdf(self, x):
        return _as_float(x, lambda v: np.clip((v - self.a) / (self.b - self.a), 0.0, 1.0))

    def pdf(self, x):
        return _as_float(x, lambda v: np.where((v >= self.a) & (v <= self.b),
                                               1.0 / (self.b - self.a), 0.0))

    def quantile(self, q):
        return _as_float(q, lambda u: self.a + (self.b - self.a) * u)

    def mda(self):
        return MdaClass("weibull", gamma=1.0, r_upper=self.b)


class Beta(Distribution):
    def __init__(self, a, b):
        if a <= 0 or b <= 0:
            raise DomainError("beta requires positive parameters")
        self.a, self.b = float(a), float(b)
        self.lower, self.upper = 0.0, 1.0

    def cdf(self, x):
        return _as_float(x, lambda v: sc.betainc(self.a, self.b, np.clip(v, 0.0, 1.0)))

    def pdf(self, x):
        lnb = sc.betaln(self.a, self.b)

        def f(v):
            inside = (v > 0) & (v < 1)
            vv = np.where(inside, v, 0.5)
            d = np.exp((self.a - 1) * np.log(vv) + (self.b - 1) * np.log1p(-vv) - lnb)
            return np.where(inside, d, 0.0)

        return _as_float(x, f)

    def quantile(self, q):
        return _as_float(q, lambda u: sc.betaincinv(self.a, self.b, u))

    def mda(self):
        return MdaClass("weibull", gamma=self.b, r_upper=1.0)


class Gamma(Distribution):
    def __init__(self, shape, rate):
        if shape <= 0 or rate <= 0:
            raise DomainError("gamma requires positive shape and rate")
        self.shape, self.rate = float(shape), float(rate)

    def cdf(self, x):
        return _as_float(x, lambda v: sc.gammainc(self.shape, self.rate * np.maximum(v, 0.0)))

    def sf(self, x):
        return _as_float(x, lambda v: sc.gammaincc(self.shape, self.rate * np.maximum(v, 0.0)))

    def pdf(self, x):
        lg = sc.gammaln(self.shape)

        def f(v):
            pos = v > 0
            vv = np.where(pos, v, 1.0)
            d = np.exp(self.shape * np.log(self.rate) + (self.shape - 1) * np.log(vv)
                       - self.rate * vv - lg)
            return np.where(pos, d, 0.0)

        return _as_float(x, f)

    def quantile(self, q):
        return _as_float(q, lambda u: sc.gammaincinv(self.shape, u) / self.rate)

    def isf(self, s):
        return _as_float(s, lambda v: sc.gammainccinv(self.shape, v) / self.rate)

    def mda(self):
        # w(x) -> rate for x large; the gamma tail is exponential class L(rate)
        return MdaClass("gumbel", w=ScalingFunction.constant(self.rate))

    def scaling_w(self):
        return ScalingFunction.constant(self.rate)


class Exponential(Distribution):
    def __init__(self, rate=1.0):
        if rate <= 0:
            raise DomainError("exponential requires positive rate")
        self.rate = float(rate)

    def cdf(self, x):
        return _as_float(x, lambda v: -np.expm1(-self.rate * np.maximum(v, 0.0)))

    def sf(self, x):
        return _as_float(x, lambda v: np.exp(-self.rate * np.maximum(v, 0.0)))

    def pdf(self, x):
        return _as_float(x, lambda v: np.where(v >= 0, self.rate * np.exp(-self.rate * np.maximum(v, 0.0)), 0.0))

    def quantile(self, q):
        return _as_float(q, lambda u: -np.log1p(-u) / self.rate)

    def isf(self, s):
        return _as_float(s, lambda v: -np.log(v) / self.rate)

    def mda(self):
        return MdaClass("gumbel", w=ScalingFunction.constant(self.rate))


class Pareto(Distribution):
    """sf(x) = (x / xmin)**(-gamma) for x >= xmin."""

    def __init__(self, gamma_, xmin=1.0):
        if gamma_ <= 0 or xmin <= 0:
            raise DomainError("pareto requires positive index and xmin")
        self.gamma_, self.xmin = float(gamma_), float(xmin)
        self.lower = self.xmin

    def cdf(self, x):
        return _as_float(x, lambda v: np.where(v >= self.xmin,
                                               1.0 - (np.maximum(v, self.xmin) / self.xmin) ** (-self.gamma_),
                                               0.0))

    def sf(self, x):
        return _as_float(x, lambda v: np.where(v >= self.xmin,
                                               (np.maximum(v, self.xmin) / self.xmin) ** (-self.gamma_),
                                               1.0))

    def pdf(self, x):
        return _as_float(x, lambda v: np.where(
            v >= self.xmin,
            self.gamma_ / self.xmin * (np.maximum(v, self.xmin) / self.xmin) ** (-self.gamma_ - 1.0),
            0.0))

    def quantile(self, q):
        return _as_float(q, lambda u: self.xmin * (1.0 - u) ** (-1.0 / self.gamma_))

    def isf(self, s):
        return _as_float(s, lambda v: self.xmin * v ** (-1.0 / self.gamma_))

    def mda(self):
        return MdaClass("frechet", gamma=self.gamma_)


class Rayleigh(Distribution):
    """sf(x) = exp(-x^2 / (2 sigma^2))."""

    def __init__(self, sigma=1.0):
        if sigma <= 0:
            raise DomainError("rayleigh requires positive sigma")
        self.sigma = float(sigma)

    def cdf(self, x):
        return _as_float(x, lambda v: -np.expm1(-np.maximum(v, 0.0) ** 2 / (2 * self.sigma ** 2)))

    def sf(self, x):
        return _as_float(x, lambda v: np.exp(-np.maximum(v, 0.0) ** 2 / (2 * self.sigma ** 2)))

    def pdf(self, x):
        s2 = self.sigma ** 2
        return _as_float(x, lambda v: np.where(v >= 0, np.maximum(v, 0.0) / s2
                                               * np.exp(-np.maximum(v, 0.0) ** 2 / (2 * s2)), 0.0))

    def quantile(self, q):
        return _as_float(q, lambda u: self.sigma * np.sqrt(-2.0 * np.log1p(-u)))

    def isf(self, s):
        return _as_float(s, lambda v: self.sigma * np.sqrt(-2.0 * np.log(v)))

    def mda(self):
        # pdf/sf = x / sigma^2, the power form with r = 1/(2 sigma^2), theta = 2
        return MdaClass("gumbel", w=ScalingFunction.power(1.0 / (2 * self.sigma ** 2), 2.0))


class Kotz(Distribution):
    """Kotz-type law: sf(x) = M x**N exp(-r x**theta) past the crossing point.

    The survivor equals 1 up to x0, the (largest) solution of
    M x**N exp(-r x**theta) = 1 on the decreasing branch; for M = 1, N = 0
    this is the exact Weibull law exp(-r x**theta).
    """

    def __init__(self, m, n_exp, r, theta):
        if m <= 0 or r <= 0 or theta <= 0:
            raise DomainError("kotz requires M, r, theta > 0")
        self.m, self.n_exp = float(m), float(n_exp)
        self.r, self.theta = float(r), float(theta)
        self.x0 = self._crossing()
        self.lower = self.x0

    def _log_tail(self, x):
        return math.log(self.m) + self.n_exp * math.log(x) - self.r * x ** self.theta

    def _crossing(self):
        if self.m == 1.0 and self.n_exp == 0.0:
            return 0.0
        # stationary point of the tail function
        if self.n_exp > 0:
            xs = (self.n_exp / (self.r * self.theta)) ** (1.0 / self.theta)
            if self._log_tail(xs) < 0:
                raise DomainError("kotz parameters never reach survivor level 1")
            lo = xs
        else:
            # decreasing for all x > 0; log tail -> +inf as x -> 0 when N<0 or M>1
            if self.n_exp == 0 and self.m < 1:
                raise DomainError("kotz with M < 1 and N = 0 has an atom at 0")
            lo = 1e-12
            if self._log_tail(lo) < 0:
                raise DomainError("kotz parameters never reach survivor level 1")
        hi = max(2.0 * lo, 1.0)
        while self._log_tail(hi) > 0:
            hi *= 2.0
        return brentq(self._log_tail, lo, hi, xtol=1e-14, rtol=8.9e-16)

    def sf(self, x):
        def f(v):
            v = np.maximum(v, self.x0 if self.x0 > 0 else 0.0)
            with np.errstate(divide="ignore"):
                logs = np.where(v > 0,
                                math.log(self.m) + self.n_exp * np.log(np.maximum(v, 1e-300))
                                - self.r * v ** self.theta,
                                0.0)
            out = np.exp(np.minimum(logs, 0.0))
            return np.where(v <= self.x0, 1.0, out)

        return _as_float(x, f)

    def cdf(self, x):
        out = 1.0 - np.asarray(self.sf(x), dtype=float)
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        def f(v):
            past = v > self.x0
            vv = np.where(past & (v > 0), v, 1.0)
            s = self.m * vv ** self.n_exp * np.exp(-self.r * vv ** self.theta)
            d = s * (self.r * self.theta * vv ** (self.theta - 1.0) - self.n_exp / vv)
            return np.where(past, np.maximum(d, 0.0), 0.0)

        return _as_float(x, f)

    def quantile(self, q):
        if self.m == 1.0 and self.n_exp == 0.0:
            return _as_float(q, lambda u: (-np.log1p(-u) / self.r) ** (1.0 / self.theta))

        def one(u):
            if u <= 0.0:
                return self.x0
            target = math.log1p(-u)
            hi = max(1.0, 2.0 * self.x0 + 1.0)
            while self._log_tail(hi) > target:
                hi *= 2.0
            return brentq(lambda v: self._log_tail(v) - target, self.x0 + 1e-300, hi,
                          xtol=1e-13, rtol=8.9e-16)

        q = np.asarray(q, dtype=float)
        if q.ndim == 0:
            return one(float(q))
        return np.array([one(u) for u in q.ravel()]).reshape(q.shape)

    def isf(self, s):
        def one(v):
            if v >= 1.0:
                return self.x0
            target = math.log(v)
            hi = max(1.0, 2.0 * self.x0 + 1.0)
            while self._log_tail(hi) > target:
                hi *= 2.0
            return brentq(lambda r: self._log_tail(r) - target, self.x0 + 1e-300, hi,
                          xtol=1e-13, rtol=8.9e-16)

        if self.m == 1.0 and self.n_exp == 0.0:
            return _as_float(s, lambda v: (-np.log(v) / self.r) ** (1.0 / self.theta))
        s = np.asarray(s, dtype=float)
        if s.ndim == 0:
            return one(float(s))
        return np.array([one(v) for v in s.ravel()]).reshape(s.shape)

    def mda(self):
        return MdaClass("gumbel", w=ScalingFunction.power(self.r, self.theta))


class PointMass(Distribution):
    def __init__(self, c):
        self.c = float(c)
        self.lower = self.upper = self.c

    def cdf(self, x):
        return _as_float(x, lambda v: np.where(v >= self.c, 1.0, 0.0))

    def quantile(self, q):
        return _as_float(q, lambda u: np.full(np.shape(u), self.c))

    def sample(self, n, seed, stream=0):
        if n < 1:
            raise DomainError("sample size must be >= 1")
        return np.full(n, self.c)

    def mda(self):
        # degenerate endpoint: treated as the gamma = 0 limit of the Weibull class
        return MdaClass("weibull", gamma=0.0, r_upper=self.c)


class TabulatedCdf(Distribution):
    """CDF given on a strictly increasing grid, PCHIP-interpolated.

    The monotone interpolant supplies the density analytically; quantiles are
    found by bisection.  Below the grid the CDF is 0, above it is 1.
    """

    def __init__(self, grid, values, tail_hint=None, rectify=False):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.size < 4:
            raise DomainError("tabulated CDF needs at least 4 grid points")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("tabulated grid must be strictly increasing")
        if rectify:
            values = np.clip(np.maximum.accumulate(values), 0.0, 1.0)
        if np.any(np.diff(values) < 0) or values[0] < 0 or values[-1] > 1 + 1e-12:
            raise DomainError("tabulated CDF values must be nondecreasing in [0, 1]")
        self.grid = grid
        self.values = np.clip(values, 0.0, 1.0)
        self.tail_hint = tail_hint
        self.lower = float(grid[0])
        self.upper = float(grid[-1])
        self._interp = PchipInterpolator(self.grid, self.values, extrapolate=False)
        self._deriv = self._interp.derivative()

    def cdf(self, x):
        def f(v):
            out = self._interp(np.clip(v, self.grid[0], self.grid[-1]))
            out = np.where(v <= self.grid[0], self.values[0] * (v >= self.grid[0]), out)
            out = np.where(v >= self.grid[-1], self.values[-1], out)
            return np.where(v < self.grid[0], 0.0, out)

        return _as_float(x, f)

    def pdf(self, x):
        def f(v):
            inside = (v >= self.grid[0]) & (v <= self.grid[-1])
            out = self._deriv(np.clip(v, self.grid[0], self.grid[-1]))
            return np.where(inside, np.maximum(out, 0.0), 0.0)

        return _as_float(x, f)

    def quantile(self, q):
        def one(u):
            if u <= self.values[0]:
                return self.grid[0]
            if u >= self.values[-1]:
                return self.grid[-1]
            lo, hi = self.grid[0], self.grid[-1]
            while hi - lo > 1e-10 * max(1.0, abs(hi)):
                mid = 0.5 * (lo + hi)
                if self._interp(mid) < u:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        q = np.asarray(q, dtype=float)
        if q.ndim == 0:
            return one(float(q))
        return np.array([one(u) for u in q.ravel()]).reshape(q.shape)

    def mda(self):
        return _classify_tabulated(self)

    def scaling_w(self):
        m = self.mda()
        if not m.is_gumbel:
            raise DomainError("tabulated law not classified as Gumbel")
        return ScalingFunction.von_mises(self.pdf, self.sf)


# ---------------------------------------------------------------------------
# MDA classification

def scaling_function_w(dist: Distribution) -> ScalingFunction:
    """Scaling function of a Gumbel-MDA law (von Mises ratio as fallback)."""
    return dist.scaling_w()


def mda_classify(dist: Distribution) -> MdaClass:
    """MDA label with index / scaling function; numeric diagnostic for tables."""
    return dist.mda()


def _linfit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return slope, intercept, r2


def _classify_tabulated(tab: TabulatedCdf, min_points=8, r2_floor=0.99) -> MdaClass:
    """Tail diagnostic on the top two decades of probability of the grid.

    Fits the three candidate tail shapes by least squares and keeps the best
    one; when a declared hint is present only the hinted shape is fitted.
    An R-squared below the floor yields the ``unclassified`` outcome.
    """
    sf = 1.0 - tab.values
    x = tab.grid
    pos = sf > 0
    if pos.sum() < min_points:
        return MdaClass("unclassified", confident=False)
    s_lo = sf[pos].min()
    window = pos & (sf <= 100.0 * s_lo) & (x > 0)
    if window.sum() < min_points:
        window = pos & (x > 0)
        if window.sum() < min_points:
            return MdaClass("unclassified", confident=False)
    xs, ss = x[window], sf[window]

    hint = tab.tail_hint
    candidates = {}

    if hint in (None, "frechet"):
        slope, _, r2 = _linfit(np.log(xs), np.log(ss))
        if slope < 0:
            candidates["frechet"] = (r2, MdaClass("frechet", gamma=-slope, r_squared=r2))
    if hint in (None, "weibull"):
        r_up = float(tab.grid[-1])
        keep = xs < r_up
        if keep.sum() >= min_points:
            slope, _, r2 = _linfit(np.log(r_up - xs[keep]), np.log(ss[keep]))
            if slope > 0:
                candidates["weibull"] = (r2, MdaClass("weibull", gamma=slope,
                                                      r_upper=r_up, r_squared=r2))
    if hint in (None, "gumbel"):
        slope, intercept, r2 = _linfit(np.log(xs), np.log(-np.log(ss)))
        if slope > 0:
            w = ScalingFunction.power(math.exp(intercept), slope)
            candidates["gumbel"] = (r2, MdaClass("gumbel", w=w, r_squared=r2))

    if not candidates:
        return MdaClass("unclassified", confident=False)
    best = max(candidates.values(), key=lambda t: t[0])
    if best[0] < r2_floor:
        return MdaClass("unclassified", confident=False, r_squared=best[0])
    return best[1]


# ---------------------------------------------------------------------------
# JSON serialization

def load_tabulated_csv(path, tail_hint=None):
    """Read a `x,cdf` CSV with strictly increasing x into a TabulatedCdf."""
    xs, vs = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        while header and header[0].startswith("#"):
            header = next(reader)
        if [h.strip().lower() for h in header[:2]] != ["x", "cdf"]:
            raise DomainError(f"{path}: expected header 'x,cdf'")
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            xs.append(float(row[0]))
            vs.append(float(row[1]))
    return TabulatedCdf(xs, vs, tail_hint=tail_hint)


_FACTORIES = {
    "uniform": lambda o: Uniform(o["a"], o["b"]),
    "beta": lambda o: Beta(o["a"], o["b"]),
    "gamma": lambda o: Gamma(o["shape"], o["rate"]),
    "exponential": lambda o: Exponential(o["rate"]),
    "pareto": lambda o: Pareto(o["gamma"], o.get("xmin", 1.0)),
    "rayleigh": lambda o: Rayleigh(o.get("sigma", 1.0)),
    "kotz": lambda o: Kotz(o["M"], o["N"], o["r"], o["theta"]),
    "pointmass": lambda o: PointMass(o["c"]),
}


def dist_from_json(obj, base_dir="."):
    """Build a distribution from its JSON object form."""
    family = obj.get("family")
    if family == "tabulated":
        import os

        path = obj["path"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return load_tabulated_csv(path, tail_hint=obj.get("tail_hint"))
    if family not in _FACTORIES:
        raise DomainError(f"unknown distribution family: {family!r}")
    return _FACTORIES[family](obj)


def dist_to_json(dist):
    if isinstance(dist, Uniform):
        return {"family": "uniform", "a": dist.a, "b": dist.b}
    if isinstance(dist, Beta):
        return {"family": "beta", "a": dist.a, "b": dist.b}
    if isinstance(dist, Gamma):
        return {"family": "gamma", "shape": dist.shape, "rate": dist.rate}
    if isinstance(dist, Exponential):
        return {"family": "exponential", "rate": dist.rate}
    if isinstance(dist, Pareto):
        return {"family": "pareto", "gamma": dist.gamma_, "xmin": dist.xmin}
    if isinstance(dist, Rayleigh):
        return {"family": "rayleigh", "sigma": dist.sigma}
    if isinstance(dist, Kotz):
        return {"family": "kotz", "M": dist.m, "N": dist.n_exp, "r": dist.r, "theta": dist.theta}
    if isinstance(dist, PointMass):
        return {"family": "pointmass", "c": dist.c}
    raise DomainError(f"cannot serialize {type(dist).__name__}")
