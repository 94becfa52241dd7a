"""Predicted tail asymptotes of beta-scaled laws in all three extreme value
classes, with ratio diagnostics against direct quadrature.

For X = B_{alpha,beta} * Y the survivor of X near the upper endpoint is,
depending on the max-domain of Y,

    Gumbel:   K * (x w(x))**(-beta) * sf_Y(x),          K = G(a+b)/G(a)
    Frechet:  E[B**gamma] * sf_Y(x)
    Weibull:  K * x**beta * sf_Y(1 - x) near r_H = 1,   K = G(a+b)G(g+1)/(G(a)G(g+b+1))

(G = Gamma).  Each prediction is reported as a (prediction, direct, ratio)
triple; assertion thresholds live in the test suite, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .distributions import (Distribution, MdaClass, ScalingFunction,
                            beta_moment)
from .errors import DomainError
from .fractional import QuadratureConfig
from .scaling import forward_pdf, forward_sf

__all__ = [
    "TailPrediction",
    "predict_gumbel",
    "predict_frechet",
    "predict_weibull",
    "density_ratio",
    "general_multiplier_tail",
    "fractional_asymptote",
    "rapid_variation_profile",
    "power_transform_w",
    "biased_tail_asymptote",
    "max_stability_check",
]


@dataclass
class TailPrediction:
    constant: float
    shape: str
    prediction: float
    direct: float

    @property
    def ratio(self):
        if self.prediction == 0.0:
            return math.inf if self.direct > 0 else math.nan
        return self.direct / self.prediction


def _tail_cfg():
    # tail values are tiny; accuracy must be relative, not absolute
    return QuadratureConfig(atol=1e-300, rtol=1e-9)


def _lngamma_ratio(num, den):
    return math.exp(sum(sc.gammaln(v) for v in num) - sum(sc.gammaln(v) for v in den))


def predict_gumbel(H, alpha, beta, x, cfg=None):
    """Gumbel-class asymptote K*(x w(x))**(-beta)*sf(x) vs direct quadrature."""
    m = H.mda()
    if not m.is_gumbel:
        raise DomainError("predict_gumbel requires a Gumbel-class law")
    w = m.w
    K = _lngamma_ratio([alpha + beta], [alpha])
    pred = K * (x * float(w(x))) ** (-beta) * float(H.sf(x))
    direct = forward_sf(H, alpha, beta, x, mode="mixture", cfg=cfg or _tail_cfg())
    return TailPrediction(K, "(x*w(x))**(-beta) * sf(x)", pred, direct)


def predict_frechet(H, alpha, beta, x, cfg=None):
    """Frechet-class asymptote E[B**gamma]*sf(x) vs direct quadrature."""
    m = H.mda()
    if m.label != "frechet":
        raise DomainError("predict_frechet requires a Frechet-class law")
    moment = beta_moment(alpha, beta, m.gamma)
    pred = moment * float(H.sf(x))
    direct = forward_sf(H, alpha, beta, x, mode="mixture", cfg=cfg or _tail_cfg())
    return TailPrediction(moment, "E[B**gamma] * sf(x)", pred, direct)


def predict_weibull(H, alpha, beta, x_dist, cfg=None):
    """Weibull-class asymptote at distance x_dist below the upper endpoint.

    The law is evaluated at r_H*(1 - x_dist) internally, so x_dist is always
    a fraction of the (finite) endpoint.
    """
    m = H.mda()
    if m.label != "weibull":
        raise DomainError("predict_weibull requires a Weibull-class law")
    r_up = m.r_upper
    if not math.isfinite(r_up):
        raise DomainError("Weibull-class prediction needs a finite endpoint")
    g = m.gamma
    K = _lngamma_ratio([alpha + beta, g + 1.0], [alpha, g + beta + 1.0])
    point = r_up * (1.0 - x_dist)
    pred = K * x_dist ** beta * float(H.sf(point))
    direct = forward_sf(H, alpha, beta, point, mode="mixture", cfg=cfg or _tail_cfg())
    return TailPrediction(K, "x**beta * sf(r_H*(1-x))", pred, direct)


def density_ratio(H, alpha, beta, x, mode, cfg=None):
    """Density-vs-survivor ratio of the scaled law and its limiting value.

    gumbel:  h(x) / (w(x) * sf(x))        -> 1
    frechet: x * h(x) / sf(x)             -> gamma
    weibull: x * h(1-x) / sf(1-x)         -> beta + gamma   (x below r_H = 1)
    """
    cfg = cfg or _tail_cfg()
    m = H.mda()
    if mode == "gumbel":
        if not m.is_gumbel:
            raise DomainError("H is not Gumbel-class")
        num = forward_pdf(H, alpha, beta, x, mode="mixture", cfg=cfg)
        den = float(m.w(x)) * forward_sf(H, alpha, beta, x, mode="mixture", cfg=cfg)
        return num / den, 1.0
    if mode == "frechet":
        if m.label != "frechet":
            raise DomainError("H is not Frechet-class")
        num = x * forward_pdf(H, alpha, beta, x, mode="mixture", cfg=cfg)
        den = forward_sf(H, alpha, beta, x, mode="mixture", cfg=cfg)
        return num / den, m.gamma
    if mode == "weibull":
        if m.label != "weibull":
            raise DomainError("H is not Weibull-class")
        point = m.r_upper * (1.0 - x)
        num = x * forward_pdf(H, alpha, beta, point, mode="mixture", cfg=cfg)
        den = forward_sf(H, alpha, beta, point, mode="mixture", cfg=cfg)
        return num / den, beta + m.gamma
    raise DomainError(f"unknown density ratio mode {mode!r}")


def general_multiplier_tail(H, descriptor, x, mda, kind):
    """Tail prediction for a general (non-beta) multiplier or kernel weight.

    ``descriptor`` carries the multiplier's endpoint behaviour: for kind "I"
    the survivor of the multiplier behaves like C*(1-u)**b near 1, for kind
    "J" its density behaves like c*(1-u)**(b-1); pass {"C": ..., "beta": ...}
    or {"c": ..., "beta": ...} accordingly.
    """
    b = float(descriptor["beta"])
    if b < 0:
        raise DomainError("descriptor exponent must be nonnegative")
    m = H.mda()
    if mda == "gumbel":
        if not m.is_gumbel:
            raise DomainError("H is not Gumbel-class")
        wx = float(m.w(x))
        sf = float(H.sf(x))
        if kind == "I":
            C = float(descriptor["C"])
            return C * math.exp(sc.gammaln(1.0 + b)) * sf / (x * wx) ** b
        if kind == "J":
            c = float(descriptor["c"])
            return c * math.exp(sc.gammaln(b)) * sf / (x ** b * wx ** (b - 1.0))
        raise DomainError(f"unknown kind {kind!r}")
    if mda == "weibull":
        if m.label != "weibull":
            raise DomainError("H is not Weibull-class")
        g = m.gamma
        sf = float(H.sf(m.r_upper * (1.0 - x)))
        if kind == "I":
            C = float(descriptor["C"])
            const = C * _lngamma_ratio([b + 1.0, g + 1.0], [b + g + 1.0])
            return const * x ** b * sf
        if kind == "J":
            c = float(descriptor["c"])
            const = c * _lngamma_ratio([b, g + 1.0], [b + g])
            return const * x ** (b - 1.0) * sf
        raise DomainError(f"unknown kind {kind!r}")
    raise DomainError("general multiplier predictions cover gumbel and weibull; "
                      "use predict_frechet for the regularly varying case")


def fractional_asymptote(H, beta, c, x, mda, kind):
    """Predicted value of (J_{beta,p_c} H)(x) or (I_beta p_c sf)(x) near the tail.

    Gumbel:  J ~ w(x)**(1-beta) * x**c * sf(x);      I ~ J / w(x)
    Frechet: J ~ g*G(g+1-b-c)/G(g+1-c) * x**(b+c-1) * sf(x)   (b+c < g+1)
             I ~ G(g-b-c)/G(g-c) * x**(b+c) * sf(x)           (b+c < g)
    Weibull: at distance x below r_H = 1,
             J ~ G(g+1)/G(b+g) * x**(b-1) * sf(1-x)
             I ~ G(g+1)/G(b+g+1) * x**b * sf(1-x)
    """
    if beta <= 0:
        raise DomainError("fractional order must be positive")
    m = H.mda()
    if mda == "gumbel":
        if not m.is_gumbel:
            raise DomainError("H is not Gumbel-class")
        wx = float(m.w(x))
        j = wx ** (1.0 - beta) * x ** c * float(H.sf(x))
        if kind == "J":
            return j
        if kind == "I":
            return j / wx
        raise DomainError(f"unknown kind {kind!r}")
    if mda == "frechet":
        if m.label != "frechet":
            raise DomainError("H is not Frechet-class")
        g = m.gamma
        if kind == "J":
            if beta + c >= g + 1.0:
                raise DomainError("requires beta + c < gamma + 1")
            const = g * _lngamma_ratio([g + 1.0 - beta - c], [g + 1.0 - c])
            return const * x ** (beta + c - 1.0) * float(H.sf(x))
        if kind == "I":
            if beta + c >= g:
                raise DomainError("requires beta + c < gamma")
            const = _lngamma_ratio([g - beta - c], [g - c])
            return const * x ** (beta + c) * float(H.sf(x))
        raise DomainError(f"unknown kind {kind!r}")
    if mda == "weibull":
        if m.label != "weibull":
            raise DomainError("H is not Weibull-class")
        g = m.gamma
        point = m.r_upper * (1.0 - x)
        if kind == "J":
            const = _lngamma_ratio([g + 1.0], [beta + g])
            return const * x ** (beta - 1.0) * float(H.sf(point))
        if kind == "I":
            const = _lngamma_ratio([g + 1.0], [beta + g + 1.0])
            return const * x ** beta * float(H.sf(point))
        raise DomainError(f"unknown kind {kind!r}")
    raise DomainError(f"unknown MDA {mda!r}")


def rapid_variation_profile(H, w, mu, c, x_grid):
    """(x w(x))**mu * sf(c x)/sf(x) along x_grid; tends to 0 for rapid tails."""
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    if c <= 1.0:
        raise DomainError("c must exceed 1")
    if math.isfinite(H.upper):
        raise DomainError("rapid variation profile needs an infinite endpoint")
    out = []
    for x in np.asarray(x_grid, dtype=float):
        wx = float(w(x)) if w is not None else 1.0
        out.append((x * wx) ** mu * float(H.sf(c * x)) / float(H.sf(x)))
    return np.array(out)


def power_transform_w(w: ScalingFunction, p) -> ScalingFunction:
    """Scaling function of X**p given the scaling function of X.

    w_p(x) = (1/p) * x**(1/p - 1) * w(x**(1/p)); power forms stay power
    forms with the exponent divided by p.
    """
    p = float(p)
    if p <= 0:
        raise DomainError("power must be positive")
    if p == 1.0:
        return w
    if w.form == "constant":
        return ScalingFunction.power(w.value, 1.0 / p)
    if w.form == "power":
        return ScalingFunction.power(w.r, w.theta / p)

    def fn(x):
        xa = np.asarray(x, dtype=float)
        root = xa ** (1.0 / p)
        out = root / (p * xa) * np.asarray(w(root), dtype=float)
        return float(out) if out.ndim == 0 else out

    return ScalingFunction.custom(fn)


def biased_tail_asymptote(H, q, c, x, kind):
    """Tail of the order-q stationary-excess or size-biased companion of H.

    stationary_excess: c * x**(q-1) * sf(x) / w(x)
    size_biased:       c * x**q * sf(x)
    """
    if c <= 0:
        raise DomainError("proportionality constant must be positive")
    if kind == "size_biased":
        return c * x ** q * float(H.sf(x))
    if kind == "stationary_excess":
        w = H.scaling_w()
        return c * x ** (q - 1.0) * float(H.sf(x)) / float(w(x))
    raise DomainError(f"unknown kind {kind!r}")


def _limit_cdf(m: MdaClass):
    if m.is_gumbel:
        return lambda t: math.exp(-math.exp(-t))
    if m.label == "frechet":
        g = m.gamma
        return lambda t: math.exp(-t ** (-g)) if t > 0 else 0.0
    if m.label == "weibull":
        g = m.gamma
        return lambda t: math.exp(-(-t) ** g) if t < 0 else 1.0
    raise DomainError("unclassified law has no extreme value limit")


def max_stability_check(H, n, t_grid=None):
    """Sup distance between the law of the normalized sample maximum and its
    extreme value limit over t_grid."""
    m = H.mda()
    limit = _limit_cdf(m)
    if m.is_gumbel:
        b_n = float(H.quantile(1.0 - 1.0 / n))
        a_n = 1.0 / float(m.w(b_n))
        if t_grid is None:
            t_grid = np.linspace(-2.0, 6.0, 81)
    elif m.label == "frechet":
        b_n = 0.0
        a_n = float(H.quantile(1.0 - 1.0 / n))
        if t_grid is None:
            t_grid = np.linspace(0.1, 8.0, 80)
    else:
        b_n = m.r_upper
        a_n = m.r_upper - float(H.quantile(1.0 - 1.0 / n))
        if t_grid is None:
            t_grid = np.linspace(-6.0, -0.05, 80)
    sup = 0.0
    for t in np.asarray(t_grid, dtype=float):
        fx = float(H.cdf(a_n * t + b_n))
        val = 0.0 if fx <= 0 else math.exp(n * math.log(fx))
        sup = max(sup, abs(val - limit(float(t))))
    return sup
