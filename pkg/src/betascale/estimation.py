"""Estimator pipeline for elliptical samples with Weibull-type radial tails.

From (u, v) pairs: a rank-based correlation estimate, pseudo-radii, a
log-spacing estimator of the Weibull tail exponent theta from the top k_n
order statistics, the companion scale estimate r, and plug-in Gaussian
conditional survivor / quantile estimators built from the fitted scaling
function w(x) = r*theta*x**(theta-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

from .errors import DomainError, NumericError, StageError

__all__ = [
    "SampleBatch",
    "EstimatorConfig",
    "TailFitResult",
    "PipelineResult",
    "kendall_rho",
    "pseudo_radii",
    "gg_theta",
    "r_hat",
    "w_hat",
    "h_hat",
    "psi_hat",
    "quantile_hat",
    "pipeline",
]


@dataclass
class SampleBatch:
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise DomainError("u and v must be 1-d arrays of equal length")
        if self.u.size < 2:
            raise DomainError("need at least two pairs")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise DomainError("sample contains non-finite values")

    @property
    def n(self):
        return self.u.size

    @classmethod
    def from_pairs(cls, pairs):
        pairs = np.asarray(pairs, dtype=float)
        return cls(pairs[:, 0], pairs[:, 1])


@dataclass
class EstimatorConfig:
    k_n: int | None = None        # default ceil(n**0.6), capped at n // 3
    radius_source: str = "R1"

    def resolve_k(self, n):
        k = self.k_n if self.k_n is not None else int(math.ceil(n ** 0.6))
        k = min(k, n // 3)
        if k < 1:
            raise DomainError("sample too small for tail fitting")
        return k


@dataclass
class TailFitResult:
    theta: float
    r: float
    source: str
    k_n: int
    n_used: int
    n_dropped: int = 0


@dataclass
class PipelineResult:
    tau: float
    rho: float
    fit: TailFitResult
    warnings: list = field(default_factory=list)

    def psi(self, x, y):
        return psi_hat(self.fit, self.rho, x, y)

    def theta_fn(self, x, s):
        return quantile_hat(self.fit, self.rho, x, s)


# ---------------------------------------------------------------------------
# Kendall's tau

def _merge_count(a):
    """Number of strict inversions (a[i] > a[j], i < j), by merge sort."""
    a = list(a)
    n = len(a)
    buf = [0.0] * n
    count = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    count += mid - i
                    buf[k] = a[j]
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            buf[k:hi] = a[i:mid] if i < mid else a[j:hi]
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return count


def _tie_pairs(keys):
    """Number of pairs sharing a key, keys sorted."""
    total = 0
    run = 1
    for prev, cur in zip(keys, keys[1:]):
        if cur == prev:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    total += run * (run - 1) // 2
    return total


def kendall_rho(batch: SampleBatch):
    """(tau, rho): tau with ties counted as zero, rho = sin(pi*tau/2)."""
    n = batch.n
    order = np.lexsort((batch.v, batch.u))
    u = batch.u[order]
    v = batch.v[order]
    n0 = n * (n - 1) // 2
    t_u = _tie_pairs(u.tolist())
    if t_u == n0:
        raise DomainError("Kendall's tau undefined: all u values tied")
    t_v = _tie_pairs(np.sort(batch.v).tolist())
    t_uv = _tie_pairs(list(zip(u.tolist(), v.tolist())))
    if t_v == n0:
        raise DomainError("Kendall's tau undefined: all v values tied")
    # v is sorted within u-ties, so strict inversions are exactly the
    # discordant pairs; concordant = n0 - ties - discordant
    disc = _merge_count(v.tolist())
    ties = t_u + t_v - t_uv
    tau = (n0 - ties - 2 * disc) / n0
    rho = math.sin(math.pi * tau / 2.0)
    return tau, rho


# ---------------------------------------------------------------------------
# radii and tail fit

def pseudo_radii(batch: SampleBatch, rho):
    """(R1, R2): the raw u-coordinates and the elliptical radii implied by rho."""
    if not -1.0 < rho < 1.0:
        raise DomainError("need |rho| < 1 for pseudo-radii")
    r1 = batch.u.copy()
    resid = (batch.v - rho * batch.u) / math.sqrt(1.0 - rho ** 2)
    r2 = np.sqrt(batch.u ** 2 + resid ** 2)
    return r1, r2


def _top_order_stats(radii, k):
    radii = np.asarray(radii, dtype=float)
    pos = radii[radii > 0]
    dropped = radii.size - pos.size
    n = pos.size
    if n < 3:
        raise DomainError("too few positive radii for tail fitting")
    k = min(k, n - 1)
    if k < 1:
        raise DomainError("too few positive radii for the requested k_n")
    top = np.sort(pos)[-k:]             # R_{n-k+1:n} .. R_{n:n} ascending
    return top, n, k, dropped


def gg_theta(radii, k_n):
    """Log-spacing estimate of theta in sf(x) = exp(-r x**theta (1 + o(1))).

    theta_hat = T_n / M_n with
      M_n = (1/k) sum_i [log R_{n-i+1:n} - log R_{n-k+1:n}]
      T_n = (1/k) sum_i [log log(n/i) - log log(n/k)]
    Terms with log(n/i) <= 1 are excluded from both sums, which preserves
    the exact identity theta_hat = theta on exact Weibull quantiles.
    """
    top, n, k, dropped = _top_order_stats(radii, k_n)
    pivot_log = math.log(top[0])         # log R_{n-k+1:n} (the k-th largest)
    base = math.log(n / k)
    if base <= 0.0:
        raise DomainError("k_n too large: need k_n < n")
    m_sum = 0.0
    t_sum = 0.0
    kept = 0
    for i in range(1, k + 1):
        li = math.log(n / i)
        if li <= 1.0:
            continue
        m_sum += math.log(top[k - i]) - pivot_log
        t_sum += math.log(li) - math.log(base)
        kept += 1
    if kept == 0 or m_sum <= 0.0:
        raise NumericError("degenerate tail: top order statistics coincide")
    return (t_sum / kept) / (m_sum / kept)


def r_hat(radii, theta, k_n):
    """Scale estimate (1/k) sum_i log(n/i) / R_{n-i+1:n}**theta."""
    if theta <= 0:
        raise DomainError("theta must be positive")
    top, n, k, dropped = _top_order_stats(radii, k_n)
    total = 0.0
    for i in range(1, k + 1):
        total += math.log(n / i) / top[k - i] ** theta
    val = total / k
    if val <= 0:
        raise NumericError("nonpositive scale estimate")
    return val


def w_hat(fit: TailFitResult, x):
    """Fitted scaling function w(x) = r*theta*x**(theta-1)."""
    if x <= 0:
        raise DomainError("x must be positive")
    return fit.r * fit.theta * x ** (fit.theta - 1.0)


def h_hat(fit: TailFitResult, x):
    """sqrt(w_hat(x)/x), the standardization rate of the conditional limit."""
    return math.sqrt(w_hat(fit, x) / x)


def psi_hat(fit: TailFitResult, rho, x, y):
    """Plug-in Gaussian estimate of P(V > y | U > x)."""
    if not -1.0 < rho < 1.0:
        raise DomainError("need |rho| < 1")
    z = h_hat(fit, x) * (y - rho * x) / math.sqrt(1.0 - rho ** 2)
    return float(sc.ndtr(-z))


def quantile_hat(fit: TailFitResult, rho, x, s):
    """Plug-in conditional quantile: the exact inverse of psi_hat in y."""
    if not 0.0 < s < 1.0:
        raise DomainError("quantile level must be in (0, 1)")
    if not -1.0 < rho < 1.0:
        raise DomainError("need |rho| < 1")
    return rho * x + math.sqrt(1.0 - rho ** 2) * float(sc.ndtri(s)) / h_hat(fit, x)


# ---------------------------------------------------------------------------
# pipeline

def pipeline(batch: SampleBatch, cfg: EstimatorConfig | None = None):
    """kendall_rho -> pseudo_radii -> gg_theta -> r_hat, with bound estimators."""
    cfg = cfg or EstimatorConfig()
    warnings = []
    if batch.n < 100:
        warnings.append("small sample: n < 100; tail estimates are unreliable")
    try:
        tau, rho = kendall_rho(batch)
    except (DomainError, NumericError) as exc:
        raise StageError(f"correlation stage failed: {exc}", stage="kendall") from exc
    try:
        r1, r2 = pseudo_radii(batch, rho)
    except (DomainError, NumericError) as exc:
        raise StageError(f"radius stage failed: {exc}", stage="radii") from exc
    source = cfg.radius_source.upper()
    if source == "R1":
        radii = r1
    elif source == "R2":
        radii = r2
    elif source == "V":
        radii = batch.v
    else:
        raise DomainError(f"unknown radius source {cfg.radius_source!r}")
    k = cfg.resolve_k(batch.n)
    try:
        theta = gg_theta(radii, k)
        r = r_hat(radii, theta, k)
    except (DomainError, NumericError) as exc:
        raise StageError(f"tail-fit stage failed: {exc}", stage="tail_fit") from exc
    pos = int(np.sum(np.asarray(radii) > 0))
    dropped = len(radii) - pos
    if dropped:
        warnings.append(f"excluded {dropped} nonpositive radii from tail fitting")
    fit = TailFitResult(theta=theta, r=r, source=source, k_n=min(k, pos - 1),
                        n_used=pos, n_dropped=dropped)
    return PipelineResult(tau=tau, rho=rho, fit=fit, warnings=warnings)
