"""Doeblin minorization constants and total-variation envelopes.

If ``Q^M(x, .) >= theta * nu(.)`` for every ``x``, then

    ||Q^n mu - mu_*||_TV <= C * alpha^n,   alpha = (1 - theta)^(1/M),
                                           C = 2 / (1 - theta).

Fixed-basis chord walk (l moves, k-accessible, radii ratio mu = r/R):

    M = k + d,   theta = b_d * l^-(k+d) * mu^(k+d)

Random-direction chord walk:

    M = 1,       theta = c * [(1/mu + 1)^(d-1) * (1/mu)]^-1

with ``c = 2/d`` as originally stated, or ``c = 1/d`` (the default,
"conservative"), which is what the ratio ``b_d / c_d = 1/d`` of unit-ball
volume to unit-sphere surface actually gives.

Everything is carried in log space: ``theta`` underflows double precision
for moderately sized bodies (e.g. ``birkhoff:n=4``) long before the
bound stops being meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Body

ALGORITHMS = ("fixed_basis", "random_direction")
VARIANTS = ("as_stated", "conservative")


class AccessibilityError(ValueError):
    """The body has no accessibility constant / move basis for the fixed-basis bound."""


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0)


def unit_ball_volume(d: int) -> float:
    """Volume ``pi^(d/2) / Gamma(d/2 + 1)`` of the unit ball in R^d."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return math.exp(log_unit_ball_volume(d))


def sphere_surface(d: int) -> float:
    """Surface ``2 pi^(d/2) / Gamma(d/2)`` of the unit sphere in R^d."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return math.exp(math.log(2.0) + 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d))


@dataclass(frozen=True)
class RateBound:
    """Doeblin constants ``(M, theta)`` and the derived rate and prefactor."""

    M: int
    log_theta: float
    variant: str = "as_stated"

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if not self.log_theta < 0.0:
            raise ValueError(f"theta = exp({self.log_theta}) is not below 1; the inputs give no valid bound")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def theta(self) -> float:
        return math.exp(self.log_theta)

    @property
    def log10_theta(self) -> float:
        return self.log_theta / math.log(10.0)

    @property
    def log_alpha(self) -> float:
        theta = self.theta
        if theta > 0.0:
            return math.log1p(-theta) / self.M
        return -math.exp(self.log_theta - math.log(self.M))

    @property
    def alpha(self) -> float:
        return math.exp(self.log_alpha)

    @property
    def C(self) -> float:
        return 2.0 / (1.0 - self.theta)


def bound_fixed_basis(d: int, k: int, l: int, mu: float) -> RateBound:
    """Constants for the fixed-basis walk on a k-accessible body."""
    if min(d, k, l) < 1:
        raise ValueError("d, k, l must be positive")
    if not 0 < mu <= 1:
        raise ValueError(f"mu = r/R must lie in (0, 1], got {mu}")
    M = k + d
    log_theta = log_unit_ball_volume(d) - M * math.log(l) + M * math.log(mu)
    return RateBound(M, log_theta, "as_stated")


def bound_random_direction(d: int, mu: float, variant: str = "conservative") -> RateBound:
    """Constants for the random-direction walk (``M = 1``)."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if not 0 < mu <= 1:
        raise ValueError(f"mu = r/R must lie in (0, 1], got {mu}")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    rho = 1.0 / mu
    prefactor = 2.0 / d if variant == "as_stated" else 1.0 / d
    log_theta = math.log(prefactor) - (d - 1) * math.log(rho + 1.0) - math.log(rho)
    return RateBound(1, log_theta, variant)


def body_bound(body: Body, algorithm: str, variant: str = "conservative") -> RateBound:
    """Bound for a catalogued body from its metadata (d, r, R, k, l)."""
    meta = body.meta
    if algorithm == "fixed_basis":
        if meta.k is None or meta.basis is None:
            raise AccessibilityError(
                f"{body.descriptor or body.kind}: no accessibility constant known; "
                "only the random_direction algorithm has a bound")
        return bound_fixed_basis(meta.d, meta.k, meta.l, meta.mu)
    if algorithm == "random_direction":
        return bound_random_direction(meta.d, meta.mu, variant)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def tv_envelope(bound: RateBound, n: int) -> float:
    """``min(2, C alpha^n)``; TV distance of probability measures is at most 2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    log_env = math.log(bound.C) + n * bound.log_alpha
    return 2.0 if log_env >= math.log(2.0) else math.exp(log_env)


def steps_to_tolerance(bound: RateBound, eps: float) -> int | float:
    """Smallest ``n`` with ``C alpha^n <= eps`` (``math.inf`` if alpha rounds to 1)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps >= 2.0 or bound.C <= eps:
        return 0
    if bound.log_alpha == 0.0:
        return math.inf
    n = (math.log(bound.C) - math.log(eps)) / -bound.log_alpha
    return math.ceil(n) if math.isfinite(n) else math.inf
