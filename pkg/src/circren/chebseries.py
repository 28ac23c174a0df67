"""Chebyshev-series representation of analytic real functions on intervals.

A ChebPiece stores coefficients over an arbitrary interval via the affine
pullback to [-1, 1].  Real evaluation uses Clenshaw through
``numpy.polynomial.chebyshev``; complex arguments are accepted inside the
Bernstein ellipse of the stored parameter and return the analytic
continuation of the same polynomial.  Pieces are immutable, all operations
are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from . import config
from .errors import (
    CompositionRangeError,
    DomainError,
    NearSingularInverseError,
    NonFiniteSampleError,
)

MONOTONE_INC = "increasing"
MONOTONE_NONE = "none"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"non-finite interval [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def to_unit(self, x):
        return (np.asarray(x) - self.mid) / self.half

    def from_unit(self, t):
        return self.mid + self.half * np.asarray(t)

    def contains(self, x, tol: float = 0.0) -> bool:
        return (self.lo - tol) <= x <= (self.hi + tol)

    def contains_interval(self, other: "Interval", tol: float = 0.0) -> bool:
        return other.lo >= self.lo - tol and other.hi <= self.hi + tol

    def distance(self, x) -> float:
        """Distance from x to the interval (0 inside); real part for complex."""
        xr = float(np.real(x))
        return max(self.lo - xr, xr - self.hi, 0.0)


def _cheb_nodes(n: int) -> np.ndarray:
    """Chebyshev points of the first kind on [-1, 1], ascending."""
    j = np.arange(n)
    return np.cos(np.pi * (2.0 * j + 1.0) / (2.0 * n))[::-1]


def _coeffs_from_samples(samples: np.ndarray) -> np.ndarray:
    """Interpolating coefficients from values at first-kind points."""
    n = len(samples)
    j = np.arange(n)
    theta = np.pi * (2.0 * j + 1.0) / (2.0 * n)
    k = np.arange(n)
    # samples are stored in ascending-x order, theta descends with x
    cosmat = np.cos(np.outer(k, theta))
    c = (2.0 / n) * cosmat @ samples[::-1]
    c[0] *= 0.5
    return c


@dataclass(frozen=True)
class ChebPiece:
    domain: Interval
    coeffs: np.ndarray
    monotone_flag: str = MONOTONE_NONE
    tail: float = 0.0
    ellipse_rho: float = config.BERNSTEIN_RHO

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) == 0:
            raise DomainError("coefficient vector must be 1-d and non-empty")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def converged(self) -> bool:
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        return self.tail <= config.TAIL_TOL * scale

    def __call__(self, x):
        return cheb_eval(self, x)

    def endpoint_values(self):
        return (cheb_eval(self, self.domain.lo), cheb_eval(self, self.domain.hi))

    @property
    def image(self) -> Interval:
        """Image interval, valid for monotone increasing pieces."""
        lo, hi = self.endpoint_values()
        return Interval(float(lo), float(hi))


def _tail_estimate(coeffs: np.ndarray) -> float:
    if len(coeffs) < 2:
        return float(abs(coeffs[-1]))
    return float(np.max(np.abs(coeffs[-2:])))


def _detect_monotone(piece_coeffs: np.ndarray, domain: Interval) -> str:
    n = max(len(piece_coeffs), 2)
    dcoef = C.chebder(piece_coeffs) * (1.0 / domain.half)
    t = _cheb_nodes(n)
    dv = C.chebval(t, dcoef)
    return MONOTONE_INC if np.all(dv > 0.0) else MONOTONE_NONE


def cheb_fit(f, domain: Interval, degree: int,
             ellipse_rho: float = config.BERNSTEIN_RHO) -> ChebPiece:
    """Interpolate f at the degree+1 Chebyshev points of `domain`."""
    if degree < 1:
        raise DomainError(f"degree must be >= 1, got {degree}")
    t = _cheb_nodes(degree + 1)
    x = domain.from_unit(t)
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        y = np.array([float(f(xi)) for xi in x])
    if not np.all(np.isfinite(y)):
        bad = int(np.argmax(~np.isfinite(y)))
        raise NonFiniteSampleError(float(x[bad]), float(y[bad]))
    coeffs = _coeffs_from_samples(y)
    return ChebPiece(
        domain=domain,
        coeffs=coeffs,
        monotone_flag=_detect_monotone(coeffs, domain),
        tail=_tail_estimate(coeffs),
        ellipse_rho=ellipse_rho,
    )


def piece_from_coeffs(domain: Interval, coeffs,
                      ellipse_rho: float = config.BERNSTEIN_RHO) -> ChebPiece:
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
    return ChebPiece(
        domain=domain,
        coeffs=coeffs,
        monotone_flag=_detect_monotone(coeffs, domain),
        tail=_tail_estimate(coeffs),
        ellipse_rho=ellipse_rho,
    )


def identity_piece(domain: Interval) -> ChebPiece:
    return piece_from_coeffs(domain, [domain.mid, domain.half])


def affine_function_piece(domain: Interval, slope: float, intercept: float) -> ChebPiece:
    """The function x -> slope*x + intercept represented exactly on `domain`."""
    return piece_from_coeffs(
        domain, [slope * domain.mid + intercept, slope * domain.half]
    )


def _ellipse_radius(t: complex) -> float:
    w = np.sqrt(complex(t) ** 2 - 1.0)
    return max(abs(t + w), abs(t - w))


def cheb_eval(p: ChebPiece, x, tol: float | None = None):
    """Clenshaw evaluation; complex x must lie in the Bernstein ellipse."""
    xarr = np.asarray(x)
    if np.iscomplexobj(xarr):
        t = (xarr - p.domain.mid) / p.domain.half
        radii = np.atleast_1d(t)
        worst = max(_ellipse_radius(ti) for ti in radii.ravel())
        if worst > p.ellipse_rho:
            raise DomainError(
                f"complex point outside Bernstein ellipse "
                f"(radius {worst:.3f} > {p.ellipse_rho})",
                distance=worst - p.ellipse_rho,
            )
        return C.chebval(t, p.coeffs)
    if tol is None:
        tol = config.DOMAIN_OVERHANG * p.domain.length
    dist = np.maximum(p.domain.lo - xarr, xarr - p.domain.hi)
    worst = float(np.max(dist)) if dist.size else 0.0
    if worst > tol:
        raise DomainError(
            f"evaluation point outside domain [{p.domain.lo}, {p.domain.hi}]",
            distance=worst,
        )
    return C.chebval(p.domain.to_unit(xarr), p.coeffs)


def cheb_derivative(p: ChebPiece) -> ChebPiece:
    if p.degree == 0:
        return piece_from_coeffs(p.domain, [0.0], ellipse_rho=p.ellipse_rho)
    dcoef = C.chebder(p.coeffs) * (1.0 / p.domain.half)
    return ChebPiece(
        domain=p.domain,
        coeffs=dcoef,
        monotone_flag=_detect_monotone(dcoef, p.domain),
        tail=_tail_estimate(dcoef),
        ellipse_rho=p.ellipse_rho,
    )


def cheb_compose(outer: ChebPiece, inner: ChebPiece, degree: int,
                 range_tol: float | None = None) -> ChebPiece:
    """Refit of outer o inner on inner's domain."""
    if range_tol is None:
        range_tol = config.STAGE_COMPAT_TOL * max(outer.domain.length, 1e-300)
    t = _cheb_nodes(degree + 1)
    x = inner.domain.from_unit(t)
    y = cheb_eval(inner, x)
    escape = float(np.max(np.maximum(outer.domain.lo - y, y - outer.domain.hi)))
    if escape > range_tol:
        raise CompositionRangeError(
            "inner image escapes outer domain", escape)
    y = np.clip(y, outer.domain.lo, outer.domain.hi)
    z = cheb_eval(outer, y)
    coeffs = _coeffs_from_samples(np.asarray(z, dtype=float))
    return ChebPiece(
        domain=inner.domain,
        coeffs=coeffs,
        monotone_flag=_detect_monotone(coeffs, inner.domain),
        tail=_tail_estimate(coeffs),
        ellipse_rho=min(outer.ellipse_rho, inner.ellipse_rho),
    )


_DERIV_FLOOR = 1e-10


def cheb_invert(p: ChebPiece, degree: int) -> ChebPiece:
    """Inverse diffeomorphism by per-node Newton with bisection fallback."""
    if p.monotone_flag != MONOTONE_INC:
        raise DomainError("cheb_invert requires a monotone increasing piece")
    dp = cheb_derivative(p)
    scale = p.image.length / p.domain.length
    nodes = _cheb_nodes(max(p.degree + 1, 8))
    dvals = cheb_eval(dp, p.domain.from_unit(nodes))
    floor = _DERIV_FLOOR * max(scale, 1.0)
    if np.min(dvals) < floor:
        i = int(np.argmin(dvals))
        raise NearSingularInverseError(
            float(p.domain.from_unit(nodes)[i]), float(np.min(dvals)))
    ylo, yhi = p.endpoint_values()
    img = Interval(float(ylo), float(yhi))
    xtol = 1e-15 * max(p.domain.length, abs(p.domain.lo), abs(p.domain.hi), 1.0)

    def solve_one(y):
        a, b = p.domain.lo, p.domain.hi
        x = a + (b - a) * (y - ylo) / (yhi - ylo)
        for _ in range(60):
            fx = float(cheb_eval(p, x)) - y
            if fx > 0:
                b = x
            else:
                a = x
            d = float(cheb_eval(dp, x))
            step = fx / d if d > floor else None
            xn = x - step if step is not None else 0.5 * (a + b)
            if not (a <= xn <= b):
                xn = 0.5 * (a + b)
            if abs(xn - x) < xtol:
                return xn
            x = xn
        return x

    t = _cheb_nodes(degree + 1)
    ys = img.from_unit(t)
    xs = np.array([solve_one(float(y)) for y in ys])
    coeffs = _coeffs_from_samples(xs)
    return ChebPiece(
        domain=img,
        coeffs=coeffs,
        monotone_flag=_detect_monotone(coeffs, img),
        tail=_tail_estimate(coeffs),
        ellipse_rho=p.ellipse_rho,
    )


def cheb_affine(p: ChebPiece, pre: tuple[float, float] | None = None,
                post: tuple[float, float] | None = None,
                degree: int | None = None) -> ChebPiece:
    """x -> c * p(a*x + b) + d.

    The post-affine part is an exact coefficient transform; a pre-affine
    part triggers a refit on the pulled-back domain.
    """
    result = p
    if pre is not None:
        a, b = pre
        if a == 0.0:
            raise DomainError("pre-affine slope must be nonzero")
        end1 = (p.domain.lo - b) / a
        end2 = (p.domain.hi - b) / a
        newdom = Interval(min(end1, end2), max(end1, end2))
        deg = degree if degree is not None else p.degree
        result = cheb_fit(lambda x: cheb_eval(p, a * x + b,
                                              tol=1e-9 * p.domain.length + 1e-12),
                          newdom, max(deg, 1), ellipse_rho=p.ellipse_rho)
    if post is not None:
        c, d = post
        if c == 0.0:
            raise DomainError("post-affine scale must be nonzero")
        coeffs = result.coeffs * c
        coeffs = coeffs.copy()
        coeffs[0] += d
        result = ChebPiece(
            domain=result.domain,
            coeffs=coeffs,
            monotone_flag=_detect_monotone(coeffs, result.domain),
            tail=_tail_estimate(coeffs),
            ellipse_rho=result.ellipse_rho,
        )
    return result


def refit(p: ChebPiece, degree: int) -> ChebPiece:
    """Re-express the same function at a different degree."""
    if degree == p.degree:
        return p
    return cheb_fit(lambda x: cheb_eval(p, x), p.domain, degree,
                    ellipse_rho=p.ellipse_rho)


def restrict(p: ChebPiece, sub: Interval, degree: int | None = None) -> ChebPiece:
    """Same function on a subinterval of the domain."""
    tol = config.DOMAIN_OVERHANG * p.domain.length
    if not p.domain.contains_interval(sub, tol):
        raise DomainError(f"{sub} not inside {p.domain}")
    deg = degree if degree is not None else p.degree
    return cheb_fit(lambda x: cheb_eval(p, x), sub, deg,
                    ellipse_rho=p.ellipse_rho)
