"""Continued fractions, the Gauss map, bounded type, and the signature cocycle.

Digits are positive integers throughout.  Rational inputs always use the
shorter expansion.  The cocycle on signatures is
(rho, delta) -> (G(rho), ||delta/rho||) where ||.|| is either the distance
to the nearest integer ("nearest") or the fractional part ("fractional");
both conventions are exposed, "nearest" is the default (it is the one that
fixes the golden signature and matches measured pair signatures).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import mpmath

from . import config
from .errors import DepthError, DomainError

NEAREST = "nearest"
FRACTIONAL = "fractional"


@dataclass(frozen=True)
class ContinuedFraction:
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    depth_truncated: bool = False

    def __post_init__(self):
        for a in self.preperiod + self.period:
            if not (isinstance(a, int) and a >= 1):
                raise DomainError(f"continued fraction digit {a!r} must be a "
                                  "positive integer")
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))

    @property
    def is_periodic(self) -> bool:
        return len(self.period) > 0

    @property
    def known_depth(self) -> int:
        """Number of digits available; unbounded if periodic."""
        if self.is_periodic:
            return 1 << 30
        return len(self.preperiod)

    def digit(self, j: int) -> int:
        if j < len(self.preperiod):
            return self.preperiod[j]
        if self.is_periodic:
            return self.period[(j - len(self.preperiod)) % len(self.period)]
        raise DepthError(f"digit {j} beyond available depth "
                         f"{len(self.preperiod)}")

    def digits(self, depth: int) -> tuple[int, ...]:
        return tuple(self.digit(j) for j in range(depth))

    def value(self, depth: int | None = None) -> float:
        return cf_to_real(self, depth if depth is not None else
                          min(self.known_depth, 40))

    def mp_value(self, depth: int) -> mpmath.mpf:
        """High-precision convergent value (uses current mpmath precision)."""
        p, q = convergents(self, min(depth, self.known_depth), limit=None)
        return mpmath.mpf(p) / q


GOLDEN = ContinuedFraction(period=(1,))


@dataclass(frozen=True)
class Signature:
    rho: ContinuedFraction
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta {self.delta} outside (0, 1)")


def real_to_cf(x: float, depth: int) -> ContinuedFraction:
    """Digit extraction by iterating x -> {1/x}.

    Stops early when the reciprocal is within NEAR_RATIONAL_TOL of an
    integer (binary64 digits beyond that point are noise), setting
    depth_truncated.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"x={x} outside (0, 1)")
    digits = []
    truncated = False
    y = x
    for _ in range(depth):
        r = 1.0 / y
        a = math.floor(r)
        if abs(r - round(r)) < config.NEAR_RATIONAL_TOL:
            digits.append(int(round(r)))
            truncated = True
            break
        digits.append(int(a))
        y = r - a
    return ContinuedFraction(preperiod=tuple(digits),
                             depth_truncated=truncated)


def cf_to_real(cf: ContinuedFraction, depth: int) -> float:
    depth = min(depth, cf.known_depth)
    if depth == 0:
        raise DepthError("no digits available")
    p, q = convergents(cf, depth)
    return p / q


def convergents(cf: ContinuedFraction, k: int,
                limit: int | None = config.QK_OVERFLOW_LIMIT) -> tuple[int, int]:
    """(p_k, q_k) with p_k/q_k = [a_0, ..., a_{k-1}], exact integers.

    Denominators beyond the 64-bit safety limit raise unless limit=None
    (used internally for extended-precision values).
    """
    if k > cf.known_depth:
        raise DepthError(f"k={k} beyond available digits {cf.known_depth}")
    p_prev, q_prev = 1, 0   # (p_{-1}, q_{-1})
    p, q = 0, 1             # (p_0, q_0)
    for j in range(k):
        a = cf.digit(j)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if limit is not None and q > limit:
            raise DepthError(f"q_{j + 1}={q} exceeds 64-bit safety limit")
    return p, q


def gauss_shift(cf: ContinuedFraction) -> ContinuedFraction:
    """Forget the first digit; periodic tails rotate."""
    if cf.preperiod:
        return replace(cf, preperiod=cf.preperiod[1:])
    if cf.is_periodic:
        return replace(cf, period=cf.period[1:] + cf.period[:1])
    raise DepthError("cannot shift an empty continued fraction")


def is_bounded_type(cf: ContinuedFraction, B: int) -> bool:
    return all(a <= B for a in cf.preperiod + cf.period)


def _mod_norm(t, convention: str):
    if convention == NEAREST:
        frac = t - mpmath.floor(t) if isinstance(t, mpmath.mpf) else t - math.floor(t)
        return min(frac, 1 - frac)
    if convention == FRACTIONAL:
        return t - (mpmath.floor(t) if isinstance(t, mpmath.mpf) else math.floor(t))
    raise DomainError(f"unknown convention {convention!r}")


def cocycle_step(s: Signature, convention: str = NEAREST) -> Signature:
    """(rho, delta) -> (G(rho), ||delta/rho||)."""
    rho_val = s.rho.value()
    delta_new = float(_mod_norm(s.delta / rho_val, convention))
    return Signature(rho=gauss_shift(s.rho), delta=delta_new)


def cocycle_orbit(rho: ContinuedFraction, delta, steps: int,
                  convention: str = NEAREST, dps: int | None = None):
    """Iterate the signature cocycle, returning the list of delta values.

    The cocycle expands errors by 1/rho per step, so long orbits are only
    meaningful at extended precision; pass dps to run under mpmath.
    """
    out = []
    cf = rho
    with mpmath.workdps(dps if dps is not None else 15):
        d = mpmath.mpf(delta) if dps is not None else float(delta)
        depth = 3 * (dps if dps is not None else 15)
        for _ in range(steps):
            rho_val = cf.mp_value(depth) if dps is not None else cf.value()
            d = _mod_norm(d / rho_val, convention)
            cf = gauss_shift(cf)
            out.append(float(d))
    return out


def _periodic_cf_value(word: tuple[int, ...], dps: int | None = None):
    """Value of the purely periodic continued fraction [word; word; ...]."""
    # Moebius matrix of one period: x = (p1*x + p0)/(q1*x + q0)
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    for a in word:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    # x = (p*x + p_prev)/(q*x + q_prev)  ->  q x^2 + (q_prev - p) x - p_prev = 0
    A, B_, C_ = q, q_prev - p, -p_prev
    if dps is None:
        disc = math.sqrt(B_ * B_ - 4 * A * C_)
        return (-B_ + disc) / (2 * A)
    return (-B_ + mpmath.sqrt(mpmath.mpf(B_ * B_ - 4 * A * C_))) / (2 * A)


def _canonical_rotation(word: tuple[int, ...]) -> tuple[int, ...]:
    return min(tuple(word[i:] + word[:i]) for i in range(len(word)))


@dataclass(frozen=True)
class SignatureOrbit:
    signatures: tuple[Signature, ...]
    word: tuple[int, ...]
    residual: float


def find_periodic_signatures(period: int, B: int,
                             convention: str = NEAREST,
                             verify_tol: float = 1e-10,
                             report=None) -> list[SignatureOrbit]:
    """Periodic orbits of the signature cocycle for all digit words <= B.

    For each period-`period` word the delta fixed-point equation of the
    `period`-fold cocycle is solved by scanning plus bisection on (0, 1);
    orbits are verified at extended precision.  Digit classes with no
    solution are omitted (and reported via the optional `report` callback).
    """
    if period < 1:
        raise DomainError("period must be >= 1")
    seen = set()
    orbits = []
    for word in itertools.product(range(1, B + 1), repeat=period):
        canon = _canonical_rotation(word)
        if canon in seen:
            continue
        seen.add(canon)
        word = canon
        cf = ContinuedFraction(period=word)
        dps = 60
        with mpmath.workdps(dps):
            rho_vals = []
            c = cf
            for _ in range(period):
                rho_vals.append(c.mp_value(3 * dps))
                c = gauss_shift(c)

            def T(d):
                for rv in rho_vals:
                    d = _mod_norm(d / rv, convention)
                return d

            def g(d):
                return T(d) - d

            n_scan = 512
            grid = [mpmath.mpf(i) / n_scan for i in range(1, n_scan)]
            gv = [g(d) for d in grid]
            roots = []
            for i in range(len(grid) - 1):
                if gv[i] == 0:
                    roots.append(grid[i])
                elif gv[i] * gv[i + 1] < 0:
                    a, b = grid[i], grid[i + 1]
                    for _ in range(200):
                        m = (a + b) / 2
                        if g(a) * g(m) <= 0:
                            b = m
                        else:
                            a = m
                    roots.append((a + b) / 2)
            found = False
            for r in roots:
                if not 0 < r < 1:
                    continue
                resid = abs(T(r) - r)
                if resid > verify_tol:
                    continue
                sigs = []
                d = r
                c = cf
                ok = True
                for j in range(period):
                    dv = float(d)
                    if not 0.0 < dv < 1.0:
                        ok = False
                        break
                    sigs.append(Signature(rho=c, delta=dv))
                    d = _mod_norm(d / rho_vals[j], convention)
                    c = gauss_shift(c)
                if ok:
                    orbits.append(SignatureOrbit(
                        signatures=tuple(sigs), word=word,
                        residual=float(resid)))
                    found = True
            if not found and report is not None:
                report(word)
    return orbits
