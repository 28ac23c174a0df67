"""Concrete bi-cubic circle map families and their orbit statistics.

Two families are provided.  The trigonometric family has derivative
K*(1-cos2pix)(1-cos2pi(x-c)) times an optional positive shape factor, so
the lift is an explicit trigonometric polynomial plus x.  The Blaschke
family B(z) = e^{2pi i t} z^3 ((z-p)/(1-conj(p)z))((z-q)/(1-conj(q)z))
with |p|,|q|>1 restricts to a degree-one circle map whose lift is written
with continuous argument branches; a Fourier surrogate of the lift feeds
the same orbit kernels.

Rotation numbers come from closest returns: the return times are the
continued-fraction denominators q_k, and digits follow from the exact
integer recursion between successive times.
"""

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import config, kernels
from .errors import (CollisionError, NumericalError, RationalRotationError,
                     SolverFailure, ValidationFailure)
from .rotation import ContinuedFraction, Signature, convergents

COLLISION_MARGIN = 1e-6


@dataclass(frozen=True)
class TrigParams:
    omega: float
    c: float
    # optional positive shape factor 1 + beta*(1 - cos 2 pi (x - phase));
    # beta=0 recovers the two-parameter family
    beta: float = 0.0
    phase: float = 0.0


@dataclass(frozen=True)
class BlaschkeParams:
    t: float
    p: complex
    q: complex


@dataclass
class CircleLift:
    """A lift F of a circle homeomorphism with F(x+1) = F(x) + 1.

    crit holds the ordered critical points (0, c).  omega_fourier, A, B
    describe the lift as omega + x + sum_k A_k sin(2 pi k x)
    + B_k (1 - cos(2 pi k x)); orbit kernels consume this form directly.
    For the Blaschke family the Fourier data is a surrogate whose sup
    error is recorded in surrogate_err.
    """
    family_tag: str
    params: object
    crit: tuple
    omega_fourier: float
    A: np.ndarray
    B: np.ndarray
    exact_eval: object = None
    exact_deriv: object = None
    surrogate_err: float = 0.0

    def __call__(self, x):
        if self.exact_eval is not None:
            return self.exact_eval(x)
        return self._fourier_eval(x)

    def _fourier_eval(self, x):
        x = np.asarray(x, dtype=float)
        k = np.arange(1, len(self.A) + 1)
        t = 2.0 * np.pi * np.multiply.outer(x, k)
        val = (self.omega_fourier + x
               + np.sin(t) @ self.A + (1.0 - np.cos(t)) @ self.B)
        return val if val.shape else float(val)

    def deriv(self, x):
        if self.exact_deriv is not None:
            return self.exact_deriv(x)
        x = np.asarray(x, dtype=float)
        k = np.arange(1, len(self.A) + 1)
        t = 2.0 * np.pi * np.multiply.outer(x, k)
        val = 1.0 + np.cos(t) @ (2.0 * np.pi * k * self.A) \
            + np.sin(t) @ (2.0 * np.pi * k * self.B)
        return val if val.shape else float(val)

    def orbit(self, x0, n):
        out = np.empty(n)
        kernels.orbit_fill(self.omega_fourier, self.A, self.B, x0, n, out)
        return out

    def delta_count(self, arc_hi, x0, n):
        return kernels.orbit_delta_count(self.omega_fourier, self.A, self.B,
                                         arc_hi, x0, n)


def _fourier_lift_data(samples):
    """Fourier data (omega, A, B) of a lift from samples of F(x) - x on a
    uniform grid over one period."""
    N = len(samples)
    F = np.fft.rfft(samples) / N
    alpha = 2.0 * F[1:].real
    beta = -2.0 * F[1:].imag
    if N % 2 == 0:
        alpha[-1] *= 0.5
        beta[-1] *= 0.5
    omega = F[0].real + alpha.sum()
    return omega, beta.copy(), -alpha


def trig_lift(params):
    """Lift with derivative K*(1-cos2pix)(1-cos2pi(x-c))*(1+beta*(1-cos2pi(x-phase))),
    K normalizing the mean to 1.  Critical points exactly {0, c}."""
    c = params.c
    if not COLLISION_MARGIN < c < 1.0 - COLLISION_MARGIN:
        warnings.warn("critical point c=%g within %g of 0 mod 1; "
                      "critical orbits may collide" % (c, COLLISION_MARGIN))
    if params.beta <= -0.5:
        raise ValueError("shape factor must stay positive: beta > -1/2")
    # the derivative is a trig polynomial of degree <= 3, so a 16-point
    # FFT recovers it exactly
    N = 16
    x = np.arange(N) / N
    P = (1.0 - np.cos(2 * np.pi * x)) * (1.0 - np.cos(2 * np.pi * (x - c)))
    if params.beta != 0.0:
        P = P * (1.0 + params.beta * (1.0 - np.cos(2 * np.pi * (x - params.phase))))
    F = np.fft.rfft(P) / N
    alpha0 = F[0].real
    k = np.arange(1, N // 2 + 1)
    alpha = 2.0 * F[1:].real
    beta = -2.0 * F[1:].imag
    alpha[-1] *= 0.5
    # integrating P/alpha0 term by term: cos components become sin (A),
    # sin components become 1 - cos (B)
    A = alpha / (alpha0 * 2 * np.pi * k)
    B = beta / (alpha0 * 2 * np.pi * k)
    # trim exact zeros beyond the true degree
    nz = max(np.nonzero(np.abs(A) + np.abs(B) > 1e-15)[0], default=0)
    A = A[:nz + 1]
    B = B[:nz + 1]
    return CircleLift("trig", params, (0.0, c), params.omega, A, B)


def _blaschke_log_deriv(z, p, q):
    """z B'(z)/B(z) for the Blaschke product."""
    pb = np.conjugate(p)
    qb = np.conjugate(q)
    return (3.0 + z / (z - p) + pb * z / (1.0 - pb * z)
            + z / (z - q) + qb * z / (1.0 - qb * z))


def _blaschke_angular_deriv(x, p, q):
    z = np.exp(2j * np.pi * np.asarray(x, dtype=float))
    return np.real(_blaschke_log_deriv(z, p, q))


def _blaschke_lift_raw(x, t, p, q):
    """Continuous lift of (1/2pi) arg B, written so every arg call stays on
    the principal branch: (z-p)/(1-pbar z) = (-p/ (-pbar z)) * (1-z/p)/(1-1/(pbar z))
    and both small-modulus terms keep positive real part plus bounded arg."""
    x = np.asarray(x, dtype=float)
    z = np.exp(2j * np.pi * x)
    out = t + 3.0 * x
    for w in (p, q):
        wb = np.conjugate(w)
        out = out + (np.angle(1.0 - z / w) - np.angle(1.0 - 1.0 / (wb * z))
                     + cmath.phase(-w) - cmath.phase(-wb)) / (2 * np.pi) - x
    return out


def blaschke_lift(params, surrogate_harmonics=256, validate=True):
    """Lift of the circle restriction of the Blaschke product.

    Validates |B| = 1 on probes and monotonicity of the lift; locates the
    two double zeros of the angular derivative and rotates coordinates so
    the first sits at 0.  The returned lift carries a Fourier surrogate
    for the fast orbit kernels.
    """
    t, p, q = params.t, complex(params.p), complex(params.q)
    if abs(p) <= 1.0 or abs(q) <= 1.0:
        raise ValueError("Blaschke zeros must lie outside the closed disk")

    probes = np.arange(256) / 256.0
    z = np.exp(2j * np.pi * probes)

    def bval(zz):
        return (np.exp(2j * np.pi * t) * zz**3
                * (zz - p) / (1.0 - np.conjugate(p) * zz)
                * (zz - q) / (1.0 - np.conjugate(q) * zz))

    if validate:
        merr = np.max(np.abs(np.abs(bval(z)) - 1.0))
        if merr > 1e-12:
            raise ValidationFailure("circle not preserved: modulus error %g" % merr)

    grid = np.arange(4096) / 4096.0
    dF = _blaschke_angular_deriv(grid, p, q)
    if validate and dF.min() < -1e-8:
        bad = grid[dF < -1e-8]
        raise ValidationFailure(
            "angular derivative negative near x in [%g, %g]: not a "
            "homeomorphism" % (bad.min(), bad.max()))

    crit = _angular_minima(p, q)
    if validate:
        if len(crit) != 2:
            raise ValidationFailure(
                "expected two double zeros of the angular derivative, "
                "found %d" % len(crit))
        for xc, val in crit:
            if val > 1e-8:
                raise ValidationFailure(
                    "angular derivative minimum %g at x=%g is not a zero"
                    % (val, xc))

    # rotate so the first critical point sits at 0
    if crit:
        x0 = crit[0][0]
        c = (crit[-1][0] - x0) % 1.0 if len(crit) > 1 else 0.5
    else:
        x0, c = 0.0, 0.5

    def F(x):
        return _blaschke_lift_raw(np.asarray(x, dtype=float) + x0, t, p, q) - x0

    def dFx(x):
        return _blaschke_angular_deriv(np.asarray(x, dtype=float) + x0, p, q)

    N = surrogate_harmonics * 2
    xs = np.arange(N) / N
    omega, A, B = _fourier_lift_data(F(xs) - xs)
    # coefficients decay like |1/p|^k; drop the negligible tail so the
    # orbit kernel does not churn through dead harmonics
    mag = np.abs(A) + np.abs(B)
    keep = np.nonzero(mag > 1e-16 * max(1.0, mag.max()))[0]
    if len(keep):
        A = A[:keep[-1] + 1]
        B = B[:keep[-1] + 1]
    check = np.arange(37) / 37.0 + 0.001
    lift = CircleLift("blaschke", params, (0.0, c), omega, A, B,
                      exact_eval=F, exact_deriv=dFx)
    lift.surrogate_err = float(np.max(np.abs(lift._fourier_eval(check) - F(check))))
    return lift


def _angular_minima(p, q, grid_n=4096, tol_cluster=1e-3):
    """Local minima of the angular derivative, refined by golden-section
    descent; returns [(x, min_value), ...] for dips below a loose cap."""
    grid = np.arange(grid_n) / grid_n
    dF = _blaschke_angular_deriv(grid, p, q)
    mins = []
    for i in range(grid_n):
        a, b = dF[i - 1], dF[i]
        cnext = dF[(i + 1) % grid_n]
        if b <= a and b <= cnext and b < 0.5:
            lo = grid[i] - 1.0 / grid_n
            hi = grid[i] + 1.0 / grid_n
            for _ in range(60):
                m1 = lo + 0.382 * (hi - lo)
                m2 = hi - 0.382 * (hi - lo)
                if _blaschke_angular_deriv(m1, p, q) < _blaschke_angular_deriv(m2, p, q):
                    hi = m2
                else:
                    lo = m1
            xm = 0.5 * (lo + hi) % 1.0
            mins.append((xm, float(_blaschke_angular_deriv(xm, p, q))))
    mins.sort()
    merged = []
    for xm, v in mins:
        if merged and abs(xm - merged[-1][0]) < tol_cluster:
            if v < merged[-1][1]:
                merged[-1] = (xm, v)
        else:
            merged.append((xm, v))
    if len(merged) > 1 and abs(merged[0][0] + 1.0 - merged[-1][0]) < tol_cluster:
        if merged[-1][1] < merged[0][1]:
            merged[0] = merged[-1]
        merged.pop()
    return merged


def _rho_bracket(lift, orbit_len):
    """Certified rational bracket lo < rho < hi from orbit records.

    Each time the orbit of 0 sets a new one-sided nearness record at time
    t with lift value P + f, it pins rho: a right-side record (small f)
    gives rho > P/t, a left-side record gives rho < (P+1)/t.  These bounds
    need no metric assumptions, only the circular order.  Also returns the
    raw record list [(t, f), ...].
    """
    orbit = lift.orbit(0.0, orbit_len)
    frac = orbit - np.floor(orbit)
    cmin = np.minimum.accumulate(frac)
    cmax = np.maximum.accumulate(frac)
    new_min = frac < np.concatenate(([2.0], cmin[:-1]))
    new_max = frac > np.concatenate(([-1.0], cmax[:-1]))
    idx = np.nonzero(new_min | new_max)[0]
    # records stop mattering once the orbit returns within float noise
    dead = np.nonzero(np.minimum(frac[idx], 1.0 - frac[idx]) < 1e-12)[0]
    if len(dead):
        idx = idx[:dead[0] + 1]
    lo = Fraction(0, 1)
    hi = Fraction(1, 1)
    recs = []
    for j in idx:
        f = frac[j]
        t = int(j) + 1
        P = int(math.floor(orbit[j]))
        if new_min[j]:
            b = Fraction(P, t)
            if b > lo:
                lo = b
        if new_max[j]:
            b = Fraction(P + 1, t)
            if b < hi:
                hi = b
        recs.append((t, float(f)))
    if recs:
        t, f = recs[-1]
        if min(f, 1.0 - f) < 1e-12:
            # orbit returned to 0 within float noise: rho is exactly P/t
            P = int(math.floor(orbit[t - 1])) + (1 if f > 0.5 else 0)
            lo = hi = Fraction(P, t)
    return lo, hi, recs


def _bracket_digits(lo, hi, depth):
    """Continued fraction digits certain for every x in (lo, hi), by exact
    interval arithmetic on the Gauss map.

    A collapsed bracket (lo == hi) is an exact rational hit and yields its
    full digit string.  A slightly inverted bracket means the orbit locked
    onto a plateau within float resolution; fall back to the digits of the
    simplest rational in the interval, dropping the last, ambiguous one.
    """
    if lo >= hi and 0 < hi and lo < 1:
        exact = lo == hi
        r = lo if exact else _simplest_between(hi, lo)
        digits = []
        x = r
        while x > 0 and len(digits) < depth + 1:
            inv = 1 / x
            a = int(inv)
            digits.append(a)
            x = inv - a
        return digits if exact else digits[:-1]
    digits = []
    while len(digits) < depth:
        if lo <= 0 or hi <= 0 or lo >= hi:
            break
        inv_lo, inv_hi = 1 / hi, 1 / lo
        a_min = int(inv_lo)
        a_max = int(inv_hi) if inv_hi != int(inv_hi) else int(inv_hi) - 1
        if a_min != a_max:
            break
        digits.append(a_min)
        lo, hi = inv_lo - a_min, inv_hi - a_min
    return digits


def _simplest_between(a, b):
    """Smallest-denominator rational in [a, b] (Stern-Brocot descent)."""
    if a == b:
        return a
    ia = a.numerator // a.denominator
    if a == ia:
        return a
    ib = b.numerator // b.denominator
    if ib >= ia + 1:
        return Fraction(ia + 1)
    return ia + 1 / _simplest_between(1 / (b - ib), 1 / (a - ia))


def rotation_number(lift, method="iterate", depth=12, orbit_len=200000):
    """Rotation number with its continued fraction.

    iterate: orbit records give a certified rational bracket around rho
    (width about 1/(t t') for the deepest records); digits are whatever
    the bracket pins down, the value is the bracket midpoint.  heights:
    repeated pair renormalization heights.
    """
    if method == "heights":
        from . import pairs as pairs_mod
        return pairs_mod.rotation_number_by_heights(lift, depth)
    lo, hi, _ = _rho_bracket(lift, orbit_len)
    digits = _bracket_digits(lo, hi, depth)
    if not digits:
        raise RationalRotationError(
            "bracket (%s, %s) pins no continued fraction digits; rotation "
            "number is rational or unresolved at orbit length %d"
            % (lo, hi, orbit_len))
    value = float((lo + hi) / 2)
    cf = ContinuedFraction(preperiod=tuple(digits), period=(),
                           depth_truncated=len(digits) < depth)
    return value, cf


def closest_returns(lift, orbit_len=200000, depth=None):
    """Closest returns (q_k, F^{q_k}(0) mod 1) of the orbit of 0.

    The record scan yields all one-sided best approximation times; the
    certified digit bracket selects the true convergent denominators q_k
    among them.  Returns alternate sides of 0 by construction.
    """
    lo, hi, recs = _rho_bracket(lift, orbit_len)
    digits = _bracket_digits(lo, hi, depth if depth is not None else 64)
    if not digits:
        raise RationalRotationError(
            "no continued fraction digits resolved; orbit of 0 appears "
            "periodic")
    cf = ContinuedFraction(preperiod=tuple(digits), depth_truncated=True)
    qs = []
    for k in range(len(digits) + 1):
        _, q = convergents(cf, k)
        if not qs or q != qs[-1]:
            qs.append(q)
    by_time = dict(recs)
    return [(q, by_time[q]) for q in qs if q in by_time]


def signature_delta(lift, n_orbit=10**6):
    """Birkhoff estimate of delta: frequency of the orbit of 0 in [0, c).

    Returns (delta_hat, err) with err the 3/q_K closest-return heuristic.
    """
    c = lift.crit[1]
    _, count = lift.delta_count(c, 0.0, n_orbit)
    lo, hi, recs = _rho_bracket(lift, min(n_orbit, 400000))
    if lo == hi and lo.denominator <= 1000:
        raise RationalRotationError(
            "rotation number locked at %s; delta is undefined" % (lo,))
    q_K = recs[-1][0]
    return count / n_orbit, 3.0 / q_K


def map_signature(lift, n_orbit=10**6, depth=12):
    """Measured Signature (cf of rho, Birkhoff delta) plus the float
    rotation number and the delta error bar."""
    value, cf = rotation_number(lift, depth=depth)
    delta, err = signature_delta(lift, n_orbit)
    return Signature(cf, delta), value, err


def _target_rho_value(target):
    rho = target.rho
    if isinstance(rho, ContinuedFraction):
        # walk down until the convergent resolves rho to double precision
        # (error < 1/q_k^2); large digits get there in a few steps, so cap
        # the denominator rather than the depth to avoid 64-bit overflow
        p = q = None
        for k in range(1, min(rho.known_depth, 40) + 1):
            pk, qk = convergents(rho, k)
            p, q = pk, qk
            if q > 2 ** 32:
                break
        return p / q
    return float(rho)


def dynamical_partition(lift, n, depth=None):
    """Level-n partition: q_{n+1} iterates of I_n and q_n iterates of
    I_{n+1}, where I_n is the arc between 0 and F^{q_n}(0).

    Returns a list of (lo, hi, label, index) with lo < hi <= lo + 1 on the
    unrolled circle; validates disjoint interiors and total length.
    """
    from .errors import PartitionIntegrityError
    _, cf = rotation_number(lift, depth=(depth or n + 3))
    _, qn = convergents(cf, n)
    _, qn1 = convergents(cf, n + 1)
    m = qn + qn1
    orbit = np.concatenate([[0.0], lift.orbit(0.0, m - 1)])
    pts = orbit - np.floor(orbit)
    if m == 2:
        # level 0 with a_0 = 1: the two arcs between 0 and F(0) are the
        # whole partition; I_0 sits on the return side of F(0)
        f = float(pts[1])
        if f >= 0.5:
            return [(f, 1.0, "I_n", 0), (0.0, f, "I_n+1", 0)]
        return [(0.0, f, "I_n", 0), (f, 1.0, "I_n+1", 0)]
    order = np.argsort(pts)
    succ = {}
    for a, b in zip(order, np.roll(order, -1)):
        succ[int(a)] = int(b)
    elements = []
    for i in range(qn1):
        elements.append((i, i + qn, "I_n", i))
    for j in range(qn):
        elements.append((j, j + qn1, "I_n+1", j))
    out = []
    for a, b, label, idx in elements:
        if succ[a] == b:
            lo = pts[a]
            hi = pts[b] if pts[b] > pts[a] else pts[b] + 1.0
        elif succ[b] == a:
            lo = pts[b]
            hi = pts[a] if pts[a] > pts[b] else pts[a] + 1.0
        else:
            raise PartitionIntegrityError(
                "element (%d,%d) endpoints are not adjacent orbit points"
                % (a, b))
        out.append((float(lo), float(hi), label, idx))
    total = sum(hi - lo for lo, hi, _, _ in out)
    if abs(total - 1.0) > 1e-9:
        raise PartitionIntegrityError("partition lengths sum to %.12f" % total)
    if len(out) != m:
        raise PartitionIntegrityError("expected %d elements, built %d"
                                      % (m, len(out)))
    return out


def _measure_rho(lift, depth, orbit_len):
    try:
        value, cf = rotation_number(lift, depth=depth, orbit_len=orbit_len)
        return value, cf
    except (NumericalError, RationalRotationError):
        # fall back to the crude average near rational parameters
        orbit = lift.orbit(0.0, orbit_len)
        return orbit[-1] / orbit_len, None


def tune_rho(make_lift, target_rho, lo=0.0, hi=1.0, tol=1e-13,
             depth=14, orbit_len=200000):
    """Monotone bisection on the one-parameter family make_lift(s) until
    the measured rotation number brackets target_rho to tol."""
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        val, _ = _measure_rho(make_lift(mid), depth, orbit_len)
        if val < target_rho:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def tune_to_signature(family, target, depth=10, orbit_len=200000,
                      delta_orbit=400000, outer_iters=24, shape=None):
    """Tune family parameters to a target Signature.

    Nested solve: inner monotone bisection on omega (trig) or t (Blaschke)
    for rho, outer secant on c (or arg q) for delta.  Returns params whose
    measured digits match the target to `depth` and whose Birkhoff delta
    sits within its own 3/q_K error bar.
    """
    if family == "trig":
        return _tune_trig(target, depth, orbit_len, delta_orbit,
                          outer_iters, shape or {})
    if family == "blaschke":
        return blaschke_solve_signature(_target_rho_value(target), target.delta,
                                        depth=depth, orbit_len=orbit_len,
                                        delta_orbit=delta_orbit,
                                        outer_iters=outer_iters)
    raise ValueError("unknown family %r" % (family,))


def _tune_trig(target, depth, orbit_len, delta_orbit, outer_iters, shape):
    beta = shape.get("beta", 0.0)
    phase = shape.get("phase", 0.0)
    rho_val = _target_rho_value(target)
    target_digits = tuple(target_cf_digits(target, depth))

    def solved_lift(c):
        omega = tune_rho(
            lambda w: trig_lift(TrigParams(w, c, beta, phase)),
            rho_val, depth=depth + 2, orbit_len=orbit_len)
        return trig_lift(TrigParams(omega, c, beta, phase))

    def delta_gap(c):
        lift = solved_lift(c)
        d, err = signature_delta(lift, delta_orbit)
        return d - target.delta, lift, err

    lo_c, hi_c = 0.05, 0.95
    glo, lift_lo, _ = delta_gap(lo_c)
    ghi, lift_hi, _ = delta_gap(hi_c)
    if glo > 0 or ghi < 0:
        raise SolverFailure("outer", "delta target %.6f not bracketed by "
                            "c in [%.2f, %.2f]" % (target.delta, lo_c, hi_c))
    best = None
    for _ in range(outer_iters):
        mid = 0.5 * (lo_c + hi_c)
        g, lift, err = delta_gap(mid)
        best = (mid, lift, g, err)
        if abs(g) < 0.3 * err:
            break
        if g < 0:
            lo_c = mid
        else:
            hi_c = mid
    c, lift, gap, err = best
    if abs(gap) > err:
        raise SolverFailure("outer", "delta gap %.3g exceeds error bar %.3g "
                            "after %d iterations" % (gap, err, outer_iters))
    _, cf = rotation_number(lift, depth=depth)
    got = tuple(cf.digits(depth))
    if got != target_digits:
        raise SolverFailure("inner", "digit mismatch: wanted %r got %r"
                            % (target_digits, got))
    return lift.params


def target_cf_digits(target, depth):
    """Digits of the target rotation number; accepts a ContinuedFraction
    or a float in the rho slot."""
    from .rotation import real_to_cf
    if isinstance(target.rho, ContinuedFraction):
        return list(target.rho.digits(depth))
    return list(real_to_cf(target.rho, depth).digits(depth))


def blaschke_solve_signature(rho, delta, depth=8, orbit_len=200000,
                             delta_orbit=400000, outer_iters=14,
                             arg_p=0.25, arg_q0=-0.25):
    """Staged solve for Blaschke parameters with signature (rho, delta).

    (i) inner Newton on (|p|, |q|) forces the two angular-derivative dips
    to double zeros; (ii) bisection on t matches rho (monotone); (iii)
    secant on arg q matches delta.  Raises SolverFailure naming the stage
    that gave out.
    """

    def solve_t(ap, aq):
        rp, rq = _inner_double_zero(ap, aq)
        p = rp * cmath.exp(2j * cmath.pi * ap)
        q = rq * cmath.exp(2j * cmath.pi * aq)
        # t shifts the lift by a constant, so tune on the surrogate of the
        # t=0 lift instead of rebuilding per step
        base = blaschke_lift(BlaschkeParams(0.0, p, q), validate=False)

        def at_t(tt):
            return CircleLift("blaschke", None, base.crit,
                              base.omega_fourier + tt, base.A, base.B)

        t = tune_rho(at_t, rho, depth=depth, orbit_len=orbit_len)
        return BlaschkeParams(t % 1.0, p, q)

    def measured_delta(params):
        lift = blaschke_lift(params, validate=False)
        if lift.surrogate_err > 1e-10:
            lift = blaschke_lift(params, surrogate_harmonics=1024,
                                 validate=False)
        d, err = signature_delta(lift, delta_orbit)
        return d, err, lift

    aq = arg_q0
    params = solve_t(arg_p, aq)
    d, err, _ = measured_delta(params)
    g_prev, aq_prev = d - delta, aq
    aq = aq + (0.05 if g_prev < 0 else -0.05)
    for _ in range(outer_iters):
        params = solve_t(arg_p, aq)
        d, err, _ = measured_delta(params)
        g = d - delta
        if abs(g) < max(err, 5e-4):
            return params
        if abs(g - g_prev) < 1e-14:
            raise SolverFailure("outer", "secant stalled at delta gap %.3g" % g)
        aq, aq_prev, g_prev = aq - g * (aq - aq_prev) / (g - g_prev), aq, g
    raise SolverFailure("outer", "delta gap %.3g after %d secant steps"
                        % (g, outer_iters))


def _inner_double_zero(ap, aq, r0=1.6, tol=1e-10, iters=40):
    """Newton on (|p|, |q|) driving the two lowest minima of the angular
    derivative to zero (double critical points on the circle)."""

    def dips(rp, rq):
        p = rp * cmath.exp(2j * cmath.pi * ap)
        q = rq * cmath.exp(2j * cmath.pi * aq)
        mins = _angular_minima(p, q)
        mins = sorted(mins, key=lambda m: m[1])[:2]
        if len(mins) < 2:
            # one merged dip: treat as doubly counted
            mins = mins * 2
        return np.array([m[1] for m in sorted(mins)])

    v = np.array([r0, r0])
    for _ in range(iters):
        f = dips(v[0], v[1])
        if np.max(np.abs(f)) < tol:
            return float(v[0]), float(v[1])
        h = 1e-6
        J = np.empty((2, 2))
        for j in range(2):
            vp = v.copy()
            vp[j] += h
            J[:, j] = (dips(vp[0], vp[1]) - f) / h
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError:
            raise SolverFailure("inner", "singular Jacobian in double-zero "
                                "solve at (|p|,|q|)=(%g,%g)" % (v[0], v[1]))
        nv = v - step
        nv = np.clip(nv, 1.01, 25.0)
        v = nv
    raise SolverFailure("inner", "double-zero residual %.3g after %d Newton "
                        "steps" % (np.max(np.abs(f)), iters))
