"""Commuting pairs of interval maps built from circle-map first returns.

A pair (eta, xi) stores the two return branches around the critical point
0 with the sign convention eta(0) < 0 < xi(0); eta lives on [0, xi(0)]
and xi on [eta(0), 0].  Pairs are only ever constructed from iterates of
one circle lift (or from renormalizing such a pair), so the commutation
property holds by construction and its residual is a pure numerics
monitor.

Renormalization: with a the height, the longer branch of the next level
is eta^a o xi and the shorter one is eta restricted to [0, eta^a(xi(0))];
the new pair is conjugated by x -> -x to restore the sign convention
(successive levels alternate orientation, exactly as the extracted pairs
at levels n and n+1 do) and rescaled so that xi(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from . import config, kernels
from .chains import (
    Q,
    MapChain,
    chain_canonicalize,
    chain_compose,
    chain_critical_points,
    chain_derivative_at,
    chain_eval,
    chain_flip,
    chain_kernel_arrays,
    chain_rescale,
    chain_restrict,
    chain_translate,
    make_chain,
)
from .chebseries import Interval, cheb_fit
from .errors import (
    ChainIntegrityError,
    CollisionError,
    DepthError,
    DomainError,
    NonRenormalizableError,
    NumericalError,
    RationalRotationError,
    StructuralError,
)
from .rotation import ContinuedFraction, Signature, convergents


@dataclass(frozen=True)
class CommutingPair:
    eta: MapChain
    xi: MapChain
    provenance: tuple = ()

    @property
    def eta0(self) -> float:
        return chain_eval(self.eta, 0.0)

    @property
    def xi0(self) -> float:
        return chain_eval(self.xi, 0.0)


@dataclass(frozen=True)
class Height:
    """Number of eta-steps before the orbit of xi(0) crosses 0."""
    value: int | None   # None marks an infinite height (eta has a fixed point)

    @property
    def is_infinite(self) -> bool:
        return self.value is None


@dataclass(frozen=True)
class PairReport:
    ok: bool
    eta0: float
    xi0: float
    commutation_residual: float
    commutation_tol: float
    cross_boundary: bool
    eta_cubic_at_zero: bool
    xi_cubic_at_zero: bool
    failures: tuple


def _iterate(lift, x, m):
    """F^m on a scalar or array of lift values."""
    y = np.asarray(x, dtype=float)
    for _ in range(m):
        y = lift(y)
    return y


def _step_criticals(lift, lo, hi, tol):
    """All critical translates inside the closure of [lo, hi], ascending.

    Two distinct criticals closer than 1e-6 of the interval are a genuine
    collision of the critical orbits: the local cube-root factors stop
    being resolvable and the map degenerates toward a single order-9
    point.
    """
    hits = []
    for base in (0.0, lift.crit[1]):
        for k in range(math.floor(lo - base) - 1, math.ceil(hi - base) + 2):
            x0 = base + k
            if lo - tol <= x0 <= hi + tol:
                hits.append(x0)
    hits.sort()
    for a, b in zip(hits, hits[1:]):
        if b - a < 1e-6 * max(hi - lo, 1e-300):
            raise CollisionError(
                "critical points %.9g and %.9g inside one return interval "
                "are %.3e apart; the critical orbits collide at this depth"
                % (a, b, b - a))
    return hits


def _triple_zero_quotient(fn, J: Interval, x0: float, degree: int):
    """Callable for (fn(y) - fn(x0)) / (y - x0)^3 on J, plus fn(x0).

    The quotient is obtained by dividing the fitted series of fn - fn(x0)
    by (y - x0) three times, which avoids the cancellation of the direct
    ratio near x0 entirely.  When fn carries its own Fourier data the
    sampling and division run in extended precision: the triple division
    amplifies the sample noise floor by ~1e7, so double-precision samples
    cap the quotient near 1e-9 while exact coefficients recover ~1e-14.
    """
    if getattr(fn, "exact_eval", None) is None \
            and hasattr(fn, "omega_fourier"):
        return _triple_zero_quotient_mp(fn, J, x0, degree)
    v0 = float(fn(x0))
    fit = cheb_fit(lambda y: fn(y) - v0, J, max(degree, 16))
    scale = max(float(np.max(np.abs(fit.coeffs))), 1e-300)
    # chop the rounding-noise tail: each division by (y - x0) amplifies
    # coefficient noise by O(degree^2), so the series must be as short as
    # the function allows before deflating
    keep = np.nonzero(np.abs(fit.coeffs) > 1e-13 * scale)[0]
    c = fit.coeffs[:max(int(keep[-1]), 5) + 1]
    t0 = (x0 - J.mid) / J.half
    for _ in range(3):
        c, rem = C.chebdiv(c, np.array([-t0, 1.0]))
        if float(np.max(np.abs(rem))) > 1e-7 * scale:
            raise NumericalError(
                "cube-root deflation at x0=%.6g lost precision "
                "(remainder %.3e)" % (x0, float(np.max(np.abs(rem)))))
    half3 = J.half ** 3

    def quot(y):
        t = (np.asarray(y, dtype=float) - J.mid) / J.half
        return C.chebval(t, c) / half3

    return quot, v0


def _triple_zero_quotient_mp(lift, J: Interval, x0: float, degree: int):
    """Extended-precision variant working from the lift's Fourier sum."""
    from mpmath import mp

    with mp.workdps(40):
        two_pi = 2 * mp.pi

        def feval(y):
            val = mp.mpf(lift.omega_fourier) + y
            for k in range(len(lift.A)):
                t = two_pi * (k + 1) * y
                val += lift.A[k] * mp.sin(t) + lift.B[k] * (1 - mp.cos(t))
            return val

        mid, half = mp.mpf(J.mid), mp.mpf(J.half)
        v0 = feval(mp.mpf(x0))
        N = max(degree, 16) + 1
        theta = [mp.pi * (i + mp.mpf("0.5")) / N for i in range(N)]
        vals = [feval(mid + half * mp.cos(th)) - v0 for th in theta]
        coeffs = []
        for j in range(N):
            acc = mp.fsum(v * mp.cos(j * th) for v, th in zip(vals, theta))
            coeffs.append(acc / N if j == 0 else 2 * acc / N)
        scale = max(abs(cc) for cc in coeffs)
        while len(coeffs) > 5 and abs(coeffs[-1]) < 1e-30 * scale:
            coeffs.pop()
        c = np.array(coeffs, dtype=object)
        t0 = (mp.mpf(x0) - mid) / half
        for _ in range(3):
            c, rem = C.chebdiv(c, np.array([-t0, mp.mpf(1)], dtype=object))
            if max(abs(r) for r in rem) > 1e-7 * scale:
                raise NumericalError(
                    "cube-root deflation at x0=%.6g lost precision "
                    "(remainder %.3e)" % (x0, float(max(abs(r) for r in rem))))
        c = np.array([float(cc) for cc in c])
        half3 = J.half ** 3
        v0 = float(v0)

    def quot(y):
        t = (np.asarray(y, dtype=float) - J.mid) / J.half
        return C.chebval(t, c) / half3

    return quot, v0


def _deflate_step(lift, J: Interval, crits, degree):
    """Peel the criticals of F on one step interval J.

    Writes F|J = (w -> w + out_shift) o q o (+v_k) o q o ... o q o inner
    where inner is a critical-free factor.  The outermost factor is
    s_1(y) = (y - x_1) (F(y) - F(x_1))^{1/3} / (y - x_1); each further
    critical x_k peels off s_k with s_k^3 = s_{k-1} - s_{k-1}(x_k).  The
    cubic-difference identity

        s_{k-1}(y) - s_{k-1}(x_k)
            = (F(y) - F(x_k)) / prod_{j<k} (s_j^2 + s_j s_j(x_k) + s_j(x_k)^2)

    lets every triple-zero quotient be deflated from a series of the
    original lift, so fit noise never feeds back into a division.
    Returns (inner, mid, out_shift) where mid lists, inner-to-outer, the
    (shift constant, incoming domain) of the affine stages between nodes.
    """
    order = sorted(crits, reverse=True)
    factors = []        # s_1, s_2, ... outer-to-inner
    consts = []         # v_k = s_{k-1}(x_k) for k >= 2
    out_shift = None
    for x0 in order:
        quot, v0 = _triple_zero_quotient(lift, J, x0, degree)
        if not factors:
            out_shift = v0

            def s(y, x0=x0, quot=quot):
                y = np.asarray(y, dtype=float)
                g = quot(y)
                if np.any(g <= 0.0):
                    raise NumericalError(
                        "cube-root quotient non-positive near "
                        "x0=%.6g" % x0)
                return (y - x0) * np.cbrt(g)
        else:
            prev = list(factors)
            at_x0 = [float(f(x0)) for f in prev]
            consts.append(at_x0[-1])

            def s(y, x0=x0, quot=quot, prev=prev, at_x0=at_x0):
                y = np.asarray(y, dtype=float)
                den = np.ones_like(y)
                for f, u0 in zip(prev, at_x0):
                    u = f(y)
                    den = den * (u * u + u * u0 + u0 * u0)
                g = quot(y) / den
                if np.any(g <= 0.0):
                    raise NumericalError(
                        "cube-root quotient non-positive near "
                        "x0=%.6g" % x0)
                return (y - x0) * np.cbrt(g)
        factors.append(s)
    mid = []
    for k in range(len(factors) - 1, 0, -1):
        t, v = factors[k - 1], consts[k - 1]
        mid.append((v, Interval(float(t(J.lo)) - v, float(t(J.hi)) - v)))
    return factors[-1], mid, out_shift


def _build_iterate_chain(lift, steps: int, p_shift: int, domain: Interval,
                         degree: int) -> MapChain:
    """MapChain for x -> F^steps(x) - p_shift on `domain`.

    Walks J_j = F^j(domain); steps whose interval closure meets critical
    translates contribute cube nodes via local cube-root factors, and
    every smooth run in between is fitted as one diffeo by sampling the
    iterated lift directly (no accumulation of composition error).
    """
    from .chebseries import affine_function_piece

    ends = np.array([domain.lo, domain.hi])
    walk = [ends.copy()]
    for _ in range(steps):
        ends = np.asarray(lift(ends), dtype=float)
        walk.append(ends.copy())
    passages = []
    for j in range(steps):
        lo, hi = walk[j]
        tol = 1e-12 + 1e-9 * (hi - lo)
        cs = _step_criticals(lift, lo, hi, tol)
        if cs:
            passages.append((j, cs))

    if not passages:
        piece = cheb_fit(lambda x: _iterate(lift, x, steps) - p_shift,
                         domain, degree)
        return make_chain([piece])

    stages = []
    prev_j = -1
    prev_shift = 0.0    # chart value v corresponds to lift point v + shift
    # chart endpoints are propagated through the fitted stages themselves so
    # that successive piece domains match to rounding, not just to fit error
    cur = (domain.lo, domain.hi)

    def push(piece):
        stages.append(piece)
        a, b = piece.endpoint_values()
        return (float(a), float(b))

    for (j, cs) in passages:
        J = Interval(walk[j][0], walk[j][1])
        inner, mid, out_shift = _deflate_step(lift, J, cs, degree)
        if prev_j < 0:
            m = j
            sh = 0.0
        else:
            m = j - prev_j - 1
            sh = prev_shift
        cur = push(cheb_fit(
            lambda v, inner=inner, m=m, sh=sh:
            inner(_iterate(lift, np.asarray(v) + sh, m)),
            Interval(cur[0], cur[1]), degree))
        stages.append(Q)
        cur = (cur[0] ** 3, cur[1] ** 3)
        for const, _in_dom in mid:
            cur = push(affine_function_piece(Interval(cur[0], cur[1]),
                                             1.0, const))
            stages.append(Q)
            cur = (cur[0] ** 3, cur[1] ** 3)
        prev_j, prev_shift = j, out_shift
    m = steps - prev_j - 1
    push(cheb_fit(
        lambda w, m=m, sh=prev_shift:
        _iterate(lift, np.asarray(w) + sh, m) - p_shift,
        Interval(cur[0], cur[1]), degree))
    return make_chain(stages)


def extract_pair(lift, n: int, degree: int = config.WORKING_DEGREE,
                 depth: int | None = None) -> CommutingPair:
    """The level-n return pair of the orbit of 0.

    The long branch iterates the lift q_{n+1} times on the arc between 0
    and F^{q_n}(0), the short one q_n times on the next arc; both are
    translated back by the convergent numerators.  At odd levels the pair
    is conjugated by x -> -x so that eta(0) < 0 < xi(0) always holds.
    """
    from .families import rotation_number

    _, cf = rotation_number(lift, depth=depth if depth is not None else n + 4)
    if cf.known_depth < n + 2:
        raise DepthError(
            "need %d continued-fraction digits for level %d, resolved %d"
            % (n + 2, n, cf.known_depth))
    p_n, q_n = convergents(cf, n)
    p_n1, q_n1 = convergents(cf, n + 1)
    x_n = float(_iterate(lift, 0.0, q_n)) - p_n
    x_n1 = float(_iterate(lift, 0.0, q_n1)) - p_n1
    I_n = Interval(min(0.0, x_n), max(0.0, x_n))
    I_n1 = Interval(min(0.0, x_n1), max(0.0, x_n1))
    eta = _build_iterate_chain(lift, q_n1, p_n1, I_n, degree)
    xi = _build_iterate_chain(lift, q_n, p_n, I_n1, degree)
    flipped = x_n < 0.0
    if flipped:
        eta = chain_flip(eta)
        xi = chain_flip(xi)
    eta = chain_canonicalize(eta, degree=degree)
    xi = chain_canonicalize(xi, degree=degree)
    prov = (("family", lift.family_tag), ("params", lift.params),
            ("level", n), ("flipped", flipped))
    return CommutingPair(eta=eta, xi=xi, provenance=prov)


def pair_validate(p: CommutingPair, probes: int = 33) -> PairReport:
    """Report on the defining pair properties; never raises.

    The commutation residual compares eta o xi with xi o eta on a small
    symmetric window around 0 (the only region where both composites are
    defined without leaving the stored domains by more than a few percent,
    where Chebyshev continuation is still trustworthy); the window always
    includes the endpoint identity eta(xi(0)) = xi(eta(0)) through the
    composite values at x = 0.
    """
    failures = []
    try:
        eta0 = p.eta0
        xi0 = p.xi0
    except ChainIntegrityError as exc:
        return PairReport(False, math.nan, math.nan, math.inf, 0.0, False,
                          False, False, (str(exc),))
    if not eta0 < 0.0 < xi0:
        failures.append("sign convention eta(0) < 0 < xi(0) violated: "
                        "eta(0)=%.6g, xi(0)=%.6g" % (eta0, xi0))

    scale = min(-eta0, xi0) if eta0 < 0.0 < xi0 else 0.0
    half = 0.02 * scale
    tol_eval = 0.05 * max(p.eta.domain.length, p.xi.domain.length)
    residual = 0.0
    try:
        xs = np.linspace(-half, half, probes) if half > 0 else np.array([0.0])
        a = chain_eval(p.eta, chain_eval(p.xi, xs, tol=tol_eval),
                       tol=tol_eval)
        b = chain_eval(p.xi, chain_eval(p.eta, xs, tol=tol_eval),
                       tol=tol_eval)
        residual = float(np.max(np.abs(a - b)))
    except (ChainIntegrityError, DomainError) as exc:
        residual = math.inf
        failures.append("commutation probes failed: %s" % exc)
    ctol = config.COMMUTATION_TOL * p.eta.domain.length
    if residual > ctol:
        failures.append("commutation residual %.3e exceeds %.3e"
                        % (residual, ctol))

    def cubic_at_zero(chain):
        for loc, order in chain_critical_points(chain):
            if abs(loc) < 1e-8 * max(chain.domain.length, 1e-300) \
                    and order == 3:
                return True
        return False

    eta_cubic = cubic_at_zero(p.eta)
    xi_cubic = cubic_at_zero(p.xi)
    if not eta_cubic:
        failures.append("eta lacks a cubic critical point at 0")
    if not xi_cubic:
        failures.append("xi lacks a cubic critical point at 0")

    cross = False
    try:
        v = chain_eval(p.xi, eta0, tol=tol_eval)
        cross = -1e-9 * p.eta.domain.length <= v <= xi0 * (1 + 1e-9)
    except (ChainIntegrityError, DomainError) as exc:
        failures.append("xi(eta(0)) not evaluable: %s" % exc)
    if not cross:
        failures.append("xi(eta(0)) outside [0, xi(0)]")

    return PairReport(ok=not failures, eta0=eta0, xi0=xi0,
                      commutation_residual=residual, commutation_tol=ctol,
                      cross_boundary=cross, eta_cubic_at_zero=eta_cubic,
                      xi_cubic_at_zero=xi_cubic, failures=tuple(failures))


def height(p: CommutingPair, cap: int = config.HEIGHT_CAP,
           tol: float | None = None) -> Height:
    """Smallest a with 0 between eta^{a+1}(xi(0)) and eta^a(xi(0))."""
    if tol is None:
        tol = config.STAGE_COMPAT_TOL * p.eta.domain.length
    y = chain_eval(p.xi, 0.0, tol=tol)
    for a in range(1, cap + 1):
        if y < p.eta.domain.lo - tol:
            raise ChainIntegrityError(
                "height iterate %.6g escaped [0, xi(0)]" % y)
        y = chain_eval(p.eta, min(y, p.eta.domain.hi), tol=tol)
        if y <= 0.0:
            return Height(a - 1) if a > 1 else Height(1)
    return Height(None)


def _height_int(p: CommutingPair, tol: float | None = None) -> int:
    h = height(p, tol=tol)
    if h.is_infinite:
        raise NonRenormalizableError(
            "height is infinite (eta has a fixed point); pair is not "
            "renormalizable")
    return h.value


def prerenormalize(p: CommutingPair, degree: int | None = None,
                   tol: float | None = None) -> CommutingPair:
    """One unnormalized renormalization step.

    The next level's long branch is eta^a o xi on [eta(0), 0] and its
    short branch is eta on [0, eta^a(xi(0))]; conjugation by x -> -x then
    restores eta(0) < 0 < xi(0) (levels alternate orientation).  The
    optional tol loosens stage-compatibility checks (needed when the pair
    carries an injected perturbation, e.g. under differentiation).
    """
    a = _height_int(p, tol=tol)
    deg = degree if degree is not None else \
        max(s.degree for s in p.eta.pieces)
    longc = p.xi
    for _ in range(a):
        longc = chain_compose(p.eta, longc, degree=deg, tol=tol)
    top = chain_eval(longc, 0.0, tol=tol)   # eta^a(xi(0)) > 0
    if top <= 0.0:
        raise NonRenormalizableError(
            "eta^a(xi(0)) = %.6g is not positive" % top)
    shortc = chain_restrict(p.eta, Interval(0.0, top), degree=deg, tol=tol)
    eta_new = chain_flip(longc)
    xi_new = chain_flip(shortc)
    prov = tuple(kv for kv in p.provenance if kv[0] != "level")
    lvl = dict(p.provenance).get("level")
    if lvl is not None:
        prov = prov + (("level", lvl + 1),)
    return CommutingPair(eta=eta_new, xi=xi_new, provenance=prov)


def normalize(p: CommutingPair, degree: int | None = None,
              tol: float | None = None) -> CommutingPair:
    """Rescale by the conjugation x -> x/xi(0) so that xi(0) = 1."""
    lam = chain_eval(p.xi, 0.0, tol=tol) if tol is not None else p.xi0
    if lam <= 0.0:
        raise StructuralError("xi(0) = %.6g is not positive" % lam)
    eta = chain_rescale(p.eta, lam)
    xi = chain_rescale(p.xi, lam)
    deg = degree if degree is not None else \
        max(s.degree for s in p.eta.pieces)
    eta = chain_canonicalize(eta, degree=deg, tol=tol)
    xi = chain_canonicalize(xi, degree=deg, tol=tol)
    return CommutingPair(eta=eta, xi=xi, provenance=p.provenance)


def renormalize(p: CommutingPair, degree: int | None = None,
                tol: float | None = None) -> CommutingPair:
    """normalize o prerenormalize, refit at the working degree."""
    return normalize(prerenormalize(p, degree=degree, tol=tol),
                     degree=degree, tol=tol)


def glued_orbit(p: CommutingPair, x0: float, n: int):
    """Orbit of the glued circle map on [eta(0), xi(0)).

    f(x) = eta(x) for x >= 0 and eta(xi(x)) for x < 0; the two interval
    endpoints are identified.  Returns the n visited points.
    """
    lo, hi = p.eta0, p.xi0
    if not lo <= x0 < hi:
        raise DomainError("x0=%.6g outside glued circle [%.6g, %.6g)"
                          % (x0, lo, hi))
    out = np.empty(n)
    _, _, escape = kernels.glued_orbit_count(
        *chain_kernel_arrays(p.eta), *chain_kernel_arrays(p.xi),
        x0, n, 0.0, 0.0, 0.0, 0.0, out)
    tol = config.STAGE_COMPAT_TOL * (hi - lo)
    if escape > 100 * tol:
        raise ChainIntegrityError(
            "glued orbit escaped stage domains by %.3e" % escape)
    return out


def glued_critical_point(p: CommutingPair) -> float:
    """The non-zero critical point of the glued circle map.

    Node metadata gives the candidates: an interior cube node of eta, or
    a cube node of xi (reached through the x < 0 branch).  Exactly one
    must exist for a bi-cubic pair.
    """
    tol = 1e-8 * max(p.eta.domain.length, p.xi.domain.length)
    cands = []
    for loc, order in chain_critical_points(p.eta):
        if loc > tol:
            cands.append((loc, order))
    for loc, order in chain_critical_points(p.xi):
        if loc < -tol:
            cands.append((loc, order))
    if len(cands) != 1:
        raise StructuralError(
            "expected one non-zero critical point on the glued circle, "
            "found %d: %s" % (len(cands), cands))
    return cands[0][0]


def rotation_number_by_heights(lift, depth: int = 10):
    """Rotation number digits read off as renormalization heights.

    a_0 is the last iterate count before the lift orbit of 0 crosses 1;
    a_1, a_2, ... are the heights of the successively renormalized
    level-0 pair.  Independent of the orbit-record bracket method.
    """
    x = 0.0
    a0 = 0
    while True:
        x = float(lift(x))
        if x >= 1.0:
            break
        a0 += 1
        if a0 > 10 ** 6:
            raise RationalRotationError("orbit of 0 never crosses 1")
    digits = [a0]
    p = extract_pair(lift, 0)
    for _ in range(depth - 1):
        digits.append(_height_int(p))
        p = renormalize(p)
    cf = ContinuedFraction(preperiod=tuple(digits), depth_truncated=True)
    return cf.value(), cf


def pair_signature(p: CommutingPair, n_orbit: int = 200000,
                   depth: int = 8):
    """Measured signature of the glued circle map.

    rho comes from the height sequence of repeated renormalization;
    delta is the Birkhoff frequency of the glued orbit of 0 in the arc
    from 0 to the non-zero critical point (the invariant measure of that
    arc, i.e. the conjugacy coordinate of the second critical point).
    Returns (Signature, delta_error_estimate).
    """
    digits = []
    q = p
    for _ in range(depth):
        digits.append(_height_int(q))
        q = renormalize(q)
    cf = ContinuedFraction(preperiod=tuple(digits), depth_truncated=True)

    lo, hi = p.eta0, p.xi0
    cstar = glued_critical_point(p)
    if cstar > 0.0:
        arcs = (0.0, cstar, 0.0, 0.0)
    else:
        arcs = (0.0, hi, lo, cstar)
    _, count, escape = kernels.glued_orbit_count(
        *chain_kernel_arrays(p.eta), *chain_kernel_arrays(p.xi),
        0.0, n_orbit, *arcs)
    tol = config.STAGE_COMPAT_TOL * (hi - lo)
    if escape > 100 * tol:
        raise ChainIntegrityError(
            "glued orbit escaped stage domains by %.3e" % escape)
    delta = count / n_orbit
    _, q_last = convergents(cf, len(digits))
    err = 3.0 / min(q_last, n_orbit)
    return Signature(rho=cf, delta=delta), err


def pair_distance(p1: CommutingPair, p2: CommutingPair,
                  probes: int = 129) -> float:
    """Sup distance proxy: |eta1 - eta2| + |xi1 - xi2| on the common
    domains at `probes` points, plus the endpoint gap |eta1(0) - eta2(0)|.

    This is a metric on normalized pairs with comparable domains, used as
    a stand-in for the Caratheodory distance of the convergence theorem.
    """
    e_hi = min(p1.eta.domain.hi, p2.eta.domain.hi)
    x_lo = max(p1.xi.domain.lo, p2.xi.domain.lo)
    if e_hi <= 0.0 or x_lo >= 0.0:
        raise DomainError("pair domains do not overlap around 0")
    xs = np.linspace(0.0, e_hi, probes)
    d_eta = float(np.max(np.abs(chain_eval(p1.eta, xs)
                                - chain_eval(p2.eta, xs))))
    xs = np.linspace(x_lo, 0.0, probes)
    d_xi = float(np.max(np.abs(chain_eval(p1.xi, xs)
                               - chain_eval(p2.xi, xs))))
    return d_eta + d_xi + abs(p1.eta0 - p2.eta0)


def shift_pair(p: CommutingPair, amount: float) -> CommutingPair:
    """Translate eta's values by `amount` (a violation injector for
    validation tests; the result no longer commutes)."""
    return CommutingPair(eta=chain_translate(p.eta, amount), xi=p.xi,
                         provenance=p.provenance)
