"""Experiments on the renormalization operator.

Convergence-rate measurement for same-signature seeds, C^1 real-bounds
monitoring, fixed-point refinement at periodic signatures (iteration
plus a damped Newton polish in chain coordinates), the finite-difference
Jacobian of renormalization in those coordinates, its spectrum, and the
collision probe tracking the two leading eigendirections as the second
critical point approaches the first.

Chart caveat: the coordinates are the stacked Chebyshev coefficients of
the two chains in canonical form.  Eigenvalues at fixed points are chart
independent, so the spectral statements carry over to any other smooth
chart; away from fixed points the numbers are chart-dependent and only
used as diagnostics.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import config
from .chains import (
    CollisionWarning,
    chain_coordinates,
    chain_critical_points,
    chain_derivative_at,
    chain_eval,
    chain_from_coordinates,
)
from .chebseries import cheb_eval, cheb_fit
from .errors import (
    ConfigError,
    NumericalError,
    SolverFailure,
    StructuralError,
)
from .pairs import (
    CommutingPair,
    _height_int,
    extract_pair,
    height,
    normalize,
    pair_distance,
    pair_validate,
    renormalize,
)


# ---------------------------------------------------------------------------
# chart

# Chart vectors are not exactly stage-compatible: reconstruction reuses
# the template's piece domains, so stage values overhang by roughly the
# distance to the template; chart operations therefore run with a loose
# overhang tolerance (the pieces are analytic and evaluation continues
# them accurately well past their domains).
_CHART_TOL = 5e-2


@dataclass(frozen=True)
class OperatorChart:
    """Coordinates for pairs sharing one canonical shape.

    The template fixes the stage structure (piece count, degrees, node
    placement) of both chains; coordinates are the concatenated piece
    coefficients, eta first.
    """
    template: CommutingPair

    @property
    def eta_dim(self) -> int:
        return len(chain_coordinates(self.template.eta))

    @property
    def dim(self) -> int:
        return self.eta_dim + len(chain_coordinates(self.template.xi))

    def coordinates(self, pair: CommutingPair) -> np.ndarray:
        """Coefficient vector of the pair's pieces on the template domains.

        Each piece is refit onto the corresponding template piece's domain
        (the pair's own domains drift slightly along an orbit), so that
        from_coordinates recovers the same functions, not just the same
        coefficients.
        """
        self._check_shape(pair)
        out = []
        for got, want in ((pair.eta, self.template.eta),
                          (pair.xi, self.template.xi)):
            for gp, wp in zip(got.pieces, want.pieces):
                fit = cheb_fit(lambda x: cheb_eval(gp, x, tol=np.inf),
                               wp.domain, gp.degree)
                out.append(fit.coeffs)
        return np.concatenate(out)

    def from_coordinates(self, vec) -> CommutingPair:
        vec = np.asarray(vec, dtype=float)
        if len(vec) != self.dim:
            raise StructuralError(
                "coordinate vector has length %d, chart dimension is %d"
                % (len(vec), self.dim))
        k = self.eta_dim
        eta = chain_from_coordinates(self.template.eta, vec[:k])
        xi = chain_from_coordinates(self.template.xi, vec[k:])
        return CommutingPair(eta=eta, xi=xi,
                             provenance=self.template.provenance)

    def _check_shape(self, pair: CommutingPair) -> None:
        for got, want, name in ((pair.eta, self.template.eta, "eta"),
                                (pair.xi, self.template.xi, "xi")):
            if len(got.stages) != len(want.stages):
                raise StructuralError(
                    "%s has %d stages, template has %d"
                    % (name, len(got.stages), len(want.stages)))
            if len(chain_coordinates(got)) != len(chain_coordinates(want)):
                raise StructuralError(
                    "%s coordinate length differs from template" % name)


def make_chart(pair: CommutingPair) -> OperatorChart:
    return OperatorChart(template=pair)


def chart_step(chart: OperatorChart, vec, heights,
               degree: int | None = None) -> np.ndarray:
    """len(heights)-fold renormalization in chart coordinates.

    Heights are frozen to the given combinatorics: a pair whose actual
    height differs (the perturbation crossed a combinatorial boundary)
    raises a solver failure instead of silently changing branch.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        pair = chart.from_coordinates(vec)
        for k, a in enumerate(heights):
            actual = _height_int(pair, tol=_CHART_TOL)
            if actual != a:
                raise SolverFailure(
                    "chart_step[%d]" % k,
                    "height flipped from %d to %d under perturbation"
                    % (a, actual))
            pair = renormalize(pair, degree=degree, tol=_CHART_TOL)
        return chart.coordinates(pair)


# ---------------------------------------------------------------------------
# experiments


def _loglinear_fit(ns, ds):
    """Least-squares fit log d = log C + n log lam; returns (lam, r2)."""
    ns = np.asarray(ns, dtype=float)
    ys = np.log(np.asarray(ds, dtype=float))
    A = np.vstack([ns, np.ones_like(ns)]).T
    sol, *_ = np.linalg.lstsq(A, ys, rcond=None)
    fit = A @ sol
    ss_res = float(np.sum((ys - fit) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(np.exp(sol[0])), r2


def convergence_experiment(f1, f2, n_max: int = 8,
                           degree: int = config.WORKING_DEGREE,
                           fit_from: int = 2):
    """Distance of n-th renormalizations of two same-signature maps.

    Returns (ns, distances, fitted rate, fit R^2); the fit is log-linear
    over n >= fit_from, where the transient from the differing seeds has
    died out but unstable-direction noise has not yet taken over.
    """
    from .families import rotation_number, signature_delta

    _, cf1 = rotation_number(f1, depth=10)
    _, cf2 = rotation_number(f2, depth=10)
    k = min(cf1.known_depth, cf2.known_depth, 8)
    if cf1.digits(k) != cf2.digits(k):
        raise ConfigError(
            "seeds have different rotation digits %s vs %s"
            % (cf1.digits(k), cf2.digits(k)))
    d1, e1 = signature_delta(f1)
    d2, e2 = signature_delta(f2)
    if abs(d1 - d2) > 10 * (e1 + e2) + 1e-3:
        raise ConfigError(
            "seeds have different delta: %.6g vs %.6g" % (d1, d2))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        p1 = normalize(extract_pair(f1, 0, degree=degree), degree=degree)
        p2 = normalize(extract_pair(f2, 0, degree=degree), degree=degree)
        ns, ds = [], []
        for n in range(n_max + 1):
            ns.append(n)
            ds.append(pair_distance(p1, p2))
            if n == n_max:
                break
            p1 = renormalize(p1, degree=degree)
            p2 = renormalize(p2, degree=degree)
    tail = [(n, d) for n, d in zip(ns, ds) if n >= fit_from]
    lam, r2 = _loglinear_fit([t[0] for t in tail], [t[1] for t in tail])
    return ns, ds, lam, r2


def real_bounds_monitor(f, n_max: int = 8,
                        degree: int = config.WORKING_DEGREE):
    """C^1 data of the normalized renormalizations of `f`.

    Returns rows (n, ratio, c1norm): ratio = |I_xi|/|I_eta| of the
    normalized level-n pair and c1norm = sup |eta'| over I_eta.
    """
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        p = normalize(extract_pair(f, 0, degree=degree), degree=degree)
        for n in range(n_max + 1):
            ratio = -p.eta0 / p.xi0
            xs = np.linspace(p.eta.domain.lo, p.eta.domain.hi, 65)
            c1 = max(abs(chain_derivative_at(p.eta, float(x), tol=np.inf))
                     for x in xs)
            rows.append((n, ratio, c1))
            if n == n_max:
                break
            p = renormalize(p, degree=degree)
    return rows


def jacobian_fd(chart: OperatorChart, point, heights,
                h: float = config.FD_STEP,
                degree: int | None = None) -> np.ndarray:
    """Central-difference Jacobian of chart_step at `point`.

    Column j uses step h*max(1,|x_j|); a column whose perturbed
    evaluations fail (a height flip, or amplification of a top-coefficient
    perturbation past the chain guards) retries with h/16 a few times and
    then reports the column.
    """
    point = np.asarray(point, dtype=float)
    n = len(point)
    J = np.empty((n, n))
    for j in range(n):
        hj = h * max(1.0, abs(point[j]))
        for attempt in range(4):
            try:
                vp = point.copy()
                vp[j] += hj
                up = chart_step(chart, vp, heights, degree=degree)
                vm = point.copy()
                vm[j] -= hj
                um = chart_step(chart, vm, heights, degree=degree)
                col = (up - um) / (2.0 * hj)
                if not np.all(np.isfinite(col)) or \
                        np.linalg.norm(col) > 1e6:
                    raise NumericalError(
                        "column %d unstable at h=%.3e" % (j, hj))
                J[:, j] = col
                break
            except (SolverFailure, StructuralError, NumericalError):
                if attempt == 3:
                    raise SolverFailure(
                        "jacobian column %d" % j,
                        "perturbed renormalization failed at h=%.3e" % hj)
                hj /= 16.0
    return J


def fixed_point_refine(seed, n_iter: int = 16, period: int = 1,
                       degree: int = config.WORKING_DEGREE,
                       newton: bool = True, newton_iters: int = 6,
                       newton_tol: float = 1e-9):
    """Periodic point of renormalization from a tuned seed map.

    Plain iteration contracts along the stable manifold until the seed's
    tuning error, amplified along the unstable directions, takes over
    (typically stalling near 1e-2); the damped Newton polish in chart
    coordinates then removes the unstable component.  Returns
    (pair, report) with report = {iteration_history, newton_residuals,
    residual, heights}.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        p = normalize(extract_pair(seed, 0, degree=degree), degree=degree)
        history = []
        best, best_d = None, math.inf
        window = [p]
        for n in range(n_iter):
            window.append(renormalize(window[-1], degree=degree))
            if len(window) > period:
                d = pair_distance(window[-1 - period], window[-1])
                history.append((n, d))
                if d < best_d:
                    best, best_d = window[-1 - period], d
        p = best if best is not None else p
        heights = []
        q = p
        for _ in range(period):
            heights.append(_height_int(q))
            q = renormalize(q, degree=degree)
        heights = tuple(heights)

    chart = make_chart(p)
    v = chart.coordinates(p)
    newton_residuals = []
    residual = float(np.max(np.abs(chart_step(chart, v, heights,
                                              degree=degree) - v)))
    if newton:
        best_v, best_res = v, residual
        for _ in range(newton_iters):
            if residual < newton_tol:
                break
            J = jacobian_fd(chart, v, heights, degree=degree)
            rhs = chart_step(chart, v, heights, degree=degree) - v
            step = np.linalg.solve(J - np.eye(len(v)), -rhs)
            cap = 0.1 * max(1.0, float(np.max(np.abs(v))))
            norm = float(np.max(np.abs(step)))
            if norm > cap:
                step *= cap / norm
            # backtracking: the finite-difference Jacobian is noisy, so a
            # full step can overshoot; halve until the residual improves
            for _ in range(6):
                cand = v + step
                try:
                    res = float(np.max(np.abs(
                        chart_step(chart, cand, heights, degree=degree)
                        - cand)))
                except (SolverFailure, StructuralError, NumericalError):
                    res = math.inf
                if res < residual:
                    break
                step = 0.5 * step
            if not math.isfinite(res):
                break
            v, residual = cand, res
            newton_residuals.append(residual)
            if residual < best_res:
                best_v, best_res = v, residual
        v, residual = best_v, best_res
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        pair = chart.from_coordinates(v)
    report = {
        "iteration_history": history,
        "newton_residuals": newton_residuals,
        "residual": residual,
        "heights": heights,
    }
    return pair, report


# ---------------------------------------------------------------------------
# spectrum
#
# The chart space is larger than the space the renormalization operator
# naturally acts on: a coordinate vector encodes eta and xi independently,
# so most directions break the commutation relation or move the cubic
# critical points off 0.  Those transverse directions carry their own
# eigenvalues (gauge translations expand by 1/|eta(0)|, commutation-defect
# modes mirror the genuine ones), which would pollute the unstable count.
# Spectra are therefore computed on the subspace tangent, to first order,
# to the commuting critically-pinned pairs: the kernel of the defect
# derivative together with the two critical-value functionals.


def _series_compose(outer, inner, m):
    """outer(inner(x)) mod x^{m+1}; inner[0] must be 0.  Horner form."""
    acc = np.zeros(m + 1, dtype=np.result_type(outer, inner))
    for b in outer[::-1]:
        acc = np.polynomial.polynomial.polymul(acc, inner)[:m + 1]
        acc = np.pad(acc, (0, m + 1 - len(acc)))
        acc[0] += b
    return acc


def _piece_taylor(domain, coeffs, x0, m):
    """Taylor coefficients at x0, up to order m, of the polynomial with the
    given Chebyshev coefficients on `domain` (exact derivatives of the
    stored polynomial; x0 may sit on the boundary)."""
    t0 = (x0 - domain.mid) / domain.half
    c = np.atleast_1d(np.asarray(coeffs))
    out = np.empty(m + 1, dtype=np.result_type(c, np.asarray(x0)))
    fact = 1.0
    for k in range(m + 1):
        out[k] = np.polynomial.chebyshev.chebval(t0, c) \
            / (domain.half ** k) / fact
        c = np.polynomial.chebyshev.chebder(c) if len(c) > 1 \
            else np.zeros(1)
        fact *= k + 1
    return out


def _chain_taylor(stages, coeff_chunks, series, m):
    """Push a Taylor series (around some base point) through a chain given
    as template stages plus per-piece coefficient chunks.

    `series` is the expansion of the incoming value, [v0, u1, ..., um];
    every evaluation happens at the walked center v0, so no Chebyshev
    continuation is involved.  Works on complex coefficients too, which
    makes the jet amenable to complex-step differentiation.
    """
    cur = np.array(series, dtype=np.result_type(series, *coeff_chunks))
    k = 0
    for s in stages:
        v0, u = cur[0], cur.copy()
        u[0] = 0.0
        if hasattr(s, "coeffs"):
            b = _piece_taylor(s.domain, coeff_chunks[k], v0, m)
            k += 1
            cur = _series_compose(b, u, m)
        else:                                   # cube node
            cube = _series_compose(
                np.array([0.0 * v0, 3 * v0 ** 2, 3 * v0, 1.0 + 0 * v0]),
                u, m)
            cube[0] = v0 ** 3
            cur = cube
    return cur


def _coeff_chunks(chain, vec):
    sizes = [p.degree + 1 for p in chain.pieces]
    return np.split(np.atleast_1d(vec), np.cumsum(sizes)[:-1])


def commutation_defect_jet(chart: OperatorChart, vec, m: int = 8):
    """Taylor mismatch of eta o xi (from the left) vs xi o eta (from the
    right) at the gluing point 0.

    On a genuine commuting pair the two composites are two sides of one
    analytic function, so all jet coefficients vanish.  Every stage is
    evaluated at its walked center, never past a domain edge, which keeps
    the jet well-conditioned at any working degree.  The map from chart
    coordinates to the jet is polynomial and evaluated without casting,
    so complex-step derivatives of it are exact.
    """
    vec = np.atleast_1d(vec)
    et, xt = chart.template.eta, chart.template.xi
    ec = _coeff_chunks(et, vec[:chart.eta_dim])
    xc = _coeff_chunks(xt, vec[chart.eta_dim:])
    x = np.zeros(m + 1)
    x[1] = 1.0
    a = _chain_taylor(et.stages, ec, _chain_taylor(xt.stages, xc, x, m), m)
    b = _chain_taylor(xt.stages, xc, _chain_taylor(et.stages, ec, x, m), m)
    return a - b


def _defect_rows(chart: OperatorChart, vec, m: int = 8, h: float = 1e-80):
    """Complex-step derivative of the commutation jet (rows = jet orders
    0..m, columns = chart coordinates), row-normalized.  The jet is a
    polynomial in the coordinates, so the imaginary-part trick gives the
    rows to machine precision with no subtractive cancellation."""
    vec = np.asarray(vec, dtype=complex)
    n = len(vec)
    G = np.empty((m + 1, n))
    for j in range(n):
        vp = vec.copy()
        vp[j] += 1j * h
        G[:, j] = np.imag(commutation_defect_jet(chart, vp, m)) / h
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    return G / np.where(norms > 0.0, norms, 1.0)


def _pinning_rows(chart: OperatorChart):
    """Functionals reading each chain's innermost piece at x = 0.

    Both vanish on the chart's valid pairs (the cubic critical points sit
    exactly at 0); their kernel excludes the translation gauge modes.
    """
    pieces = list(chart.template.eta.pieces) + list(chart.template.xi.pieces)
    sizes = [p.degree + 1 for p in pieces]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    rows = []
    for gidx in (0, len(chart.template.eta.pieces)):
        p = pieces[gidx]
        row = np.zeros(offs[-1])
        t = -p.domain.mid / p.domain.half
        row[offs[gidx]:offs[gidx + 1]] = [
            np.polynomial.chebyshev.chebval(t, [0.0] * k + [1.0])
            for k in range(p.degree + 1)]
        rows.append(row)
    return np.array(rows)


def tangent_basis(chart: OperatorChart, vec, m: int = 8,
                  h: float = 1e-80) -> np.ndarray:
    """Orthonormal basis (columns) of the first-order valid directions:
    the common kernel of the commutation-jet derivative (orders 0..m)
    and the critical-pinning rows."""
    K = np.vstack([_defect_rows(chart, vec, m=m, h=h),
                   _pinning_rows(chart)])
    _, sk, Vk = np.linalg.svd(K)
    rank = int(np.sum(sk > 1e-10 * sk[0]))
    return Vk[rank:].T


def restrict_jacobian(J, Q) -> np.ndarray:
    """Compression of J onto the column space of the orthonormal Q."""
    return Q.T @ np.asarray(J, dtype=float) @ Q


def mode_defect_rate(chart: OperatorChart, vec, w, m: int = 4,
                     h: float = 1e-80) -> float:
    """How fast a direction w breaks commutation, to first order.

    Returns the largest entry of the exact (complex-step) directional
    derivative of the commutation jet at vec along w, over jet orders
    0..m.  Tangent directions of the commuting-pair manifold leave every
    order near roundoff; chart artifacts -- gauge mirrors and modes built
    from amplified top coefficients -- break one of the first few orders
    at O(1), which makes the rate a sharp eigenmode classifier at any
    working degree."""
    base = np.asarray(vec, dtype=complex)
    w = np.atleast_1d(w)
    rate = 0.0
    for part in (np.real(w), np.imag(w)):
        nrm = np.linalg.norm(part)
        if nrm < 1e-14:
            continue
        d = np.imag(commutation_defect_jet(chart, base + 1j * h * (part / nrm),
                                           m)) / h
        rate = max(rate, float(np.max(np.abs(d))))
    return rate


def _mode_pinning(chart: OperatorChart, w) -> float:
    """Largest critical-pinning functional value along the direction w."""
    P = _pinning_rows(chart)
    P = P / np.linalg.norm(P, axis=1, keepdims=True)
    w = np.atleast_1d(w)
    out = 0.0
    for part in (np.real(w), np.imag(w)):
        nrm = np.linalg.norm(part)
        if nrm > 1e-14:
            out = max(out, float(np.max(np.abs(P @ (part / nrm)))))
    return out


def _mode_constraints(chart: OperatorChart, vec, w, m: int = 4,
                      h: float = 1e-80):
    """Stacked classifier functionals for a unit direction w: the two
    critical-pinning values followed by the complex-step defect
    derivatives at jet orders 0..m.

    Pinning carries extra weight because translation gauge modes are
    invisible to the defect (conjugating both maps preserves
    commutation) and move the critical points only at the 0.1-1 level,
    while genuine directions pin them to 1e-9 or better.
    """
    P = _pinning_rows(chart)
    P = P / np.linalg.norm(P, axis=1, keepdims=True)
    base = np.asarray(vec, dtype=complex)
    d = np.imag(commutation_defect_jet(chart, base + 1j * h * w, m)) / h
    return np.concatenate([1e3 * (P @ w), d])


def classify_modes(chart: OperatorChart, vec, J, tol: float = 1.0,
                   cluster_tol: float = 1e-3, m: int = 4):
    """Split the eigenvalues of J into genuine modes and chart artifacts.

    An eigendirection is an artifact when it either moves a cubic
    critical point off 0 (translation gauge) or breaks the commutation
    jet at first order within orders 0..m (scale gauge, mirror copies,
    amplified-coefficient modes).  Genuine directions leave all those
    functionals small; artifacts violate at least one at O(1), so a
    threshold of order unity separates the two with a wide margin.
    Orders beyond ~4 are not used: repeated differentiation amplifies
    every direction there, genuine or not.

    Repeated eigenvalues need care: the eigensolver returns an arbitrary
    basis of the invariant subspace, so a genuine mode degenerate with a
    gauge mode surfaces as mixed vectors.  Eigenvalues are therefore
    grouped into clusters and each cluster keeps as many copies as its
    subspace has constraint-free directions (a singular-value count,
    basis independent).

    Returns (kept_eigenvalues, dropped) with kept sorted by modulus
    descending and dropped a list of (eigenvalue, constraint_size).
    """
    ev, vecs = np.linalg.eig(np.asarray(J, dtype=float))
    order = np.argsort(-np.abs(ev))
    used = np.zeros(len(ev), dtype=bool)
    kept, dropped = [], []
    for i in order:
        if used[i]:
            continue
        tol_i = cluster_tol * max(1.0, abs(ev[i]))
        cluster = [j for j in order if not used[j]
                   and min(abs(ev[j] - ev[i]),
                           abs(ev[j] - np.conj(ev[i]))) <= tol_i]
        for j in cluster:
            used[j] = True
        cols = []
        for j in cluster:
            for part in (vecs[:, j].real, vecs[:, j].imag):
                if np.linalg.norm(part) > 1e-10:
                    cols.append(part)
        W, sw, _ = np.linalg.svd(np.array(cols).T, full_matrices=False)
        dim = int(np.sum(sw > 1e-8 * sw[0]))
        W = W[:, :dim]
        C = np.column_stack([_mode_constraints(chart, vec, W[:, k], m=m)
                             for k in range(dim)])
        sc = np.linalg.svd(C, compute_uv=False)
        good = dim - int(np.sum(sc > tol))
        members = sorted((ev[j] for j in cluster), key=abs, reverse=True)
        if any(abs(z.imag) > tol_i for z in members):
            # a complex pair lives on a 2-d real invariant subspace; a
            # half-clean subspace has no invariant clean direction
            n_keep = len(members) if good == dim else 0
        else:
            n_keep = min(good, len(members))
        kept.extend(members[:n_keep])
        for z in members[n_keep:]:
            dropped.append((complex(z), float(sc[0])))
    kept = np.array(kept)
    return kept[np.argsort(-np.abs(kept))], dropped


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray          # sorted by modulus, descending
    unstable_count: int
    neutral_band: list
    margin: float
    degree_drift: float | None = None

    @classmethod
    def from_eigenvalues(cls, ev, margin: float = config.UNSTABLE_MARGIN):
        ev = np.asarray(ev)
        ev = ev[np.argsort(-np.abs(ev))]
        mods = np.abs(ev)
        return cls(
            eigenvalues=ev,
            unstable_count=int(np.sum(mods > 1.0 + margin)),
            neutral_band=[complex(z) for z in
                          ev[(mods >= 1.0 - margin) & (mods <= 1.0 + margin)]],
            margin=margin,
        )

    @classmethod
    def from_matrix(cls, J, margin: float = config.UNSTABLE_MARGIN):
        try:
            ev = np.linalg.eigvals(np.asarray(J, dtype=float))
        except np.linalg.LinAlgError as exc:
            raise NumericalError("eigensolve failed: %s" % exc)
        return cls.from_eigenvalues(ev, margin=margin)


def spectrum(J, margin: float = config.UNSTABLE_MARGIN) -> SpectralReport:
    return SpectralReport.from_matrix(J, margin=margin)


def spectrum_sweep(seed, degrees=config.DEGREE_SWEEP, period: int = 1,
                   n_iter: int = 16, margin: float = config.UNSTABLE_MARGIN):
    """Fixed-point spectra across working degrees.

    Eigenvalues come from the full chart Jacobian with gauge and mirror
    artifacts removed by classify_modes.  Returns {degree:
    (SpectralReport, refine_report)}; each report's degree_drift is the
    relative spread of its top-2 eigenvalue moduli against the highest
    degree in the sweep.
    """
    out = {}
    for d in degrees:
        pair, rep = fixed_point_refine(seed, n_iter=n_iter, period=period,
                                       degree=d)
        chart = make_chart(pair)
        v = chart.coordinates(pair)
        J = jacobian_fd(chart, v, rep["heights"], degree=d)
        kept, _ = classify_modes(chart, v, J)
        out[d] = (SpectralReport.from_eigenvalues(kept, margin=margin), rep)
    ref = np.abs(out[max(degrees)][0].eigenvalues[:2])
    for d in degrees:
        top = np.abs(out[d][0].eigenvalues[:2])
        out[d][0].degree_drift = float(np.max(np.abs(top - ref) / ref))
    return out


def eigenvector_angle(J, margin: float = config.UNSTABLE_MARGIN,
                      targets=None) -> float:
    """Principal angle between two leading eigendirections of J.

    By default the two largest-modulus modes; with `targets`, the modes
    whose eigenvalues lie nearest the two given values (used to aim at
    the genuine pair once artifacts are classified away)."""
    ev, vecs = np.linalg.eig(np.asarray(J, dtype=float))
    if targets is not None:
        order = [int(np.argmin(np.abs(ev - t))) for t in targets]
    else:
        order = np.argsort(-np.abs(ev))
    v1 = vecs[:, order[0]]
    v2 = vecs[:, order[1]]
    c = abs(np.vdot(v1, v2)) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    return float(np.arccos(min(c, 1.0)))


def order_nine_flag(pair: CommutingPair) -> bool:
    """True when the glued map has a critical point of order >= 9 (the
    degenerate collided configuration that must be excluded from the
    two-node analysis)."""
    for chain in (pair.eta, pair.xi):
        for _, order in chain_critical_points(chain):
            if order >= 9:
                return True
    return False


def collision_probe(targets, family: str = "trig", period: int = 1,
                    degree: int = config.WORKING_DEGREE, n_iter: int = 16):
    """Track the leading eigendirections as delta degenerates.

    For each target signature: tune a map, refine the periodic point,
    and report (delta, unstable_count, angle between the two leading
    eigenvectors).  Degenerate order-9 configurations are flagged and
    excluded; failures are reported per signature, never raised.
    """
    from .families import trig_lift, tune_to_signature

    rows = []
    for sig in targets:
        entry = {"delta": sig.delta, "unstable_count": None,
                 "angle": None, "status": "ok"}
        try:
            params = tune_to_signature(family, sig)
            lift = trig_lift(params)
            pair, rep = fixed_point_refine(lift, n_iter=n_iter,
                                           period=period, degree=degree)
            if order_nine_flag(pair):
                entry["status"] = "excluded: order-9 critical point"
                rows.append(entry)
                continue
            chart = make_chart(pair)
            v = chart.coordinates(pair)
            J = jacobian_fd(chart, v, rep["heights"], degree=degree)
            kept, _ = classify_modes(chart, v, J)
            sp = SpectralReport.from_eigenvalues(kept)
            entry["unstable_count"] = sp.unstable_count
            entry["angle"] = eigenvector_angle(J, targets=kept[:2])
        except Exception as exc:   # per-signature report, keep going
            entry["status"] = "failed: %s" % exc
        rows.append(entry)
    return rows


# ---------------------------------------------------------------------------
# artifacts


def format_float(x) -> str:
    return "%.17g" % float(x)


def write_csv(path, header, rows) -> None:
    """One-line header; floats at 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [format_float(c) if isinstance(c, float) else str(c)
                     for c in row]
            fh.write(",".join(cells) + "\n")


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(path, cfg: dict, artifacts, t_start: float) -> None:
    from . import __version__

    manifest = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": __version__,
        "tolerances": {
            "stage_compat": config.STAGE_COMPAT_TOL,
            "commutation": config.COMMUTATION_TOL,
            "canonical_drift": config.CANON_VALUE_TOL,
            "unstable_margin": config.UNSTABLE_MARGIN,
        },
        "artifacts": list(artifacts),
        "wall_time_s": time.time() - t_start,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
