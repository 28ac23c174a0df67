"""Pure-Python orbit kernels; same contracts as the compiled module.

These loops are sequential (each iterate feeds the next), so they cannot
be vectorized; the Cython twin in _kernels.pyx is the fast path.
"""

import math

import numpy as np

IMPL = "python"


def lift_step(x, omega, A, B):
    """One step of the trig-family lift written as
    F(x) = omega + x + sum_k A_k sin(2 pi k x) + B_k (1 - cos(2 pi k x))."""
    acc = omega + x
    for k in range(1, len(A) + 1):
        t = 2.0 * math.pi * k * x
        acc += A[k - 1] * math.sin(t) + B[k - 1] * (1.0 - math.cos(t))
    return acc


def orbit_fill(omega, A, B, x0, n, out):
    """out[i] = F^(i+1)(x0) as lift values."""
    x = x0
    A = list(A)
    B = list(B)
    for i in range(n):
        x = lift_step(x, omega, A, B)
        out[i] = x
    return x


def orbit_delta_count(omega, A, B, c, x0, n):
    """(F^n(x0), #{0 <= j < n : frac(F^j(x0)) in [0, c)})."""
    x = x0
    A = list(A)
    B = list(B)
    count = 0
    for _ in range(n):
        if (x - math.floor(x)) < c:
            count += 1
        x = lift_step(x, omega, A, B)
    return x, count


def _clenshaw(coeffs, nc, lo, hi, x):
    t = (2.0 * x - (lo + hi)) / (hi - lo)
    b1 = 0.0
    b2 = 0.0
    for j in range(nc - 1, 0, -1):
        b1, b2 = 2.0 * t * b1 - b2 + coeffs[j], b1
    return t * b1 - b2 + coeffs[0]


def chain_eval_scalar(types, coeffs, lens, los, his, x):
    """Evaluate a flattened chain at one point, clipping stage inputs.

    Returns (value, max_escape) where max_escape is the largest distance
    by which any stage input left its piece domain.
    """
    w = x
    escape = 0.0
    for s in types:
        if s < 0:
            w = w * w * w
        else:
            lo = los[s]
            hi = his[s]
            d = max(lo - w, w - hi, 0.0)
            if d > escape:
                escape = d
            if w < lo:
                w = lo
            elif w > hi:
                w = hi
            w = _clenshaw(coeffs[s], lens[s], lo, hi, w)
    return w, escape


def glued_orbit_count(eta_types, eta_coeffs, eta_lens, eta_los, eta_his,
                      xi_types, xi_coeffs, xi_lens, xi_los, xi_his,
                      x0, n, a1lo, a1hi, a2lo, a2hi, out=None):
    """Iterate the glued circle map on [eta(0), eta(xi(0))).

    Branch rule: x >= 0 -> eta(x); x < 0 -> eta(xi(x)).  Counts visits to
    [a1lo, a1hi) union [a2lo, a2hi).  Returns (final, count, max_escape).
    """
    x = x0
    count = 0
    escape = 0.0
    for i in range(n):
        if (a1lo <= x < a1hi) or (a2lo <= x < a2hi):
            count += 1
        if out is not None:
            out[i] = x
        if x < 0.0:
            x, e = chain_eval_scalar(xi_types, xi_coeffs, xi_lens,
                                     xi_los, xi_his, x)
            if e > escape:
                escape = e
        x, e = chain_eval_scalar(eta_types, eta_coeffs, eta_lens,
                                 eta_los, eta_his, x)
        if e > escape:
            escape = e
    return x, count, escape
