"""End-to-end acceptance checks with pinned tolerances.

Each test states a measurable property of the implementation as a whole
— exact continued-fraction combinatorics, extraction against direct
iteration, the Gauss-map action of renormalization, signature transport,
exponential convergence of renormalization orbits, C1 bounds, and the
hyperbolic structure of the linearized operator — and pins the tolerance
it is required to meet.  Heavier shared computations (degree sweeps,
degree-64 extractions) live in module fixtures so the suite stays within
its wall-clock budget.
"""

import time

import mpmath
import numpy as np
import pytest

import circren.families as F
import circren.lab as L
import circren.pairs as P
from circren.chains import Q, chain_critical_points, chain_eval, make_chain
from circren.chebseries import Interval, identity_piece
from circren.rotation import (
    NEAREST,
    ContinuedFraction,
    cocycle_orbit,
    cocycle_step,
    convergents,
)

GOLDEN = ContinuedFraction(period=(1,))


@pytest.fixture(scope="module")
def golden_pairs64(golden_lift):
    """Extractions at degree 64, levels 0..7 (shared by several tests)."""
    return [P.extract_pair(golden_lift, n, degree=64) for n in range(8)]


@pytest.fixture(scope="module")
def golden_sweep(golden_lift):
    """Classified fixed-point spectra across working degrees."""
    return L.spectrum_sweep(golden_lift, degrees=(32, 48, 64))


class TestContinuedFractionEngine:
    def test_golden_digits_and_fibonacci_denominators(self):
        t0 = time.time()
        assert GOLDEN.digits(20) == (1,) * 20
        fib = [0, 1]
        while len(fib) < 24:
            fib.append(fib[-1] + fib[-2])
        qs = [convergents(GOLDEN, k)[1] for k in range(21)]
        assert qs == fib[1:22]
        # the defining recurrence holds with the digits themselves
        for k in range(19):
            a = GOLDEN.digit(k + 1)
            assert qs[k + 2] == a * qs[k + 1] + qs[k]
        assert time.time() - t0 < 1.0


class TestExtraction:
    def test_branches_match_direct_iteration(self, golden_lift):
        t0 = time.time()
        _, cf = F.rotation_number(golden_lift, depth=12)
        for n in range(7):
            pair = P.extract_pair(golden_lift, n)
            flipped = dict(pair.provenance)["flipped"]
            for chain, k in ((pair.eta, n + 1), (pair.xi, n)):
                pk, qk = convergents(cf, k)
                xs = np.linspace(chain.domain.lo, chain.domain.hi, 50)
                if flipped:
                    ref = -np.array([float(P._iterate(golden_lift, -x, qk))
                                     - pk for x in xs])
                else:
                    ref = np.array([float(P._iterate(golden_lift, x, qk))
                                    - pk for x in xs])
                got = chain_eval(chain, xs, tol=np.inf)
                assert np.max(np.abs(got - ref)) < 1e-9, f"level {n}"
            rep = P.pair_validate(pair)
            assert rep.commutation_residual < 1e-9, f"level {n}"
        assert time.time() - t0 < 60.0

    def test_renormalization_consistency(self, golden_pairs64):
        # one operator step from level n must land on the level-(n+1)
        # extraction: R(R^n f) = R^(n+1) f
        t0 = time.time()
        for n in range(7):
            stepped = P.renormalize(golden_pairs64[n], degree=64)
            d = P.pair_distance(stepped, golden_pairs64[n + 1])
            assert d < 1e-8, f"level {n}: distance {d:.3e}"
        assert time.time() - t0 < 120.0


class TestGaussAction:
    def _heights(self, lift, depth=10):
        pair = P.extract_pair(lift, 0)
        out = []
        for _ in range(depth):
            out.append(P._height_int(pair))
            pair = P.renormalize(pair)
        return tuple(out)

    def test_heights_equal_digits_three_targets(self, golden_lift, alt_lift,
                                                alt3_lift):
        # the level-0 pair encodes the first-return dynamics, so its
        # height sequence reads the digit string from the second digit
        # on (the first digit is the lift-orbit count used to build it)
        cases = [(golden_lift, (1,) * 10),
                 (alt_lift, (1, 2) * 5),
                 (alt3_lift, (3,) * 10)]
        for lift, expected in cases:
            assert self._heights(lift) == expected


class TestSignatureTransport:
    def test_renormalized_signature_is_cocycle_step(self, golden_lift):
        pair = P.extract_pair(golden_lift, 0)
        sig0, err0 = P.pair_signature(pair, n_orbit=10 ** 6)
        sig1, err1 = P.pair_signature(P.renormalize(pair), n_orbit=10 ** 6)
        expected = cocycle_step(sig0, NEAREST)
        # the step divides by rho, amplifying the base measurement error
        tol = err1 + err0 / sig0.rho.value()
        assert abs(sig1.delta - expected.delta) < tol

    def test_golden_signature_is_cocycle_fixed(self):
        with mpmath.workdps(60):
            delta0 = (3 - mpmath.sqrt(5)) / 2    # invariant arc length
            deltas = cocycle_orbit(GOLDEN, delta0, 100, NEAREST, dps=60)
            target = float(delta0)
        assert max(abs(d - target) for d in deltas) < 1e-12


class TestConvergence:
    def test_exponential_distance_decay(self, golden_b_lift, golden_c_lift):
        t0 = time.time()
        ns, ds, lam, r2 = L.convergence_experiment(
            golden_b_lift, golden_c_lift, n_max=8, degree=32)
        assert 0.0 < lam < 1.0
        assert r2 > 0.98
        assert time.time() - t0 < 600.0


class TestRealBounds:
    def test_window_across_two_seeds(self, golden_b_lift, golden_c_lift):
        windows = []
        for lift in (golden_b_lift, golden_c_lift):
            rows = L.real_bounds_monitor(lift, n_max=8, degree=32)
            ratios = [r[1] for r in rows if 3 <= r[0] <= 8]
            c1s = [r[2] for r in rows if 3 <= r[0] <= 8]
            assert max(ratios) / min(ratios) < 1.5
            assert max(c1s) / min(c1s) < 1.5
            windows.append(ratios)
        for ra, rb in zip(*windows):
            assert abs(ra - rb) / ra < 0.2


class TestHyperbolicity:
    def test_two_unstable_directions_across_degrees(self, golden_sweep):
        for deg, (sp, rep) in golden_sweep.items():
            assert rep["residual"] < 1e-6, f"degree {deg}"
            assert sp.unstable_count == 2, f"degree {deg}"
            assert sp.neutral_band == [], f"degree {deg}"
            assert sp.degree_drift < 0.05, f"degree {deg}"

    def test_compactness_tail(self, golden_sweep):
        sp, _ = golden_sweep[64]
        mods = np.abs(sp.eigenvalues)
        assert np.all(np.diff(mods) <= 1e-12)   # non-increasing
        assert mods[10] < 0.5


class TestDegenerateGuard:
    def test_collided_chain_detected_and_excluded(self):
        sym = Interval(-1.0, 1.0)
        collided = make_chain([identity_piece(sym), Q, identity_piece(sym),
                               Q, identity_piece(sym)])
        ((loc, order),) = chain_critical_points(collided)
        assert loc == pytest.approx(0.0, abs=1e-12)
        assert order == 9
        degenerate = P.CommutingPair(eta=collided, xi=collided)
        assert L.order_nine_flag(degenerate)
