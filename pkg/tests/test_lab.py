"""Tests for the experiment layer: charts, Jacobians, spectra, monitors.

The fixed point, its chart and its Jacobian are shared module-scoped
fixtures: each costs minutes at degree 32, and every spectral property
below is a different read of the same objects.
"""

import json
import warnings

import numpy as np
import pytest

import circren.lab as L
import circren.pairs as P
from circren.chains import CollisionWarning
from circren.errors import ConfigError, SolverFailure

DEG = 32


@pytest.fixture(scope="module", autouse=True)
def _quiet_collisions():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CollisionWarning)
        yield


@pytest.fixture(scope="module")
def golden_fp(golden_lift):
    pair, rep = L.fixed_point_refine(golden_lift, n_iter=14, degree=DEG)
    assert rep["residual"] < 1e-6, "refinement stagnated"
    return pair, rep


@pytest.fixture(scope="module")
def golden_chart(golden_fp):
    pair, rep = golden_fp
    chart = L.make_chart(pair)
    return chart, chart.coordinates(pair), rep["heights"]


@pytest.fixture(scope="module")
def golden_jacobian(golden_chart):
    chart, v, heights = golden_chart
    return L.jacobian_fd(chart, v, heights, degree=DEG)


class TestChart:
    def test_round_trip_on_template(self, golden_fp):
        pair, _ = golden_fp
        chart = L.make_chart(pair)
        v = chart.coordinates(pair)
        back = chart.coordinates(chart.from_coordinates(v))
        assert np.max(np.abs(back - v)) < 1e-12

    def test_round_trip_preserves_values(self, golden_fp):
        from circren.chains import chain_eval
        pair, _ = golden_fp
        chart = L.make_chart(pair)
        q = chart.from_coordinates(chart.coordinates(pair))
        xs = np.linspace(pair.eta.domain.lo, pair.eta.domain.hi, 40)
        got = chain_eval(q.eta, xs, tol=np.inf)
        want = chain_eval(pair.eta, xs, tol=np.inf)
        assert np.max(np.abs(got - want)) < 1e-10

    def test_dimension_mismatch_raises(self, golden_chart):
        chart, v, _ = golden_chart
        with pytest.raises(Exception):
            chart.from_coordinates(v[:-1])

    def test_step_is_near_identity_at_fixed_point(self, golden_chart):
        chart, v, heights = golden_chart
        out = L.chart_step(chart, v, heights, degree=DEG)
        assert np.max(np.abs(out - v)) < 1e-6

    def test_height_flip_guard(self, golden_chart):
        chart, v, _ = golden_chart
        with pytest.raises(SolverFailure):
            L.chart_step(chart, v, (7,), degree=DEG)


class TestJacobian:
    def test_directional_derivative_cross_check(self, golden_chart,
                                                golden_jacobian):
        chart, v, heights = golden_chart
        rng = np.random.default_rng(7)
        u = rng.standard_normal(len(v))
        u /= np.linalg.norm(u)
        h = 1e-6
        fd = (L.chart_step(chart, v + h * u, heights, degree=DEG)
              - L.chart_step(chart, v - h * u, heights, degree=DEG)) / (2 * h)
        Ju = golden_jacobian @ u
        rel = np.linalg.norm(fd - Ju) / np.linalg.norm(Ju)
        assert rel < 1e-3

    def test_linearity_half_step(self, golden_chart):
        chart, v, heights = golden_chart
        rng = np.random.default_rng(11)
        u = rng.standard_normal(len(v))
        u /= np.linalg.norm(u)
        h = 1e-5

        def deriv(step):
            return (L.chart_step(chart, v + step * u, heights, degree=DEG)
                    - L.chart_step(chart, v - step * u, heights,
                                   degree=DEG)) / (2 * step)

        d1, d2 = deriv(h), deriv(h / 2)
        assert np.linalg.norm(d1 - d2) / np.linalg.norm(d1) < 1e-3

    def test_scale_redundancy_mode_vanishes(self, golden_lift):
        # rescaling both chains by s and the argument by 1/s is killed by
        # canonicalization: renormalizing the rescaled pair gives back the
        # renormalization of the original
        pair = P.normalize(P.extract_pair(golden_lift, 0, degree=DEG),
                           degree=DEG)
        r0 = P.renormalize(pair, degree=DEG)
        s = 1.0 + 1e-4
        from circren.chains import chain_rescale
        scaled = P.CommutingPair(eta=chain_rescale(pair.eta, s),
                                 xi=chain_rescale(pair.xi, s),
                                 provenance=pair.provenance)
        r1 = P.renormalize(scaled, degree=DEG)
        assert P.pair_distance(r0, r1) < 1e-9


class TestTangentSpace:
    def test_jet_vanishes_at_fixed_point(self, golden_chart):
        chart, v, _ = golden_chart
        jet = L.commutation_defect_jet(chart, v, 3)
        assert np.max(np.abs(jet)) < 1e-6

    def test_jet_detects_broken_commutation(self, golden_chart):
        chart, v, _ = golden_chart
        w = v.copy()
        w[0] += 1e-3          # shift the inner eta piece only
        jet = L.commutation_defect_jet(chart, w, 3)
        assert np.max(np.abs(jet)) > 1e-5

    def test_pinning_rows_vanish_on_valid_pairs(self, golden_chart):
        chart, v, _ = golden_chart
        assert np.max(np.abs(L._pinning_rows(chart) @ v)) < 1e-9

    def test_basis_orthonormal(self, golden_chart):
        chart, v, _ = golden_chart
        Q = L.tangent_basis(chart, v, m=4)
        err = np.max(np.abs(Q.T @ Q - np.eye(Q.shape[1])))
        assert err < 1e-12
        # codimension = rank of the constraint stack (some jet rows are
        # linearly dependent on the pinning rows), bounded by m+1+2
        codim = Q.shape[0] - Q.shape[1]
        assert 3 <= codim <= 4 + 1 + 2

    def test_basis_annihilated_by_constraints(self, golden_chart):
        chart, v, _ = golden_chart
        Q = L.tangent_basis(chart, v, m=4)
        G = L._defect_rows(chart, v, m=4)
        assert np.max(np.abs(G @ Q)) < 1e-8
        assert np.max(np.abs(L._pinning_rows(chart) @ Q)) < 1e-8


class TestSpectrum:
    def test_identity_matrix(self):
        rep = L.spectrum(np.eye(5))
        assert rep.unstable_count == 0
        assert np.allclose(rep.eigenvalues, 1.0)
        assert len(rep.neutral_band) == 5

    def test_counts_consistent(self):
        J = np.diag([3.0, -1.4, 1.02, 0.5, 0.1])
        rep = L.spectrum(J, margin=0.05)
        assert rep.unstable_count == 2
        assert [abs(z) for z in rep.neutral_band] == [1.02]

    def test_golden_unstable_pair(self, golden_jacobian, golden_chart):
        chart, v, _ = golden_chart
        Q = L.tangent_basis(chart, v)
        rep = L.spectrum(L.restrict_jacobian(golden_jacobian, Q))
        assert rep.unstable_count == 2
        assert rep.neutral_band == []
        mods = np.abs(rep.eigenvalues)
        assert mods[0] == pytest.approx(3.312, abs=0.05)
        assert mods[1] == pytest.approx(1.401, abs=0.02)

    def test_restriction_keeps_leading_eigenvalue(self, golden_jacobian,
                                                  golden_chart):
        chart, v, _ = golden_chart
        Q = L.tangent_basis(chart, v)
        full = np.linalg.eigvals(golden_jacobian)
        restr = np.linalg.eigvals(L.restrict_jacobian(golden_jacobian, Q))
        top_full = full[np.argmax(np.abs(full))]
        top_restr = restr[np.argmax(np.abs(restr))]
        assert abs(top_full - top_restr) < 1e-2 * abs(top_full)

    def test_classified_spectrum_golden(self, golden_jacobian, golden_chart):
        chart, v, _ = golden_chart
        kept, dropped = L.classify_modes(chart, v, golden_jacobian)
        rep = L.SpectralReport.from_eigenvalues(kept)
        assert rep.unstable_count == 2
        assert rep.neutral_band == []
        mods = np.abs(rep.eigenvalues)
        assert mods[0] == pytest.approx(3.312, abs=0.05)
        assert mods[1] == pytest.approx(1.401, abs=0.02)
        # the scale-gauge mirror and the unit gauge mode are filtered out
        dz = [z for z, _ in dropped]
        assert any(abs(z - 2.749) < 0.05 for z in dz)
        assert any(abs(abs(z) - 1.0) < 0.05 for z in dz)

    def test_eigenvector_angle_golden(self, golden_jacobian, golden_chart):
        chart, v, _ = golden_chart
        A = L.restrict_jacobian(golden_jacobian,
                                L.tangent_basis(chart, v))
        assert L.eigenvector_angle(A) > 0.1

    def test_order_nine_flag_negative(self, golden_fp):
        pair, _ = golden_fp
        assert not L.order_nine_flag(pair)


class TestExperiments:
    def test_convergence_golden(self, golden_b_lift, golden_c_lift):
        ns, ds, lam, r2 = L.convergence_experiment(
            golden_b_lift, golden_c_lift, n_max=8, degree=DEG)
        assert all(ds[n + 1] < ds[n] for n in range(2, 7))
        assert 0.0 < lam < 1.0
        assert r2 > 0.98

    def test_convergence_same_map(self, golden_lift):
        _, ds, _, _ = L.convergence_experiment(
            golden_lift, golden_lift, n_max=3, degree=DEG)
        assert max(ds) < 1e-10

    def test_convergence_signature_mismatch(self, golden_lift, alt_lift):
        with pytest.raises(ConfigError):
            L.convergence_experiment(golden_lift, alt_lift, n_max=2,
                                     degree=DEG)

    def test_real_bounds_window(self, golden_lift):
        rows = L.real_bounds_monitor(golden_lift, n_max=8, degree=DEG)
        assert [r[0] for r in rows] == list(range(9))
        ratios = [r[1] for r in rows if r[0] >= 3]
        c1s = [r[2] for r in rows if r[0] >= 3]
        assert all(r > 0 for r in ratios)
        assert max(ratios) / min(ratios) < 1.5
        assert max(c1s) / min(c1s) < 1.5

    def test_real_bounds_universality(self, golden_lift, golden_b_lift):
        rows_a = L.real_bounds_monitor(golden_lift, n_max=6, degree=DEG)
        rows_b = L.real_bounds_monitor(golden_b_lift, n_max=6, degree=DEG)
        for (na, ra, _), (nb, rb, _) in zip(rows_a[3:], rows_b[3:]):
            assert na == nb
            assert abs(ra - rb) / ra < 0.2

    def test_refined_pair_validates(self, golden_fp):
        pair, _ = golden_fp
        rep = P.pair_validate(pair)
        assert rep.commutation_residual < 1e-8


class TestArtifacts:
    def test_format_float_round_trips(self):
        xs = [0.1, 1.0 / 3.0, -2.5e-17, 3.3124]
        assert all(float(L.format_float(x)) == x for x in xs)

    def test_write_csv(self, tmp_path):
        path = tmp_path / "t.csv"
        L.write_csv(path, ["n", "d"], [(0, 0.5), (1, 0.25)])
        lines = path.read_text().splitlines()
        assert lines[0] == "n,d"
        assert lines[1].split(",") == ["0", "0.5"]

    def test_manifest_contents(self, tmp_path):
        import time
        path = tmp_path / "m.json"
        cfg = {"degree": 32, "seed": 1}
        L.write_manifest(path, cfg, ["a.csv"], time.time())
        man = json.loads(path.read_text())
        assert man["config"] == cfg
        assert man["config_hash"] == L.config_hash(cfg)
        assert man["artifacts"] == ["a.csv"]
        assert man["wall_time_s"] >= 0

    def test_config_hash_stable(self):
        assert (L.config_hash({"a": 1, "b": 2})
                == L.config_hash({"b": 2, "a": 1}))
