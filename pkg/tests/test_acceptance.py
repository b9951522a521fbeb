"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from roundkit import bodies as bd
from roundkit import engine as eg
from roundkit import fitting as ft
from roundkit import inequalities as iq
from roundkit import measure as ms
from roundkit.linear import RngStream, orthonormalize, sphere_sample_many


@contextmanager
def criterion(num, text):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {num:2d}: {text}")
        raise
    print(f"[PASS] criterion {num:2d}: {text}")


def test_criterion_1_unit_ball_volumes():
    with criterion(1, "unit-ball volumes for dimensions 1-4 at relative 1e-12"):
        targets = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0, 4: math.pi**2 / 2.0}
        for k, target in targets.items():
            assert ms.unit_ball_volume(k) == pytest.approx(target, rel=1e-12)


def _random_ellipsoid(dim, seed):
    g = RngStream(seed).normal((dim, dim))
    return bd.Ellipsoid(g @ g.T + dim * np.eye(dim))


def test_criterion_2_sphere_integral_volumes():
    with criterion(2, "Monte Carlo volumes match exact volumes (3 sigma, dims 2-6, 1e5 samples)"):
        for dim in range(2, 7):
            families = [
                ("cube", bd.cube(dim)),
                ("cross", bd.cross_polytope(dim)),
                ("lp3", bd.LpBall(dim, 3.0)),
                ("ellipsoid", _random_ellipsoid(dim, 40 + dim)),
            ]
            for index, (name, body) in enumerate(families):
                est = ms.mc_volume(body, bd.ball(dim), 100_000, RngStream(1400 + dim, index))
                exact = ms.exact_volume(body)
                assert exact is not None
                assert est.within(exact), f"{name} dim {dim}: {est.value} vs {exact}"


def test_criterion_3_moment_identity():
    with criterion(3, "gauge-moment identity lhs vs rhs (3 sigma, dims 2-4, k in 0..2)"):
        for dim in (2, 3, 4):
            for name, body in [("cube", bd.cube(dim)), ("cross", bd.cross_polytope(dim))]:
                for k_exp in (0, 1, 2):
                    lhs, rhs = ms.mc_gauge_moment(
                        body, bd.ball(dim), k_exp, 100_000, RngStream(2000 + dim, k_exp)
                    )
                    sigma = math.hypot(lhs.std_error, rhs.std_error)
                    assert abs(lhs.value - rhs.value) <= 3.0 * sigma, (name, dim, k_exp)


def test_criterion_4_random_slice_averaging():
    with criterion(4, "random-slice averaging matches full-sphere integrals (3 sigma)"):
        full, averaged = ms.slice_average_experiment(
            lambda pts: pts[:, 0] ** 2, 4, 2, outer=400, inner=800, rng=RngStream(3001)
        )
        sigma = math.hypot(full.std_error, averaged.std_error)
        assert abs(full.value - averaged.value) <= 3.0 * sigma
        assert abs(full.value - 0.25) <= 3.0 * full.std_error  # exact 1/n cross-check

        gauge_f = lambda pts: bd.cube(4).gauge_many(pts) ** -4.0
        full, averaged = ms.slice_average_experiment(
            gauge_f, 4, 3, outer=400, inner=800, rng=RngStream(3002)
        )
        sigma = math.hypot(full.std_error, averaged.std_error)
        assert abs(full.value - averaged.value) <= 3.0 * sigma


def test_criterion_5_volume_products():
    with criterion(5, "volume products: upper bound, ellipsoid equality, reverse bound n>=4"):
        rows = iq.santalo_sweep(iq.default_sweep_bodies(6), 100_000, RngStream(3003))
        assert len(rows) >= 30
        for row in rows:
            assert row.normalized <= 1.0 + 3.0 * row.std_error + 1e-9, row
            if row.body_name.startswith(("ball", "ellipsoid")):
                assert abs(row.normalized - 1.0) <= 3.0 * row.std_error + 1e-9, row
            if row.n >= 4:
                assert row.normalized >= iq.reverse_bound(row.n), row
        pair = iq.santalo_sweep([("cube_2", bd.cube(2))], 1000, RngStream(3004))[0]
        assert pair.normalized == pytest.approx(8.0 / math.pi**2, rel=1e-9)


def test_criterion_6_gamma_inequality_and_discrepancies():
    with criterion(6, "Gamma inequality f*4^n > 1 through n=60, anchors exact, ratios < 1/4"):
        rows = {row.n: row for row in iq.stirling_table(60)}
        for n in range(2, 61):
            assert rows[n].f_times_4n > 1.0
        assert rows[2].f_times_4n == pytest.approx(8.0, rel=1e-10)
        assert rows[4].f_times_4n == pytest.approx(32.0 / 7.0, rel=1e-10)
        report = iq.ratio_check(60)
        assert report["all_below_one_quarter"]
        findings = iq.findings_report(60, slice_samples=20_000, rng=RngStream(3005))
        ids = {f["id"] for f in findings["findings"]}
        assert "two-step-ratio-denominator" in ids
        assert "slice-integral-constant" in ids


def test_criterion_7_beta_integral():
    with criterion(7, "beta integral quadrature vs factorial form (relative 1e-10, n<=15)"):
        for n in range(1, 16):
            quadrature, closed = iq.beta_integral_check(n)
            assert quadrature == pytest.approx(closed, rel=1e-10)


def test_criterion_8_john_fitting():
    with criterion(8, "inscribed ellipsoids: square -> disk, cubes sqrt(n)-round, sandwich"):
        disk = ft.john_inscribed(bd.cube(2), eps=1e-6)
        assert np.abs(disk.q - np.eye(2)).max() <= 1e-5
        for n in (2, 3, 4):
            cert = ft.roundness(bd.cube(n), bd.ball(n), rng=RngStream(3100 + n))
            assert cert.exact
            assert cert.s == pytest.approx(math.sqrt(n), rel=1e-12)
        for body, seed in [
            (bd.cube(3), 1),
            (bd.random_h_polytope(4, 12, RngStream(3200), spread=0.4), 2),
            (bd.random_v_polytope(3, 9, RngStream(3201), spread=0.4), 3),
        ]:
            e = ft.john_inscribed(body, eps=1e-6)
            cert = ft.roundness(body, e, probes=10_000, rng=RngStream(3300 + seed))
            assert cert.inner_check <= 1.0 + 1e-6
            assert cert.s <= math.sqrt(body.dim) * (1.0 + 1e-6) + 1e-9


def _k0_body(index):
    r = RngStream(4000 + index)
    kind = index % 4
    if kind == 0:
        return bd.linear_image(np.eye(4) + 0.35 * r.normal((4, 4)), bd.cube(4))
    if kind == 1:
        return bd.LpBall(4, [1.0, 1.5, 2.5, 4.0, np.inf][index // 4 % 5])
    if kind == 2:
        return bd.random_v_polytope(4, 12, r, spread=0.4)
    return bd.linear_image(np.eye(4) + 0.35 * r.normal((4, 4)), bd.cross_polytope(4))


def test_criterion_9_theorem_k0_regression():
    with criterion(9, "base case end-to-end: 20 seeded 4-dim bodies, verified s_final <= 256"):
        start = time.time()
        for index in range(20):
            cert = eg.run_theorem(_k0_body(index), 0, 2, rng=RngStream(4100 + index))
            assert cert.final_dim == 2
            assert cert.s_final <= 256.0
            assert cert.verified, index
        ball_cert = eg.run_theorem(bd.ball(4), 0, 2, rng=RngStream(4199))
        assert abs(ball_cert.s_final - 1.0) <= 1e-9
        elapsed = time.time() - start
        assert elapsed < 120.0, f"k=0 regression took {elapsed:.1f}s"


def test_criterion_10_theorem_k1():
    with criterion(10, "depth-1 induction: 8-dim bodies to verified 2-dim certificates"):
        start = time.time()
        assert (2.0 * eg.theorem_bound(1)) ** (2.0 / 3.0) == pytest.approx(8.0, abs=1e-12)
        bodies = [
            bd.cube(8),
            bd.LpBall(8, 3.0),
            bd.random_h_polytope(8, 24, RngStream(4200), spread=0.3),
            bd.linear_image(np.diag([3.0, 2.0, 1.0, 1.0, 0.5, 1.0, 2.0, 1.0]), bd.ball(8)),
            bd.linear_image(6.3 * np.eye(8), bd.cube(8)),  # forces the dual branch
        ]
        witnesses = [None, None, None, None, bd.ball(8)]
        flipped = 0
        for index, (body, witness) in enumerate(zip(bodies, witnesses)):
            cert = eg.run_theorem(body, 1, 2, rng=RngStream(4300 + index), witness=witness)
            assert cert.final_dim == 2
            assert cert.s_final <= 256.0
            assert cert.verified, index
            flipped += any(t.parity_flip for t in cert.trace)
        assert flipped >= 1
        elapsed = time.time() - start
        assert elapsed < 600.0, f"k=1 runs took {elapsed:.1f}s"


def test_criterion_11_corollary_driver():
    with criterion(11, "John-driven extraction at N = 4, 6, 8 with the documented depth rule"):
        for dim in (4, 6, 8):
            cert = eg.run_corollary(bd.cube(dim), rng=RngStream(4400 + dim))
            k = cert.meta["k"]
            assert eg.theorem_bound(k) >= math.sqrt(cert.meta["certified_q"])
            assert k == 0 or eg.theorem_bound(k - 1) < math.sqrt(cert.meta["certified_q"])
            assert cert.final_dim == dim // (2 ** (k + 1))
            assert cert.verified
            assert cert.s_final <= 256.0


def test_criterion_12_duality_and_frames():
    with criterion(12, "duality identities and frame reconstruction at 1e-6 on 1e3 probes"):
        # polar of polar is the identity on gauges
        for body in (bd.cube(3), bd.random_h_polytope(3, 9, RngStream(4500)), bd.LpBall(3, 1.5)):
            pts = sphere_sample_many(3, 1000, RngStream(4501))
            np.testing.assert_allclose(
                body.polar().polar().gauge_many(pts), body.gauge_many(pts), atol=1e-9
            )
        # slice of the body and projection of the polar are dual
        w = orthonormalize(RngStream(4502).normal((2, 4)))
        for body in (bd.cube(4), bd.LpBall(4, 3.0)):
            lhs = bd.slice(body, w).polar()
            rhs = bd.project(body.polar(), w)
            pts = sphere_sample_many(2, 1000, RngStream(4503))
            np.testing.assert_allclose(lhs.gauge_many(pts), rhs.gauge_many(pts), atol=1e-7)
        # frame reconstruction agrees with the pipeline body, primal and dual
        primal = eg.run_theorem(bd.cube(4), 0, 2, rng=RngStream(4504))
        report = eg.verify_certificate(bd.cube(4), primal, 1000, RngStream(4505))
        assert report.passed and report.gauge_mismatch <= 1e-6
        crafted = bd.linear_image(6.3 * np.eye(8), bd.cube(8))
        dual = eg.run_theorem(crafted, 1, 2, rng=RngStream(2), witness=bd.ball(8))
        assert dual.frame.parity == "dual"
        report = eg.verify_certificate(crafted, dual, 1000, RngStream(4506))
        assert report.passed and report.gauge_mismatch <= 1e-6
