"""The scalar-identity lab: Gamma ratios, beta integrals, volume products."""

import math

import numpy as np
import pytest

from roundkit import bodies as bd
from roundkit import inequalities as iq
from roundkit.linear import RngStream
from roundkit.measure import unit_ball_volume


def test_gamma_ratio_exact_small_values():
    assert iq.gamma_ratio(2) == pytest.approx(0.5, rel=1e-10)
    assert iq.gamma_ratio(4) == pytest.approx(1.0 / 56.0, rel=1e-10)


def test_stirling_rows_exact_anchors():
    rows = {row.n: row for row in iq.stirling_table(60)}
    assert rows[2].f_times_4n == pytest.approx(8.0, rel=1e-10)
    assert rows[4].f_times_4n == pytest.approx(32.0 / 7.0, rel=1e-10)
    assert rows[3].f_times_4n > 1.0


def test_stirling_product_above_one_and_decreasing():
    rows = iq.stirling_table(60)
    values = {row.n: row.f_times_4n for row in rows}
    for n in range(2, 61):
        assert values[n] > 1.0
    for n in range(4, 61):
        assert values[n] < values[n - 2]


def test_corrected_variant_also_above_one():
    # replacing the n-1 constant by n+1 scales f by (n-1)/(n+1); the needed
    # inequality survives the correction
    for n in range(2, 61):
        adjusted = iq.gamma_ratio(n) * (n - 1) / (n + 1)
        assert adjusted * 4.0**n > 1.0


def test_ratio_check_factor_four_discrepancy():
    report = iq.ratio_check(20)
    assert report["all_below_one_quarter"]
    first = report["rows"][0]
    assert first["n"] == 2
    assert first["computed"] == pytest.approx(1.0 / 28.0, rel=1e-10)
    assert first["displayed_form"] == pytest.approx(1.0 / 7.0, rel=1e-12)
    assert first["derived_form"] == pytest.approx(1.0 / 28.0, rel=1e-12)
    for row in report["rows"]:
        assert row["computed"] < 0.25
        assert row["derived_mismatch"] <= 1e-10
        assert row["displayed_mismatch"] == pytest.approx(3.0, rel=1e-9)  # 4x off


@pytest.mark.parametrize("n", range(1, 16))
def test_beta_integral_quadrature(n):
    quadrature, closed = iq.beta_integral_check(n)
    assert quadrature == pytest.approx(closed, rel=1e-10)


def test_beta_integral_known_values():
    assert iq.beta_integral_check(1)[1] == pytest.approx(0.5, rel=1e-15)
    assert iq.beta_integral_check(2)[1] == pytest.approx(1.0 / 12.0, rel=1e-14)
    assert iq.beta_integral_check(5)[1] == pytest.approx(
        math.factorial(4) * math.factorial(5) / math.factorial(10), rel=1e-14
    )


def test_slice_identity_unit_ball_discriminates_constant():
    lhs, rhs_displayed, rhs_derived = iq.slice_identity_check(2, bd.ball(4), 30_000, RngStream(1))
    assert lhs.value == pytest.approx(1.0, rel=1e-12)
    assert abs(rhs_derived.value - 1.0) <= 3.0 * rhs_derived.std_error
    # displayed constant is (n+1)/(n-1) = 3x too large at n = 2
    assert rhs_displayed.value == pytest.approx(3.0 * rhs_derived.value, rel=1e-12)


def test_slice_identity_cube_and_ellipsoid():
    for body, seed in [(bd.cube(4), 2), (bd.linear_image(np.diag([1.5, 1.0, 0.8, 1.2]), bd.ball(4)), 3)]:
        lhs, _, rhs_derived = iq.slice_identity_check(2, body, 100_000, RngStream(seed))
        sigma = math.hypot(lhs.std_error, rhs_derived.std_error)
        assert abs(lhs.value - rhs_derived.value) <= 3.0 * sigma


def test_suspension_segment_closed_form():
    report = iq.suspension_bound_check(bd.cube(1), 1.0, 10_000, RngStream(4))
    assert report["formula"] == pytest.approx(2.0, rel=1e-12)
    assert report["cone"].value == pytest.approx(2.0, rel=1e-12)
    assert report["cone_matches"]


def test_suspension_disk_height_two():
    report = iq.suspension_bound_check(bd.ball(2), 2.0, 200_000, RngStream(5))
    assert report["formula"] == pytest.approx(4.0 * math.pi / 6.0, rel=1e-12)
    assert report["cone_matches"]
    assert report["cylinder_exceeds"]


def test_suspension_enlarged_body_strictly_larger():
    report = iq.suspension_bound_check(bd.cross_polytope(3), 1.5, 200_000, RngStream(6))
    assert report["cone_matches"]
    assert report["cylinder"].value > report["formula"]


def test_santalo_cube_cross_pair():
    rows = iq.santalo_sweep([("cube_2", bd.cube(2))], 10_000, RngStream(7))
    assert rows[0].mahler == pytest.approx(8.0, rel=1e-9)
    assert rows[0].normalized == pytest.approx(8.0 / math.pi**2, rel=1e-9)
    assert rows[0].std_error == 0.0  # both volumes closed-form


def test_santalo_sweep_bounds():
    rows = iq.santalo_sweep(iq.default_sweep_bodies(6), 50_000, RngStream(8))
    for row in rows:
        assert row.normalized <= 1.0 + 3.0 * row.std_error + 1e-9
        if row.body_name.startswith(("ball", "ellipsoid")):
            assert abs(row.normalized - 1.0) <= 3.0 * row.std_error + 1e-9
        if row.n >= 4:
            assert row.normalized >= iq.reverse_bound(row.n)


def test_santalo_cube4_value():
    rows = iq.santalo_sweep([("cube_4", bd.cube(4))], 10_000, RngStream(9))
    expected = (16.0 * 2.0 / 3.0) / unit_ball_volume(4) ** 2
    assert rows[0].normalized == pytest.approx(expected, rel=1e-9)
    assert rows[0].normalized >= iq.reverse_bound(4) == 1.0 / 16.0


def test_findings_report_structure():
    report = iq.findings_report(20, slice_samples=20_000, rng=RngStream(10))
    ids = {f["id"] for f in report["findings"]}
    assert ids == {"two-step-ratio-denominator", "slice-integral-constant", "large-n-trend"}
    trend = next(f for f in report["findings"] if f["id"] == "large-n-trend")
    observed = {row["n"]: row["f_times_4n"] for row in trend["observed"]}
    assert observed[60] == pytest.approx(2.918, abs=0.01)


def test_write_tables(tmp_path):
    iq.write_tables(str(tmp_path), n_max=12, samples=5000, rng=RngStream(11))
    for name in ("stirling.csv", "ratio.csv", "beta.csv", "santalo.csv", "findings.json"):
        assert (tmp_path / name).exists()
    header = (tmp_path / "stirling.csv").read_text().splitlines()[0]
    assert header == "n,f_n,f_times_4n,ratio_to_prev"
