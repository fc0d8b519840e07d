import math

import numpy as np
import pytest

from mink2d import (
    NonSmoothSpaceError,
    SphereIsometry,
    UnitSpeedError,
    Vec2,
    build_natural_param,
    eval_norm,
    eval_r,
    eval_r_prime,
    pushforward_param,
    write_samples_csv,
)
from mink2d.arclength import ArcLengthChart
from mink2d.norms import chart_points

# Half-lengths frozen from an independent high-precision quadrature of the
# boundary self-arclength (30-digit arithmetic, central differences at 1e-12).
L_EUCLID = math.pi
L_LP15 = 3.259767993059
L_LP3 = 3.259767993059  # p = 1.5 and p = 3 are conjugate exponents: equal L
L_LP4 = 3.39693482362846
L_TRIG005 = 3.141722960123148


@pytest.mark.parametrize("fixture,expected", [
    ("eu_np", L_EUCLID),
    ("lp15_np", L_LP15),
    ("lp3_np", L_LP3),
    ("lp4_np", L_LP4),
    ("trig_np", L_TRIG005),
])
def test_half_length_oracles(request, fixture, expected):
    np_ = request.getfixturevalue(fixture)
    assert np_.L == pytest.approx(expected, abs=1e-8)


def test_half_length_grid_convergence(lp3_space):
    # fixed-node estimates two octaves apart agree to 1e-6 at N = 4096
    l1 = ArcLengthChart(lp3_space, tol=1e9, min_nodes=4096).half_length
    l2 = ArcLengthChart(lp3_space, tol=1e9, min_nodes=8192).half_length
    assert abs(l2 - l1) <= 1e-6


@pytest.mark.parametrize("fixture", ["eu_np", "lp3_np", "lp15_np", "trig_np"])
def test_points_on_sphere(request, fixture):
    np_ = request.getfixturevalue(fixture)
    gn = np_.space.gauge_many(np_.points[:, 0], np_.points[:, 1])
    assert np.max(np.abs(gn - 1.0)) < 1e-9


@pytest.mark.parametrize("fixture", ["eu_np", "lp3_np", "lp15_np", "trig_np"])
def test_unit_speed(request, fixture):
    np_ = request.getfixturevalue(fixture)
    gn = np_.space.gauge_many(np_.tangents[:, 0], np_.tangents[:, 1])
    assert np.max(np.abs(gn - 1.0)) < 1e-7


@pytest.mark.parametrize("fixture", ["eu_np", "lp3_np", "lp15_np", "lp4_np"])
def test_half_period_antipodality(request, fixture):
    np_ = request.getfixturevalue(fixture)
    s = np.linspace(0.0, np_.perimeter, 257)[:-1]
    diff = eval_r(np_, s) + eval_r(np_, s + np_.L)
    gn = np_.space.gauge_many(diff[:, 0], diff[:, 1])
    assert np.max(gn) < 1e-6


def test_full_period(lp3_np):
    s = np.linspace(0.0, lp3_np.perimeter, 65)[:-1]
    diff = eval_r(lp3_np, s) - eval_r(lp3_np, s + lp3_np.perimeter)
    assert np.max(np.abs(diff)) < 1e-9


def test_euclid_closed_form(eu_np):
    s = np.linspace(0.0, 2.0 * math.pi, 129)[:-1]
    pts = eval_r(eu_np, s)
    expect = np.stack([np.cos(s), np.sin(s)], axis=-1)
    assert np.max(np.abs(pts - expect)) < 1e-9
    tans = eval_r_prime(eu_np, s)
    expect_t = np.stack([-np.sin(s), np.cos(s)], axis=-1)
    assert np.max(np.abs(tans - expect_t)) < 1e-7


def test_eval_r_scalar_returns_vec2(lp3_np):
    p = eval_r(lp3_np, 0.0)
    assert isinstance(p, Vec2)
    assert p.x == pytest.approx(1.0, abs=1e-12) and p.y == pytest.approx(0.0, abs=1e-12)


def test_param_of_point_roundtrip(lp3_np):
    for s in (0.1, 1.0, 2.7, 5.5):
        p = lp3_np.point_exact(s)[0]
        s_back = lp3_np.param_of_point(Vec2.from_array(p))
        assert s_back == pytest.approx(s % lp3_np.perimeter, abs=1e-9)


def test_nonsmooth_space_refused(hex_space):
    with pytest.raises(NonSmoothSpaceError) as exc:
        build_natural_param(hex_space, 256)
    assert "corner" in str(exc.value)
    # the reported corner angle matches a hexagon vertex
    assert "1.047" in str(exc.value) or "0.0" in str(exc.value)


def test_pushforward_param_under_linear_isometry(lp3_np, lp3_space):
    f = SphereIsometry.linear(lp3_space, lp3_space, [[-1, 0], [0, -1]])
    np2 = pushforward_param(lp3_np, f)
    assert np2.L == pytest.approx(lp3_np.L, abs=1e-9)
    diff = np2.points + lp3_np.points
    assert np.max(np.abs(diff)) < 1e-9


def test_pushforward_param_rejects_non_unit_speed(eu_np, eu_space):
    def doubling(pts):
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        return chart_points(eu_space, 2.0 * ang)

    f = SphereIsometry.from_callable(eu_space, eu_space, doubling)
    with pytest.raises(UnitSpeedError):
        pushforward_param(eu_np, f)


def test_write_samples_csv(tmp_path, lp3_np):
    path = tmp_path / "samples.csv"
    write_samples_csv(lp3_np, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert "norm=lp" in lines[1]
    assert lines[2] == "s,px,py,tx,ty"
    assert len(lines) == 3 + lp3_np.grid_size
    s0, px, py, tx, ty = map(float, lines[3].split(","))
    assert (s0, px, py) == (0.0, 1.0, 0.0)
