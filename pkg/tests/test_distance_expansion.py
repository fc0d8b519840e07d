import math

import numpy as np
import pytest

from mink2d import (
    ChordError,
    FixedPointError,
    SphereIsometry,
    Vec2,
    axis_params,
    chord_frame_data,
    chord_map,
    chord_sweep,
    expansion_report,
    mu_second_closed,
    mu_second_fd,
    nu_derivatives_closed,
    nu_derivatives_fd,
    recover_phi_prime,
    special_direction_witness,
    supercurvature,
    write_expansion_csv,
)


def test_euclid_chord_closed_forms(eu_np):
    # circle, chord at b = pi/3 in direction s = 0: all quantities in closed form
    cfd = chord_frame_data(eu_np, math.pi / 3.0, 0.0)
    assert cfd.a == pytest.approx(2.0 * math.pi / 3.0, abs=1e-9)
    assert cfd.d == pytest.approx(1.0, abs=1e-9)
    assert cfd.x == pytest.approx(-math.sqrt(3) / 2.0, abs=1e-9)
    assert cfd.y == pytest.approx(0.5, abs=1e-9)
    assert cfd.u == pytest.approx(-0.5, abs=1e-7)
    assert cfd.v == pytest.approx(-math.sqrt(3) / 2.0, abs=1e-7)
    assert cfd.rho == pytest.approx(1.0, abs=1e-7)
    assert cfd.tau == pytest.approx(0.0, abs=1e-7)
    n1, n2 = nu_derivatives_closed(cfd)
    assert n1 == pytest.approx(-math.sqrt(3) / 2.0, abs=1e-5)
    assert n2 == pytest.approx(-0.25, abs=1e-4)
    assert mu_second_closed(cfd, n2) == pytest.approx(-1.0, abs=1e-3)
    P, _ = supercurvature(eu_np, 0.0)
    assert recover_phi_prime(cfd, n2, P) == pytest.approx(1.0, abs=1e-2)


def test_chord_map_euclid(eu_np):
    # chord through (cos t, sin t) parallel to (1, 0) hits (-cos t, sin t)
    q = chord_map(eu_np, 0.0, Vec2(math.cos(1.0), math.sin(1.0)))
    assert q.x == pytest.approx(-math.cos(1.0), abs=1e-9)
    assert q.y == pytest.approx(math.sin(1.0), abs=1e-9)


def test_chord_map_is_involution(lp3_np):
    p = lp3_np.point_exact(0.9)[0]
    q = chord_map(lp3_np, 0.3, Vec2.from_array(p))
    back = chord_map(lp3_np, 0.3, q)
    assert back.x == pytest.approx(p[0], abs=1e-8)
    assert back.y == pytest.approx(p[1], abs=1e-8)


def test_chord_map_fixed_point_raises(eu_np):
    # the tangency point of direction s: the chord degenerates there
    p = eu_np.point_exact(math.pi / 2.0)[0]
    with pytest.raises(FixedPointError):
        chord_frame_data(eu_np, math.pi / 2.0, 0.0)
    assert abs(chord_map(eu_np, 0.0, Vec2.from_array(p)).y - 1.0) < 1e-6


def test_orientation_mismatch_suggests_antipode(eu_np):
    # direction r(s) points the wrong way along the chord: error names s + L
    with pytest.raises(ChordError, match="s \\+ L"):
        chord_frame_data(eu_np, math.pi / 3.0, math.pi)


def test_closed_vs_fd_lp3(lp3_np):
    rng = np.random.default_rng(7)
    for b, s in chord_sweep(lp3_np, 32, rng):
        cfd = chord_frame_data(lp3_np, b, s)
        (c1, c2) = nu_derivatives_closed(cfd)
        (f1, f2) = nu_derivatives_fd(lp3_np, cfd)
        assert abs(c1 - f1) <= 1e-4 + 1e-3 * abs(c1)
        assert abs(c2 - f2) <= 1e-4 + 1e-3 * abs(c2)


def test_mu_second_closed_vs_fd(lp3_np):
    rng = np.random.default_rng(11)
    for b, s in chord_sweep(lp3_np, 8, rng):
        cfd = chord_frame_data(lp3_np, b, s)
        _, n2 = nu_derivatives_closed(cfd)
        m2c = mu_second_closed(cfd, n2)
        m2f = mu_second_fd(lp3_np, s)
        assert abs(m2c - m2f) <= 1e-3 + 1e-2 * abs(m2c)


def test_recovered_phi_prime_matches_direct(lp3_np):
    from mink2d import phase_derivative
    rng = np.random.default_rng(3)
    for b, s in chord_sweep(lp3_np, 8, rng):
        rep = expansion_report(lp3_np, b, s)
        direct = phase_derivative(lp3_np, s)
        assert rep.phi_prime_recovered == pytest.approx(direct, rel=2e-2, abs=1e-3)


def test_axis_params_lp(lp3_np):
    ax = axis_params(lp3_np)
    L = lp3_np.L
    assert np.allclose(ax, [0.0, L / 2.0, L, 1.5 * L], atol=1e-9)


def test_chord_sweep_respects_exclusion(lp15_np):
    rng = np.random.default_rng(5)
    margin = 5e-2 * lp15_np.L
    ax = axis_params(lp15_np)
    per = lp15_np.perimeter
    for b, s in chord_sweep(lp15_np, 16, rng, exclude_axis_margin=margin):
        for v in (b, s):
            dist = np.min(np.abs((v - ax + lp15_np.L) % per - lp15_np.L))
            assert dist >= margin


def test_special_direction_witness_linear_isometry(lp3_np, lp3_space):
    f = SphereIsometry.linear(lp3_space, lp3_space, [[0, -1], [1, 0]])
    rep = special_direction_witness(f, lp3_np, 0.0, 16)
    assert rep.n_checked == 16
    assert rep.max_residual < 1e-6


def test_special_direction_witness_detects_distortion(eu_np, eu_space):
    from mink2d.norms import chart_points

    def doubling(pts):
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        return chart_points(eu_space, 2.0 * ang)

    f = SphereIsometry.from_callable(eu_space, eu_space, doubling)
    with pytest.raises(ChordError, match="isometry"):
        special_direction_witness(f, eu_np, 0.3, 16)


def test_write_expansion_csv(tmp_path, lp3_np):
    rng = np.random.default_rng(1)
    reports = [expansion_report(lp3_np, b, s) for b, s in chord_sweep(lp3_np, 4, rng)]
    path = tmp_path / "expansion.csv"
    write_expansion_csv(reports, lp3_np, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert len(lines) == 3 + 4
