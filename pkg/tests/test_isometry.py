import json
import math

import numpy as np
import pytest

from mink2d import (
    IsometryError,
    LinearMap2,
    SphereIsometry,
    Vec2,
    antipodality_check,
    apply_many,
    load_isometry_spec,
    mazur_ulam_check,
    reconstruct_linear_extension,
    recover_param_line_isometry,
    verify_extension,
    verify_isometry,
)
from mink2d.norms import chart_points


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return [[c, -s], [s, c]]


def test_verify_rotation_on_euclid(eu_space):
    for theta in (0.3, 1.1, 2.9):
        f = SphereIsometry.linear(eu_space, eu_space, _rotation(theta))
        assert verify_isometry(f, 256) <= 1e-12
        assert antipodality_check(f, 128) <= 1e-12


def test_verify_dihedral_on_lp3(lp3_space):
    mats = [_rotation(math.pi / 2), [[-1, 0], [0, 1]], [[1, 0], [0, -1]],
            [[0, 1], [1, 0]], [[-1, 0], [0, -1]]]
    for m in mats:
        f = SphereIsometry.linear(lp3_space, lp3_space, m)
        assert verify_isometry(f, 256) <= 1e-10
        assert antipodality_check(f, 128) <= 1e-10


def test_generic_rotation_is_not_lp_isometry(lp3_space):
    f = SphereIsometry.linear(lp3_space, lp3_space, _rotation(0.4))
    assert verify_isometry(f, 256) > 1e-3


def test_angle_doubling_detected(eu_space):
    def doubling(pts):
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        return chart_points(eu_space, 2.0 * ang)

    f = SphereIsometry.from_callable(eu_space, eu_space, doubling)
    assert verify_isometry(f, 256) >= 0.1


def test_recover_param_line_rotation(lp3_space, lp3_np):
    f = SphereIsometry.linear(lp3_space, lp3_space, _rotation(math.pi / 2))
    a, b, res = recover_param_line_isometry(f, lp3_np, lp3_np)
    assert a == 1
    assert b == pytest.approx(lp3_np.L / 2.0, abs=1e-8)
    assert res < 1e-8


def test_recover_param_line_reflection(lp3_space, lp3_np):
    f = SphereIsometry.linear(lp3_space, lp3_space, [[1, 0], [0, -1]])
    a, b, res = recover_param_line_isometry(f, lp3_np, lp3_np)
    assert a == -1
    assert res < 1e-8


def test_param_kind_round_trip(lp3_np):
    f = SphereIsometry.param(lp3_np, lp3_np, 1, lp3_np.L / 2.0)
    assert verify_isometry(f, 256) <= 1e-7
    a, b, res = recover_param_line_isometry(f, lp3_np, lp3_np)
    assert (a, round(b, 6)) == (1, round(lp3_np.L / 2.0, 6))


def test_samples_kind_validates_on_sphere(lp3_np, lp3_space):
    good = lp3_np.points @ np.array([[0.0, 1.0], [-1.0, 0.0]])
    f = SphereIsometry.samples(lp3_np, lp3_space, good)
    assert verify_isometry(f, 256) <= 1e-6
    with pytest.raises(IsometryError):
        SphereIsometry.samples(lp3_np, lp3_space, 1.5 * good)


def test_reconstruct_linear_extension(lp3_space, lp3_np):
    f = SphereIsometry.linear(lp3_space, lp3_space, _rotation(math.pi / 2))
    p1 = Vec2.from_array(lp3_np.point_exact(0.0)[0])
    p2 = Vec2.from_array(lp3_np.point_exact(0.7)[0])
    T = reconstruct_linear_extension(f, p1, p2)
    assert np.allclose(T.matrix, _rotation(math.pi / 2), atol=1e-9)
    chk = verify_extension(T, f, 512)
    assert chk.max_point_error <= 1e-9
    assert chk.norm_distortion <= 1e-9


def test_anchor_pair_independence(lp3_space, lp3_np):
    f = SphereIsometry.linear(lp3_space, lp3_space, [[0, 1], [1, 0]])
    mats = []
    for s1, s2 in [(0.0, 0.7), (1.1, 2.3), (0.4, 5.0)]:
        p1 = Vec2.from_array(lp3_np.point_exact(s1)[0])
        p2 = Vec2.from_array(lp3_np.point_exact(s2)[0])
        mats.append(reconstruct_linear_extension(f, p1, p2).matrix)
    for m in mats[1:]:
        assert np.max(np.abs(m - mats[0])) <= 1e-7


def test_reconstruct_rejects_dependent_anchors(eu_space):
    f = SphereIsometry.linear(eu_space, eu_space, _rotation(0.2))
    with pytest.raises(IsometryError):
        reconstruct_linear_extension(f, Vec2(1.0, 0.0), Vec2(-1.0, 0.0))


def test_mazur_ulam_pass(lp3_space, lp3_np):
    f = SphereIsometry.linear(lp3_space, lp3_space, _rotation(math.pi / 2))
    rep = mazur_ulam_check(lp3_space, f, lp3_np, lp3_np)
    assert rep.passed
    assert rep.failures == []
    d = rep.to_dict()
    assert d["status"] == "PASS"
    assert json.loads(rep.to_json())["status"] == "PASS"


def test_mazur_ulam_fail_aggregates(eu_space, eu_np):
    def doubling(pts):
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        return chart_points(eu_space, 2.0 * ang)

    f = SphereIsometry.from_callable(eu_space, eu_space, doubling)
    rep = mazur_ulam_check(eu_space, f, eu_np, eu_np)
    assert not rep.passed
    assert rep.distortion >= 0.1
    assert any("distortion" in msg for msg in rep.failures)


def test_load_isometry_spec_linear(tmp_path, lp3_np):
    path = tmp_path / "iso.json"
    path.write_text(json.dumps({"kind": "linear", "matrix": [[0, -1], [1, 0]]}))
    f = load_isometry_spec(path, lp3_np, lp3_np)
    assert f.kind == "linear"
    assert verify_isometry(f, 128) <= 1e-10


def test_load_isometry_spec_param(tmp_path, lp3_np):
    path = tmp_path / "iso.json"
    path.write_text(json.dumps({"kind": "param", "a": 1, "b": 0.5}))
    f = load_isometry_spec(path, lp3_np, lp3_np)
    assert f.kind == "param"


def test_load_isometry_spec_samples(tmp_path, lp3_np):
    img = lp3_np.points @ np.array([[0.0, 1.0], [-1.0, 0.0]])
    csv_path = tmp_path / "map.csv"
    lines = ["sx,sy,tx,ty"]
    lines += [f"{p[0]:.15g},{p[1]:.15g},{q[0]:.15g},{q[1]:.15g}"
              for p, q in zip(lp3_np.points, img)]
    csv_path.write_text("\n".join(lines) + "\n")
    path = tmp_path / "iso.json"
    path.write_text(json.dumps({"kind": "samples", "file": "map.csv"}))
    f = load_isometry_spec(path, lp3_np, lp3_np)
    assert verify_isometry(f, 128) <= 1e-6


def test_load_isometry_spec_rejects_unknown(tmp_path, lp3_np):
    path = tmp_path / "iso.json"
    path.write_text(json.dumps({"kind": "teleport"}))
    with pytest.raises(IsometryError):
        load_isometry_spec(path, lp3_np, lp3_np)
    path.write_text(json.dumps({"kind": "linear", "matrix": [[1, 0], [0, 1]], "x": 1}))
    with pytest.raises(IsometryError):
        load_isometry_spec(path, lp3_np, lp3_np)


def test_linear_map2_apply():
    T = LinearMap2.from_matrix([[0.0, -1.0], [1.0, 0.0]])
    out = T.apply(Vec2(1.0, 0.0))
    assert (out.x, out.y) == (0.0, 1.0)
