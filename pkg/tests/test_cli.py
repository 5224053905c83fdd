import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballconv import bodyspec
from ballconv.cli import main, run
from ballconv.errors import ParameterError


def _write(tmp_path, doc, name="body.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


BALL = {"kind": "ball", "dim": 2, "center": [0, 0], "radius": 1}
ELLIPSE = {"kind": "ellipsoid", "axes": [2, 1]}
PERTURBED = {"kind": "support_curve", "c0": 1, "cos": [0, 0, 0.1]}
VALUATION = {"kind": "arc_body", "disks": {"centers": [[-0.4, 0], [0.5, 0], [0, 0]], "radii": [1.2, 1, 1]}}


# ---------------------------------------------------------------- body specs


@pytest.mark.parametrize("doc", [BALL, ELLIPSE, PERTURBED, VALUATION, {"kind": "pnorm2d", "r": 1.5},
                                 {"kind": "ellipsoid", "axes": [2, 1.5, 1], "dim": 3}])
def test_spec_round_trip(doc):
    spec = bodyspec.normalize(doc)
    assert bodyspec.parse(bodyspec.dumps(spec)) == spec
    body = bodyspec.build(spec)
    assert bodyspec.build(bodyspec.from_body(body)) == body


@pytest.mark.parametrize("doc,msg", [
    ({**BALL, "colour": "red"}, "unknown field"),
    ({"kind": "cube"}, "unknown body kind"),
    ({"kind": "ball", "center": [0, 0]}, "missing"),
    ({**ELLIPSE, "dim": 3}, "dim"),
    ({"kind": "arc_body"}, "exactly one"),
    ({"kind": "arc_body", "disks": {"centers": [[0, 0]], "radii": [1], "extra": 1}}, "unknown field"),
    ({"kind": "ball", "center": [0, "x"], "radius": 1}, "list of numbers"),
])
def test_spec_rejections(doc, msg):
    with pytest.raises(ParameterError, match=msg):
        bodyspec.normalize(doc)


def test_spec_invalid_json():
    with pytest.raises(ParameterError):
        bodyspec.parse("{not json")


# small enough that h + h'' stays positive for up to four harmonics
coef = st.floats(-0.01, 0.01, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 3.0), st.lists(coef, max_size=4), st.lists(coef, max_size=4))
def test_support_curve_spec_round_trip(c0, cos, sin):
    doc = {"kind": "support_curve", "c0": c0, "cos": cos, "sin": sin}
    spec = bodyspec.normalize(doc)
    assert bodyspec.parse(bodyspec.dumps(spec)) == spec
    body = bodyspec.build(spec)
    assert bodyspec.build(bodyspec.from_body(body)) == body


# ---------------------------------------------------------------- commands


def test_omega_ball(tmp_path):
    body = _write(tmp_path, BALL)
    out = tmp_path / "out"
    assert main(["omega", "--body", body, "--p", "1", "--R", "2", "--out", str(out)]) == 0
    doc = json.loads((out / "omega.json").read_text())
    val = doc["tables"]["omega"]["data"]["value"][0]
    assert val == pytest.approx(2 * np.pi * 0.5 ** (1 / 3), rel=1e-12)
    header = (out / "omega_omega.csv").read_text().splitlines()[0]
    assert "[" in header


def test_omega_excluded_p(tmp_path, capsys):
    body = _write(tmp_path, BALL)
    assert main(["omega", "--body", body, "--p", "-2", "--R", "2"]) == 2
    assert "p = -n excluded" in capsys.readouterr().err


def test_omega_all_radius_R_is_zero(tmp_path):
    body = _write(tmp_path, {"kind": "arc_body", "disks": {"centers": [[-1, 0], [1, 0]], "radii": [2, 2]}})
    rep = run(["omega", "--body", body, "--p", "3", "--R", "2"])
    assert rep.exit_code == 0 and rep.tables["omega"].rows[0][1] == 0.0


def test_omega_divergent_exit(tmp_path):
    body = _write(tmp_path, {"kind": "pnorm2d", "r": 1.5})
    rep = run(["omega", "--body", body, "--p=-4", "--R", "2"])
    assert rep.exit_code == 3 and "divergence" in rep.tables


def test_not_ball_convex_is_validation(tmp_path):
    body = _write(tmp_path, PERTURBED)
    assert run(["omega", "--body", body, "--p", "1", "--R", "1.5"]).exit_code == 2


def test_missing_file(tmp_path):
    assert run(["omega", "--body", str(tmp_path / "nope.json"), "--p", "1"]).exit_code == 2


def test_float_disk_is_constant(tmp_path):
    body = _write(tmp_path, BALL)
    rep = run(["float", "--body", body, "--delta", "0.01", "--R", "2", "--resolution", "32"])
    r = np.array([row[1] for row in rep.tables["radial"].rows])
    assert rep.exit_code == 0 and np.ptp(r) < 1e-12 and r[0] < 1


def test_float_zero_delta_identity(tmp_path):
    body = _write(tmp_path, ELLIPSE)
    rep = run(["float", "--body", body, "--delta", "0", "--R", "5", "--resolution", "32"])
    rows = rep.tables["radial"].rows
    assert all(row[1] == row[2] for row in rows)


def test_float_fp1_equals_one(tmp_path):
    body = _write(tmp_path, ELLIPSE)
    a = run(["float", "--body", body, "--delta", "0.001", "--R", "5", "--resolution", "32", "--f", "one"])
    b = run(["float", "--body", body, "--delta", "0.001", "--R", "5", "--resolution", "32", "--f", "fp:1"])
    np.testing.assert_allclose([r[1] for r in a.tables["radial"].rows], [r[1] for r in b.tables["radial"].rows],
                               rtol=1e-9)


def test_float_starvation(tmp_path, capsys):
    body = _write(tmp_path, BALL)
    assert main(["float", "--body", body, "--delta", "5", "--R", "2", "--resolution", "8"]) == 4
    assert "directions" in capsys.readouterr().err


def test_bad_weight_spec(tmp_path):
    body = _write(tmp_path, BALL)
    assert run(["float", "--body", body, "--delta", "0.01", "--f", "gauss:1"]).exit_code == 2


def test_converge_ball_primal(tmp_path):
    body = _write(tmp_path, BALL)
    rep = run(["converge", "--body", body, "--R", "2", "--levels", "4", "--resolution", "512"])
    assert rep.exit_code == 0


def test_converge_gate(tmp_path):
    body = _write(tmp_path, BALL)
    rep = run(["converge", "--body", body, "--R", "2", "--levels", "3", "--resolution", "128", "--gate", "1e-9"])
    assert rep.exit_code == 5 and rep.tables["per_delta"].rows


def test_converge_polygon_target_zero(tmp_path):
    body = _write(tmp_path, {"kind": "arc_body", "disks": {"centers": [[-1, 0], [1, 0]], "radii": [2, 2]}})
    rep = run(["converge", "--body", body, "--R", "2", "--levels", "3", "--resolution", "256", "--gate", "1e9"])
    summary = dict((r[0], r[1]) for r in rep.tables["summary"].rows)
    assert summary["target"] == 0.0


@pytest.mark.parametrize("suite", ["inequalities", "monotonicity", "homogeneity", "entropy"])
def test_verify_suites_pass(tmp_path, suite):
    for doc, R in ((BALL, "2"), (ELLIPSE, "5"), (PERTURBED, "2")):
        body = _write(tmp_path, doc)
        rep = run(["verify", "--body", body, "--suite", suite, "--R", R, "--resolution", "1024"])
        assert rep.exit_code == 0, (doc, rep.message)


def test_verify_valuation(tmp_path):
    body = _write(tmp_path, VALUATION)
    assert run(["verify", "--body", body, "--suite", "valuation", "--R", "2"]).exit_code == 0
    assert run(["verify", "--body", _write(tmp_path, BALL, "b.json"), "--suite", "valuation"]).exit_code == 2


def test_verify_rejects_bad_exponents(tmp_path, capsys):
    body = _write(tmp_path, PERTURBED)
    assert main(["verify", "--body", body, "--suite", "inequalities", "--rst", "1,2,0"]) == 2
    assert "(n+r)t/((n+t)r) > 1" in capsys.readouterr().err


def test_reports_are_byte_identical(tmp_path):
    body = _write(tmp_path, PERTURBED)
    for d in ("a", "b"):
        assert main(["verify", "--body", body, "--suite", "entropy", "--seed", "7", "--out", str(tmp_path / d)]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
