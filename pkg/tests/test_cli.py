import csv
import io
import json
import math

import pytest

from geoflow.cli import EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, EXIT_SUITE, eval_angle, main
from geoflow.curvature_field import make_constant, make_inverse_l
from geoflow.fundamental_solution import constant_curvature_sample, geodesic_sample


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    comments = [l for l in text.splitlines() if l.startswith("#")]
    body = [l for l in text.splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return comments, rows


def test_eval_angle():
    assert eval_angle("pi/6") == pytest.approx(math.pi / 6)
    assert eval_angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert eval_angle("-pi") == pytest.approx(-math.pi)
    assert eval_angle("0.25") == 0.25


def test_laws_octant(capsys):
    h = repr(math.pi / 2)
    code, out, _ = run(capsys, "laws", "--K", "1", "--gamma", "pi/2", "--a", h, "--b", h)
    assert code == EXIT_OK
    comments, rows = table(out)
    assert comments[0].startswith("# config-hash: ")
    vals = {r["quantity"]: float(r["value"]) for r in rows}
    assert vals["c"] == pytest.approx(math.pi / 2, abs=1e-14)
    assert vals["alpha"] == pytest.approx(math.pi / 2, abs=1e-7)


def test_laws_flat_limit(capsys):
    code, out, _ = run(capsys, "laws", "--K", "1e-9", "--gamma", "pi/3", "--a", "3", "--b", "4")
    assert code == EXIT_OK
    vals = {r["quantity"]: float(r["value"]) for r in table(out)[1]}
    assert vals["c"] == pytest.approx(3.605551, abs=1e-6)


def test_laws_invalid_gamma(capsys):
    code, _, err = run(capsys, "laws", "--gamma", "0")
    assert code == EXIT_INPUT
    assert "gamma" in err


def test_bad_flag_values(capsys):
    assert run(capsys, "laws", "--beta", "abc")[0] == EXIT_INPUT
    assert run(capsys, "flow", "--base-l", "-1")[0] == EXIT_INPUT
    assert run(capsys, "triangulate", "--n", "3")[0] == EXIT_INPUT
    assert run(capsys, "flow", "--field-param", "oops")[0] == EXIT_INPUT
    assert run(capsys, "flow", "--beta", "pi/2", "--betas", "pi/2")[0] == EXIT_INPUT


def test_flow_zero_length_echoes_base(capsys):
    code, out, _ = run(capsys, "flow", "--base-l", "0.3,0.6", "--base-phi", "0.2", "--lambdas", "0,0.1")
    assert code == EXIT_OK
    rows = [r for r in table(out)[1] if float(r["lambda"]) == 0.0]
    assert rows
    for r in rows:
        assert (float(r["l"]), float(r["phi"])) == (float(r["base_l"]), float(r["base_phi"]))


def test_flow_sphere_matches_exact_laws(capsys):
    betas = ",".join(f"{n}*pi/6" for n in range(3))
    code, out, _ = run(capsys, "flow", "--base-l", "0.3", "--betas", betas, "--lambdas", "0.05,0.1,0.15")
    assert code == EXIT_OK
    for r in table(out)[1]:
        lam = float(r["lambda"])
        ref = constant_curvature_sample(1.0, (0.3, 0.0), float(r["beta"]), lam)
        # fourth-order remainder of the series
        tol = (0.3 + lam) ** 4 / 40
        assert float(r["l"]) == pytest.approx(ref[0], abs=tol)
        assert float(r["phi"]) == pytest.approx(ref[1], abs=tol)
        assert float(r["x"]) == pytest.approx(float(r["l"]) * math.cos(float(r["phi"])), rel=1e-15)


def _flows(base, beta, lam):
    return [geodesic_sample(f, (base, 0.0), beta, lam)
            for f in (make_constant(0.0), make_inverse_l(), make_constant(1.0))]


def test_inverse_l_flow_bracket(capsys):
    code, out, _ = run(capsys, "flow", "--field", "inverse_l", "--base-l", "0.1,0.3,0.9",
                       "--betas", "pi/6,pi/3", "--lambdas", "0.1,0.2,0.3")
    assert code == EXIT_OK
    for r in table(out)[1]:
        flat, _, sphere = _flows(float(r["base_l"]), float(r["beta"]), float(r["lambda"]))
        phi = float(r["phi"])
        assert min(flat[1], sphere[1]) <= phi <= max(flat[1], sphere[1])


def test_inverse_l_flow_closer_to_sphere(capsys):
    code, out, _ = run(capsys, "flow", "--field", "inverse_l", "--base-l", "0.1,0.3,0.9",
                       "--betas", "pi/6,pi/3", "--lambdas", "0.1,0.2,0.3")
    assert code == EXIT_OK
    for r in table(out)[1]:
        flat, _, sphere = _flows(float(r["base_l"]), float(r["beta"]), float(r["lambda"]))
        for k, key in enumerate(("l", "phi")):
            v = float(r[key])
            assert abs(v - sphere[k]) < abs(v - flat[k])


def test_triangulate_figure_configuration(capsys):
    code, out, _ = run(capsys, "triangulate", "--n", "13", "--a", "5", "--c", "3", "--beta", "pi/6")
    assert code == EXIT_OK
    comments, rows = table(out)
    report = dict(l[2:].split(": ", 1) for l in comments)
    assert abs(float(report["b2_diff"])) < 1e-10
    assert float(report["delta_residual_max"]) < 1e-9
    kinds = {r["kind"] for r in rows}
    assert kinds == {"base", "top", "ribs"}
    top = {r["i"]: (float(r["x"]), float(r["y"])) for r in rows if r["kind"] == "top"}
    ribs = {r["i"]: (float(r["x"]), float(r["y"])) for r in rows if r["kind"] == "ribs"}
    assert max(math.dist(top[i], ribs[i]) for i in top) < 1e-9


def test_triangulate_flat_is_zero(capsys):
    code, out, _ = run(capsys, "triangulate", "--field-param", "K0=0", "--n", "8")
    assert code == EXIT_OK
    report = dict(l[2:].split(": ", 1) for l in table(out)[0])
    for key in ("b2_finite", "gamma2_finite", "alpha2_finite", "b2_limit"):
        assert float(report[key]) == 0.0
    assert "-0" not in out.split("\n", 1)[1]


def test_triangulate_convergence_table(capsys):
    code, out, _ = run(capsys, "triangulate", "--n", "8", "--convergence", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    table_ = doc["report"]["convergence"]
    assert [row["N"] for row in table_] == [32, 64, 128, 256]


def test_metric_command(capsys):
    code, out, _ = run(capsys, "metric", "--base-l", "0.3,0.7")
    assert code == EXIT_OK
    for r in table(out)[1]:
        assert float(r["g_phiphi"]) == pytest.approx(math.sin(float(r["l"])) ** 2, abs=1e-5)
        assert float(r["K_from_metric"]) == pytest.approx(1.0, abs=1e-3)


def test_immerse_command(capsys):
    code, out, _ = run(capsys, "immerse", "--r-max", "1", "--nr", "3", "--nphi", "2")
    assert code == EXIT_OK
    rows = table(out)[1]
    assert len(rows) == 6
    assert float(rows[0]["z"]) == 0.0
    assert run(capsys, "immerse", "--nr", "1")[0] == EXIT_INPUT


@pytest.mark.parametrize("suite", ["flat", "sphere", "integrals"])
def test_validate_suites(capsys, suite):
    code, out, _ = run(capsys, "validate", "--suite", suite)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"]
    assert all(c["passed"] for c in doc["checks"])


def test_validate_failure_exit_code(capsys, monkeypatch):
    import geoflow.cli as cli
    monkeypatch.setattr(cli, "run_suite", lambda name: {"suite": name, "passed": False, "checks": []})
    assert run(capsys, "validate", "--suite", "flat")[0] == EXIT_SUITE


def test_numeric_failure_exit_code(capsys, monkeypatch):
    import geoflow.cli as cli
    from geoflow.errors import DegenerateTriangleError

    def boom(args):
        raise DegenerateTriangleError("collapsed")

    monkeypatch.setitem(cli.COMMANDS, "metric", boom)
    assert run(capsys, "metric")[0] == EXIT_NUMERIC


def test_output_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        assert main(["triangulate", "--n", "6", "--out", str(path)]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"# config-hash: ")


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"base-l": [0.4], "lambdas": [0.1], "betas": "pi/6"}))
    code, out, _ = run(capsys, "flow", "--config", str(cfg))
    assert code == EXIT_OK
    rows = table(out)[1]
    assert [float(r["base_l"]) for r in rows] == [0.4]
    assert float(rows[0]["beta"]) == pytest.approx(math.pi / 6)
    code, out, _ = run(capsys, "flow", "--config", str(cfg), "--base-l", "0.5")
    assert [float(r["base_l"]) for r in table(out)[1]] == [0.5]


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    assert run(capsys, "flow", "--config", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "flow", "--config", str(tmp_path / "missing.json"))[0] == EXIT_INPUT
    bad.write_text("[1, 2]")
    assert run(capsys, "flow", "--config", str(bad))[0] == EXIT_INPUT


def test_config_hash_tracks_options(capsys):
    h1 = run(capsys, "flow", "--lambdas", "0.1")[1].splitlines()[0]
    h2 = run(capsys, "flow", "--lambdas", "0.2")[1].splitlines()[0]
    assert h1 != h2
