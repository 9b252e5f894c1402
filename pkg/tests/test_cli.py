import json

import jsonschema
import numpy as np
import pytest

from convsym.cli import UsageError, main, parse_claim, parse_config, parse_vectors
from convsym.reports import validate


@pytest.fixture
def files(tmp_path):
    def gen(name, *args):
        path = tmp_path / f"{name}.json"
        assert main(["generate", *args, "--out", str(path)]) == 0
        return str(path)

    out = {
        "cube": gen("cube", "--kind", "cube", "--d", "3"),
        "ball": gen("ball", "--kind", "ball", "--d", "3"),
        "cyl": gen("cyl", "--kind", "cylinder", "--d", "3"),
        "ell": gen("ell", "--kind", "ellipsoid", "--semi-axes", "1,2,3", "--rotate", "--seed", "2"),
    }
    planes = [{"base": [0, 0, 0], "normal": [np.cos(a), np.sin(a), 0]} for a in np.arange(4) * np.pi / 4]
    (tmp_path / "planes.json").write_text(json.dumps(planes))
    axes = [{"base": [0, 0, 0], "direction": v} for v in ([1, 0, 0], [1, 1, 0], [1, 0, 1])]
    (tmp_path / "axes.json").write_text(json.dumps(axes))
    (tmp_path / "lines2.json").write_text(json.dumps(axes[:2]))
    (tmp_path / "p0.json").write_text(json.dumps({"kind": "points", "points": [[0, 0, 0]]}))
    (tmp_path / "p1.json").write_text(json.dumps({"kind": "points", "points": [[1, 0, 0]]}))
    (tmp_path / "line.json").write_text(json.dumps({"kind": "flat", "base": [0, 0, 0], "basis": [[1, 0, 0]]}))
    (tmp_path / "bad.json").write_text("{not json")
    for k in ("planes", "axes", "lines2", "p0", "p1", "line", "bad"):
        out[k] = str(tmp_path / f"{k}.json")
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


# --- exit-code matrix -------------------------------------------------------------------

def test_generate_cube(capsys):
    code, out, _ = run(capsys, "generate", "--kind", "cube", "--d", "3")
    data = json.loads(out)
    assert code == 0 and data["kind"] == "polytope" and len(data["vertices"]) == 8


def test_generate_revolution_is_deterministic(capsys):
    a = run(capsys, "generate", "--kind", "revolution", "--d", "4", "--k", "2", "--seed", "7")
    b = run(capsys, "generate", "--kind", "revolution", "--d", "4", "--k", "2", "--seed", "7")
    assert a == b and a[0] == 0 and json.loads(a[1])["kind"] == "revolution"


@pytest.mark.parametrize("claim,code", [
    (["--axis", "p=0,0,0 dir=0,0,1"], 0),
    (["--axis", "p=0,0,0 dir=1,2,3"], 1),
    (["--hyperplane", "p=0,0,0 normal=1,1,0"], 0),
    (["--n-axis", "n=4", "p=0,0,0", "dir=0,0,1"], 0),
    (["--n-axis", "n=3 p=0,0,0 dir=0,0,1"], 1),
    (["--k-axis", "k=1 p=0,0,0 span=0,0,1 mode=mundial"], 0),
    (["--coaxis", "k=4 p=0,0,0 span=0,0,1"], 0),
    (["--axis", "p=0,0 dir=0,0,1"], 2),
    (["--axis", "p=0,0,0"], 2),
    (["--axis", "p=0,0,0 dir=a,b,c"], 2),
    (["--axis", "p=0,0,0 dir=0,0,0"], 2),
    ([], 2),
])
def test_test_command_exit_codes(files, capsys, claim, code):
    got, out, err = run(capsys, "test", files["cube"], *claim)
    assert got == code
    if code == 2:
        assert "error" in err and out == ""
    else:
        assert json.loads(out)["verdict"] is (code == 0)


def test_ball_coaxis_order_five(files, capsys):
    code, out, _ = run(capsys, "test", files["ball"], "--coaxis", "k=5", "p=0,0,0", "span=0.3,0.4,0.5")
    assert code == 0 and json.loads(out)["verdict"]


@pytest.mark.parametrize("angle,label", [("0.6283185307", "NStar(5)"), ("1.0", "Dense"),
                                         ("1.5707963268", "NStar(2)")])
def test_star_angles(capsys, angle, label):
    code, out, _ = run(capsys, "star", "--angle", angle)
    assert code == 0 and json.loads(out)["label"] == label


def test_star_lines_and_csv(files, capsys, tmp_path):
    csv_path = tmp_path / "star.csv"
    code, out, _ = run(capsys, "star", "--lines", files["lines2"], "--emit-csv", csv_path)
    assert code == 0 and json.loads(out)["label"] == "NStar(4)"
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "index,angle" and len(rows) == 5


def test_star_undecided_exit_3(capsys):
    code, out, _ = run(capsys, "star", "--angle", "1.0", "--max-iter", "50")
    assert code == 3 and json.loads(out)["classification"]["kind"] == "undecided"


def test_star_usage_errors(files, capsys):
    assert run(capsys, "star")[0] == 2
    assert run(capsys, "star", "--lines", files["axes"])[0] == 2
    assert run(capsys, "star", "--angle", "0")[0] == 2


def test_classify_matrix(files, capsys):
    assert run(capsys, "classify", files["cyl"], "--theorem", "fantasia", "--hyperplanes", files["planes"])[0] == 0
    assert run(capsys, "classify", files["cube"], "--theorem", "brasil", "--k", "3", "--p", "0,0,0")[0] == 1
    code, out, _ = run(capsys, "classify", files["ball"], "--theorem", "dream", "--axes", files["axes"])
    assert code == 0 and json.loads(out)["conclusion"]["type"] == "sphere"
    code, out, _ = run(capsys, "classify", files["cube"], "--theorem", "grandota", "--lambda", "1,0,0;0,1,0")
    assert code == 1
    code, out, _ = run(capsys, "classify", files["ell"], "--theorem", "cabezon")
    assert code == 0 and json.loads(out)["conclusion"]["type"] == "ellipsoid"
    assert run(capsys, "classify", files["cube"], "--theorem", "cabezon")[0] == 2
    assert run(capsys, "classify", files["cube"], "--theorem", "dream")[0] == 2
    assert run(capsys, "classify", files["bad"], "--theorem", "brasil", "--k", "3")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["classify", files["cube"], "--theorem", "nope"])
    assert exc.value.code == 2


def test_classify_inconclusive_exit_3(files, capsys):
    # the cube's four mirrors through the z-axis pass, but the cube is no body of revolution:
    # a finite sample of hyperplanes cannot force the conclusion
    code, out, _ = run(capsys, "classify", files["cube"], "--theorem", "fantasia", "--hyperplanes", files["planes"])
    report = json.loads(out)
    assert all(h["pass"] for h in report["hypotheses"])
    assert code == 3 and report["conclusion"]["type"] == "inconclusive"


def test_verify_star_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "star", "--trials", "10", "--seed", "1")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["seed"] == 1
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_metric_commands(files, capsys):
    code, out, _ = run(capsys, "metric", "--busemann", files["p0"], files["p1"])
    data = json.loads(out)
    assert code == 0 and abs(data["value"] - 1.0) <= data["error_bar"] + 1e-12
    code, out, _ = run(capsys, "metric", "--busemann", files["cube"], files["cube"])
    assert code == 0 and json.loads(out)["value"] <= json.loads(out)["error_bar"] + 1e-15
    code, out, _ = run(capsys, "metric", "--hausdorff", files["cube"], files["ball"])
    assert code == 0 and json.loads(out)["value"] == pytest.approx(np.sqrt(3) - 1, abs=1e-6)
    code, out, err = run(capsys, "metric", "--hausdorff", files["cube"], files["line"])
    assert code == 2 and "--busemann" in err


def test_conjecture_probe_csv(files, capsys):
    code, out, _ = run(capsys, "conjecture-probe", "--trials", "1", "--orders", "3", "--max-coaxes", "2",
                       "--body", files["ball"])
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# ") and "proof" in lines[0]
    assert lines[1] == "trial,n_coaxes,order,n_points,sphere_residual"
    assert all(float(row.split(",")[-1]) < 1e-10 for row in lines[2:] if not row.startswith("#"))
    assert run(capsys, "conjecture-probe", "--orders", "2")[0] == 2


# --- global options -------------------------------------------------------------------

def test_seed_before_or_after_subcommand(capsys):
    a = json.loads(run(capsys, "--seed", "9", "star", "--angle", "1.0")[1])
    b = json.loads(run(capsys, "star", "--angle", "1.0", "--seed", "9")[1])
    assert a["seed"] == b["seed"] == 9


def test_config_file_and_override(files, capsys, tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# run settings\nseed = 5\ntol = 1e-6\n")
    out = json.loads(run(capsys, "star", "--angle", "1.0", "--config", cfg)[1])
    assert out["seed"] == 5
    out = json.loads(run(capsys, "star", "--angle", "1.0", "--config", cfg, "--seed", "6")[1])
    assert out["seed"] == 6
    cfg.write_text("colour = red\n")
    assert run(capsys, "star", "--angle", "1.0", "--config", cfg)[0] == 2


def test_bad_global_values(capsys):
    assert run(capsys, "star", "--angle", "1.0", "--tol", "-1")[0] == 2
    assert run(capsys, "star", "--angle", "1.0", "--threads", "zero")[0] == 2


def test_timestamps_opt_in(capsys):
    plain = json.loads(run(capsys, "star", "--angle", "0.5")[1])
    stamped = json.loads(run(capsys, "star", "--angle", "0.5", "--timestamps")[1])
    assert "generated_at" not in plain and "generated_at" in stamped


def test_threads_auto(files, capsys):
    code, _, _ = run(capsys, "classify", files["cyl"], "--theorem", "fantasia", "--hyperplanes",
                     files["planes"], "--threads", "auto")
    assert code == 0


def test_out_file_is_byte_identical_to_stdout(files, capsys, tmp_path):
    _, out, _ = run(capsys, "test", files["cube"], "--axis", "p=0,0,0 dir=0,0,1")
    path = tmp_path / "claim.json"
    run(capsys, "test", files["cube"], "--axis", "p=0,0,0 dir=0,0,1", "--out", path)
    assert path.read_text() == out


# --- parsers ----------------------------------------------------------------------------

def test_claim_grammar():
    assert parse_claim("p=0,0,0 dir=0,0,1") == {"p": "0,0,0", "dir": "0,0,1"}
    with pytest.raises(UsageError):
        parse_claim("p=0 p=1")
    with pytest.raises(UsageError):
        parse_claim("p")
    np.testing.assert_allclose(parse_vectors("1,0,0;0,1,0"), np.eye(3)[:2])
    with pytest.raises(UsageError):
        parse_vectors("1,0;0,1,0")


def test_config_grammar(tmp_path):
    cfg = tmp_path / "c.conf"
    cfg.write_text("seed = 3  # trailing comment\n\nout = 'x.json'\n")
    assert parse_config(str(cfg)) == {"seed": "3", "out": "x.json"}


def test_every_json_output_validates(files, capsys):
    """Each command already validates before printing; a schema violation would raise."""
    for argv in (["test", files["cube"], "--axis", "p=0,0,0 dir=0,0,1"], ["star", "--angle", "1.0"],
                 ["metric", "--busemann", files["p0"], files["p1"]]):
        code, out, _ = run(capsys, *argv)
        assert code in (0, 1) and json.loads(out)["seed"] == 0
    with pytest.raises(jsonschema.ValidationError):
        validate({"kind": "polytope"}, "body")
