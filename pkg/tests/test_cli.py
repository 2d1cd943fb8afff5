import io
import json
from pathlib import Path

import pytest

from app import __version__
from app.main import main

DATA = Path(__file__).parent / "test_data"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_solve_csv_header_matches_golden():
    """Test the solve CSV layout."""
    code, text = run("solve", "-k", "3", "-i", "1", "--set", "I2", "--lambda", "1.8", "--format", "csv")
    assert code == 0
    lines = text.splitlines(keepends=True)
    assert lines[0] == (DATA / "solve_header.csv").read_text()
    assert len(lines) == 4
    classes = sorted(line.split(",")[0] for line in lines[1:])
    assert classes == ["TI", "WP", "WP"]


def test_solve_json_keys():
    """Test the solve JSON key order."""
    code, text = run("solve", "-k", "3", "-i", "1", "--set", "I2", "--lambda", "1.6", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert list(payload) == ["params", "solutions", "version"]
    assert payload["params"] == {"k": 3, "i": 1, "lambda": 1.6, "set": "I2"}
    assert payload["version"] == __version__
    (solution,) = payload["solutions"]
    assert list(solution) == ["class", "law", "reduced", "residual", "tangent"]
    assert list(solution["law"]) == ["z1", "z2", "z7", "z8"]
    assert solution["class"] == "TI"


def test_solve_human():
    """Test the human summary line."""
    code, text = run("solve", "-k", "3", "-i", "1", "--set", "I2", "--lambda", "1.8")
    assert code == 0
    assert text.startswith("I2  k=3 i=1 lambda=1.8: 3 solution(s), 1 TI, 2 WP")


def test_solve_is_deterministic():
    """Test that two identical runs produce identical bytes."""
    argv = ("solve", "-k", "3", "-i", "1", "--set", "I2", "--lambda", "2.5", "--format", "json")
    assert run(*argv) == run(*argv)


def test_scan_csv():
    """Test scan rows in input order with the golden header."""
    code, text = run(
        "scan", "-k", "3", "-i", "1", "--set", "I2",
        "--lambda-min", "1.5", "--lambda-max", "2.5", "--steps", "3", "--resolution", "800",
    )
    assert code == 0
    lines = text.splitlines(keepends=True)
    assert lines[0] == (DATA / "scan_header.csv").read_text()
    rows = [line.rstrip("\n").split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["1.5", "2", "2.5"]
    assert [r[1] for r in rows] == ["1", "3", "3"]
    assert len(rows[1][5].split(";")) == 3


def test_critical_i2():
    """Test the critical activity printout."""
    code, text = run("critical", "--case", "I2-k3-i1")
    assert code == 0
    assert "lambda_cr = 1.68750000000" in text
    assert "x_star = 1.50000000000" in text
    assert "convex = true" in text


def test_critical_kesten_k6():
    """Test the k = 6 Kesten interval printout."""
    code, text = run("critical", "--case", "kesten", "-k", "6")
    assert code == 0
    assert "lambda_minus = 5.69531250000" in text
    assert "lambda_plus = 64.0000000000" in text


def test_critical_kesten_json():
    """Test the Kesten interval JSON payload."""
    code, text = run("critical", "--case", "kesten", "-k", "7", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["case"] == "kesten-k7"
    assert payload["s_minus"] < payload["s_plus"]
    assert payload["lambda_minus"] < payload["lambda_plus"]


def test_verify_r3_human():
    """Test a passing theorem check."""
    code, text = run("verify", "R3")
    assert code == 0
    assert text.startswith("R3: PASS")


def test_verify_json():
    """Test the verify JSON layout."""
    code, text = run("verify", "R3", "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["theorems"][0]["id"] == "R3"
    assert payload["theorems"][0]["passed"] is True


def test_verify_failure_exit_code(mocker):
    """Test exit code 1 when a check fails."""
    from app.api.schemas import CheckResult
    from app.services import verification

    mocker.patch.dict(verification.THEOREMS, {"R3": lambda resolution: [CheckResult(name="forced", passed=False)]})
    code, text = run("verify", "R3")
    assert code == 1
    assert "[FAIL] forced" in text


@pytest.mark.parametrize("argv,expected", [
    (("solve", "-k", "9", "-i", "9", "--set", "I2", "--lambda", "2"), 2),
    (("solve", "-k", "3", "-i", "1", "--set", "I2", "--lambda", "-1"), 2),
    (("solve", "-k", "3", "-i", "7", "--set", "I2", "--lambda", "1"), 2),
    (("critical", "--case", "kesten", "-k", "5"), 2),
    (("scan", "-k", "3", "-i", "1", "--set", "I2", "--lambda-min", "1", "--lambda-max", "2", "--steps", "1"), 64),
    (("scan", "-k", "3", "-i", "1", "--set", "I2", "--lambda-min", "2", "--lambda-max", "1", "--steps", "3"), 64),
    (("scan", "-k", "3", "-i", "1", "--set", "I2", "--lambda-min", "1", "--lambda-max", "2", "--steps", "3",
      "--format", "svg"), 64),
    (("solve", "-k", "3", "-i", "1", "--set", "I9", "--lambda", "1"), 64),
    (("verify", "T9"), 64),
    (("critical", "--case", "kesten"), 64),
    (("plot", "lambda3", "-o", "/nonexistent/dir/out.svg"), 64),
    ((), 64),
])
def test_exit_codes(argv, expected):
    """Test exit codes for rejected inputs."""
    code, text = run(*argv)
    assert code == expected
    assert text == ""


def test_plot_lambda3(tmp_path):
    """Test the lambda3 figure marks the minimum."""
    path = tmp_path / "lambda3.svg"
    code, text = run("plot", "lambda3", "-o", str(path))
    assert code == 0
    assert text == f"wrote {path}\n"
    svg = path.read_text()
    assert 'id="lambda3-minimum"' in svg
    assert "1.6875" in svg


def test_plot_is_deterministic(tmp_path):
    """Test byte-identical SVGs across runs."""
    first, second = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run("plot", "lambda3", "-o", str(first))[0] == 0
    assert run("plot", "lambda3", "-o", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_plot_rejects_bad_x_range(tmp_path):
    """Test x-range validation."""
    path = str(tmp_path / "out.svg")
    assert run("plot", "lambda3", "-o", path, "--x-min", "3", "--x-max", "2")[0] == 64
    assert run("plot", "lambda3", "-o", path, "--x-min", "0.5")[0] == 64


def test_plot_gamma_cobweb(tmp_path):
    """Test the cobweb figure inside the Kesten interval."""
    path = tmp_path / "cobweb.svg"
    code, _ = run("plot", "gamma-cobweb", "-k", "6", "--lambda", "20", "-o", str(path))
    assert code == 0
    assert path.read_text().startswith("<?xml")


def test_plot_bifurcation_needs_range(tmp_path):
    """Test that the bifurcation plot needs a case and a lambda range."""
    code, _ = run("plot", "bifurcation", "-o", str(tmp_path / "b.svg"), "-k", "3")
    assert code == 64


def test_version(capsys):
    """Test --version."""
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert __version__ in capsys.readouterr().out
