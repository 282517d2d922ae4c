import csv
import io
import json

import pytest

from isoprof import checks, cli
from isoprof.checks import CheckReport


def _run(args, capsys):
    code = cli.run([*args, "--no-timestamp"])
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.reader(io.StringIO("".join(l for l in text.splitlines(True) if not l.startswith("#")))))


def test_profile_half_space_three_ordered_rows(bodies_dir, capsys):
    code, out, _ = _run(["profile", "--body", str(bodies_dir / "halfspace3.json"), "--volumes", "0.1,1,10",
                         "--samples", "20000", "--centers", "8"], capsys)
    assert code == 0
    header, *rows = _rows(out)
    assert len(rows) == 3
    lo, up = header.index("lower"), header.index("upper")
    assert all(float(r[lo]) < float(r[up]) for r in rows)
    assert "# seed=24301 samples=20000" in out and "sha256=" in out


def test_dimension_of_paraboloid(bodies_dir, capsys):
    code, out, _ = _run(["dimension", "--body", str(bodies_dir / "power_a2.json")], capsys)
    assert code == 0
    m = float(out.split("m=")[1].split()[0])
    assert m == pytest.approx(2.0, abs=0.1)


def test_volume_uses_exact_path_on_half_space(bodies_dir, capsys):
    code, out, _ = _run(["volume", "--body", str(bodies_dir / "halfspace3.json"), "--point", "0,0,0",
                         "--radii", "1"], capsys)
    header, row = _rows(out)
    assert code == 0 and float(row[header.index("volume")]) == pytest.approx(2.0943951023932)


def test_out_file_matches_stdout(bodies_dir, tmp_path, capsys):
    args = ["angle", "--body", str(bodies_dir / "octant.json")]
    _, out, _ = _run(args, capsys)
    target = tmp_path / "a.csv"
    assert cli.run([*args, "--no-timestamp", "--out", str(target)]) == 0
    assert target.read_text() == out


def test_usage_errors_exit_one(bodies_dir, capsys):
    assert _run(["volume"], capsys)[0] == 1
    assert _run(["volume", "--body", str(bodies_dir / "halfspace3.json"), "--point", "0,0"], capsys)[0] == 1
    assert _run(["smooth", "--body", str(bodies_dir / "slab3.json"), "--epsilon", "-1"], capsys)[0] == 1
    assert _run(["nonsense"], capsys)[0] == 1
    assert _run(["check", "--suite", "bogus"], capsys)[0] == 1
    assert _run(["check", "--samples", "-3"], capsys)[0] == 1


def test_malformed_body_reports_json_path(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "slab", "normal": [0, 0, 1], "lo": 1, "hi": 0}))
    code, _, err = _run(["angle", "--body", str(bad)], capsys)
    assert code == 1 and "/hi" in err
    code, _, err = _run(["angle", "--body", str(tmp_path / "missing.json")], capsys)
    assert code == 1 and "missing.json" in err


def test_check_violation_exits_two(monkeypatch, capsys):
    fake = [CheckReport("doubling", "halfspace", 1, 1, 0.5, "3 sigma + 1e-9", 7, [])]
    monkeypatch.setattr(checks, "run_suite", lambda *a, **k: fake)
    code, out, _ = _run(["check", "--suite", "doubling", "--trials", "1"], capsys)
    assert code == 2 and "doubling,halfspace,1,1" in out


def test_help_and_version_exit_zero(capsys):
    assert cli.run(["--version"]) == 0
    assert "isoprof" in capsys.readouterr().out
