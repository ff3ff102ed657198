import json
import subprocess
import sys

import pytest

from thetafay.cli import run


def _json(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


def test_fay_dims_g4(capsys):
    assert _json(capsys, ["fay", "dims", "--g", "4"]) == {"V+": 85, "W+": 51, "V-": 85, "W-": 35}


def test_fay_dump(capsys):
    assert run(["fay", "dump", "--g", "1"]) == 0
    assert capsys.readouterr().out == "3 3\n1 1 1\n1 1 -1\n1 -1 1\n"


def test_verify_all_g1(capsys):
    report = _json(capsys, ["verify", "all", "--g", "1", "--seed", "1"])
    assert report["all_pass"] is True
    tags = [c["tag"] for c in report["checks"]]
    assert tags == ["fay-even", "fay-odd", "frame-even", "frame-odd", "tvg", "smt", "ci", "phi"]
    assert all(c["status"] == "pass" for c in report["checks"])
    assert {"schema_version", "tool_version", "config"} <= set(report)
    fay_even = report["checks"][0]["evidence"]
    assert fay_even["wplus_vector_in_W"] is True
    assert fay_even["leading_2g_plus_1_vector_in_W"] is False


def test_verify_g2_subset(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "tvg", "--g", "2", "--seed", "7", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["config"]["seed"] == 7
    assert report["checks"][0]["evidence"]["rank"]["rank"] == 5


def test_group_and_rep(capsys):
    assert _json(capsys, ["group", "order", "--g", "2"])["bfs_order"] == 720
    cos = _json(capsys, ["group", "cosets", "--g", "2"])
    assert (cos["even_base"], cos["odd_base"]) == (2, 2)
    assert _json(capsys, ["group", "transitivity", "--g", "2"])["ok"] is True
    assert _json(capsys, ["rep", "norm", "--g", "2", "--sector", "odd"])["norm"] == "2"
    assert _json(capsys, ["rep", "norm", "--g", "1", "--signed", "false"])["norm"] == "2"


def test_theta_commands(capsys):
    ev = _json(capsys, ["theta", "eval", "--g", "1", "--m", "1|1"])
    assert ev["re"] == 0 and ev["im"] == 0
    ev = _json(capsys, ["theta", "eval", "--g", "2", "--m", "00|00", "--tau-seed", "3"])
    assert ev["trunc_bound"] <= 1e-13 and ev["re"] != 0
    assert _json(capsys, ["theta", "transform", "--g", "2"])["max_residual"] < 1e-9


@pytest.mark.parametrize("argv", [
    ["verify", "all", "--g", "9"],
    ["group", "order", "--g", "4"],
    ["theta", "eval", "--g", "2", "--m", "0|0"],
    ["theta", "eval", "--g", "1"],
    ["fay", "dims", "--g", "0"],
    ["verify", "all", "--g", "1", "--tol", "-1"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        run(["nonsense"])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "thetafay", "fay", "dims", "--g", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"V+": 5, "W+": 5, "V-": 5, "W-": 1}
