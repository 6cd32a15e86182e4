import csv
import json

import pytest

from qfridge.cli import CSV_COLUMNS, RunManifest, main
from qfridge.liouvillian import default_config


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(default_config().to_dict()))
    return str(path)


def read_rows(path):
    with open(path) as handle:
        return list(csv.reader(handle))


def test_solve_single_row_cools_below_tc(config_path, tmp_path):
    out = str(tmp_path / "solve.csv")
    assert main(["solve", "--config", config_path, "--out", out]) == 0
    rows = read_rows(out)
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 2
    t1 = float(rows[1][1])
    assert t1 < 1.0                      # refrigeration at the reference point
    assert float(rows[1][2]) == pytest.approx(t1 - 1.0)
    sidecar = json.loads((tmp_path / "solve.json").read_text())
    assert sidecar["command"] == "solve"
    assert sidecar["config"]["coupling"] == 1.0
    assert "tolerances" in sidecar and "tool_version" in sidecar


def test_sweep_deterministic_and_closed_under_sidecar(config_path, tmp_path):
    out1 = str(tmp_path / "s1.csv")
    out2 = str(tmp_path / "s2.csv")
    args = ["sweep-th", "--config", config_path, "--out", out1,
            "--th-start", "1", "--th-stop", "10", "--th-points", "7"]
    assert main(args) == 0
    assert main(args[:4] + [out2] + args[5:]) == 0
    assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s2.csv").read_bytes()

    # rerun purely from the sidecar: byte-identical output
    out3 = str(tmp_path / "s3.csv")
    assert main(["sweep-th", "--config", str(tmp_path / "s1.json"),
                 "--out", out3]) == 0
    assert (tmp_path / "s3.csv").read_bytes() == (tmp_path / "s1.csv").read_bytes()


def test_sweep_parallel_flag_gives_identical_bytes(config_path, tmp_path):
    out1 = str(tmp_path / "p1.csv")
    out2 = str(tmp_path / "p2.csv")
    base = ["sweep-th", "--config", config_path,
            "--th-start", "1", "--th-stop", "5", "--th-points", "6"]
    assert main(base + ["--out", out1, "--parallel", "1"]) == 0
    assert main(base + ["--out", out2, "--parallel", "4"]) == 0
    assert (tmp_path / "p1.csv").read_bytes() == (tmp_path / "p2.csv").read_bytes()


def test_config_error_exit_code_and_stderr(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gaps": [1.0], "gammas": [1.0],
                               "coupling": 1.0, "reservoirs": []}))
    code = main(["solve", "--config", str(bad), "--out", str(tmp_path / "x.csv")])
    assert code == 2
    error = json.loads(capsys.readouterr().err)
    assert error["error"] == "ConfigError"
    assert error["exit_code"] == 2


def test_empty_sweep_list_is_a_config_error(config_path, tmp_path, capsys):
    code = main(["sweep-th", "--config", config_path,
                 "--out", str(tmp_path / "x.csv"), "--th-values", ","])
    assert code == 2
    capsys.readouterr()


def test_missing_config_file(tmp_path, capsys):
    code = main(["solve", "--config", str(tmp_path / "none.json"),
                 "--out", str(tmp_path / "x.csv")])
    assert code == 2
    capsys.readouterr()


def test_failed_points_keep_csv_clean(tmp_path):
    # Disconnected qubit 1: every point fails; numeric cells must be empty,
    # never NaN, and the exit code flags the solver failure.
    config = default_config(coupling=0.0, gammas=(0.0, 1.0, 1.0))
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config.to_dict()))
    out = str(tmp_path / "fail.csv")
    code = main(["sweep-th", "--config", str(path), "--out", out,
                 "--th-values", "2,5"])
    assert code == 3
    rows = read_rows(out)
    assert len(rows) == 3
    for row in rows[1:]:
        assert row[1] == "" and row[3] == ""       # no NaN leaks
        assert "MultiplicityError" in row[5]
    text = open(out).read()
    assert "nan" not in text and "inf" not in text


def test_sentinel_emission_for_frozen_qubit(tmp_path):
    # Decoupled machine with an ultracold bath: p_excited underflows and the
    # temperature column must carry the sentinel string.
    config = default_config(tc=1e-3, coupling=0.0)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config.to_dict()))
    out = str(tmp_path / "cold.csv")
    assert main(["solve", "--config", str(path), "--out", out]) == 0
    rows = read_rows(out)
    assert rows[1][1] == "zero_temp+"
    assert rows[1][2] == "zero_temp+"


def test_threshold_command_grid_edge(config_path, tmp_path):
    out = str(tmp_path / "thr.csv")
    assert main(["threshold", "--config", config_path, "--out", out,
                 "--direction", "positive", "--threshold-mode", "grid-edge"]) == 0
    rows = read_rows(out)
    assert float(rows[1][0]) == pytest.approx(0.476, abs=5e-3)
    sidecar = json.loads((tmp_path / "thr.json").read_text())
    assert sidecar["result"]["mode"] == "grid-edge"


def test_threshold_exits_nonconvergent_without_bracket(tmp_path, capsys):
    # Room bath hotter than the hot bath: no cooling at any T_c, exit 4.
    config = default_config(tc=1.0, tr=20.0, th=10.0)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config.to_dict()))
    code = main(["threshold", "--config", str(path),
                 "--out", str(tmp_path / "t.csv"),
                 "--direction", "positive", "--threshold-mode", "grid-edge"])
    assert code == 4
    error = json.loads(capsys.readouterr().err)
    assert error["error"] == "BracketError"


def test_insulation_command(config_path, tmp_path):
    out = str(tmp_path / "ins.csv")
    assert main(["insulation", "--config", config_path, "--out", out,
                 "--gamma1", "1e-1,1e-2,1e-3"]) == 0
    rows = read_rows(out)
    assert len(rows) == 4
    assert [float(r[0]) for r in rows[1:]] == [1e-1, 1e-2, 1e-3]
    sidecar = json.loads((tmp_path / "ins.json").read_text())
    assert sidecar["result"]["analytic_t1"] == pytest.approx(0.47619, abs=1e-4)


def test_plateau_command_negative(config_path, tmp_path):
    out = str(tmp_path / "plat.csv")
    assert main(["plateau", "--config", config_path, "--out", out,
                 "--direction", "negative"]) == 0
    sidecar = json.loads((tmp_path / "plat.json").read_text())
    assert sidecar["result"]["plateau_t1"] == pytest.approx(0.78047, abs=1e-4)


def test_reproduce_fig2_files(tmp_path):
    out_dir = str(tmp_path / "repro")
    assert main(["reproduce", "fig2", "--out", out_dir, "--parallel", "2"]) == 0
    for tc in ("1", "1.5", "2"):
        rows = read_rows(f"{out_dir}/fig2_tc{tc}.csv")
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == 47
        t1 = [float(r[1]) for r in rows[1:]]
        assert t1[-1] < t1[0]            # cooling improves across the window


def test_reproduce_fig4_tables(tmp_path):
    out_dir = str(tmp_path / "repro4")
    assert main(["reproduce", "fig4", "--out", out_dir]) == 0
    rows_a = read_rows(f"{out_dir}/fig4a.csv")
    assert rows_a[0] == ["tc", "lowest_t1_positive", "lowest_t1_negative"]
    lows = {float(r[0]): (float(r[1]), float(r[2])) for r in rows_a[1:]}
    assert set(lows) == {1.0, 1.5, 2.0}
    for tc, (pos, neg) in lows.items():
        assert neg < pos < tc            # negative side always cools deeper
    rows_b = read_rows(f"{out_dir}/fig4b.csv")
    assert rows_b[0] == ["tc", "cooling_percent_positive", "cooling_percent_negative"]
    rows_t = read_rows(f"{out_dir}/fig4_thresholds.csv")
    modes = {(r[0], r[1]): float(r[2]) for r in rows_t[1:]}
    assert modes[("positive", "grid-edge")] == pytest.approx(0.476, abs=5e-3)
    assert modes[("negative", "plateau")] == pytest.approx(0.027, abs=1e-3)


def test_manifest_round_trip():
    manifest = RunManifest(command="sweep-th", config=default_config(),
                           options={"th_values": "1,2,3", "parallel": 2},
                           output_path="out.csv")
    again = RunManifest.from_dict(manifest.to_dict())
    assert again == manifest
