from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from nhsw.cli import ScenarioConfig, load_scenario, main, parse_scenario
from nhsw.errors import ConfigError

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_analytic_stationary(tmp_path):
    out = tmp_path / "st"
    code = main(["analytic", "stationary", "--q0", "1.8", "--h-exit", "1", "--a", "5", "--b", "3.4",
                 "--c", "1.5", "--L", "10", "--n", "2000", "--out", str(out)])
    assert code == 0
    header, data = read_csv(out / "stationary.csv")
    assert header == ["x", "H", "u", "w", "pnh", "zb"] and data.shape == (2000, 6)
    assert (out / "bathymetry.csv").read_text().startswith("x,zb\n")
    assert (out / "regime.csv").read_text().startswith("x,lambda,regime\n")
    meta = json.loads((out / "meta.json").read_text())
    assert meta["params"]["g"] == 9.81 and meta["params"]["q0"] == 1.8
    assert meta["energy_flux_deviation"] < 1e-6


def test_analytic_soliton_meta(tmp_path):
    assert main(["analytic", "soliton", "--h0", "1", "--l", "2", "--d", "1", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["c0"] == pytest.approx(3.61663, abs=1e-5)
    assert meta["a"] == pytest.approx(1 / 3)


def test_analytic_thacker_equilibrium(tmp_path):
    code = main(["analytic", "thacker", "--h0", "1", "--b1", "0", "--b2", "0.5", "--f0", "0", "--t-end", "10",
                 "--out", str(tmp_path)])
    assert code == 0
    header, traj = read_csv(tmp_path / "trajectory.csv")
    assert header == ["t", "F", "f", "df"]
    assert np.all(traj[:, 1:] == 0.0)
    header, fields = read_csv(tmp_path / "fields_0.csv")
    assert header == ["x", "H", "u", "w", "pnh", "zb", "s"]


@pytest.mark.parametrize("argv", [
    ["analytic", "soliton", "--h0", "2", "--l", "1"],
    ["analytic", "stationary", "--q0", "0"],
    ["analytic", "bogus"],
    ["verify", "soliton", "--n", "128"],
    ["simulate"],
])
def test_usage_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "x")] if argv[0] == "analytic" and len(argv) > 2 else argv) == 1


def test_generator_failure_is_numerical(tmp_path):
    Hc = (2 * 1.8 ** 2 / 9.81) ** (1 / 3)
    assert main(["analytic", "stationary", "--h-exit", repr(Hc), "--out", str(tmp_path)]) == 2


def test_verify_soliton(tmp_path):
    assert main(["verify", "soliton", "--variant", "nh", "--n", "128,256,512", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["passed"] and meta["g"] == 9.81
    assert json.loads((tmp_path / "report.json").read_text())["n_list"] == [128, 256, 512]


def test_verify_thacker_gn_inverted(tmp_path, capsys):
    assert main(["verify", "thacker", "--variant", "gn", "--n", "128,256,512", "--out", str(tmp_path)]) == 0
    assert "non-convergent as expected" in capsys.readouterr().out
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["checks"]["ratio_to_nh_forcing"] > 10


def test_verify_stationary(capsys):
    assert main(["verify", "stationary", "--variant", "nh"]) == 0
    assert "flux constancy passes" in capsys.readouterr().out


def test_verify_failure_exit_code():
    # a band of zero width cannot be met
    assert main(["verify", "soliton", "--variant", "nh", "--tol", "0", "--n", "64,128"]) == 3


def test_parse_rejects_unknown_keys_with_line_numbers():
    text = "initial = soliton\n\n# comment\ncolour = blue\nn = many\n"
    with pytest.raises(ConfigError) as err:
        parse_scenario(text, "s.ini")
    msg = str(err.value)
    assert "s.ini:4: unknown key 'colour'" in msg
    assert "s.ini:5: n expects int" in msg


def test_parse_defaults_and_types():
    sc = parse_scenario("[scenario]\ninitial = dam-break\nenable_nh = no\nbc_left = outflow\nt-end = 0.2\n")
    assert sc.enable_nh is False and sc.t_end == 0.2 and sc.g == 9.81
    assert sc.solver_config().bc_left.kind == "outflow"


@pytest.mark.parametrize("text", ["initial = tsunami\n", "variant = gn\n", "cfl = 2\n", "bathymetry = csv\n",
                                  "n = 5\nn = 6\n", "just words\n"])
def test_parse_invalid(text):
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_shipped_scenarios_parse():
    for path in sorted(SCENARIOS.glob("*.ini")):
        assert isinstance(load_scenario(path), ScenarioConfig)


def test_simulate_lake_at_rest(tmp_path):
    assert main(["simulate", str(SCENARIOS / "lake_at_rest.ini"), "--out", str(tmp_path)]) == 0
    header, series = read_csv(tmp_path / "series.csv")
    E = series[:, header.index("energy")]
    assert np.max(np.abs(E - E[0])) <= 1e-12 * E[0]
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["g"] == 9.81
    assert meta["scenario"]["cfl"] == 0.5 and meta["solver"]["h_nh"] == 0.01


def test_simulate_is_deterministic(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("initial = soliton\nx_left = -20\nlength = 40\nn = 200\nt_end = 0.5\n"
                   "bc_left = periodic\nbc_right = periodic\norder = 2\n")
    for name in ("a", "b"):
        assert main(["simulate", str(cfg), "--out", str(tmp_path / name)]) == 0
    for f in ("series.csv", "snap_0.csv", "snap_1.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    meta = json.loads((tmp_path / "a" / "meta.json").read_text())
    assert 0.9 < meta["summary"]["amplitude_retention"] <= 1.01


def test_dam_break_toggle_changes_only_pressure(tmp_path):
    for name in ("dam_break", "dam_break_hydrostatic"):
        assert main(["simulate", str(SCENARIOS / f"{name}.ini"), "--out", str(tmp_path / name)]) == 0
    h_nh, a = read_csv(tmp_path / "dam_break" / "snap_1.csv")
    _, b = read_csv(tmp_path / "dam_break_hydrostatic" / "snap_1.csv")
    assert np.array_equal(a[:, 0], b[:, 0])
    assert np.all(b[:, h_nh.index("pnh")] == 0.0)
    assert np.any(a[:, h_nh.index("pnh")] != 0.0)


def test_simulate_failure_keeps_partial_output(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("initial = lake-at-rest\nt_end = 1\nmax_steps = 5\nbathymetry = csv\nbathymetry_file = nope.csv\n")
    assert main(["simulate", str(cfg), "--out", str(tmp_path / "o")]) == 1
