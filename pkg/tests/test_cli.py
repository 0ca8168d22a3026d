import csv
import json

import numpy as np
import pytest

from thermoqfi import __version__
from thermoqfi.cli import SweepConfig, ConfigError, main
from thermoqfi.presets import PRESETS


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_fig2_preset(tmp_path):
    assert main(["sweep", "--preset", "fig2", "--out", str(tmp_path), "--threads", "2"]) == 0
    csvs = sorted(tmp_path.glob("fig2_*.csv"))
    assert len(csvs) == 4
    for path in csvs:
        rows = read_csv(path)
        assert rows[0] == ["T", "qfi", "coherence", "rel_error"]
        temps = [float(r[0]) for r in rows[1:]]
        assert all(b > a for a, b in zip(temps, temps[1:]))
        assert all(np.isfinite(float(x)) for r in rows[1:] for x in r)
        side = json.loads(path.with_suffix(".json").read_text())
        assert set(side) == {"config", "peaks", "fits", "validation", "version", "wall_time_s"}
        assert side["version"] == __version__
        assert side["config"]["figure"] == "Fig. 2"
        assert len(side["peaks"]) == 2
    assert b"\r\n" not in csvs[0].read_bytes()


def test_csv_is_deterministic(tmp_path):
    args = ["sweep", "--model", "asymmetric-local", "--omega-p", "1", "--omega-k", "0.04", "--g-k", "0.02",
            "--n-points", "40", "--threads", "1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()
    row = read_csv(tmp_path / "a" / "sweep.csv")[5]
    assert float(repr(float(row[1]))) == float(row[1])


def test_config_file_and_validate_numeric(tmp_path):
    cfg = {"model": "global-gibbs", "params": {"omega_p": 1.0, "omega_k": [0.03, 0.05], "g_k": [0.01, 0.02]},
           "t_min": 0.005, "t_max": 1.0, "n_points": 30, "validate_numeric": True, "label": "pair"}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 0
    side = json.loads((tmp_path / "pair.json").read_text())
    assert side["validation"]["passed"]
    assert side["config"]["params"] == cfg["params"]


def test_local_validate_numeric(tmp_path):
    assert main(["sweep", "--model", "asymmetric-local", "--omega-p", "0.26", "--omega-k", "0.09,0.17",
                 "--g-k", "0.003,0.05", "--n-points", "20", "--validate-numeric", "--out", str(tmp_path)]) == 0
    side = json.loads((tmp_path / "sweep.json").read_text())
    assert side["validation"]["max_trace_distance"] < 1e-7


@pytest.mark.parametrize("extra", [
    ["--n-points", "2"],
    ["--t-min", "2", "--t-max", "1"],
    ["--omega-p", "-1"],
])
def test_bad_config_exit_2(tmp_path, extra):
    args = ["sweep", "--model", "asymmetric-local", "--omega-p", "1", "--omega-k", "0.04", "--g-k", "0.02"]
    assert main(args + extra + ["--out", str(tmp_path)]) == 2


def test_bad_config_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"model": "asymmetric-local", "params": {"omega_p": 1}}')
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2
    path.write_text("not json")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--preset", "fig2", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--preset", "fig9"])
    assert exc.value.code == 2


def test_dipole_dipole_is_numeric_failure(tmp_path):
    rc = main(["sweep", "--model", "dipole-dipole", "--omega-p", "1", "--omega-1", "0.5", "--g", "0.1",
               "--n-points", "10", "--out", str(tmp_path)])
    assert rc == 3
    assert not list(tmp_path.glob("*.csv"))


def test_dm_sweep(tmp_path):
    assert main(["sweep", "--model", "dm", "--omega-p", "1", "--omega-1", "0.5", "--g", "0.1",
                 "--t-min", "0.01", "--n-points", "30", "--validate-numeric", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert all(float(r[2]) == 0 for r in rows[1:])


def test_scaling_small(tmp_path, capsys):
    assert main(["scaling", "--n-max", "2", "--n-points", "150", "--out", str(tmp_path)]) == 0
    side = json.loads((tmp_path / "scaling_scaling.json").read_text())
    assert side["fits"]["qfi"] is None and "warning" in side["fits"]
    assert len(read_csv(tmp_path / "scaling_scaling.csv")) == 3
    assert "fit skipped" in capsys.readouterr().err


def test_scaling_preset(tmp_path):
    assert main(["scaling", "--preset", "fig5", "--out", str(tmp_path), "--threads", "1"]) == 0
    side = json.loads((tmp_path / "fig5_scaling.json").read_text())
    assert side["validation"]["dense_spot_check"]["N"] == 8
    assert side["validation"]["dense_spot_check"]["passed"]
    assert 0.8 <= side["fits"]["coherence"]["exponent"] <= 1.2
    assert side["config"]["figure"] == "Fig. 5"


def test_validate_command(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["validate", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"]
    names = [c["name"] for c in doc["literal_forms"]]
    assert "global-n1-population-prefactor" in names
    assert "global-low-temperature-term" in names
    assert "thermal-peak-constant" in names
    assert "overall: PASS" in capsys.readouterr().out


def test_validate_fault_injection():
    assert main(["validate", "--fault", "boltzmann-sign"]) == 1


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("THERMOQFI_THREADS", "nope")
    assert main(["sweep", "--preset", "fig3", "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("THERMOQFI_THREADS", "1")
    assert main(["sweep", "--preset", "fig3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig3_approx.csv").exists()


def test_presets_encode_captions():
    fig2 = PRESETS["fig2"]
    assert [c["params"]["g_k"][0] for c in fig2["curves"]] == [0.01, 0.02, 0.03, 0.04]
    fig4 = PRESETS["fig4"]
    assert [c["params"]["omega_p"] for c in fig4["curves"]] == [0.26, 0.3, 0.4]
    assert all(c["params"]["omega_k"] == [0.09, 0.17] and c["params"]["g_k"] == [0.003, 0.05] for c in fig4["curves"])
    fig6 = PRESETS["fig6"]
    assert [c["params"]["g_k"][1] for c in fig6["curves"]] == [0.15, 0.2, 0.3, 0.3]
    assert "ambiguity" in fig6
    assert PRESETS["fig5"]["scaling"] == {"omega_p": 1.0, "omega": 0.03, "g": 0.01, "n_max": 10}
    for name, pre in PRESETS.items():
        assert pre["figure"] == f"Fig. {name[3:]}"


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(model="nope", params={})
    with pytest.raises(ConfigError):
        SweepConfig(model="asymmetric-local", params={"omega_p": 1, "omega_k": [0.1] * 3, "g_k": [0.01] * 3})
    with pytest.raises(ConfigError):
        SweepConfig(model="dm", params={"omega_p": 1, "omega_1": 0.5, "g": 0.1, "extra": 1})
    with pytest.raises(ConfigError):
        SweepConfig(model="dm", params={"omega_p": 1, "omega_1": 0.5, "g": 0.1}, outputs=["plots"])
    cfg = SweepConfig(model="dm", params={"omega_p": 1, "omega_1": 0.5, "g": 0.1}, n_points=3)
    assert SweepConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
