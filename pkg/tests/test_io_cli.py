import csv
import json
import math

import numpy as np
import pytest

from starkt1 import io as sio
from starkt1.cli import ESTIMATE_COLUMNS, main
from starkt1.estimators import EstimatorConfig, mean_t1_freq_time, single_instance_t1
from starkt1.model import QubitModel, TlsDefect
from starkt1.protocol import ScanGrid, SpectroscopyMap, T1TimeSeries

MINIMAL = {
    "master_seed": 5,
    "device": [{"qubit_id": "Q0", "omega_q": 5.0, "delta_q": -340.0, "gamma_0": 0.005,
                "bath": [{"mu_freq": -4.0, "coupling_g": 0.04, "hwhm": 0.4, "ou_theta": 0.05, "ou_sigma": 0.2}]}],
    "schedule": {"t1_days": 2, "n_scans": 2},
    "grid": {"max_shift": 10, "points_per_direction": 51},
}


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


# -- config and CSV -----------------------------------------------------------

def test_validate_minimal():
    sio.validate_config(MINIMAL)


def test_validation_error_names_path():
    bad = json.loads(json.dumps(MINIMAL))
    bad["device"][0]["bath"][0]["hwhm"] = -1
    with pytest.raises(sio.ConfigError, match="device/0/bath/0/hwhm"):
        sio.validate_config(bad)
    bad = json.loads(json.dumps(MINIMAL))
    bad["schedule"]["n_scans"] = "two"
    with pytest.raises(sio.ConfigError, match="schedule/n_scans"):
        sio.validate_config(bad)


def test_validation_unknown_key():
    bad = dict(MINIMAL, colour="red")
    with pytest.raises(sio.ConfigError):
        sio.validate_config(bad)


def test_qubit_dict_roundtrip():
    q = QubitModel(5.1, -320.0, 0.004, (TlsDefect(-3.0, 0.02, 0.5, 0.1, 0.3),), "Q9")
    assert sio.qubit_from_dict(sio.qubit_to_dict(q)) == q


def test_t1_csv_roundtrip(tmp_path):
    series = [T1TimeSeries("A", [0.0, 24.0], [101.5, np.nan], [2.0, np.nan]),
              T1TimeSeries("B", [0.0, 24.0], [55.25, 60.0], [1.0, 1.5])]
    p = tmp_path / "t1.csv"
    sio.atomic_write(p, sio.t1_csv_bytes(series))
    assert sio.read_t1_csv(p) == series


def test_map_csv_roundtrip(tmp_path):
    g = ScanGrid(np.array([-1.0, 0.0, 1.0]), 50.0, 1000, 50.0)
    maps = [SpectroscopyMap("A", [0.0, 3.5], g, [[0.3, 0.4, np.nan], [0.2, 0.1, 0.9]])]
    p = tmp_path / "maps.csv"
    sio.atomic_write(p, sio.maps_csv_bytes(maps))
    assert sio.read_maps_csv(p) == maps


def test_map_csv_missing_column(tmp_path):
    p = tmp_path / "maps.csv"
    p.write_text("qubit_id,time_hr,shift_mhz\nA,0,0\n")
    with pytest.raises(sio.ConfigError, match="missing column"):
        sio.read_maps_csv(p)


def test_output_dir_precedence(monkeypatch):
    monkeypatch.delenv(sio.OUTPUT_DIR_ENV, raising=False)
    assert str(sio.output_dir({})) == "out"
    assert str(sio.output_dir({"output_dir": "cfg"})) == "cfg"
    monkeypatch.setenv(sio.OUTPUT_DIR_ENV, "env")
    assert str(sio.output_dir({"output_dir": "cfg"})) == "env"
    assert str(sio.output_dir({"output_dir": "cfg"}, "flag")) == "flag"


# -- simulate -----------------------------------------------------------------

def _simulate(tmp_path, name="run", cfg=MINIMAL):
    out = tmp_path / name
    assert main(["simulate", str(_write_cfg(tmp_path, cfg)), "--out", str(out)]) == 0
    return out


def test_simulate_is_deterministic(tmp_path):
    a = _simulate(tmp_path, "a")
    b = _simulate(tmp_path, "b")
    for f in ("config.json", "device.json", "t1.csv", "maps.csv", "manifest.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    assert len(_read_csv(a / "t1.csv")) == 2
    assert len(_read_csv(a / "maps.csv")) == 2 * 101


def test_simulate_manifest(tmp_path):
    out = _simulate(tmp_path)
    man = json.loads((out / "manifest.json").read_text())
    assert man["seed"] == 5 and man["versions"]["starkt1"]
    for f, h in man["files"].items():
        assert sio.sha256((out / f).read_bytes()) == h


def test_simulate_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(sio.OUTPUT_DIR_ENV, str(tmp_path / "envout"))
    assert main(["simulate", str(_write_cfg(tmp_path, MINIMAL))]) == 0
    assert (tmp_path / "envout" / "t1.csv").exists()


def test_simulate_synthetic(tmp_path):
    cfg = {"master_seed": 1, "synthetic_device": {"n_qubits": 3}, "schedule": {"t1_days": 3},
           "grid": {"points_per_direction": 11}}
    out = _simulate(tmp_path, cfg=cfg)
    assert len({r["qubit_id"] for r in _read_csv(out / "t1.csv")}) == 3


def test_simulate_invalid_config_exit_1(tmp_path, capsys):
    bad = dict(MINIMAL, master_seed=-1)
    assert main(["simulate", str(_write_cfg(tmp_path, bad)), "--out", str(tmp_path / "x")]) == 1
    assert "master_seed" in capsys.readouterr().err


def test_unknown_subcommand_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_missing_file_exit_1(tmp_path):
    assert main(["track", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "t")]) == 1


# -- estimate -----------------------------------------------------------------

def test_estimate_matches_library(tmp_path):
    run = _simulate(tmp_path)
    out = tmp_path / "est"
    assert main(["estimate", "--map", str(run / "maps.csv"), "--t1", str(run / "t1.csv"),
                 "--delta-omega", "0", "--n-slices", "1", "--out", str(out)]) == 0
    rows = _read_csv(out / "estimates.csv")
    assert tuple(rows[0]) == ESTIMATE_COLUMNS and len(rows) == 1
    r = rows[0]
    assert float(r["t1_freq_time_us"]) == pytest.approx(float(r["t1_single_us"]), rel=1e-12)
    m = sio.read_maps_csv(run / "maps.csv")[0]
    s = sio.read_t1_csv(run / "t1.csv")[0]
    assert float(r["t1_single_us"]) == pytest.approx(single_instance_t1(m, 50.0), abs=1e-9)
    assert float(r["t1_long_us"]) == pytest.approx(np.nanmean(s.t1), abs=1e-9)
    assert float(r["t1_daily_single_us"]) == pytest.approx(s.t1[0], abs=1e-9)
    want = mean_t1_freq_time(m, EstimatorConfig(delta_omega=0.0)).value
    assert float(r["t1_freq_time_us"]) == pytest.approx(want, abs=1e-9)


def test_estimate_window_too_wide_exit_1(tmp_path):
    run = _simulate(tmp_path)
    assert main(["estimate", "--map", str(run / "maps.csv"), "--t1", str(run / "t1.csv"),
                 "--delta-omega", "20", "--out", str(tmp_path / "e")]) == 1


# -- stats --------------------------------------------------------------------

def _series_csv(tmp_path, kind="rw", n=250):
    rng = np.random.default_rng(0)
    x = 100 + (np.cumsum(rng.normal(0, 2, n)) if kind == "rw" else rng.normal(0, 10, n))
    p = tmp_path / f"{kind}.csv"
    sio.atomic_write(p, sio.t1_csv_bytes([T1TimeSeries("Q0", np.arange(n) * 24.0, x, np.ones(n))]))
    return p


def test_stats_rsim(tmp_path):
    out = tmp_path / "rsim"
    assert main(["stats", "rsim", "--n-devices", "50", "--seed", "3", "--out", str(out)]) == 0
    rep = json.loads((out / "rsim.json").read_text())
    assert rep["seed"] == 3 and rep["result"]["mean_r_at_10"] >= 0.75
    assert len(_read_csv(out / "rsim_curve.csv")) == 160


def test_stats_adf(tmp_path):
    out = tmp_path / "adf"
    assert main(["stats", "adf", "--t1", str(_series_csv(tmp_path)), "--out", str(out)]) == 0
    res = json.loads((out / "adf.json").read_text())["result"]["Q0"]
    assert {"t_stat", "p_value", "lags_used", "critical_values"} <= set(res)
    assert res["p_value"] > 0.05


def test_stats_acf_moments_ergodicity(tmp_path):
    t1 = str(_series_csv(tmp_path, "white"))
    assert main(["stats", "acf", "--t1", t1, "--max-lag", "10", "--out", str(tmp_path / "a")]) == 0
    assert len(_read_csv(tmp_path / "a" / "acf_Q0.csv")) == 11
    assert main(["stats", "moments", "--t1", t1, "--out", str(tmp_path / "m")]) == 0
    mom = json.loads((tmp_path / "m" / "moments.json").read_text())["result"]["Q0"]
    assert mom["n"] == 250
    assert main(["stats", "ergodicity", "--t1", t1, "--k-min", "2", "--k-max", "5",
                 "--out", str(tmp_path / "e")]) == 0
    erg = json.loads((tmp_path / "e" / "ergodicity.json").read_text())["result"]["Q0"]
    assert sorted(erg, key=int) == ["2", "3", "4", "5"] and erg["2"]["m"] == 125


def test_stats_unknown_qubit_exit_1(tmp_path):
    assert main(["stats", "adf", "--t1", str(_series_csv(tmp_path)), "--qubit", "Z",
                 "--out", str(tmp_path / "x")]) == 1


def test_stats_pearson(tmp_path):
    p = tmp_path / "xy.csv"
    p.write_text("a,b\n1,2\n2,4\n3,7\n")
    assert main(["stats", "pearson", "--csv", str(p), "--x", "a", "--y", "b", "--out", str(tmp_path / "p")]) == 0
    r = json.loads((tmp_path / "p" / "pearson.json").read_text())["result"]["r"]
    assert r == pytest.approx(np.corrcoef([1, 2, 3], [2, 4, 7])[0, 1])


def test_stats_rsurface(tmp_path):
    cfg = {"master_seed": 2, "synthetic_device": {"n_qubits": 3}, "schedule": {"t1_days": 5, "n_scans": 2},
           "grid": {"points_per_direction": 101}}
    run = _simulate(tmp_path, cfg=cfg)
    out = tmp_path / "rs"
    assert main(["stats", "rsurface", "--t1", str(run / "t1.csv"), "--map", str(run / "maps.csv"),
                 "--delta-omega", "1,5", "--n", "1,2", "--out", str(out)]) == 0
    assert len(_read_csv(out / "rsurface.csv")) == 4


# -- track --------------------------------------------------------------------

def test_track_empty_map(tmp_path):
    p = tmp_path / "empty.csv"
    sio.atomic_write(p, sio.maps_csv_bytes([]))
    out = tmp_path / "t"
    assert main(["track", str(p), "--out", str(out)]) == 0
    assert _read_csv(out / "tracks.csv") == []
    man = json.loads((out / "manifest.json").read_text())
    assert man["config"]["threshold"] == 0.315


def test_track_seven_features(tmp_path):
    w = np.linspace(-25, 25, 501)
    mus = [-21.0, -14.0, -7.0, 0.0, 7.0, 14.0, 21.0]
    rng = np.random.default_rng(0)
    rows = []
    for _ in range(60):
        row = np.full(w.size, 0.6)
        for mu in mus:
            c = mu + rng.normal(0, 0.5)
            row = np.minimum(row, 0.6 - 0.45 * 0.04 / (0.04 + (w - c) ** 2))
        rows.append(row)
    m = SpectroscopyMap("Q", np.arange(60) * 3.5, ScanGrid(w, shots=None), np.array(rows))
    p = tmp_path / "maps.csv"
    sio.atomic_write(p, sio.maps_csv_bytes([m]))
    out = tmp_path / "t"
    assert main(["track", str(p), "--out", str(out)]) == 0
    fits = json.loads((out / "linewidths.json").read_text())
    assert len(fits) == 7
    for f, mu in zip(fits, mus):
        assert abs(f["mu_mhz"] - mu) < 0.5
        assert f["d_1d"] == pytest.approx(2 * f["d_k"] ** 2, rel=1e-9)
        assert f["sigma_mhz"] == pytest.approx(0.5, rel=0.4)
    assert len(_read_csv(out / "tracks.csv")) == 7 * 60
    assert math.isfinite(float(_read_csv(out / "linewidths.csv")[0]["d_k"]))
