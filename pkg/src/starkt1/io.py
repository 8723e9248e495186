"""Config loading/validation and CSV/JSON persistence of campaign artifacts."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from collections import OrderedDict
from dataclasses import asdict
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .estimators import EstimatorConfig
from .model import QubitModel, TlsDefect, random_device
from .protocol import ScanGrid, Schedule, SpectroscopyMap, T1TimeSeries

T1_COLUMNS = ("qubit_id", "time_hr", "t1_us", "stderr_us")
MAP_COLUMNS = ("qubit_id", "time_hr", "shift_mhz", "p1", "shots", "tau_us", "detuning_mhz")
OUTPUT_DIR_ENV = "STARKT1_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("starkt1").joinpath("config_schema.json").read_text()
    return json.loads(text)


def validate_config(cfg: dict) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{path}: {e.message}")
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines))


def canonical_json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n").encode()


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def atomic_write(path: Path, data: bytes | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- config -> objects -----------------------------------------------------

def qubit_from_dict(d: dict) -> QubitModel:
    bath = tuple(TlsDefect(**b) for b in d.get("bath", ()))
    return QubitModel(omega_q=d["omega_q"], delta_q=d["delta_q"], gamma_0=d["gamma_0"],
                      bath=bath, qubit_id=d.get("qubit_id", "Q0"))


def qubit_to_dict(q: QubitModel) -> dict:
    return {
        "qubit_id": q.qubit_id,
        "omega_q": q.omega_q,
        "delta_q": q.delta_q,
        "gamma_0": q.gamma_0,
        "bath": [asdict(b) for b in q.bath],
    }


def build_device(cfg: dict) -> list[QubitModel]:
    """Explicit ``device`` list, or a ``synthetic_device`` drawn from the master seed."""
    if "device" in cfg:
        return [qubit_from_dict(d) for d in cfg["device"]]
    spec = dict(cfg["synthetic_device"])
    n = spec.pop("n_qubits")
    # separate stream from the campaign's per-qubit streams
    ss = np.random.SeedSequence([cfg["master_seed"], 0x5EED])
    return random_device(n, np.random.default_rng(ss), **spec)


def build_schedule(d: dict) -> Schedule:
    d = dict(d)
    if "scan_hours" in d:
        hours = d.pop("scan_hours")
        d["n_scans"] = Schedule.scans_spanning(hours, d.get("scan_interval_hr", 3.5)) if hours > 0 else 0
    return Schedule(**d)


def build_grid(d: dict | None) -> ScanGrid:
    return ScanGrid.symmetric(**(d or {}))


def build_estimator(d: dict | None) -> EstimatorConfig:
    return EstimatorConfig(**(d or {}))


def output_dir(cfg: dict, override: str | None = None) -> Path:
    return Path(override or os.environ.get(OUTPUT_DIR_ENV) or cfg.get("output_dir") or "out")


# -- CSV -------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue().encode()


def t1_csv_bytes(series: list[T1TimeSeries]) -> bytes:
    rows = ((s.qubit_id, t, v, e) for s in series for t, v, e in zip(s.times, s.t1, s.stderr))
    return _csv_bytes(T1_COLUMNS, rows)


def maps_csv_bytes(maps: list[SpectroscopyMap]) -> bytes:
    def rows():
        for m in maps:
            for t, row in zip(m.times, m.p1):
                for w, p in zip(m.shifts, row):
                    yield (m.qubit_id, t, w, p, m.grid.shots, m.grid.tau, m.grid.detuning)
    return _csv_bytes(MAP_COLUMNS, rows())


def _read_rows(path, required) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"{path}: missing column(s) {', '.join(missing)}")
        return list(reader)


def read_t1_csv(path) -> list[T1TimeSeries]:
    groups: OrderedDict[str, list] = OrderedDict()
    for r in _read_rows(path, T1_COLUMNS):
        groups.setdefault(r["qubit_id"], []).append(
            (float(r["time_hr"]), float(r["t1_us"]), float(r["stderr_us"])))
    out = []
    for qid, vals in groups.items():
        a = np.array(vals, dtype=float).reshape(-1, 3)
        out.append(T1TimeSeries(qid, a[:, 0], a[:, 1], a[:, 2]))
    return out


def read_maps_csv(path) -> list[SpectroscopyMap]:
    groups: OrderedDict[str, list] = OrderedDict()
    meta: dict[str, tuple] = {}
    for r in _read_rows(path, MAP_COLUMNS):
        q = r["qubit_id"]
        groups.setdefault(q, []).append((float(r["time_hr"]), float(r["shift_mhz"]), float(r["p1"])))
        meta[q] = (int(r["shots"]) if r["shots"] else None, float(r["tau_us"]), float(r["detuning_mhz"]))
    out = []
    for q, vals in groups.items():
        times = list(OrderedDict.fromkeys(v[0] for v in vals))
        shifts = list(OrderedDict.fromkeys(v[1] for v in vals))
        if len(vals) != len(times) * len(shifts):
            raise ConfigError(f"{path}: map for {q} is not a full time x shift grid")
        p1 = np.array([v[2] for v in vals]).reshape(len(times), len(shifts))
        shots, tau, det = meta[q]
        out.append(SpectroscopyMap(q, np.array(times), ScanGrid(np.array(shifts), tau, shots, det), p1))
    return out


def write_csv(path, header, rows) -> None:
    atomic_write(path, _csv_bytes(header, rows))


def write_json(path, obj) -> None:
    atomic_write(path, canonical_json(_jsonable(obj)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
