"""Batch command line: simulate, estimate, stats, track.

Exit codes: 0 success, 1 runtime/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as sio
from .estimators import (
    EstimatorConfig,
    EstimatorError,
    ensemble_estimator,
    mean_p1_freq_time,
    mean_p1_over_time,
    mean_t1_freq_time,
    mean_t1_over_time,
    p1_to_t1,
    single_instance_t1,
    t1_to_p1,
)
from .protocol import run_campaign
from .stats import (
    RSimConfig,
    adf_test,
    autocorrelation,
    ergodicity_partition_test,
    moments_and_normality,
    pearson_r,
    r_vs_window,
    sample_analytic_r,
    simulate_r_convergence,
)
from .tracking import TrackConfig, accumulate_tracks, fit_tracks

ESTIMATE_COLUMNS = ("qubit_id", "t1_long_us", "p1_long", "t1_freq_time_us", "p1_freq_time",
                    "t1_ensemble_us", "t1_single_us", "t1_daily_single_us", "n_cells")


def _manifest(out: Path, command: str, config: dict, files: list[str], seed=None) -> None:
    cfg_bytes = sio.canonical_json(sio._jsonable(config))
    manifest = {
        "command": command,
        "versions": {"starkt1": __version__, "numpy": np.__version__},
        "seed": seed,
        "config": sio._jsonable(config),
        "config_sha256": sio.sha256(cfg_bytes),
        "files": {f: sio.sha256((out / f).read_bytes()) for f in sorted(files)},
    }
    sio.write_json(out / "manifest.json", manifest)


# -- simulate --------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = json.loads(Path(args.config).read_text())
    sio.validate_config(cfg)
    device = sio.build_device(cfg)
    schedule = sio.build_schedule(cfg["schedule"])
    grid = sio.build_grid(cfg.get("grid"))
    out = sio.output_dir(cfg, args.out)
    result = run_campaign(device, schedule, cfg["master_seed"], grid=grid, workers=args.workers)

    sio.atomic_write(out / "config.json", sio.canonical_json(cfg))
    sio.atomic_write(out / "device.json", sio.canonical_json([sio.qubit_to_dict(q) for q in device]))
    sio.atomic_write(out / "t1.csv", sio.t1_csv_bytes(result.t1_series))
    sio.atomic_write(out / "maps.csv", sio.maps_csv_bytes(result.maps))
    _manifest(out, "simulate", cfg, ["config.json", "device.json", "t1.csv", "maps.csv"],
              seed=cfg["master_seed"])
    print(f"wrote {len(result.t1_series)} qubit(s), {schedule.n_scans} scan slice(s) to {out}")
    return 0


# -- estimate --------------------------------------------------------------

def _estimate_rows(maps, series, cfg: EstimatorConfig, tau_long: float):
    by_id = {s.qubit_id: s for s in series}
    rows = []
    for m in maps:
        s = by_id.get(m.qubit_id)
        if s is None:
            raise EstimatorError(f"no T1 series for qubit {m.qubit_id}")
        t1_long = mean_t1_over_time(s).value
        finite = s.t1[np.isfinite(s.t1)]
        p1_long = mean_p1_over_time(t1_to_p1(finite, tau_long)).value
        ft = mean_t1_freq_time(m, cfg)
        fp = mean_p1_freq_time(m, cfg)
        try:
            ens = ensemble_estimator(m.shifts, m.p1[0], cfg, m.grid.shots).value
        except EstimatorError:
            ens = float("nan")
        try:
            single = single_instance_t1(m, cfg.tau)
        except EstimatorError:
            single = float("nan")
        rows.append((m.qubit_id, t1_long, p1_long, ft.value, fp.value, ens, single,
                     float(finite[0]) if finite.size else float("nan"), ft.n_used))
    return rows


def cmd_estimate(args) -> int:
    maps = sio.read_maps_csv(args.map)
    series = sio.read_t1_csv(args.t1)
    cfg = EstimatorConfig(delta_omega=args.delta_omega, chi=args.chi, n_slices=args.n_slices,
                          tau=args.tau, clip=args.clip)
    rows = _estimate_rows(maps, series, cfg, args.tau_long)
    out = Path(args.out)
    sio.write_csv(out / "estimates.csv", ESTIMATE_COLUMNS, rows)
    _manifest(out, "estimate", {"map": str(args.map), "t1": str(args.t1), "delta_omega": args.delta_omega,
                                "chi": args.chi, "n_slices": args.n_slices, "tau": args.tau,
                                "tau_long": args.tau_long, "clip": args.clip}, ["estimates.csv"])
    return 0


# -- stats -----------------------------------------------------------------

def _select(series, qubit):
    if qubit is None:
        return series
    sel = [s for s in series if s.qubit_id == qubit]
    if not sel:
        raise EstimatorError(f"qubit {qubit} not found")
    return sel


def _finite(s):
    return s.t1[np.isfinite(s.t1)]


def cmd_stats(args) -> int:
    out = Path(args.out)
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
              if k not in ("func", "out")}
    seed = getattr(args, "seed", None)
    files = []
    sub = args.stat

    if sub == "pearson":
        import csv
        with open(args.csv, newline="") as fh:
            rows = list(csv.DictReader(fh))
        x = [float(r[args.x]) for r in rows]
        y = [float(r[args.y]) for r in rows]
        res = pearson_r(x, y)
        report = {"r": res.r, "n_points": res.n_points}
    elif sub == "rsim":
        cfg = RSimConfig(n_qubits=args.n_qubits, alpha=args.alpha, beta_std=args.beta_std,
                         n_devices=args.n_devices, n_max=args.n_max)
        conv = simulate_r_convergence(cfg, np.random.default_rng(args.seed))
        am, asd = sample_analytic_r(conv.betas, cfg.alpha, conv.n)
        sio.write_csv(out / "rsim_curve.csv", ("n", "mean_r", "std_r", "analytic_mean_r", "analytic_std_r"),
                      zip(conv.n.tolist(), conv.mean_r, conv.std_r, am, asd))
        files.append("rsim_curve.csv")
        idx = min(10, cfg.n_max) - 1
        report = {"mean_r_at_10": float(conv.mean_r[idx]), "mean_r_final": float(conv.mean_r[-1])}
    else:
        series = _select(sio.read_t1_csv(args.t1), args.qubit)
        report = {}
        if sub == "acf":
            for s in series:
                acf = autocorrelation(_finite(s), args.max_lag)
                name = f"acf_{s.qubit_id}.csv"
                sio.write_csv(out / name, ("lag", "acf"), zip(range(acf.size), acf))
                files.append(name)
                report[s.qubit_id] = {"acf": acf}
        elif sub == "adf":
            for s in series:
                r = adf_test(_finite(s), trend=args.trend)
                report[s.qubit_id] = {"t_stat": r.t_stat, "p_value": r.p_value, "lags_used": r.lags_used,
                                      "n_obs": r.n_obs, "trend": r.trend,
                                      "critical_values": r.critical_values}
        elif sub == "moments":
            for s in series:
                m = moments_and_normality(_finite(s))
                report[s.qubit_id] = {"mean_us": m.mean, "std_us": m.std, "skew": m.skew,
                                      "kurtosis": m.kurtosis, "skew_p": m.skew_p,
                                      "kurtosis_p": m.kurtosis_p, "n": m.n}
        elif sub == "ergodicity":
            for s in series:
                rep = ergodicity_partition_test(_finite(s), range(args.k_min, args.k_max + 1))
                report[s.qubit_id] = {
                    str(k): {"m": p.m, "ensemble_means": p.ensemble_means, "t_pvalues": p.t_pvalues,
                             "runs_pvalues": p.runs_pvalues, "dependent": p.dependent,
                             "rejection_fraction": p.rejection_fraction()}
                    for k, p in rep.partitions.items()}
        elif sub == "rsurface":
            maps = sio.read_maps_csv(args.map)
            by_id = {s.qubit_id: s for s in series}
            long_means = [mean_t1_over_time(by_id[m.qubit_id]).value for m in maps]
            surf = r_vs_window(maps, long_means, args.delta_omega, args.n, tau=args.tau)
            rows = [(dw, n, surf.r[a, b]) for a, dw in enumerate(surf.delta_omegas)
                    for b, n in enumerate(surf.n_slices)]
            sio.write_csv(out / "rsurface.csv", ("delta_omega_mhz", "n_slices", "r"), rows)
            files.append("rsurface.csv")
            report = {"delta_omega_mhz": surf.delta_omegas, "n_slices": surf.n_slices, "r": surf.r}

    sio.write_json(out / f"{sub}.json", {"config": config, "seed": seed, "result": report})
    files.append(f"{sub}.json")
    _manifest(out, f"stats {sub}", config, files, seed=seed)
    return 0


# -- track -----------------------------------------------------------------

def cmd_track(args) -> int:
    maps = sio.read_maps_csv(args.map)
    if args.qubit is not None:
        maps = [m for m in maps if m.qubit_id == args.qubit]
    cfg = TrackConfig(p_threshold=args.threshold, min_prominence=args.min_prominence,
                      cluster_gap=args.cluster_gap)
    out = Path(args.out)
    track_rows, fits = [], []
    for m in maps:
        res = accumulate_tracks(m, cfg)
        track_rows += [(m.qubit_id, t, w, p) for t, w, p in res.rows()]
        for (lo, hi), fit in zip(res.windows, fit_tracks(res, bin_width=args.bin_width)):
            rec = {"qubit_id": m.qubit_id, "window_lo_mhz": lo, "window_hi_mhz": hi}
            if fit is None:
                rec.update(mu_mhz=None, sigma_mhz=None, n_fit=None, duration_hr=None, d_k=None, d_1d=None)
            else:
                lw, pair = fit
                rec.update(mu_mhz=lw.mu, sigma_mhz=lw.sigma, n_fit=lw.n_fit, duration_hr=lw.duration,
                           d_k=pair.d_k if pair else None, d_1d=pair.d_1d if pair else None)
            fits.append(rec)
    sio.write_csv(out / "tracks.csv", ("qubit_id", "time_hr", "shift_mhz", "p1"), track_rows)
    cols = ("qubit_id", "window_lo_mhz", "window_hi_mhz", "mu_mhz", "sigma_mhz", "n_fit",
            "duration_hr", "d_k", "d_1d")
    sio.write_csv(out / "linewidths.csv", cols, ([f[c] for c in cols] for f in fits))
    sio.write_json(out / "linewidths.json", fits)
    _manifest(out, "track", {"map": str(args.map), "threshold": args.threshold,
                             "min_prominence": args.min_prominence, "cluster_gap": args.cluster_gap,
                             "bin_width": args.bin_width, "qubit": args.qubit},
              ["tracks.csv", "linewidths.csv", "linewidths.json"])
    return 0


def _floats(text):
    return [float(v) for v in text.split(",")]


def _ints(text):
    return [int(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starkt1", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a campaign from a JSON config")
    s.add_argument("config", type=Path)
    s.add_argument("--out", help=f"output directory (overrides config and ${sio.OUTPUT_DIR_ENV})")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="per-qubit T1/P1 estimator table")
    e.add_argument("--map", required=True, type=Path)
    e.add_argument("--t1", required=True, type=Path)
    e.add_argument("--delta-omega", type=float, default=5.0)
    e.add_argument("--chi", type=float, default=1.0)
    e.add_argument("--n-slices", type=int, default=1)
    e.add_argument("--tau", type=float, default=50.0)
    e.add_argument("--tau-long", type=float, default=53.0,
                   help="delay at which the long-series P1 is evaluated")
    e.add_argument("--clip", action="store_true", help="clip saturated cells instead of dropping")
    e.add_argument("--out", default="estimate")
    e.set_defaults(func=cmd_estimate)

    st = sub.add_parser("stats", help="statistics reports")
    ss = st.add_subparsers(dest="stat", required=True)

    def t1_sub(name, help_):
        q = ss.add_parser(name, help=help_)
        q.add_argument("--t1", required=True, type=Path)
        q.add_argument("--qubit")
        q.add_argument("--out", default=f"stats_{name}")
        q.set_defaults(func=cmd_stats)
        return q

    q = ss.add_parser("pearson", help="Pearson R between two CSV columns")
    q.add_argument("--csv", required=True, type=Path)
    q.add_argument("--x", required=True)
    q.add_argument("--y", required=True)
    q.add_argument("--out", default="stats_pearson")
    q.set_defaults(func=cmd_stats)

    q = ss.add_parser("rsim", help="Monte Carlo R convergence curve")
    q.add_argument("--n-qubits", type=int, default=10)
    q.add_argument("--alpha", type=float, default=0.2)
    q.add_argument("--beta-std", type=float, default=0.1)
    q.add_argument("--n-devices", type=int, default=200)
    q.add_argument("--n-max", type=int, default=160)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="stats_rsim")
    q.set_defaults(func=cmd_stats)

    t1_sub("acf", "autocorrelation of each T1 series").add_argument("--max-lag", type=int, default=30)
    t1_sub("adf", "augmented Dickey-Fuller test").add_argument("--trend", action="store_true")
    t1_sub("moments", "moments and normality tests")
    q = t1_sub("ergodicity", "partition ensemble ergodicity test")
    q.add_argument("--k-min", type=int, default=2)
    q.add_argument("--k-max", type=int, default=40)
    q = t1_sub("rsurface", "Pearson R over (delta_omega, n)")
    q.add_argument("--map", required=True, type=Path)
    q.add_argument("--delta-omega", type=_floats, default=[0.5, 1, 2, 5, 10])
    q.add_argument("--n", type=_ints, default=[1, 2, 5])
    q.add_argument("--tau", type=float, default=50.0)

    t = sub.add_parser("track", help="TLS tracks and linewidth fits")
    t.add_argument("map", type=Path)
    t.add_argument("--threshold", type=float, default=0.315)
    t.add_argument("--min-prominence", type=float, default=0.02)
    t.add_argument("--cluster-gap", type=float, default=2.0)
    t.add_argument("--bin-width", type=float, default=0.1)
    t.add_argument("--qubit")
    t.add_argument("--out", default="track")
    t.set_defaults(func=cmd_track)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        return args.func(args)
    except (ValueError, RuntimeError, KeyError, OSError) as exc:
        print(f"starkt1 {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
