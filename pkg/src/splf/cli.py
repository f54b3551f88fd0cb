"""Command line front end.

Subcommands: simulate, energy-check, uniqueness-check, exponents.  Every
run writes a manifest with the config snapshot, seed, code version, wall
times, per-path divergence flags and content digests of all output files,
so a run is reproducible from its manifest alone.  SPLF_THREADS caps the
worker count for ensemble runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import OutputOptions, config_to_ini, parse_config
from .diagnostics import (energy_experiment, gronwall_experiment,
                          identical_noise_separation)
from .exponents import critical_exponents, exponent_report, uniqueness_threshold
from .integrator import SimConfig, TrajectoryRecord, simulate_ensemble
from .snapshot import write_snapshot
from .spectral import coords_to_field

__all__ = ["main"]


def _fmt(x: float) -> str:
    """Floats with 17 significant digits: lossless binary64 round trip."""
    return format(float(x), ".17g")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_record_csv(record: TrajectoryRecord, path: Path) -> None:
    K = record.coords.shape[1] if record.coords.size else 0
    header = ["t", "normL2sq", "normVp1_p", "int_diss", "int_gammaXX"] + [
        f"x_{k}" for k in range(K)]
    lines = [",".join(header)]
    for i in range(len(record.times)):
        row = [record.times[i], record.norm_l2_sq[i], record.norm_p1_p[i],
               record.int_diss[i], record.int_gamma[i], *record.coords[i]]
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_manifest(out_dir: Path, config: SimConfig, outputs: OutputOptions,
                    records, files, started: float, verdict=None) -> Path:
    manifest = {
        "tool": "splf",
        "version": __version__,
        "seed": config.seed,
        "dt_effective": config.dt_eff,
        "n_steps": config.n_steps,
        "config_ini": config_to_ini(config, outputs),
        "started_unix": started,
        "finished_unix": time.time(),
        "paths": [
            {"path_index": r.path_index, "diverged": r.diverged,
             "diverged_step": r.diverged_step}
            for r in records
        ],
        "outputs": [{"file": f.name, "sha256": _sha256(f)} for f in files],
    }
    if verdict is not None:
        manifest["verdict"] = verdict
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _report_to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _report_to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_report_to_jsonable(v) for v in obj]
    return obj


def _cmd_simulate(args) -> int:
    config, outputs = parse_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    records = simulate_ensemble(config)
    files = []
    for r in records:
        csv_path = out_dir / f"path_{r.path_index:06d}.csv"
        _write_record_csv(r, csv_path)
        files.append(csv_path)
        if outputs.snapshots and not r.diverged:
            snap_path = out_dir / f"path_{r.path_index:06d}_final.splf"
            write_snapshot(coords_to_field(r.final_coords, config.n, config.d),
                           snap_path)
            files.append(snap_path)
    _write_manifest(out_dir, config, outputs, records, files, started)
    n_div = sum(r.diverged for r in records)
    print(f"simulate,done,paths={len(records)},diverged={n_div},out={out_dir}")
    return 0


def _cmd_energy_check(args) -> int:
    config, outputs = parse_config(args.config)
    started = time.time()
    report = energy_experiment(config)
    status = "pass" if report.passed else "fail"
    print(",".join([
        "energy-check", status,
        f"lhs={_fmt(report.main.lhs_mean)}",
        f"rhs={_fmt(report.main.rhs)}",
        f"stderr={_fmt(report.main.lhs_stderr)}",
        f"residual={_fmt(report.residual)}",
        f"bias_allowance={_fmt(report.bias_allowance)}",
        f"shrink_ratio={_fmt(report.shrink_ratio)}",
        f"paths={report.main.n_paths}",
        f"diverged={report.main.n_diverged}",
    ]))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        rp = out_dir / "energy_report.json"
        rp.write_text(json.dumps(_report_to_jsonable(report), indent=2) + "\n")
        _write_manifest(out_dir, config, outputs, [], [rp], started,
                        verdict=status)
    return 0 if report.passed else 1


def _cmd_uniqueness_check(args) -> int:
    config, outputs = parse_config(args.config)
    started = time.time()
    if args.eps == 0.0:
        worst = max(identical_noise_separation(config, i)
                    for i in range(config.n_paths))
        ok = worst < 1e-12
        status = "pass" if ok else "fail"
        print(f"uniqueness-check,{status},branch=exact,"
              f"max_separation={_fmt(worst)},paths={config.n_paths}")
        report_obj = {"branch": "exact", "max_separation": worst,
                      "paths": config.n_paths}
        passed = ok
    else:
        report = gronwall_experiment(config, eps=args.eps,
                                     n_calibration=args.calibration,
                                     n_validation=config.n_paths,
                                     margin=args.margin)
        status = "pass" if report.passed else "fail"
        regime = "in" if report.in_uniqueness_regime else "outside-threshold"
        print(",".join([
            "uniqueness-check", status, "branch=gronwall",
            f"eps={_fmt(args.eps)}",
            f"c_hat={_fmt(report.c_hat)}",
            f"exponent={_fmt(report.exponent)}",
            f"margin={_fmt(report.margin)}",
            f"violations={report.total_violations}",
            f"pairs_ok={report.pairs_ok}/{report.n_validation}",
            f"regime={regime}",
        ]))
        report_obj = _report_to_jsonable(report)
        passed = report.passed
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        rp = out_dir / "uniqueness_report.json"
        rp.write_text(json.dumps(report_obj, indent=2) + "\n")
        _write_manifest(out_dir, config, outputs, [], [rp], started,
                        verdict=status)
    return 0 if passed else 1


def _cmd_exponents(args) -> int:
    d = args.d
    if args.p is None:
        c = critical_exponents(d)
        rows = [("d", str(d)), ("p1", str(c.p1)), ("p2", str(c.p2)),
                ("p3", repr(c.p3)),
                ("uniqueness_threshold", str(uniqueness_threshold(d)))]
        if args.csv:
            print(",".join(k for k, _ in rows))
            print(",".join(v for _, v in rows))
        else:
            for k, v in rows:
                print(f"{k:>22}: {v}")
        return 0
    report = exponent_report(d, args.p)
    if args.csv:
        print(",".join(report.HEADER))
        print(",".join(str(v) for v in report.as_row()))
    else:
        for k, v in zip(report.HEADER, report.as_row()):
            print(f"{k:>22}: {v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splf",
        description="Spectral Galerkin simulation and verification of "
                    "stochastic power-law fluids on the torus.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an ensemble and write CSVs")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=_cmd_simulate)

    en = sub.add_parser("energy-check",
                        help="Monte Carlo energy balance with dt/2 control")
    en.add_argument("--config", required=True)
    en.add_argument("--out", default=None)
    en.set_defaults(func=_cmd_energy_check)

    un = sub.add_parser("uniqueness-check",
                        help="pathwise uniqueness under common noise")
    un.add_argument("--config", required=True)
    un.add_argument("--eps", type=float, required=True,
                    help="initial separation (0 = exact branch)")
    un.add_argument("--margin", type=float, default=0.5)
    un.add_argument("--calibration", type=int, default=64)
    un.add_argument("--out", default=None)
    un.set_defaults(func=_cmd_uniqueness_check)

    ex = sub.add_parser("exponents", help="exponent table for one (d, p)")
    ex.add_argument("--d", type=int, required=True)
    ex.add_argument("--p", type=float, default=None)
    ex.add_argument("--csv", action="store_true")
    ex.set_defaults(func=_cmd_exponents)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # structured errors -> nonzero exit, named cause
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
