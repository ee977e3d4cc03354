"""Command line interface: ``hgf run|sweep|predict|presets``.

Exit statuses: 0 success, 2 configuration error, 3 numeric fault,
10 blowup (or metric degeneracy) detected.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blowup import blowup_report, predict_tmax
from .config import PRESETS, SWEEPABLE, Scenario, Setup, parse_config, prepare, with_override
from .curvature import curvature_field, fit_decay_series
from .errors import (BlowupRangeError, ConfigurationError, ExpressionError, HGFError,
                     InvalidMetricError, NonTerminationError, NumericFault, SamplingError)
from .grid import FlowTrajectory
from .radial import radial_curvature, run_radial
from .solver import integrate, run
from .torus import run_periodic, volume

log = logging.getLogger("hgflow")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_BLOWUP = 0, 2, 3, 10
FIELD_HEADER = "t,x,u,p,q,r,s,R"
FMT = "%.11e"  # 12 significant digits


@dataclass
class RunResult:
    status: int
    trajectory: FlowTrajectory = None
    setup: Setup = None
    report: dict = None
    files: list = field(default_factory=list)
    message: str = ""


def simulate(sc: Scenario):
    """Run the solver matching the scenario kind; returns ``(setup, trajectory)``."""
    setup = prepare(sc)
    lo, hi = setup.pad_cells
    if lo or hi:
        log.info("padded grid to [%.6g, %.6g] (%d + %d cells) around the window [%.6g, %.6g]",
                 setup.grid.x_min, setup.grid.x_max, lo, hi, sc.x_min, sc.x_max)
    if sc.kind == "radial":
        traj = run_radial(setup.grid, setup.init.u0, setup.init.u1, sc.solver)
    elif sc.kind == "torus":
        traj = run_periodic(setup.init, sc.solver)
    elif setup.state is not None:
        traj = integrate(setup.state, setup.grid, sc.solver)
    else:
        traj = run(setup.init, sc.solver)
    return setup, traj


def field_rows(sc: Scenario, setup: Setup, traj: FlowTrajectory) -> np.ndarray:
    """Rows ``t, x, u, p, q, r, s, R`` for every snapshot and window cell."""
    w = setup.window
    x = setup.grid.centers[w]
    blocks = []
    for st in traj.snapshots:
        if sc.kind == "radial":
            r, s, R = radial_curvature(st, setup.grid)
        else:
            cf = curvature_field(st, setup.grid)
            r, s, R = cf.r, cf.s, cf.R
        blocks.append(np.column_stack([np.full(x.size, st.t), x, np.exp(st.phi[w]),
                                       st.p[w], st.q[w], r[w], s[w], R[w]]))
    return np.vstack(blocks) if blocks else np.empty((0, 8))


def write_csv(path: Path, header: str, rows: np.ndarray):
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, rows, fmt=FMT, delimiter=",")


def _report(sc: Scenario, setup: Setup, traj: FlowTrajectory) -> dict:
    sig = traj.signal
    if sc.kind == "radial":
        rep = {"predicted_tmax": None, "detected_t": sig.t, "locus_x": sig.x,
               "growth_exponent": None, "foot_x0": None, "heuristic": True,
               "signal_kind": sig.kind}
    else:
        rep = blowup_report(setup.init, traj).to_dict()
    rep["signal_reason"] = sig.reason
    rep["signal_x"] = sig.x
    return rep


def run_scenario(sc: Scenario, write: bool = True) -> RunResult:
    try:
        setup, traj = simulate(sc)
    except (NumericFault, BlowupRangeError, NonTerminationError) as exc:
        return RunResult(EXIT_NUMERIC, message=str(exc))
    res = RunResult(EXIT_OK, traj, setup)
    out = Path(sc.out_dir)
    if write:
        out.mkdir(parents=True, exist_ok=True)
        if sc.emit_fields:
            path = out / "fields.csv"
            write_csv(path, FIELD_HEADER, field_rows(sc, setup, traj))
            res.files.append(path)
        if sc.emit_volume and sc.kind == "torus":
            vs = volume(traj)
            path = out / "volume.csv"
            write_csv(path, "t,V", np.column_stack([vs.times, vs.volumes]))
            res.files.append(path)
    if traj.signal is not None:
        res.status = EXIT_BLOWUP
        res.report = _report(sc, setup, traj)
        res.message = (f"{traj.signal.kind} signal at t={traj.signal.t:.6g}, "
                       f"x={traj.signal.x:.6g}: {traj.signal.reason}")
        if write and sc.emit_blowup_report:
            path = out / "blowup_report.json"
            path.write_text(json.dumps(res.report, sort_keys=True, indent=2) + "\n")
            res.files.append(path)
    return res


# sweeps -------------------------------------------------------------------

SUMMARY_HEADER = "value,detected_t,gamma,max_abs_R,volume_slope,error"


def summarize(sc: Scenario, res: RunResult) -> dict:
    traj, setup = res.trajectory, res.setup
    row = {"detected_t": None, "gamma": None, "max_abs_R": None, "volume_slope": None,
           "error": ""}
    if traj is None:
        row["error"] = res.message or "failed"
        return row
    if traj.signal is not None:
        row["detected_t"] = traj.signal.t
    grid = setup.grid
    w = np.zeros(grid.n, bool)
    w[setup.window] = True
    if sc.kind == "line":
        w &= grid.interior_mask(0.8)
    sup_R = []
    for st in traj.snapshots:
        R = radial_curvature(st, grid)[2] if sc.kind == "radial" else curvature_field(st, grid).R
        sup_R.append(float(np.abs(R[w]).max()))
    sup_R = np.array(sup_R)
    row["max_abs_R"] = float(sup_R.max())
    t = traj.times
    if traj.signal is None:
        sel = t >= 0.1 * sc.solver.t_end
        try:
            row["gamma"] = fit_decay_series(t[sel], sup_R[sel]).gamma
        except HGFError:
            pass
    if sc.kind == "torus" and len(t) >= 2:
        vs = volume(traj)
        row["volume_slope"] = float(np.polyfit(vs.times, vs.volumes, 1)[0])
    return row


def _sweep_one(args):
    sc, key, value = args
    try:
        child = with_override(sc, key, value)
        res = run_scenario(child, write=False)
        return value, summarize(child, res)
    except Exception as exc:  # a failing child is recorded, the sweep goes on
        return value, {"detected_t": None, "gamma": None, "max_abs_R": None,
                       "volume_slope": None, "error": f"{type(exc).__name__}: {exc}"}


def _sort_key(value: str):
    try:
        return (0, float(value), value)
    except ValueError:
        return (1, 0.0, value)


def sweep(sc: Scenario, key: str, values, jobs: int = None):
    """Run the scenario once per value of ``key``; rows come back sorted by value."""
    if key not in SWEEPABLE:
        raise ConfigurationError(
            f"{key!r} is not sweepable; choose from {', '.join(sorted(SWEEPABLE))}")
    values = [str(v).strip() for v in values if str(v).strip()]
    if not values:
        return []
    tasks = [(sc, key, v) for v in values]
    if jobs == 1 or len(tasks) == 1:
        results = [_sweep_one(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    return sorted(results, key=lambda vr: _sort_key(vr[0]))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return FMT % v
    return str(v).replace(",", ";").replace("\n", " ")


def write_summary(path: Path, results):
    with open(path, "w", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for value, row in results:
            cols = [value] + [_fmt(row[k]) for k in SUMMARY_HEADER.split(",")[1:]]
            fh.write(",".join(cols) + "\n")


# entry point ----------------------------------------------------------------

def _load(path: str) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgf", description="Hyperbolic geometric flow on surfaces")
    ap.add_argument("-q", "--quiet", action="store_true", help="only print warnings and errors")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one scenario and write CSV outputs")
    p.add_argument("config")
    p = sub.add_parser("sweep", help="repeat a scenario over values of one parameter")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=sorted(SWEEPABLE))
    p.add_argument("--values", required=True, help="comma-separated list")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
    p = sub.add_parser("predict", help="print the predicted blowup time")
    p.add_argument("config")
    sub.add_parser("presets", help="list named initial-data presets")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "presets":
            for name in sorted(PRESETS):
                print(f"{name:16s} {PRESETS[name]['doc']}")
            return EXIT_OK
        sc = _load(args.config)
        if args.command == "predict":
            if sc.kind == "radial":
                raise ConfigurationError("blowup prediction covers line and torus flows only")
            pred = predict_tmax(prepare(sc).init)
            print("inf" if math.isinf(pred.tmax) else repr(pred.tmax))
            return EXIT_OK
        if args.command == "sweep":
            results = sweep(sc, args.param, args.values.split(","), args.jobs)
            out = Path(sc.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"sweep_{args.param}.csv"
            write_summary(path, results)
            failed = sum(1 for _, row in results if row["error"])
            log.info("wrote %s (%d runs, %d failed)", path, len(results), failed)
            return EXIT_OK
        res = run_scenario(sc)
        for f in res.files:
            log.info("wrote %s", f)
        if res.status == EXIT_NUMERIC:
            print(f"numeric fault: {res.message}", file=sys.stderr)
        elif res.status == EXIT_BLOWUP:
            print(f"blowup detected: {res.message}", file=sys.stderr)
        return res.status
    except (ConfigurationError, ExpressionError, InvalidMetricError, SamplingError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFault, BlowupRangeError, NonTerminationError) as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
