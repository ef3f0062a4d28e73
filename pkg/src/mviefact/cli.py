"""Command-line pipeline: instance generation, recovery runs, benchmarks.

Subcommands:
  synth  write a synthetic observation matrix plus ground-truth sidecar
  run    recover signatures from an observation CSV, write a JSON report
  bench  sweep a (N, purity, SNR) grid and write per-trial/aggregate CSVs

Exit codes: 0 success, 1 I/O failure, 2 invalid parameters, 3 numerical
failure.

File formats (owned here):
  matrix CSV   no header, one row per band (M rows), one column per
               pixel, 17 significant digits
  truth JSON   {"A": rows, "S": rows, "params": {N,M,L,r,snr_db,seed}}
  results CSV  N,M,L,r,snr_db,seed,status,phi_deg,K,t_dimred,t_hull,
               t_solve,t_recover,t_total
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import metrics, mvie, recovery, synth
from .errors import MviefactError, NumericalError, ParameterError

__all__ = ["BenchSpec", "main", "cmd_synth", "cmd_run", "cmd_bench"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARAMS = 2
EXIT_NUMERICAL = 3

_RESULT_COLUMNS = ["N", "M", "L", "r", "snr_db", "seed", "status", "phi_deg",
                   "K", "t_dimred", "t_hull", "t_solve", "t_recover",
                   "t_total"]


class StageError(Exception):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class BenchSpec:
    Ns: tuple[int, ...]
    rs: tuple[float, ...]
    snrs: tuple[float, ...]
    trials: int
    base_seed: int
    M: int
    L: int
    config: mvie.FpgmConfig = field(default_factory=mvie.FpgmConfig)
    tau: float = 1e-5
    high_accuracy: bool = True
    omit_timings: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("bench needs trials >= 1")
        if not self.Ns or not self.rs or not self.snrs:
            raise ParameterError("bench grid must be nonempty")
        for n in self.Ns:
            lo = 1.0 / math.sqrt(n)
            for r in self.rs:
                if not (lo < r <= 1.0):
                    raise ParameterError(
                        f"purity r={r} infeasible for N={n} "
                        f"(must be in ({lo:.6f}, 1])")

    @property
    def cells(self):
        for n in self.Ns:
            for r in self.rs:
                for snr in self.snrs:
                    yield n, r, snr


# -- serialization helpers ----------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix_csv(path, x: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in x:
            writer.writerow([_fmt(v) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise OSError(f"empty matrix file: {path}")
    return np.asarray(rows, dtype=float)


def _snr_json(snr_db: float):
    return "inf" if math.isinf(snr_db) else snr_db


def _snr_parse(value) -> float:
    return math.inf if value in ("inf", "Infinity", None) else float(value)


def write_truth_json(path, gt: synth.GroundTruth, n: int) -> None:
    payload = {
        "A": [[float(v) for v in row] for row in gt.A],
        "S": [[float(v) for v in row] for row in gt.S],
        "params": {"N": n, "M": gt.A.shape[0], "L": gt.S.shape[1],
                   "r": gt.purity_r, "snr_db": _snr_json(gt.snr_db),
                   "seed": gt.seed},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_truth_json(path) -> tuple[np.ndarray, np.ndarray, dict]:
    with open(path) as fh:
        payload = json.load(fh)
    a = np.asarray(payload["A"], dtype=float)
    s = np.asarray(payload["S"], dtype=float)
    params = dict(payload["params"])
    params["snr_db"] = _snr_parse(params.get("snr_db"))
    return a, s, params


# -- subcommands ---------------------------------------------------------------

def cmd_synth(args) -> int:
    import os
    gt = synth.make_instance(args.M, args.N, args.L, args.purity,
                             args.snr, args.seed,
                             library=_load_library(args.library, args.M))
    os.makedirs(args.out, exist_ok=True)
    write_matrix_csv(os.path.join(args.out, "X.csv"), gt.X)
    write_truth_json(os.path.join(args.out, "truth.json"), gt, args.N)
    print(f"wrote {args.out}/X.csv ({args.M}x{args.L}) and "
          f"{args.out}/truth.json (N={args.N}, r={args.purity}, "
          f"snr={_snr_json(args.snr)}, seed={args.seed})")
    return EXIT_OK


def _load_library(path, m: int):
    if path is None:
        return None
    _, lib = synth.load_signature_library(path)
    if lib.shape[0] != m:
        raise ParameterError(
            f"library has {lib.shape[0]} bands but --M is {m}")
    return lib


def _run_report(x: np.ndarray, n: int, cfg, seed: int, tau: float,
                high_accuracy: bool, want_shat: bool) -> recovery.RecoveryReport:
    try:
        return recovery.run_pipeline(
            x, n, cfg=cfg, seed=seed, tau=tau,
            high_accuracy=high_accuracy, want_abundances=want_shat)
    except MviefactError as exc:
        stage = {"dimred": ("RankDeficientData", "BadDims"),
                 "hull": ("DegenerateInput", "TooFewPoints"),
                 "solve": ("EmptyInterior", "Divergence", "NotFinite"),
                 "recover": ("NoContacts", "TooFewContacts", "WrongCount",
                             "RankDeficientA")}
        name = type(exc).__name__
        for label, names in stage.items():
            if name in names:
                raise StageError(label, exc) from exc
        raise StageError("pipeline", exc) from exc


def cmd_run(args) -> int:
    try:
        x = read_matrix_csv(args.input)
    except OSError as exc:
        raise StageError("io", exc) from exc
    cfg = mvie.load_config(args.config) if args.config else mvie.FpgmConfig()
    report = _run_report(x, args.N, cfg, args.seed, args.tau,
                         not args.fast, args.emit_shat)

    payload = {
        "params": {"N": args.N, "seed": args.seed, "tau": args.tau,
                   "high_accuracy": not args.fast},
        "A_hat": [[float(v) for v in row] for row in report.A_hat],
        "contacts_reduced": [[float(v) for v in row]
                             for row in report.contacts_reduced],
        "contacts_ambient": [[float(v) for v in row]
                             for row in report.contacts_ambient],
        "raw_contact_count": report.raw_contact_count,
        "center_ambient": [float(v) for v in report.center_ambient],
        "K": report.n_facets,
        "affine_residual": report.affine_residual,
        "diagnostics": {
            "iterations": report.solver.iterations,
            "final_objective": report.solver.final_objective,
            "termination": report.solver.termination,
            "restarts": report.solver.restarts,
            "stage_iterations": report.solver.stage_iterations,
        },
        "timings": report.timings,
    }
    if args.truth:
        try:
            a_true, _, _ = read_truth_json(args.truth)
        except OSError as exc:
            raise StageError("io", exc) from exc
        phi, perm = metrics.rms_angle_error(a_true, report.A_hat)
        payload["phi_deg"] = phi
        payload["permutation"] = list(perm)
    if args.emit_shat:
        payload["S_hat"] = [[float(v) for v in row] for row in report.S_hat]

    with open(args.out, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    phi_txt = (f", phi={payload['phi_deg']:.6f} deg"
               if "phi_deg" in payload else "")
    print(f"wrote {args.out} (K={report.n_facets}, "
          f"{report.solver.iterations} iterations{phi_txt})")
    return EXIT_OK


def run_bench(spec: BenchSpec) -> tuple[list[metrics.TrialResult], list[dict]]:
    """Execute every (cell, trial) pair; failures become status rows."""
    results: list[metrics.TrialResult] = []
    for n, r, snr in spec.cells:
        for trial in range(spec.trials):
            seed = spec.base_seed + trial
            res = metrics.TrialResult(seed=seed, N=n, M=spec.M, L=spec.L,
                                      r=r, snr_db=snr)
            t0 = time.perf_counter()
            try:
                gt = synth.make_instance(spec.M, n, spec.L, r, snr, seed)
                report = recovery.run_pipeline(
                    gt.X, n, cfg=spec.config, seed=seed, tau=spec.tau,
                    high_accuracy=spec.high_accuracy)
                phi, perm = metrics.rms_angle_error(gt.A, report.A_hat)
                res.rms_angle_deg = phi
                res.permutation = perm
                res.K_facets = report.n_facets
                res.runtimes_sec = dict(report.timings)
            except MviefactError as exc:
                res.status = f"error:{type(exc).__name__}"
            res.runtimes_sec["total"] = time.perf_counter() - t0
            results.append(res)

    aggregates = []
    for n, r, snr in spec.cells:
        cell = [t for t in results
                if t.N == n and t.r == r and t.snr_db == snr]
        ok = [t for t in cell if t.status == "ok"]
        phis = np.array([t.rms_angle_deg for t in ok])
        aggregates.append({
            "N": n, "M": spec.M, "L": spec.L, "r": r, "snr_db": snr,
            "trials": len(cell), "n_ok": len(ok),
            "phi_mean_deg": float(phis.mean()) if ok else math.nan,
            "phi_std_deg": (float(phis.std(ddof=1))
                            if len(ok) > 1 else 0.0 if ok else math.nan),
            "K_mean": (float(np.mean([t.K_facets for t in ok]))
                       if ok else math.nan),
            "t_total_mean": float(np.mean([t.runtimes_sec["total"]
                                           for t in cell])),
        })
    return results, aggregates


def write_results_csv(path, results: list[metrics.TrialResult],
                      omit_timings: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_RESULT_COLUMNS)
        for t in results:
            times = ({} if omit_timings else t.runtimes_sec)
            writer.writerow([
                t.N, t.M, t.L, _fmt(t.r),
                "inf" if math.isinf(t.snr_db) else _fmt(t.snr_db),
                t.seed, t.status,
                "nan" if math.isnan(t.rms_angle_deg) else _fmt(t.rms_angle_deg),
                t.K_facets,
                _fmt(times.get("dimred", 0.0)),
                _fmt(times.get("hull", 0.0)),
                _fmt(times.get("solve", 0.0)),
                _fmt(times.get("recover", 0.0)),
                _fmt(times.get("total", 0.0)),
            ])


def write_aggregate_csv(path, aggregates: list[dict],
                        omit_timings: bool = False) -> None:
    cols = ["N", "M", "L", "r", "snr_db", "trials", "n_ok",
            "phi_mean_deg", "phi_std_deg", "K_mean", "t_total_mean"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in aggregates:
            out = []
            for c in cols:
                v = row[c]
                if c == "t_total_mean" and omit_timings:
                    v = 0.0
                if isinstance(v, float):
                    if math.isinf(v):
                        out.append("inf")
                    elif math.isnan(v):
                        out.append("nan")
                    else:
                        out.append(_fmt(v))
                else:
                    out.append(v)
            writer.writerow(out)


def cmd_bench(args) -> int:
    import os
    cfg = mvie.load_config(args.config) if args.config else mvie.FpgmConfig()
    spec = BenchSpec(
        Ns=tuple(args.N), rs=tuple(args.r), snrs=tuple(args.snr),
        trials=args.trials, base_seed=args.seed, M=args.M, L=args.L,
        config=cfg, tau=args.tau, high_accuracy=not args.fast,
        omit_timings=args.omit_timings)
    results, aggregates = run_bench(spec)
    os.makedirs(args.out, exist_ok=True)
    trials_path = os.path.join(args.out, "trials.csv")
    agg_path = os.path.join(args.out, "aggregate.csv")
    write_results_csv(trials_path, results, spec.omit_timings)
    write_aggregate_csv(agg_path, aggregates, spec.omit_timings)
    for row in aggregates:
        print(f"N={row['N']} r={row['r']} snr={_snr_json(row['snr_db'])}: "
              f"phi = {row['phi_mean_deg']:.4f} +- {row['phi_std_deg']:.4f} deg "
              f"({row['n_ok']}/{row['trials']} ok, K~{row['K_mean']:.0f})")
    print(f"wrote {trials_path} and {agg_path}")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _snr_arg(text: str) -> float:
    return math.inf if text.lower() in ("inf", "+inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mviefact",
        description="Blind simplex-factor recovery via the maximum-volume "
                    "inscribed ellipsoid of the data convex hull")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synth", help="generate a synthetic instance")
    ps.add_argument("--N", type=int, required=True)
    ps.add_argument("--M", type=int, required=True)
    ps.add_argument("--L", type=int, required=True)
    ps.add_argument("--purity", type=float, required=True)
    ps.add_argument("--snr", type=_snr_arg, default=math.inf,
                    help="SNR in dB, or 'inf' for noiseless (default)")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--library", default=None,
                    help="optional signature library CSV")
    ps.add_argument("--out", required=True, help="output directory")
    ps.set_defaults(func=cmd_synth)

    pr = sub.add_parser("run", help="recover signatures from X.csv")
    pr.add_argument("--input", required=True, help="observation matrix CSV")
    pr.add_argument("--N", type=int, required=True)
    pr.add_argument("--truth", default=None,
                    help="truth.json for angle-error evaluation")
    pr.add_argument("--config", default=None, help="solver config JSON")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--tau", type=float, default=1e-5,
                    help="relative contact slack tolerance")
    pr.add_argument("--fast", action="store_true",
                    help="single penalty solve instead of the rho ladder")
    pr.add_argument("--emit-shat", action="store_true",
                    help="include recovered abundances in the report")
    pr.add_argument("--out", default="report.json")
    pr.set_defaults(func=cmd_run)

    pb = sub.add_parser("bench", help="run a recovery benchmark grid")
    pb.add_argument("--N", type=int, nargs="+", required=True)
    pb.add_argument("--r", type=float, nargs="+", required=True)
    pb.add_argument("--snr", type=_snr_arg, nargs="+", default=[math.inf])
    pb.add_argument("--trials", type=int, default=20)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--M", type=int, default=50)
    pb.add_argument("--L", type=int, default=1000)
    pb.add_argument("--config", default=None, help="solver config JSON")
    pb.add_argument("--tau", type=float, default=1e-5)
    pb.add_argument("--fast", action="store_true")
    pb.add_argument("--omit-timings", action="store_true",
                    help="write zeros in timing columns so repeated runs "
                         "are byte-identical")
    pb.add_argument("--out", required=True, help="output directory")
    pb.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        if isinstance(exc.cause, ParameterError):
            return EXIT_PARAMS
        if isinstance(exc.cause, (OSError, json.JSONDecodeError)):
            return EXIT_IO
        return EXIT_NUMERICAL
    except ParameterError as exc:
        print(f"error [params]: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except NumericalError as exc:
        print(f"error [numerical]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
