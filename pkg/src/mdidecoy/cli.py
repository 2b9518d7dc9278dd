"""Command-line entry point.

    mdidecoy simulate   observed counts and yield matrices at one loss
    mdidecoy bound      every bound from a counts CSV (or gains JSON)
    mdidecoy sweep      bounds and key rates over the loss grid
    mdidecoy optimize   best signal intensity per loss and method
    mdidecoy validate   bounds vs truth on the grid, plus solver vs oracle

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import keyrate as kr
from . import oracle
from .channel import asymptotic_reference, simulate_observed
from .config import RunConfig
from .errors import ConfigError, DecoyError
from .statistics import BASES, STATES, ObservedStatistics, read_counts_csv, write_counts_csv

log = logging.getLogger("mdidecoy")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_VALIDATION = 0, 2, 3, 4
OPTIMIZE_COLUMNS = ("loss_db", "method", "mu2_opt", "R_opt", "secure")


def load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    over = dict(method=args.method, k_max=args.kmax, out=args.out)
    if args.mu1 is not None:
        over.update(mu1=args.mu1, nu1=args.mu1)
    if args.mu2 is not None:
        over.update(mu2=args.mu2, nu2=args.mu2)
    if args.loss_db:
        over.update(loss_points=tuple(args.loss_db), point_loss_db=args.loss_db[0])
    for name in ("n_sent", "seed", "oracle_instances"):
        over[name] = getattr(args, name, None)
    return cfg.with_overrides(**over)


def _single_loss(args, cfg: RunConfig) -> float:
    if args.loss_db and len(args.loss_db) > 1:
        raise ConfigError(f"{args.command} takes a single --loss-db value")
    return cfg.point_loss_db


def _outdir(cfg: RunConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _f(v) -> str:
    return repr(float(v))


# simulate -----------------------------------------------------------------

def cmd_simulate(args, cfg: RunConfig) -> int:
    loss = _single_loss(args, cfg)
    alice, bob = cfg.sources()
    out = _outdir(cfg)
    rows, gains = [], {}
    for basis in BASES:
        obs, ym = simulate_observed(cfg.channel(loss, basis), alice, bob)
        gains[basis] = obs.to_dict()
        ym.to_csv(out / f"yields_{basis}.csv")
        for i, a in enumerate(STATES):
            for j, b in enumerate(STATES):
                success = int(round(cfg.n_sent * obs.S[i, j]))
                error = min(int(round(cfg.n_sent * obs.T[i, j])), success)
                rows.append((a, b, basis, cfg.n_sent, success, error))
    write_counts_csv(out / "counts.csv", rows)
    (out / "gains.json").write_text(json.dumps({"loss_db": loss, **gains}, indent=2) + "\n")
    print(f"wrote {out / 'counts.csv'}, {out / 'gains.json'}, yields_Z.csv and yields_X.csv at {loss} dB")
    return EXIT_OK


# bound --------------------------------------------------------------------

def read_observed(path: str | Path) -> dict[str, ObservedStatistics]:
    """Counts CSV, or the gains JSON written by ``simulate`` (lossless)."""
    path = Path(path)
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
            return {b: ObservedStatistics.from_dict(data[b]) for b in BASES if b in data}
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DecoyError(f"malformed gains file {path}: {exc}") from None
    return read_counts_csv(path)


def _e11_or_none(b: kr.BasisBounds, method: str, alice, bob) -> float | None:
    """The e11 bound paired with ``method``, or None when its s11 bound is not positive."""
    return b.e11_for(method, alice, bob) if b.s11_for(method) > 0 else None


def bound_report(observed: dict[str, ObservedStatistics], cfg: RunConfig, truth_loss: float | None) -> dict:
    alice, bob = cfg.sources()
    report: dict = {"bases": {}}
    bb = {}
    for basis, obs in observed.items():
        b = bb[basis] = kr.basis_bounds(obs, alice, bob)
        entry = {
            "s11": {k: v.value for k, v in b.analytic.items()} | {"exact": b.s11_exact},
            "s11_raw": {k: v.raw for k, v in b.analytic.items()} | {"exact": b.solution.objective_bound},
            "e11_simple": _e11_or_none(b, "123", alice, bob),
            "e11_exact": _e11_or_none(b, "exact", alice, bob),
            "exact_solution": b.solution.to_dict() | {"saturated": len(b.solution.saturated),
                                                     "excluded": len(b.solution.excluded)},
        }
        if truth_loss is not None:
            _, ym = simulate_observed(cfg.channel(truth_loss, basis), alice, bob)
            s_true, e_true = asymptotic_reference(ym)
            entry["truth"] = {"s11": s_true, "e11": e_true}
        report["bases"][basis] = entry
    if "Z" in bb and "X" in bb:
        pr = kr.PointResult(cfg.channel(), alice, bob, bb["Z"], bb["X"], math.nan, math.nan, cfg.f_ec)
        report["R"] = {m: pr.rate(m) for m in kr.METHODS if m != "asymptotic"}
    return report


def _bound_table(report: dict) -> str:
    lines = []
    for basis, e in report["bases"].items():
        lines.append(f"[{basis} basis]")
        for k, v in e["s11"].items():
            lines.append(f"  s11_{k:<8}{v:.10e}")
        if "truth" in e:
            lines.append(f"  s11_true    {e['truth']['s11']:.10e}")
        for k in ("e11_simple", "e11_exact"):
            v = e[k]
            lines.append(f"  {k:<12}{'undefined' if v is None else f'{v:.10e}'}")
        if "truth" in e:
            lines.append(f"  e11_true    {e['truth']['e11']:.10e}")
    for k, v in report.get("R", {}).items():
        lines.append(f"R_{k:<10}{v:.10e}")
    return "\n".join(lines)


def cmd_bound(args, cfg: RunConfig) -> int:
    loss = _single_loss(args, cfg)
    observed = read_observed(args.input)
    report = bound_report(observed, cfg, loss if args.truth else None)
    out = _outdir(cfg)
    (out / "bounds.json").write_text(json.dumps(report, indent=2) + "\n")
    print(_bound_table(report))
    return EXIT_OK


# sweep --------------------------------------------------------------------

def cmd_sweep(args, cfg: RunConfig) -> int:
    alice, bob = cfg.sources()
    rows = kr.sweep_loss(cfg.losses(), alice, bob, cfg.method, cfg.channel(0.0), cfg.f_ec, jobs=args.jobs)
    out = _outdir(cfg)
    kr.write_sweep_csv(rows, out / "sweep.csv")
    failed = sum(r.error is not None for r in rows)
    reach = kr.secure_loss(rows, cfg.method)
    print(f"wrote {out / 'sweep.csv'}: {len(rows)} rows, {failed} failed, "
          f"positive {cfg.method} rate up to {reach} dB")
    if args.plot:
        from .plotting import plot_sweep

        for p in plot_sweep(rows, out):
            print(f"wrote {p}")
    return EXIT_OK


# optimize -----------------------------------------------------------------

def _optimize_point(loss, cfg: RunConfig):
    builder = partial(kr.symmetric_poisson, k_max=cfg.k_max)
    return kr.rate_curves(loss, cfg.mu1, cfg.mu2_grid(), builder, cfg.channel(0.0), cfg.f_ec)


def cmd_optimize(args, cfg: RunConfig) -> int:
    losses = cfg.losses()
    fn = partial(_optimize_point, cfg=cfg)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            curves = list(pool.map(fn, losses))
    else:
        curves = [fn(L) for L in losses]
    results: dict[str, list] = {m: [] for m in kr.METHODS}
    out = _outdir(cfg)
    with open(out / "optimize.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OPTIMIZE_COLUMNS)
        for loss, curve in zip(losses, curves):
            for m in kr.METHODS:
                try:
                    mu2, r = kr.argmax_curve([(mu, rates[m]) for mu, rates in curve])
                except DecoyError:
                    mu2, r = math.nan, math.nan
                results[m].append((loss, mu2, r))
                w.writerow((_f(loss), m, _f(mu2), _f(r), "true" if r > 0 else "false"))
    print(f"wrote {out / 'optimize.csv'}: {len(losses)} losses x {len(kr.METHODS)} methods")
    if args.plot:
        from .plotting import plot_optimize

        for p in plot_optimize(results, out):
            print(f"wrote {p}")
    return EXIT_OK


# validate -----------------------------------------------------------------

def validity_checks(cfg: RunConfig, slack: float = 1e-12) -> list[oracle.BoundCheck]:
    alice, bob = cfg.sources()
    checks = []
    for loss in cfg.losses():
        pr = kr.evaluate_point(cfg.channel(loss), alice, bob, cfg.f_ec)
        lower = {f"s11_{m}@{loss}dB": pr.z.s11_for(m) for m in kr.METHODS if m != "asymptotic"}
        upper = {}
        for m, name in (("123", "e11_simple"), ("exact", "e11_exact")):
            if pr.x.s11_for(m) > 0:
                upper[f"{name}@{loss}dB"] = pr.x.e11_for(m, alice, bob)
        checks += oracle.validate_bounds(lower, upper, (pr.s11_true, pr.e11_true), slack).checks
    return checks


def input_checks(path, cfg: RunConfig, loss: float, slack: float = 1e-12) -> list[oracle.BoundCheck]:
    """Bounds from a measured/simulated file against the truth of the configured channel."""
    report = bound_report(read_observed(path), cfg, loss)
    checks = []
    for basis, e in report["bases"].items():
        lower = {f"input_{basis}_s11_{k}": v for k, v in e["s11"].items()}
        upper = {f"input_{basis}_{k}": e[k] for k in ("e11_simple", "e11_exact") if e[k] is not None}
        truth = (e["truth"]["s11"], e["truth"]["e11"])
        checks += oracle.validate_bounds(lower, upper, truth, slack).checks
    return checks


def cmd_validate(args, cfg: RunConfig) -> int:
    checks = validity_checks(cfg)
    if args.input:
        checks += input_checks(args.input, cfg, _single_loss(args, cfg))
    checks += oracle.equivalence_checks(cfg.oracle_instances, cfg.seed)
    report = oracle.ValidationReport(tuple(checks))
    out = _outdir(cfg)
    (out / "validation.json").write_text(report.to_json() + "\n")
    failed = oracle.ValidationReport(tuple(c for c in checks if not c.ok))
    if args.verbose or failed.checks:
        print((report if args.verbose else failed).to_table())
    print(f"{len(checks) - len(failed.checks)}/{len(checks)} checks passed -> "
          f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


# entry --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags below override it")
    common.add_argument("--loss-db", type=float, nargs="+", help="loss point(s) in dB; replaces the loss grid")
    common.add_argument("--mu1", type=float, help="decoy intensity (both parties)")
    common.add_argument("--mu2", type=float, help="signal intensity (both parties)")
    common.add_argument("--method", choices=kr.METHODS)
    common.add_argument("--kmax", type=int, help="photon-number truncation")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--plot", action="store_true", help="also write SVG figures")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="mdidecoy", description="Decoy-state MDI-QKD parameter estimation.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common], help="simulate observed statistics at one loss")
    s.add_argument("--n-sent", type=int, dest="n_sent", help="pulses per source pair and basis")
    b = sub.add_parser("bound", parents=[common], help="bounds from observed statistics")
    b.add_argument("--input", required=True, help="counts CSV or gains JSON")
    b.add_argument("--truth", action="store_true", help="also report the configured channel's true s11/e11")
    sub.add_parser("sweep", parents=[common], help="bounds and key rates over the loss grid")
    sub.add_parser("optimize", parents=[common], help="signal-intensity search per loss")
    v = sub.add_parser("validate", parents=[common], help="validity and oracle-equivalence checks")
    v.add_argument("--input", help="also validate bounds computed from this file")
    v.add_argument("--instances", type=int, dest="oracle_instances", help="random oracle instances")
    v.add_argument("--seed", type=int)
    return p


COMMANDS = {
    "simulate": cmd_simulate,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DecoyError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
