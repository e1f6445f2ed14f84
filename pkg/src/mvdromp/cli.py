"""Command-line entry point: ``mvdromp {coherence,solve,benchmark,calibrate-beta,export-dictionary}``.

Human-readable output goes to stdout, errors to stderr, machine-readable
results to files. Files are written to a temporary sibling and renamed into
place, and only after the computation succeeds.
"""

import argparse
import json
import logging
import os
import platform
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .dictionary import coherence_pair, export_dictionary_csv
from .errors import MvdrOmpError
from .experiment import (
    METHODS,
    MethodRunner,
    calibrate_beta,
    beta_for_snr,
    default_beta_grid,
    generate_snapshot,
    resolve_method,
    run_monte_carlo,
    trial_rng,
)

log = logging.getLogger("mvdromp")


class CliError(Exception):
    pass


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_writable(path: Path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise CliError(f"output directory {parent} does not exist")
    try:
        fd, probe = tempfile.mkstemp(dir=parent, prefix=".mvdromp-probe-")
    except OSError as exc:
        raise CliError(f"cannot write to {parent}: {exc.strerror}") from None
    os.close(fd)
    os.unlink(probe)


def _sidecar(out: Path, suffix: str) -> Path:
    return out.with_name(f"{out.stem}{suffix}")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "workers", None) is not None:
        changes["workers"] = args.workers
    if changes.get("trials", 1) < 1 or changes.get("workers", 1) < 1:
        raise CliError("--trials and --workers must be positive")
    return cfg.replace(**changes) if changes else cfg


def cmd_coherence(args) -> int:
    cfg = _load(args)
    d = cfg.dictionary()
    mu, (n, m) = coherence_pair(d)
    if d.grid is not None:
        pair = f"{d.grid[n]:g} deg and {d.grid[m]:g} deg (atoms {n}, {m})"
    else:
        pair = f"atoms {n} and {m}"
    print(f"M = {d.element_count}")
    print(f"N = {d.n_atoms}")
    print(f"mutual coherence = {mu:.6f}")
    print(f"worst pair: {pair}")
    return 0


def cmd_solve(args) -> int:
    cfg = _load(args)
    method = resolve_method(args.method)
    snr = args.snr if args.snr is not None else cfg.snr_list[0]
    if args.out:
        _check_writable(Path(args.out))
    scenario = cfg.scenario.with_snr(snr)
    x = generate_snapshot(scenario, trial_rng(cfg.seed, 0))
    beta = beta_for_snr(cfg.beta_schedule(), snr)
    runner = MethodRunner(scenario.dictionary(), scenario.n_sources, cfg.alpha, scenario.true_support())
    res = runner.run(method, x, beta)
    angles = " ".join(f"{a:.1f}" for a in res.angles_deg)
    print(f"method: {method}")
    print(f"snr_db: {snr:g}  seed: {cfg.seed}  beta: {beta:g}")
    print(f"support: {' '.join(map(str, res.support))}")
    print(f"angles_deg: {angles}")
    print(f"residual_norm: {res.residual_norm:.6e}")
    if args.out:
        header = "method,snr_db,seed,beta,angles_deg,residual_norm\n"
        row = f"{method},{snr!r},{cfg.seed},{beta!r},{' '.join(repr(a) for a in res.angles_deg)},{res.residual_norm!r}\n"
        _atomic_write(Path(args.out), header + row)
    return 0


def _manifest(cfg: RunConfig, command: str, outputs, extra) -> str:
    data = {
        "command": command,
        "tool_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "master_seed": cfg.seed,
        "config": cfg.to_ini(),
        "outputs": [str(p) for p in outputs],
        **extra,
    }
    return json.dumps(data, indent=2) + "\n"


def cmd_benchmark(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    _check_writable(out)
    schedule = cfg.beta_schedule()
    t0 = time.perf_counter()
    report = run_monte_carlo(
        cfg.scenario, cfg.snr_list, cfg.methods, cfg.trials, schedule, cfg.seed,
        alpha=cfg.alpha, workers=cfg.workers,
    )
    wall = time.perf_counter() - t0

    files = {out: report.to_csv()}
    if args.plot_data:
        for s, doa in enumerate(report.source_doas_deg):
            files[_sidecar(out, f"_source{s + 1}_{doa:g}deg.csv")] = report.plot_data_csv(s)
    manifest = _sidecar(out, ".manifest.json")
    for path, text in files.items():
        _atomic_write(path, text)
    extra = {
        "started_at": report.started_at,
        "finished_at": report.finished_at,
        "wall_time_s": wall,
        "betas": dict(zip(map(repr, report.snr_db), report.betas)),
    }
    _atomic_write(manifest, _manifest(cfg, "benchmark", list(files), extra))
    print(report.summary())
    print(f"wrote {', '.join(str(p) for p in [*files, manifest])}")
    return 0


def cmd_calibrate_beta(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    _check_writable(out)
    if args.grid:
        grid = [float(v) for v in args.grid.split(",") if v.strip()]
    else:
        grid = default_beta_grid(args.grid_points)
    snrs = [s for s in cfg.snr_list if np.isfinite(s)]
    if not snrs:
        raise CliError("calibration needs at least one finite SNR")
    result = calibrate_beta(
        cfg.scenario, snrs, grid, cfg.trials, cfg.seed, alpha=cfg.alpha, workers=cfg.workers
    )
    _atomic_write(out, result.schedule.to_csv())
    print(f"summed MAD (deg) of sbwmvdr_omp, {cfg.trials} trials, seed {cfg.seed}")
    print(f"{'snr_db':>8}  " + "  ".join(f"{b:>8.4g}" for b in result.beta_grid) + "    chosen")
    for i, (snr, beta) in enumerate(result.schedule.breakpoints):
        row = "  ".join(f"{v:>8.4f}" for v in result.mad_sum[i])
        print(f"{snr:>8g}  {row}    {beta:g}")
    print(f"wrote {out}")
    return 0


def cmd_export_dictionary(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    _check_writable(out)
    d = cfg.dictionary()
    fd, tmp = tempfile.mkstemp(dir=out.resolve().parent, prefix=f".{out.name}.", suffix=".tmp")
    os.close(fd)
    try:
        export_dictionary_csv(d, tmp)
        os.replace(tmp, out)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    print(f"wrote {d.element_count}x{d.n_atoms} dictionary to {out}")
    return 0


def _snr(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvdromp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, help="INI run configuration")
        return sp

    common(sub.add_parser("coherence", help="dictionary size and mutual coherence")).set_defaults(
        func=cmd_coherence
    )

    sp = common(sub.add_parser("solve", help="estimate DOAs from one snapshot"))
    sp.add_argument("--method", default="sbwmvdr_omp",
                    help=f"one of {', '.join(METHODS)} (or an alias such as omp)")
    sp.add_argument("--snr", type=_snr, help="SNR in dB; 'inf' for noiseless")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="optional CSV file for the result row")
    sp.set_defaults(func=cmd_solve)

    sp = common(sub.add_parser("benchmark", help="Monte-Carlo MAD versus SNR"))
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", required=True, help="MAD CSV path; manifest goes next to it")
    sp.add_argument("--plot-data", action="store_true", help="also write one CSV per source")
    sp.set_defaults(func=cmd_benchmark)

    sp = common(sub.add_parser("calibrate-beta", help="grid-search beta per SNR"))
    sp.add_argument("--grid", help="comma-separated beta values")
    sp.add_argument("--grid-points", type=int, default=9,
                    help="log-spaced points in [0.005, 0.5] when --grid is absent")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", required=True, help="schedule CSV path")
    sp.set_defaults(func=cmd_calibrate_beta)

    sp = common(sub.add_parser("export-dictionary", help="write the dictionary as CSV"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_export_dictionary)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (MvdrOmpError, CliError) as exc:
        print(f"mvdromp {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
