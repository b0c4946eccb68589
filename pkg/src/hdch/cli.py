"""Command line entry point ``hdch``.

Exit codes: 0 success, 1 a verified property failed, 2 usage or configuration
error, 3 solver failure.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as config_mod
from .diagnostics import read_diag_csv, write_diag_csv
from .errors import ConfigParse, HDCHError, SolverFailure
from .experiments import continuous_dependence_experiment
from .io import read_snapshot, write_snapshot
from .stepper import make_scenario, prepare_initial_data, simulate, smooth_random_field
from .verify import SUITES, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


def _fail(kind, message):
    print(f"hdch: error [{kind}]: {message}", file=sys.stderr)


def load_config(path):
    cfg = config_mod.load(path)
    env = os.environ.get("HDCH_OUT")
    if env:
        cfg = replace(cfg, output=replace(cfg.output, dir=env))
    return cfg


def initial_field(cfg, grid, spec):
    sc = cfg.scenario
    phi0 = make_scenario(
        sc.name, grid, mean=sc.mean, amplitude=sc.amplitude, seed=sc.seed,
        spec=spec, radius=sc.radius, width=sc.width,
    )
    if sc.prepare_k is not None:
        phi0 = prepare_initial_data(grid, phi0, sc.prepare_k, spec).phi0
    return phi0


def execute_run(cfg, outdir=None):
    """Run one configuration and write its outputs; returns the record list."""
    out = Path(outdir or cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    grid, spec, visc, step_cfg = cfg.make_grid(), cfg.make_potential(), cfg.make_viscosity(), cfg.make_step()
    (out / "run.json").write_text(cfg.to_json())
    phi0 = initial_field(cfg, grid, spec)

    def on_record(n, state, rec):
        if cfg.output.snapshots:
            write_snapshot(out / f"phi_{n:06d}.hdch", grid, state.phi)

    records, _, _ = simulate(
        grid, phi0, spec, visc, step_cfg, cfg.time.t_end,
        record_every=cfg.time.record_every, on_record=on_record,
    )
    write_diag_csv(out / "diag.csv", records)
    return records


def cmd_run(args):
    cfg = load_config(args.config)
    records = execute_run(cfg)
    print(f"{len(records)} records written to {Path(cfg.output.dir) / 'diag.csv'}")
    return EXIT_OK


def cmd_verify(args):
    checks, seconds = run_suite(args.suite)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    failed = [c.name for c in checks if not c.passed]
    print(f"{args.suite}: {len(checks) - len(failed)}/{len(checks)} passed in {seconds:.1f} s")
    if failed:
        print("failing: " + ", ".join(failed), file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigParse(f"{what} must be a comma-separated list of numbers") from exc


def cmd_compare(args):
    cfg = load_config(args.config)
    amps = _floats(args.amps, "--amps")
    if not amps:
        raise ConfigParse("--amps needs at least one amplitude")
    grid, spec, visc = cfg.make_grid(), cfg.make_potential(), cfg.make_viscosity()
    phi0 = initial_field(cfg, grid, spec)
    # the perturbation is a second seeded field, so one config names one experiment
    pert = smooth_random_field(grid, (cfg.scenario.seed + 1) % 2**64)
    rows = continuous_dependence_experiment(
        grid, phi0, pert, amps, cfg.time.t_end, spec, visc, cfg.make_step(), jobs=args.jobs
    )
    out = Path(cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "dependence.csv", "w", newline="") as fh:
        fh.write("a,R_v0dual,R_l2\n")
        for r in rows:
            fh.write(f"{r.a:.17g},{r.R_v0dual:.17g},{r.R_l2:.17g}\n")
    for r in rows:
        print(f"a={r.a:.3g}  R_v0dual={r.R_v0dual:.6g}  R_l2={r.R_l2:.6g}")
    return EXIT_OK


def _sweep_one(task):
    cfg, outdir = task
    execute_run(cfg, outdir)
    return outdir


def cmd_sweep(args):
    cfg = load_config(args.config)
    if "=" not in args.param:
        raise ConfigParse("--param must look like key=v1,v2,...")
    key, values = args.param.split("=", 1)
    values = [v.strip() for v in values.split(",") if v.strip()]
    if not values:
        raise ConfigParse("--param lists no values")
    base = Path(cfg.output.dir)
    tasks = []
    for v in values:
        sub = base / f"{key}={v}"
        run_cfg = cfg.with_value(key, v)
        tasks.append((replace(run_cfg, output=replace(run_cfg.output, dir=str(sub))), str(sub)))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            done = list(pool.map(_sweep_one, tasks))
    else:
        done = [_sweep_one(t) for t in tasks]
    for d in done:
        print(d)
    return EXIT_OK


# -- plotting ---------------------------------------------------------------

def field_to_ppm(path, phi):
    """Binary PPM with x to the right and y upwards; -1 blue, 0 white, 1 red."""
    t = (np.clip(phi, -1.0, 1.0) + 1.0) / 2.0
    low = t < 0.5
    r = np.where(low, 2 * t, 1.0)
    g = np.where(low, 2 * t, 2 * (1 - t))
    b = np.where(low, 1.0, 2 * (1 - t))
    rgb = np.stack([r, g, b], axis=-1)
    img = np.round(255 * rgb).astype(np.uint8).transpose(1, 0, 2)[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(img.tobytes())


def diag_to_svg(path, records):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "hdch"
    t = np.array([r.t for r in records])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    ax1.plot(t, [r.E for r in records], color="k")
    ax1.set_ylabel("E")
    ax2.plot(t, [r.H for r in records], color="tab:red")
    ax2.set_ylabel("H")
    ax2.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_plot(args):
    src = Path(args.file)
    if not src.exists():
        raise ConfigParse(f"{src} does not exist")
    out = Path(args.output) if args.output else src.parent
    out.mkdir(parents=True, exist_ok=True)
    try:
        if src.suffix == ".csv":
            records = read_diag_csv(src)
        else:
            _, phi = read_snapshot(src)
    except (ValueError, StopIteration) as exc:
        raise ConfigParse(f"cannot read {src}: {exc}") from exc
    if src.suffix == ".csv":
        target = out / (src.stem + ".svg")
        diag_to_svg(target, records)
    else:
        target = out / (src.stem + ".ppm")
        field_to_ppm(target, phi)
    print(target)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="hdch", description="Hele-Shaw Cahn-Hilliard solver and checks")
    parser.add_argument("--jobs", type=int, default=1, help="parallel runs for compare and sweep")
    # --jobs is also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run one configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", parents=[common], help="continuous-dependence ratios")
    p.add_argument("config")
    p.add_argument("--amps", required=True, help="comma-separated amplitudes")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", parents=[common], help="one run per parameter value")
    p.add_argument("config")
    p.add_argument("--param", required=True, help="key=v1,v2,...")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", parents=[common], help="SVG of a diag.csv or PPM of a snapshot")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="output directory")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except SolverFailure as exc:
        _fail(type(exc).__name__, exc)
        return EXIT_SOLVER
    except (HDCHError, OSError) as exc:
        _fail(type(exc).__name__, exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
