"""Command-line front end: simulate benchmark cases, detect causality,
sweep convergence curves.

Exit codes: 0 success, 2 configuration/usage error, 3 simulation
divergence, 4 statistical degeneracy. Every command writes a manifest
recording the exact invocation, so runs can be reproduced bit-for-bit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import TimeSeries, Dataset, dataset_meta, load_csv, save_csv
from .detector import (
    ConvergenceThresholds,
    DetectionConfig,
    curves_to_csv,
    run_pairwise,
    sweep_to_csv,
    verdicts_to_json,
)
from .errors import BpmapError, ConfigError, DegeneracyError, DivergenceError
from .systems import simulate, spec_from_json, staircase_theta
from .errors import SchemaError

EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_DEGENERACY = 4


def _manifest(command, args, output_dir):
    return {
        "command": command,
        "argv": list(getattr(args, "_argv", [])),
        "config_path": getattr(args, "config", None),
        "output_dir": str(output_dir),
        "seed": getattr(args, "seed", None),
        "tool_version": __version__,
    }


def _write_manifest(manifest, directory, name="manifest.json"):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def _add_simulate_parser(sub):
    p = sub.add_parser("simulate", help="generate a benchmark trajectory CSV")
    p.add_argument("--config", help="JSON file with SystemSpec keys")
    p.add_argument("--case", type=int, choices=(1, 2, 3))
    for i in range(1, 7):
        p.add_argument(f"--beta{i}", type=float, dest=f"beta{i}")
    p.add_argument("--x0", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--theta0", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("-o", "--output", required=True, help="output CSV path")
    return p


def _spec_payload(args):
    payload = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            payload.update(json.load(fh))
    overrides = {
        key: getattr(args, key)
        for key in ("case", "beta1", "beta2", "beta3", "beta4", "beta5",
                    "beta6", "x0", "y0", "theta0", "alpha", "steps", "burn_in")
        if getattr(args, key, None) is not None
    }
    payload.update(overrides)
    if "case" not in payload:
        raise ConfigError("a benchmark case is required (--case or config file)")
    return payload


def cmd_simulate(args):
    spec = spec_from_json(_spec_payload(args))
    dataset = simulate(spec)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = dataset.length
    with_t = Dataset(
        [TimeSeries("t", np.arange(1.0, n + 1.0))]
        + [dataset[name] for name in dataset.names()]
    )
    save_csv(with_t, out)
    manifest = _manifest("simulate", args, out.parent)
    manifest["spec"] = json.loads(spec_to_json_str(spec))
    path = _write_manifest(manifest, out.parent, out.stem + ".manifest.json")
    print(json.dumps(manifest))
    return 0


def spec_to_json_str(spec):
    from .systems import spec_to_json

    return spec_to_json(spec)


def _add_detection_flags(p):
    p.add_argument("data", help="input CSV with header row")
    p.add_argument("--x", required=True, help="first variable column")
    p.add_argument("--y", required=True, help="second variable column")
    p.add_argument("--theta", help="phase/drive column (required for bpm)")
    p.add_argument(
        "--theta-staircase", type=int, metavar="SEGLEN",
        help="build a staircase theta (delta=1) over segments of SEGLEN rows",
    )
    p.add_argument("--trial-column", help="integer trial/segment id column")
    p.add_argument("--method", choices=("ccm", "bpm", "both"), default="both")
    p.add_argument("--E", type=int, help="embedding dimension (per-method default)")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--L-grid", dest="L_grid",
                   help="comma-separated library sizes (default: log-spaced)")
    p.add_argument("--replicates", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclusion-radius", type=int, default=0)
    p.add_argument("--respect-trials", action="store_true")
    p.add_argument("--theta-conditioning", choices=("lags", "scalar"),
                   default="lags")
    p.add_argument("--min-final-skill", type=float, default=0.5)
    p.add_argument("--max-slope", type=float, default=5e-5)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--outdir", required=True)


def _load_detection_dataset(args):
    dataset = load_csv(args.data, trial_column=args.trial_column)
    for col in (args.x, args.y):
        if col not in dataset:
            raise SchemaError(f"{args.data}: missing column {col!r}")
    theta_name = None
    if args.theta_staircase is not None:
        stair = staircase_theta(dataset.length, args.theta_staircase, delta=1.0)
        series = [
            TimeSeries(s.name, s.values, stair.trial_ids)
            for s in (dataset[name] for name in dataset.names())
        ]
        dataset = Dataset(series + [stair])
        theta_name = "theta"
    elif args.theta is not None:
        if args.theta not in dataset:
            raise SchemaError(f"{args.data}: missing column {args.theta!r}")
        theta_name = args.theta
    if args.method in ("bpm", "both") and theta_name is None:
        raise ConfigError(
            "bpm requires --theta COLUMN or --theta-staircase SEGLEN"
        )
    return dataset, theta_name


def _detection_configs(args):
    grid = None
    if args.L_grid:
        grid = tuple(int(v) for v in args.L_grid.split(","))
    thresholds = ConvergenceThresholds(
        min_final_skill=args.min_final_skill,
        max_slope=args.max_slope,
        window=args.window,
    )
    methods = ("ccm", "bpm") if args.method == "both" else (args.method,)
    return [
        DetectionConfig(
            method=m,
            E=args.E,
            tau=args.tau,
            L_grid=grid,
            replicates=args.replicates,
            seed=args.seed,
            exclusion_radius=args.exclusion_radius,
            respect_trials=args.respect_trials,
            theta_conditioning=args.theta_conditioning,
            jobs=args.jobs,
            convergence=thresholds,
        )
        for m in methods
    ]


def _run_detection(args):
    dataset, theta_name = _load_detection_dataset(args)
    results = []
    for cfg in _detection_configs(args):
        theta = theta_name if cfg.method == "bpm" else theta_name
        results.append((cfg, run_pairwise(dataset, args.x, args.y, theta, cfg)))
    return dataset, results


def cmd_detect(args):
    outdir = Path(args.outdir)
    dataset, results = _run_detection(args)
    outdir.mkdir(parents=True, exist_ok=True)
    curves = [c for _, res in results for c in res.curves]
    curves_to_csv(curves, outdir / "curves.csv")
    verdicts_to_json(
        [(v, cfg) for cfg, res in results for v in res.verdicts],
        outdir / "verdicts.json",
    )
    manifest = _manifest("detect", args, outdir)
    manifest["dataset"] = dataset_meta(dataset)
    _write_manifest(manifest, outdir)
    for _, res in results:
        for v in res.verdicts:
            print(
                f"{v.method} {v.cause}->{v.effect}: converged={v.converged} "
                f"final_skill={v.final_skill:.4f}"
            )
    return 0


def cmd_sweep(args):
    outdir = Path(args.outdir)
    dataset, results = _run_detection(args)
    outdir.mkdir(parents=True, exist_ok=True)
    curves = [c for _, res in results for c in res.curves]
    sweep_to_csv(curves, outdir / "sweep.csv")
    manifest = _manifest("sweep", args, outdir)
    manifest["dataset"] = dataset_meta(dataset)
    _write_manifest(manifest, outdir)
    print(f"wrote {outdir / 'sweep.csv'}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bpmap",
        description="Causality detection for non-autonomous systems via "
        "cross mapping and bivariate partial mapping",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate_parser(sub)
    p_detect = sub.add_parser("detect", help="run pairwise causality detection")
    _add_detection_flags(p_detect)
    p_sweep = sub.add_parser("sweep", help="emit the raw per-replicate skill table")
    _add_detection_flags(p_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    args._argv = list(argv)
    handlers = {"simulate": cmd_simulate, "detect": cmd_detect, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except (BpmapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
