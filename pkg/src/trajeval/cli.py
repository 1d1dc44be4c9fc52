"""Command line front end.

Subcommands:
  ate        absolute trajectory error between two TUM files
  rpe        relative pose error between two TUM files
  associate  print the matched timestamp pairs
  synth      generate a synthetic ground truth (optionally degraded)
  report     batch-evaluate entries from a JSON config

Exit codes: 0 success, 1 usage/config error, 2 file or parse error,
3 association failure (no timestamp overlap / empty delta window),
4 degenerate geometry. The default report output directory can be set
with the TRAJEVAL_OUTPUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .alignment import horn_align
from .association import DEFAULT_MAX_DIFF, associate
from .errors import (
    EXIT_ASSOCIATION,
    EXIT_DEGENERATE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    AssociationError,
    ConfigError,
    DegenerateGeometryError,
    EmptyTrajectoryError,
    EmptyWindowError,
    InsufficientDataError,
    ParseError,
)
from .metrics import DEFAULT_MAX_SAMPLES, DeltaSpec, ate, coverage, rpe, rpe_all_deltas
from .report import (
    COVERAGE_WARN_THRESHOLD,
    load_report_config,
    run_report,
)
from .synth import DegradationSpec, MotionSpec, degrade, generate
from .tum_io import load_trajectory, save_trajectory

OUTPUT_DIR_ENV = "TRAJEVAL_OUTPUT_DIR"

FULL_SPAN_WARNING = (
    "warning: a delta spanning the whole sequence compares only the first and last "
    "poses; it penalizes rotational errors in the beginning of the trajectory more "
    "than towards the end. Prefer --delta-unit all."
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; our contract reserves 2 for I/O
    # errors, so route usage problems to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _add_association_flags(parser):
    parser.add_argument("groundtruth", help="ground-truth trajectory (TUM format)")
    parser.add_argument("estimate", help="estimated trajectory (TUM format)")
    parser.add_argument(
        "--max-diff",
        type=float,
        default=DEFAULT_MAX_DIFF,
        help="maximum timestamp difference for matching [s] (default %(default)s)",
    )
    parser.add_argument(
        "--offset",
        type=float,
        default=0.0,
        help="time offset added to ground-truth timestamps [s] (default %(default)s)",
    )
    parser.add_argument(
        "--interpolate-gt",
        action="store_true",
        help="interpolate ground truth at estimate timestamps instead of nearest-neighbor matching",
    )


def _load_pair(args):
    gt = load_trajectory(args.groundtruth)
    est = load_trajectory(args.estimate)
    pairs = associate(
        gt,
        est,
        max_diff=args.max_diff,
        offset=args.offset,
        interpolate_gt=args.interpolate_gt,
    )
    return gt, est, pairs


def _coverage_warning(cov):
    if cov.temporal_coverage < COVERAGE_WARN_THRESHOLD:
        print(
            "coverage warning: estimate covers %.1f%% of the ground-truth timespan "
            "(largest gap %.2f s); error statistics ignore the unestimated motion"
            % (100.0 * cov.temporal_coverage, cov.largest_gap),
            file=sys.stderr,
        )


def _print_stats_block(prefix, stats, unit):
    for name in ("rmse", "mean", "median", "std", "min", "max"):
        print("%s.%s %f %s" % (prefix, name, getattr(stats, name), unit))


def cmd_ate(args) -> int:
    gt, _, pairs = _load_pair(args)
    align = not args.no_align
    series = ate(pairs, align=align)
    cov = coverage(gt, pairs)
    if args.format == "json":
        payload = {
            "metric": "ate",
            "aligned": align,
            "pairs": len(pairs),
            "unmatched_gt": pairs.unmatched_gt_count,
            "unmatched_est": pairs.unmatched_est_count,
            "stats": series.stats.as_dict(),
            "coverage": {
                "matched_fraction": cov.matched_fraction,
                "temporal_coverage": cov.temporal_coverage,
                "largest_gap": cov.largest_gap,
            },
            "parameters": {
                "max_diff": args.max_diff,
                "offset": args.offset,
                "interpolate_gt": args.interpolate_gt,
                "align": align,
            },
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "line":
        s = series.stats
        print(
            "ate rmse=%f mean=%f median=%f std=%f min=%f max=%f pairs=%d coverage=%f"
            % (s.rmse, s.mean, s.median, s.std, s.min, s.max, len(pairs), cov.temporal_coverage)
        )
    else:
        print("compared_pose_pairs %d" % len(pairs))
        _print_stats_block("absolute_translational_error", series.stats, "m")
        print("coverage.matched_fraction %f" % cov.matched_fraction)
        print("coverage.temporal %f" % cov.temporal_coverage)
        print("coverage.largest_gap %f s" % cov.largest_gap)
    _coverage_warning(cov)
    if args.plot:
        from .plots import plot_ate

        if align:
            transform = horn_align(pairs).transform
            aligned = pairs.est_translations @ transform.rotation_matrix.T + transform.translation
        else:
            aligned = pairs.est_translations
        plot_ate(pairs, aligned, args.plot, title="absolute trajectory error")
    return EXIT_OK


def cmd_rpe(args) -> int:
    _, _, pairs = _load_pair(args)
    n = len(pairs)
    if args.delta_unit == "all":
        trans_rmse, rot_rmse = rpe_all_deltas(pairs, max_samples=args.samples, seed=args.seed)
        if args.format == "json":
            payload = {
                "metric": "rpe",
                "mode": "all_deltas",
                "pairs": n,
                "samples": args.samples,
                "seed": args.seed,
                "trans_rmse": trans_rmse,
                "rot_rmse": rot_rmse,
            }
            print(json.dumps(payload, indent=2, sort_keys=True))
        elif args.format == "line":
            print("rpe_all trans_rmse=%f rot_rmse=%f pairs=%d" % (trans_rmse, rot_rmse, n))
        else:
            print("compared_pose_pairs %d" % n)
            print("averaged_over_deltas true")
            print("translational_error.rmse %f m" % trans_rmse)
            print("rotational_error.rmse %f rad" % rot_rmse)
        return EXIT_OK

    delta = args.delta
    if args.full_span or (args.delta_unit == "frames" and delta == n):
        print(FULL_SPAN_WARNING, file=sys.stderr)
        delta = float(n - 1)
        unit = "frames"
    else:
        unit = args.delta_unit
    spec = DeltaSpec(mode=unit, delta=delta, max_samples=args.samples, seed=args.seed)
    trans_series, rot_series = rpe(pairs, spec)
    if args.format == "json":
        payload = {
            "metric": "rpe",
            "mode": unit,
            "delta": delta,
            "pairs": n,
            "couples": len(trans_series),
            "trans": trans_series.stats.as_dict(),
            "rot": rot_series.stats.as_dict(),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "line":
        print(
            "rpe trans_rmse=%f rot_rmse=%f couples=%d delta=%g unit=%s"
            % (trans_series.stats.rmse, rot_series.stats.rmse, len(trans_series), delta, unit)
        )
    else:
        print("compared_pose_couples %d" % len(trans_series))
        _print_stats_block("translational_error", trans_series.stats, "m")
        _print_stats_block("rotational_error", rot_series.stats, "rad")
    return EXIT_OK


def cmd_associate(args) -> int:
    _, _, pairs = _load_pair(args)
    lines = ["%f %f" % (g.timestamp, e.timestamp) for g, e in pairs]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_degradation(text: str, seed: int) -> DegradationSpec:
    kind, _, params_text = text.partition(":")
    aliases = {
        "noise": "iid_noise",
        "iid_noise": "iid_noise",
        "drift": "random_walk_drift",
        "random_walk_drift": "random_walk_drift",
        "gap": "gap",
        "truncate": "truncate",
    }
    if kind not in aliases:
        raise ValueError(
            "unknown degradation %r (use noise, drift, gap or truncate)" % kind
        )
    kind = aliases[kind]
    try:
        params = [float(p) for p in params_text.split(",") if p != ""]
    except ValueError:
        raise ValueError("bad degradation parameters %r" % params_text) from None
    if kind in ("iid_noise", "random_walk_drift"):
        if not 1 <= len(params) <= 2:
            raise ValueError("%s needs SIGMA_TRANS[,SIGMA_ROT]" % kind)
        return DegradationSpec(
            kind=kind,
            sigma_trans=params[0],
            sigma_rot=params[1] if len(params) > 1 else 0.0,
            seed=seed,
        )
    if kind == "gap":
        if len(params) != 2:
            raise ValueError("gap needs T0,T1")
        return DegradationSpec(kind=kind, t0=params[0], t1=params[1], seed=seed)
    if len(params) != 1:
        raise ValueError("truncate needs CUTOFF")
    return DegradationSpec(kind=kind, cutoff=params[0], seed=seed)


def cmd_synth(args) -> int:
    spec = MotionSpec(
        shape=args.shape,
        duration=args.duration,
        rate=args.rate,
        scale=args.scale,
        seed=args.seed,
    )
    trajectory = generate(spec)
    save_trajectory(trajectory, args.out)
    if args.degrade:
        if not args.degraded_out:
            raise ValueError("--degrade requires --degraded-out")
        degradation = _parse_degradation(args.degrade, args.seed)
        save_trajectory(degrade(trajectory, degradation), args.degraded_out)
    elif args.degraded_out:
        raise ValueError("--degraded-out requires --degrade")
    return EXIT_OK


def cmd_report(args) -> int:
    config = load_report_config(args.config)
    output_dir = (
        args.output_dir
        or config.output_dir
        or os.environ.get(OUTPUT_DIR_ENV)
        or "trajeval-report"
    )
    records = run_report(config, output_dir)
    if args.format == "json":
        print(json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True))
    else:
        for record in records:
            if record.status == "ok":
                print(
                    "[ok]    %s / %s: ate_rmse=%.6f m rpe_trans_rmse=%.6f m "
                    "rpe_rot_rmse=%.6f rad coverage=%.3f (evaluated in %.3f s)"
                    % (
                        record.algorithm_label,
                        record.sequence_label,
                        record.ate_stats.rmse,
                        record.rpe_trans_stats.rmse,
                        record.rpe_rot_stats.rmse,
                        record.coverage.temporal_coverage,
                        record.wall_time_seconds,
                    )
                )
                _coverage_warning(record.coverage)
            else:
                print(
                    "[error] %s / %s: %s"
                    % (record.algorithm_label, record.sequence_label, record.message)
                )
        print("report written to %s" % output_dir)
    if all(r.status == "error" for r in records):
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="trajeval",
        description="Evaluate estimated camera trajectories against ground truth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ate = sub.add_parser("ate", help="absolute trajectory error")
    _add_association_flags(p_ate)
    p_ate.add_argument("--no-align", action="store_true", help="skip rigid alignment")
    p_ate.add_argument("--plot", metavar="PATH", help="write a top-down error plot (svg/pdf/png)")
    p_ate.add_argument(
        "--format", choices=("text", "line", "json"), default="text", help="output style"
    )
    p_ate.set_defaults(func=cmd_ate)

    p_rpe = sub.add_parser("rpe", help="relative pose error")
    _add_association_flags(p_rpe)
    p_rpe.add_argument(
        "--delta", type=float, default=1.0, help="interval size (default %(default)s)"
    )
    p_rpe.add_argument(
        "--delta-unit",
        choices=("frames", "seconds", "all"),
        default="frames",
        help="interval unit; 'all' averages over every interval length (default %(default)s)",
    )
    p_rpe.add_argument(
        "--samples",
        type=int,
        default=DEFAULT_MAX_SAMPLES,
        help="sample budget for 'all' mode (default %(default)s)",
    )
    p_rpe.add_argument("--seed", type=int, default=0, help="sampling seed (default %(default)s)")
    p_rpe.add_argument(
        "--full-span",
        action="store_true",
        help="compare only the first and last poses (prints a caveat; not recommended)",
    )
    p_rpe.add_argument(
        "--format", choices=("text", "line", "json"), default="text", help="output style"
    )
    p_rpe.set_defaults(func=cmd_rpe)

    p_assoc = sub.add_parser("associate", help="print matched timestamp pairs")
    _add_association_flags(p_assoc)
    p_assoc.add_argument("--output", metavar="PATH", help="write pairs to a file instead of stdout")
    p_assoc.set_defaults(func=cmd_associate)

    p_synth = sub.add_parser("synth", help="generate a synthetic trajectory")
    p_synth.add_argument(
        "--shape", choices=("line", "circle", "figure_eight"), default="line"
    )
    p_synth.add_argument("--duration", type=float, default=60.0, help="seconds (default %(default)s)")
    p_synth.add_argument("--rate", type=float, default=30.0, help="Hz (default %(default)s)")
    p_synth.add_argument("--scale", type=float, default=1.0, help="meters (default %(default)s)")
    p_synth.add_argument("--seed", type=int, default=0, help="noise seed (default %(default)s)")
    p_synth.add_argument("--out", required=True, metavar="PATH", help="ground-truth output file")
    p_synth.add_argument(
        "--degrade",
        metavar="KIND:PARAMS",
        help="also write a degraded copy: noise:SIGMA_T[,SIGMA_R] | drift:SIGMA_T[,SIGMA_R] | gap:T0,T1 | truncate:CUTOFF",
    )
    p_synth.add_argument("--degraded-out", metavar="PATH", help="degraded output file")
    p_synth.set_defaults(func=cmd_synth)

    p_report = sub.add_parser("report", help="batch evaluation from a JSON config")
    p_report.add_argument("config", help="report configuration file (JSON)")
    p_report.add_argument(
        "--output-dir",
        metavar="DIR",
        help="where to write the report (default: config output_dir, then $%s, then ./trajeval-report)"
        % OUTPUT_DIR_ENV,
    )
    p_report.add_argument(
        "--format", choices=("text", "json"), default="text", help="console output style"
    )
    p_report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, EmptyTrajectoryError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except (AssociationError, EmptyWindowError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ASSOCIATION
    except (InsufficientDataError, DegenerateGeometryError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
