"""Batch evaluation: many (algorithm, sequence) entries from one config file.

The config is a single JSON document; unknown keys are rejected rather
than ignored, because a silently misspelled parameter corrupts a whole
benchmark. Relative paths inside the config resolve against the config
file's own directory.

Per entry the pipeline is load -> associate -> align -> ATE -> RPE ->
coverage; failures become records with status "error" instead of aborting
the batch. Outputs: one JSON record per entry, an aggregate CSV, a
plain-text summary and a grouped bar chart. All files are written
atomically (temp file + rename) and are byte-stable for a fixed config:
the evaluation wall time, which necessarily varies, is reported on the
console but kept out of the written files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from .association import DEFAULT_MAX_DIFF, associate
from .errors import ConfigError, TrajevalError
from .metrics import CoverageReport, DeltaSpec, Stats, ate, coverage, rpe
from .plots import plot_report_bars
from .tum_io import load_trajectory

__all__ = [
    "ReportEntry",
    "ReportConfig",
    "EvaluationRecord",
    "load_report_config",
    "evaluate_entry",
    "run_report",
    "COVERAGE_WARN_THRESHOLD",
]

# Below this temporal coverage an entry is flagged: its error statistics
# ignore whatever motion the estimator never produced poses for.
COVERAGE_WARN_THRESHOLD = 0.99

_ENTRY_KEYS = {"algorithm", "sequence", "estimate", "groundtruth", "runtime_seconds"}
_TOP_KEYS = {"entries", "max_diff", "offset", "interpolate_gt", "align", "rpe", "output_dir"}
_RPE_KEYS = {"mode", "delta", "max_samples", "seed"}

CSV_COLUMNS = (
    "algorithm",
    "sequence",
    "status",
    "pairs",
    "unmatched_gt",
    "unmatched_est",
    "ate_rmse",
    "ate_mean",
    "ate_median",
    "ate_std",
    "ate_min",
    "ate_max",
    "rpe_trans_rmse",
    "rpe_trans_mean",
    "rpe_trans_median",
    "rpe_trans_std",
    "rpe_trans_min",
    "rpe_trans_max",
    "rpe_rot_rmse",
    "rpe_rot_mean",
    "rpe_rot_median",
    "rpe_rot_std",
    "rpe_rot_min",
    "rpe_rot_max",
    "coverage_matched_fraction",
    "temporal_coverage",
    "largest_gap",
    "low_coverage",
    "external_runtime_seconds",
    "message",
)


@dataclass(frozen=True)
class ReportEntry:
    algorithm_label: str
    sequence_label: str
    estimate_path: str
    groundtruth_path: str
    external_runtime_seconds: float | None = None


@dataclass(frozen=True)
class ReportConfig:
    entries: tuple
    max_diff: float = DEFAULT_MAX_DIFF
    offset: float = 0.0
    interpolate_gt: bool = False
    align: bool = True
    rpe_spec: DeltaSpec = DeltaSpec(mode="all_sampled", delta=1.0)
    output_dir: str | None = None


@dataclass
class EvaluationRecord:
    """Everything measured for one (algorithm, sequence) entry.

    wall_time_seconds is this toolkit's own evaluation time;
    external_runtime_seconds is the estimator runtime as supplied in the
    config (never measured here).
    """

    algorithm_label: str
    sequence_label: str
    status: str = "ok"
    message: str = ""
    pair_count: int = 0
    unmatched_gt: int = 0
    unmatched_est: int = 0
    ate_stats: Stats | None = None
    rpe_trans_stats: Stats | None = None
    rpe_rot_stats: Stats | None = None
    coverage: CoverageReport | None = None
    external_runtime_seconds: float | None = None
    wall_time_seconds: float = 0.0
    parameters: dict = field(default_factory=dict)

    @property
    def low_coverage(self) -> bool:
        return (
            self.coverage is not None
            and self.coverage.temporal_coverage < COVERAGE_WARN_THRESHOLD
        )

    def to_dict(self, include_wall_time: bool = False) -> dict:
        data = {
            "algorithm": self.algorithm_label,
            "sequence": self.sequence_label,
            "status": self.status,
            "message": self.message,
            "pair_count": self.pair_count,
            "unmatched_gt": self.unmatched_gt,
            "unmatched_est": self.unmatched_est,
            "ate": self.ate_stats.as_dict() if self.ate_stats else None,
            "rpe_trans": self.rpe_trans_stats.as_dict() if self.rpe_trans_stats else None,
            "rpe_rot": self.rpe_rot_stats.as_dict() if self.rpe_rot_stats else None,
            "coverage": (
                {
                    "matched_fraction": self.coverage.matched_fraction,
                    "temporal_coverage": self.coverage.temporal_coverage,
                    "largest_gap": self.coverage.largest_gap,
                }
                if self.coverage
                else None
            ),
            "external_runtime_seconds": self.external_runtime_seconds,
            "parameters": self.parameters,
        }
        if include_wall_time:
            data["wall_time_seconds"] = self.wall_time_seconds
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationRecord":
        cov = data.get("coverage")
        return cls(
            algorithm_label=data["algorithm"],
            sequence_label=data["sequence"],
            status=data.get("status", "ok"),
            message=data.get("message", ""),
            pair_count=int(data.get("pair_count", 0)),
            unmatched_gt=int(data.get("unmatched_gt", 0)),
            unmatched_est=int(data.get("unmatched_est", 0)),
            ate_stats=Stats.from_dict(data["ate"]) if data.get("ate") else None,
            rpe_trans_stats=Stats.from_dict(data["rpe_trans"]) if data.get("rpe_trans") else None,
            rpe_rot_stats=Stats.from_dict(data["rpe_rot"]) if data.get("rpe_rot") else None,
            coverage=(
                CoverageReport(
                    matched_fraction=float(cov["matched_fraction"]),
                    temporal_coverage=float(cov["temporal_coverage"]),
                    largest_gap=float(cov["largest_gap"]),
                )
                if cov
                else None
            ),
            external_runtime_seconds=(
                None
                if data.get("external_runtime_seconds") is None
                else float(data["external_runtime_seconds"])
            ),
            wall_time_seconds=float(data.get("wall_time_seconds", 0.0)),
            parameters=dict(data.get("parameters", {})),
        )


def _require_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError("unknown key(s) in %s: %s" % (where, ", ".join(sorted(unknown))))


def _require_label(value, name: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ConfigError("%s must be a nonempty string, got %r" % (name, value))
    return value.strip()


def load_report_config(path) -> ReportConfig:
    """Parse and validate a JSON report config; see the README for the schema."""
    config_path = Path(path)
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("invalid JSON in %s: %s" % (config_path, exc)) from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(raw, _TOP_KEYS, "config")
    entries_raw = raw.get("entries")
    if not isinstance(entries_raw, list) or not entries_raw:
        raise ConfigError("config needs a nonempty 'entries' list")
    base = config_path.parent
    entries = []
    for idx, item in enumerate(entries_raw):
        if not isinstance(item, dict):
            raise ConfigError("entry %d must be an object" % idx)
        _require_keys(item, _ENTRY_KEYS, "entry %d" % idx)
        for key in ("algorithm", "sequence", "estimate", "groundtruth"):
            if key not in item:
                raise ConfigError("entry %d is missing %r" % (idx, key))
        est_path = str((base / item["estimate"]).resolve())
        gt_path = str((base / item["groundtruth"]).resolve())
        if est_path == gt_path:
            raise ConfigError(
                "entry %d: estimate and groundtruth are the same file (%s)" % (idx, est_path)
            )
        runtime = item.get("runtime_seconds")
        if runtime is not None:
            runtime = float(runtime)
            if runtime < 0.0:
                raise ConfigError("entry %d: runtime_seconds must be >= 0" % idx)
        entries.append(
            ReportEntry(
                algorithm_label=_require_label(item["algorithm"], "entry %d algorithm" % idx),
                sequence_label=_require_label(item["sequence"], "entry %d sequence" % idx),
                estimate_path=est_path,
                groundtruth_path=gt_path,
                external_runtime_seconds=runtime,
            )
        )
    rpe_raw = raw.get("rpe", {})
    if not isinstance(rpe_raw, dict):
        raise ConfigError("'rpe' must be an object")
    _require_keys(rpe_raw, _RPE_KEYS, "rpe")
    try:
        rpe_spec = DeltaSpec(
            mode=rpe_raw.get("mode", "all_sampled"),
            delta=float(rpe_raw.get("delta", 1.0)),
            max_samples=int(rpe_raw.get("max_samples", DeltaSpec().max_samples)),
            seed=int(rpe_raw.get("seed", 0)),
        )
        max_diff = float(raw.get("max_diff", DEFAULT_MAX_DIFF))
        if not max_diff > 0.0:
            raise ValueError("max_diff must be positive")
        config = ReportConfig(
            entries=tuple(entries),
            max_diff=max_diff,
            offset=float(raw.get("offset", 0.0)),
            interpolate_gt=bool(raw.get("interpolate_gt", False)),
            align=bool(raw.get("align", True)),
            rpe_spec=rpe_spec,
            output_dir=raw.get("output_dir"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if config.output_dir is not None and not isinstance(config.output_dir, str):
        raise ConfigError("output_dir must be a string")
    return config


def _parameters_echo(config: ReportConfig) -> dict:
    return {
        "max_diff": config.max_diff,
        "offset": config.offset,
        "interpolate_gt": config.interpolate_gt,
        "align": config.align,
        "rpe": {
            "mode": config.rpe_spec.mode,
            "delta": config.rpe_spec.delta,
            "max_samples": config.rpe_spec.max_samples,
            "seed": config.rpe_spec.seed,
        },
    }


def evaluate_entry(entry: ReportEntry, config: ReportConfig) -> EvaluationRecord:
    """Evaluate one entry; errors are captured in the record, not raised."""
    record = EvaluationRecord(
        algorithm_label=entry.algorithm_label,
        sequence_label=entry.sequence_label,
        external_runtime_seconds=entry.external_runtime_seconds,
        parameters=_parameters_echo(config),
    )
    start = time.perf_counter()
    try:
        gt = load_trajectory(entry.groundtruth_path)
        est = load_trajectory(entry.estimate_path)
        pairs = associate(
            gt,
            est,
            max_diff=config.max_diff,
            offset=config.offset,
            interpolate_gt=config.interpolate_gt,
        )
        ate_series = ate(pairs, align=config.align)
        trans_series, rot_series = rpe(pairs, config.rpe_spec)
        cov = coverage(gt, pairs)
        record.pair_count = len(pairs)
        record.unmatched_gt = pairs.unmatched_gt_count
        record.unmatched_est = pairs.unmatched_est_count
        record.ate_stats = ate_series.stats
        record.rpe_trans_stats = trans_series.stats
        record.rpe_rot_stats = rot_series.stats
        record.coverage = cov
    except (TrajevalError, OSError) as exc:
        record.status = "error"
        record.message = str(exc)
    record.wall_time_seconds = time.perf_counter() - start
    return record


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "-", text).strip("-")
    return cleaned or "unnamed"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".9g")


def _csv_row(record: EvaluationRecord) -> list:
    def stats_cells(stats):
        if stats is None:
            return [""] * 6
        return [_fmt(v) for v in (stats.rmse, stats.mean, stats.median, stats.std, stats.min, stats.max)]

    cov = record.coverage
    return (
        [
            record.algorithm_label,
            record.sequence_label,
            record.status,
            str(record.pair_count),
            str(record.unmatched_gt),
            str(record.unmatched_est),
        ]
        + stats_cells(record.ate_stats)
        + stats_cells(record.rpe_trans_stats)
        + stats_cells(record.rpe_rot_stats)
        + [
            _fmt(cov.matched_fraction) if cov else "",
            _fmt(cov.temporal_coverage) if cov else "",
            _fmt(cov.largest_gap) if cov else "",
            "true" if record.low_coverage else "false",
            _fmt(record.external_runtime_seconds),
            record.message,
        ]
    )


def render_csv(records) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(_csv_row(record))
    return buffer.getvalue()


def render_summary(records, config: ReportConfig) -> str:
    ok = [r for r in records if r.status == "ok"]
    lines = [
        "trajectory evaluation summary",
        "=============================",
        "",
        "entries: %d (ok: %d, failed: %d)" % (len(records), len(ok), len(records) - len(ok)),
        "association: max_diff=%g s, offset=%g s, mode=%s"
        % (config.max_diff, config.offset, "interpolated" if config.interpolate_gt else "nearest"),
        "alignment: %s" % ("enabled" if config.align else "disabled"),
        "rpe: mode=%s, delta=%g, max_samples=%d, seed=%d"
        % (
            config.rpe_spec.mode,
            config.rpe_spec.delta,
            config.rpe_spec.max_samples,
            config.rpe_spec.seed,
        ),
        "",
    ]
    header = [
        "algorithm",
        "sequence",
        "status",
        "pairs",
        "ate_rmse_m",
        "rpe_trans_rmse_m",
        "rpe_rot_rmse_rad",
        "coverage",
        "flags",
    ]
    rows = [header]
    for r in records:
        if r.status == "ok":
            rows.append(
                [
                    r.algorithm_label,
                    r.sequence_label,
                    r.status,
                    str(r.pair_count),
                    "%.6f" % r.ate_stats.rmse,
                    "%.6f" % r.rpe_trans_stats.rmse,
                    "%.6f" % r.rpe_rot_stats.rmse,
                    "%.3f" % r.coverage.temporal_coverage,
                    "LOW-COVERAGE" if r.low_coverage else "",
                ]
            )
        else:
            rows.append(
                [r.algorithm_label, r.sequence_label, r.status, "-", "-", "-", "-", "-", r.message]
            )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    lines.append("")
    return "\n".join(lines)


def run_report(config: ReportConfig, output_dir) -> list:
    """Evaluate all entries and write records, CSV, summary and figure.

    Returns the list of EvaluationRecords (in config order). Files created
    under output_dir: records/<algorithm>__<sequence>.json, report.csv,
    summary.txt, report_bars.svg.
    """
    out = Path(output_dir)
    records_dir = out / "records"
    records_dir.mkdir(parents=True, exist_ok=True)
    records = [evaluate_entry(entry, config) for entry in config.entries]

    used_names = set()
    for record in records:
        name = "%s__%s" % (_slug(record.algorithm_label), _slug(record.sequence_label))
        candidate = name
        counter = 2
        while candidate in used_names:
            candidate = "%s-%d" % (name, counter)
            counter += 1
        used_names.add(candidate)
        payload = json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n"
        _write_atomic(records_dir / (candidate + ".json"), payload)

    _write_atomic(out / "report.csv", render_csv(records))
    _write_atomic(out / "summary.txt", render_summary(records, config))
    plot_report_bars(records, out / "report_bars.svg")
    return records
