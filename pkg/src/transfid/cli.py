"""Command-line front end: extract, metrics, analyze, phantom, selftest."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import analysis
from .config import DEFAULTS, RunConfig
from .errors import ConfigError, TransfidError
from .iqa import MetricSet, mae, mse, psnr, ssim3d
from .manifest import ORIGINAL_SOURCE, parse_manifest
from .nifti import save_nifti
from .phantom import generate_phantom
from .preprocess import DiscretizationScheme
from .radiomics import ALL_FEATURE_KEYS, ExtractionSettings, FeatureVector, extract_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

METRIC_COLUMNS = ("mae", "mse", "ssim", "psnr")


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt(value: float, sig: int) -> str:
    if math.isnan(value):
        return ""
    return format(value, f".{sig}g")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _load_config(path: str | None) -> RunConfig:
    return RunConfig.from_json(path) if path else RunConfig.from_dict({})


def _sorted_sources(record) -> list[str]:
    return [ORIGINAL_SOURCE] + sorted(record.synthetic_sources)


def cmd_extract(args) -> int:
    config = _load_config(args.config)
    records = parse_manifest(args.manifest)
    jobs = analysis.resolve_jobs(args.jobs, config)
    results = analysis.run_pipeline(records, config, jobs=jobs, want_metrics=False)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["patient_id", "source", *ALL_FEATURE_KEYS, "flags"])
    for record, result in zip(records, results):
        if result.error is not None:
            print(f"warning: excluded patient {record.patient_id}: {result.error}", file=sys.stderr)
            continue
        for source in _sorted_sources(record):
            vector = result.features[source]
            row = [record.patient_id, source]
            row.extend(_fmt(vector[key], 12) for key in ALL_FEATURE_KEYS)
            row.append(";".join(k for k in ALL_FEATURE_KEYS if k in vector.flags))
            writer.writerow(row)
    _atomic_write(Path(args.out), buf.getvalue())
    return EXIT_OK


def cmd_metrics(args) -> int:
    config = _load_config(args.config)
    records = parse_manifest(args.manifest)
    jobs = analysis.resolve_jobs(args.jobs, config)
    results = analysis.run_pipeline(records, config, jobs=jobs, want_features=False)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["patient_id", "network", *METRIC_COLUMNS])
    for record, result in zip(records, results):
        if result.error is not None:
            print(f"warning: excluded patient {record.patient_id}: {result.error}", file=sys.stderr)
            continue
        for network in sorted(result.metrics):
            m = result.metrics[network]
            writer.writerow(
                [record.patient_id, network]
                + [_fmt(getattr(m, name), 9) for name in METRIC_COLUMNS]
            )
    _atomic_write(Path(args.out), buf.getvalue())
    return EXIT_OK


def _read_features_csv(path: str) -> tuple[list[str], list[str], dict]:
    """Rebuild feature vectors from an extract CSV."""
    patients: list[str] = []
    sources: list[str] = []
    cells: dict[tuple[str, str], FeatureVector] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [k for k in ALL_FEATURE_KEYS if k not in (reader.fieldnames or [])]
        if missing:
            raise TransfidError(f"{path}: missing feature columns, e.g. {missing[0]}")
        for row in reader:
            pid = row["patient_id"]
            source = row["source"]
            if pid not in patients:
                patients.append(pid)
            if source not in sources:
                sources.append(source)
            flags = frozenset(f for f in (row.get("flags") or "").split(";") if f)
            values = {}
            for key in ALL_FEATURE_KEYS:
                cell = row[key]
                values[key] = float(cell) if cell not in ("", None) else math.nan
            flags = flags | {k for k, v in values.items() if math.isnan(v)}
            cells[(pid, source)] = FeatureVector(values=values, flags=flags)
    if ORIGINAL_SOURCE not in sources:
        raise TransfidError(f"{path}: no {ORIGINAL_SOURCE} rows")
    return patients, sources, cells


def _read_metrics_csv(path: str) -> dict[tuple[str, str], MetricSet]:
    metrics: dict[tuple[str, str], MetricSet] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = {"patient_id", "network", *METRIC_COLUMNS}
        if not needed.issubset(reader.fieldnames or []):
            raise TransfidError(f"{path}: header must contain {sorted(needed)}")
        for row in reader:
            metrics[(row["patient_id"], row["network"])] = MetricSet(
                **{name: float(row[name]) for name in METRIC_COLUMNS}
            )
    return metrics


def cmd_analyze(args) -> int:
    patients, sources, cells = _read_features_csv(args.features)
    metrics = _read_metrics_csv(args.metrics)
    networks = sorted({s for s in sources if s != ORIGINAL_SOURCE})

    table = analysis.CohortTable(
        patients=patients,
        sources=sources,
        networks=networks,
        cells=cells,
        metrics=metrics,
    )
    ranked = analysis.rank_networks(table)
    top = ranked[0]
    records = analysis.concordance(table)
    assignments = analysis.classify_groups(records, top, threshold=args.threshold)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["feature_id", "group"]
        + [f"rho_{n}" for n in networks]
        + [f"pass_{n}" for n in networks]
        + ["anomalous"]
    )
    for record, assignment in zip(records, assignments):
        writer.writerow(
            [record.feature_key, assignment.group]
            + [_fmt(record.rho[n], 9) for n in networks]
            + [str(assignment.passes[n]).lower() for n in networks]
            + [str(assignment.anomalous).lower()]
        )
    _atomic_write(Path(args.out), buf.getvalue())

    summary = {
        "threshold": args.threshold,
        "networks_ranked": ranked,
        "top_network": top,
        "group_counts": analysis.group_counts_by_family(assignments),
    }
    summary_path = Path(args.summary) if args.summary else Path(args.out).with_suffix(".summary.json")
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _parse_triple(text: str, kind, name: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise TransfidError(f"{name} must be three comma-separated values, got {text!r}")
    return tuple(kind(p) for p in parts)


def cmd_phantom(args) -> int:
    dims = _parse_triple(args.dims, int, "--dims")
    spacing = _parse_triple(args.spacing, float, "--spacing")
    volume, mask = generate_phantom(args.seed, dims, spacing)

    out = Path(args.out)
    mask_out = Path(args.mask_out) if args.mask_out else out.with_name(out.stem + "_mask" + out.suffix)
    save_nifti(out, volume)
    mask_volume = volume.with_values(mask.flags.astype(np.float64))
    save_nifti(mask_out, mask_volume)
    print(f"wrote {out} and {mask_out}")
    return EXIT_OK


def _selftest_golden() -> dict:
    with resources.files("transfid.data").joinpath("selftest_golden.json").open("r") as fh:
        return json.load(fh)


def cmd_selftest(args) -> int:
    checks: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        checks.append((name, ok, detail))

    check("feature registry has 186 entries", len(ALL_FEATURE_KEYS) == 186)

    golden = _selftest_golden()
    volume, mask = generate_phantom(
        golden["seed"], tuple(golden["dims"]), tuple(golden["spacing"])
    )
    settings = ExtractionSettings(
        scheme=DiscretizationScheme("FBN", golden["bins"]),
        ivh_bins=golden["ivh_bins"],
        ngldm_alpha=golden["ngldm_alpha"],
    )
    vector = extract_all(volume, mask, settings)
    worst = 0.0
    mismatch = ""
    for key, expected in golden["features"].items():
        got = vector[key]
        if expected is None:
            if not math.isnan(got):
                mismatch = f"{key}: expected NaN, got {got}"
                break
            continue
        err = abs(got - expected) / max(1.0, abs(expected))
        if err > worst:
            worst = err
        if err > 1e-9:
            mismatch = f"{key}: {got} vs golden {expected}"
            break
    check("phantom features match committed golden values", not mismatch, mismatch or f"max rel err {worst:.2e}")
    check(
        "golden flags reproduced",
        set(golden["flags"]) == set(vector.flags),
        "",
    )

    identical = ssim3d(volume, volume)
    check("ssim(a, a) == 1", abs(identical - 1.0) <= 1e-12, f"got {identical}")
    rng = np.random.default_rng(0)
    other = volume.with_values(np.clip(volume.values + rng.normal(0, 0.05, volume.dims), 0, 1))
    check(
        "psnr == -10*log10(mse) at peak 1",
        psnr(volume, other, 1.0) == -10.0 * math.log10(mse(volume, other)),
    )
    check("mae symmetry", mae(volume, other) == mae(other, volume))

    failed = [c for c in checks if not c[1]]
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        suffix = f"  ({detail})" if detail and not ok else ""
        print(f"[{status}] {name}{suffix}")
    return EXIT_OK if not failed else EXIT_DATA


def build_parser() -> _Parser:
    parser = _Parser(prog="transfid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_extract = sub.add_parser("extract", help="extract 186 features per (patient, source)")
    p_extract.add_argument("--manifest", required=True)
    p_extract.add_argument("--config", default=None)
    p_extract.add_argument("--out", required=True)
    p_extract.add_argument("--jobs", type=int, default=None)
    p_extract.set_defaults(func=cmd_extract)

    p_metrics = sub.add_parser("metrics", help="compute MAE/MSE/SSIM/PSNR per (patient, network)")
    p_metrics.add_argument("--manifest", required=True)
    p_metrics.add_argument("--config", default=None)
    p_metrics.add_argument("--out", required=True)
    p_metrics.add_argument("--jobs", type=int, default=None)
    p_metrics.set_defaults(func=cmd_metrics)

    p_analyze = sub.add_parser("analyze", help="concordance and discovery-group classification")
    p_analyze.add_argument("--features", required=True)
    p_analyze.add_argument("--metrics", required=True)
    p_analyze.add_argument("--out", required=True)
    p_analyze.add_argument("--threshold", type=float, default=0.5)
    p_analyze.add_argument("--summary", default=None)
    p_analyze.set_defaults(func=cmd_analyze)

    p_phantom = sub.add_parser("phantom", help="write a deterministic test volume and mask")
    p_phantom.add_argument("--seed", type=int, required=True)
    p_phantom.add_argument("--dims", default="16,16,16")
    p_phantom.add_argument("--spacing", default="1,1,1")
    p_phantom.add_argument("--out", required=True)
    p_phantom.add_argument("--mask-out", default=None)
    p_phantom.set_defaults(func=cmd_phantom)

    p_selftest = sub.add_parser("selftest", help="run the built-in golden-file checks")
    p_selftest.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"transfid: config error: {exc}", file=sys.stderr)
        print("config schema (all keys optional):", file=sys.stderr)
        print(json.dumps(DEFAULTS, indent=2), file=sys.stderr)
        return EXIT_USAGE
    except (TransfidError, OSError) as exc:
        print(f"transfid: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
