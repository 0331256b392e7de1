"""Cohort assembly, per-feature concordance, network ranking, and grouping."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import CohortTooSmall, TransfidError, UnknownTopNetwork
from .iqa import MetricSet, compute_metrics
from .manifest import ORIGINAL_SOURCE, PatientRecord, parse_manifest
from .nifti import load_mask, load_nifti
from .preprocess import crop_centered, min_max_normalize
from .radiomics import ALL_FEATURE_IDS, ExtractionSettings, FeatureVector, extract_all
from .stats import PairedSample, TestResult, paired_t_test, spearman_rho
from .volume import RoiMask, Volume3D

GROUP1 = "Group1"
GROUP2 = "Group2"
GROUP3 = "Group3"


@dataclass
class PatientResult:
    """Per-patient pipeline output, or the reason it was excluded."""

    patient_id: str
    features: dict[str, FeatureVector] = field(default_factory=dict)
    metrics: dict[str, MetricSet] = field(default_factory=dict)
    error: str | None = None


@dataclass
class CohortTable:
    """Feature vectors per (patient, source) and metrics per (patient, network)."""

    patients: list[str]
    sources: list[str]
    networks: list[str]
    cells: dict[tuple[str, str], FeatureVector]
    metrics: dict[tuple[str, str], MetricSet]
    exclusions: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class ConcordanceRecord:
    """Per-network Spearman rho of one feature across patients."""

    feature_key: str
    rho: dict[str, float]
    n_effective: dict[str, int]
    degenerate: dict[str, bool]


@dataclass(frozen=True)
class GroupAssignment:
    feature_key: str
    group: str
    passes: dict[str, bool]
    top_network: str
    anomalous: bool = False


def preprocess_pair(
    volume: Volume3D, mask: RoiMask, config: RunConfig
) -> tuple[Volume3D, RoiMask]:
    """Apply the configured crop/normalize steps to one volume and its mask."""
    if config.normalize and not config.normalize_after_crop:
        volume = min_max_normalize(volume)
    if config.crop is not None:
        volume, mask = crop_centered(volume, mask, config.crop)
    if config.normalize and config.normalize_after_crop:
        volume = min_max_normalize(volume)
    return volume, mask


def process_patient(
    record: PatientRecord, config: RunConfig, want_features: bool = True, want_metrics: bool = True
) -> PatientResult:
    """Load, preprocess, extract, and score one patient; never raises on data errors."""
    result = PatientResult(patient_id=record.patient_id)
    settings = ExtractionSettings(
        scheme=config.scheme,
        ivh_bins=config.ivh_bins,
        ngldm_alpha=config.ngldm_alpha,
        config_hash=config.config_hash(),
    )
    try:
        original = load_nifti(record.source_paths[ORIGINAL_SOURCE])
        mask = load_mask(record.mask_path, original)
        processed: dict[str, tuple[Volume3D, RoiMask]] = {}
        for source, path in record.source_paths.items():
            vol = original if source == ORIGINAL_SOURCE else load_nifti(path)
            mask.check_aligned(vol)
            processed[source] = preprocess_pair(vol, mask, config)

        if want_features:
            for source, (vol, roi) in processed.items():
                result.features[source] = extract_all(vol, roi, settings)
        if want_metrics:
            orig_vol, orig_roi = processed[ORIGINAL_SOURCE]
            metric_mask = orig_roi if config.metrics_roi_only else None
            for source in record.synthetic_sources:
                synth_vol, _ = processed[source]
                result.metrics[source] = compute_metrics(
                    orig_vol,
                    synth_vol,
                    ssim_params=config.ssim_params,
                    peak=config.psnr_peak,
                    mask=metric_mask,
                )
    except (TransfidError, OSError, ValueError) as exc:
        return PatientResult(patient_id=record.patient_id, error=f"{type(exc).__name__}: {exc}")
    return result


def _worker(args: tuple[PatientRecord, RunConfig, bool, bool]) -> PatientResult:
    record, config, want_features, want_metrics = args
    return process_patient(record, config, want_features, want_metrics)


def resolve_jobs(jobs: int | None, config: RunConfig) -> int:
    """Worker count: --jobs flag, then TRANSFID_JOBS, then config; 0 = auto."""
    for candidate in (jobs, os.environ.get("TRANSFID_JOBS"), config.jobs):
        if candidate in (None, ""):
            continue
        n = int(candidate)
        return n if n > 0 else max(1, os.cpu_count() or 1)
    return 1


def run_pipeline(
    records: list[PatientRecord],
    config: RunConfig,
    jobs: int = 1,
    want_features: bool = True,
    want_metrics: bool = True,
) -> list[PatientResult]:
    """Process all patients, optionally in parallel, in manifest order."""
    args = [(r, config, want_features, want_metrics) for r in records]
    if jobs <= 1 or len(records) <= 1:
        return [_worker(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_worker, args))


def build_cohort(
    manifest: str | Path | list[PatientRecord], config: RunConfig, jobs: int = 1
) -> CohortTable:
    """Assemble the full cohort table; failed patients are excluded with a note."""
    records = manifest if isinstance(manifest, list) else parse_manifest(manifest)
    results = run_pipeline(records, config, jobs=jobs)

    patients: list[str] = []
    sources: list[str] = [ORIGINAL_SOURCE]
    cells: dict[tuple[str, str], FeatureVector] = {}
    metrics: dict[tuple[str, str], MetricSet] = {}
    exclusions: list[tuple[str, str]] = []
    for record, result in zip(records, results):
        if result.error is not None:
            exclusions.append((record.patient_id, result.error))
            continue
        patients.append(record.patient_id)
        for source in record.source_paths:
            if source not in sources:
                sources.append(source)
            cells[(record.patient_id, source)] = result.features[source]
        for network, metric_set in result.metrics.items():
            metrics[(record.patient_id, network)] = metric_set

    if not patients:
        raise CohortTooSmall("no patient could be processed")
    networks = [s for s in sources if s != ORIGINAL_SOURCE]
    return CohortTable(
        patients=patients,
        sources=sources,
        networks=networks,
        cells=cells,
        metrics=metrics,
        exclusions=exclusions,
    )


def concordance(table: CohortTable) -> list[ConcordanceRecord]:
    """Spearman rho between original and synthetic feature values per network.

    Patients with a non-finite value on either side are dropped per
    feature; fewer than two usable pairs, or a constant side, marks the
    (feature, network) pair degenerate with NaN rho.
    """
    if len(table.patients) < 2:
        raise CohortTooSmall(f"concordance needs >= 2 patients, got {len(table.patients)}")

    records = []
    for fid in ALL_FEATURE_IDS:
        key = fid.key
        rho: dict[str, float] = {}
        n_eff: dict[str, int] = {}
        degenerate: dict[str, bool] = {}
        for network in table.networks:
            xs, ys = [], []
            for pid in table.patients:
                orig = table.cells.get((pid, ORIGINAL_SOURCE))
                synth = table.cells.get((pid, network))
                if orig is None or synth is None:
                    continue
                x, y = orig[key], synth[key]
                if math.isfinite(x) and math.isfinite(y):
                    xs.append(x)
                    ys.append(y)
            n_eff[network] = len(xs)
            if len(xs) < 2:
                rho[network] = math.nan
                degenerate[network] = True
                continue
            value = spearman_rho(PairedSample(np.array(xs), np.array(ys)))
            rho[network] = value
            degenerate[network] = math.isnan(value)
        records.append(
            ConcordanceRecord(feature_key=key, rho=rho, n_effective=n_eff, degenerate=degenerate)
        )
    return records


def rank_networks(table: CohortTable) -> list[str]:
    """Networks by descending mean SSIM, then ascending mean MAE, then name."""
    means = {}
    for network in table.networks:
        sets = [table.metrics[(p, network)] for p in table.patients if (p, network) in table.metrics]
        if sets:
            mean_ssim = float(np.mean([m.ssim for m in sets]))
            mean_mae = float(np.mean([m.mae for m in sets]))
        else:
            mean_ssim, mean_mae = -math.inf, math.inf
        means[network] = (mean_ssim, mean_mae)
    return sorted(table.networks, key=lambda n: (-means[n][0], means[n][1], n))


def classify_groups(
    records: list[ConcordanceRecord], top_network: str, threshold: float = 0.50
) -> list[GroupAssignment]:
    """Partition features into the three discovery groups.

    A network passes on strict rho > threshold (NaN never passes).
    Group1 needs a strict majority of networks; Group2 needs the top
    network; everything else is Group3, flagged anomalous when some
    non-top network passed anyway.
    """
    assignments = []
    for record in records:
        networks = list(record.rho.keys())
        if top_network not in networks:
            raise UnknownTopNetwork(f"{top_network!r} not among networks {networks}")
        passes = {
            n: (not math.isnan(record.rho[n])) and record.rho[n] > threshold for n in networks
        }
        n_pass = sum(passes.values())
        if n_pass > len(networks) / 2:
            group = GROUP1
            anomalous = False
        elif passes[top_network]:
            group = GROUP2
            anomalous = False
        else:
            group = GROUP3
            anomalous = n_pass > 0
        assignments.append(
            GroupAssignment(
                feature_key=record.feature_key,
                group=group,
                passes=passes,
                top_network=top_network,
                anomalous=anomalous,
            )
        )
    return assignments


def compare_networks(
    table: CohortTable, metric_name: str, network_a: str, network_b: str
) -> TestResult:
    """Paired t-test of one metric between two networks over shared patients."""
    if metric_name not in ("mae", "mse", "ssim", "psnr"):
        raise ValueError(f"unknown metric {metric_name!r}")
    xs, ys = [], []
    for pid in table.patients:
        ma = table.metrics.get((pid, network_a))
        mb = table.metrics.get((pid, network_b))
        if ma is not None and mb is not None:
            xs.append(getattr(ma, metric_name))
            ys.append(getattr(mb, metric_name))
    return paired_t_test(PairedSample(np.array(xs), np.array(ys)))


def group_counts_by_family(assignments: list[GroupAssignment]) -> dict[str, dict[str, int]]:
    """Group tallies per feature family, plus totals."""
    counts: dict[str, dict[str, int]] = {}
    for assignment in assignments:
        family = assignment.feature_key.split(".", 1)[0].upper()
        fam = counts.setdefault(family, {GROUP1: 0, GROUP2: 0, GROUP3: 0})
        fam[assignment.group] += 1
    totals = {GROUP1: 0, GROUP2: 0, GROUP3: 0}
    for fam in counts.values():
        for group, n in fam.items():
            totals[group] += n
    counts["TOTAL"] = totals
    return counts
