"""Seeded Monte-Carlo experiment driver with flat-text configs and CSV output.

Each trial derives its own random stream from ``base_seed`` and the trial
index, and consumes it in a fixed order (schedule, channel, pilot noise, data
symbols), so a given (snr, estimator, trial) cell is bit-reproducible and all
estimators inside a cell see the same channel and noise.
"""

import dataclasses
import os
import time
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .baselines import BaselineConfig, ls_estimate, omp_estimate
from .errors import ConfigurationError
from .metrics import TrialRecord, ber_qpsk, capacity, nmse
from .model import ArrayGeometry, build_dictionary, sample_ssc_channel
from .pilots import sigma_for_snr, synthesize_observation
from .samv import (EstimatorConfig, effective_dictionary, reconstruct_channel,
                   run, write_trace)
from .schedule import (SCHEDULE_KINDS, random_schedule, schedule_to_text,
                       sequential_schedule, stack)

SAMV_ESTIMATORS = ("fas-che", "fas-che-enhanced")
KNOWN_ESTIMATORS = SAMV_ESTIMATORS + ("ls", "omp", "perfect-csi")

SWEEP_HEADER = "snr_db,estimator,trial,nmse,ber,capacity_bits,iterations,elapsed_ms,seed"
CONVERGENCE_HEADER = "estimator,n_chains,snr_db,trial,iteration,max_rel_change,sigma,nll,seed"
REGION_HEADER = "region_wavelengths,snr_db,estimator,trial,capacity_bits,seed"

_SEED_MIX = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: scenario sizes, estimator list, SNR grid, seeding."""

    n_ports: int = 64
    n_chains: int = 4
    n_slots: int = 8
    sweep_count: int = 1
    grid_size: int = 128
    region_wavelengths: float = 3.5
    n_clusters: int = 3
    rays_per_cluster: int = 5
    angle_spread_deg: float = 5.0
    snr_db_list: tuple = (0.0, 10.0, 20.0)
    estimators: tuple = ("fas-che", "ls", "omp")
    rho: float = 0.5
    max_iterations: int = 100
    tolerance: float = 1e-6
    trials: int = 200
    base_seed: int = 0
    schedule_kind: str = "sequential"
    enforce_spacing: bool = False
    ber_symbols: int = 2000

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_db_list:
            raise ConfigurationError("snr_db_list must not be empty")
        if not self.estimators:
            raise ConfigurationError("estimators must not be empty")
        for name in self.estimators:
            if name not in KNOWN_ESTIMATORS:
                raise ConfigurationError(
                    f"unknown estimator {name!r}, expected one of {KNOWN_ESTIMATORS}")
        if len(set(self.estimators)) != len(self.estimators):
            raise ConfigurationError("duplicate estimator names")
        if self.schedule_kind not in SCHEDULE_KINDS:
            raise ConfigurationError(
                f"schedule_kind must be one of {SCHEDULE_KINDS}, got {self.schedule_kind!r}")
        if self.ber_symbols < 1:
            raise ConfigurationError(f"ber_symbols must be >= 1, got {self.ber_symbols}")


_LIST_FIELDS = {"snr_db_list": float, "estimators": str}
_BOOL_FIELDS = {"enforce_spacing"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse a flat ``key = value`` document into an :class:`ExperimentConfig`.

    Blank lines and ``#`` comments are ignored; unknown keys are hard errors.
    List values are comma-separated.
    """
    field_types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in field_types:
            raise ConfigurationError(f"line {lineno}: unknown config key {key!r}")
        if key in overrides:
            raise ConfigurationError(f"line {lineno}: duplicate config key {key!r}")
        overrides[key] = _parse_value(key, value, lineno)
    return ExperimentConfig(**overrides)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())


def _parse_value(key, value, lineno):
    try:
        if key in _LIST_FIELDS:
            items = [tok.strip() for tok in value.split(",") if tok.strip()]
            return tuple(_LIST_FIELDS[key](tok) for tok in items)
        if key in _BOOL_FIELDS:
            low = value.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        target = type(getattr(ExperimentConfig(), key))
        if target is int:
            return int(value)
        if target is float:
            return float(value)
        return value
    except ValueError as exc:
        raise ConfigurationError(f"line {lineno}: bad value for {key!r}: {exc}") from exc


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Per-trial seed: ``base_seed XOR (trial_index * golden-ratio mix)``, 64 bit."""
    return (base_seed ^ (trial_index * _SEED_MIX)) & _MASK64


def run_sweep(config: ExperimentConfig, dump_dir=None) -> list:
    """Monte-Carlo sweep over (snr, estimator, trial); rows in sorted order."""
    geometry = ArrayGeometry(config.n_ports, config.region_wavelengths)
    dictionary = build_dictionary(geometry, config.grid_size)
    records = []
    dumped_schedules = set()
    for snr_db in sorted(config.snr_db_list):
        for estimator in sorted(config.estimators):
            for trial in range(config.trials):
                record, estimate, schedule = _run_cell(
                    config, geometry, dictionary, snr_db, estimator, trial)
                records.append(record)
                if dump_dir is not None:
                    _dump_cell(dump_dir, config, snr_db, estimator, trial,
                               estimate, schedule, dumped_schedules)
    return records


def run_convergence(config: ExperimentConfig, dump_dir=None) -> list:
    """Per-iteration traces of the iterative estimators, one row per iteration."""
    if "fas-che" not in config.estimators:
        raise ConfigurationError("convergence study requires 'fas-che' among estimators")
    traced = [e for e in config.estimators if e in SAMV_ESTIMATORS]
    geometry = ArrayGeometry(config.n_ports, config.region_wavelengths)
    dictionary = build_dictionary(geometry, config.grid_size)
    rows = []
    dumped_schedules = set()
    for snr_db in sorted(config.snr_db_list):
        for estimator in sorted(traced):
            for trial in range(config.trials):
                _, estimate, schedule = _run_cell(config, geometry, dictionary,
                                                  snr_db, estimator, trial,
                                                  with_metrics=False)
                if dump_dir is not None:
                    _dump_cell(dump_dir, config, snr_db, estimator, trial,
                               estimate, schedule, dumped_schedules)
                seed = trial_seed(config.base_seed, trial)
                for rec in estimate.trace:
                    rows.append(ConvergenceRow(
                        estimator=estimator, n_chains=config.n_chains, snr_db=snr_db,
                        trial=trial, iteration=rec.iteration,
                        max_rel_change=rec.max_rel_change, sigma=rec.sigma,
                        nll=rec.nll, seed=seed))
    return rows


def run_region_sweep(config: ExperimentConfig, region_list, dump_dir=None) -> list:
    """Capacity rows over a list of region sizes (wavelengths).

    Each entry gets an independent block of trial seeds, so repeating a region
    size yields independent rows.
    """
    if not region_list:
        raise ConfigurationError("region_list must not be empty")
    rows = []
    for region_index, region in enumerate(region_list):
        geometry = ArrayGeometry(config.n_ports, float(region))
        dictionary = build_dictionary(geometry, config.grid_size)
        dumped_schedules = set()
        for snr_db in sorted(config.snr_db_list):
            for estimator in sorted(config.estimators):
                for trial in range(config.trials):
                    offset_trial = region_index * config.trials + trial
                    record, estimate, schedule = _run_cell(
                        config, geometry, dictionary, snr_db, estimator, trial,
                        trial_index=offset_trial, with_metrics=True)
                    if dump_dir is not None:
                        _dump_cell(dump_dir, config, snr_db, estimator, trial,
                                   estimate, schedule, dumped_schedules,
                                   prefix=f"region{region_index}_")
                    rows.append(RegionRow(
                        region_wavelengths=float(region), snr_db=snr_db,
                        estimator=estimator, trial=trial,
                        capacity_bits=record.capacity_bits, seed=record.seed))
    return rows


@dataclass(frozen=True)
class ConvergenceRow:
    estimator: str
    n_chains: int
    snr_db: float
    trial: int
    iteration: int
    max_rel_change: float
    sigma: float
    nll: float
    seed: int


@dataclass(frozen=True)
class RegionRow:
    region_wavelengths: float
    snr_db: float
    estimator: str
    trial: int
    capacity_bits: float
    seed: int


def _run_cell(config, geometry, dictionary, snr_db, estimator, trial,
              trial_index=None, with_metrics=True):
    """Execute one (snr, estimator, trial) cell from its own random stream."""
    with threadpool_limits(limits=1, user_api="blas"):
        # per-trial matrices are small; threaded BLAS adds sync overhead only
        return _run_cell_inner(config, geometry, dictionary, snr_db, estimator,
                               trial, trial_index, with_metrics)


def _run_cell_inner(config, geometry, dictionary, snr_db, estimator, trial,
                    trial_index, with_metrics):
    seed = trial_seed(config.base_seed, trial if trial_index is None else trial_index)
    rng = np.random.default_rng(seed)
    if config.schedule_kind == "sequential":
        schedule = sequential_schedule(config.n_ports, config.n_chains, config.n_slots)
    else:
        schedule = random_schedule(config.n_ports, config.n_chains, config.n_slots,
                                   enforce_spacing=config.enforce_spacing,
                                   geometry=geometry, rng=rng)
    selector = stack(schedule)
    channel = sample_ssc_channel(geometry, config.n_clusters, config.rays_per_cluster,
                                 np.deg2rad(config.angle_spread_deg), rng)
    sigma = sigma_for_snr(None, snr_db)
    obs = synthesize_observation(channel.h, selector, sigma, config.sweep_count, rng)
    eff = effective_dictionary(dictionary, selector)

    start = time.perf_counter()
    h_hat, iterations, estimate = _estimate_channel(
        estimator, config, obs, schedule, dictionary, eff, channel.h)
    elapsed_ms = (time.perf_counter() - start) * 1e3

    if with_metrics:
        record = TrialRecord(
            estimator=estimator, snr_db=snr_db, trial=trial,
            nmse=nmse(h_hat, channel.h),
            ber=ber_qpsk(h_hat, channel.h, snr_db, config.ber_symbols, rng),
            capacity_bits=capacity(h_hat, channel.h, snr_db),
            iterations=iterations, elapsed_ms=elapsed_ms, seed=seed)
    else:
        record = None
    return record, estimate, schedule


def _estimate_channel(name, config, obs, schedule, dictionary, eff, h_true):
    if name == "perfect-csi":
        return np.array(h_true, copy=True), 0, None
    if name == "ls":
        return ls_estimate(obs, schedule, BaselineConfig()), 0, None
    if name == "omp":
        budget = config.n_clusters * config.rays_per_cluster
        return omp_estimate(obs, eff, dictionary,
                            BaselineConfig(omp_max_atoms=budget)), 0, None
    if name in SAMV_ESTIMATORS:
        est_config = EstimatorConfig(
            rho=config.rho, max_iterations=config.max_iterations,
            tolerance=config.tolerance,
            update_rule="additive" if name == "fas-che" else "power")
        estimate = run(est_config, eff, obs.snapshots)
        h_hat = reconstruct_channel(estimate, eff, dictionary, obs.snapshots)
        return h_hat, estimate.iterations_used, estimate
    raise ConfigurationError(f"unknown estimator {name!r}")


def _dump_cell(dump_dir, config, snr_db, estimator, trial, estimate, schedule,
               dumped_schedules, prefix=""):
    os.makedirs(dump_dir, exist_ok=True)
    if estimate is not None:
        write_trace(estimate, os.path.join(
            dump_dir, f"{prefix}trace_snr{snr_db:g}_{estimator}_trial{trial}.tsv"))
    key = trial if config.schedule_kind == "random" else "all"
    if key not in dumped_schedules:
        dumped_schedules.add(key)
        name = "schedule.txt" if key == "all" else f"schedule_trial{trial}.txt"
        with open(os.path.join(dump_dir, prefix + name), "w") as fh:
            fh.write(schedule_to_text(schedule))


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def records_to_csv(records) -> str:
    """Serialize sweep records with the stable schema."""
    lines = [SWEEP_HEADER]
    for r in records:
        lines.append(",".join(_format(v) for v in (
            r.snr_db, r.estimator, r.trial, r.nmse, r.ber, r.capacity_bits,
            r.iterations, r.elapsed_ms, r.seed)))
    return "\n".join(lines) + "\n"


def convergence_to_csv(rows) -> str:
    lines = [CONVERGENCE_HEADER]
    for r in rows:
        lines.append(",".join(_format(v) for v in (
            r.estimator, r.n_chains, r.snr_db, r.trial, r.iteration,
            r.max_rel_change, r.sigma, r.nll, r.seed)))
    return "\n".join(lines) + "\n"


def region_to_csv(rows) -> str:
    lines = [REGION_HEADER]
    for r in rows:
        lines.append(",".join(_format(v) for v in (
            r.region_wavelengths, r.snr_db, r.estimator, r.trial,
            r.capacity_bits, r.seed)))
    return "\n".join(lines) + "\n"


def strip_elapsed_column(csv_text: str) -> str:
    """Drop the elapsed_ms column (the one field exempt from reproducibility)."""
    out = []
    for line in csv_text.splitlines():
        cells = line.split(",")
        del cells[7]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
