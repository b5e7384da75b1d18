"""Experiment harness: config parsing, sweeps, CSV output, CLI, determinism."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fas_che import (ConfigurationError, ExperimentConfig, convergence_to_csv,
                     parse_config_text, records_to_csv, region_to_csv,
                     run_convergence, run_region_sweep, run_sweep, trial_seed)
from fas_che.cli import main
from fas_che.harness import SWEEP_HEADER, strip_elapsed_column

FAST = dict(n_ports=16, n_chains=4, n_slots=4, grid_size=32, trials=3,
            snr_db_list=(10.0,), max_iterations=15, ber_symbols=500)


class TestConfigParsing:

    def test_defaults_match_standard_scenario(self):
        config = ExperimentConfig()
        assert (config.n_ports, config.n_chains, config.n_slots) == (64, 4, 8)
        assert config.grid_size == 128
        assert config.region_wavelengths == 3.5
        assert (config.n_clusters, config.rays_per_cluster) == (3, 5)
        assert config.trials == 200

    def test_parse_round_trip(self):
        text = """
        # scenario
        n_ports = 32
        n_chains = 2
        snr_db_list = 0, 10
        estimators = fas-che, ls
        enforce_spacing = true
        tolerance = 1e-5
        schedule_kind = random
        """
        config = parse_config_text(text)
        assert config.n_ports == 32
        assert config.snr_db_list == (0.0, 10.0)
        assert config.estimators == ("fas-che", "ls")
        assert config.enforce_spacing is True
        assert config.tolerance == 1e-5
        assert config.schedule_kind == "random"

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigurationError, match="n_portz"):
            parse_config_text("n_portz = 8\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigurationError, match="duplicate"):
            parse_config_text("n_ports = 8\nn_ports = 16\n")

    def test_bad_value_is_reported(self):
        with pytest.raises(ConfigurationError, match="trials"):
            parse_config_text("trials = soon\n")

    def test_unknown_estimator_rejected(self):
        with pytest.raises(ConfigurationError, match="sece"):
            parse_config_text("estimators = fas-che, sece\n")

    def test_empty_snr_list_rejected(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("snr_db_list =\n")

    def test_zero_trials_rejected(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("trials = 0\n")

    def test_bad_schedule_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("schedule_kind = greedy\n")


class TestSeeding:

    def test_trial_seed_protocol(self):
        base = 77
        mix = 0x9E3779B97F4A7C15
        for trial in (0, 1, 13):
            assert trial_seed(base, trial) == (base ^ (trial * mix)) & ((1 << 64) - 1)

    def test_seed_fits_in_64_bits(self):
        assert trial_seed(2 ** 63, 2 ** 40) < 2 ** 64


class TestRunSweep:

    def test_single_cell_yields_single_row(self):
        config = ExperimentConfig(**{**FAST, "trials": 1, "estimators": ("ls",)})
        records = run_sweep(config)
        assert len(records) == 1
        csv_text = records_to_csv(records)
        lines = csv_text.strip().split("\n")
        assert lines[0] == SWEEP_HEADER
        assert len(lines) == 2

    def test_rerun_is_byte_identical_without_elapsed(self):
        config = ExperimentConfig(**{**FAST, "estimators": ("fas-che", "ls")})
        a = strip_elapsed_column(records_to_csv(run_sweep(config)))
        b = strip_elapsed_column(records_to_csv(run_sweep(config)))
        assert a == b

    def test_noiseless_full_coverage_ls_is_exact(self):
        config = ExperimentConfig(**{**FAST, "trials": 4,
                                     "snr_db_list": (np.inf,),
                                     "estimators": ("ls",)})
        records = run_sweep(config)
        assert all(r.nmse == 0.0 for r in records)

    def test_rows_sorted_by_snr_estimator_trial(self):
        config = ExperimentConfig(**{**FAST, "trials": 2,
                                     "snr_db_list": (20.0, 0.0),
                                     "estimators": ("ls", "fas-che")})
        records = run_sweep(config)
        keys = [(r.snr_db, r.estimator, r.trial) for r in records]
        assert keys == sorted(keys)

    def test_labels_are_configured_names(self):
        config = ExperimentConfig(**{**FAST, "estimators": ("omp", "perfect-csi")})
        records = run_sweep(config)
        assert {r.estimator for r in records} == {"omp", "perfect-csi"}

    def test_channel_shared_across_estimators(self):
        # perfect-csi NMSE is zero, so equality of capacity across estimators
        # with identical selection confirms the shared channel draw
        config = ExperimentConfig(**{**FAST, "trials": 2,
                                     "estimators": ("perfect-csi",)})
        records = run_sweep(config)
        again = run_sweep(config)
        assert [r.capacity_bits for r in records] == [r.capacity_bits for r in again]
        assert all(r.nmse == 0.0 for r in records)


class TestRunConvergence:

    def test_single_iteration_gives_one_row_per_trial(self):
        config = ExperimentConfig(**{**FAST, "max_iterations": 1,
                                     "estimators": ("fas-che",)})
        rows = run_convergence(config)
        assert len(rows) == config.trials
        assert all(r.iteration == 1 for r in rows)

    def test_requires_primary_estimator(self):
        config = ExperimentConfig(**{**FAST, "estimators": ("ls",)})
        with pytest.raises(ConfigurationError):
            run_convergence(config)

    def test_trace_rows_carry_finite_values(self):
        config = ExperimentConfig(**{**FAST, "trials": 2,
                                     "estimators": ("fas-che",)})
        rows = run_convergence(config)
        assert all(np.isfinite(r.nll) for r in rows)
        assert all(r.sigma >= 0 for r in rows)
        text = convergence_to_csv(rows)
        assert text.startswith("estimator,n_chains,snr_db,trial,iteration,")

    def test_traces_both_iterative_estimators(self):
        config = ExperimentConfig(**{**FAST, "trials": 1,
                                     "estimators": ("fas-che", "fas-che-enhanced", "ls")})
        rows = run_convergence(config)
        assert {r.estimator for r in rows} == {"fas-che", "fas-che-enhanced"}


class TestRunRegionSweep:

    def test_single_region_matches_sweep_capacity(self):
        config = ExperimentConfig(**{**FAST, "trials": 3, "estimators": ("ls",),
                                     "region_wavelengths": 1.0})
        sweep_records = run_sweep(config)
        region_rows = run_region_sweep(config, [1.0])
        assert len(region_rows) == len(sweep_records)
        for row, rec in zip(region_rows, sweep_records):
            assert row.capacity_bits == rec.capacity_bits
            assert row.seed == rec.seed

    def test_duplicate_regions_draw_independent_trials(self):
        config = ExperimentConfig(**{**FAST, "trials": 2, "estimators": ("ls",)})
        rows = run_region_sweep(config, [2.0, 2.0])
        first, second = rows[:2], rows[2:]
        assert {r.seed for r in first}.isdisjoint({r.seed for r in second})

    def test_csv_schema(self):
        config = ExperimentConfig(**{**FAST, "trials": 1, "estimators": ("ls",)})
        text = region_to_csv(run_region_sweep(config, [0.5, 1.0]))
        assert text.startswith("region_wavelengths,snr_db,estimator,trial,capacity_bits,seed")
        assert len(text.strip().split("\n")) == 3


CONFIG_TEXT = """
n_ports = 16
n_chains = 4
n_slots = 4
grid_size = 32
trials = 2
snr_db_list = 10
estimators = fas-che, ls
max_iterations = 10
ber_symbols = 200
"""


class TestCli:

    def write_config(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(CONFIG_TEXT)
        return str(path)

    def test_sweep_writes_csv(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "out.csv")
        assert main(["sweep", "--config", config, "--out", out]) == 0
        text = open(out).read()
        assert text.startswith(SWEEP_HEADER)
        assert len(text.strip().split("\n")) == 1 + 2 * 2

    def test_sweep_deterministic_across_runs(self, tmp_path):
        config = self.write_config(tmp_path)
        out_a, out_b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        assert main(["sweep", "--config", config, "--out", out_a]) == 0
        assert main(["sweep", "--config", config, "--out", out_b]) == 0
        strip = strip_elapsed_column
        assert strip(open(out_a).read()) == strip(open(out_b).read())

    def test_seed_and_trials_overrides(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "c.csv")
        assert main(["sweep", "--config", config, "--out", out,
                     "--seed", "99", "--trials", "1"]) == 0
        lines = open(out).read().strip().split("\n")
        assert len(lines) == 1 + 1 * 2
        assert lines[1].endswith(str(trial_seed(99, 0)))

    def test_bad_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("n_portz = 8\n")
        out = str(tmp_path / "never.csv")
        assert main(["sweep", "--config", str(bad), "--out", out]) == 2
        assert not os.path.exists(out)

    def test_missing_config_exits_2(self, tmp_path):
        out = str(tmp_path / "never.csv")
        assert main(["sweep", "--config", str(tmp_path / "no.cfg"), "--out", out]) == 2

    def test_numerical_failure_exits_3(self, tmp_path, monkeypatch):
        from fas_che.errors import NumericalError
        import fas_che.cli as cli

        def explode(config, dump_dir=None):
            raise NumericalError("covariance not positive definite (iteration 3)")

        monkeypatch.setattr(cli, "run_sweep", explode)
        config = self.write_config(tmp_path)
        out = str(tmp_path / "never.csv")
        assert main(["sweep", "--config", config, "--out", out]) == 3
        assert not os.path.exists(out)

    def test_convergence_subcommand(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "conv.csv")
        assert main(["convergence", "--config", config, "--out", out]) == 0
        assert open(out).read().startswith("estimator,n_chains,snr_db,trial,iteration")

    def test_region_sweep_subcommand(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "region.csv")
        assert main(["region-sweep", "--config", config, "--out", out,
                     "--regions", "0.5,1"]) == 0
        assert open(out).read().startswith("region_wavelengths,")

    def test_dump_trace_writes_schedule_and_traces(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "dump.csv")
        assert main(["sweep", "--config", config, "--out", out, "--dump-trace"]) == 0
        dump_dir = out + ".traces"
        files = os.listdir(dump_dir)
        assert "schedule.txt" in files
        traces = [f for f in files if f.startswith("trace_")]
        assert len(traces) == 2  # fas-che only, one per trial
        first = open(os.path.join(dump_dir, sorted(traces)[0])).read().strip().split("\n")
        assert all(len(line.split("\t")) == 4 for line in first)

    def test_module_entry_point(self, tmp_path):
        config = self.write_config(tmp_path)
        out = str(tmp_path / "mod.csv")
        proc = subprocess.run(
            [sys.executable, "-m", "fas_che", "sweep", "--config", config,
             "--out", out, "--trials", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert os.path.exists(out)
