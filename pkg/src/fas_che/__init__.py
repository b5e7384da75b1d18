"""Channel estimation for fluid antenna systems.

A numpy/scipy library covering the full desk-scale pipeline: steering
dictionaries and sparse clustered channels, port-switching schedules, noisy
pilot synthesis, an iterative sparse covariance-fitting estimator with robust
reweighting, least-squares and matching-pursuit baselines, and a seeded
Monte-Carlo harness with CSV output.
"""

from .baselines import BaselineConfig, ls_estimate, omp_estimate
from .errors import ConfigurationError, NumericalError
from .harness import (ExperimentConfig, convergence_to_csv, load_config,
                      parse_config_text, records_to_csv, region_to_csv,
                      run_convergence, run_region_sweep, run_sweep, trial_seed)
from .metrics import TrialRecord, ber_qpsk, capacity, nmse, select_port
from .model import (ArrayGeometry, ChannelRealization, SteeringDictionary,
                    build_dictionary, sample_ssc_channel, steering_vector)
from .pilots import PilotObservation, sigma_for_snr, synthesize_observation
from .samv import (EffectiveDictionary, EstimatorConfig, SpectrumEstimate,
                   assemble_covariance, effective_dictionary, initialize,
                   negative_log_likelihood, reconstruct_channel,
                   robust_sample_covariance, run, samv_update, write_trace)
from .schedule import (StackedSelector, SwitchSchedule, SwitchValidation,
                       min_index_gap, random_schedule, schedule_from_text,
                       schedule_to_text, sequential_schedule, stack,
                       validate_switch_matrix)

__all__ = [
    "ArrayGeometry", "BaselineConfig", "ChannelRealization", "ConfigurationError",
    "EffectiveDictionary", "EstimatorConfig", "ExperimentConfig", "NumericalError",
    "PilotObservation", "SpectrumEstimate", "StackedSelector", "SteeringDictionary",
    "SwitchSchedule", "SwitchValidation", "TrialRecord",
    "assemble_covariance", "ber_qpsk", "build_dictionary", "capacity",
    "convergence_to_csv", "effective_dictionary", "initialize", "load_config",
    "ls_estimate", "min_index_gap", "negative_log_likelihood", "nmse",
    "omp_estimate", "parse_config_text", "random_schedule", "reconstruct_channel",
    "records_to_csv", "region_to_csv", "robust_sample_covariance", "run",
    "run_convergence", "run_region_sweep", "run_sweep", "sample_ssc_channel",
    "samv_update", "schedule_from_text", "schedule_to_text", "select_port",
    "sequential_schedule", "sigma_for_snr", "stack", "steering_vector",
    "synthesize_observation", "trial_seed", "validate_switch_matrix",
    "write_trace",
]

__version__ = "0.1.0"
