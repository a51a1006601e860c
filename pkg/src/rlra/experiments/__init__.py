"""Experiment harness: instance generators, metrics, file I/O and drivers."""
from .config import ExperimentConfig, constraint_from_json, load_config
from .instances import add_gaussian_noise, gen_nonneg_instance, pick_pins, synth_low_rank_image
from .metrics import QualityMetrics, psnr, quality, snr
from .runners import (run_denoise, run_experiment, run_fixed_points, run_fsr_sdpr,
                      run_nonneg_experiment, run_rho_sweep, run_solve)
