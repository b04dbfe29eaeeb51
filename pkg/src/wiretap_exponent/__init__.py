"""Exact correct-decoding exponents of the wiretap channel decoder.

The package computes the random-coding exponent of the eavesdropper's
probability of correctly identifying the transmitted sub-code, as a
function of the total rate R1 and the sub-code rate R2, for finite-alphabet
memoryless channels and for the power-constrained Gaussian channel.  It
also characterizes the rate regions where the exponent vanishes and where
it equals the blind-guessing exponent R1 - R2, and validates the
asymptotic formulas against finite-blocklength simulation of the actual
coding ensemble.
"""
from .channels import (ChannelSpec, ConditionalChannel, DegradednessResult,
                       Distribution, Dmc, check_degraded, entropy,
                       load_channel_spec, mutual_information,
                       parse_channel_spec, weighted_divergence)
from .errors import (BudgetExceededError, ChannelFileError, SolverError,
                     WiretapError)
from .exponent import (ExponentResult, ExponentSolver, ParetoCurve, RatePair,
                       bsc_exponent_closed_form, exponent_r2_zero,
                       exponent_rep1, exponent_rep2, gamma_dmc,
                       inner_lagrangian_min, pareto_curve, solve_exponent)
from .gaussian import (GaussianOptimum, GaussianSpec, gamma_gaussian,
                       gaussian_divergence_term, gaussian_exponent,
                       gaussian_mutual_info, sigma_z_star)
from .security import (FullSecurityInterval, SecurityAnalysis,
                       classify_rate_point, compute_qstar,
                       full_security_interval)
from .simulate import (EnsembleSpec, SimulationResult, TypeEnumExponent,
                       decoder_log_score, decoder_score, estimate_ensemble_pc,
                       exact_pc_for_codebook, quantize_composition,
                       sample_codebook, type_enum_exponent)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "ChannelFileError", "ChannelSpec",
    "ConditionalChannel", "DegradednessResult", "Distribution", "Dmc",
    "EnsembleSpec", "ExponentResult", "ExponentSolver",
    "FullSecurityInterval", "GaussianOptimum", "GaussianSpec", "ParetoCurve",
    "RatePair", "SecurityAnalysis", "SimulationResult", "SolverError",
    "TypeEnumExponent", "WiretapError", "bsc_exponent_closed_form",
    "check_degraded", "classify_rate_point", "compute_qstar",
    "decoder_log_score", "decoder_score", "entropy", "estimate_ensemble_pc",
    "exact_pc_for_codebook", "exponent_r2_zero", "exponent_rep1",
    "exponent_rep2", "full_security_interval", "gamma_dmc", "gamma_gaussian",
    "gaussian_divergence_term", "gaussian_exponent", "gaussian_mutual_info",
    "inner_lagrangian_min", "load_channel_spec", "mutual_information",
    "pareto_curve", "parse_channel_spec", "quantize_composition",
    "sample_codebook", "sigma_z_star", "solve_exponent", "type_enum_exponent",
]
