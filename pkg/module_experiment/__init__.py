# module_experiment/__init__.py

from .dists import (DISTRIBUTIONS, REFERENCE_DISTRIBUTIONS, Exponential, Levy, LogNormal, Pareto, Rayleigh,
                    UtilityDistribution, cdf, parse_distribution, pdf, sample, sample_gas)
from .experiment import (CSV_COLUMNS, REFERENCE_BLOCK_SIZES, ExperimentConfig, TrialRecord, aggregate,
                         build_trial_instance, run_sweep, run_trial)
