"""Exact analysis of sequential social learning under Byzantine attack."""
from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .adversary import AdversaryProfile, derive_attack_constants
from .cascade_analysis import CascadeReport, HypothesisNotMetError, cascade_report
from .config import ConfigError, ScenarioConfig, load_config, parse_config
from .fusion_engine import (
    AbsoluteContinuityError,
    NormalizationError,
    PropagationResult,
    StateSpaceError,
    propagate,
)
from .metrics_sweeps import InfeasibleAlphaError, calibrate_tau0, exact_rates, sweep
from .montecarlo import estimate_rates, simulate_batch, simulate_run
from .signal_model import MixtureScenario, SignalModel, build_binomial_mixture
from .social_kernel import CountKernel, FullHistoryKernel, SocialKernel, WindowKernel, make_kernel

__all__ = [
    "AbsoluteContinuityError", "AdversaryProfile", "CascadeReport", "ConfigError", "CountKernel",
    "FullHistoryKernel", "HypothesisNotMetError", "InfeasibleAlphaError", "MixtureScenario",
    "NormalizationError", "PropagationResult", "ScenarioConfig", "SignalModel", "SocialKernel",
    "StateSpaceError", "WindowKernel", "build_binomial_mixture", "calibrate_tau0", "cascade_report",
    "derive_attack_constants", "estimate_rates", "exact_rates", "load_config", "make_kernel",
    "parse_config", "propagate", "simulate_batch", "simulate_run", "sweep",
]
