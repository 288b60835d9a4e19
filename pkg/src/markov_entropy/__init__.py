"""Markov entropy and growth rates of repetition-free languages."""

from .lang import LanguageSpec, PowerSpec, SpecError, parse_language_spec, parse_language_sweep
from .power import PowerChecker
from .abelian import AbelianChecker
from .regular import (
    Pdfa,
    PdfaChecker,
    analyze_regular,
    approximation_sweep,
    build_power_approx_pdfa,
    growth_rate,
    load_pdfa,
    parse_pdfa,
    stationary_distribution,
)
from .tree import build_slice, exact_expected_bf, exact_mu_n, general_entropy_order_n
from .walker import WalkOptions, WalkProfile, batch_walks, make_checker, random_walk, split_results
from .stats import aggregate, bf_from_profile, binomial_diagnostic, expected_counts, profile_matrix

__all__ = [
    "AbelianChecker", "LanguageSpec", "Pdfa", "PdfaChecker", "PowerChecker", "PowerSpec",
    "SpecError", "WalkOptions", "WalkProfile", "aggregate", "analyze_regular",
    "approximation_sweep", "batch_walks", "bf_from_profile", "binomial_diagnostic",
    "build_power_approx_pdfa", "build_slice", "exact_expected_bf", "exact_mu_n",
    "expected_counts", "general_entropy_order_n", "growth_rate", "load_pdfa",
    "make_checker", "parse_language_spec", "parse_language_sweep", "parse_pdfa",
    "profile_matrix", "random_walk", "split_results", "stationary_distribution",
]
