"""scikit-learn style wrappers around the walk and automaton pipelines.

These are conveniences for notebooks and pipelines; the functional API in
the other modules is the primary interface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import lang, regular, stats, walker


class ProfileBranchingFrequency(TransformerMixin, BaseEstimator):
    """Map DFS profiles ``(n_walks, sigma)`` to branching frequencies.

    Parameters
    ----------
    output : {"bf", "counts"}
        ``"bf"`` returns one column of branching frequencies, ``"counts"``
        the solved child-count tallies ``c`` (one column per child count).
    """

    def __init__(self, output: str = "bf"):
        self.output = output

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if X.shape[1] < 2:
            raise ValueError("profiles need at least 2 ranks")
        if self.output not in ("bf", "counts"):
            raise ValueError(f"unknown output {self.output!r}")
        self.n_features_in_ = X.shape[1]
        self.profile_matrix_ = stats.profile_matrix(X.shape[1])
        return self

    def transform(self, X):
        check_is_fitted(self, "profile_matrix_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} ranks, got {X.shape[1]}")
        if self.output == "counts":
            return np.array([stats.expected_counts(row) for row in X])
        return np.array([[stats.bf_from_profile(row).bf] for row in X])


class WalkEntropyEstimator(BaseEstimator):
    """Monte Carlo Markov entropy from a batch of random DFS walks.

    ``fit`` ignores ``X``; the language, walk length and seeds fully
    determine the result.

    Attributes
    ----------
    profiles_ : ndarray of shape (n_ok, sigma)
    bf_ : ndarray of shape (n_ok,)
    summary_ : BatchSummary
    mean_bf_ : float
    growth_lower_bound_ : float
    failures_ : list of WalkFailure
    """

    def __init__(self, language="pf:3:2", walk_length=10_000, n_walks=100, random_state=0,
                 stall_threshold=None, n_jobs=None):
        self.language = language
        self.walk_length = walk_length
        self.n_walks = n_walks
        self.random_state = random_state
        self.stall_threshold = stall_threshold
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        spec = self.language
        if isinstance(spec, str):
            spec = lang.parse_language_spec(spec)
        opts = walker.WalkOptions(stall_threshold=self.stall_threshold)
        results = walker.batch_walks(spec, self.walk_length, self.n_walks, self.random_state, opts, self.n_jobs)
        profiles, self.failures_ = walker.split_results(results)
        if not profiles:
            raise RuntimeError("no walk succeeded")
        estimates = [stats.bf_from_profile(p.r, p.flagged) for p in profiles]
        self.profiles_ = np.array([p.r for p in profiles])
        self.bf_ = np.array([e.bf for e in estimates])
        self.summary_ = stats.aggregate(estimates)
        self.mean_bf_ = self.summary_.mean_bf
        self.growth_lower_bound_ = self.summary_.mean_2_pow_bf
        return self


class RegularEntropyEstimator(BaseEstimator):
    """Exact growth rate and Markov entropy of a regular language.

    Parameters
    ----------
    language : str, LanguageSpec or Pdfa
        A period-bounded power spec (``pf:3:2:b=6``) or an automaton.
    delta : float
        Convergence tolerance of the iterative solvers.
    """

    def __init__(self, language="pf:3:2:b=2", delta=1e-9, minimize=False):
        self.language = language
        self.delta = delta
        self.minimize = minimize

    def fit(self, X=None, y=None):
        a = self.language
        if isinstance(a, str):
            a = lang.parse_language_spec(a)
        if isinstance(a, lang.LanguageSpec):
            a = regular.build_power_approx_pdfa(a)
        report = regular.analyze_regular(a, self.delta, minimized=self.minimize)
        self.report_ = report
        self.gr_ = float(report.gr)
        self.H_ = float(report.H)
        self.mu_ = float(report.mu)
        return self
