import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from markov_entropy.estimators import ProfileBranchingFrequency, RegularEntropyEstimator, WalkEntropyEstimator
from markov_entropy.stats import bf_from_profile


def test_profile_transformer_bf_and_counts():
    X = np.array([[3, 1], [2, 2], [4, 0]])
    bf = ProfileBranchingFrequency().fit_transform(X)
    assert bf.ravel().tolist() == [0.5, 0.0, 1.0]
    counts = ProfileBranchingFrequency(output="counts").fit_transform(X)
    assert counts.tolist() == [[2.0, 2.0], [4.0, 0.0], [0.0, 4.0]]


def test_profile_transformer_checks():
    with pytest.raises(NotFittedError):
        ProfileBranchingFrequency().transform([[1, 1]])
    t = ProfileBranchingFrequency().fit([[1, 2, 3]])
    with pytest.raises(ValueError):
        t.transform([[1, 2]])
    with pytest.raises(ValueError):
        ProfileBranchingFrequency(output="nope").fit([[1, 2]])


def test_walk_estimator_matches_functional_pipeline():
    est = WalkEntropyEstimator(language="pf:3:2", walk_length=400, n_walks=5, random_state=3, n_jobs=1).fit()
    assert est.profiles_.shape == (5, 3)
    expected = [bf_from_profile(r).bf for r in est.profiles_]
    assert est.bf_.tolist() == expected
    assert est.mean_bf_ == pytest.approx(np.mean(expected))
    assert est.growth_lower_bound_ == pytest.approx(2 ** est.mean_bf_)
    again = clone(est).fit()
    assert np.array_equal(again.profiles_, est.profiles_)


def test_regular_estimator_and_params(golden_mean):
    est = RegularEntropyEstimator(language=golden_mean).fit()
    assert est.gr_ == pytest.approx(1.6180339887, abs=1e-8)
    assert est.mu_ == pytest.approx(2 / 3, abs=1e-8)
    assert RegularEntropyEstimator(language="pf:3:2:b=1").fit().mu_ == pytest.approx(1.0)
    assert clone(est).get_params()["delta"] == 1e-9


def test_transformer_in_pipeline():
    pipe = make_pipeline(ProfileBranchingFrequency())
    assert pipe.fit_transform([[3, 1]]).tolist() == [[0.5]]
