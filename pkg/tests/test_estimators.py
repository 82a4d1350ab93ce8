import numpy as np
import pytest
from sklearn.base import clone

from corank.estimators import (
    CenterOutwardRanks,
    HotellingTest,
    MarginalWilcoxonTest,
    RandomSignsTest,
    SymmetrizedTest,
    make_method,
    make_named_test,
)
from corank.exceptions import ConfigurationError, InvalidInputError
from corank.location_tests import symmetrized_test


def test_transformer_fit_transform(rng):
    X = rng.standard_normal((42, 2))
    est = CenterOutwardRanks(grid="H", n_R=6)
    images = est.fit_transform(X)
    assert images.shape == (42, 2)
    np.testing.assert_array_equal(images, est.transform(X))
    assert est.ranks_.max() == 6 and est.n_features_in_ == 2
    with pytest.raises(InvalidInputError):
        est.transform(rng.standard_normal((42, 3)))


def test_transformer_symmetrized(rng):
    X = rng.standard_normal((30, 3))
    est = CenterOutwardRanks(grid="H*", symmetrize=True).fit(X)
    assert est.grid_.n == 60
    np.testing.assert_array_equal(est.codf_.mirror_images, -est.images_)
    with pytest.raises(ConfigurationError):
        CenterOutwardRanks(grid="H", symmetrize=True).fit(X)


def test_params_and_clone():
    est = SymmetrizedTest(grid="H*", n_R=5, score="sign", alpha=0.1)
    params = est.get_params()
    assert params["grid"] == "H*" and params["n_R"] == 5 and params["variance"] == "asymptotic"
    twin = clone(est)
    assert twin.get_params() == params and twin is not est


def test_estimator_matches_function(rng):
    X = rng.standard_normal((40, 2))
    est = SymmetrizedTest(grid="H*", score="wilcoxon").fit(X)
    assert est.statistic_ == symmetrized_test(X, "H*", 6, "wilcoxon").statistic
    assert est.reject_ == (est.pvalue_ < 0.05)


def test_random_state_replay(rng):
    X = rng.standard_normal((40, 2))
    a = RandomSignsTest(random_state=4).test(X)
    b = RandomSignsTest(random_state=4).test(X)
    assert a.statistic == b.statistic


def test_baseline_estimators(rng):
    X = rng.standard_normal((40, 3))
    assert HotellingTest().test(X).test_id == "HOT"
    assert MarginalWilcoxonTest(mu0=[1, 1, 1]).test(X + 1).p_value == MarginalWilcoxonTest().test(X).p_value


def test_factories():
    assert isinstance(make_method("ran"), RandomSignsTest)
    assert make_method("sym-vdw").score == "vdw"
    assert make_named_test("SYM-H-SIGN").get_params()["grid"] == "H*"
    assert make_named_test("ran-r1").grid == "R1"
    for bad in ("RAN-R2*", "SYM-R1", "XYZ"):
        with pytest.raises(ConfigurationError):
            make_named_test(bad)
    with pytest.raises(ConfigurationError):
        make_method("spatial")
