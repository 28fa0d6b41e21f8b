import numpy as np
import pytest

from sklearn.pipeline import Pipeline

from sketchlab.estimators import ProjectiveLandweberRecovery, SubgaussianProjection
from sketchlab.sketch import SketchSpec, build_sketch


def test_projection_matches_library_sketch():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 32))
    est = SubgaussianProjection(n_components=8, family="rademacher", seed=5)
    Z = est.fit_transform(X)
    sk = build_sketch(SketchSpec("rademacher", 8, 32, 5))
    assert np.array_equal(Z, X @ sk.matrix.T)
    assert est.components_.shape == (8, 32)
    assert est.n_features_in_ == 32


def test_projection_rejects_mismatched_widths():
    rng = np.random.default_rng(1)
    est = SubgaussianProjection(n_components=4).fit(rng.standard_normal((5, 16)))
    with pytest.raises(ValueError):
        est.transform(rng.standard_normal((5, 8)))


def test_projection_get_params_round_trip():
    est = SubgaussianProjection(n_components=6, family="achlioptas", seed=2, q=3.0)
    params = est.get_params()
    assert params["n_components"] == 6 and params["q"] == 3.0
    clone = SubgaussianProjection(**params)
    X = np.random.default_rng(3).standard_normal((4, 10))
    assert np.array_equal(clone.fit_transform(X), est.fit_transform(X))


def test_recovery_estimator_round_trip():
    sk = build_sketch(SketchSpec("gaussian", 24, 48, 7))
    rng = np.random.default_rng(4)
    X = np.zeros((5, 48))
    for row in X:
        row[rng.choice(48, 2, replace=False)] = rng.standard_normal(2)
    Y = X @ sk.matrix.T
    est = ProjectiveLandweberRecovery(sketch=sk, sparsity=2, step=0.65).fit()
    Xhat = est.transform(Y)
    assert np.max(np.abs(Xhat - X)) < 1e-7
    assert len(est.results_) == 5
    assert all(r.status == "converged" for r in est.results_)


def test_recovery_estimator_validation():
    with pytest.raises(ValueError):
        ProjectiveLandweberRecovery(sketch=None, sparsity=2).fit()
    sk = build_sketch(SketchSpec("gaussian", 4, 8, 0))
    with pytest.raises(ValueError):
        ProjectiveLandweberRecovery(sketch=sk, sparsity=9).fit()
    est = ProjectiveLandweberRecovery(sketch=sk, sparsity=2).fit()
    with pytest.raises(ValueError):
        est.transform(np.zeros((3, 7)))


def test_projection_composes_in_a_pipeline():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((10, 40))
    pipe = Pipeline([("project", SubgaussianProjection(n_components=12, seed=1))])
    Z = pipe.fit_transform(X)
    assert Z.shape == (10, 12)
