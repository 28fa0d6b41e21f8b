"""Scikit-learn style wrappers around the sketch and recovery primitives.

SubgaussianProjection is a fit/transform dimensionality reducer whose
projection matrix is the seeded sketch; ProjectiveLandweberRecovery maps
sketched measurements back to model-set estimates row by row.  Both follow
the estimator contract (get_params/set_params, fitted attributes with
trailing underscores), so they compose with pipelines and grid search.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .recovery import RecoveryProblem, landweber_recover
from .sets import SparseSet
from .sketch import Sketch, SketchSpec, build_sketch

__all__ = ["SubgaussianProjection", "ProjectiveLandweberRecovery"]


class SubgaussianProjection(TransformerMixin, BaseEstimator):
    """Seeded subgaussian random projection to n_components dimensions.

    Parameters
    ----------
    n_components : int
        Target dimension m.
    family : str
        Sketch family: "gaussian", "rademacher", or "achlioptas".
    seed : int
        Seed; the projection is a pure function of (family, seed, shapes).
    q : float or None
        Sparsity parameter for the achlioptas family.

    Attributes
    ----------
    sketch_ : Sketch
        The underlying sketch built during fit.
    components_ : ndarray of shape (n_components, n_features)
        Projection matrix, rows scaled by 1/sqrt(n_components).
    """

    def __init__(self, n_components=2, family="gaussian", seed=0, q=None):
        self.n_components = n_components
        self.family = family
        self.seed = seed
        self.q = q

    def fit(self, X, y=None):
        X = check_array(X)
        self.n_features_in_ = X.shape[1]
        spec = SketchSpec(self.family, self.n_components, self.n_features_in_,
                          self.seed, self.q)
        self.sketch_ = build_sketch(spec)
        self.components_ = self.sketch_.matrix
        return self

    def transform(self, X):
        check_is_fitted(self, "sketch_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, fit saw {self.n_features_in_}"
            )
        return X @ self.components_.T


class ProjectiveLandweberRecovery(TransformerMixin, BaseEstimator):
    """Row-wise sparse recovery from sketched measurements.

    transform maps an array of measurement rows (k, m) to estimate rows
    (k, n) via hard-thresholded Landweber iterations against the given
    sketch.  fit only validates; the "training" is the sketch itself.

    Parameters
    ----------
    sketch : Sketch
        The measurement operator.
    sparsity : int
        Sparsity level s of the model set.
    step, max_iters, tol : float, int, float
        Iteration controls passed through to the solver.
    """

    def __init__(self, sketch=None, sparsity=1, step=1.0, max_iters=100, tol=1e-10):
        self.sketch = sketch
        self.sparsity = sparsity
        self.step = step
        self.max_iters = max_iters
        self.tol = tol

    def fit(self, X=None, y=None):
        if not isinstance(self.sketch, Sketch):
            raise ValueError("sketch must be a built Sketch instance")
        if not 1 <= self.sparsity <= self.sketch.spec.n:
            raise ValueError("need 1 <= sparsity <= sketch.spec.n")
        self.model_ = SparseSet(self.sketch.spec.n, self.sparsity)
        return self

    def transform(self, Y):
        check_is_fitted(self, "model_")
        Y = check_array(Y)
        if Y.shape[1] != self.sketch.spec.m:
            raise ValueError(
                f"Y has {Y.shape[1]} columns, sketch produces {self.sketch.spec.m}"
            )
        out = np.empty((Y.shape[0], self.sketch.spec.n))
        self.results_ = []
        for i, y in enumerate(Y):
            res = landweber_recover(
                RecoveryProblem(self.sketch, y, self.model_),
                step=self.step, max_iters=self.max_iters, tol=self.tol,
            )
            self.results_.append(res)
            out[i] = res.estimate
        return out
