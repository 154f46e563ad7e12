"""scikit-learn style wrapper around the question-mark map.

Only the pointwise map fits the transformer protocol; the quadrature and
identity tools have no fit/predict semantics and are not wrapped.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .minkowski_core import box_inverse, question_mark

__all__ = ["QuestionMarkTransformer"]


class QuestionMarkTransformer(TransformerMixin, BaseEstimator):
    """Elementwise x -> ?(x) on [0, 1]; inverse_transform applies the box function.

    clip: clip inputs into [0, 1] instead of raising.
    """

    def __init__(self, clip: bool = False):
        self.clip = clip

    def _check(self, X, reset):
        X = check_array(X, dtype=float, ensure_all_finite=True)
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        if self.clip:
            X = np.clip(X, 0.0, 1.0)
        elif np.any((X < 0) | (X > 1)):
            raise ValueError("inputs must lie in [0, 1]")
        return X

    def fit(self, X, y=None):
        self._check(X, reset=True)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        return question_mark(self._check(X, reset=False))

    def inverse_transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._check(X, reset=False)
        return np.vectorize(lambda u: float(box_inverse(u)))(X)
