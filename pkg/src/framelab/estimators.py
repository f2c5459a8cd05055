"""scikit-learn style wrappers.

Rows are vectors, as usual for estimators: ``fit`` takes the frame vectors as
rows, ``transform`` maps sample rows to frame coefficients and
``inverse_transform`` reconstructs them through the canonical dual.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DimensionMismatchError
from .frames import DualVariant, FrameFamily, dual_frame, frame_operator
from .krein import FundamentalSymmetry, KreinSpace
from .wmetric import build_gram_model


def _check_features(est, X):
    X = check_array(X, dtype=float)
    if X.shape[1] != est.n_features_in_:
        raise DimensionMismatchError(
            f"X has {X.shape[1]} features, {type(est).__name__} was fitted with "
            f"{est.n_features_in_}")
    return X


class KreinFrameTransformer(TransformerMixin, BaseEstimator):
    """Analysis/synthesis with a frame for a Krein space.

    Parameters
    ----------
    J : array_like of shape (dim, dim), optional
        Fundamental symmetry; identity when omitted.
    variant : str, default="canonical_krein"
        Which canonical dual is used.  ``transform`` returns the partner
        coefficients ``<p_n, x>`` and ``inverse_transform`` sums them against the
        dual vectors, so ``inverse_transform(transform(X)) == X`` for every
        variant.

    Attributes
    ----------
    analysis_ : FrameAnalysis
    dual_ : DualFrame
    lower_bound_, upper_bound_ : float
        Optimal frame bounds.
    """

    def __init__(self, J=None, variant="canonical_krein"):
        self.J = J
        self.variant = variant

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        dim = X.shape[1]
        sym = FundamentalSymmetry.identity(dim) if self.J is None else FundamentalSymmetry(self.J)
        family = FrameFamily(KreinSpace(sym), X.T)
        self.analysis_ = frame_operator(family)
        self.analysis_.require_frame()
        self.dual_ = dual_frame(self.analysis_, DualVariant(self.variant))
        self.lower_bound_, self.upper_bound_ = self.analysis_.bounds
        self.n_features_in_ = dim
        self.n_frame_vectors_ = X.shape[0]
        return self

    def _product(self, vecs, X):
        j = self.analysis_.family.J
        if self.dual_.variant.product == "krein":
            return X @ j @ vecs
        return X @ j @ j @ vecs

    def transform(self, X):
        check_is_fitted(self, "dual_")
        X = _check_features(self, X)
        return self._product(self.dual_.partner, X)

    def inverse_transform(self, X):
        check_is_fitted(self, "dual_")
        C = check_array(X, dtype=float)
        if C.shape[1] != self.n_frame_vectors_:
            raise DimensionMismatchError(
                f"expected {self.n_frame_vectors_} coefficients per row, got {C.shape[1]}")
        return C @ self.dual_.vectors.T


class WMetricTransformer(TransformerMixin, BaseEstimator):
    """Map vectors between ``H_W`` and the Euclidean space.

    ``transform`` applies ``sqrt(|W|)^-1`` (Euclidean frame -> W-metric frame),
    ``inverse_transform`` applies ``sqrt(|W|)``.
    """

    def __init__(self, W=None):
        self.W = W

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        W = np.eye(X.shape[1]) if self.W is None else self.W
        self.model_ = build_gram_model(W)
        if self.model_.dim != X.shape[1]:
            raise DimensionMismatchError("W and X disagree on the dimension")
        self.condition_ = self.model_.condition
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        return _check_features(self, X) @ self.model_.inv_sqrt_absW

    def inverse_transform(self, X):
        check_is_fitted(self, "model_")
        return _check_features(self, X) @ self.model_.sqrt_absW
