"""Finite-dimensional Krein spaces.

A Krein space here is R^n with the Euclidean inner product ``<x, y>`` and a
fundamental symmetry ``J`` (a symmetric involution).  The indefinite product
is ``[x, y] = <x, J y>`` and the J-product ``[x, y]_J = [x, J y]`` collapses
to the Euclidean one because ``J @ J = I``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import (TAU_DEF, TAU_SYM, as_square, as_vector, readonly,
                          symmetric_part)
from .exceptions import (InvariantViolation, NonOrthogonalBasisError,
                         ZeroVectorError)

__all__ = [
    "FundamentalSymmetry", "KreinSpace", "VectorKind",
    "indefinite_inner", "j_inner", "j_norm", "fundamental_projections",
    "make_symmetry_from_signature", "make_symmetry_conjugated",
    "classify_vector",
]


class FundamentalSymmetry:
    """Symmetric involution defining an indefinite metric.

    The input is checked for symmetry, replaced by its symmetric part and then
    checked for ``J @ J = I``.  Matrices whose spectrum is not ``{+1, -1}`` are
    rejected, never coerced.
    """

    __slots__ = ("_matrix", "_signature")

    def __init__(self, matrix, *, tol=TAU_SYM, path=None):
        m = as_square(matrix, name="J")
        m = symmetric_part(m, name="J", tol=tol, path=path)
        n = m.shape[0]
        if n and np.max(np.abs(m @ m - np.eye(n))) > tol:
            raise InvariantViolation("involution", "J @ J differs from identity", path)
        self._matrix = readonly(m)
        evals = np.linalg.eigvalsh(m) if n else np.empty(0)
        self._signature = (int(np.sum(evals > 0)), int(np.sum(evals < 0)))

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    @property
    def signature(self):
        """``(n_plus, n_minus)``: multiplicities of the eigenvalues +1 and -1."""
        return self._signature

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"FundamentalSymmetry(dim={self.dim}, signature={self.signature})"


@dataclass(frozen=True)
class KreinSpace:
    """R^dim equipped with the indefinite product ``[x, y] = <x, J y>``."""

    symmetry: FundamentalSymmetry

    def __post_init__(self):
        if not isinstance(self.symmetry, FundamentalSymmetry):
            object.__setattr__(self, "symmetry", FundamentalSymmetry(self.symmetry))

    @classmethod
    def euclidean(cls, dim):
        return cls(FundamentalSymmetry.identity(dim))

    @property
    def J(self):
        return self.symmetry.matrix

    @property
    def dim(self):
        return self.symmetry.dim

    @property
    def signature(self):
        return self.symmetry.signature


class VectorKind(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


def indefinite_inner(space, x, y):
    """Return ``[x, y] = <x, J y>``."""
    x = as_vector(x, space.dim, "x")
    y = as_vector(y, space.dim, "y")
    return float(x @ (space.J @ y))


def j_inner(space, x, y):
    """Return the positive definite product ``[x, y]_J = [x, J y]``."""
    y = as_vector(y, space.dim, "y")
    return indefinite_inner(space, x, space.J @ y)


def j_norm(space, x):
    return float(np.sqrt(max(j_inner(space, x, x), 0.0)))


def fundamental_projections(space):
    """Return ``(P_plus, P_minus) = ((I + J) / 2, (I - J) / 2)``."""
    eye = np.eye(space.dim)
    return 0.5 * (eye + space.J), 0.5 * (eye - space.J)


def make_symmetry_from_signature(n_plus, n_minus):
    """``diag(+1, ..., +1, -1, ..., -1)`` with the given multiplicities."""
    if n_plus < 0 or n_minus < 0 or n_plus + n_minus < 1:
        raise ValueError("signature must be nonnegative with n_plus + n_minus >= 1")
    return FundamentalSymmetry(np.diag([1.0] * n_plus + [-1.0] * n_minus))


def make_symmetry_conjugated(signature, basis, *, signs=None, tol=TAU_SYM):
    """``Q @ diag(+1, ..., -1) @ Q.T`` for an orthogonal ``Q``.

    ``signature`` is ``(n_plus, n_minus)``; pass ``signs`` instead to give an
    explicit +/-1 pattern, one per column of ``basis``.
    """
    q = as_square(basis, name="basis")
    n = q.shape[0]
    if n and np.max(np.abs(q.T @ q - np.eye(n))) > tol:
        raise NonOrthogonalBasisError("basis columns are not orthonormal")
    if signs is None:
        n_plus, n_minus = (int(s) for s in signature)
        signs = [1.0] * n_plus + [-1.0] * n_minus
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (n,):
        raise ValueError(f"signature describes {signs.size} signs, basis has {n} columns")
    return FundamentalSymmetry((q * signs) @ q.T)


def classify_vector(space, x, tol=TAU_DEF):
    """Classify ``x`` as J-positive, J-negative or neutral.

    The neutral band is ``|[x, x]| <= tol * ||x||_J**2`` so the result is
    invariant under positive scaling of ``x``.
    """
    x = as_vector(x, space.dim)
    norm2 = float(x @ x)
    if norm2 == 0.0:
        raise ZeroVectorError("cannot classify the zero vector")
    q = indefinite_inner(space, x, x)
    if q > tol * norm2:
        return VectorKind.POSITIVE
    if q < -tol * norm2:
        return VectorKind.NEGATIVE
    return VectorKind.NEUTRAL
