"""Input validation helpers shared by all modules."""

import numpy as np

from .exceptions import DimensionMismatchError, InvariantViolation

#: Absolute tolerance for symmetry / involution / projection identities.
TAU_SYM = 1e-8
#: Relative width of the neutral band used when classifying vectors.
TAU_DEF = 1e-10


def as_vector(x, dim, name="x"):
    """Return ``x`` as a 1-D float array of length ``dim``."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.shape[0] != dim:
        raise DimensionMismatchError(
            f"{name} must have shape ({dim},), got {v.shape}")
    return v


def as_matrix(a, shape=None, name="matrix"):
    """Return ``a`` as a finite 2-D float array, optionally checking its shape.

    ``shape`` entries set to ``None`` are not checked.
    """
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got ndim={m.ndim}")
    if shape is not None:
        for got, want in zip(m.shape, shape):
            if want is not None and got != want:
                raise DimensionMismatchError(
                    f"{name} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantViolation("finite", f"{name} has non-finite entries")
    return m


def as_square(a, name="matrix"):
    m = as_matrix(a, name=name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got {m.shape}")
    return m


def symmetric_part(m, name="matrix", tol=TAU_SYM, path=None):
    """Reject matrices farther than ``tol`` from symmetric, else symmetrize."""
    if m.size and np.max(np.abs(m - m.T)) > tol:
        raise InvariantViolation("symmetry", f"{name} is not symmetric", path)
    return 0.5 * (m + m.T)


def readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def rel_close(a, b, rtol):
    """``|a - b| <= rtol * max(|a|, |b|)`` elementwise, for scalars or arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(np.abs(a), np.abs(b))))
