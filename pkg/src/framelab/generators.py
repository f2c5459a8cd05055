"""Seeded random and named test families.

Every random constructor takes a ``numpy.random.Generator``; the suites and the
CLI use ``numpy.random.default_rng(seed)`` (PCG64), which is reproducible
across platforms.
"""

import numpy as np

from .frames import FrameFamily
from .krein import FundamentalSymmetry, KreinSpace


def mercedes_frame():
    """Three unit vectors at 120 degrees in R^2, as a 2 x 3 synthesis matrix."""
    angles = np.pi / 2 + 2 * np.pi * np.arange(3) / 3
    return np.vstack([np.cos(angles), np.sin(angles)])


def random_orthogonal(rng, n):
    """Haar-distributed orthogonal matrix (QR with sign correction)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_signs(rng, n, n_plus=None):
    if n_plus is None:
        n_plus = int(rng.integers(0, n + 1))
    return np.array([1.0] * n_plus + [-1.0] * (n - n_plus))


def random_symmetry(rng, dim, n_plus=None):
    """``Q diag(signs) Q^T`` with Haar ``Q``; returns ``(J, Q, signs)``."""
    q = random_orthogonal(rng, dim)
    signs = random_signs(rng, dim, n_plus)
    return FundamentalSymmetry((q * signs) @ q.T), q, signs


def random_frame(rng, dim, m, J=None):
    """Gaussian ``dim x m`` family (a frame almost surely when ``m >= dim``)."""
    space = KreinSpace(FundamentalSymmetry.identity(dim) if J is None else J)
    return FrameFamily(space, rng.standard_normal((dim, m)))


def random_jonb(rng, q, signs):
    """A J-orthonormal basis that is also Euclidean-orthonormal.

    Rotates inside each eigenspace of ``J = q diag(signs) q^T``, permutes the
    columns and flips signs at random.
    """
    dim = q.shape[0]
    pos, neg = np.flatnonzero(signs > 0), np.flatnonzero(signs < 0)
    basis = np.empty((dim, dim))
    basis[:, pos] = q[:, pos] @ random_orthogonal(rng, pos.size) if pos.size else q[:, pos]
    basis[:, neg] = q[:, neg] @ random_orthogonal(rng, neg.size) if neg.size else q[:, neg]
    basis = basis[:, rng.permutation(dim)]
    return basis * rng.choice([-1.0, 1.0], size=dim)


def random_commuting_projection(rng, q, signs):
    """Orthogonal projection onto a random sum of J-eigenvectors (commutes with J)."""
    dim = q.shape[0]
    basis = random_jonb(rng, q, signs)
    mask = rng.integers(0, 2, size=dim).astype(float)
    return (basis * mask) @ basis.T


def random_gram(rng, dim, kappa_max=1e6, n_plus=None):
    """Symmetric ``W`` with log-uniform |eigenvalues| and ``Lambda / eps <= kappa_max``.

    The extremes ``1/sqrt(kappa_max)`` and ``sqrt(kappa_max)`` are always present
    when ``dim >= 2``.
    """
    q = random_orthogonal(rng, dim)
    half = 0.5 * np.log10(kappa_max)
    mags = 10.0 ** rng.uniform(-half, half, size=dim)
    if dim >= 2:
        mags[0], mags[1] = 10.0 ** -half, 10.0 ** half
    signs = rng.permutation(random_signs(rng, dim, n_plus))
    return (q * (signs * mags)) @ q.T
