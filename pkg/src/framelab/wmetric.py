"""Krein spaces from a symmetric Gram operator ``W``.

The indefinite product is ``[f, g] = <f, W g>`` and, with the polar
decomposition ``W = J |W|``, the positive one is ``[f, g]_J = <f, |W| g>``.
``U = sqrt(|W|)`` is unitary from ``(R^n, [.,.]_J)`` onto ``(R^n, <.,.>)``, so
``{U^-1 k_n}`` is a frame for the W-metric space with the same bounds as the
Euclidean frame ``{k_n}``.  An untransferred Euclidean frame instead has
W-metric bounds that degrade as the spectrum of ``W`` approaches 0 or grows
without bound; :func:`degradation_sweep` measures that.

Everything here is computed from a single eigenfactorization of ``W``.
"""

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix, as_square, as_vector, readonly, symmetric_part
from .exceptions import (ConditioningWarning, InvariantViolation,
                         KernelNotTrivialError, NonMonotoneError,
                         NotAFrameError, EnvelopeViolation, ZeroWeightError)
from .frames import TAU_FRAME, FrameFamily, optimal_bounds
from .krein import FundamentalSymmetry, KreinSpace

__all__ = [
    "TAU_KER", "KAPPA_WARN", "ENVELOPE_RTOL",
    "GramModel", "WKreinSpace", "TransferredFrame", "DegradationSample",
    "DegradationCurve", "GridInfo", "CompletenessReport",
    "build_gram_model", "w_inner", "w_j_inner", "transfer_frame",
    "naive_frame_bounds", "naive_bounds_oracle", "degradation_sweep",
    "build_multiplication_gram", "completeness_certificate",
]

#: Kernel triviality threshold, relative to the largest |eigenvalue|.
TAU_KER = 1e-12
#: Condition number above which transfer_frame warns.
KAPPA_WARN = 1e8
ENVELOPE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class GramModel:
    """Spectral data of a symmetric Gram operator with trivial kernel.

    ``eigenvalues`` are sorted by increasing absolute value and
    ``eigenvectors`` holds the matching orthonormal columns.
    """

    W: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    J: FundamentalSymmetry
    absW: np.ndarray
    sqrt_absW: np.ndarray
    inv_sqrt_absW: np.ndarray

    @classmethod
    def from_eigendata(cls, eigenvalues, eigenvectors, W=None):
        lam = np.asarray(eigenvalues, dtype=float)
        v = as_matrix(eigenvectors, shape=(lam.size, lam.size), name="eigenvectors")
        order = np.argsort(np.abs(lam), kind="stable")
        lam, v = lam[order], v[:, order]
        scale = np.max(np.abs(lam)) if lam.size else 0.0
        if scale == 0.0 or np.abs(lam[0]) <= TAU_KER * scale:
            raise KernelNotTrivialError(
                f"smallest |eigenvalue| {abs(lam[0]) if lam.size else 0.0:.3e} is at or "
                f"below {TAU_KER:g} * {scale:.3e}")
        a = np.abs(lam)
        fn = lambda d: (v * d) @ v.T  # noqa: E731
        if W is None:
            W = fn(lam)
        return cls(W=readonly(W), eigenvalues=readonly(lam), eigenvectors=readonly(v),
                   J=FundamentalSymmetry(fn(np.sign(lam))), absW=readonly(fn(a)),
                   sqrt_absW=readonly(fn(np.sqrt(a))),
                   inv_sqrt_absW=readonly(fn(1.0 / np.sqrt(a))))

    @property
    def dim(self):
        return self.W.shape[0]

    @property
    def spectral_floor(self):
        return float(abs(self.eigenvalues[0]))

    @property
    def spectral_ceiling(self):
        return float(abs(self.eigenvalues[-1]))

    @property
    def condition(self):
        """``kappa = ceiling / floor``."""
        return self.spectral_ceiling / self.spectral_floor

    def with_eigenvalue(self, index, value):
        """Copy of the model with one eigenvalue replaced (same eigenvectors)."""
        lam = np.array(self.eigenvalues)
        lam[index] = value
        return GramModel.from_eigendata(lam, self.eigenvectors)


def build_gram_model(W):
    """Factor a symmetric ``W`` into its polar parts.

    Raises
    ------
    KernelNotTrivialError
        If some ``|eigenvalue| <= TAU_KER * max |eigenvalue|``.
    InvariantViolation
        If ``W`` is not symmetric.
    """
    w = symmetric_part(as_square(W, name="W"), name="W")
    lam, v = np.linalg.eigh(w)
    return GramModel.from_eigendata(lam, v, W=w)


@dataclass(frozen=True, eq=False)
class WKreinSpace:
    """The Krein space ``H_W``: ``[f, g] = <f, W g>``, ``[f, g]_J = <f, |W| g>``.

    ``space`` is the equivalent J-space reached through ``U = sqrt(|W|)``.
    """

    model: GramModel
    space: KreinSpace = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "space", KreinSpace(self.model.J))

    @classmethod
    def from_matrix(cls, W):
        return cls(build_gram_model(W))

    @property
    def dim(self):
        return self.model.dim


def _as_wspace(ws):
    if isinstance(ws, WKreinSpace):
        return ws
    if isinstance(ws, GramModel):
        return WKreinSpace(ws)
    return WKreinSpace.from_matrix(ws)


def w_inner(ws, f, g):
    ws = _as_wspace(ws)
    f = as_vector(f, ws.dim, "f")
    g = as_vector(g, ws.dim, "g")
    return float(f @ (ws.model.W @ g))


def w_j_inner(ws, f, g):
    ws = _as_wspace(ws)
    f = as_vector(f, ws.dim, "f")
    g = as_vector(g, ws.dim, "g")
    return float(f @ (ws.model.absW @ g))


def _synthesis(family, dim):
    if isinstance(family, FrameFamily):
        k = family.synthesis
    else:
        k = as_matrix(family, name="frame")
    return as_matrix(k, shape=(dim, None), name="frame")


def naive_frame_bounds(ws, family):
    """W-metric optimal bounds of a family taken as-is.

    These are the extreme constants in
    ``A [k, k]_J <= sum_n |<k_n, W k>|^2 <= B [k, k]_J``, i.e. the extreme
    eigenvalues of ``M = |W|^-1/2 W G W |W|^-1/2`` with ``G = K K^T``.  In the
    eigenbasis of ``W`` this is ``M = D G' D`` with the diagonal
    ``D = sign(lam) sqrt(|lam|)`` and ``G' = (V^T K)(V^T K)^T``.

    ``B`` is the top eigenvalue of ``M``.  ``A`` is taken as ``1 / lambda_max``
    of ``M^-1 = D^-1 G'^-1 D^-1``: a graded ``M`` has eigenvalues of very
    different size and ``eigh`` only resolves the small ones to ``eps * B``,
    while the top eigenvalue of the inverse is accurate to about
    ``eps * cond(G')`` whatever ``kappa(W)`` is.
    """
    ws = _as_wspace(ws)
    k = _synthesis(family, ws.dim)
    m = ws.model
    d = np.sign(m.eigenvalues) * np.sqrt(np.abs(m.eigenvalues))
    kv = m.eigenvectors.T @ k
    upper = float(np.linalg.eigvalsh(d[:, None] * (kv @ kv.T) * d[None, :])[-1])
    g_w, g_v = np.linalg.eigh(kv @ kv.T)
    if not (g_w[-1] > 0 and g_w[0] > TAU_FRAME * g_w[-1]):
        # not a Euclidean frame: M is singular
        c = d[:, None] * kv
        return float(max(np.linalg.eigvalsh(c @ c.T)[0], 0.0)), upper
    inv = (g_v / g_w) @ g_v.T
    lower = 1.0 / float(np.linalg.eigvalsh(inv / d[:, None] / d[None, :])[-1])
    return lower, upper


def naive_bounds_oracle(ws, family):
    """Same bounds as :func:`naive_frame_bounds` by a dense SVD.

    Substituting ``k = |W|^-1/2 u`` makes ``[k, k]_J = |u|^2``, so the bounds are
    the squared extreme singular values of ``u -> (<k_n, W |W|^-1/2 u>)_n``.
    ``W |W|^-1/2`` is assembled as one dense matrix from the model's eigenpairs
    (which define the model); multiplying ``W`` by ``|W|^-1/2`` instead, or
    re-diagonalizing a formed ``W``, loses about ``kappa`` digits.
    """
    ws = _as_wspace(ws)
    k = _synthesis(family, ws.dim)
    lam, v = ws.model.eigenvalues, ws.model.eigenvectors
    half = (v * (np.sign(lam) * np.sqrt(np.abs(lam)))) @ v.T
    s = np.linalg.svd(k.T @ half, compute_uv=False)
    smin = s[-1] if s.size >= ws.dim else 0.0
    return float(smin ** 2), float(s[0] ** 2)


def _euclidean_bounds(k):
    return optimal_bounds(FrameFamily(np.eye(k.shape[0]), k))


def _require_euclidean_frame(k):
    lower, upper = _euclidean_bounds(k)
    if not (upper > 0 and lower > TAU_FRAME * upper):
        raise NotAFrameError(f"family is not a Euclidean frame (A={lower:.3e}, B={upper:.3e})")
    return lower, upper


@dataclass(frozen=True, eq=False)
class TransferredFrame:
    """``{sqrt(|W|)^-1 k_n}`` as a frame for ``H_W``."""

    wspace: WKreinSpace
    synthesis: np.ndarray
    source_bounds: tuple
    bounds: tuple

    @property
    def condition(self):
        return self.wspace.model.condition

    def as_krein_family(self):
        """The family in ``U``-coordinates, a frame for ``(R^n, J)``."""
        return FrameFamily(self.wspace.space, self.wspace.model.sqrt_absW @ self.synthesis)


def transfer_frame(ws, family):
    """Transfer a Euclidean frame to ``H_W`` through ``U^-1 = sqrt(|W|)^-1``.

    Warns with :class:`ConditioningWarning` when ``kappa > KAPPA_WARN``.
    """
    ws = _as_wspace(ws)
    k = _synthesis(family, ws.dim)
    source = _require_euclidean_frame(k)
    kappa = ws.model.condition
    if kappa > KAPPA_WARN:
        warnings.warn(f"Gram operator condition number {kappa:.3e} exceeds {KAPPA_WARN:g}; "
                      "transferred bounds are accurate only to about 1e-16 * kappa",
                      ConditioningWarning, stacklevel=2)
    moved = ws.model.inv_sqrt_absW @ k
    return TransferredFrame(ws, readonly(moved), source, naive_frame_bounds(ws, moved))


@dataclass(frozen=True)
class DegradationSample:
    parameter: float
    lower_bound: float
    upper_bound: float
    envelope: float
    witness_norm: float
    witness_window: float
    witness_sum: float
    envelope_ok: bool
    witness_ok: bool

    @property
    def ok(self):
        return self.envelope_ok and self.witness_ok


@dataclass(frozen=True)
class DegradationCurve:
    """Measured W-metric bounds of a fixed Euclidean frame along a spectral sweep."""

    parameter_name: str
    samples: tuple
    family_bounds: tuple

    @property
    def direction(self):
        return "floor" if self.parameter_name == "spectral_floor" else "ceiling"

    def violations(self):
        return [s for s in self.samples if not s.ok]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["parameter", "lower_bound", "upper_bound", "envelope"])
        for s in self.samples:
            writer.writerow([repr(s.parameter), repr(s.lower_bound),
                             repr(s.upper_bound), repr(s.envelope)])
        return buf.getvalue()


def _check_parameters(parameters):
    p = np.asarray(parameters, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("need at least one sweep parameter")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise ValueError("sweep parameters must be finite and positive")
    steps = np.diff(p)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise NonMonotoneError("sweep parameters must be strictly monotone")
    return p


def degradation_sweep(family, direction="floor", parameters=(), base=None, *, strict=False):
    """Sweep one eigenvalue of ``W`` and record the naive W-metric bounds.

    For ``direction="floor"`` the smallest-|lambda| eigenvalue of ``base`` is set to
    ``sign * p``; for ``"ceiling"`` the largest one.  Each sample is checked
    against its envelope (``lower <= B p`` resp. ``upper >= A p``) and against
    the witness ``g = |W|^-1/2 h``, ``h`` the swept unit eigenvector, which has
    ``||g||_J = 1``, ``|| |W| g ||^2 = p`` and ``sum_n <k_n, W g>^2`` on the
    same side of the envelope.

    With ``strict=True`` any failed check raises :class:`EnvelopeViolation`.
    """
    if direction not in ("floor", "ceiling"):
        raise ValueError(f"direction must be 'floor' or 'ceiling', got {direction!r}")
    k = family.synthesis if isinstance(family, FrameFamily) else as_matrix(family, name="frame")
    lower_e, upper_e = _require_euclidean_frame(k)
    params = _check_parameters(parameters)
    if base is None:
        base = GramModel.from_eigendata(np.ones(k.shape[0]), np.eye(k.shape[0]))
    elif not isinstance(base, GramModel):
        base = build_gram_model(base)
    if base.dim != k.shape[0]:
        raise InvariantViolation("dimension", "base Gram model and frame differ in dimension")

    floor = direction == "floor"
    index = 0 if floor else base.dim - 1
    sign = 1.0 if base.eigenvalues[index] > 0 else -1.0
    h = base.eigenvectors[:, index]
    tol = ENVELOPE_RTOL
    samples = []
    for p in params:
        model = base.with_eigenvalue(index, sign * p)
        lower, upper = naive_frame_bounds(model, k)
        g = model.inv_sqrt_absW @ h
        g_norm = float(np.sqrt(g @ model.absW @ g))
        window = float(np.sum((model.absW @ g) ** 2))
        wsum = float(np.sum((k.T @ (model.W @ g)) ** 2))
        if floor:
            envelope = upper_e * p
            env_ok = lower <= envelope * (1 + tol) and wsum <= envelope * (1 + tol)
        else:
            envelope = lower_e * p
            env_ok = upper >= envelope * (1 - tol) and wsum >= envelope * (1 - tol)
        wit_ok = abs(g_norm - 1) <= tol and p * (1 - tol) <= window <= p * (1 + tol)
        sample = DegradationSample(float(p), lower, upper, float(envelope), g_norm,
                                   window, wsum, bool(env_ok), bool(wit_ok))
        if strict and not sample.ok:
            raise EnvelopeViolation(f"sample at p={p:g} violates its envelope: {sample}")
        samples.append(sample)
    name = "spectral_floor" if floor else "spectral_ceiling"
    return DegradationCurve(name, tuple(samples), (lower_e, upper_e))


@dataclass(frozen=True, eq=False)
class GridInfo:
    """Sample grid of a discretized ``L2(mu)``.

    Functions are sampled values ``f_i``; orthonormal coordinates are
    ``sqrt(mu_i) f_i``.  Both conversions act on the first axis.
    """

    points: np.ndarray
    mu: np.ndarray
    phi: np.ndarray

    def to_coordinates(self, f):
        f = np.asarray(f, dtype=float)
        return np.sqrt(self.mu).reshape((-1,) + (1,) * (f.ndim - 1)) * f

    def from_coordinates(self, c):
        c = np.asarray(c, dtype=float)
        return c / np.sqrt(self.mu).reshape((-1,) + (1,) * (c.ndim - 1))


def build_multiplication_gram(grid, weights, phi):
    """Gram model of multiplication by ``phi`` on a weighted sample grid.

    In the ``sqrt(mu)``-scaled coordinates the ``L2(mu)`` product is Euclidean and
    the Gram operator is ``diag(phi)``, so transferring a frame divides each
    sample by ``sqrt(|phi|)``.
    """
    t = np.asarray(grid, dtype=float).ravel()
    mu = np.asarray(weights, dtype=float).ravel()
    ph = np.asarray(phi, dtype=float).ravel()
    if not (t.size == mu.size == ph.size) or t.size == 0:
        raise InvariantViolation("grid", "points, mu and phi must be nonempty and equally long")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(mu)) and np.all(np.isfinite(ph))):
        raise InvariantViolation("finite", "grid data must be finite")
    if np.any(np.diff(t) <= 0):
        raise InvariantViolation("sorted", "grid points must be strictly increasing")
    if np.any(mu <= 0):
        raise InvariantViolation("positive_measure", "measure weights must be positive")
    scale = np.max(np.abs(ph))
    if scale == 0 or np.any(np.abs(ph) <= TAU_KER * scale):
        raise ZeroWeightError("phi vanishes (numerically) at some grid point")
    model = GramModel.from_eigendata(ph, np.eye(ph.size), W=np.diag(ph))
    return model, GridInfo(readonly(t), readonly(mu), readonly(ph))


@dataclass(frozen=True)
class CompletenessReport:
    spectral_floor: float
    spectral_ceiling: float
    condition: float
    completion_divergent: bool
    domain_restriction: bool
    floor_threshold: float
    ceiling_threshold: float

    @property
    def flags(self):
        out = []
        if self.completion_divergent:
            out.append("completion-divergent")
        if self.domain_restriction:
            out.append("domain-restriction")
        return out

    def as_dict(self):
        return {
            "spectral_floor": self.spectral_floor,
            "spectral_ceiling": self.spectral_ceiling,
            "condition": self.condition,
            "flags": self.flags,
            "floor_threshold": self.floor_threshold,
            "ceiling_threshold": self.ceiling_threshold,
            "note": ("finite dimension: the space is always complete in the J-norm; "
                     "flags mark regimes where an infinite-dimensional analogue "
                     "would need completion or a domain restriction"),
        }


def completeness_certificate(model, floor_threshold=1e-6, ceiling_threshold=1e6):
    """Report spectral extremes of ``W`` and flag degenerate regimes.

    ``completion-divergent`` is set when the floor is below ``floor_threshold``;
    ``domain-restriction`` when the ceiling exceeds ``ceiling_threshold``.
    """
    if not isinstance(model, GramModel):
        model = build_gram_model(model)
    eps, lam = model.spectral_floor, model.spectral_ceiling
    return CompletenessReport(eps, lam, lam / eps, eps < floor_threshold,
                              lam > ceiling_threshold, floor_threshold, ceiling_threshold)
