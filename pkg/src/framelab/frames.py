"""Frames for finite-dimensional Krein spaces.

A family ``{k_n}`` is stored as the columns of a ``dim x m`` synthesis matrix
``K``.  It is a frame when

    A ||k||_J^2 <= sum_n |[k_n, k]|^2 <= B ||k||_J^2

for some ``0 < A <= B``.  The frame operator is ``S = T J~ T*`` with
``S k = sum_n [k_n, k] k_n``; its companion ``S1 = S J`` is symmetric positive
semidefinite and its extreme eigenvalues are the optimal bounds.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from ._validation import (TAU_DEF, TAU_SYM, as_matrix, as_vector, readonly,
                          symmetric_part)
from .exceptions import (CommutationFailureError, DimensionMismatchError,
                         InvariantViolation, NotAFrameError,
                         ProjectionInvalidError)
from .krein import FundamentalSymmetry, KreinSpace, fundamental_projections

__all__ = [
    "TAU_FRAME", "TAU_TIGHT", "TAU_REC", "TAU_ZERO",
    "FrameFamily", "FrameAnalysis", "DualVariant", "DualFrame",
    "Decomposition", "FourWayBounds", "TightJONBCheck", "SubspaceFrame",
    "JFrameSplit",
    "preframe_apply", "preframe_adjoint", "analysis_matrix", "frame_operator",
    "optimal_bounds", "optimal_bounds_oracle", "four_way_bounds",
    "frame_decompose", "dual_frame", "exactness_check", "tight_jonb_check",
    "split_frame", "merge_frames", "jframe_split",
]

#: Frame validity threshold, relative to the upper bound B.
TAU_FRAME = 1e-10
TAU_TIGHT = 1e-8
TAU_REC = 1e-8
#: Zero-column threshold in jframe_split, relative to the largest column norm.
TAU_ZERO = 1e-12


class FrameFamily:
    """An ordered finite family of vectors in a Krein space.

    Parameters
    ----------
    space : KreinSpace or array_like
        Ambient space, or its fundamental symmetry.
    synthesis : array_like, shape (dim, m)
        Frame vectors as columns.
    domain_symmetry : FundamentalSymmetry or array_like, optional
        Symmetry on the coefficient space (identity by default).
    """

    __slots__ = ("space", "synthesis", "domain_symmetry")

    def __init__(self, space, synthesis, domain_symmetry=None):
        if not isinstance(space, KreinSpace):
            space = KreinSpace(space)
        k = as_matrix(synthesis, shape=(space.dim, None), name="synthesis")
        m = k.shape[1]
        if m < 1 and space.dim > 0:
            raise InvariantViolation("nonempty", "a frame family needs at least one vector")
        if domain_symmetry is None:
            domain_symmetry = FundamentalSymmetry.identity(m)
        elif not isinstance(domain_symmetry, FundamentalSymmetry):
            domain_symmetry = FundamentalSymmetry(domain_symmetry)
        if domain_symmetry.dim != m:
            raise DimensionMismatchError(
                f"domain symmetry has size {domain_symmetry.dim}, family has {m} vectors")
        self.space = space
        self.synthesis = readonly(k)
        self.domain_symmetry = domain_symmetry

    @classmethod
    def from_vectors(cls, space, vectors, domain_symmetry=None):
        """Build a family from a sequence of vectors (one per row)."""
        if not isinstance(space, KreinSpace):
            space = KreinSpace(space)
        rows = np.asarray(vectors, dtype=float).reshape(-1, space.dim)
        return cls(space, rows.T, domain_symmetry)

    @property
    def dim(self):
        return self.space.dim

    @property
    def m(self):
        return self.synthesis.shape[1]

    @property
    def J(self):
        return self.space.J

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"FrameFamily(dim={self.dim}, m={self.m}, signature={self.space.signature})"

    def vector(self, n):
        return self.synthesis[:, n]

    def reflected(self):
        """The family ``{J k_n}`` in the same space."""
        return FrameFamily(self.space, self.J @ self.synthesis, self.domain_symmetry)

    def permuted(self, order):
        order = np.asarray(order)
        jt = self.domain_symmetry.matrix[np.ix_(order, order)]
        return FrameFamily(self.space, self.synthesis[:, order], jt)

    def drop(self, n):
        keep = [i for i in range(self.m) if i != n]
        jt = self.domain_symmetry.matrix[np.ix_(keep, keep)]
        return FrameFamily(self.space, self.synthesis[:, keep], jt)


def preframe_apply(family, coefficients):
    """Pre-frame (synthesis) operator: ``T alpha = sum_n alpha_n k_n``."""
    alpha = as_vector(coefficients, family.m, "coefficients")
    return family.synthesis @ alpha


def analysis_matrix(family):
    """Matrix of ``k -> ([k_n, k])_n``, shape (m, dim)."""
    return family.synthesis.T @ family.J


def preframe_adjoint(family, k):
    """Adjoint of the pre-frame operator: ``T* k = J~ ([k_n, k])_n``."""
    k = as_vector(k, family.dim, "k")
    return family.domain_symmetry.matrix @ (analysis_matrix(family) @ k)


def _frame_sum(vectors, functionals):
    # matrix of k -> sum_n (functionals[:, n] . k) vectors[:, n]
    return vectors @ functionals.T


def _extreme_eigs(sym):
    if sym.shape[0] == 0:
        # vacuous inequality on the zero space: sup of admissible A, inf of B
        return np.inf, 0.0
    w = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    return float(w[0]), float(w[-1])


def optimal_bounds(family):
    """Optimal bounds as the extreme eigenvalues of ``S1 = S J``."""
    k = family.synthesis
    return _extreme_eigs(k @ k.T)


def optimal_bounds_oracle(family):
    """Optimal bounds from singular values of the analysis matrix.

    Independent of :func:`frame_operator`: the squared extreme singular values
    of ``k -> ([k_n, k])_n`` are the extreme values of the Rayleigh quotient
    ``sum_n |[k_n, k]|^2 / ||k||_J^2``.
    """
    if family.dim == 0:
        return np.inf, 0.0
    s = np.linalg.svd(analysis_matrix(family), compute_uv=False)
    smin = s[-1] if s.size >= family.dim else 0.0
    return float(smin ** 2), float(s[0] ** 2)


@dataclass(frozen=True, eq=False)
class FrameAnalysis:
    """Frame operator ``S``, its companions and the optimal bounds.

    ``S0``, ``S1`` and ``S2`` are the frame operators of ``{J k_n}`` in the
    Krein space and of ``{k_n}``, ``{J k_n}`` in the Hilbert space
    ``(R^dim, [.,.]_J)``.  They equal ``J S J``, ``S J`` and ``J S``.
    """

    family: FrameFamily
    S: np.ndarray
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    lower_bound: float
    upper_bound: float
    is_frame: bool
    is_tight: bool
    is_exact: bool
    _eigvals: np.ndarray = field(repr=False)
    _eigvecs: np.ndarray = field(repr=False)

    @property
    def bounds(self):
        return self.lower_bound, self.upper_bound

    def require_frame(self):
        if not self.is_frame:
            raise NotAFrameError(
                f"lower frame bound {self.lower_bound:.3e} is not positive "
                f"(upper bound {self.upper_bound:.3e})")

    def inverse(self):
        """``S^-1 = J S1^-1`` from the eigenfactorization of ``S1``."""
        self.require_frame()
        v, w = self._eigvecs, self._eigvals
        return self.family.J @ ((v / w) @ v.T)

    def inverse_j(self):
        """``J S^-1 = S1^-1``, symmetric positive definite."""
        self.require_frame()
        v, w = self._eigvecs, self._eigvals
        return (v / w) @ v.T

    def operator_residuals(self):
        """Spectral-norm gaps ``||S0 - JSJ||``, ``||S1 - SJ||``, ``||S2 - JS||``."""
        j, s = self.family.J, self.S
        if j.shape[0] == 0:
            return {"S0": 0.0, "S1": 0.0, "S2": 0.0}
        norm = lambda a: float(np.linalg.norm(a, 2))  # noqa: E731
        return {"S0": norm(self.S0 - j @ s @ j),
                "S1": norm(self.S1 - s @ j),
                "S2": norm(self.S2 - j @ s)}


def frame_operator(family):
    """Analyse ``family``: frame operators, optimal bounds and flags.

    Rank-deficient families are not an error; they come back with
    ``is_frame = False``.
    """
    k, j, jt = family.synthesis, family.J, family.domain_symmetry.matrix
    adjoint = jt @ k.T @ j                  # T*
    s = k @ jt @ adjoint                    # T J~ T*
    jk = j @ k
    # companions from their defining sums
    s0 = _frame_sum(jk, j @ jk)             # sum [J k_n, k] J k_n
    s1 = _frame_sum(k, j @ (j @ k))         # sum [k_n, k]_J k_n
    s2 = _frame_sum(jk, j @ (j @ jk))       # sum [J k_n, k]_J J k_n

    s1_sym = symmetric_part(s1, "S1", tol=np.inf)
    if family.dim:
        w, v = np.linalg.eigh(s1_sym)
        lower, upper = float(w[0]), float(w[-1])
    else:
        w, v = np.empty(0), np.empty((0, 0))
        lower, upper = np.inf, 0.0
    is_frame = bool(family.dim == 0 or (upper > 0 and lower > TAU_FRAME * upper))
    is_tight = bool(is_frame and upper - lower <= TAU_TIGHT * upper)
    is_exact = bool(is_frame and exactness_check(family, _upper=upper))
    return FrameAnalysis(
        family=family, S=readonly(s), S0=readonly(s0), S1=readonly(s1),
        S2=readonly(s2), lower_bound=lower, upper_bound=upper,
        is_frame=is_frame, is_tight=is_tight, is_exact=is_exact,
        _eigvals=readonly(w), _eigvecs=readonly(v))


def _as_analysis(obj):
    return obj if isinstance(obj, FrameAnalysis) else frame_operator(obj)


def exactness_check(family, *, _upper=None):
    """True when removing any single vector destroys the frame property."""
    if isinstance(family, FrameAnalysis):
        family.require_frame()
        family, _upper = family.family, family.upper_bound
    if _upper is None:
        lower, _upper = optimal_bounds(family)
        if not (_upper > 0 and lower > TAU_FRAME * _upper):
            raise NotAFrameError("exactness is only defined for frames")
    if family.dim == 0:
        return True
    k = family.synthesis
    for n in range(family.m):
        rest = np.delete(k, n, axis=1)
        lower_n, _ = _extreme_eigs(rest @ rest.T)
        if lower_n > TAU_FRAME * _upper:
            return False
    return True


class FourWayBounds(NamedTuple):
    """Optimal bounds of ``{k_n}`` and ``{J k_n}`` in both geometries."""

    krein: tuple
    krein_reflected: tuple
    hilbert: tuple
    hilbert_reflected: tuple

    def max_relative_spread(self):
        arr = np.array(self, dtype=float)
        out = 0.0
        for col in range(2):
            vals = arr[:, col]
            scale = np.max(np.abs(vals))
            if scale > 0:
                out = max(out, float((vals.max() - vals.min()) / scale))
        return out


def _bounds_from_functionals(functionals):
    # functionals: (m, dim) rows f_n with sum_n |f_n . k|^2; J-norm is Euclidean
    return _extreme_eigs(functionals.T @ functionals)


def four_way_bounds(family):
    """Bounds for ``{k_n}``/``{J k_n}`` under ``[.,.]`` and ``[.,.]_J``."""
    k, j = family.synthesis, family.J
    jk = j @ k
    krein = (j @ k).T                       # [k_n, k]
    krein_reflected = (j @ jk).T            # [J k_n, k]
    hilbert = (j @ (j @ k)).T               # [k_n, k]_J
    hilbert_reflected = (j @ (j @ jk)).T    # [J k_n, k]_J
    return FourWayBounds(*(_bounds_from_functionals(f) for f in
                           (krein, krein_reflected, hilbert, hilbert_reflected)))


class Decomposition(NamedTuple):
    """Both frame expansions of a vector ``x``.

    ``coefficients`` are ``[S^-1 k_n, x]`` (synthesised with ``k_n``);
    ``analysis_coefficients`` are ``[k_n, x]`` (synthesised with ``S^-1 k_n``).
    """

    coefficients: np.ndarray
    reconstruction: np.ndarray
    residual: float
    analysis_coefficients: np.ndarray
    analysis_reconstruction: np.ndarray


def frame_decompose(analysis, x):
    analysis = _as_analysis(analysis)
    analysis.require_frame()
    fam = analysis.family
    x = as_vector(x, fam.dim)
    j, k = fam.J, fam.synthesis
    dual = analysis.inverse() @ k           # S^-1 k_n
    c_analysis = k.T @ (j @ x)              # [k_n, x]
    rec_analysis = dual @ c_analysis
    c_dual = dual.T @ (j @ x)               # [S^-1 k_n, x]
    rec_dual = k @ c_dual
    residual = max(float(np.linalg.norm(x - rec_analysis)),
                   float(np.linalg.norm(x - rec_dual)))
    return Decomposition(c_dual, rec_dual, residual, c_analysis, rec_analysis)


class DualVariant(str, Enum):
    """The four canonical duals.

    ``CANONICAL_KREIN``: ``{S^-1 k_n}`` dual to ``{k_n}`` under ``[.,.]``.
    ``CANONICAL_KREIN_J``: ``{J S^-1 k_n}`` dual to ``{J k_n}`` under ``[.,.]``.
    ``CANONICAL_HILBERT``: ``{J S^-1 k_n}`` dual to ``{k_n}`` under ``[.,.]_J``.
    ``CANONICAL_HILBERT_J``: ``{S^-1 k_n}`` dual to ``{J k_n}`` under ``[.,.]_J``.
    """

    CANONICAL_KREIN = "canonical_krein"
    CANONICAL_KREIN_J = "canonical_krein_J"
    CANONICAL_HILBERT = "canonical_hilbert"
    CANONICAL_HILBERT_J = "canonical_hilbert_J"

    @property
    def uses_reflection(self):
        """Whether the dual vectors are ``J S^-1 k_n`` rather than ``S^-1 k_n``."""
        return self in (DualVariant.CANONICAL_KREIN_J, DualVariant.CANONICAL_HILBERT)

    @property
    def partner_reflected(self):
        return self in (DualVariant.CANONICAL_KREIN_J, DualVariant.CANONICAL_HILBERT_J)

    @property
    def product(self):
        return "krein" if self.name.startswith("CANONICAL_KREIN") else "hilbert"


@dataclass(frozen=True, eq=False)
class DualFrame:
    """A canonical dual ``{h_n}`` together with the family it is dual to.

    Duality means ``x = sum_n <h_n, x> p_n = sum_n <p_n, x> h_n`` where ``p_n``
    is the partner family and ``<.,.>`` is the variant's product.
    """

    variant: DualVariant
    space: KreinSpace
    vectors: np.ndarray
    partner: np.ndarray

    def _gram_functional(self, vecs, x):
        j = self.space.J
        if self.variant.product == "krein":
            return vecs.T @ (j @ x)
        return vecs.T @ (j @ (j @ x))

    def expansions(self, x):
        x = as_vector(x, self.space.dim)
        first = self.partner @ self._gram_functional(self.vectors, x)
        second = self.vectors @ self._gram_functional(self.partner, x)
        return first, second

    def residual(self, x):
        """Largest J-norm error of the two mixed expansions of ``x``."""
        x = as_vector(x, self.space.dim)
        return max(float(np.linalg.norm(x - e)) for e in self.expansions(x))

    def family(self):
        return FrameFamily(self.space, self.vectors)

    def bounds(self):
        return optimal_bounds(self.family())


def dual_frame(analysis, variant=DualVariant.CANONICAL_KREIN):
    analysis = _as_analysis(analysis)
    variant = DualVariant(variant)
    analysis.require_frame()
    fam = analysis.family
    k, j = fam.synthesis, fam.J
    h = (analysis.inverse_j() if variant.uses_reflection else analysis.inverse()) @ k
    partner = j @ k if variant.partner_reflected else k
    return DualFrame(variant, fam.space, readonly(h), readonly(partner))


class TightJONBCheck(NamedTuple):
    is_tight_1: bool
    self_products_unit: bool
    is_jonb: bool


def tight_jonb_check(family, tol=TAU_TIGHT):
    """Check for tight frames with bounds 1 and J-orthonormal bases.

    A family that is tight with ``A = B = 1`` and has ``|[k_n, k_n]| = 1`` for
    every ``n`` is necessarily a J-orthonormal basis.
    """
    lower, upper = optimal_bounds(family)
    gram = family.synthesis.T @ family.J @ family.synthesis
    diag = np.diag(gram)
    off = gram - np.diag(diag)
    is_tight_1 = bool(abs(lower - 1) <= tol and abs(upper - 1) <= tol)
    unit = bool(np.all(np.abs(np.abs(diag) - 1) <= tol))
    orthogonal = bool(off.size == 0 or np.max(np.abs(off)) <= tol)
    return TightJONBCheck(is_tight_1, unit, bool(orthogonal and unit and family.m == family.dim))


@dataclass(frozen=True, eq=False)
class SubspaceFrame:
    """A family on a subspace ``ran P``, in orthonormal coordinates.

    ``basis`` (``ambient.dim x r``) has orthonormal columns spanning the
    subspace; ``family`` lives in the r-dimensional Krein space with the
    restricted symmetry ``basis.T @ J @ basis``.
    """

    family: FrameFamily
    basis: np.ndarray
    ambient: KreinSpace

    def embedded(self):
        """Synthesis matrix of the family in ambient coordinates."""
        return self.basis @ self.family.synthesis


def _check_projection(p, j):
    if p.shape != j.shape:
        raise DimensionMismatchError(f"projection has shape {p.shape}, expected {j.shape}")
    if p.size and (np.max(np.abs(p - p.T)) > TAU_SYM or np.max(np.abs(p @ p - p)) > TAU_SYM):
        raise ProjectionInvalidError("P must satisfy P @ P = P = P.T")
    if p.size and np.max(np.abs(p @ j - j @ p)) > TAU_SYM:
        raise CommutationFailureError("P does not commute with J")


def _range_basis(p):
    n = p.shape[0]
    if np.allclose(p, np.eye(n), rtol=0, atol=TAU_SYM):
        return np.eye(n)
    if np.allclose(p, 0, rtol=0, atol=TAU_SYM):
        return np.zeros((n, 0))
    w, v = np.linalg.eigh(0.5 * (p + p.T))
    return v[:, w > 0.5]


def _restrict(family, basis, ambient):
    r = basis.shape[1]
    if r == 0:
        sub = FrameFamily(KreinSpace(FundamentalSymmetry(np.zeros((0, 0)))), np.zeros((0, 0)))
    else:
        jp = FundamentalSymmetry(basis.T @ ambient.J @ basis)
        sub = FrameFamily(KreinSpace(jp), basis.T @ family.synthesis, family.domain_symmetry)
    return SubspaceFrame(sub, readonly(basis), ambient)


def split_frame(family, projection):
    """Split ``{k_n}`` into ``{P k_n}`` on ``ran P`` and ``{(1-P) k_n}`` on its complement.

    ``P`` must be an orthogonal projection commuting with ``J``; both parts are
    then frames with bounds inside ``[A, B]``.  A part on the zero subspace is
    an empty family with vacuous bounds ``(inf, 0)``.
    """
    j = family.J
    p = as_matrix(projection, name="projection")
    _check_projection(p, j)
    p = 0.5 * (p + p.T)
    q = np.eye(family.dim) - p
    return (_restrict(family, _range_basis(p), family.space),
            _restrict(family, _range_basis(q), family.space))


def _block_diag(a, b):
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def merge_frames(plus, minus):
    """Union of frames on complementary J-invariant subspaces."""
    ambient = plus.ambient
    if minus.ambient.dim != ambient.dim:
        raise DimensionMismatchError("parts live in different ambient spaces")
    r_plus, r_minus = plus.basis.shape[1], minus.basis.shape[1]
    if r_plus + r_minus != ambient.dim:
        raise DimensionMismatchError(
            f"subspace dimensions {r_plus} + {r_minus} do not add up to {ambient.dim}")
    if r_plus and r_minus and np.max(np.abs(plus.basis.T @ minus.basis)) > TAU_SYM:
        raise DimensionMismatchError("subspaces are not orthogonal complements")
    for part in (plus, minus):
        if not frame_operator(part.family).is_frame:
            raise NotAFrameError("both parts must be frames for their subspaces")
    synthesis = np.hstack([plus.embedded(), minus.embedded()])
    jt = _block_diag(plus.family.domain_symmetry.matrix, minus.family.domain_symmetry.matrix)
    return FrameFamily(ambient, synthesis, jt)


def _definiteness(vectors, j, sign):
    """Rank and uniform definiteness of the span of ``vectors``.

    Definiteness is read off the extreme eigenvalue of the J-Gram matrix
    compressed to an orthonormal basis of the span.
    """
    if vectors.shape[1] == 0:
        return 0, True
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > max(vectors.shape) * np.finfo(float).eps * s[0]))
    if rank == 0:
        return 0, True
    basis = u[:, :rank]
    w = np.linalg.eigvalsh(basis.T @ j @ basis)
    definite = w[0] > TAU_DEF if sign > 0 else w[-1] < -TAU_DEF
    return rank, bool(definite)


class JFrameSplit(NamedTuple):
    """Result of :func:`jframe_split`.

    ``family`` holds ``{P+ k_n}`` followed by ``{P- k_n}`` with zero columns
    removed; its domain symmetry carries the sign of each ``[f_n, f_n]``.
    """

    family: FrameFamily
    kept: np.ndarray
    positive_definite: bool
    negative_definite: bool
    positive_maximal: bool
    negative_maximal: bool

    @property
    def is_jframe(self):
        return (self.positive_definite and self.negative_definite
                and self.positive_maximal and self.negative_maximal)


def jframe_split(family):
    analysis = _as_analysis(family)
    analysis.require_frame()
    fam = analysis.family
    j, k = fam.J, fam.synthesis
    p_plus, p_minus = fundamental_projections(fam.space)
    split = np.hstack([p_plus @ k, p_minus @ k])
    norms = np.linalg.norm(split, axis=0)
    cutoff = TAU_ZERO * np.max(np.linalg.norm(k, axis=0))
    kept = np.flatnonzero(norms > cutoff)
    split = split[:, kept]
    self_products = np.einsum("in,in->n", split, j @ split)
    signs = np.where(self_products >= 0, 1.0, -1.0)
    rank_pos, pos_def = _definiteness(split[:, signs > 0], j, +1)
    rank_neg, neg_def = _definiteness(split[:, signs < 0], j, -1)
    n_plus, n_minus = fam.space.signature
    return JFrameSplit(
        family=FrameFamily(fam.space, split, np.diag(signs)),
        kept=kept,
        positive_definite=pos_def, negative_definite=neg_def,
        positive_maximal=rank_pos == n_plus, negative_maximal=rank_neg == n_minus)
