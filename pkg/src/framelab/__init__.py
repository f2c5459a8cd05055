"""Frames, dual frames and W-metric transfers on finite-dimensional Krein spaces."""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .krein import (FundamentalSymmetry, KreinSpace, VectorKind, classify_vector,
                    fundamental_projections, indefinite_inner, j_inner, j_norm,
                    make_symmetry_conjugated, make_symmetry_from_signature)
from .frames import (DualFrame, DualVariant, FrameAnalysis, FrameFamily,
                     SubspaceFrame, dual_frame, exactness_check, four_way_bounds,
                     frame_decompose, frame_operator, jframe_split, merge_frames,
                     optimal_bounds, optimal_bounds_oracle, preframe_adjoint,
                     preframe_apply, split_frame, tight_jonb_check)
from .wmetric import (DegradationCurve, GramModel, WKreinSpace, build_gram_model,
                      build_multiplication_gram, completeness_certificate,
                      degradation_sweep, naive_bounds_oracle, naive_frame_bounds,
                      transfer_frame, w_inner, w_j_inner)
from .estimators import KreinFrameTransformer, WMetricTransformer
from .io import load_problem
