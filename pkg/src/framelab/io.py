"""Problem files and report serialization.

A problem is one JSON document::

    {"space": {"J": <matrix>},
     "frame": <matrix>,                      # columns are the frame vectors
     "gram": <matrix>,                       # optional
     "grid": {"points": [...], "mu": [...], "phi": [...]}}   # optional

with ``<matrix> = {"name": str, "rows": int, "cols": int, "data": [...]}`` in
row-major order.  ``space`` may be omitted (identity ``J``).
"""

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DimensionMismatchError, InvariantViolation, ParseError
from .frames import FrameFamily
from .krein import FundamentalSymmetry, KreinSpace
from .wmetric import GramModel, GridInfo, build_gram_model, build_multiplication_gram

__all__ = ["MatrixFile", "Problem", "load_problem", "parse_problem",
           "dump_problem", "dumps_json", "digest"]


@dataclass(frozen=True)
class MatrixFile:
    name: str
    rows: int
    cols: int
    data: tuple

    @classmethod
    def from_dict(cls, doc, path):
        if not isinstance(doc, dict):
            raise ParseError(f"{path}: expected a matrix object")
        try:
            rows, cols, data = doc["rows"], doc["cols"], doc["data"]
        except KeyError as exc:
            raise ParseError(f"{path}: missing field {exc.args[0]!r}") from None
        if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
            raise InvariantViolation("shape", "rows and cols must be nonnegative integers", path)
        if not isinstance(data, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
            raise ParseError(f"{path}.data: expected a list of numbers")
        if len(data) != rows * cols:
            raise InvariantViolation(
                "size", f"rows*cols = {rows * cols} but data has {len(data)} entries", path)
        if not all(math.isfinite(v) for v in data):
            raise InvariantViolation("finite", "entries must be finite", path)
        return cls(str(doc.get("name", "")), rows, cols, tuple(float(v) for v in data))

    @classmethod
    def from_array(cls, name, a):
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return cls(name, a.shape[0], a.shape[1], tuple(float(v) for v in a.ravel()))

    def to_array(self):
        return np.array(self.data, dtype=float).reshape(self.rows, self.cols)

    def to_dict(self):
        return {"name": self.name, "rows": self.rows, "cols": self.cols,
                "data": list(self.data)}


@dataclass(frozen=True, eq=False)
class Problem:
    """A loaded problem: validated objects plus the documents they came from."""

    space: KreinSpace
    family: FrameFamily
    gram: GramModel = None
    grid: GridInfo = None
    documents: dict = None
    sha256: str = ""

    @property
    def euclidean_frame(self):
        """Frame matrix in orthonormal coordinates (``sqrt(mu)``-scaled on a grid)."""
        k = self.family.synthesis
        return self.grid.to_coordinates(k) if self.grid is not None else k


def _float_list(doc, key, path):
    v = doc.get(key)
    if not isinstance(v, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ParseError(f"{path}.{key}: expected a list of numbers")
    return [float(x) for x in v]


def parse_problem(doc, sha256=""):
    if not isinstance(doc, dict):
        raise ParseError("problem document must be a JSON object")
    if "frame" not in doc:
        raise ParseError("missing required field 'frame'")
    frame_file = MatrixFile.from_dict(doc["frame"], "frame")
    k = frame_file.to_array()
    documents = {"frame": frame_file}

    if "space" in doc:
        space_doc = doc["space"]
        if not isinstance(space_doc, dict) or "J" not in space_doc:
            raise ParseError("space: expected an object with field 'J'")
        j_file = MatrixFile.from_dict(space_doc["J"], "space.J")
        documents["J"] = j_file
        if j_file.rows != j_file.cols:
            raise DimensionMismatchError(f"space.J: J must be square, got {j_file.rows}x{j_file.cols}")
        sym = FundamentalSymmetry(j_file.to_array(), path="space.J")
    else:
        sym = FundamentalSymmetry.identity(frame_file.rows)
    if sym.dim != frame_file.rows:
        raise DimensionMismatchError(
            f"frame: vectors have dimension {frame_file.rows}, J has {sym.dim}")
    space = KreinSpace(sym)
    try:
        family = FrameFamily(space, k)
    except InvariantViolation as exc:
        raise InvariantViolation(exc.invariant, str(exc), "frame") from None

    gram = grid = None
    if "gram" in doc and "grid" in doc:
        raise InvariantViolation("gram_source", "give either 'gram' or 'grid', not both")
    if "gram" in doc:
        gram_file = MatrixFile.from_dict(doc["gram"], "gram")
        documents["gram"] = gram_file
        if (gram_file.rows, gram_file.cols) != (sym.dim, sym.dim):
            raise DimensionMismatchError(
                f"gram: expected {sym.dim}x{sym.dim}, got {gram_file.rows}x{gram_file.cols}")
        try:
            gram = build_gram_model(gram_file.to_array())
        except InvariantViolation as exc:
            raise InvariantViolation(exc.invariant, str(exc), "gram") from None
    if "grid" in doc:
        grid_doc = doc["grid"]
        if not isinstance(grid_doc, dict):
            raise ParseError("grid: expected an object")
        vals = {key: _float_list(grid_doc, key, "grid") for key in ("points", "mu", "phi")}
        documents["grid"] = vals
        if len(vals["points"]) != sym.dim:
            raise DimensionMismatchError(
                f"grid: {len(vals['points'])} points but frame dimension {sym.dim}")
        try:
            gram, grid = build_multiplication_gram(vals["points"], vals["mu"], vals["phi"])
        except InvariantViolation as exc:
            raise InvariantViolation(exc.invariant, str(exc), "grid") from None
    return Problem(space, family, gram, grid, documents, sha256)


def load_problem(path):
    """Read and validate a problem file.

    Raises
    ------
    ParseError
        Unreadable file, invalid JSON or schema mismatch.
    InvariantViolation
        A value breaks a domain invariant; ``exc.invariant`` and ``exc.path``
        name the check and the field.
    DimensionMismatchError, KernelNotTrivialError
    """
    raw = Path(path).read_bytes() if Path(path).is_file() else None
    if raw is None:
        raise ParseError(f"{path}: no such file")
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_problem(doc, hashlib.sha256(raw).hexdigest())


def dump_problem(problem):
    """Inverse of :func:`parse_problem` on the stored source documents."""
    docs = problem.documents or {}
    out = {"frame": docs["frame"].to_dict()}
    if "J" in docs:
        out["space"] = {"J": docs["J"].to_dict()}
    if "gram" in docs:
        out["gram"] = docs["gram"].to_dict()
    if "grid" in docs:
        out["grid"] = {key: list(v) for key, v in docs["grid"].items()}
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"refusing to serialize non-finite value {v}")
        return v
    return obj


def dumps_json(obj):
    """Deterministic JSON: sorted keys, shortest round-trip floats, LF ending."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def digest(matrix_file):
    payload = json.dumps(matrix_file.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()
