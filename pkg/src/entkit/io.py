"""JSON file formats.

Complex numbers are ``[re, im]`` pairs; vectors are lists of pairs and
matrices lists of rows. Floats are written with ``repr``, which round-trips
every double exactly.

State::

    {"d1": 2, "d2": 2, "coefficients": [[[0.7071, 0], [0, 0]], ...],
     "label": "...", "comment": "..."}

Decomposition::

    {"dim": 2, "terms": [{"weight": 0.5, "vector": [[1, 0], [0, 0]]}, ...]}

Observable::

    {"dim": 2, "subsystem": 1, "matrix": [[[1, 0], [0, 0]], ...]}

Matrix (density operators and similar): ``{"dim": n, "matrix": ...}`` or
``{"rows": m, "cols": n, "matrix": ...}``. Basis / vector list:
``{"dim": n, "vectors": [vector, ...]}`` with one vector per basis element.
Single vector: ``{"vector": ...}``.
"""

from __future__ import annotations

import json
import math
import numbers
from pathlib import Path

import numpy as np

from .decomp import Decomposition
from .errors import ValidationError
from .observables import Observable
from .state import BipartiteState

STATE_NORM_TOL = 1e-8


class FormatError(ValidationError):
    """Malformed input file; ``where`` locates the offending line or field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------- encoding


def encode_complex(z) -> list[float]:
    z = complex(z)
    # adding 0.0 folds -0.0 into 0.0
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.atleast_2d(np.asarray(m))]


def encode_columns(m) -> list:
    """Columns of ``m`` as a list of vectors."""
    return [encode_vector(col) for col in np.asarray(m).T]


def encode_reals(x) -> list[float]:
    return [float(v) + 0.0 for v in np.asarray(x, dtype=float).reshape(-1)]


def state_to_dict(state: BipartiteState, label: str | None = None, comment: str | None = None) -> dict:
    out = {"d1": state.d1, "d2": state.d2, "coefficients": encode_matrix(state.coeffs)}
    if label is not None:
        out["label"] = label
    if comment is not None:
        out["comment"] = comment
    return out


def decomposition_to_dict(d: Decomposition) -> dict:
    return {
        "dim": d.parent_dim,
        "terms": [{"weight": float(w), "vector": encode_vector(v)} for w, v in d],
    }


def observable_to_dict(a: Observable) -> dict:
    return {"dim": a.dim, "subsystem": a.subsystem_tag, "matrix": encode_matrix(a.matrix)}


def basis_to_dict(columns) -> dict:
    columns = np.asarray(columns)
    return {"dim": int(columns.shape[0]), "vectors": encode_columns(columns)}


def dumps(doc) -> str:
    """Deterministic serialization; non-finite floats are rejected."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- decoding


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise FormatError(where, f"expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        raise FormatError(where, "number is not finite")
    return x


def _int(doc: dict, key: str, where: str, minimum: int = 1) -> int:
    if key not in doc:
        raise FormatError(where, f"missing field {key!r}")
    x = doc[key]
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise FormatError(f"{where}.{key}", f"expected an integer >= {minimum}, got {x!r}")
    return x


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise FormatError(where, f"missing field {key!r}")
    return doc[key]


def decode_complex(x, where: str) -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise FormatError(where, f"expected an [re, im] pair, got {x!r}")
    return complex(_number(x[0], f"{where}[0]"), _number(x[1], f"{where}[1]"))


def decode_vector(x, where: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise FormatError(where, "expected a non-empty list of [re, im] pairs")
    if dim is not None and len(x) != dim:
        raise FormatError(where, f"expected {dim} components, got {len(x)}")
    return np.array([decode_complex(z, f"{where}[{i}]") for i, z in enumerate(x)], dtype=complex)


def decode_matrix(x, where: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise FormatError(where, "expected a non-empty list of rows")
    if rows is not None and len(x) != rows:
        raise FormatError(where, f"expected {rows} rows, got {len(x)}")
    if cols is None:
        cols = len(x[0]) if isinstance(x[0], list) else None
    return np.array([decode_vector(r, f"{where}[{i}]", cols) for i, r in enumerate(x)], dtype=complex)


def _object(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise FormatError(where, f"expected a JSON object, got {type(doc).__name__}")
    return doc


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return _object(doc, str(path))


def state_from_dict(doc: dict, where: str = "state") -> BipartiteState:
    doc = _object(doc, where)
    d1, d2 = _int(doc, "d1", where), _int(doc, "d2", where)
    f = decode_matrix(_field(doc, "coefficients", where), f"{where}.coefficients", d1, d2)
    norm = float(np.linalg.norm(f))
    # the file tolerance is fixed: ENTKIT_TOLERANCE_SCALE never loosens it
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise FormatError(f"{where}.coefficients", f"state is not normalized: norm = {norm!r}")
    return BipartiteState(f / norm)


def decomposition_from_dict(doc: dict, where: str = "decomposition") -> Decomposition:
    doc = _object(doc, where)
    dim = _int(doc, "dim", where)
    terms = _field(doc, "terms", where)
    if not isinstance(terms, list) or not terms:
        raise FormatError(f"{where}.terms", "expected a non-empty list of {weight, vector} records")
    weights, vectors = [], []
    for i, t in enumerate(terms):
        w = f"{where}.terms[{i}]"
        t = _object(t, w)
        weights.append(_number(_field(t, "weight", w), f"{w}.weight"))
        vectors.append(decode_vector(_field(t, "vector", w), f"{w}.vector", dim))
    try:
        return Decomposition(np.array(weights), np.array(vectors).T)
    except ValidationError as exc:
        raise FormatError(where, str(exc)) from None


def observable_from_dict(doc: dict, where: str = "observable") -> Observable:
    doc = _object(doc, where)
    dim = _int(doc, "dim", where)
    sub = _int(doc, "subsystem", where)
    m = decode_matrix(_field(doc, "matrix", where), f"{where}.matrix", dim, dim)
    try:
        return Observable(m, sub)
    except ValidationError as exc:
        raise FormatError(where, str(exc)) from None


def matrix_from_dict(doc: dict, where: str = "matrix") -> np.ndarray:
    doc = _object(doc, where)
    if "dim" in doc:
        rows = cols = _int(doc, "dim", where)
    else:
        rows, cols = _int(doc, "rows", where), _int(doc, "cols", where)
    return decode_matrix(_field(doc, "matrix", where), f"{where}.matrix", rows, cols)


def basis_from_dict(doc: dict, where: str = "basis") -> np.ndarray:
    """Vector list as the columns of a matrix."""
    doc = _object(doc, where)
    dim = _int(doc, "dim", where)
    vecs = _field(doc, "vectors", where)
    if not isinstance(vecs, list) or not vecs:
        raise FormatError(f"{where}.vectors", "expected a non-empty list of vectors")
    return np.array([decode_vector(v, f"{where}.vectors[{i}]", dim) for i, v in enumerate(vecs)]).T


def vector_from_dict(doc: dict, where: str = "vector") -> np.ndarray:
    doc = _object(doc, where)
    dim = _int(doc, "dim", where) if "dim" in doc else None
    return decode_vector(_field(doc, "vector", where), f"{where}.vector", dim)


def load_state(path) -> BipartiteState:
    return state_from_dict(load_json(path), str(path))


def load_decomposition(path) -> Decomposition:
    return decomposition_from_dict(load_json(path), str(path))


def load_observable(path) -> Observable:
    return observable_from_dict(load_json(path), str(path))


def load_matrix(path) -> np.ndarray:
    return matrix_from_dict(load_json(path), str(path))


def load_basis(path) -> np.ndarray:
    return basis_from_dict(load_json(path), str(path))


def load_vector(path) -> np.ndarray:
    return vector_from_dict(load_json(path), str(path))
