"""Dense complex linear algebra primitives.

Every routine returns results in a canonical form so that downstream
bijections can be compared entry by entry:

* eigenvalues and singular values are sorted descending;
* in each eigen/singular vector the first component of magnitude above
  ``PHASE_CUTOFF`` is made real and positive;
* vectors inside a degenerate group are ordered lexicographically by their
  rounded entries.

Vectors are 1-D complex arrays; bases and families of vectors are 2-D arrays
holding the vectors as columns.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError, ValidationError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
RANK_RTOL = 1e-12
PHASE_CUTOFF = 1e-8
_DEGENERACY_RTOL = 1e-10
_SORT_DECIMALS = 8


def tolerance_scale() -> float:
    """Multiplier applied to comparison tolerances (``ENTKIT_TOLERANCE_SCALE``)."""
    raw = os.environ.get("ENTKIT_TOLERANCE_SCALE", "1")
    try:
        scale = float(raw)
    except ValueError as exc:
        raise ValidationError(f"ENTKIT_TOLERANCE_SCALE must be a number, got {raw!r}") from exc
    if not np.isfinite(scale) or scale <= 0:
        raise ValidationError(f"ENTKIT_TOLERANCE_SCALE must be positive, got {raw!r}")
    return scale


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    x = np.asarray(v, dtype=complex)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} has non-finite entries")
    return x


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Return ``v`` rotated so its first significant component is real positive."""
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > PHASE_CUTOFF)
    if idx.size == 0:
        return v.copy()
    lead = v[idx[0]]
    return v * (abs(lead) / lead)


def fix_phases(cols: np.ndarray) -> np.ndarray:
    """Apply :func:`fix_phase` to every column."""
    out = np.empty_like(np.asarray(cols, dtype=complex))
    for i in range(out.shape[1]):
        out[:, i] = fix_phase(cols[:, i])
    return out


def sort_key(v: np.ndarray) -> tuple:
    """Lexicographic key on rounded (re, im) entries, used to break ties."""
    r = np.round(v.real, _SORT_DECIMALS) + 0.0
    i = np.round(v.imag, _SORT_DECIMALS) + 0.0
    return tuple(x for pair in zip(r.tolist(), i.tolist()) for x in pair)


def _degenerate_groups(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, lam in enumerate(values):
        if groups and abs(values[groups[-1][0]] - lam) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _secondary_sort(values: np.ndarray, *mats: np.ndarray) -> list[int]:
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    order: list[int] = []
    for group in _degenerate_groups(values, _DEGENERACY_RTOL * scale):
        if len(group) == 1:
            order.extend(group)
        else:
            order.extend(sorted(group, key=lambda j: sort_key(mats[0][:, j]), reverse=True))
    return order


def rank_threshold(eigenvalues: np.ndarray, dim: int) -> float:
    """Relative threshold ``dim * lambda_max * 1e-12`` separating range from null space."""
    lam_max = float(np.max(eigenvalues)) if len(eigenvalues) else 0.0
    return dim * max(lam_max, 0.0) * RANK_RTOL


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int

    @property
    def threshold(self) -> float:
        return rank_threshold(self.eigenvalues, self.eigenvectors.shape[0])

    @property
    def range_vectors(self) -> np.ndarray:
        """Orthonormal columns spanning the eigenspaces above the rank threshold."""
        return self.eigenvectors[:, : self.rank]

    @property
    def null_vectors(self) -> np.ndarray:
        return self.eigenvectors[:, self.rank :]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def check_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {m.shape}")


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.linalg.norm(m - dagger(m)) <= rtol * max(np.linalg.norm(m), 1e-300)


def eig_hermitian(h) -> SpectralData:
    """Eigendecomposition of a Hermitian matrix in canonical form."""
    h = as_matrix(h, "H")
    check_square(h, "H")
    if not is_hermitian(h):
        raise ValidationError("H is not Hermitian: ||H - H^dagger|| > 1e-10 ||H||")
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    w = w[::-1].copy()
    v = fix_phases(v[:, ::-1])
    order = _secondary_sort(w, v)
    w, v = w[order], v[:, order]
    rank = int(np.count_nonzero(w > rank_threshold(w, h.shape[0])))
    return SpectralData(eigenvalues=w, eigenvectors=v, rank=rank)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = left @ diag(s) @ right^dagger`` with canonical phases.

    The phase is fixed on the left vectors and the same rotation is applied to
    the matching right vector so the product is unchanged.
    """
    m = as_matrix(m, "M")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    right = dagger(vh)
    for i in range(s.size):
        col = u[:, i]
        idx = np.flatnonzero(np.abs(col) > PHASE_CUTOFF)
        if idx.size:
            ph = abs(col[idx[0]]) / col[idx[0]]
            u[:, i] = col * ph
            right[:, i] = right[:, i] * ph
    order = _secondary_sort(s, u)
    return u[:, order], s[order], right[:, order]


def _psd_spectrum(h, name: str = "H") -> SpectralData:
    spec = eig_hermitian(h)
    lam_min = float(spec.eigenvalues[-1])
    if lam_min < -PSD_TOL:
        raise NotPSDError(f"{name} is not positive semidefinite: eigenvalue {lam_min!r} < -1e-10")
    return spec


def op_sqrt(h) -> np.ndarray:
    """Positive square root; slightly negative eigenvalues are clamped to zero."""
    spec = _psd_spectrum(h)
    lam = np.sqrt(np.clip(spec.eigenvalues, 0.0, None))
    v = spec.eigenvectors
    return (v * lam) @ dagger(v)


def range_projector(h) -> np.ndarray:
    spec = _psd_spectrum(h)
    w = spec.range_vectors
    return w @ dagger(w)


def range_basis(h) -> np.ndarray:
    """Orthonormal eigenvector columns spanning the range of a PSD matrix."""
    return _psd_spectrum(h).range_vectors


def null_basis(h) -> np.ndarray:
    return _psd_spectrum(h).null_vectors


_POWERS = {-1.0: -1.0, -0.5: -0.5, 0.5: 0.5}


def pinv_on_range(h, power: float) -> np.ndarray:
    """``lambda ** power`` on the range of a PSD matrix, zero on its null space.

    ``power`` must be one of -1, -1/2, +1/2.
    """
    if float(power) not in _POWERS:
        raise ValidationError(f"power must be one of -1, -0.5, 0.5, got {power!r}")
    spec = _psd_spectrum(h)
    r = spec.rank
    lam = np.zeros_like(spec.eigenvalues)
    lam[:r] = spec.eigenvalues[:r] ** float(power)
    v = spec.eigenvectors
    return (v * lam) @ dagger(v)


def gram_rank(vectors: np.ndarray) -> int:
    """Rank of the Gram matrix of the columns, with the relative rank threshold."""
    vectors = np.asarray(vectors, dtype=complex)
    gram = dagger(vectors) @ vectors
    w = np.linalg.eigvalsh(0.5 * (gram + dagger(gram)))
    return int(np.count_nonzero(w > rank_threshold(w, gram.shape[0])))


def is_orthonormal(cols: np.ndarray, tol: float = 1e-9) -> bool:
    cols = np.asarray(cols, dtype=complex)
    k = cols.shape[1]
    return bool(np.max(np.abs(dagger(cols) @ cols - np.eye(k)), initial=0.0) <= tol)


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_theta ||a - exp(i theta) b||``."""
    overlap = np.vdot(b, a)
    ph = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - ph * b))
