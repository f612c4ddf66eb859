"""Linearly-independent complete decompositions of density operators.

A decomposition ``rho = sum_i p_i |phi_i><phi_i|`` with linearly independent
``phi_i`` corresponds one-to-one to an orthonormal basis ``{e_i}`` of the
range of ``rho`` through

    p_i = <e_i|rho|e_i>,    phi_i = p_i^(-1/2) rho^(1/2) e_i

and back through ``e_i = p_i^(1/2) rho~^(-1/2) phi_i``, where ``rho~^(-1/2)``
is the inverse root on the range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import linalg
from .errors import NumericalError, PreconditionError, ValidationError

WEIGHT_TOL = 1e-10
RANGE_TOL = 1e-8
RECONSTRUCT_TOL = 1e-9
ORTHO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Weighted family of unit vectors (columns of ``vectors``)."""

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1).copy()
        v = linalg.as_matrix(self.vectors, "decomposition vectors").copy()
        if v.shape[1] != w.size:
            raise ValidationError(f"{w.size} weights but {v.shape[1]} vectors")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValidationError("decomposition weights must be finite and positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"decomposition weights sum to {w.sum()!r}, not 1")
        norms = np.linalg.norm(v, axis=0)
        if np.max(np.abs(norms - 1.0)) > WEIGHT_TOL:
            raise ValidationError("decomposition vectors must have unit norm")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def parent_dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.weights.size

    def __iter__(self):
        return iter(zip(self.weights, self.vectors.T))

    def density(self) -> np.ndarray:
        v = self.vectors
        return (v * self.weights) @ linalg.dagger(v)

    def canonical(self) -> "Decomposition":
        """Descending weight, ties broken by rounded entries; canonical phases."""
        v = linalg.fix_phases(self.vectors)
        order = sorted(
            range(len(self)),
            key=lambda i: (-round(float(self.weights[i]), 10), tuple(-x for x in linalg.sort_key(v[:, i]))),
        )
        return Decomposition(self.weights[order], v[:, order])


def _columns(vectors) -> np.ndarray:
    """Accept a 2-D column array or a sequence of 1-D vectors."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(complex)
    vecs = [np.asarray(x, dtype=complex) for x in vectors]
    if not vecs:
        raise ValidationError("need at least one vector")
    dims = {x.shape for x in vecs}
    if len(dims) != 1 or vecs[0].ndim != 1:
        raise ValidationError("vectors must be 1-D with a common dimension")
    return np.stack(vecs, axis=1)


def span_dimension(vectors) -> int:
    return linalg.gram_rank(_columns(vectors))


def is_linearly_independent(vectors) -> bool:
    """No vector lies in the span of the others (Gram-matrix rank test)."""
    cols = _columns(vectors)
    return span_dimension(cols) == cols.shape[1]


def is_linearly_independent_weak(vectors) -> bool:
    """Each vector lies outside the span of its predecessors.

    Sequential Gram-Schmidt residual test, kept separate from the Gram-rank
    predicate so the two can be checked against each other.
    """
    cols = _columns(vectors)
    scale = max(float(np.max(np.linalg.norm(cols, axis=0))), 1e-300)
    # residual cutoff matched to the Gram eigenvalue threshold
    cutoff = scale * np.sqrt(cols.shape[1] * linalg.RANK_RTOL)
    basis: list[np.ndarray] = []
    for k in range(cols.shape[1]):
        res = cols[:, k].copy()
        for _ in range(2):
            for q in basis:
                res = res - np.vdot(q, res) * q
        norm = np.linalg.norm(res)
        if norm <= cutoff:
            return False
        basis.append(res / norm)
    return True


def in_range(rho, phi, tol: float = RANGE_TOL) -> bool:
    """``||Q phi - phi|| < tol`` with ``Q`` the range projector of ``rho``."""
    phi = linalg.as_vector(phi, "phi")
    q = linalg.range_projector(rho)
    if q.shape[0] != phi.shape[0]:
        raise ValidationError(f"phi has dimension {phi.shape[0]}, rho has {q.shape[0]}")
    return bool(np.linalg.norm(q @ phi - phi) < tol * linalg.tolerance_scale())


def _check_density(rho) -> np.ndarray:
    rho = linalg.as_matrix(rho, "rho")
    linalg.check_square(rho, "rho")
    tr = np.trace(rho)
    if abs(tr - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"rho must have unit trace, got {tr!r}")
    return rho


def _check_range_basis(rho: np.ndarray, basis, rank: int, q: np.ndarray) -> np.ndarray:
    e = linalg.as_matrix(basis, "basis")
    if e.shape[0] != rho.shape[0]:
        raise ValidationError(f"basis vectors have dimension {e.shape[0]}, rho has {rho.shape[0]}")
    if not linalg.is_orthonormal(e, ORTHO_TOL):
        raise PreconditionError("orthonormal", "basis is not orthonormal to 1e-9")
    if e.shape[1] != rank:
        raise PreconditionError("basis_size", f"basis has {e.shape[1]} vectors, rank(rho) = {rank}")
    resid = np.linalg.norm(q @ e - e, axis=0)
    if np.max(resid) >= RANGE_TOL * linalg.tolerance_scale():
        i = int(np.argmax(resid))
        raise PreconditionError("in_range", f"basis vector {i} is outside the range of rho (residual {resid[i]:.3g})")
    return e


def cvl_forward(rho, basis) -> Decomposition:
    """Map an orthonormal basis of range(rho) to a linearly-independent decomposition."""
    rho = _check_density(rho)
    spec = linalg.eig_hermitian(rho)
    q = spec.range_vectors @ linalg.dagger(spec.range_vectors)
    e = _check_range_basis(rho, basis, spec.rank, q)
    root = linalg.op_sqrt(rho)
    images = root @ e
    p = np.real(np.einsum("ij,ij->j", e.conj(), rho @ e))
    if np.any(p <= 0):
        raise NumericalError("non-positive weight for a range vector")
    phi = images / np.sqrt(p)
    phi = phi / np.linalg.norm(phi, axis=0)
    return Decomposition(p / p.sum(), phi)


def check_decomposes(rho: np.ndarray, decomp: Decomposition) -> None:
    if decomp.parent_dim != rho.shape[0]:
        raise ValidationError(f"decomposition lives in dimension {decomp.parent_dim}, rho in {rho.shape[0]}")
    err = float(np.max(np.abs(decomp.density() - rho)))
    if err > RECONSTRUCT_TOL * linalg.tolerance_scale():
        raise PreconditionError("reconstructs_rho", f"decomposition misses rho by {err:.3g}")
    if not is_linearly_independent(decomp.vectors):
        raise PreconditionError("is_linearly_independent", "decomposition vectors are linearly dependent")


def cvl_inverse(rho, decomp: Decomposition) -> np.ndarray:
    """Orthonormal basis of range(rho) that :func:`cvl_forward` maps to ``decomp``."""
    rho = _check_density(rho)
    check_decomposes(rho, decomp)
    inv_root = linalg.pinv_on_range(rho, -0.5)
    e = (inv_root @ decomp.vectors) * np.sqrt(decomp.weights)
    return e / np.linalg.norm(e, axis=0)


def expand_in_li_basis(decomp: Decomposition, chi) -> np.ndarray:
    """Unique coefficients ``alpha`` with ``chi = sum_i alpha_i phi_i``.

    ``alpha_i = p_i <phi_i| rho~^-1 |chi>`` where ``rho`` is the density the
    decomposition reconstructs.
    """
    chi = linalg.as_vector(chi, "chi")
    rho = decomp.density()
    if chi.shape[0] != rho.shape[0]:
        raise ValidationError(f"chi has dimension {chi.shape[0]}, decomposition {rho.shape[0]}")
    q = linalg.range_projector(rho)
    nrm = max(float(np.linalg.norm(chi)), 1e-300)
    if np.linalg.norm(q @ chi - chi) >= RANGE_TOL * nrm * linalg.tolerance_scale():
        raise PreconditionError("in_range", "chi is outside the range of the decomposed density")
    inv = linalg.pinv_on_range(rho, -1)
    return decomp.weights * (linalg.dagger(decomp.vectors) @ (inv @ chi))


def characteristic_weight(rho, phi) -> float:
    """``1 / <phi| rho~^-1 |phi>`` for phi in range(rho), else 0.

    The value is computed through the range inverse and through the
    eigenbasis sum ``1 / sum_k |<k|phi>|^2 / r_k``; a disagreement beyond
    1e-12 raises :class:`NumericalError`.
    """
    rho = _check_density(rho)
    phi = linalg.as_vector(phi, "phi")
    if abs(np.linalg.norm(phi) - 1.0) > WEIGHT_TOL:
        raise ValidationError("phi must be a unit vector")
    if not in_range(rho, phi):
        return 0.0
    p_inverse = characteristic_weight_from_inverse(rho, phi)
    p_spectral = characteristic_weight_spectral(rho, phi)
    if abs(p_inverse - p_spectral) > 1e-12:
        raise NumericalError(f"characteristic weight routes disagree: {p_inverse!r} vs {p_spectral!r}")
    return p_inverse


def characteristic_weight_from_inverse(rho, phi) -> float:
    inv = linalg.pinv_on_range(rho, -1)
    return 1.0 / float(np.real(np.vdot(phi, inv @ phi)))


def characteristic_weight_spectral(rho, phi) -> float:
    spec = linalg.eig_hermitian(rho)
    r = spec.rank
    overlaps = np.abs(linalg.dagger(spec.range_vectors) @ phi) ** 2
    return 1.0 / float(np.sum(overlaps / spec.eigenvalues[:r]))


def weight_bounds(rho, phi, overlap_tol: float = 1e-14) -> tuple[float, float]:
    """Smallest and largest eigenvalue among eigenvectors overlapping ``phi``."""
    spec = linalg.eig_hermitian(rho)
    r = spec.rank
    overlaps = np.abs(linalg.dagger(spec.range_vectors) @ phi) ** 2
    lam = spec.eigenvalues[:r][overlaps > overlap_tol]
    return float(lam.min()), float(lam.max())


def match_columns(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Permutation ``perm`` pairing column ``i`` of ``a`` with column ``perm[i]`` of ``b``.

    Maximizes the total squared overlap, so the pairing ignores phases.
    """
    cost = -np.abs(linalg.dagger(a) @ b) ** 2
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(a.shape[1], dtype=int)
    perm[rows] = cols
    return perm


def basis_distance(a, b) -> float:
    """Max phase-aligned column distance after optimal reordering; inf on size mismatch."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return float("inf")
    perm = match_columns(a, b)
    return max(linalg.phase_distance(a[:, i], b[:, perm[i]]) for i in range(a.shape[1]))


def decomposition_distance(a: Decomposition, b: Decomposition) -> float:
    """Max over matched terms of weight difference and phase-aligned vector distance."""
    if a.vectors.shape != b.vectors.shape:
        return float("inf")
    perm = match_columns(a.vectors, b.vectors)
    dev = 0.0
    for i in range(len(a)):
        j = perm[i]
        dev = max(dev, abs(a.weights[i] - b.weights[j]), linalg.phase_distance(a.vectors[:, i], b.vectors[:, j]))
    return float(dev)
