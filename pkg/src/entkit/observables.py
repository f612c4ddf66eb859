"""Subsystem observables: compatibility, relevance and twin partners."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .decomp import basis_distance
from .errors import PreconditionError, ValidationError
from .state import AntilinearOp, BipartiteState, correlation_operator, reduced_states

COMMUTATOR_RTOL = 1e-9
DEGENERACY_RTOL = 1e-8
MATCH_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    subsystem_tag: int = 1

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, "observable").copy()
        linalg.check_square(m, "observable")
        if not linalg.is_hermitian(m):
            raise ValidationError("observable is not Hermitian to 1e-10")
        if self.subsystem_tag not in (1, 2):
            raise ValidationError(f"subsystem_tag must be 1 or 2, got {self.subsystem_tag!r}")
        m = 0.5 * (m + linalg.dagger(m))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PartialSpectralForm:
    """Observable split along the range ``Q`` of a state.

    ``A = detectable + remainder + cross`` where ``detectable`` is the
    spectral sum over the reducee eigenvectors, ``remainder = Q^perp A Q^perp``
    and ``cross = Q A Q^perp + Q^perp A Q`` (zero iff range compatible).
    """

    detectable_eigenvalues: np.ndarray
    detectable_eigenvectors: np.ndarray
    remainder: np.ndarray
    cross: np.ndarray

    def detectable_part(self) -> np.ndarray:
        v = self.detectable_eigenvectors
        return (v * self.detectable_eigenvalues) @ linalg.dagger(v)


def _matrix(a) -> np.ndarray:
    return a.matrix if isinstance(a, Observable) else linalg.as_matrix(a, "observable")


def _same_dim(a: np.ndarray, rho: np.ndarray) -> None:
    if a.shape != rho.shape:
        raise ValidationError(f"observable shape {a.shape} does not match state shape {rho.shape}")


def is_state_compatible(a, rho) -> bool:
    """``[A, rho] = 0`` relative to ``||A|| ||rho||``."""
    a, rho = _matrix(a), linalg.as_matrix(rho, "rho")
    _same_dim(a, rho)
    scale = np.linalg.norm(a) * np.linalg.norm(rho)
    return bool(np.linalg.norm(a @ rho - rho @ a) <= COMMUTATOR_RTOL * scale * linalg.tolerance_scale())


def is_range_compatible(a, rho) -> bool:
    """``[A, Q] = 0`` with ``Q`` the range projector of ``rho``."""
    a, rho = _matrix(a), linalg.as_matrix(rho, "rho")
    _same_dim(a, rho)
    q = linalg.range_projector(rho)
    return bool(np.linalg.norm(a @ q - q @ a) <= COMMUTATOR_RTOL * np.linalg.norm(a) * linalg.tolerance_scale())


def _reducee(a: np.ndarray, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-data of ``A`` restricted to range(rho): values and full-space vectors."""
    w = linalg.range_basis(rho)
    red = linalg.dagger(w) @ a @ w
    spec = linalg.eig_hermitian(0.5 * (red + linalg.dagger(red)))
    return spec.eigenvalues, linalg.fix_phases(w @ spec.eigenvectors)


def _nondegenerate(values: np.ndarray, a: np.ndarray) -> bool:
    if values.size < 2:
        return True
    gap = float(np.min(np.abs(np.diff(values))))
    return bool(gap > DEGENERACY_RTOL * np.linalg.norm(a))


def partial_spectral_form(a, rho) -> PartialSpectralForm:
    a, rho = _matrix(a), linalg.as_matrix(rho, "rho")
    _same_dim(a, rho)
    q = linalg.range_projector(rho)
    qp = np.eye(q.shape[0]) - q
    values, vectors = _reducee(a, rho)
    return PartialSpectralForm(
        detectable_eigenvalues=values,
        detectable_eigenvectors=vectors,
        remainder=qp @ a @ qp,
        cross=q @ a @ qp + qp @ a @ q,
    )


def is_relevant(a, rho) -> bool:
    """Range compatible with a nondegenerate reducee on range(rho).

    The third relevance condition (eigenbasis inside the range of the root)
    holds automatically in finite dimension.
    """
    a, rho = _matrix(a), linalg.as_matrix(rho, "rho")
    if not is_range_compatible(a, rho):
        return False
    values, _ = _reducee(a, rho)
    return _nondegenerate(values, a)


def relevant_basis(a, rho) -> np.ndarray:
    """Eigenbasis of the reducee, one column per vector, canonical phases."""
    a, rho = _matrix(a), linalg.as_matrix(rho, "rho")
    if not is_range_compatible(a, rho):
        raise PreconditionError("is_relevant", "observable is not range compatible")
    values, vectors = _reducee(a, rho)
    if not _nondegenerate(values, a):
        raise PreconditionError("is_relevant", "reducee has a degenerate spectrum")
    return vectors


def _partner_basis(state: BipartiteState, basis: np.ndarray, from_subsystem: int) -> np.ndarray:
    u = correlation_operator(state)
    op: AntilinearOp = u.op if from_subsystem == 1 else u.inverse
    return linalg.fix_phases(op(basis))


def _spectrum_or_default(spectrum, default: np.ndarray) -> np.ndarray:
    if spectrum is None:
        return default
    s = np.asarray(spectrum, dtype=float).reshape(-1)
    if s.size != default.size:
        raise ValidationError(f"spectrum needs {default.size} values, got {s.size}")
    if not np.all(np.isfinite(s)):
        raise ValidationError("spectrum must be finite")
    if s.size > 1 and np.min(np.abs(s[:, None] - s[None, :])[~np.eye(s.size, dtype=bool)]) <= 0:
        raise ValidationError("spectrum values must be distinct")
    return s


def generalized_twin_partner(a: Observable, state: BipartiteState, spectrum=None) -> Observable:
    """Opposite-subsystem observable whose detectable eigenvectors are the
    correlation-operator images of the eigenvectors of ``a``'s reducee.

    Only relevance of ``a`` is required; the result is a proper twin when ``a``
    is also state compatible, an extended twin otherwise. ``spectrum`` lists the
    partner's detectable eigenvalues aligned with ``a``'s (descending) detectable
    eigenvalues and defaults to them. The undetectable block is set to zero.
    """
    rho1, rho2 = reduced_states(state)
    rho = rho1 if a.subsystem_tag == 1 else rho2
    basis = relevant_basis(a, rho)
    values, _ = _reducee(a.matrix, rho)
    spec = _spectrum_or_default(spectrum, values)
    images = _partner_basis(state, basis, a.subsystem_tag)
    return Observable((images * spec) @ linalg.dagger(images), 3 - a.subsystem_tag)


def twin_partner(a: Observable, state: BipartiteState, spectrum=None) -> Observable:
    """Twin observable of a state-compatible, detectably complete ``a``."""
    rho1, rho2 = reduced_states(state)
    rho = rho1 if a.subsystem_tag == 1 else rho2
    _same_dim(a.matrix, rho)
    if not is_state_compatible(a, rho):
        raise PreconditionError("is_state_compatible", "observable does not commute with the subsystem state")
    values, _ = _reducee(a.matrix, rho)
    if not _nondegenerate(values, a.matrix):
        raise PreconditionError("detectably_complete", "reducee has a degenerate spectrum")
    return generalized_twin_partner(a, state, spectrum)


class PairClass(str, enum.Enum):
    PROPER_TWIN = "proper-twin"
    EXTENDED_TWIN = "extended-twin"
    NOT_GENERALIZED_TWIN = "not-generalized-twin"


def classify_pair(a1: Observable, a2: Observable, state: BipartiteState) -> PairClass:
    """Proper, extended, or not a generalized twin pair."""
    rho1, rho2 = reduced_states(state)
    _same_dim(a1.matrix, rho1)
    _same_dim(a2.matrix, rho2)
    if not is_relevant(a1, rho1):
        raise PreconditionError("is_relevant", "first observable is not relevant for rho_1")
    if not is_relevant(a2, rho2):
        raise PreconditionError("is_relevant", "second observable is not relevant for rho_2")
    images = _partner_basis(state, relevant_basis(a1, rho1), 1)
    if basis_distance(images, relevant_basis(a2, rho2)) > MATCH_TOL * linalg.tolerance_scale():
        return PairClass.NOT_GENERALIZED_TWIN
    if is_state_compatible(a1, rho1) and is_state_compatible(a2, rho2):
        return PairClass.PROPER_TWIN
    return PairClass.EXTENDED_TWIN
