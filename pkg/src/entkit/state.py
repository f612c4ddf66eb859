"""Bipartite pure states and their antilinear operator representation.

A state ``|Phi> = sum_jk f_jk |j>_1 |k>_2`` is stored as the ``d1 x d2``
coefficient matrix ``F``. Its antilinear representative maps
``psi -> <psi|_1 |Phi>``, which in components is ``F^T @ conj(psi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ValidationError

NORM_TOL = 1e-10


class AntilinearOp:
    """Conjugate-linear map ``psi -> matrix @ conj(psi)``.

    Composition follows from the representation:

    * ``(M1 o conj) @ (M2 o conj)`` is the linear map ``M1 @ conj(M2)``;
    * ``(M o conj) @ L`` is antilinear with matrix ``M @ conj(L)``;
    * ``L @ (M o conj)`` is antilinear with matrix ``L @ M``.

    The adjoint defined by ``(chi, A psi) = (A^dagger chi, psi)^*`` has the
    transposed (not conjugate-transposed) matrix.
    """

    __array_ufunc__ = None  # numpy must defer ``ndarray @ op`` to __rmatmul__

    def __init__(self, matrix):
        self.matrix = linalg.as_matrix(matrix, "antilinear matrix")
        self.matrix.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        return self.matrix @ psi.conj()

    def adjoint(self) -> "AntilinearOp":
        return AntilinearOp(self.matrix.T)

    @property
    def H(self) -> "AntilinearOp":
        return self.adjoint()

    def __matmul__(self, other):
        if isinstance(other, AntilinearOp):
            return self.matrix @ other.matrix.conj()
        other = np.asarray(other, dtype=complex)
        if other.ndim == 1:
            return self(other)
        return AntilinearOp(self.matrix @ other.conj())

    def __rmatmul__(self, other):
        return AntilinearOp(np.asarray(other, dtype=complex) @ self.matrix)

    def __mul__(self, scalar):
        # (c A) psi = c (A psi)
        return AntilinearOp(complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def __eq__(self, other) -> bool:
        return isinstance(other, AntilinearOp) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes()))

    def __repr__(self) -> str:
        return f"AntilinearOp(shape={self.shape})"


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Normalized bipartite state vector held as its coefficient matrix."""

    coeffs: np.ndarray

    def __post_init__(self):
        f = linalg.as_matrix(self.coeffs, "coefficients").copy()
        norm = float(np.linalg.norm(f))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized: norm = {norm!r}")
        f.setflags(write=False)
        object.__setattr__(self, "coeffs", f)

    @classmethod
    def from_vector(cls, vec, d1: int, d2: int) -> "BipartiteState":
        """Build from a flat vector in the ``|j>_1 (x) |k>_2`` (row-major) order."""
        vec = linalg.as_vector(vec, "state vector")
        if vec.size != d1 * d2:
            raise ValidationError(f"vector of length {vec.size} does not match {d1}x{d2}")
        return cls(vec.reshape(d1, d2))

    @classmethod
    def product(cls, a, b) -> "BipartiteState":
        return cls(np.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))

    @property
    def dims(self) -> tuple[int, int]:
        return self.coeffs.shape

    @property
    def d1(self) -> int:
        return self.coeffs.shape[0]

    @property
    def d2(self) -> int:
        return self.coeffs.shape[1]

    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1).copy()


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    schmidt_rank: int

    def reconstruct(self) -> np.ndarray:
        """Flat vector ``sum_i sqrt(r_i) |r_i>_1 |r_i>_2``."""
        d1, d2 = self.left_vectors.shape[0], self.right_vectors.shape[0]
        out = np.zeros(d1 * d2, dtype=complex)
        for c, l, r in zip(self.coefficients, self.left_vectors.T, self.right_vectors.T):
            out += c * np.kron(l, r)
        return out


@dataclass(frozen=True)
class CorrelationOperator:
    """Antiunitary correlation operator, extended by zero off the range of rho_1."""

    op: AntilinearOp
    domain_projector: np.ndarray
    range_projector_2: np.ndarray
    _inverse: AntilinearOp = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_inverse", self.op.adjoint())

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def inverse(self) -> AntilinearOp:
        """``U^-1 = U^dagger`` as a partial isometry from range(rho_2) to range(rho_1)."""
        return self._inverse

    def __call__(self, psi) -> np.ndarray:
        return self.op(psi)


def _check_dim(v: np.ndarray, d: int, name: str) -> None:
    if v.shape[0] != d:
        raise ValidationError(f"{name} has dimension {v.shape[0]}, expected {d}")


def partial_scalar_product(psi1, state: BipartiteState) -> np.ndarray:
    """``<psi|_1 |Phi>_12`` as a vector of the second subsystem."""
    psi1 = linalg.as_vector(psi1, "psi1")
    _check_dim(psi1, state.d1, "psi1")
    f = state.coeffs
    out = np.zeros(state.d2, dtype=complex)
    for j in range(state.d1):
        out += f[j, :] * np.conj(psi1[j])
    return out


def partial_scalar_product_2(chi2, state: BipartiteState) -> np.ndarray:
    """``<chi|_2 |Phi>_12`` as a vector of the first subsystem."""
    chi2 = linalg.as_vector(chi2, "chi2")
    _check_dim(chi2, state.d2, "chi2")
    return state.coeffs @ chi2.conj()


def to_antilinear(state: BipartiteState) -> AntilinearOp:
    return AntilinearOp(state.coeffs.T)


def from_antilinear(op: AntilinearOp) -> BipartiteState:
    """Inverse of :func:`to_antilinear`; the operator must have unit Hilbert-Schmidt norm."""
    norm = op.hs_norm()
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"antilinear operator does not have unit Hilbert-Schmidt norm: {norm!r}")
    return BipartiteState(op.matrix.T)


def hs_inner(a: AntilinearOp, b: AntilinearOp) -> complex:
    """Hilbert-Schmidt scalar product ``tr(b^dagger a)``.

    Under the state isomorphism this is the bra-ket ``<Phi_a|Phi_b>``
    (antilinear in ``a``).
    """
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.trace(b.adjoint() @ a))


def reduced_states(state: BipartiteState) -> tuple[np.ndarray, np.ndarray]:
    """``(rho_1, rho_2) = (A^dagger A, A A^dagger)``."""
    a = to_antilinear(state)
    rho1 = a.adjoint() @ a
    rho2 = a @ a.adjoint()
    return 0.5 * (rho1 + linalg.dagger(rho1)), 0.5 * (rho2 + linalg.dagger(rho2))


def schmidt(state: BipartiteState) -> SchmidtData:
    """Biorthogonal Schmidt expansion from the SVD of the coefficient matrix.

    With ``F = L S R^dagger`` the first-subsystem vectors are the columns of
    ``L`` and the second-subsystem vectors the columns of ``conj(R)``.
    """
    left, s, right = linalg.svd(state.coeffs)
    thresh = np.sqrt(linalg.rank_threshold(s**2, state.d1))
    r = int(np.count_nonzero(s > thresh))
    return SchmidtData(
        coefficients=s[:r].copy(),
        left_vectors=left[:, :r].copy(),
        right_vectors=right[:, :r].conj(),
        schmidt_rank=r,
    )


def correlation_operator(state: BipartiteState) -> CorrelationOperator:
    """``U_a Q_1 = rho_2^(-1/2) A_a`` with the inverse root taken on the range."""
    rho1, rho2 = reduced_states(state)
    a = to_antilinear(state)
    v = linalg.pinv_on_range(rho2, -0.5) @ a
    return CorrelationOperator(
        op=v,
        domain_projector=linalg.range_projector(rho1),
        range_projector_2=linalg.range_projector(rho2),
    )


def correlation_identities(state: BipartiteState) -> dict[str, float]:
    """Largest entry deviation of each defining identity of the correlation operator.

    Keys name the identity: the two polar forms of ``A`` and of ``A^dagger``,
    the transport of each reduced state onto the other, partial antiunitarity
    on both ranges, and the Schmidt pairing ``|r_i>_2 = U |r_i>_1``.
    """
    rho1, rho2 = reduced_states(state)
    a = to_antilinear(state)
    corr = correlation_operator(state)
    u, ui = corr.op, corr.inverse
    q1, q2 = corr.domain_projector, corr.range_projector_2
    s1, s2 = linalg.op_sqrt(rho1), linalg.op_sqrt(rho2)
    sd = schmidt(state)

    def dev(x, y) -> float:
        x = x.matrix if isinstance(x, AntilinearOp) else x
        y = y.matrix if isinstance(y, AntilinearOp) else y
        return float(np.max(np.abs(x - y))) if x.size else 0.0

    return {
        "A = U rho1^1/2": dev(u @ s1, a),
        "A = rho2^1/2 U": dev(s2 @ u, a),
        "A^dagger = U^-1 rho2^1/2": dev(ui @ s2, a.adjoint()),
        "A^dagger = rho1^1/2 U^-1": dev(s1 @ ui, a.adjoint()),
        "rho2 = U rho1 U^-1": dev((u @ rho1) @ ui, rho2),
        "rho1 = U^-1 rho2 U": dev((ui @ rho2) @ u, rho1),
        "U^-1 U = Q1": dev(ui @ u, q1),
        "U U^-1 = Q2": dev(u @ ui, q2),
        "r2 = U r1": dev(u(sd.left_vectors), sd.right_vectors),
    }
