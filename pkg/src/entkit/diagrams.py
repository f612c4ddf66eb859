"""Bijections of remote linearly-independent state decomposition.

Corners of the square (all in the correlated subsystem picture of one state):

    A  relevant bases of range(rho_1)        B  relevant bases of range(rho_2)
    C  LI complete decompositions of rho_1   D  LI complete decompositions of rho_2

Horizontal arrows apply the correlation operator ``U`` (or ``U^-1``), vertical
arrows are the CVL bijections of each subsystem, and the diagonals A->D and
B->C are the remote decompositions caused by measuring a relevant observable.

In finite dimension the range of ``rho^(1/2)`` coincides with the range of
``rho``, so every corner of the single-vector diagram is the range itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import decomp as li
from . import linalg
from .decomp import Decomposition
from .errors import PreconditionError, ValidationError
from .state import AntilinearOp, BipartiteState, CorrelationOperator, correlation_operator, reduced_states, to_antilinear

PROB_FLOOR = 1e-12
DIAGRAM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DiagramContext:
    """Correlated subsystem picture of a state with cached derived operators."""

    state: BipartiteState
    rho1: np.ndarray = field(init=False)
    rho2: np.ndarray = field(init=False)
    antilinear: AntilinearOp = field(init=False)
    correlation: CorrelationOperator = field(init=False)
    spec1: linalg.SpectralData = field(init=False, repr=False)
    spec2: linalg.SpectralData = field(init=False, repr=False)
    q1: np.ndarray = field(init=False, repr=False)
    q2: np.ndarray = field(init=False, repr=False)
    sqrt1: np.ndarray = field(init=False, repr=False)
    sqrt2: np.ndarray = field(init=False, repr=False)
    inv_sqrt1: np.ndarray = field(init=False, repr=False)
    inv_sqrt2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho1, rho2 = reduced_states(self.state)
        values = {
            "rho1": rho1,
            "rho2": rho2,
            "antilinear": to_antilinear(self.state),
            "correlation": correlation_operator(self.state),
            "spec1": linalg.eig_hermitian(rho1),
            "spec2": linalg.eig_hermitian(rho2),
            "q1": linalg.range_projector(rho1),
            "q2": linalg.range_projector(rho2),
            "sqrt1": linalg.op_sqrt(rho1),
            "sqrt2": linalg.op_sqrt(rho2),
            "inv_sqrt1": linalg.pinv_on_range(rho1, -0.5),
            "inv_sqrt2": linalg.pinv_on_range(rho2, -0.5),
        }
        for k, v in values.items():
            object.__setattr__(self, k, v)

    @property
    def u(self) -> AntilinearOp:
        return self.correlation.op

    @property
    def u_inv(self) -> AntilinearOp:
        return self.correlation.inverse

    @property
    def rank(self) -> int:
        return self.spec1.rank

    def rho(self, subsystem: int) -> np.ndarray:
        return self.rho1 if subsystem == 1 else self.rho2


def _onb(basis, dim: int, name: str) -> np.ndarray:
    e = linalg.as_matrix(basis, name)
    if e.shape[0] != dim:
        raise ValidationError(f"{name} vectors have dimension {e.shape[0]}, expected {dim}")
    if not linalg.is_orthonormal(e, li.ORTHO_TOL):
        raise PreconditionError("orthonormal", f"{name} is not orthonormal to 1e-9")
    return e


def _relevant(basis, q: np.ndarray, rank: int, name: str) -> np.ndarray:
    e = _onb(basis, q.shape[0], name)
    if e.shape[1] != rank:
        raise PreconditionError("basis_size", f"{name} has {e.shape[1]} vectors, range has dimension {rank}")
    resid = np.linalg.norm(q @ e - e, axis=0)
    if np.max(resid) >= li.RANGE_TOL * linalg.tolerance_scale():
        raise PreconditionError("in_range", f"{name} vector {int(np.argmax(resid))} is outside the range")
    return e


def _normalized_columns(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m, axis=0)


def remote_decomposition_from_onb(ctx: DiagramContext, basis) -> Decomposition:
    """Remote decomposition of rho_2 caused by a complete measurement in ``basis``.

    ``basis`` is a full orthonormal basis of H_1; branches with probability at
    or below ``PROB_FLOOR`` are dropped. The resulting vectors need not be
    linearly independent.
    """
    e = _onb(basis, ctx.state.d1, "basis")
    if e.shape[1] != ctx.state.d1:
        raise PreconditionError("basis_size", f"basis has {e.shape[1]} vectors, H_1 has dimension {ctx.state.d1}")
    images = ctx.antilinear(e)
    p = np.sum(np.abs(images) ** 2, axis=0)
    keep = p > PROB_FLOOR
    return Decomposition(p[keep] / p[keep].sum(), _normalized_columns(images[:, keep]))


def map_A_to_B(ctx: DiagramContext, basis) -> np.ndarray:
    e = _relevant(basis, ctx.q1, ctx.rank, "basis")
    return ctx.u(e)


def map_B_to_A(ctx: DiagramContext, basis) -> np.ndarray:
    f = _relevant(basis, ctx.q2, ctx.rank, "basis")
    return ctx.u_inv(f)


def map_A_to_D(ctx: DiagramContext, basis) -> Decomposition:
    """``p_i = <e_i|rho_1|e_i>``, ``phi_i = p_i^-1/2 rho_2^1/2 U e_i``."""
    e = _relevant(basis, ctx.q1, ctx.rank, "basis")
    p = np.real(np.einsum("ij,ij->j", e.conj(), ctx.rho1 @ e))
    phi = ctx.sqrt2 @ ctx.u(e) / np.sqrt(p)
    return Decomposition(p / p.sum(), _normalized_columns(phi))


def map_D_to_A(ctx: DiagramContext, d: Decomposition) -> np.ndarray:
    """``e_i = U^-1 (p_i^1/2 rho_2~^-1/2 phi_i)``."""
    li.check_decomposes(ctx.rho2, d)
    e = ctx.u_inv((ctx.inv_sqrt2 @ d.vectors) * np.sqrt(d.weights))
    return _normalized_columns(e)


def map_B_to_C(ctx: DiagramContext, basis) -> Decomposition:
    """``q_j = <f_j|rho_2|f_j>``, ``chi_j = q_j^-1/2 rho_1^1/2 U^-1 f_j``."""
    f = _relevant(basis, ctx.q2, ctx.rank, "basis")
    q = np.real(np.einsum("ij,ij->j", f.conj(), ctx.rho2 @ f))
    chi = ctx.sqrt1 @ ctx.u_inv(f) / np.sqrt(q)
    return Decomposition(q / q.sum(), _normalized_columns(chi))


def map_C_to_B(ctx: DiagramContext, c: Decomposition) -> np.ndarray:
    """``f_j = U (q_j^1/2 rho_1~^-1/2 chi_j)``."""
    li.check_decomposes(ctx.rho1, c)
    f = ctx.u((ctx.inv_sqrt1 @ c.vectors) * np.sqrt(c.weights))
    return _normalized_columns(f)


def map_A_to_C(ctx: DiagramContext, basis) -> Decomposition:
    return li.cvl_forward(ctx.rho1, basis)


def map_C_to_A(ctx: DiagramContext, c: Decomposition) -> np.ndarray:
    return li.cvl_inverse(ctx.rho1, c)


def map_B_to_D(ctx: DiagramContext, basis) -> Decomposition:
    return li.cvl_forward(ctx.rho2, basis)


def map_D_to_B(ctx: DiagramContext, d: Decomposition) -> np.ndarray:
    return li.cvl_inverse(ctx.rho2, d)


def map_C_to_D(ctx: DiagramContext, c: Decomposition) -> Decomposition:
    """Same weights, vectors carried over by ``U``."""
    li.check_decomposes(ctx.rho1, c)
    return Decomposition(c.weights, _normalized_columns(ctx.u(c.vectors)))


def map_D_to_C(ctx: DiagramContext, d: Decomposition) -> Decomposition:
    li.check_decomposes(ctx.rho2, d)
    return Decomposition(d.weights, _normalized_columns(ctx.u_inv(d.vectors)))


ARROWS = {
    "A->B": map_A_to_B,
    "B->A": map_B_to_A,
    "A->C": map_A_to_C,
    "C->A": map_C_to_A,
    "B->D": map_B_to_D,
    "D->B": map_D_to_B,
    "C->D": map_C_to_D,
    "D->C": map_D_to_C,
    "A->D": map_A_to_D,
    "D->A": map_D_to_A,
    "B->C": map_B_to_C,
    "C->B": map_C_to_B,
}

CORNER_KIND = {"A": "basis", "B": "basis", "C": "decomposition", "D": "decomposition"}


def apply_arrow(ctx: DiagramContext, arrow: str, value):
    try:
        fn = ARROWS[arrow]
    except KeyError:
        raise ValidationError(f"unknown arrow {arrow!r}; expected one of {sorted(ARROWS)}") from None
    return fn(ctx, value)


def compose(ctx: DiagramContext, path: str, value):
    """Apply the arrows along a corner path such as ``"A->B->D"``."""
    corners = path.split("->")
    for src, dst in zip(corners, corners[1:]):
        value = apply_arrow(ctx, f"{src}->{dst}", value)
    return value


def corner_distance(corner: str, a, b) -> float:
    if CORNER_KIND[corner] == "basis":
        return li.basis_distance(a, b)
    return li.decomposition_distance(a, b)


# Every two-step path joining two corners, paired with the direct arrow it
# must reproduce, plus the round trips of each arrow.
IDENTITIES: tuple[tuple[str, str], ...] = (
    ("A->B->D", "A->D"),
    ("A->C->D", "A->D"),
    ("B->A->C", "B->C"),
    ("B->D->C", "B->C"),
    ("D->B->A", "D->A"),
    ("D->C->A", "D->A"),
    ("C->A->B", "C->B"),
    ("C->D->B", "C->B"),
    ("A->D->C", "A->C"),
    ("A->B->C", "A->C"),
    ("B->C->D", "B->D"),
    ("B->A->D", "B->D"),
    ("C->B->D", "C->D"),
    ("C->A->D", "C->D"),
    ("D->A->C", "D->C"),
    ("D->B->C", "D->C"),
    ("C->B->A", "C->A"),
    ("C->D->A", "C->A"),
    ("D->C->B", "D->B"),
    ("D->A->B", "D->B"),
    ("A->D->B", "A->B"),
    ("A->C->B", "A->B"),
    ("B->C->A", "B->A"),
    ("B->D->A", "B->A"),
)


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    max_deviation: float
    passed: bool


@dataclass(frozen=True)
class DiagramReport:
    checks: tuple[IdentityCheck, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_deviation(self) -> float:
        return max(c.max_deviation for c in self.checks)


def corner_points(ctx: DiagramContext, basis) -> dict[str, object]:
    """A point in every corner, all generated from one relevant basis of range(rho_1)."""
    e = _relevant(basis, ctx.q1, ctx.rank, "basis")
    return {
        "A": e,
        "B": map_A_to_B(ctx, e),
        "C": map_A_to_C(ctx, e),
        "D": map_A_to_D(ctx, e),
    }


def verify_diagram1(ctx: DiagramContext, basis, tol: float = DIAGRAM_TOL) -> DiagramReport:
    """Check every two-step composition and every round trip at one instance."""
    tol = tol * linalg.tolerance_scale()
    points = corner_points(ctx, basis)
    checks = []
    for path, direct in IDENTITIES:
        start, end = path[0], path[-1]
        try:
            dev = corner_distance(end, compose(ctx, path, points[start]), compose(ctx, direct, points[start]))
        except (PreconditionError, ValidationError):
            dev = float("inf")
        checks.append(IdentityCheck(f"{path} == {direct}", dev, dev <= tol))
    for arrow in ARROWS:
        src, dst = arrow.split("->")
        path = f"{src}->{dst}->{src}"
        try:
            dev = corner_distance(src, compose(ctx, path, points[src]), points[src])
        except (PreconditionError, ValidationError):
            dev = float("inf")
        checks.append(IdentityCheck(f"{path} == id", dev, dev <= tol))
    # the vertical arrows are the CVL bijections of each subsystem
    for arrow, rho in (("A->C", ctx.rho1), ("B->D", ctx.rho2)):
        start = points[arrow[0]]
        direct = li.cvl_forward(rho, start)
        dev = corner_distance(arrow[-1], compose(ctx, arrow, start), direct)
        checks.append(IdentityCheck(f"{arrow} == cvl_forward", dev, dev <= tol))
    return DiagramReport(tuple(checks), tol)


# --- single-vector maps (remote pure-state preparation) -------------------

DIAGRAM2_ARROWS = tuple(ARROWS)
_DOMAIN = {"A": 1, "B": 2, "C": 1, "D": 2}


def _diagram2_step(ctx: DiagramContext, arrow: str, v: np.ndarray) -> tuple[np.ndarray, float]:
    src, dst = arrow.split("->")
    if arrow in ("A->B", "C->D"):
        out = ctx.u(v)
    elif arrow in ("B->A", "D->C"):
        out = ctx.u_inv(v)
    elif arrow == "A->C":
        out = ctx.sqrt1 @ v
    elif arrow == "B->D":
        out = ctx.sqrt2 @ v
    elif arrow == "C->A":
        out = ctx.inv_sqrt1 @ v
    elif arrow == "D->B":
        out = ctx.inv_sqrt2 @ v
    elif arrow == "A->D":
        out = ctx.antilinear(v)
    elif arrow == "B->C":
        out = ctx.antilinear.adjoint()(v)
    elif arrow == "D->A":
        out = ctx.u_inv(ctx.inv_sqrt2 @ v)
    elif arrow == "C->B":
        out = ctx.u(ctx.inv_sqrt1 @ v)
    else:
        raise ValidationError(f"unknown arrow {arrow!r}; expected one of {sorted(DIAGRAM2_ARROWS)}")
    # forward arrows scale by p^-1/2, inverse arrows by p^1/2; either way the
    # normalization constant is fixed by the output being a unit vector
    norm = float(np.linalg.norm(out))
    p = norm**2 if dst in ("C", "D") and src in ("A", "B") else 1.0 / norm**2
    return out / norm, p


def diagram2_map(ctx: DiagramContext, arrow: str, vector) -> tuple[np.ndarray, float]:
    """Map a single unit vector along one arrow; also returns the weight ``p`` used."""
    if arrow not in ARROWS:
        raise ValidationError(f"unknown arrow {arrow!r}; expected one of {sorted(DIAGRAM2_ARROWS)}")
    v = linalg.as_vector(vector, "vector")
    src = arrow[0]
    sub = _DOMAIN[src]
    dim = ctx.state.d1 if sub == 1 else ctx.state.d2
    if v.shape[0] != dim:
        raise ValidationError(f"vector has dimension {v.shape[0]}, corner {src} lives in dimension {dim}")
    if abs(np.linalg.norm(v) - 1.0) > li.WEIGHT_TOL:
        raise ValidationError("vector must have unit norm")
    q = ctx.q1 if sub == 1 else ctx.q2
    if np.linalg.norm(q @ v - v) >= li.RANGE_TOL * linalg.tolerance_scale():
        raise PreconditionError("in_range", f"vector is outside corner {src}")
    return _diagram2_step(ctx, arrow, v)


def diagram2_maps(ctx: DiagramContext, vector, arrow: str) -> np.ndarray:
    return diagram2_map(ctx, arrow, vector)[0]
