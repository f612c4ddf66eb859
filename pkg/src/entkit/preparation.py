"""Remote pure-state preparation.

An atomic event ``|j><j|`` on subsystem 1 occurs with probability
``p = ||A j||^2`` and leaves subsystem 2 in ``A j / sqrt(p)``. For a target
``phi`` in the range of rho_2 the events that prepare it are exactly

    j = alpha f + beta g,   f = normalized U^-1 rho_2~^(-1/2) phi,
    g in null(rho_1),  |alpha| > 0,  |alpha|^2 + |beta|^2 = 1

with probability ``|alpha|^2 ||rho_1^(1/2) f||^2``; the maximum, at ``j = f``,
is the characteristic weight of ``phi`` in rho_2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import decomp as li
from . import linalg
from .diagrams import PROB_FLOOR, DiagramContext
from .errors import PreconditionError, ValidationError

CHARACTERISTIC_TOL = 1e-9


class TargetClass(str, enum.Enum):
    LINEARLY_INDEPENDENT = "linearly-independent"
    # targets in the range of rho^(1/2) but not of rho: empty in finite dimension
    ROOT_RANGE_ONLY = "finite-dimension: unreachable"
    NOT_PREPARABLE = "not-preparable"


def root_range_excess(ctx: DiagramContext) -> tuple:
    """Targets reachable only through the range of the root and not of rho_2.

    The two ranges coincide for finite-dimensional subsystems, so this is
    always empty; it exists to keep the case analysis explicit.
    """
    return ()


def _target(ctx: DiagramContext, phi2) -> np.ndarray:
    phi = linalg.as_vector(phi2, "phi2")
    if phi.shape[0] != ctx.state.d2:
        raise ValidationError(f"target has dimension {phi.shape[0]}, subsystem 2 has {ctx.state.d2}")
    if abs(np.linalg.norm(phi) - 1.0) > li.WEIGHT_TOL:
        raise ValidationError("target must be a unit vector")
    return phi


def _unit(j1, d: int) -> np.ndarray:
    j = linalg.as_vector(j1, "j1")
    if j.shape[0] != d:
        raise ValidationError(f"event vector has dimension {j.shape[0]}, subsystem 1 has {d}")
    if abs(np.linalg.norm(j) - 1.0) > 1e-9:
        raise ValidationError("event vector must have unit norm")
    return j


def is_preparable(ctx: DiagramContext, phi2) -> bool:
    return li.in_range(ctx.rho2, _target(ctx, phi2))


def classify_target(ctx: DiagramContext, phi2) -> TargetClass:
    if is_preparable(ctx, phi2):
        return TargetClass.LINEARLY_INDEPENDENT
    return TargetClass.NOT_PREPARABLE


@dataclass(frozen=True)
class EventOutcome:
    probability: float
    remote_state: np.ndarray | None

    @property
    def occurs(self) -> bool:
        return self.remote_state is not None


def event_probability(ctx: DiagramContext, j1) -> EventOutcome:
    """Probability of ``|j><j| (x) 1`` and the remote state it prepares."""
    j = _unit(j1, ctx.state.d1)
    image = ctx.antilinear(j)
    p = float(np.vdot(image, image).real)
    if p <= PROB_FLOOR:
        return EventOutcome(p, None)
    return EventOutcome(p, image / np.sqrt(p))


@dataclass(frozen=True)
class PreparationFamily:
    """All events preparing one target, parametrized by ``(alpha, beta, g)``.

    ``null_basis`` holds orthonormal columns spanning the null space of rho_1;
    ``g`` is given by its coefficients in that basis.
    """

    optimal_event: np.ndarray
    null_basis: np.ndarray
    max_probability: float

    @property
    def has_null_space(self) -> bool:
        return self.null_basis.shape[1] > 0

    def member(self, alpha: complex, g_coeffs=None) -> np.ndarray:
        """Event ``alpha f + beta g`` with ``|beta| = sqrt(1 - |alpha|^2)``.

        The phase of ``beta`` is carried by ``g_coeffs``; they are normalized.
        """
        alpha = complex(alpha)
        a2 = abs(alpha) ** 2
        if not 0 < a2 <= 1 + 1e-12:
            raise ValidationError(f"need 0 < |alpha| <= 1, got {abs(alpha)!r}")
        beta = np.sqrt(max(0.0, 1.0 - a2))
        j = alpha * self.optimal_event
        if beta > 0:
            if not self.has_null_space:
                raise PreconditionError("null_space", "rho_1 has no null space; |alpha| must be 1")
            g = np.asarray(g_coeffs if g_coeffs is not None else np.eye(self.null_basis.shape[1])[0], dtype=complex)
            if g.shape != (self.null_basis.shape[1],) or np.linalg.norm(g) == 0:
                raise ValidationError("g_coeffs must be a nonzero vector over the null-space basis")
            j = j + beta * (self.null_basis @ (g / np.linalg.norm(g)))
        return j

    def probability(self, alpha: complex) -> float:
        return abs(complex(alpha)) ** 2 * self.max_probability

    def exemplars(self) -> list[tuple[float, np.ndarray]]:
        """Members at ``|alpha|^2`` in {1, 0.5, 0.1} (only 1 without a null space)."""
        levels = (1.0, 0.5, 0.1) if self.has_null_space else (1.0,)
        return [(a2, self.member(np.sqrt(a2))) for a2 in levels]


@dataclass(frozen=True)
class PreparationPlan:
    target: np.ndarray
    optimal_event: np.ndarray
    max_probability: float
    family: PreparationFamily
    characteristic_weight: float
    target_class: TargetClass

    @property
    def is_characteristic(self) -> bool:
        return abs(self.max_probability - self.characteristic_weight) <= CHARACTERISTIC_TOL * linalg.tolerance_scale()


def plan_preparation(ctx: DiagramContext, phi2) -> PreparationPlan:
    phi = _target(ctx, phi2)
    if not li.in_range(ctx.rho2, phi):
        raise PreconditionError("is_preparable", "target is outside the range of rho_2")
    f = ctx.u_inv(ctx.inv_sqrt2 @ phi)
    f = f / np.linalg.norm(f)
    pmax = float(np.linalg.norm(ctx.sqrt1 @ f) ** 2)
    family = PreparationFamily(optimal_event=f, null_basis=ctx.spec1.null_vectors, max_probability=pmax)
    return PreparationPlan(
        target=phi,
        optimal_event=f,
        max_probability=pmax,
        family=family,
        characteristic_weight=li.characteristic_weight(ctx.rho2, phi),
        target_class=TargetClass.LINEARLY_INDEPENDENT,
    )
