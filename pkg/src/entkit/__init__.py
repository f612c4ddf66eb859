"""Entanglement structure of finite-dimensional bipartite pure states."""

from .decomp import (
    Decomposition,
    characteristic_weight,
    cvl_forward,
    cvl_inverse,
    expand_in_li_basis,
    in_range,
    is_linearly_independent,
    is_linearly_independent_weak,
    span_dimension,
)
from .diagrams import DiagramContext, verify_diagram1
from .errors import EntkitError, NotPSDError, NumericalError, PreconditionError, ValidationError
from .measurement import MeasurementKind, MeasurementSetup, evolve, sample, select
from .observables import Observable, PairClass, classify_pair, twin_partner
from .preparation import event_probability, is_preparable, plan_preparation
from .state import (
    AntilinearOp,
    BipartiteState,
    correlation_operator,
    from_antilinear,
    hs_inner,
    partial_scalar_product,
    reduced_states,
    schmidt,
    to_antilinear,
)

__version__ = "0.1.0"
