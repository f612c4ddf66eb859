"""Command-line interface.

Every run writes one JSON document holding the command, its echoed inputs
and its results. Exit status: 0 on success (all checks passed), 1 when a
verification check fails, 2 on malformed input or a violated precondition.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import decomp as li
from . import diagrams, instances, linalg, measurement, observables, preparation
from . import io as fmt
from . import state as st
from .errors import EntkitError, NumericalError, PreconditionError, ValidationError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

IDENTITY_TOL = 1e-9

# Library operation -> subcommand that exercises it.
OPERATIONS: dict[str, str] = {
    "linalg.eig_hermitian": "linalg eig",
    "linalg.svd": "linalg svd",
    "linalg.op_sqrt": "linalg sqrt",
    "linalg.range_projector": "linalg projector",
    "linalg.pinv_on_range": "linalg pinv",
    "state.partial_scalar_product": "antilinear",
    "state.to_antilinear": "antilinear",
    "state.from_antilinear": "antilinear",
    "state.hs_inner": "antilinear",
    "state.reduced_states": "reduce",
    "state.schmidt": "schmidt",
    "state.correlation_operator": "correlation-op",
    "decomp.is_linearly_independent": "independence",
    "decomp.is_linearly_independent_weak": "independence",
    "decomp.span_dimension": "independence",
    "decomp.cvl_forward": "cvl",
    "decomp.cvl_inverse": "cvl-inverse",
    "decomp.in_range": "char-weight",
    "decomp.expand_in_li_basis": "expand",
    "decomp.characteristic_weight": "char-weight",
    "observables.is_state_compatible": "observable",
    "observables.is_range_compatible": "observable",
    "observables.is_relevant": "observable",
    "observables.relevant_basis": "observable",
    "observables.twin_partner": "twin",
    "observables.classify_pair": "classify-pair",
    "diagrams.remote_decomposition_from_onb": "remote-decomposition",
    "diagrams.map_A_to_D": "diagram-map",
    "diagrams.map_D_to_A": "diagram-map",
    "diagrams.map_B_to_C": "diagram-map",
    "diagrams.map_C_to_B": "diagram-map",
    "diagrams.map_A_to_B": "diagram-map",
    "diagrams.map_B_to_A": "diagram-map",
    "diagrams.map_C_to_D": "diagram-map",
    "diagrams.map_D_to_C": "diagram-map",
    "diagrams.verify_diagram1": "diagram-check",
    "diagrams.diagram2_maps": "diagram-map",
    "preparation.is_preparable": "prepare",
    "preparation.plan_preparation": "prepare",
    "preparation.event_probability": "event",
    "measurement.evolve": "simulate",
    "measurement.sample": "simulate",
    "measurement.select": "simulate",
    "cli.run": "*",
}


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- helpers


def _real(x):
    """Float for JSON; non-finite values become strings."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _check(name: str, deviation: float, tol: float) -> dict:
    return {"identity": name, "max_deviation": _real(deviation), "passed": bool(deviation <= tol)}


def _report(report: diagrams.DiagramReport) -> dict:
    return {
        "tolerance": report.tolerance,
        "passed": report.passed,
        "max_deviation": _real(report.max_deviation),
        "checks": [_check(c.identity, c.max_deviation, report.tolerance) for c in report.checks],
    }


def _echo_state(path) -> tuple[st.BipartiteState, dict]:
    doc = fmt.load_json(path)
    state = fmt.state_from_dict(doc, str(path))
    echo = {"path": str(path), **fmt.state_to_dict(state)}
    for key in ("label", "comment"):
        if isinstance(doc.get(key), str):
            echo[key] = doc[key]
    return state, echo


def _rho(args, inputs: dict) -> np.ndarray:
    """Density operator from ``--rho`` or from ``--state`` and ``--subsystem``."""
    if getattr(args, "rho", None):
        rho = fmt.load_matrix(args.rho)
        inputs["rho"] = {"path": args.rho, "matrix": fmt.encode_matrix(rho)}
        return rho
    if not getattr(args, "state", None):
        raise UsageError("either --state or --rho is required")
    state, inputs["state"] = _echo_state(args.state)
    inputs["subsystem"] = args.subsystem
    return st.reduced_states(state)[args.subsystem - 1]


def _state(args, inputs: dict) -> st.BipartiteState:
    state, inputs["state"] = _echo_state(args.state)
    return state


def _basis(path, inputs: dict, key: str = "basis") -> np.ndarray:
    b = fmt.load_basis(path)
    inputs[key] = {"path": str(path), **fmt.basis_to_dict(b)}
    return b


def _vector(path, inputs: dict, key: str) -> np.ndarray:
    v = fmt.load_vector(path)
    inputs[key] = {"path": str(path), "vector": fmt.encode_vector(v)}
    return v


def _decomp(path, inputs: dict, key: str = "decomposition") -> li.Decomposition:
    d = fmt.load_decomposition(path)
    inputs[key] = {"path": str(path), **fmt.decomposition_to_dict(d)}
    return d


def _observable(path, inputs: dict, key: str = "observable") -> observables.Observable:
    a = fmt.load_observable(path)
    inputs[key] = {"path": str(path), **fmt.observable_to_dict(a)}
    return a


def _spectral(spec: linalg.SpectralData) -> dict:
    return {
        "eigenvalues": fmt.encode_reals(spec.eigenvalues),
        "eigenvectors": fmt.encode_columns(spec.eigenvectors),
        "rank": spec.rank,
    }


# ---------------------------------------------------------------- commands


def cmd_schmidt(args, inputs):
    state = _state(args, inputs)
    sd = st.schmidt(state)
    err = float(np.linalg.norm(sd.reconstruct() - state.vector()))
    return {
        "coefficients": fmt.encode_reals(sd.coefficients),
        "weights": fmt.encode_reals(sd.coefficients**2),
        "schmidt_rank": sd.schmidt_rank,
        "left_vectors": fmt.encode_columns(sd.left_vectors),
        "right_vectors": fmt.encode_columns(sd.right_vectors),
    }, [_check("reconstruction", err, 1e-10 * linalg.tolerance_scale())]


def cmd_correlation_op(args, inputs):
    state = _state(args, inputs)
    u = st.correlation_operator(state)
    tol = IDENTITY_TOL * linalg.tolerance_scale()
    checks = [_check(k, v, tol) for k, v in st.correlation_identities(state).items()]
    return {
        "convention": "U psi = matrix @ conj(psi)",
        "matrix": fmt.encode_matrix(u.matrix),
        "inverse_matrix": fmt.encode_matrix(u.inverse.matrix),
        "domain_projector": fmt.encode_matrix(u.domain_projector),
        "range_projector": fmt.encode_matrix(u.range_projector_2),
    }, checks


def cmd_reduce(args, inputs):
    state = _state(args, inputs)
    out = {}
    for s, rho in enumerate(st.reduced_states(state), start=1):
        out[f"rho{s}"] = {
            "matrix": fmt.encode_matrix(rho),
            "trace": _real(np.trace(rho).real),
            **_spectral(linalg.eig_hermitian(rho)),
        }
    return out, []


def cmd_linalg(args, inputs):
    m = fmt.load_matrix(args.matrix)
    inputs["matrix"] = {"path": args.matrix, "matrix": fmt.encode_matrix(m)}
    op = args.linalg_op
    if op == "eig":
        return _spectral(linalg.eig_hermitian(m)), []
    if op == "svd":
        left, s, right = linalg.svd(m)
        err = float(np.max(np.abs((left * s) @ linalg.dagger(right) - m)))
        return {
            "left": fmt.encode_columns(left),
            "singular_values": fmt.encode_reals(s),
            "right": fmt.encode_columns(right),
        }, [_check("left diag(s) right^dagger = M", err, 1e-10 * linalg.tolerance_scale() * max(1.0, s.max()))]
    if op == "sqrt":
        return {"sqrt": fmt.encode_matrix(linalg.op_sqrt(m))}, []
    if op == "projector":
        return {"projector": fmt.encode_matrix(linalg.range_projector(m))}, []
    inputs["power"] = args.power
    return {"pinv": fmt.encode_matrix(linalg.pinv_on_range(m, args.power))}, []


def cmd_antilinear(args, inputs):
    state = _state(args, inputs)
    a = st.to_antilinear(state)
    back = st.from_antilinear(a)
    out = {
        "convention": "A psi = matrix @ conj(psi)",
        "matrix": fmt.encode_matrix(a.matrix),
        "adjoint_matrix": fmt.encode_matrix(a.adjoint().matrix),
    }
    checks = [_check("from_antilinear(to_antilinear(state)) = state", float(np.max(np.abs(back.coeffs - state.coeffs))), 0.0)]
    if args.vector:
        psi = _vector(args.vector, inputs, "vector")
        image = st.partial_scalar_product(psi, state)
        out["partial_scalar_product"] = fmt.encode_vector(image)
        checks.append(_check("<psi|_1 Phi = A psi", float(np.max(np.abs(image - a(psi)))), 1e-12 * linalg.tolerance_scale()))
    if args.other:
        other, inputs["other"] = _echo_state(args.other)
        out["hs_inner"] = fmt.encode_complex(st.hs_inner(a, st.to_antilinear(other)))
    return out, checks


def cmd_independence(args, inputs):
    v = _basis(args.vectors, inputs, "vectors")
    strong = li.is_linearly_independent(v)
    weak = li.is_linearly_independent_weak(v)
    return {
        "count": int(v.shape[1]),
        "linearly_independent": strong,
        "linearly_independent_weak": weak,
        "span_dimension": li.span_dimension(v),
    }, [_check("strong and weak predicates agree", 0.0 if strong == weak else 1.0, 0.0)]


def cmd_cvl(args, inputs):
    rho = _rho(args, inputs)
    basis = _basis(args.basis, inputs)
    d = li.cvl_forward(rho, basis)
    err = float(np.max(np.abs(d.density() - rho)))
    return {"decomposition": fmt.decomposition_to_dict(d)}, [
        _check("sum p_i |phi_i><phi_i| = rho", err, li.RECONSTRUCT_TOL * linalg.tolerance_scale()),
        _check("linearly independent", 0.0 if li.is_linearly_independent(d.vectors) else 1.0, 0.0),
    ]


def cmd_cvl_inverse(args, inputs):
    rho = _rho(args, inputs)
    d = _decomp(args.decomp, inputs)
    e = li.cvl_inverse(rho, d)
    back = li.cvl_forward(rho, e)
    gram = float(np.max(np.abs(linalg.dagger(e) @ e - np.eye(e.shape[1]))))
    return {"basis": fmt.basis_to_dict(e)}, [
        _check("orthonormal", gram, li.ORTHO_TOL * linalg.tolerance_scale()),
        _check("cvl_forward(cvl_inverse(d)) = d", li.decomposition_distance(back, d), 1e-8 * linalg.tolerance_scale()),
    ]


def cmd_char_weight(args, inputs):
    rho = _rho(args, inputs)
    phi = _vector(args.target, inputs, "target")
    inside = li.in_range(rho, phi)
    out = {"in_range": inside, "characteristic_weight": _real(li.characteristic_weight(rho, phi))}
    if inside:
        lo, hi = li.weight_bounds(rho, phi)
        out["inverse_route"] = _real(li.characteristic_weight_from_inverse(rho, phi))
        out["spectral_route"] = _real(li.characteristic_weight_spectral(rho, phi))
        out["bounds"] = [_real(lo), _real(hi)]
    return out, []


def cmd_expand(args, inputs):
    d = _decomp(args.decomp, inputs)
    chi = _vector(args.vector, inputs, "vector")
    alpha = li.expand_in_li_basis(d, chi)
    err = float(np.max(np.abs(d.vectors @ alpha - chi)))
    return {"coefficients": fmt.encode_vector(alpha)}, [
        _check("sum alpha_i phi_i = chi", err, li.RECONSTRUCT_TOL * linalg.tolerance_scale())
    ]


def cmd_observable(args, inputs):
    state = _state(args, inputs)
    a = _observable(args.observable, inputs)
    rho = st.reduced_states(state)[a.subsystem_tag - 1]
    form = observables.partial_spectral_form(a, rho)
    out = {
        "state_compatible": observables.is_state_compatible(a, rho),
        "range_compatible": observables.is_range_compatible(a, rho),
        "relevant": observables.is_relevant(a, rho),
        "detectable_eigenvalues": fmt.encode_reals(form.detectable_eigenvalues),
        "detectable_eigenvectors": fmt.encode_columns(form.detectable_eigenvectors),
        "detectable_part": fmt.encode_matrix(form.detectable_part()),
        "remainder": fmt.encode_matrix(form.remainder),
        "cross": fmt.encode_matrix(form.cross),
    }
    if out["relevant"]:
        out["relevant_basis"] = fmt.basis_to_dict(observables.relevant_basis(a, rho))
    return out, []


def cmd_twin(args, inputs):
    state = _state(args, inputs)
    a = _observable(args.observable, inputs)
    if args.spectrum is not None:
        inputs["spectrum"] = [float(x) for x in args.spectrum]
    inputs["generalized"] = args.generalized
    fn = observables.generalized_twin_partner if args.generalized else observables.twin_partner
    b = fn(a, state, args.spectrum)
    cls = observables.classify_pair(*((a, b) if a.subsystem_tag == 1 else (b, a)), state)
    return {"partner": fmt.observable_to_dict(b), "pair_class": cls.value}, [
        _check("partner forms a generalized twin pair", 0.0 if cls is not observables.PairClass.NOT_GENERALIZED_TWIN else 1.0, 0.0)
    ]


def cmd_classify_pair(args, inputs):
    state = _state(args, inputs)
    a1 = _observable(args.observable, inputs, "observable")
    a2 = _observable(args.partner, inputs, "partner")
    return {"pair_class": observables.classify_pair(a1, a2, state).value}, []


def cmd_remote_decomposition(args, inputs):
    ctx = diagrams.DiagramContext(_state(args, inputs))
    e = _basis(args.basis, inputs)
    d = diagrams.remote_decomposition_from_onb(ctx, e)
    err = float(np.max(np.abs(d.density() - ctx.rho2)))
    return {"decomposition": fmt.decomposition_to_dict(d)}, [
        _check("sum p_i |phi_i><phi_i| = rho2", err, li.RECONSTRUCT_TOL * linalg.tolerance_scale())
    ]


def cmd_diagram_map(args, inputs):
    ctx = diagrams.DiagramContext(_state(args, inputs))
    inputs["arrow"] = args.arrow
    inputs["diagram2"] = args.diagram2
    if args.diagram2:
        if not args.vector:
            raise UsageError("--diagram2 needs --vector")
        v = _vector(args.vector, inputs, "vector")
        image = diagrams.diagram2_maps(ctx, v, args.arrow)
        _, p = diagrams.diagram2_map(ctx, args.arrow, v)
        return {"vector": fmt.encode_vector(image), "weight": _real(p)}, []
    src = args.arrow.split("->")[0]
    if src not in diagrams.CORNER_KIND:
        raise UsageError(f"unknown arrow {args.arrow!r}")
    if diagrams.CORNER_KIND[src] == "basis":
        if not args.basis:
            raise UsageError(f"arrow {args.arrow} starts at a basis corner; pass --basis")
        value = _basis(args.basis, inputs)
    else:
        if not args.decomp:
            raise UsageError(f"arrow {args.arrow} starts at a decomposition corner; pass --decomp")
        value = _decomp(args.decomp, inputs)
    result = diagrams.apply_arrow(ctx, args.arrow, value)
    if isinstance(result, li.Decomposition):
        return {"decomposition": fmt.decomposition_to_dict(result)}, []
    return {"basis": fmt.basis_to_dict(result)}, []


def cmd_diagram_check(args, inputs):
    tol = args.tol
    inputs["tolerance"] = tol
    if args.random is not None:
        if args.state or args.basis:
            raise UsageError("--random cannot be combined with --state/--basis")
        if args.dims is None:
            raise UsageError("--random needs --dims d1 d2")
        d1, d2 = args.dims
        inputs.update(random=args.random, dims=[d1, d2], seed=args.seed)
        rng = np.random.default_rng(args.seed)
        per_identity: dict[str, float] = {}
        runs = []
        for i in range(args.random):
            s = instances.random_state(rng, d1, d2)
            ctx = diagrams.DiagramContext(s)
            rep = diagrams.verify_diagram1(ctx, instances.random_range_basis(rng, ctx.rho1), tol)
            for c in rep.checks:
                per_identity[c.identity] = max(per_identity.get(c.identity, 0.0), c.max_deviation)
            runs.append({"instance": i, "passed": rep.passed, "max_deviation": _real(rep.max_deviation)})
        scaled = tol * linalg.tolerance_scale()
        checks = [_check(k, v, scaled) for k, v in per_identity.items()]
        return {"instances": runs, "all_passed": all(r["passed"] for r in runs)}, checks
    if not args.state:
        raise UsageError("pass --state (optionally with --basis) or --random N --dims d1 d2")
    ctx = diagrams.DiagramContext(_state(args, inputs))
    basis = _basis(args.basis, inputs) if args.basis else ctx.spec1.range_vectors
    rep = diagrams.verify_diagram1(ctx, basis, tol)
    doc = _report(rep)
    return {"passed": doc["passed"], "max_deviation": doc["max_deviation"]}, doc["checks"]


def cmd_prepare(args, inputs):
    ctx = diagrams.DiagramContext(_state(args, inputs))
    phi = _vector(args.target, inputs, "target")
    cls = preparation.classify_target(ctx, phi)
    if not preparation.is_preparable(ctx, phi):
        raise PreconditionError("is_preparable", "target is outside the range of rho_2")
    plan = preparation.plan_preparation(ctx, phi)
    tol = preparation.CHARACTERISTIC_TOL * linalg.tolerance_scale()
    members = []
    checks = [_check("max_probability = characteristic weight", abs(plan.max_probability - plan.characteristic_weight), tol)]
    for a2, j in plan.family.exemplars():
        ev = preparation.event_probability(ctx, j)
        dev = linalg.phase_distance(ev.remote_state, phi) if ev.occurs else math.inf
        members.append({"alpha_squared": a2, "event": fmt.encode_vector(j), "probability": _real(ev.probability)})
        checks.append(_check(f"member |alpha|^2={a2} prepares target", dev, 1e-8 * linalg.tolerance_scale()))
    return {
        "target_class": cls.value,
        "optimal_event": fmt.encode_vector(plan.optimal_event),
        "max_probability": _real(plan.max_probability),
        "characteristic_weight": _real(plan.characteristic_weight),
        "null_space_basis": fmt.encode_columns(plan.family.null_basis),
        "family_members": members,
    }, checks


def cmd_event(args, inputs):
    ctx = diagrams.DiagramContext(_state(args, inputs))
    j = _vector(args.event, inputs, "event")
    ev = preparation.event_probability(ctx, j)
    return {
        "probability": _real(ev.probability),
        "remote_state": fmt.encode_vector(ev.remote_state) if ev.occurs else None,
    }, []


def cmd_simulate(args, inputs):
    state = _state(args, inputs)
    e = _basis(args.basis, inputs)
    post = None
    kind = measurement.MeasurementKind.REPEATABLE
    if args.second_kind:
        post = _basis(args.second_kind, inputs, "post_vectors")
        kind = measurement.MeasurementKind.SECOND_KIND
    inputs.update(shots=args.shots, seed=args.seed, parallel_shots=args.parallel_shots)
    setup = measurement.MeasurementSetup(state, e, kind, post)
    outcomes = measurement.evolve(setup)
    counts = measurement.sample(setup, args.shots, args.seed, parallel=args.parallel_shots)
    rho2 = st.reduced_states(state)[1]
    err = float(np.max(np.abs(measurement.remote_ensemble(outcomes) - rho2)))
    out = {
        "kind": kind.value,
        "outcomes": [
            {
                "pointer_index": o.pointer_index,
                "probability": _real(o.probability),
                "nearby_state": fmt.encode_vector(o.nearby_state),
                "remote_state": fmt.encode_vector(o.remote_state),
            }
            for o in outcomes
        ],
        "counts": {str(k): v for k, v in counts.items()},
        "frequencies": {str(k): v / args.shots for k, v in counts.items()},
    }
    if args.select is not None:
        inputs["select"] = args.select
        c = measurement.select(setup, args.select)
        out["selected"] = {
            "pointer_index": c.pointer_index,
            "probability": _real(c.probability),
            "pointer_state": fmt.encode_vector(np.eye(c.n_pointers)[c.pointer_index]),
            "nearby_state": fmt.encode_vector(c.nearby_state),
            "remote_state": fmt.encode_vector(c.remote_state),
        }
    return out, [_check("sum p_i |phi_i><phi_i| = rho2", err, 1e-10 * linalg.tolerance_scale())]


def cmd_random_state(args, inputs):
    d1, d2 = args.dims
    inputs.update(dims=[d1, d2], seed=args.seed, rank=args.rank)
    s = instances.random_state(np.random.default_rng(args.seed), d1, d2, args.rank)
    return {"state": fmt.state_to_dict(s, label=f"random {d1}x{d2} seed {args.seed}")}, []


# ---------------------------------------------------------------- parser


def _add_rho(p) -> None:
    p.add_argument("--state", help="state file")
    p.add_argument("--subsystem", type=int, choices=(1, 2), default=1, help="reduced state to use (default 1)")
    p.add_argument("--rho", help="density-matrix file (instead of --state)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entkit", description="Bipartite pure-state entanglement toolkit.")
    parser.add_argument("-o", "--output", help="write the JSON document here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_, state=True):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        if state:
            p.add_argument("--state", required=True, help="state file")
        return p

    cmd("schmidt", cmd_schmidt, "Schmidt decomposition")
    cmd("correlation-op", cmd_correlation_op, "correlation operator and its identities")
    cmd("reduce", cmd_reduce, "reduced density operators")
    p = cmd("antilinear", cmd_antilinear, "antilinear representative, partial scalar product, HS inner product")
    p.add_argument("--vector", help="subsystem-1 vector file for the partial scalar product")
    p.add_argument("--other", help="second state file for the Hilbert-Schmidt inner product")

    p = cmd("linalg", cmd_linalg, "canonical linear-algebra kernels", state=False)
    p.add_argument("linalg_op", choices=("eig", "svd", "sqrt", "projector", "pinv"))
    p.add_argument("--matrix", required=True, help="matrix file")
    p.add_argument("--power", type=float, default=-1.0, choices=(-1.0, -0.5, 0.5), help="power for pinv")

    p = cmd("independence", cmd_independence, "linear-independence predicates", state=False)
    p.add_argument("--vectors", required=True, help="vector-list file")

    p = cmd("cvl", cmd_cvl, "decomposition from an orthonormal basis of the range", state=False)
    _add_rho(p)
    p.add_argument("--basis", required=True)
    p = cmd("cvl-inverse", cmd_cvl_inverse, "orthonormal basis from a decomposition", state=False)
    _add_rho(p)
    p.add_argument("--decomp", required=True)
    p = cmd("char-weight", cmd_char_weight, "characteristic weight of a target vector", state=False)
    _add_rho(p)
    p.add_argument("--target", required=True)
    p = cmd("expand", cmd_expand, "expansion coefficients in a decomposition", state=False)
    p.add_argument("--decomp", required=True)
    p.add_argument("--vector", required=True)

    p = cmd("observable", cmd_observable, "compatibility and relevance of an observable")
    p.add_argument("--observable", required=True)
    p = cmd("twin", cmd_twin, "twin partner of an observable")
    p.add_argument("--observable", required=True)
    p.add_argument("--spectrum", type=float, nargs="+", help="partner detectable eigenvalues")
    p.add_argument("--generalized", action="store_true", help="allow extended twins (relevance only)")
    p = cmd("classify-pair", cmd_classify_pair, "classify an observable pair")
    p.add_argument("--observable", required=True, help="subsystem-1 observable")
    p.add_argument("--partner", required=True, help="subsystem-2 observable")

    p = cmd("remote-decomposition", cmd_remote_decomposition, "remote decomposition from a full basis of subsystem 1")
    p.add_argument("--basis", required=True)
    p = cmd("diagram-map", cmd_diagram_map, "apply one arrow of the correlation diagrams")
    p.add_argument("--arrow", required=True, help="e.g. A->D")
    p.add_argument("--basis")
    p.add_argument("--decomp")
    p.add_argument("--vector")
    p.add_argument("--diagram2", action="store_true", help="map a single vector")
    p = cmd("diagram-check", cmd_diagram_check, "verify commutativity of the correlation diagram", state=False)
    p.add_argument("--state")
    p.add_argument("--basis")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--dims", type=int, nargs=2, metavar=("D1", "D2"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=diagrams.DIAGRAM_TOL)

    p = cmd("prepare", cmd_prepare, "remote preparation of a subsystem-2 target")
    p.add_argument("--target", required=True)
    p = cmd("event", cmd_event, "probability and remote state of a subsystem-1 event")
    p.add_argument("--event", required=True)

    p = cmd("simulate", cmd_simulate, "measurement simulation and sampling")
    p.add_argument("--basis", required=True)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--second-kind", help="vector-list file of post-measurement vectors")
    p.add_argument("--parallel-shots", action="store_true")
    p.add_argument("--select", type=int, help="pointer index to read selectively")

    p = cmd("random-state", cmd_random_state, "random state file", state=False)
    p.add_argument("--dims", type=int, nargs=2, required=True, metavar=("D1", "D2"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=int)
    return parser


def run(argv) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the output document."""
    argv = list(argv)
    doc: dict = {"argv": argv}
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        doc.update(status="error", error={"kind": "usage", "message": str(exc)})
        return EXIT_INPUT, doc
    doc["command"] = args.command
    inputs: dict = {}
    doc["inputs"] = inputs
    try:
        results, checks = args.func(args, inputs)
    except PreconditionError as exc:
        doc.update(status="error", error={"kind": "precondition", "condition": exc.condition, "message": str(exc)})
        return EXIT_INPUT, doc
    except UsageError as exc:
        doc.update(status="error", error={"kind": "usage", "message": str(exc)})
        return EXIT_INPUT, doc
    except NumericalError as exc:
        doc.update(status="error", error={"kind": "numerical", "message": str(exc)})
        return EXIT_FAILED, doc
    except (ValidationError, EntkitError) as exc:
        kind = "format" if isinstance(exc, fmt.FormatError) else "input"
        doc.update(status="error", error={"kind": kind, "message": str(exc)})
        return EXIT_INPUT, doc
    passed = all(c["passed"] for c in checks)
    doc["status"] = "pass" if passed else "fail"
    doc["results"] = results
    if checks:
        doc["checks"] = checks
    return (EXIT_OK if passed else EXIT_FAILED), doc


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, doc = run(argv)
    text = fmt.dumps(doc)
    out = next((argv[i + 1] for i, a in enumerate(argv[:-1]) if a in ("-o", "--output")), None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if doc.get("status") == "error":
        sys.stderr.write(f"entkit: {doc['error']['message']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
