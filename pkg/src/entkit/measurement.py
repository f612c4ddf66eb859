"""Measurement chain: apparatus + nearby subsystem + remote subsystem.

A complete measurement in the orthonormal basis ``{e_i}`` of subsystem 1
takes ``|0>_MA |Phi>`` to ``sum_i sqrt(p_i) |i>_MA |e'_i>_1 |phi_i>_2``. The
apparatus pointer states are orthonormal, so the branch index stands in for
them and no apparatus space is materialized unless :meth:`Collapsed.tensor`
is called.

Sampling draws one uniform per shot from a Philox stream keyed by the seed:
shot ``n`` reads word ``n`` of the stream, so any chunking of the shots gives
the same counts.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import decomp as li
from . import linalg
from .diagrams import PROB_FLOOR
from .errors import PreconditionError, ValidationError
from .state import BipartiteState, to_antilinear

_WORDS_PER_BLOCK = 4
_U64_MASK = (1 << 64) - 1
CHUNK_SHOTS = 1 << 16


class MeasurementKind(str, enum.Enum):
    REPEATABLE = "repeatable"
    SECOND_KIND = "second-kind"


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    state: BipartiteState
    basis: np.ndarray
    kind: MeasurementKind = MeasurementKind.REPEATABLE
    post_vectors: np.ndarray | None = None

    def __post_init__(self):
        e = linalg.as_matrix(self.basis, "basis")
        if e.shape[0] != self.state.d1:
            raise ValidationError(f"basis vectors have dimension {e.shape[0]}, subsystem 1 has {self.state.d1}")
        if not linalg.is_orthonormal(e, li.ORTHO_TOL):
            raise PreconditionError("orthonormal", "measurement basis is not orthonormal to 1e-9")
        kind = MeasurementKind(self.kind)
        if self.post_vectors is None:
            post = e.copy()
        else:
            if kind is MeasurementKind.REPEATABLE:
                raise ValidationError("post-measurement vectors are only allowed for second-kind measurements")
            post = linalg.as_matrix(self.post_vectors, "post_vectors")
            if post.shape != e.shape:
                raise ValidationError(f"post_vectors shape {post.shape} does not match basis shape {e.shape}")
            if np.max(np.abs(np.linalg.norm(post, axis=0) - 1.0)) > li.WEIGHT_TOL:
                raise ValidationError("post_vectors must have unit norm")
        a = to_antilinear(self.state)
        p = np.sum(np.abs(a(e)) ** 2, axis=0)
        if abs(p.sum() - 1.0) > 1e-10:
            raise PreconditionError("complete", f"basis does not cover the range of rho_1 (total probability {p.sum()!r})")
        object.__setattr__(self, "basis", e)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "post_vectors", post)


@dataclass(frozen=True)
class TripartiteOutcome:
    pointer_index: int
    probability: float
    nearby_state: np.ndarray
    remote_state: np.ndarray


def evolve(setup: MeasurementSetup) -> list[TripartiteOutcome]:
    """One outcome per branch with probability above the floor."""
    a = to_antilinear(setup.state)
    out = []
    for i in range(setup.basis.shape[1]):
        image = a(setup.basis[:, i])
        p = float(np.vdot(image, image).real)
        if p > PROB_FLOOR:
            out.append(TripartiteOutcome(i, p, setup.post_vectors[:, i].copy(), image / np.sqrt(p)))
    return out


def remote_ensemble(outcomes) -> np.ndarray:
    """``sum_i p_i |phi_i><phi_i|`` over the outcomes."""
    return sum(o.probability * np.outer(o.remote_state, o.remote_state.conj()) for o in outcomes)


@dataclass(frozen=True)
class Collapsed:
    """Product state ``|i>_MA |e'_i>_1 |phi_i>_2`` left by reading pointer ``i``."""

    pointer_index: int
    n_pointers: int
    probability: float
    nearby_state: np.ndarray
    remote_state: np.ndarray

    def tensor(self) -> np.ndarray:
        pointer = np.zeros(self.n_pointers, dtype=complex)
        pointer[self.pointer_index] = 1.0
        return np.kron(pointer, np.kron(self.nearby_state, self.remote_state))


def select(setup: MeasurementSetup, pointer_index: int) -> Collapsed:
    n = setup.basis.shape[1]
    if not 0 <= pointer_index < n:
        raise ValidationError(f"pointer index {pointer_index} out of range 0..{n - 1}")
    for o in evolve(setup):
        if o.pointer_index == pointer_index:
            return Collapsed(pointer_index, n, o.probability, o.nearby_state, o.remote_state)
    raise PreconditionError("nonzero_probability", f"pointer index {pointer_index} has zero probability")


def _uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in [0, 1) for shots ``start..stop-1``."""
    block = start // _WORDS_PER_BLOCK
    offset = start - block * _WORDS_PER_BLOCK
    bitgen = np.random.Philox(key=seed & _U64_MASK, counter=block)
    raw = bitgen.random_raw(offset + (stop - start))[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _count_chunk(seed: int, start: int, stop: int, edges: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(edges, _uniforms(seed, start, stop), side="right")
    return np.bincount(np.minimum(idx, edges.size - 1), minlength=edges.size)


def sample_categorical(probs, shots: int, seed: int, parallel: bool = False) -> np.ndarray:
    """Counts of ``shots`` draws from ``probs``, deterministic in ``(seed, shot index)``."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    p = np.asarray(probs, dtype=float)
    edges = np.cumsum(p / p.sum())
    edges[-1] = 1.0
    chunks = [(s, min(s + CHUNK_SHOTS, shots)) for s in range(0, shots, CHUNK_SHOTS)]
    seed = int(seed)
    if parallel and len(chunks) > 1:
        with ThreadPoolExecutor() as pool:
            parts = list(pool.map(lambda c: _count_chunk(seed, c[0], c[1], edges), chunks))
    else:
        parts = [_count_chunk(seed, a, b, edges) for a, b in chunks]
    return np.sum(parts, axis=0)


def sample(setup: MeasurementSetup, shots: int, seed: int, parallel: bool = False) -> dict[int, int]:
    """Pointer-index counts over ``shots`` repetitions of the measurement."""
    outcomes = evolve(setup)
    counts = sample_categorical([o.probability for o in outcomes], shots, seed, parallel)
    return {o.pointer_index: int(c) for o, c in zip(outcomes, counts)}
