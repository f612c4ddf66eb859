"""Random test instances.

States have i.i.d. standard-normal real and imaginary coefficients, then are
normalized; their reduced states are full rank almost surely. ``rank`` forces
a smaller Schmidt rank.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .state import BipartiteState


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = complex_normal(rng, dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar unitary via QR with the diagonal phase correction."""
    q, r = np.linalg.qr(complex_normal(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(rng: np.random.Generator, d1: int, d2: int, rank: int | None = None) -> BipartiteState:
    if rank is None:
        f = complex_normal(rng, (d1, d2))
    else:
        f = complex_normal(rng, (d1, rank)) @ complex_normal(rng, (rank, d2))
    return BipartiteState(f / np.linalg.norm(f))


def random_range_basis(rng: np.random.Generator, rho: np.ndarray) -> np.ndarray:
    """Random orthonormal basis of the range of ``rho`` (a random relevant basis)."""
    w = linalg.range_basis(rho)
    return w @ random_unitary(rng, w.shape[1])


def random_range_vector(rng: np.random.Generator, rho: np.ndarray) -> np.ndarray:
    w = linalg.range_basis(rho)
    return w @ random_unit_vector(rng, w.shape[1])


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    g = complex_normal(rng, (dim, rank or dim))
    rho = g @ linalg.dagger(g)
    return rho / np.trace(rho).real


def random_sequence(rng: np.random.Generator, dim: int, count: int, dependent: bool) -> np.ndarray:
    """``count`` vectors of length ``dim`` as columns.

    Independent sequences need ``count <= dim`` and are generic. Dependent ones
    either exceed the dimension or have one column, at a random position,
    replaced by a random combination of some of the others.
    """
    if not dependent:
        if count > dim:
            raise ValueError("an independent sequence needs count <= dim")
        return complex_normal(rng, (dim, count))
    cols = complex_normal(rng, (dim, count))
    if count > dim:
        return cols
    if count < 2:
        return np.zeros((dim, count), dtype=complex)
    k = int(rng.integers(count))
    others = [i for i in range(count) if i != k]
    used = rng.choice(others, size=int(rng.integers(1, len(others) + 1)), replace=False)
    cols[:, k] = cols[:, used] @ complex_normal(rng, used.size)
    return cols
