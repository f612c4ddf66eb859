import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as hst

from entkit import linalg
from entkit.errors import NotPSDError, ValidationError
from entkit.instances import complex_normal, random_density

R2 = np.sqrt(0.5)


def random_hermitian(rng, n):
    g = complex_normal(rng, (n, n))
    return 0.5 * (g + g.conj().T)


# --- eig_hermitian -----------------------------------------------------------


def test_eig_diagonal():
    spec = linalg.eig_hermitian(np.diag([0.75, 0.25]))
    np.testing.assert_allclose(spec.eigenvalues, [0.75, 0.25], atol=1e-15)
    np.testing.assert_allclose(spec.eigenvectors, np.eye(2), atol=1e-15)
    assert spec.rank == 2


def test_eig_identity_is_orthonormal_with_phase_convention():
    spec = linalg.eig_hermitian(np.eye(2))
    np.testing.assert_allclose(spec.eigenvalues, [1, 1])
    assert linalg.is_orthonormal(spec.eigenvectors)
    for v in spec.eigenvectors.T:
        lead = v[np.flatnonzero(np.abs(v) > 1e-8)[0]]
        assert lead.imag == 0 and lead.real > 0


def test_eig_rank_one_projector():
    spec = linalg.eig_hermitian(np.full((2, 2), 0.5))
    np.testing.assert_allclose(spec.eigenvalues, [1, 0], atol=1e-15)
    np.testing.assert_allclose(spec.eigenvectors[:, 0], [R2, R2], atol=1e-15)
    assert spec.rank == 1


@pytest.mark.parametrize("n", range(1, 9))
def test_eig_matches_scipy_and_reconstructs(rng, n):
    h = random_hermitian(rng, n)
    spec = linalg.eig_hermitian(h)
    np.testing.assert_allclose(spec.eigenvalues, scipy.linalg.eigvalsh(h)[::-1], atol=1e-12)
    assert np.linalg.norm(spec.reconstruct() - h) < 1e-10 * np.linalg.norm(h)
    assert linalg.is_orthonormal(spec.eigenvectors, 1e-12)
    assert np.all(np.diff(spec.eigenvalues) <= 0)


def test_eig_is_bit_deterministic(rng):
    h = random_hermitian(rng, 5)
    a, b = linalg.eig_hermitian(h), linalg.eig_hermitian(h.copy())
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


def test_eig_degenerate_group_sorted_by_entries(rng):
    u = np.linalg.qr(complex_normal(rng, (3, 3)))[0]
    h = u @ np.diag([2.0, 2.0, 1.0]) @ u.conj().T
    spec = linalg.eig_hermitian(h)
    keys = [linalg.sort_key(spec.eigenvectors[:, i]) for i in (0, 1)]
    assert keys[0] >= keys[1]
    assert linalg.is_orthonormal(spec.eigenvectors, 1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError, match="Hermitian"):
        linalg.eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_rejects_non_square():
    with pytest.raises(ValidationError, match="square"):
        linalg.eig_hermitian(np.ones((2, 3)))


def test_eig_rejects_non_finite():
    with pytest.raises(ValidationError, match="non-finite"):
        linalg.eig_hermitian(np.array([[np.nan, 0], [0, 1]]))


@settings(max_examples=60, deadline=None)
@given(n=hst.integers(1, 8), seed=hst.integers(0, 2**32 - 1))
def test_eig_reconstruction_property(n, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    spec = linalg.eig_hermitian(h)
    assert np.linalg.norm(spec.reconstruct() - h) < 1e-10 * max(np.linalg.norm(h), 1e-300)


# --- svd --------------------------------------------------------------------


def test_svd_nonnegative_diagonal_is_fixed_point():
    m = np.diag([0.9, 0.4])
    left, s, right = linalg.svd(m)
    np.testing.assert_allclose(s, [0.9, 0.4])
    np.testing.assert_allclose(left, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(right, np.eye(2), atol=1e-15)


def test_svd_scaled_identity():
    np.testing.assert_allclose(linalg.svd(R2 * np.eye(2))[1], [R2, R2], atol=1e-15)


def test_svd_partial_state_values():
    np.testing.assert_allclose(linalg.svd(np.diag([np.sqrt(3) / 2, 0.5]))[1], [np.sqrt(3) / 2, 0.5], atol=1e-15)


@pytest.mark.parametrize("shape", [(2, 2), (3, 5), (6, 2), (4, 4)])
def test_svd_reconstructs_and_matches_numpy(rng, shape):
    m = complex_normal(rng, shape)
    left, s, right = linalg.svd(m)
    np.testing.assert_allclose((left * s) @ right.conj().T, m, atol=1e-12)
    np.testing.assert_allclose(s, np.linalg.svd(m, compute_uv=False), atol=1e-12)
    assert linalg.is_orthonormal(left) and linalg.is_orthonormal(right)
    for col in left.T:
        lead = col[np.flatnonzero(np.abs(col) > 1e-8)[0]]
        assert abs(lead.imag) < 1e-15 and lead.real > 0


# --- op_sqrt / projector / pinv ---------------------------------------------


def test_sqrt_examples():
    np.testing.assert_allclose(linalg.op_sqrt(np.diag([0.75, 0.25])), np.diag([np.sqrt(3) / 2, 0.5]), atol=1e-15)
    np.testing.assert_allclose(linalg.op_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    half = np.full((2, 2), 0.5)
    # a rank-one projector is its own square root
    np.testing.assert_allclose(linalg.op_sqrt(half), half, atol=1e-15)


@pytest.mark.parametrize("n,rank", [(2, None), (4, None), (5, 2), (8, 3)])
def test_sqrt_squares_back(rng, n, rank):
    rho = random_density(rng, n, rank)
    r = linalg.op_sqrt(rho)
    np.testing.assert_allclose(r @ r, rho, atol=1e-9)
    np.testing.assert_allclose(r, r.conj().T, atol=1e-14)


def test_sqrt_matches_scipy_on_full_rank(rng):
    rho = random_density(rng, 4)
    np.testing.assert_allclose(linalg.op_sqrt(rho), scipy.linalg.sqrtm(rho), atol=1e-10)


def test_sqrt_rejects_negative():
    with pytest.raises(NotPSDError):
        linalg.op_sqrt(np.diag([1.0, -0.5]))


def test_projector_examples(s1):
    np.testing.assert_allclose(linalg.range_projector(np.diag([0.75, 0.25])), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(linalg.range_projector(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]), atol=1e-15)
    rho1 = s1.coeffs @ s1.coeffs.conj().T
    np.testing.assert_allclose(linalg.range_projector(rho1), np.diag([1.0, 0.0]), atol=1e-15)


@pytest.mark.parametrize("n,rank", [(3, None), (6, 2), (8, 5)])
def test_projector_is_idempotent_hermitian(rng, n, rank):
    q = linalg.range_projector(random_density(rng, n, rank))
    np.testing.assert_allclose(q @ q, q, atol=1e-12)
    np.testing.assert_allclose(q, q.conj().T, atol=1e-12)
    assert round(np.trace(q).real) == (rank or n)


def test_pinv_examples():
    np.testing.assert_allclose(linalg.pinv_on_range(np.diag([0.75, 0.25]), -1), np.diag([4 / 3, 4]), atol=1e-14)
    np.testing.assert_allclose(linalg.pinv_on_range(np.diag([1.0, 0.0]), -0.5), np.diag([1.0, 0.0]), atol=1e-15)
    np.testing.assert_allclose(
        linalg.pinv_on_range(np.diag([0.75, 0.25]), -0.5), np.diag([2 / np.sqrt(3), 2.0]), atol=1e-14
    )


@pytest.mark.parametrize("n,rank", [(3, None), (5, 2), (7, 4)])
def test_pinv_properties(rng, n, rank):
    rho = random_density(rng, n, rank)
    q = linalg.range_projector(rho)
    inv = linalg.pinv_on_range(rho, -1)
    np.testing.assert_allclose(inv @ rho, q, atol=1e-10)
    np.testing.assert_allclose(inv, np.linalg.pinv(rho, rcond=1e-10, hermitian=True), atol=1e-6 * np.linalg.norm(inv))
    half = linalg.pinv_on_range(rho, -0.5)
    np.testing.assert_allclose(half @ half, inv, atol=1e-8 * np.linalg.norm(inv))
    np.testing.assert_allclose(linalg.pinv_on_range(rho, 0.5), linalg.op_sqrt(rho), atol=1e-14)


def test_pinv_rejects_other_powers():
    with pytest.raises(ValidationError, match="power"):
        linalg.pinv_on_range(np.eye(2), 2)


# --- helpers ----------------------------------------------------------------


def test_rank_threshold_is_relative():
    rho = np.diag([1.0, 1e-13])
    assert linalg.eig_hermitian(rho).rank == 1
    assert linalg.eig_hermitian(1e-6 * rho).rank == 1
    assert linalg.eig_hermitian(np.diag([1.0, 1e-11])).rank == 2


def test_phase_distance_ignores_global_phase(rng):
    v = complex_normal(rng, 4)
    assert linalg.phase_distance(v, np.exp(0.7j) * v) < 1e-14
    assert linalg.phase_distance(v, -v) < 1e-14


def test_tolerance_scale(monkeypatch):
    monkeypatch.setenv("ENTKIT_TOLERANCE_SCALE", "10")
    assert linalg.tolerance_scale() == 10.0
    monkeypatch.setenv("ENTKIT_TOLERANCE_SCALE", "-1")
    with pytest.raises(ValidationError):
        linalg.tolerance_scale()
    monkeypatch.delenv("ENTKIT_TOLERANCE_SCALE")
    assert linalg.tolerance_scale() == 1.0
