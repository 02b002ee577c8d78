from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randent.errors import NumericError, ValidationError
from randent.linalg import (
    EigSystem,
    cayley_step,
    check_density,
    eigh_batch,
    evolve_unitary,
    hermitian_eigen,
    partial_trace,
    pure_density,
    reduced_from_pure,
)
from randent.su4 import reduced_sigma_of_alpha, rho_of_alpha, sample_haar_angles

from conftest import random_density, random_hermitian, random_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def charpoly_roots(h):
    # Faddeev-LeVerrier coefficients from traces of powers, then companion roots.
    n = h.shape[0]
    m = np.zeros_like(h)
    coeffs = [1.0 + 0j]
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    return np.sort(np.roots(coeffs).real)[::-1]


def test_diagonal_input():
    es = hermitian_eigen(np.diag([3.0, 1.0, -1.0, -2.0]))
    assert np.allclose(es.eigenvalues, [3, 1, -1, -2], atol=1e-14)
    assert np.allclose(np.abs(es.eigenvectors), np.eye(4), atol=1e-14)


def test_unsorted_diagonal_comes_back_descending():
    es = hermitian_eigen(np.diag([-1.0, 2.0, 0.5, 7.0]))
    assert np.allclose(es.eigenvalues, [7, 2, 0.5, -1])


def test_pauli_block():
    h = np.zeros((4, 4))
    h[0, 1] = h[1, 0] = 1
    es = hermitian_eigen(h)
    assert np.allclose(es.eigenvalues, [1, 0, 0, -1], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_eigen_reconstruction_and_charpoly(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng)
    w, v = hermitian_eigen(h)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-10)
    assert np.allclose(h @ v, v * w, atol=1e-10)
    assert np.allclose(w, charpoly_roots(h), atol=1e-8)


def test_eigen_matches_lapack_batch(rng):
    hs = np.stack([random_hermitian(rng) for _ in range(20)])
    batch = eigh_batch(hs)
    for h, w in zip(hs, batch.eigenvalues):
        assert np.allclose(hermitian_eigen(h).eigenvalues, w, atol=1e-12)


def test_degenerate_spectrum_is_handled(rng):
    u = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    h = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ u.conj().T
    w, v = hermitian_eigen(h)
    assert np.allclose(w, [2, 2, -1, -1], atol=1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)


def test_non_hermitian_rejected():
    h = np.zeros((4, 4))
    h[0, 1] = 1.0
    with pytest.raises(ValidationError):
        hermitian_eigen(h)


def test_wrong_shape_rejected():
    with pytest.raises(ValidationError):
        hermitian_eigen(np.eye(3))


def test_evolve_at_zero_is_identity(rng):
    es = hermitian_eigen(random_hermitian(rng))
    assert np.array_equal(evolve_unitary(es, 0.0), np.eye(4))


def test_evolve_global_phase():
    es = hermitian_eigen(np.eye(4))
    assert np.allclose(evolve_unitary(es, 0.7), np.exp(-0.7j) * np.eye(4), atol=1e-14)


def test_evolve_diagonal_at_pi():
    es = hermitian_eigen(np.diag([1.0, -1.0, 0.0, 0.0]))
    assert np.allclose(evolve_unitary(es, np.pi), np.diag([-1, -1, 1, 1]), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(-5, 5), st.floats(-5, 5))
def test_evolution_group_law(seed, t1, t2):
    es = hermitian_eigen(random_hermitian(np.random.default_rng(seed)))
    u1, u2 = evolve_unitary(es, t1), evolve_unitary(es, t2)
    assert np.allclose(u1 @ u1.conj().T, np.eye(4), atol=1e-10)
    assert np.allclose(u1 @ u2, evolve_unitary(es, t1 + t2), atol=1e-9)


def test_partial_trace_product_state():
    rho = pure_density([0, 0, 0, 1])
    assert np.allclose(partial_trace(rho, keep=1), np.diag([0, 1]))
    assert np.allclose(partial_trace(rho, keep=2), np.diag([0, 1]))


def test_partial_trace_bell():
    rho = pure_density(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(partial_trace(rho, keep=1), np.eye(2) / 2)


def test_partial_trace_keeps_the_right_factor():
    a = np.array([[0.7, 0.1j], [-0.1j, 0.3]])
    b = np.array([[0.2, 0.05], [0.05, 0.8]])
    rho = np.kron(a, b)
    assert np.allclose(partial_trace(rho, keep=1), a)
    assert np.allclose(partial_trace(rho, keep=2), b)


def test_partial_trace_matches_chart_formula(rng):
    for a in sample_haar_angles(rng, 50):
        assert np.allclose(partial_trace(rho_of_alpha(a), keep=1), reduced_sigma_of_alpha(a), atol=1e-12)


@pytest.mark.parametrize("keep", [0, 3, "1"])
def test_partial_trace_bad_keep(keep):
    with pytest.raises(ValidationError):
        partial_trace(np.eye(4) / 4, keep=keep)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_schmidt_symmetry_and_trace(seed):
    rng = np.random.default_rng(seed)
    rho = pure_density(random_state(rng))
    s1 = np.linalg.eigvalsh(partial_trace(rho, keep=1))
    s2 = np.linalg.eigvalsh(partial_trace(rho, keep=2))
    assert np.allclose(s1, s2, atol=1e-10)
    mixed = random_density(rng)
    assert abs(np.trace(partial_trace(mixed, keep=1)) - 1) < 1e-12
    assert abs(np.trace(partial_trace(mixed, keep=2)) - 1) < 1e-12


def test_partial_trace_linear(rng):
    r1, r2 = random_density(rng), random_density(rng)
    mix = 0.3 * r1 + 0.7 * r2
    assert np.allclose(partial_trace(mix), 0.3 * partial_trace(r1) + 0.7 * partial_trace(r2), atol=1e-14)


def test_reduced_from_pure_matches_partial_trace(rng):
    psi = random_state(rng)
    assert np.allclose(reduced_from_pure(psi), partial_trace(pure_density(psi)), atol=1e-14)


def test_check_density_rejects_bad_trace():
    with pytest.raises(ValidationError):
        check_density(np.eye(4) / 3)


def test_check_density_rejects_negative():
    with pytest.raises(ValidationError):
        check_density(np.diag([1.2, -0.2, 0, 0]))


def test_cayley_identity_limit(rng):
    h = random_hermitian(rng)
    dt = 1e-8
    dev = np.linalg.norm(cayley_step(h, dt) - np.eye(4), 2)
    assert dev <= np.linalg.norm(h, 2) * dt * (1 + 1e-6)


def test_cayley_diagonal():
    u = cayley_step(np.diag([1.0, -1.0, 0.0, 0.0]), 0.1)
    expect = np.diag([(1 - 0.05j) / (1 + 0.05j), (1 + 0.05j) / (1 - 0.05j), 1, 1])
    assert np.allclose(u, expect, atol=1e-15)


def test_cayley_third_order_local_error(rng):
    h = random_hermitian(rng)
    es = hermitian_eigen(h)
    errs = [np.max(np.abs(cayley_step(h, dt) - evolve_unitary(es, dt))) for dt in (1e-2, 1e-3)]
    order = np.log10(errs[0] / errs[1])
    assert order >= 2.9


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(1e-6, 50.0))
def test_cayley_exactly_unitary(seed, dt):
    u = cayley_step(random_hermitian(np.random.default_rng(seed), 10.0), dt)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


def test_cayley_rejects_nonpositive_dt():
    with pytest.raises(ValidationError):
        cayley_step(np.eye(4), 0.0)


def test_eigsystem_is_namedtuple():
    es = hermitian_eigen(np.eye(4))
    assert isinstance(es, EigSystem)
    w, v = es
    assert w.shape == (4,) and v.shape == (4, 4)


def test_jacobi_nonconvergence_is_numeric(monkeypatch):
    import randent.linalg as la

    monkeypatch.setattr(la, "JACOBI_MAX_SWEEPS", 0)
    h = np.zeros((4, 4))
    h[0, 1] = h[1, 0] = 1
    with pytest.raises(NumericError) as info:
        la.hermitian_eigen(h)
    assert info.value.residual == pytest.approx(1.0)
