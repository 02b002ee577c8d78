"""Fixed-size complex linear algebra for two-qubit states.

Matrices are plain ``numpy`` arrays of shape ``(4, 4)`` (or ``(2, 2)`` for
single-qubit reduced states).  The ``check_*`` helpers enforce the invariants
of each role (Hermitian, unitary, density matrix) at fixed tolerances.

The basis ordering is ``|00>, |01>, |10>, |11>``; qubit 1 is the left factor.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NumericError, ValidationError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10

JACOBI_MAX_SWEEPS = 100
JACOBI_OFFDIAG_TOL = 1e-13

IDENTITY4 = np.eye(4, dtype=complex)


class EigSystem(NamedTuple):
    """Spectral decomposition ``H = V diag(E) V^dagger``.

    ``eigenvalues`` are sorted in descending order and ``eigenvectors`` holds
    the matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, dim: int = 4) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.shape != (dim, dim):
        raise ValidationError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    return m


def allclose(a, b, atol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= atol)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def check_hermitian(h, dim: int = 4, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_matrix(h, dim)
    err = np.max(np.abs(h - h.conj().T))
    if err > tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {err:.3e})")
    return h


def check_unitary(u, dim: int = 4, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u, dim)
    err = np.max(np.abs(u @ u.conj().T - np.eye(dim)))
    if err > tol:
        raise ValidationError(f"matrix is not unitary (max deviation {err:.3e})")
    return u


def check_density(rho, dim: int = 4) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    rho = check_hermitian(rho, dim)
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"density matrix trace is {tr.real:.15g}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -POSITIVITY_TOL:
        raise ValidationError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    if dim == 2 and w[-1] > 1.0 + POSITIVITY_TOL:
        raise ValidationError(f"reduced state eigenvalue {w[-1]:.3e} exceeds 1")
    return rho


def is_pure(rho: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(rho @ rho - rho)) <= tol)


def pure_density(psi) -> np.ndarray:
    """Projector ``|psi><psi|`` for a normalised state vector."""
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if not np.isclose(nrm, 1.0, rtol=0, atol=1e-12):
        raise ValidationError(f"state vector has norm {nrm:.15g}")
    return np.outer(psi, psi.conj())


def _jacobi_rotation(a: np.ndarray, p: int, q: int) -> np.ndarray:
    """Unitary acting on columns p, q that annihilates the (p, q) entry of ``a``."""
    b = a[p, q]
    r = abs(b)
    phase = b / r
    zeta = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    g = np.eye(a.shape[0], dtype=complex)
    # diag(1, conj(phase)) makes the block real symmetric; then a real rotation.
    g[p, p] = c
    g[p, q] = s
    g[q, p] = -s * np.conj(phase)
    g[q, q] = c * np.conj(phase)
    return g


def hermitian_eigen(h) -> EigSystem:
    """Diagonalise a Hermitian 4x4 matrix with cyclic complex Jacobi sweeps.

    Raises :class:`ValidationError` for non-Hermitian input and
    :class:`NumericError` if the off-diagonal mass has not dropped below
    threshold after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    a = check_hermitian(h).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    # Threshold is relative to the matrix scale, floored at 1.
    thresh = JACOBI_OFFDIAG_TOL * max(1.0, float(np.linalg.norm(a)))
    off = np.max(np.abs(a - np.diag(np.diag(a))))
    for _ in range(JACOBI_MAX_SWEEPS):
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                g = _jacobi_rotation(a, p, q)
                a = g.conj().T @ a @ g
                a[q, p] = a[p, q] = 0.0
                v = v @ g
        a = 0.5 * (a + a.conj().T)
        off = np.max(np.abs(a - np.diag(np.diag(a))))
    else:
        if off >= thresh:
            raise NumericError("Jacobi iteration did not converge", residual=off)
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return EigSystem(w[order], v[:, order])


def eigh_batch(h: np.ndarray) -> EigSystem:
    """LAPACK eigendecomposition for a stack of Hermitian matrices (hot paths)."""
    w, v = np.linalg.eigh(h)
    return EigSystem(w[..., ::-1], v[..., ::-1])


def evolve_unitary(sys: EigSystem, t: float) -> np.ndarray:
    """``exp(-i H t)`` assembled from the spectral decomposition of ``H``."""
    if t == 0:
        return IDENTITY4.copy()
    w, v = sys
    return (v * np.exp(-1j * np.asarray(w) * t)[..., None, :]) @ dagger(v)


def partial_trace(rho, keep: int = 1) -> np.ndarray:
    """Reduced state of qubit ``keep`` (1 or 2) of a two-qubit density matrix.

    Also accepts stacks of shape ``(..., 4, 4)``; validation is skipped for
    stacks.
    """
    if keep not in (1, 2):
        raise ValidationError(f"keep must be 1 or 2, got {keep!r}")
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 2:
        rho = check_density(rho)
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    if keep == 1:
        return np.einsum("...ajbj->...ab", r)
    return np.einsum("...jajb->...ab", r)


def reduced_from_pure(psi: np.ndarray) -> np.ndarray:
    """Reduced state of qubit 1 for (a stack of) pure state vectors."""
    m = np.asarray(psi).reshape(np.shape(psi)[:-1] + (2, 2))
    return m @ dagger(m)


def cayley_step(h, dt: float) -> np.ndarray:
    """One Cayley step ``(1 + i H dt/2)^-1 (1 - i H dt/2)``.

    Exactly unitary for Hermitian ``H``; agrees with ``exp(-i H dt)`` up to
    ``O(dt^3)``.  Accepts a stack of matrices of shape ``(..., 4, 4)``.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt!r}")
    h = np.asarray(h, dtype=complex)
    a = np.eye(h.shape[-1]) + 0.5j * dt * h
    try:
        return np.linalg.solve(a, dagger(a))
    except np.linalg.LinAlgError as exc:
        raise NumericError("singular Cayley denominator") from exc
