"""Entanglement quantifiers for two-qubit states.

Entropies act on a single-qubit reduced state (or directly on its
eigenvalues); concurrence and entanglement of formation act on the full
two-qubit density matrix.  Logarithms are natural throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericError, ValidationError
from .linalg import POSITIVITY_TOL, check_density, dagger

SIGMA_Y2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))

_KINDS = ("von-neumann", "linear", "tsallis", "renyi")


@dataclass(frozen=True)
class EntropyKind:
    """Which entropy to evaluate; ``q`` is used by Tsallis and Renyi only."""

    name: str
    q: float | None = None

    def __post_init__(self):
        if self.name not in _KINDS:
            raise ValidationError(f"unknown entropy kind {self.name!r}")
        if self.name in ("tsallis", "renyi"):
            if self.q is None or not np.isfinite(self.q) or self.q <= 0 or self.q == 1:
                raise ValidationError(f"{self.name} needs q > 0 and q != 1, got {self.q!r}")
        elif self.q is not None:
            raise ValidationError(f"{self.name} entropy takes no q")

    @classmethod
    def parse(cls, text: str) -> EntropyKind:
        """Parse ``'linear'``, ``'von-neumann'``, ``'tsallis:1.5'`` or ``'renyi:2'``."""
        name, _, q = text.partition(":")
        return cls(name, float(q) if q else None)

    def __str__(self):
        return self.name if self.q is None else f"{self.name}:{self.q:g}"


VON_NEUMANN = EntropyKind("von-neumann")
LINEAR = EntropyKind("linear")


def entropy_from_eigs(p, kind: EntropyKind) -> np.ndarray:
    """Entropy of a state given its eigenvalues along the last axis.

    Eigenvalues are clamped into [0, 1] when they overshoot by at most 1e-10;
    larger violations raise :class:`NumericError`.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < -POSITIVITY_TOL) or np.any(p > 1 + POSITIVITY_TOL):
        raise NumericError("eigenvalue outside [0, 1] beyond clamping window")
    p = np.clip(p, 0.0, 1.0)
    if kind.name == "von-neumann":
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, -p * np.log(p), 0.0)
        return terms.sum(axis=-1)
    if kind.name == "linear":
        return 1.0 - np.sum(p * p, axis=-1)
    q = kind.q
    trq = np.sum(p**q, axis=-1)
    if kind.name == "tsallis":
        return (1.0 - trq) / (q - 1.0)
    return np.log(trq) / (1.0 - q)


def entropy(rho, kind: EntropyKind = VON_NEUMANN) -> float:
    """Entropy of a single-qubit density matrix."""
    rho = check_density(rho, dim=2)
    return float(entropy_from_eigs(np.linalg.eigvalsh(rho), kind))


def qubit_eigs(sigma: np.ndarray) -> np.ndarray:
    """Eigenvalues of (stacks of) 2x2 density matrices, descending, in closed form."""
    tr = np.real(sigma[..., 0, 0] + sigma[..., 1, 1])
    det = np.real(sigma[..., 0, 0] * sigma[..., 1, 1] - sigma[..., 0, 1] * sigma[..., 1, 0])
    gap = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
    return np.stack([(tr + gap) / 2, (tr - gap) / 2], axis=-1)


def _spin_flip(rho: np.ndarray) -> np.ndarray:
    return SIGMA_Y2 @ np.conj(rho) @ SIGMA_Y2


def wootters_margin(rho: np.ndarray) -> np.ndarray:
    """``l1 - l2 - l3 - l4`` before clipping at zero (batched).

    The ``l_i`` (square roots of the eigenvalues of ``rho rho~``) are the
    singular values of ``sqrt(rho) sqrt(rho~)``; the SVD keeps the small ones
    accurate to machine precision instead of the square root of it.
    """
    w, v = np.linalg.eigh(rho)
    if np.any(w < -1e-8):
        raise NumericError("density matrix has a negative eigenvalue", residual=float(w.min()))
    sq = (v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ dagger(v)
    lam = np.linalg.svd(sq @ _spin_flip(sq), compute_uv=False)
    return lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]


def concurrence_batch(rho: np.ndarray) -> np.ndarray:
    """Wootters concurrence for a stack of two-qubit density matrices."""
    return np.maximum(0.0, wootters_margin(rho))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    return float(concurrence_batch(check_density(rho)))


def eof_from_concurrence(c) -> np.ndarray:
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    b = 0.5 + 0.5 * np.sqrt(1.0 - c * c)
    return entropy_from_eigs(np.stack([b, 1.0 - b], axis=-1), VON_NEUMANN)


def entanglement_of_formation(rho) -> float:
    """Entanglement of formation, a monotone function of the concurrence."""
    return float(eof_from_concurrence(concurrence(rho)))


def page_mean_entropy(m: int, n: int, exact: bool = False) -> float | Fraction:
    """Mean entanglement entropy of Haar random pure states on C^m x C^n, m <= n.

    With ``exact=True`` the value is returned as a :class:`fractions.Fraction`.
    """
    if m < 1 or n < 1:
        raise ValidationError("dimensions must be positive")
    if m > n:
        raise ValidationError(f"need m <= n, got m={m}, n={n}")
    value = sum((Fraction(1, k) for k in range(n + 1, m * n + 1)), Fraction(0))
    value -= Fraction(m - 1, 2 * n)
    return value if exact else float(value)


def werner_state(p: float, psi=None) -> np.ndarray:
    """``p |psi><psi| + (1 - p) 1/4``; ``psi`` defaults to the Bell state."""
    if psi is None:
        psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    psi = np.asarray(psi, dtype=complex)
    return p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
