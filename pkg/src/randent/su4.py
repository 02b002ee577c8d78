"""SU(4) Euler-angle chart, Haar measure and Haar sampling.

A group element is the ordered product of fifteen one-parameter subgroups

    U(a) = e^{i l3 a1} e^{i l2 a2} e^{i l3 a3} e^{i l5 a4} e^{i l3 a5} e^{i l10 a6}
           e^{i l3 a7} e^{i l2 a8} e^{i l3 a9} e^{i l5 a10} e^{i l3 a11}
           e^{i l2 a12} e^{i l3 a13} e^{i l8 a14} e^{i l15 a15}

with the generalised Gell-Mann matrices ``l_k`` below.  Angle arrays use
zero-based positions, so ``a[5]`` is the sixth angle.  Most functions accept
either one point of shape ``(15,)`` or a batch of shape ``(n, 15)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import NumericError, ValidationError
from .linalg import IDENTITY4

N_ANGLES = 15

#: Upper end of each angle's range; every range starts at 0.
ANGLE_UPPER = np.array(
    [
        np.pi,  # a1
        np.pi / 2,
        2 * np.pi,
        np.pi / 2,
        2 * np.pi,
        np.pi / 2,  # a6
        np.pi,
        np.pi / 2,
        2 * np.pi,
        np.pi / 2,  # a10
        np.pi,
        np.pi / 2,
        2 * np.pi,
        np.sqrt(3) * np.pi,
        np.sqrt(8 / 3) * np.pi,
    ]
)

#: Closed-form group volume of the chart, sqrt(2) pi^9 / 3.
GROUP_VOLUME = np.sqrt(2) * np.pi**9 / 3

#: Generator used by each of the fifteen factors (1-based Gell-Mann index).
FACTOR_GENERATORS = (3, 2, 3, 5, 3, 10, 3, 2, 3, 5, 3, 2, 3, 8, 15)

# Two-level block touched by each real-rotation generator (0-based rows).
_ROTATION_PLANE = {2: (0, 1), 5: (0, 2), 10: (0, 3)}
# Diagonal of each diagonal generator.
_DIAGONAL = {
    3: np.array([1.0, -1.0, 0.0, 0.0]),
    8: np.array([1.0, 1.0, -2.0, 0.0]) / np.sqrt(3),
    15: np.array([1.0, 1.0, 1.0, -3.0]) / np.sqrt(6),
}


def _unit(i: int, j: int) -> np.ndarray:
    e = np.zeros((4, 4), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return e


def gell_mann() -> np.ndarray:
    """The fifteen 4x4 Gell-Mann generators as an array of shape ``(15, 4, 4)``.

    ``gell_mann()[k - 1]`` is the generator usually written ``lambda_k``.
    """
    E = _unit
    lam = [
        E(1, 2) + E(2, 1),
        1j * (E(2, 1) - E(1, 2)),
        E(1, 1) - E(2, 2),
        E(1, 3) + E(3, 1),
        1j * (E(3, 1) - E(1, 3)),
        E(2, 3) + E(3, 2),
        1j * (E(3, 2) - E(2, 3)),
        (E(1, 1) + E(2, 2) - 2 * E(3, 3)) / np.sqrt(3),
        E(1, 4) + E(4, 1),
        1j * (E(4, 1) - E(1, 4)),
        E(2, 4) + E(4, 2),
        1j * (E(4, 2) - E(2, 4)),
        E(4, 3) + E(3, 4),
        1j * (E(4, 3) - E(3, 4)),
        (E(1, 1) + E(2, 2) + E(3, 3) - 3 * E(4, 4)) / np.sqrt(6),
    ]
    return np.array(lam)


def structure_constants(lam: np.ndarray | None = None) -> np.ndarray:
    """``f[j, k, l] = Tr([l_j, l_k] l_l) / (4i)`` for all generator triples."""
    if lam is None:
        lam = gell_mann()
    comm = np.einsum("jab,kbc->jkac", lam, lam) - np.einsum("kab,jbc->jkac", lam, lam)
    return (np.einsum("jkab,lba->jkl", comm, lam) / 4j).real


def check_angles(a) -> np.ndarray:
    """Validate that every angle lies in its closed range; returns a float array."""
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (N_ANGLES,):
        raise ValidationError(f"expected 15 angles in the last axis, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("angles must be finite")
    if np.any(a < 0) or np.any(a > ANGLE_UPPER):
        bad = np.argwhere((a < 0) | (a > ANGLE_UPPER))[0]
        raise ValidationError(f"angle alpha_{bad[-1] + 1} out of range")
    return a


def factor(generator: int, angle) -> np.ndarray:
    """Closed form of ``exp(i * lambda_generator * angle)``; batched over ``angle``."""
    angle = np.asarray(angle, dtype=float)
    out = np.zeros(angle.shape + (4, 4), dtype=complex)
    if generator in _DIAGONAL:
        d = np.exp(1j * angle[..., None] * _DIAGONAL[generator])
        idx = np.arange(4)
        out[..., idx, idx] = d
        return out
    p, q = _ROTATION_PLANE[generator]
    c, s = np.cos(angle), np.sin(angle)
    out[..., :, :] = IDENTITY4
    # exp(i * i(E_qp - E_pq) * x) is the real rotation [[c, s], [-s, c]].
    out[..., p, p] = c
    out[..., q, q] = c
    out[..., p, q] = s
    out[..., q, p] = -s
    return out


def euler_unitary(a, validate: bool = True) -> np.ndarray:
    """The unitary ``U(a)`` of the Euler chart (batched over leading axes)."""
    a = check_angles(a) if validate else np.asarray(a, dtype=float)
    u = factor(FACTOR_GENERATORS[0], a[..., 0])
    for k in range(1, N_ANGLES):
        u = u @ factor(FACTOR_GENERATORS[k], a[..., k])
    return u


def euler_state(a) -> np.ndarray:
    """``U(a)|11>`` from the six angles it depends on (batched)."""
    a = np.asarray(a, dtype=float)
    a1, a2, a3, a4, a5, a6 = (a[..., k] for k in range(6))
    c2, s2 = np.cos(a2), np.sin(a2)
    c4, s4 = np.cos(a4), np.sin(a4)
    c6, s6 = np.cos(a6), np.sin(a6)
    psi = np.empty(a.shape[:-1] + (4,), dtype=complex)
    psi[..., 0] = s6 * c4 * c2 * np.exp(1j * (a1 + a3 + a5))
    psi[..., 1] = -s6 * c4 * s2 * np.exp(1j * (a3 + a5 - a1))
    psi[..., 2] = -s6 * s4 * np.exp(1j * a5)
    psi[..., 3] = c6
    return psi


def rho_of_alpha(a, validate: bool = True) -> np.ndarray:
    """Closed-form ``U(a)|11><11|U(a)^dagger``; depends only on a1..a6."""
    a = check_angles(a) if validate else np.asarray(a, dtype=float)
    a1, a2, a3, a4, a5, a6 = (a[..., k] for k in range(6))
    c2, s2 = np.cos(a2), np.sin(a2)
    c4, s4 = np.cos(a4), np.sin(a4)
    c6, s6 = np.cos(a6), np.sin(a6)
    e = lambda x: np.exp(1j * x)  # noqa: E731
    rho = np.zeros(a.shape[:-1] + (4, 4), dtype=complex)
    rho[..., 0, 0] = c2**2 * c4**2 * s6**2
    rho[..., 0, 1] = -0.5 * e(2 * a1) * c4**2 * np.sin(2 * a2) * s6**2
    rho[..., 0, 2] = -0.5 * e(a1 + a3) * c2 * np.sin(2 * a4) * s6**2
    rho[..., 0, 3] = e(a1 + a3 + a5) * c2 * c4 * c6 * s6
    rho[..., 1, 1] = c4**2 * s2**2 * s6**2
    rho[..., 1, 2] = e(-(a1 - a3)) * c4 * s2 * s4 * s6**2
    rho[..., 1, 3] = -e(-(a1 - a3 - a5)) * c4 * c6 * s2 * s6
    rho[..., 2, 2] = s4**2 * s6**2
    rho[..., 2, 3] = -e(a5) * c6 * s4 * s6
    rho[..., 3, 3] = c6**2
    iu = np.triu_indices(4, 1)
    rho[..., iu[1], iu[0]] = np.conj(rho[..., iu[0], iu[1]])
    return rho


def reduced_sigma_of_alpha(a, validate: bool = True) -> np.ndarray:
    """Closed-form reduced state of qubit 1 of ``rho_of_alpha(a)``."""
    a = check_angles(a) if validate else np.asarray(a, dtype=float)
    a1, a2, a3, a4, a5, a6 = (a[..., k] for k in range(6))
    sig = np.zeros(a.shape[:-1] + (2, 2), dtype=complex)
    sig[..., 0, 0] = np.cos(a4) ** 2 * np.sin(a6) ** 2
    sig[..., 0, 1] = -0.5 * np.exp(1j * (a1 + a3)) * np.sin(2 * a4) * np.sin(
        a6
    ) ** 2 * np.cos(a2) - 0.5 * np.exp(-1j * (a1 - a3 - a5)) * np.sin(a2) * np.sin(
        2 * a6
    ) * np.cos(a4)
    sig[..., 1, 0] = np.conj(sig[..., 0, 1])
    sig[..., 1, 1] = np.cos(a6) ** 2 + np.sin(a4) ** 2 * np.sin(a6) ** 2
    return sig


def _kappa_radicand(a: np.ndarray) -> np.ndarray:
    a1, a2, a4, a5, a6 = a[..., 0], a[..., 1], a[..., 3], a[..., 4], a[..., 5]
    return (
        256
        * np.sin(2 * a2)
        * np.sin(a4)
        * np.sin(a6) ** 3
        * np.cos(a4) ** 2
        * np.cos(2 * a1 - a5)
        * np.cos(a6)
        - 24 * np.sin(a6) ** 2 * np.cos(2 * a2)
        + np.cos(2 * a6) * (8 - 40 * np.sin(a6) ** 2 * np.cos(2 * a2))
        - 32 * np.sin(2 * a6) ** 2 * np.cos(a2) ** 2 * np.cos(2 * a4)
        + 32 * np.sin(a2) ** 2 * np.sin(a6) ** 4 * np.cos(4 * a4)
        + 6 * np.cos(4 * a6)
        + 50
    )


def kappa_eigs(a, validate: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvalues ``(k1, k2)`` of the reduced state, ``k1 >= k2``.

    Tiny negative radicands (above -1e-12) are clamped to zero; anything more
    negative raises :class:`NumericError`.
    """
    a = check_angles(a) if validate else np.asarray(a, dtype=float)
    rad = _kappa_radicand(a)
    if np.any(rad < -1e-12):
        raise NumericError("negative radicand in kappa formula", residual=float(np.min(rad)))
    half_gap = np.sqrt(np.maximum(rad, 0.0)) / 16.0
    k1 = 0.5 + half_gap
    return k1, 1.0 - k1


def haar_density(a) -> np.ndarray:
    """Haar density of the chart (unnormalised; integrates to ``GROUP_VOLUME``)."""
    a = np.asarray(a, dtype=float)
    a2, a4, a6, a8, a10, a12 = (a[..., k] for k in (1, 3, 5, 7, 9, 11))
    return (
        np.sin(2 * a2)
        * np.sin(a4)
        * np.sin(a6) ** 5
        * np.sin(2 * a8)
        * np.sin(a10) ** 3
        * np.sin(2 * a12)
        * np.cos(a4) ** 3
        * np.cos(a6)
        * np.cos(a10)
    )


SamplerKind = Literal["euler-inverse-cdf", "ginibre-qr"]


@dataclass
class HaarSampler:
    """Independent Haar random stream over SU(4).

    ``kind`` selects the construction: inverse-CDF sampling of the chart's
    factorised measure, or QR of a complex Ginibre matrix with the phase of
    ``R``'s diagonal removed.  Equal seeds and kinds yield equal sequences.
    """

    seed: int | np.random.SeedSequence
    kind: SamplerKind = "euler-inverse-cdf"
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("euler-inverse-cdf", "ginibre-qr"):
            raise ValidationError(f"unknown sampler kind {self.kind!r}")
        self.rng = np.random.default_rng(self.seed)

    def angles(self, size: int | None = None) -> np.ndarray:
        if self.kind != "euler-inverse-cdf":
            raise ValidationError("angle sampling requires the euler-inverse-cdf kind")
        return sample_haar_angles(self.rng, size)

    def unitary(self, size: int | None = None) -> np.ndarray:
        if self.kind == "euler-inverse-cdf":
            return euler_unitary(sample_haar_angles(self.rng, size), validate=False)
        return ginibre_qr_unitary(self.rng, size)

    def state(self, size: int | None = None) -> np.ndarray:
        """Haar-random images ``U|11>`` of the product state."""
        if self.kind == "euler-inverse-cdf":
            return euler_state(sample_haar_angles(self.rng, size))
        return ginibre_qr_unitary(self.rng, size)[..., :, 3]


def sample_haar_angles(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw chart angles distributed according to the Haar density."""
    shape = () if size is None else (size,)
    u = rng.random(shape + (N_ANGLES,))
    a = u * ANGLE_UPPER
    # Inverse CDFs of the per-angle factors of the density.
    for k in (1, 7, 11):  # sin(2x)
        a[..., k] = np.arcsin(np.sqrt(u[..., k]))
    a[..., 3] = np.arccos((1.0 - u[..., 3]) ** 0.25)  # sin x cos^3 x
    a[..., 5] = np.arcsin(u[..., 5] ** (1 / 6))  # sin^5 x cos x
    a[..., 9] = np.arcsin(u[..., 9] ** 0.25)  # sin^3 x cos x
    return a


def ginibre_qr_unitary(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar unitary in SU(4) from QR of a complex Ginibre matrix, phases fixed."""
    shape = () if size is None else (size,)
    z = (rng.standard_normal(shape + (4, 4)) + 1j * rng.standard_normal(shape + (4, 4))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    u = q * (d / np.abs(d))[..., None, :]
    # Dividing by a fixed fourth root of det keeps left invariance and lands in SU(4).
    return u / (np.linalg.det(u) ** 0.25)[..., None, None]


def group_volume_mc(n: int, rng: np.random.Generator, chunk: int = 1_000_000) -> tuple[float, float]:
    """Uniform-box Monte Carlo estimate of the chart volume and its standard error."""
    if n < 10_000:
        raise ValidationError("group_volume_mc needs n >= 10^4")
    box = float(np.prod(ANGLE_UPPER))
    total = total_sq = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        mu = haar_density(rng.random((m, N_ANGLES)) * ANGLE_UPPER)
        total += mu.sum()
        total_sq += (mu * mu).sum()
        done += m
    mean = total / n
    var = (total_sq / n - mean**2) * n / (n - 1)
    return box * mean, box * np.sqrt(var / n)


def interior_mask(a, margin: float) -> np.ndarray:
    """True where every angle is at least ``margin`` away from its range ends."""
    a = np.asarray(a, dtype=float)
    return np.all((a >= margin) & (a <= ANGLE_UPPER - margin), axis=-1)
