"""Quenched randomness: one GUE Hamiltonian per ensemble member, held fixed.

All closed forms take the scaled time ``tau = t * sigma`` (equivalently
``t / sqrt(2A)`` with ``A = 1 / (2 sigma^2)``); raw times only appear in
:func:`evolve_quenched`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .ensemble import (
    AVERAGING_MODES,
    EnsembleSeries,
    Measure,
    parse_measure,
    run_blocks,
    trajectory_rng,
)
from .errors import RootNotFoundError, ValidationError
from .linalg import check_density, dagger, eigh_batch, hermitian_eigen, is_pure
from .measures import wootters_margin


@dataclass(frozen=True)
class GueParams:
    """Width of the GUE: diagonal entries are N(0, sigma^2)."""

    sigma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be finite and positive, got {self.sigma!r}")

    @property
    def A(self) -> float:
        return 1.0 / (2.0 * self.sigma**2)

    def to_tau(self, t):
        return np.asarray(t) * self.sigma

    def to_time(self, tau):
        return np.asarray(tau) / self.sigma


def gue_normalization(A: float) -> float:
    """Integral of ``exp(-A sum E^2) prod (E_n - E_m)^2`` over R^4 (Mehta)."""
    return 9 * np.pi**2 / (2 * A**8)


_IU = np.triu_indices(4, 1)


def gue_from_normals(z: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """Assemble GUE matrices from 16 standard normals per matrix (last axis).

    Layout: 4 diagonal entries, then real and imaginary parts of the six
    upper off-diagonal entries.
    """
    z = np.asarray(z, dtype=float)
    h = np.zeros(z.shape[:-1] + (4, 4), dtype=complex)
    idx = np.arange(4)
    h[..., idx, idx] = z[..., :4]
    off = (z[..., 4:10] + 1j * z[..., 10:16]) / np.sqrt(2)
    h[..., _IU[0], _IU[1]] = off
    h[..., _IU[1], _IU[0]] = np.conj(off)
    return sigma * h


def sample_gue(p: GueParams, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw Hermitian 4x4 GUE matrices with Var(H_jj) = sigma^2."""
    shape = () if size is None else (size,)
    return gue_from_normals(rng.standard_normal(shape + (16,)), p.sigma)


def evolve_quenched(h, rho0, t: float) -> np.ndarray:
    """``rho(t) = e^{-iHt} rho0 e^{iHt}`` in the eigenbasis of ``H``."""
    rho0 = check_density(rho0)
    if t == 0:
        return rho0.copy()
    w, v = hermitian_eigen(h)
    r = v.conj().T @ rho0 @ v
    phase = np.exp(-1j * (w[:, None] - w[None, :]) * t)
    return v @ (phase * r) @ v.conj().T


def f_tau(tau):
    """GUE two-point average ``<exp(-i(E_j - E_k)t)>`` for ``j != k``."""
    t2 = np.asarray(tau, dtype=float) ** 2
    poly = -2 * t2**5 + 25 * t2**4 - 128 * t2**3 + 276 * t2**2 - 288 * t2 + 72
    return np.exp(-t2) * poly / 72


def averaged_rho_analytic(rho0, tau) -> np.ndarray:
    """GUE-averaged state for a pure initial state: a mix of rho0 and 1/4."""
    rho0 = check_density(rho0)
    if not is_pure(rho0):
        raise ValidationError("averaged_rho_analytic needs a pure initial state")
    f = np.asarray(f_tau(tau))[..., None, None]
    return (1 - f) / 5 * np.eye(4) + (1 + 4 * f) / 5 * rho0


def averaged_linear_entropy_analytic(tau):
    """GUE average of the linear entropy, starting from ``|11>``."""
    t2 = np.asarray(tau, dtype=float) ** 2
    return (
        -np.exp(-2 * t2) * (32 * t2**4 - 128 * t2**3 + 168 * t2**2 - 72 * t2 + 9) / 630
        - np.exp(-t2) * (-2 * t2**5 + 25 * t2**4 - 128 * t2**3 + 276 * t2**2 - 288 * t2 + 72) / 840
        - np.exp(-3 * t2) * (-54 * t2**5 + 387 * t2**4 - 832 * t2**3 + 828 * t2**2 - 288 * t2 + 24) / 420
        - np.exp(-4 * t2) * (-256 * t2**5 + 800 * t2**4 - 1024 * t2**3 + 552 * t2**2 - 144 * t2 + 9) / 315
        + 13 / 70
    )


LINEAR_ENTROPY_SATURATION = 13 / 70

INDEX_CLASSES = ("all-distinct", "adjacent-pair", "cross-pair", "double-cross", "double-pair")


def index_class(j: int, k: int, l: int, m: int) -> str:
    """Classify a tuple for ``<exp(-i(E_j - E_k + E_l - E_m)t)>``.

    Rows are tested from the most to the least specific; a tuple such as
    ``j = k = l != m`` matches both pair rows and belongs to adjacent-pair.
    """
    for x in (j, k, l, m):
        if x not in (1, 2, 3, 4):
            raise ValidationError(f"indices must lie in 1..4, got {(j, k, l, m)}")
    if (j == k and l == m) or (j == m and k == l):
        return "double-pair"
    if j == l and k == m:
        return "double-cross"
    if (j == k and l != m) or (j == m and k != l) or (k == l and j != m) or (l == m and j != k):
        return "adjacent-pair"
    if (j == l and k != m) or (k == m and j != l):
        return "cross-pair"
    return "all-distinct"


def _table_row(cls: str, s):
    """Printed closed forms, in the table's own time variable ``s = sqrt(2) tau``."""
    s = np.asarray(s, dtype=float)
    s2 = s * s
    if cls == "all-distinct":
        return np.exp(-s2) * (9 - 36 * s2 + 42 * s2**2 - 16 * s2**3 + 2 * s2**4) / 9
    if cls == "adjacent-pair":
        return np.exp(-s2 / 2) * (
            1152 - 2304 * s2 + 1104 * s2**2 - 256 * s2**3 + 25 * s2**4 - s2**5
        ) / 1152
    if cls == "cross-pair":
        return np.exp(-1.5 * s2) * (
            384 - 2304 * s2 + 3312 * s2**2 - 1664 * s2**3 + 387 * s2**4 - 27 * s2**5
        ) / 384
    if cls == "double-cross":
        return np.exp(-2 * s2) * (
            9 - 72 * s2 + 138 * s2**2 - 128 * s2**3 + 50 * s2**4 - 8 * s2**5
        ) / 9
    return np.ones_like(s)


def r_table(j: int, k: int, l: int, m: int, s):
    """Four-point table entry at the table's time variable ``s``.

    The table is printed in a time variable ``s = sqrt(2) * tau``; see
    :func:`r_jklm` for the value at scaled time ``tau``.
    """
    return _table_row(index_class(j, k, l, m), s)


def r_jklm(j: int, k: int, l: int, m: int, tau):
    """GUE average ``<exp(-i(E_j - E_k + E_l - E_m) tau / sigma)>``."""
    return _table_row(index_class(j, k, l, m), np.sqrt(2) * np.asarray(tau, dtype=float))


def class_representatives() -> dict[str, list[tuple[int, int, int, int]]]:
    """All 256 index tuples grouped by class."""
    out = {c: [] for c in INDEX_CLASSES}
    for t in product(range(1, 5), repeat=4):
        out[index_class(*t)].append(t)
    return out


def eof_vanishing_time(rho0, tau_max: float = 5.0, tol: float = 1e-6) -> float:
    """First scaled time at which the averaged state becomes separable.

    Bisection on the Wootters margin ``l1 - l2 - l3 - l4`` of the averaged
    state, whose positive part is the concurrence.
    """
    rho0 = check_density(rho0)

    def margin(tau):
        return wootters_margin(averaged_rho_analytic(rho0, tau))

    lo, hi = 0.0, tau_max
    if margin(lo) <= 0:
        raise ValidationError("initial state must be entangled")
    if margin(hi) > 0:
        raise RootNotFoundError(f"no sign change of the concurrence on [0, {tau_max}]")
    # Bracket the first crossing on a coarse grid, then bisect.
    grid = np.linspace(lo, hi, 501)
    for a, b in zip(grid[:-1], grid[1:]):
        if margin(b) <= 0:
            lo, hi = a, b
            break
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def psi_c(c: float) -> np.ndarray:
    """Initial state ``(c, 0, 0, sqrt(1 - c^2))``."""
    if not (0 <= c <= 1):
        raise ValidationError(f"c must lie in [0, 1], got {c!r}")
    return np.array([c, 0, 0, np.sqrt(1 - c * c)], dtype=complex)


@dataclass
class QuenchedEnsembleConfig:
    n_trajectories: int
    tau_grid: np.ndarray
    master_seed: int
    initial_c: float = 0.0
    averaging_mode: str = "average-of-entanglement"
    measure: Measure = "linear"
    sigma: float = 1.0
    threads: int | None = None
    psi0: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.tau_grid = np.asarray(self.tau_grid, dtype=float)
        if self.n_trajectories < 1:
            raise ValidationError("n_trajectories must be >= 1")
        if self.tau_grid.ndim != 1 or len(self.tau_grid) == 0:
            raise ValidationError("tau_grid must be a non-empty 1-d sequence")
        if np.any(self.tau_grid < 0) or np.any(np.diff(self.tau_grid) <= 0):
            raise ValidationError("tau_grid must be non-negative and strictly ascending")
        if not (0 <= self.initial_c <= 1 / np.sqrt(2) + 1e-12):
            raise ValidationError("initial_c must lie in [0, 1/sqrt(2)]")
        if self.averaging_mode not in AVERAGING_MODES:
            raise ValidationError(f"unknown averaging mode {self.averaging_mode!r}")
        self.measure = parse_measure(self.measure)
        GueParams(self.sigma)
        if self.psi0 is None:
            self.psi0 = psi_c(self.initial_c)
        else:
            self.psi0 = np.asarray(self.psi0, dtype=complex)
            if self.psi0.shape != (4,) or not np.isclose(np.linalg.norm(self.psi0), 1, atol=1e-12):
                raise ValidationError("psi0 must be a normalised 4-vector")


def quenched_states(cfg: QuenchedEnsembleConfig, lo: int, hi: int) -> np.ndarray:
    """State vectors of trajectories ``lo..hi-1`` on the grid, shape ``(m, T, 4)``."""
    z = np.stack([trajectory_rng(cfg.master_seed, i).standard_normal(16) for i in range(lo, hi)])
    w, v = eigh_batch(gue_from_normals(z, cfg.sigma))
    coef = dagger(v) @ cfg.psi0
    t = GueParams(cfg.sigma).to_time(cfg.tau_grid)
    phase = np.exp(-1j * w[:, None, :] * t[None, :, None])
    psi = np.einsum("mij,mtj->mti", v, phase * coef[:, None, :])
    psi[:, t == 0, :] = cfg.psi0
    return psi


def run_quenched_ensemble(cfg: QuenchedEnsembleConfig) -> EnsembleSeries:
    """Monte Carlo mean and standard error of the configured observable."""
    return run_blocks(
        lambda lo, hi: quenched_states(cfg, lo, hi),
        n=cfg.n_trajectories,
        grid=cfg.tau_grid,
        measure=cfg.measure,
        mode=cfg.averaging_mode,
        grid_name="tau",
        pure=True,
        threads=cfg.threads,
        metadata={
            "command": "quenched",
            "n": cfg.n_trajectories,
            "c": cfg.initial_c,
            "mode": cfg.averaging_mode,
            "measure": str(cfg.measure),
            "sigma": cfg.sigma,
            "seed": cfg.master_seed,
        },
    )


def gue_phase_average(
    coeffs: tuple[int, int, int, int], tau, n: int, rng: np.random.Generator, sigma: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """MC estimate of ``Re <exp(-i(E_j - E_k + E_l - E_m) tau/sigma)>`` and its stderr.

    Eigenvalues come from diagonalising sampled GUE matrices; the labelling
    is made exchangeable by averaging over every tuple of the same class.
    """
    cls = index_class(*coeffs)
    tuples = np.array(class_representatives()[cls]) - 1
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    sums = np.zeros(len(tau))
    sq = np.zeros(len(tau))
    done = 0
    while done < n:
        m = min(100_000, n - done)
        e = np.linalg.eigvalsh(sample_gue(GueParams(sigma), rng, m))
        expo = e[:, tuples[:, 0]] - e[:, tuples[:, 1]] + e[:, tuples[:, 2]] - e[:, tuples[:, 3]]
        vals = np.cos(expo[:, None, :] * (tau / sigma)[None, :, None]).mean(axis=-1)
        sums += vals.sum(axis=0)
        sq += (vals * vals).sum(axis=0)
        done += m
    mean = sums / n
    return mean, np.sqrt((sq / n - mean**2) / (n - 1))
