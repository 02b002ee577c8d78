"""Temporal randomness: a fresh GUE Hamiltonian at every time step.

The ensemble performs a unitary Brownian motion on SU(4).  Each step draws
``Z`` from the unit-width GUE, sets ``H = Z * sqrt(2D) / sqrt(dt)`` and
applies the Cayley step.  Scaled time is ``tau = 2 D t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_jacobi, roots_jacobi

from .ensemble import (
    AVERAGING_MODES,
    EnsembleSeries,
    Measure,
    parse_measure,
    pure_state_observable,
    run_blocks,
    trajectory_rng,
)
from .errors import NumericError, ValidationError
from .linalg import check_density, dagger, is_pure
from .measures import EntropyKind
from .quenched import gue_from_normals

EULER_GAMMA = float(np.euler_gamma)
DT_GATE = 0.01


@dataclass(frozen=True)
class TemporalParams:
    """Diffusion constant ``D`` and step ``dt``; the GUE width is sqrt(2D)."""

    D: float
    dt: float

    def __post_init__(self):
        if not (np.isfinite(self.D) and self.D > 0):
            raise ValidationError(f"D must be positive, got {self.D!r}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if self.dt * self.sigma**2 > DT_GATE * (1 + 1e-12):
            raise ValidationError(f"dt * sigma^2 = {self.dt * self.sigma**2:g} exceeds {DT_GATE}")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(2 * self.D))

    def to_tau(self, t):
        return 2 * self.D * np.asarray(t)

    def to_time(self, tau):
        return np.asarray(tau) / (2 * self.D)


@dataclass(frozen=True)
class PhiState:
    """Initial state ``(cos phi, 0, 0, sin phi)`` with ``phi`` in (0, pi/4]."""

    phi: float

    def __post_init__(self):
        if not (0 < self.phi <= np.pi / 4 + 1e-15):
            raise ValidationError(f"phi must lie in (0, pi/4], got {self.phi!r}")

    @property
    def is_bell(self) -> bool:
        return abs(self.phi - np.pi / 4) < 1e-15

    def vector(self) -> np.ndarray:
        return np.array([np.cos(self.phi), 0, 0, np.sin(self.phi)], dtype=complex)


BELL = PhiState(np.pi / 4)


def _initial_vector(initial) -> np.ndarray:
    if isinstance(initial, PhiState):
        return initial.vector()
    a = np.asarray(initial, dtype=complex)
    if a.shape == (4,):
        if not np.isclose(np.linalg.norm(a), 1, atol=1e-12):
            raise ValidationError("initial state vector must be normalised")
        return a
    rho = check_density(a)
    if not is_pure(rho):
        raise ValidationError("initial density matrix must be pure")
    w, v = np.linalg.eigh(rho)
    return v[:, -1]


def grid_steps(t_grid, dt: float) -> np.ndarray:
    """Step counts for grid times; each time must be an integer multiple of dt."""
    t = np.asarray(t_grid, dtype=float)
    k = np.rint(t / dt)
    if np.any(np.abs(k * dt - t) > 1e-9 * np.maximum(1.0, np.abs(t))):
        raise ValidationError("every grid time must be an integer multiple of dt")
    return k.astype(int)


@dataclass
class TemporalEnsembleConfig:
    n_trajectories: int
    t_grid: np.ndarray
    params: TemporalParams
    master_seed: int
    initial: object = field(default_factory=lambda: np.array([0, 0, 0, 1], dtype=complex))
    averaging_mode: str = "average-of-entanglement"
    measure: Measure = "linear"
    threads: int | None = None

    def __post_init__(self):
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if self.n_trajectories < 1:
            raise ValidationError("n_trajectories must be >= 1")
        if self.t_grid.ndim != 1 or len(self.t_grid) == 0:
            raise ValidationError("t_grid must be a non-empty 1-d sequence")
        if np.any(self.t_grid < 0) or np.any(np.diff(self.t_grid) <= 0):
            raise ValidationError("t_grid must be non-negative and strictly ascending")
        if self.averaging_mode not in AVERAGING_MODES:
            raise ValidationError(f"unknown averaging mode {self.averaging_mode!r}")
        self.measure = parse_measure(self.measure)
        self.steps = grid_steps(self.t_grid, self.params.dt)
        self.psi0 = _initial_vector(self.initial)


def temporal_states(cfg: TemporalEnsembleConfig, lo: int, hi: int) -> np.ndarray:
    """State vectors of trajectories ``lo..hi-1`` at the grid times, ``(m, T, 4)``."""
    p = cfg.params
    n_steps = int(cfg.steps[-1])
    m = hi - lo
    noise = np.stack(
        [trajectory_rng(cfg.master_seed, i).standard_normal((n_steps, 16)) for i in range(lo, hi)]
    )
    scale = p.sigma / np.sqrt(p.dt)
    psi = np.broadcast_to(cfg.psi0, (m, 4)).copy()
    out = np.empty((m, len(cfg.steps), 4), dtype=complex)
    record = {int(k): i for i, k in enumerate(cfg.steps)}
    if 0 in record:
        out[:, record[0]] = psi
    eye = np.eye(4)
    for step in range(1, n_steps + 1):
        h = gue_from_normals(noise[:, step - 1], scale)
        a = eye + 0.5j * p.dt * h
        psi = np.linalg.solve(a, (dagger(a) @ psi[..., None]))[..., 0]
        if step in record:
            out[:, record[step]] = psi
    if not np.all(np.isfinite(out)):
        bad = lo + int(np.argwhere(~np.isfinite(out))[0][0])
        raise NumericError("trajectory diverged", index=bad)
    return out


def brownian_trajectory(cfg: TemporalEnsembleConfig, trajectory_index: int) -> np.ndarray:
    """Density matrices of one trajectory at the grid times, shape ``(T, 4, 4)``."""
    psi = temporal_states(cfg, trajectory_index, trajectory_index + 1)[0]
    return psi[:, :, None] * np.conj(psi[:, None, :])


def run_temporal_ensemble(cfg: TemporalEnsembleConfig, chunk: int = 512) -> EnsembleSeries:
    """Monte Carlo mean and standard error on the raw time grid ``t``."""
    return run_blocks(
        lambda lo, hi: temporal_states(cfg, lo, hi),
        n=cfg.n_trajectories,
        grid=cfg.t_grid,
        measure=cfg.measure,
        mode=cfg.averaging_mode,
        grid_name="t",
        pure=True,
        threads=cfg.threads,
        chunk=chunk,
        metadata={
            "command": "temporal",
            "n": cfg.n_trajectories,
            "D": cfg.params.D,
            "dt": cfg.params.dt,
            "mode": cfg.averaging_mode,
            "measure": str(cfg.measure),
            "seed": cfg.master_seed,
        },
    )


def averaged_rho_temporal_analytic(rho0, D: float, t) -> np.ndarray:
    """Ensemble-averaged state: exponential relaxation towards 1/4 at rate 8D."""
    rho0 = check_density(rho0)
    decay = np.exp(-8 * D * np.asarray(t, dtype=float))[..., None, None]
    return np.eye(4) / 4 + (rho0 - np.eye(4) / 4) * decay


def averaged_linear_entropy_temporal(L0: float, D: float, t):
    """Ensemble-averaged linear entropy: relaxation towards 1/5 at rate 20D."""
    if not (0 <= L0 <= 0.5):
        raise ValidationError(f"L0 must lie in [0, 1/2], got {L0!r}")
    return 0.2 + (L0 - 0.2) * np.exp(-20 * D * np.asarray(t, dtype=float))


UNENTANGLED = "unentangled"


def early_time_expansion(kind: EntropyKind, init, D: float, t):
    """First-order small-time value of an averaged entropy.

    ``init`` is a :class:`PhiState` or the string ``"unentangled"``.
    Available forms:

    * Bell start: Tsallis(q), Renyi(q) and von Neumann.
    * ``phi`` in (0, pi/4): von Neumann and Renyi(2).
    * unentangled start: von Neumann and Renyi(2).
    """
    t = np.asarray(t, dtype=float)
    tau = 2 * D * t
    if isinstance(kind, str):
        kind = EntropyKind.parse(kind)
    if init == UNENTANGLED:
        if kind.name == "von-neumann":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(tau > 0, tau * (EULER_GAMMA - np.log(tau)), 0.0)
        if kind.name == "renyi" and kind.q == 2:
            return 2 * tau
        raise ValidationError(f"no unentangled-start expansion for {kind}")
    if not isinstance(init, PhiState):
        raise ValidationError("init must be a PhiState or 'unentangled'")
    if init.is_bell:
        if kind.name == "von-neumann":
            return np.log(2) - 6 * D * t
        if kind.name == "tsallis":
            q = kind.q
            return (1 - 2 ** (1 - q)) / (q - 1) - 3 * 2 ** (2 - q) * q * D * t
        if kind.name == "renyi":
            return np.log(2) - 6 * D * kind.q * t
        raise ValidationError(f"no Bell-start expansion for {kind}")
    phi = init.phi
    if not (0 < phi < np.pi / 4):
        raise ValidationError("phi must lie in the open interval (0, pi/4)")
    if kind.name == "von-neumann":
        lc = np.log(1 / np.tan(phi))
        e0 = -np.log(np.sin(phi)) - np.log(np.cos(phi)) - np.cos(2 * phi) * lc
        slope = 2 * np.cos(4 * phi) / np.cos(2 * phi) * lc - 1
        return e0 + slope * tau
    if kind.name == "renyi" and kind.q == 2:
        c4 = np.cos(4 * phi)
        return np.log(4) - np.log(c4 + 3) + (28 * c4 + 3 * np.cos(8 * phi) + 1) / (c4 + 3) ** 2 * tau
    raise ValidationError(f"no phi-dependent expansion for {kind}")


def _schmidt_quadrature(measure, n_nodes: int):
    """Gauss-Jacobi nodes on ``u = 2y - 1`` and the observable at each node."""
    u, w = roots_jacobi(n_nodes, 0.5, 0.0)
    y = (u + 1) / 2
    # Any pure state with Schmidt product y/4 evaluates the observable.
    k1 = (1 + np.sqrt(np.clip(1 - y, 0, None))) / 2
    zero = np.zeros_like(y)
    probe = np.stack([np.sqrt(k1), zero, zero, np.sqrt(1 - k1)], axis=-1).astype(complex)
    return u, w, pure_state_observable(probe, measure)


def haar_pure_mean(measure: Measure, n_nodes: int = 600) -> float:
    """Mean of a pure-state observable over Haar-random two-qubit states."""
    _, w, obs = _schmidt_quadrature(parse_measure(measure), n_nodes)
    return float((w * obs).sum() / w.sum())


def schmidt_diffusion_mean(measure: Measure, initial, tau, n_modes: int = 200, n_nodes: int = 600) -> np.ndarray:
    """Exact average-of-entanglement curve of the Brownian ensemble.

    The squared concurrence ``y = 4 k1 k2`` of the evolving pure state is an
    autonomous Jacobi diffusion in scaled time,
    ``dy = (4 - 10 y) dtau + sqrt(8 y (1 - y)) dW``, whose stationary law is
    the Haar one, Beta(1, 3/2).  Its eigenfunctions are the Jacobi
    polynomials ``P_n^(1/2, 0)(2y - 1)`` with decay rates ``n (4n + 6)``, so
    any observable of ``y`` averages to a convergent mode sum.
    """
    measure = parse_measure(measure)
    psi0 = _initial_vector(initial)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValidationError("tau must be non-negative")
    u, w, obs = _schmidt_quadrature(measure, n_nodes)
    m = psi0.reshape(2, 2)
    y0 = 4 * abs(np.linalg.det(m)) ** 2
    n = np.arange(n_modes)
    coeff = np.empty(n_modes)
    at_y0 = np.empty(n_modes)
    for k in n:
        p = eval_jacobi(k, 0.5, 0.0, u)
        coeff[k] = (w * obs * p).sum() / (w * p * p).sum()
        at_y0[k] = eval_jacobi(k, 0.5, 0.0, 2 * y0 - 1)
    rates = n * (4 * n + 6)
    return np.einsum("k,...k->...", coeff * at_y0, np.exp(-rates * tau[..., None]))
