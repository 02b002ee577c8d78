"""Shared Monte Carlo plumbing for the quenched and temporal runners.

Every trajectory draws from its own random stream, seeded by
``SeedSequence(master_seed, spawn_key=(index,))``.  Trajectories are grouped
into a fixed number of contiguous index blocks; blocks may be evaluated on
worker threads, but partial results are always combined in block order, so
a run is bit-identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Union

import numpy as np

from .errors import NumericError, ValidationError
from .linalg import partial_trace
from .measures import (
    EntropyKind,
    concurrence_batch,
    entropy_from_eigs,
    eof_from_concurrence,
    qubit_eigs,
)

AveragingMode = Literal["average-of-entanglement", "entanglement-of-average"]
AVERAGING_MODES = ("average-of-entanglement", "entanglement-of-average")

#: Observables besides entropies of the reduced state.
MATRIX_MEASURES = ("eof", "concurrence")

Measure = Union[EntropyKind, str]

DEFAULT_BLOCKS = 32
DEFAULT_CHUNK = 4096


def parse_measure(measure: Measure) -> Measure:
    if isinstance(measure, EntropyKind):
        return measure
    if measure in MATRIX_MEASURES:
        return measure
    return EntropyKind.parse(measure)


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent random stream of trajectory ``index``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def pure_state_observable(psi: np.ndarray, measure: Measure) -> np.ndarray:
    """Observable of pure two-qubit states ``psi`` (shape ``(..., 4)``)."""
    m = psi.reshape(psi.shape[:-1] + (2, 2))
    # Schmidt product k1*k2 = |det M|^2 fixes both reduced eigenvalues.
    prod = np.abs(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]) ** 2
    gap = np.sqrt(np.clip(1.0 - 4.0 * prod, 0.0, None))
    if measure == "concurrence":
        return 2.0 * np.sqrt(prod)
    if measure == "eof":
        return eof_from_concurrence(2.0 * np.sqrt(prod))
    if measure.name == "linear":
        return 2.0 * prod
    p = np.stack([(1 + gap) / 2, (1 - gap) / 2], axis=-1)
    return entropy_from_eigs(p, measure)


def mixed_state_observable(rho: np.ndarray, measure: Measure) -> np.ndarray:
    """Observable of (stacks of) two-qubit density matrices."""
    if measure == "concurrence":
        return concurrence_batch(rho)
    if measure == "eof":
        return eof_from_concurrence(concurrence_batch(rho))
    return entropy_from_eigs(qubit_eigs(partial_trace(rho, keep=1)), measure)


@dataclass
class EnsembleSeries:
    """Ensemble mean and standard error of one observable on a time grid.

    ``rho_mean`` holds the trajectory-averaged density matrix at every grid
    point.  For the entanglement-of-average mode ``stderr`` is a block
    jackknife estimate.
    """

    grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n: int
    grid_name: str = "tau"
    rho_mean: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.grid) == len(self.mean) == len(self.stderr)):
            raise ValidationError("grid, mean and stderr must have equal lengths")
        if np.any(self.stderr < 0):
            raise ValidationError("stderr must be non-negative")


@dataclass
class _Block:
    count: int
    mean: np.ndarray | None  # per-trajectory observable, running mean
    m2: np.ndarray | None
    rho_sum: np.ndarray


def _combine(a: _Block, b: _Block) -> _Block:
    n = a.count + b.count
    if a.mean is None:
        mean = m2 = None
    else:
        delta = b.mean - a.mean
        mean = a.mean + delta * (b.count / n)
        m2 = a.m2 + b.m2 + delta**2 * (a.count * b.count / n)
    return _Block(n, mean, m2, a.rho_sum + b.rho_sum)


def block_bounds(n: int, n_blocks: int = DEFAULT_BLOCKS) -> list[tuple[int, int]]:
    n_blocks = max(1, min(n_blocks, n))
    edges = np.linspace(0, n, n_blocks + 1).round().astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:])]


def run_blocks(
    simulate: Callable[[int, int], np.ndarray],
    n: int,
    grid: np.ndarray,
    measure: Measure,
    mode: AveragingMode,
    grid_name: str,
    pure: bool,
    threads: int | None = None,
    chunk: int = DEFAULT_CHUNK,
    metadata: dict | None = None,
) -> EnsembleSeries:
    """Drive ``simulate(lo, hi)`` over all trajectories and reduce.

    ``simulate`` returns the states of trajectories ``lo..hi-1`` at every grid
    point, as state vectors ``(m, T, 4)`` when ``pure`` else density matrices
    ``(m, T, 4, 4)``.
    """
    if mode not in AVERAGING_MODES:
        raise ValidationError(f"unknown averaging mode {mode!r}")
    if n < 1:
        raise ValidationError("need at least one trajectory")
    measure = parse_measure(measure)
    per_traj = mode == "average-of-entanglement"

    def do_block(bounds: tuple[int, int]) -> _Block:
        lo, hi = bounds
        acc = None
        for start in range(lo, hi, chunk):
            stop = min(hi, start + chunk)
            states = simulate(start, stop)
            if pure:
                rho_sum = np.einsum("mti,mtj->tij", states, np.conj(states))
            else:
                rho_sum = states.sum(axis=0)
            if per_traj:
                if pure:
                    obs = pure_state_observable(states, measure)
                else:
                    obs = mixed_state_observable(states, measure)
                if not np.all(np.isfinite(obs)):
                    bad = start + int(np.argwhere(~np.isfinite(obs))[0][0])
                    raise NumericError("non-finite observable", index=bad)
                mean = obs.mean(axis=0)
                m2 = ((obs - mean) ** 2).sum(axis=0)
            else:
                mean = m2 = None
            part = _Block(stop - start, mean, m2, rho_sum)
            acc = part if acc is None else _combine(acc, part)
        return acc

    bounds = block_bounds(n)
    if threads is None:
        threads = min(len(bounds), os.cpu_count() or 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(do_block, bounds))
    else:
        blocks = [do_block(b) for b in bounds]

    total = blocks[0]
    for b in blocks[1:]:
        total = _combine(total, b)
    rho_mean = total.rho_sum / n

    if per_traj:
        mean = total.mean
        stderr = np.sqrt(total.m2 / (n - 1) / n) if n > 1 else np.zeros_like(mean)
    else:
        mean = mixed_state_observable(rho_mean, measure)
        if len(blocks) > 1:
            # Leave-one-block-out jackknife.
            loo = np.array(
                [
                    mixed_state_observable((total.rho_sum - b.rho_sum) / (n - b.count), measure)
                    for b in blocks
                ]
            )
            k = len(blocks)
            stderr = np.sqrt((k - 1) / k * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
        else:
            stderr = np.zeros_like(mean)
    return EnsembleSeries(
        grid=np.asarray(grid, dtype=float),
        mean=np.asarray(mean, dtype=float),
        stderr=np.asarray(stderr, dtype=float),
        n=n,
        grid_name=grid_name,
        rho_mean=rho_mean,
        metadata=dict(metadata or {}),
    )
