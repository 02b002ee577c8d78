"""Relaxation under a Brownian Hamiltonian.

With fresh GUE increments at every step the averaged state relaxes to the
maximally mixed state at rate 8D and the mean linear entropy relaxes to the
Haar value 1/5 at rate 20D.  Both laws are checked from an unentangled start.
"""

from __future__ import annotations

import numpy as np

from randent.temporal import (
    TemporalEnsembleConfig,
    TemporalParams,
    averaged_linear_entropy_temporal,
    run_temporal_ensemble,
)

D = 0.5
params = TemporalParams(D, 1e-3)
grid = np.round(np.arange(0, 0.31, 0.03), 10)
series = run_temporal_ensemble(
    TemporalEnsembleConfig(3000, grid, params, 5, initial=np.array([0, 0, 0, 1], dtype=complex))
)
dist = np.linalg.norm(series.rho_mean - np.eye(4) / 4, axis=(1, 2))
for t, m, s, d in zip(grid, series.mean, series.stderr, dist):
    print(f"t={t:.2f}  <L>={m:.4f}+-{s:.4f}  law={averaged_linear_entropy_temporal(0.0, D, t):.4f}  |<rho>-1/4|={d:.4f}")
