"""Von Neumann entropy from a start just below the Haar average.

The state cos(c)|00> + sin(c)|11> with c = 0.322 has entropy close to 1/3.
Under Brownian evolution the mean entropy first dips and then climbs back to
1/3 from below; the exact curve follows from a one-dimensional diffusion of
the Schmidt coefficient and never crosses 1/3.
"""

from __future__ import annotations

import numpy as np

from randent.quenched import psi_c
from randent.temporal import TemporalEnsembleConfig, TemporalParams, run_temporal_ensemble, schmidt_diffusion_mean

params = TemporalParams(0.5, 1e-3)
grid = np.round(np.arange(0, 0.61, 0.06), 10)
series = run_temporal_ensemble(
    TemporalEnsembleConfig(4000, grid, params, 11, initial=psi_c(0.322), measure="von-neumann")
)
exact = schmidt_diffusion_mean("von-neumann", psi_c(0.322), params.to_tau(grid))
for t, m, s, e in zip(grid, series.mean, series.stderr, exact):
    print(f"t={t:.2f}  MC={m:.5f}+-{s:.5f}  exact={e:.5f}  exact-1/3={e - 1 / 3:+.5f}")
