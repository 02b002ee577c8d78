"""Haar-random two-qubit states and the geometry of the SU(4) chart.

First the mean von Neumann and linear entropies of Haar states, drawn with
both samplers.  Then the numerical metric of the 15-angle chart: its volume
element is proportional to the Haar density, and the Laplacian maps rho and
the linear entropy to the affine expressions behind the relaxation laws.
"""

from __future__ import annotations

import numpy as np

from randent.ensemble import pure_state_observable
from randent.geometry import check_identities, density_ratio, relative_spread, sample_interior_points
from randent.measures import EntropyKind
from randent.su4 import HaarSampler

for kind in ("euler-inverse-cdf", "ginibre-qr"):
    psi = HaarSampler(21, kind).state(200_000)
    e = pure_state_observable(psi, EntropyKind("von-neumann")).mean()
    l = pure_state_observable(psi, EntropyKind("linear")).mean()
    print(f"{kind:>18}: <E>={e:.4f} (1/3)  <L>={l:.4f} (1/5)")

pts = sample_interior_points(10, np.random.default_rng(4))
ratio = density_ratio(pts)
print(f"sqrt|g|/mu = {ratio.mean():.6f} (128 sqrt 2 = {128 * np.sqrt(2):.6f}), spread {relative_spread(ratio):.1e}")
report = check_identities(pts[:5])
print(f"identity residuals: rho {report.max_rho_residual:.1e}, L {report.max_linear_residual:.1e}, passed={report.passed}")
