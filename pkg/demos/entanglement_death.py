"""How quickly does averaging over random Hamiltonians destroy entanglement?

Evolving a Bell state under one GUE draw keeps it pure, but the ensemble
average of the evolved states is mixed.  Its entanglement of formation drops
to zero at a finite time, where the decay function f(tau) reaches 1/6.
"""

from __future__ import annotations

import numpy as np

from randent.linalg import pure_density
from randent.measures import entanglement_of_formation
from randent.quenched import averaged_rho_analytic, eof_vanishing_time, f_tau
from randent.temporal import BELL

bell = pure_density(BELL.vector())
tau0 = eof_vanishing_time(bell)
print(f"EoF of the averaged state vanishes at tau = {tau0:.5f} (f = {float(f_tau(tau0)):.6f})")
for t in np.linspace(0, 0.6, 7):
    rho = averaged_rho_analytic(bell, t)
    print(f"tau={t:.2f}  f={float(f_tau(t)):.4f}  EoF={float(entanglement_of_formation(rho)):.5f}")
