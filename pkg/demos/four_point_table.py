"""Four-point phase averages over GUE spectra.

Averages of exp(i t (E_j - E_k + E_l - E_m)) depend only on which of the four
indices coincide.  Each of the five index classes is checked against a direct
average over sampled spectra.
"""

from __future__ import annotations

import numpy as np

from randent.quenched import INDEX_CLASSES, class_representatives, gue_phase_average, r_jklm

taus = np.array([0.5, 1.0, 2.0])
rng = np.random.default_rng(3)
reps = class_representatives()
for cls in INDEX_CLASSES:
    t = reps[cls][0]
    mean, err = gue_phase_average(t, taus, 200_000, rng)
    print(f"{cls:>14} {t}: closed {np.round(r_jklm(*t, taus), 5)}  MC {np.round(mean, 5)} +- {np.round(err, 5)}")
