"""Entanglement of two qubits under random unitary dynamics.

Submodules:

* :mod:`randent.linalg` - small dense linear algebra (Jacobi eigensolver, partial trace, Cayley step)
* :mod:`randent.su4` - Euler-angle chart of SU(4), Haar density and samplers
* :mod:`randent.measures` - entropies, concurrence, entanglement of formation
* :mod:`randent.quenched` - time-independent GUE ensemble and its closed forms
* :mod:`randent.temporal` - Brownian motion on SU(4) driven by fresh GUE steps
* :mod:`randent.geometry` - numerical metric and Laplace-Beltrami operator on the chart
* :mod:`randent.cli` - batch command-line driver
"""

from .errors import NumericError, RootNotFoundError, ValidationError
from .measures import EntropyKind, concurrence, entanglement_of_formation, entropy
from .quenched import QuenchedEnsembleConfig, run_quenched_ensemble
from .su4 import HaarSampler, euler_unitary
from .temporal import TemporalEnsembleConfig, TemporalParams, run_temporal_ensemble

__version__ = "0.1.0"

__all__ = [
    "EntropyKind",
    "HaarSampler",
    "NumericError",
    "QuenchedEnsembleConfig",
    "RootNotFoundError",
    "TemporalEnsembleConfig",
    "TemporalParams",
    "ValidationError",
    "concurrence",
    "entanglement_of_formation",
    "entropy",
    "euler_unitary",
    "run_quenched_ensemble",
    "run_temporal_ensemble",
]
