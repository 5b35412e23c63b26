"""Q-valued numerical laboratory: metric space primitives, discrete
p-Dirichlet minimization, and stationarity diagnostics."""

from ._qvl import *  # noqa: F401,F403

__version__ = "0.1.0"
