"""Broadcast colouring models on trees.

Sampling, exact root posteriors, Monte Carlo moment estimators and the
analytic threshold maps, backed by the C++ core.  Colours are 0-based
in this API; JSON serialization uses 1-based labels.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
