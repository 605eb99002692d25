"""Two-level designs under an exact per-run treatment-cardinality constraint.

Thin wrapper over the C++ core: construction (coordinate exchange, greedy and
boundary constructions), near-balance certification, count/criterion
diagnostics, information-matrix summaries, and the screening/tuning loops.
"""

from ._tcard import *  # noqa: F401,F403
from ._tcard import __version__  # noqa: F401
