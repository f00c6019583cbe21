"""Group-based quantum tomography.

Synthesizes measurement records from known density matrices (homodyne
quadratures and spin projections) and reconstructs expectation values by
Monte Carlo averaging of analytically derived estimator kernels, with every
kernel tied to an independent numerical oracle.
"""

from . import groups, homodyne, mc, numerics, spin

__version__ = "0.1.0"

__all__ = ["groups", "homodyne", "mc", "numerics", "spin", "__version__"]
