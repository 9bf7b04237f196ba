"""Bergman-kernel machinery for generalized Hartogs domains.

Submodules: domains (specs, maps, sampling), kernels (closed-form and
truncated kernels, MC projection), estimates (sphere moments, weighted
ball/disk integrals), schur (feasibility windows and the sharp p-range),
counterexample (endpoint blow-up sequence), transfer (Jacobian bounds and
norm transfer), cli (command-line front end).
"""

from .config import DEFAULT_CONFIG, NumericConfig
from .domains import HartogsDomainSpec, MapFamily

__all__ = ["DEFAULT_CONFIG", "NumericConfig", "HartogsDomainSpec", "MapFamily"]

__version__ = "0.1.0"
