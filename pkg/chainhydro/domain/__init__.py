"""Domain layer for chainhydro.

Pure models and analytics: nothing here touches files, logging or LAPACK
adapters; numerics come from numpy and scipy.
"""

from . import analytics, models

__all__ = ["analytics", "models"]
