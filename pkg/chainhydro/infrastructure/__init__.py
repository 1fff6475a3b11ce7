"""Infrastructure layer for chainhydro.

Adapters around LAPACK, the file system (chain files, spectral cache,
reports) and matplotlib, plus logging and in-process metrics.
"""

__all__ = ["linalg", "observability", "persistence", "plotting"]
