"""
chainhydro package initializer.

chainhydro is a numerical laboratory for the one-dimensional harmonic chain
with i.i.d. random masses. It diagonalizes the chain, evolves classical and
quasi-free quantum local Gibbs states exactly, solves the macroscopic Euler
system and compares the two at hyperbolic scaling.

The package exposes a ``__version__`` attribute read from the installed
metadata; pyproject.toml is the single source of truth.
"""

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("chainhydro")
except PackageNotFoundError:
    # Running from a source checkout without ``pip install -e .``
    __version__ = "0.0.0.dev"

__all__: list[str] = ["__version__"]
