"""File-system adapters: chain files, spectral cache and report exports."""

from .chain_file import read_chain, write_chain
from .report_writer import (
    read_thermal_profile,
    write_fields,
    write_json,
    write_localization,
    write_report,
    write_thermal_profile,
)
from .spectral_cache import SpectralCache

__all__ = [
    "SpectralCache",
    "read_chain",
    "read_thermal_profile",
    "write_chain",
    "write_fields",
    "write_json",
    "write_localization",
    "write_report",
    "write_thermal_profile",
]
