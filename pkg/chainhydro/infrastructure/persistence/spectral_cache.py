"""On-disk cache of chain spectra.

One little-endian file per (seed, n, mass law):

* header record ``magic S8 = b"CHSPEC01"``, ``version <u4``, ``n <u8``,
  ``seed <u8`` (28 bytes, unpadded);
* ``omega``: n × ``<f8``;
* ``phi_p``: n·n × ``<f8``, row-major;
* ``phi_r``: (n−1)·(n−1) × ``<f8``, row-major.

A file with another magic, version, size or seed is treated as a miss.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

import numpy as np

from chainhydro.domain.models.chain import DisorderedChain
from chainhydro.domain.models.spectral import SpectralData
from chainhydro.infrastructure.linalg.tridiagonal import degenerate_modes
from chainhydro.infrastructure.observability import get_logger, increment_counter
from chainhydro.infrastructure.observability.metrics import (
    SPECTRAL_CACHE_HITS,
    SPECTRAL_CACHE_MISSES,
)

logger = get_logger(__name__)

MAGIC = b"CHSPEC01"
VERSION = 1
HEADER_DTYPE = np.dtype(
    [("magic", "S8"), ("version", "<u4"), ("n", "<u8"), ("seed", "<u8")]
)
_F8 = np.dtype("<f8")


class SpectralCache:
    """Directory-backed spectral cache; safe for concurrent writers."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, chain: DisorderedChain) -> Path:
        law_digest = hashlib.sha256(chain.mass_law.describe().encode("utf-8")).hexdigest()
        return self.directory / f"spectrum-n{chain.n}-s{chain.seed}-{law_digest[:12]}.bin"

    def load(self, chain: DisorderedChain) -> SpectralData | None:
        path = self.path_for(chain)
        if not path.exists():
            increment_counter(SPECTRAL_CACHE_MISSES)
            logger.debug("Spectral cache miss for n=%d seed=%d", chain.n, chain.seed)
            return None
        spectral = _decode(path.read_bytes(), chain)
        if spectral is None:
            increment_counter(SPECTRAL_CACHE_MISSES)
            logger.debug("Spectral cache entry %s is stale; ignoring", path.name)
            return None
        increment_counter(SPECTRAL_CACHE_HITS)
        logger.debug("Spectral cache hit for n=%d seed=%d", chain.n, chain.seed)
        return spectral

    def store(self, spectral: SpectralData) -> Path:
        path = self.path_for(spectral.chain)
        payload = encode(spectral)
        fd, tmp_name = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            os.replace(tmp_name, path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
        return path


def encode(spectral: SpectralData) -> bytes:
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["n"] = spectral.n
    header["seed"] = spectral.chain.seed
    return b"".join(
        [
            header.tobytes(),
            spectral.omega.astype(_F8).tobytes(),
            spectral.phi_p.astype(_F8).tobytes(order="C"),
            spectral.phi_r.astype(_F8).tobytes(order="C"),
        ]
    )


def _decode(data: bytes, chain: DisorderedChain) -> SpectralData | None:
    if len(data) < HEADER_DTYPE.itemsize:
        return None
    header = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    n = chain.n
    if (
        header["magic"] != MAGIC
        or int(header["version"]) != VERSION
        or int(header["n"]) != n
        or int(header["seed"]) != chain.seed
    ):
        return None
    counts = (n, n * n, (n - 1) * (n - 1))
    if len(data) != HEADER_DTYPE.itemsize + _F8.itemsize * sum(counts):
        return None
    offset = HEADER_DTYPE.itemsize
    arrays = []
    for count in counts:
        arrays.append(np.frombuffer(data, dtype=_F8, count=count, offset=offset))
        offset += count * _F8.itemsize
    omega = arrays[0].astype(np.float64)
    return SpectralData(
        chain=chain,
        omega=omega,
        phi_p=arrays[1].reshape(n, n).astype(np.float64),
        phi_r=arrays[2].reshape(n - 1, n - 1).astype(np.float64),
        degenerate_modes=degenerate_modes(omega**2),
    )


__all__ = ["HEADER_DTYPE", "MAGIC", "SpectralCache", "VERSION", "encode"]
