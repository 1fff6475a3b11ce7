import numpy as np

from chainhydro.infrastructure.observability import get_metrics_summary
from chainhydro.infrastructure.persistence import SpectralCache
from chainhydro.infrastructure.persistence.spectral_cache import HEADER_DTYPE, encode
from chainhydro.services.chain_model import sample_masses
from chainhydro.domain.models.chain import MassLaw


class TestSpectralCache:
    """Binary spectrum files keyed by size, seed and mass law."""

    def test_miss_then_hit(self, tmp_path, small_chain, small_spectrum):
        cache = SpectralCache(tmp_path / "cache")
        assert cache.load(small_chain) is None
        path = cache.store(small_spectrum)
        assert path.name.startswith("spectrum-n16-s3-")
        loaded = cache.load(small_chain)
        assert loaded is not None
        np.testing.assert_array_equal(loaded.omega, small_spectrum.omega)
        np.testing.assert_array_equal(loaded.phi_p, small_spectrum.phi_p)
        np.testing.assert_array_equal(loaded.phi_r, small_spectrum.phi_r)
        summary = get_metrics_summary()
        assert summary["spectral_cache_misses_total"] == 1
        assert summary["spectral_cache_hits_total"] == 1

    def test_file_size(self, tmp_path, small_spectrum):
        n = small_spectrum.n
        payload = encode(small_spectrum)
        assert HEADER_DTYPE.itemsize == 28
        assert len(payload) == 28 + 8 * (n + n * n + (n - 1) ** 2)

    def test_truncated_entry_is_a_miss(self, tmp_path, small_chain, small_spectrum):
        cache = SpectralCache(tmp_path)
        path = cache.store(small_spectrum)
        path.write_bytes(path.read_bytes()[:-8])
        assert cache.load(small_chain) is None

    def test_wrong_magic_is_a_miss(self, tmp_path, small_chain, small_spectrum):
        cache = SpectralCache(tmp_path)
        path = cache.store(small_spectrum)
        data = bytearray(path.read_bytes())
        data[:8] = b"XXXXXXXX"
        path.write_bytes(bytes(data))
        assert cache.load(small_chain) is None

    def test_other_law_uses_other_file(self, tmp_path, small_chain):
        cache = SpectralCache(tmp_path)
        other = sample_masses(16, MassLaw.uniform(1.0, 3.0), seed=3)
        assert cache.path_for(other) != cache.path_for(small_chain)

    def test_no_temporary_files_left(self, tmp_path, small_spectrum):
        cache = SpectralCache(tmp_path)
        cache.store(small_spectrum)
        cache.store(small_spectrum)
        assert [p.suffix for p in tmp_path.iterdir()] == [".bin"]
