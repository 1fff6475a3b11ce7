import numpy as np
import pytest

from chainhydro.domain.models.chain import ChainModelError, MassLaw
from chainhydro.infrastructure.persistence import read_chain, write_chain
from chainhydro.infrastructure.persistence.chain_file import HEADER, format_chain, parse_chain


def test_format_header(small_chain):
    lines = format_chain(small_chain).splitlines()
    assert lines[0] == HEADER
    assert lines[1] == "n 16"
    assert lines[2].startswith("law uniform")
    assert lines[3] == "seed 3"
    assert len(lines) == 5 + 16


def test_round_trip_is_exact(tmp_path, medium_chain):
    path = write_chain(medium_chain, tmp_path / "nested" / "chain.txt")
    loaded = read_chain(path)
    assert loaded.n == medium_chain.n
    assert loaded.seed == medium_chain.seed
    assert loaded.mass_law == medium_chain.mass_law
    np.testing.assert_array_equal(loaded.masses, medium_chain.masses)
    assert loaded.mean_mass == medium_chain.mean_mass


def test_missing_mean_mass_uses_law_mean():
    text = "\n".join([HEADER, "n 2", "law uniform 1.0 2.0 2.0 2.0", "seed 0", "1.25", "1.75"])
    chain = parse_chain(text)
    assert chain.mean_mass == pytest.approx(MassLaw.uniform(1.0, 2.0).mean)
    np.testing.assert_array_equal(chain.masses, [1.25, 1.75])


class TestParseErrors:
    def test_missing_header(self):
        with pytest.raises(ChainModelError, match="missing header"):
            parse_chain("n 2\nlaw uniform 1 2 2 2\nseed 0\n1.5\n1.5\n")

    def test_empty(self):
        with pytest.raises(ChainModelError):
            parse_chain("")

    def test_missing_seed(self):
        with pytest.raises(ChainModelError, match="seed"):
            parse_chain(f"{HEADER}\nn 2\nlaw uniform 1 2 2 2\n1.5\n1.5\n")

    def test_count_mismatch(self):
        with pytest.raises(ChainModelError):
            parse_chain(f"{HEADER}\nn 3\nlaw uniform 1 2 2 2\nseed 0\n1.5\n1.5\n")

    def test_mass_outside_support(self):
        with pytest.raises(ChainModelError, match="support"):
            parse_chain(f"{HEADER}\nn 2\nlaw uniform 1 2 2 2\nseed 0\n1.5\n2.5\n")

    def test_unknown_law(self):
        with pytest.raises(ChainModelError, match="Unknown mass law"):
            parse_chain(f"{HEADER}\nn 2\nlaw lognormal 1 2 2 2\nseed 0\n1.5\n1.5\n")
