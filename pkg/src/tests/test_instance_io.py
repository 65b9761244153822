"""
Tests for the instance file format
"""

import math

import numpy as np
import pytest

from errors import ParseError
from ingest.instance_io import load_instance, parse_instance, save_instance, serialize_instance
from tsp.instance import bias_of, random_instance

FOUR_CITY_TEXT = """\
# four-city example
tsp 4
alpha e
0  .7 .5 1
.7 0  .8 .6
.5 .8 0  .9
1  .6 .9 0
"""


class TestParseInstance:
    """Parsing line-oriented instance text"""

    def test_four_city_instance(self):
        """The four-city file parses with q13 = .6065"""
        inst = parse_instance(FOUR_CITY_TEXT)
        assert inst.n == 4
        assert inst.alpha == math.e
        assert bias_of(inst, 1, 3) == pytest.approx(0.6065, abs=5e-5)

    def test_alpha_line_optional(self):
        """Without an alpha line the default base is e"""
        text = "tsp 3\n0 1 2\n1 0 1\n2 1 0\n"
        assert parse_instance(text).alpha == pytest.approx(math.e)

    def test_numeric_alpha(self):
        """A numeric alpha is honored"""
        text = "tsp 3\nalpha 4\n0 1 2\n1 0 1\n2 1 0\n"
        assert parse_instance(text).alpha == 4.0

    def test_normalizes_to_unit_max(self):
        """A file whose max distance is 3 is scaled to max 1"""
        text = "tsp 3\n0 1 3\n1 0 2\n3 2 0\n"
        inst = parse_instance(text)
        assert inst.dist.max() == 1.0
        assert inst.dist[0, 1] == pytest.approx(1 / 3)

    def test_two_cities_rejected(self):
        """n = 2 is a parse error on the header line"""
        with pytest.raises(ParseError) as exc:
            parse_instance("tsp 2\n0 1\n1 0\n")
        assert exc.value.line == 1

    def test_bad_header(self):
        """The first content line must be 'tsp <n>'"""
        with pytest.raises(ParseError):
            parse_instance("cities 3\n0 1 1\n1 0 1\n1 1 0\n")

    def test_short_row_reports_line(self):
        """A row with too few entries names its line"""
        text = "tsp 3\n0 1 1\n1 0\n1 1 0\n"
        with pytest.raises(ParseError) as exc:
            parse_instance(text)
        assert exc.value.line == 3
        assert "line 3" in str(exc.value)

    def test_missing_rows(self):
        """Fewer rows than n is rejected"""
        with pytest.raises(ParseError):
            parse_instance("tsp 3\n0 1 1\n1 0 1\n")

    def test_asymmetry_rejected(self):
        """Asymmetry beyond 1e-12 is a parse error"""
        text = "tsp 3\n0 1 1\n1.1 0 1\n1 1 0\n"
        with pytest.raises(ParseError):
            parse_instance(text)

    def test_nonpositive_entry_rejected(self):
        """Zero off-diagonal distances are rejected with a line number"""
        text = "tsp 3\n0 0 1\n0 0 1\n1 1 0\n"
        with pytest.raises(ParseError) as exc:
            parse_instance(text)
        assert exc.value.line == 2

    def test_bad_alpha(self):
        """alpha must exceed 1"""
        with pytest.raises(ParseError):
            parse_instance("tsp 3\nalpha 1\n0 1 1\n1 0 1\n1 1 0\n")


class TestSerializeInstance:
    """Writing instances back out"""

    def test_serialized_text_parses_back(self):
        """A random instance survives serialize and parse"""
        inst = random_instance(5, 2, alpha=3.5)
        back = parse_instance(serialize_instance(inst))
        assert back.alpha == 3.5
        assert np.allclose(back.dist, inst.dist, atol=1e-12, rtol=0)

    def test_alpha_e_written_symbolically(self):
        """alpha = e is written as 'alpha e'"""
        inst = parse_instance(FOUR_CITY_TEXT)
        assert "alpha e\n" in serialize_instance(inst)

    def test_save_and_load(self, tmp_path):
        """save_instance and load_instance use the same format"""
        inst = parse_instance(FOUR_CITY_TEXT)
        path = tmp_path / "four_city.tsp"
        save_instance(inst, path)
        assert np.allclose(load_instance(path).dist, inst.dist)

    def test_non_utf8_byte(self, tmp_path):
        """A Latin-1 byte, even in a comment, is a parse error on its line"""
        path = tmp_path / "latin1.tsp"
        path.write_bytes(b"tsp 3\n# caf\xe9\n0 1 1\n1 0 1\n1 1 0\n")
        with pytest.raises(ParseError) as exc:
            load_instance(path)
        assert exc.value.line == 2

    def test_missing_file(self, tmp_path):
        """An unreadable path is a parse error"""
        with pytest.raises(ParseError):
            load_instance(tmp_path / "absent.tsp")
