"""
Tests for the counter-based random streams
"""

import numpy as np
import pytest

from bergman_lab.errors import ArgumentError
from bergman_lab.rng import complex_normal, parse_seed_range, stream


def test_streams_are_reproducible():
    a = stream(42, 1).standard_normal(8)
    b = stream(42, 1).standard_normal(8)
    assert np.array_equal(a, b)


def test_streams_are_distinct():
    assert not np.array_equal(stream(42, 0).random(4), stream(42, 1).random(4))
    assert not np.array_equal(stream(42, 0).random(4), stream(43, 0).random(4))


def test_complex_normal_unit_variance():
    xi = complex_normal(stream(7), 200_000)
    assert np.mean(np.abs(xi) ** 2) == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(xi)) < 0.01


def test_parse_seed_range():
    assert parse_seed_range("3..5") == [3, 4, 5]
    assert parse_seed_range(" 7 ") == [7]
    with pytest.raises(ArgumentError):
        parse_seed_range("5..3")
    with pytest.raises(ArgumentError):
        parse_seed_range("a..b")
