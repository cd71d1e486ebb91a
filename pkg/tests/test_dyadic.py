from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyadicsq.dyadic import (
    DEFAULT_MAX_DEPTH,
    DepthOverflowError,
    DyadicInterval,
    children,
    endpoints,
    level_intervals,
    shell,
    spine,
)


@st.composite
def intervals(draw, max_level=24):
    level = draw(st.integers(0, max_level))
    index = draw(st.integers(0, 2 ** level - 1))
    return DyadicInterval(level, index)


def test_unit_interval_children():
    assert children(DyadicInterval(0, 0)) == (DyadicInterval(1, 0), DyadicInterval(1, 1))


def test_quarter_interval_children():
    left, right = children(DyadicInterval(2, 1))
    assert (left, right) == (DyadicInterval(3, 2), DyadicInterval(3, 3))
    assert left.left == Fraction(1, 4) and right.right == Fraction(1, 2)


def test_spine_children_are_spine_and_shell():
    for k in range(0, 30):
        assert children(spine(k)) == (spine(k + 1), shell(k + 1))


@given(intervals())
def test_children_partition_exactly(q):
    left, right = children(q)
    assert left.left == q.left
    assert left.right == right.left
    assert right.right == q.right
    assert left.measure + right.measure == q.measure
    assert q.contains(left) and q.contains(right)
    assert not left.contains(right)


def test_shell_examples():
    assert endpoints(shell(1)) == (Fraction(1, 2), Fraction(1, 1))
    assert endpoints(shell(3)) == (Fraction(1, 8), Fraction(1, 4))
    assert shell(10) == DyadicInterval(10, 1)


def test_shell_union_spine():
    for n in range(1, 40):
        assert shell(n).left == spine(n).right
        assert shell(n).right == spine(n - 1).right
        assert shell(n).measure + spine(n).measure == spine(n - 1).measure


def test_endpoints_exact():
    assert endpoints(DyadicInterval(1, 1)) == (Fraction(1, 2), Fraction(1))
    assert endpoints(DyadicInterval(3, 5)) == (Fraction(5, 8), Fraction(6, 8))
    assert endpoints(spine(17)) == (Fraction(0), Fraction(1, 2 ** 17))


@given(st.integers(0, 12))
def test_level_partitions_unit_interval(n):
    ivs = level_intervals(n)
    assert len(ivs) == 2 ** n
    assert ivs[0].left == 0 and ivs[-1].right == 1
    for a, b in zip(ivs, ivs[1:]):
        assert a.right == b.left


def test_invalid_construction():
    with pytest.raises(ValueError):
        DyadicInterval(-1, 0)
    with pytest.raises(ValueError):
        DyadicInterval(2, 4)
    with pytest.raises(ValueError):
        shell(0)
    with pytest.raises(ValueError):
        spine(-1)


def test_depth_overflow():
    q = DyadicInterval(DEFAULT_MAX_DEPTH, 0)
    with pytest.raises(DepthOverflowError):
        children(q)
    # spine indices may exceed tree depth (they never enumerate leaves)
    assert spine(DEFAULT_MAX_DEPTH + 40).measure == Fraction(1, 2 ** 100)
