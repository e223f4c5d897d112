import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreynuc.dyadic import CubeIndexSet, DyadicCube, contains, subcubes


def test_subcubes_line():
    cubes = subcubes(DyadicCube(-2, (0,)), 0)
    assert [c.offset for c in cubes] == [(0,), (1,), (2,), (3,)]


def test_subcubes_plane():
    cubes = subcubes(DyadicCube(-1, (0, 0)), 0)
    assert [c.offset for c in cubes] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_subcubes_same_level():
    q = DyadicCube(3, (5, 2))
    assert subcubes(q, 3) == [q]


def test_subcubes_coarser_level_rejected():
    with pytest.raises(ValueError):
        subcubes(DyadicCube(0, (0,)), -1)


def test_contains_examples():
    assert contains(DyadicCube(-1, (0,)), DyadicCube(0, (1,)))
    assert not contains(DyadicCube(0, (0,)), DyadicCube(0, (1,)))
    assert not contains(DyadicCube(0, (0,)), DyadicCube(-1, (0,)))
    with pytest.raises(ValueError):
        contains(DyadicCube(0, (0,)), DyadicCube(0, (0, 0)))


def test_negative_offsets():
    assert contains(DyadicCube(-1, (-1,)), DyadicCube(0, (-2,)))
    assert contains(DyadicCube(-1, (-1,)), DyadicCube(0, (-1,)))
    assert not contains(DyadicCube(-1, (-1,)), DyadicCube(0, (0,)))


def test_volume_and_guard():
    assert DyadicCube(-2, (0, 0)).volume == 16
    assert DyadicCube(1, (0,)).side == pytest.approx(0.5)
    with pytest.raises(OverflowError):
        DyadicCube(-31, (0, 0, 0))


cubes = st.builds(
    DyadicCube,
    st.integers(-4, 4),
    st.lists(st.integers(-8, 8), min_size=1, max_size=3).map(tuple),
)


@given(cubes)
def test_cube_contains_itself(q):
    assert contains(q, q)


@given(st.integers(0, 4), st.integers(1, 3), st.data())
def test_partition(j, d, data):
    if j * d > 8:
        return
    nu = data.draw(st.integers(0, j))
    root = DyadicCube(-j, (0,) * d)
    coarse = subcubes(root, -nu)
    assert len(coarse) == 2 ** ((j - nu) * d)
    seen = []
    for c in coarse:
        fine = subcubes(c, 0)
        assert len(fine) == 2 ** (nu * d)
        assert all(contains(c, f) for f in fine)
        seen.extend(f.offset for f in fine)
    assert sorted(seen) == sorted(CubeIndexSet(j, d).members())
    assert len(set(seen)) == len(seen)


@given(st.integers(0, 4), st.integers(1, 2), st.data())
def test_block_labels_agree_with_containment(j, d, data):
    nu = data.draw(st.integers(0, j))
    idx = CubeIndexSet(j, d)
    labels = idx.block_labels(nu)
    coarse = subcubes(idx.root, -nu)
    for pos, k in enumerate(idx):
        assert contains(coarse[labels[pos]], DyadicCube(0, k))


def test_index_set_order():
    idx = CubeIndexSet(2, 2)
    assert len(idx) == 16
    members = idx.members()
    assert members == sorted(members)
    assert all(idx.index(k) == i for i, k in enumerate(members))
    with pytest.raises(ValueError):
        idx.index((4, 0))
