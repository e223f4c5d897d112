"""Dyadic cubes ``Q_{nu,m} = prod_i [2^-nu m_i, 2^-nu (m_i + 1))``.

Levels are signed: ``Q_{-j,0}`` is the big reference cube of side ``2^j`` and
``Q_{0,k}`` are unit cubes.  Enumeration is always lexicographic in the offset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_BITS = 60


def _guard(level: int, d: int) -> None:
    if abs(level * d) > MAX_BITS:
        raise OverflowError(f"|level * d| = {abs(level * d)} exceeds {MAX_BITS}")


@dataclass(frozen=True, order=True)
class DyadicCube:
    level: int
    offset: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(int(m) for m in self.offset))
        if not self.offset:
            raise ValueError("offset must have length d >= 1")
        _guard(self.level, self.d)

    @property
    def d(self) -> int:
        return len(self.offset)

    @property
    def volume(self) -> Fraction:
        return Fraction(2) ** (-self.level * self.d)

    @property
    def side(self) -> Fraction:
        return Fraction(2) ** (-self.level)


def contains(parent: DyadicCube, child: DyadicCube) -> bool:
    """Whether ``child`` lies inside ``parent`` (a cube contains itself)."""
    if parent.d != child.d:
        raise ValueError(f"dimension mismatch: {parent.d} vs {child.d}")
    shift = child.level - parent.level
    if shift < 0:
        return False
    # floor division by 2^shift is an arithmetic right shift, also for negatives
    return all((m >> shift) == k for m, k in zip(child.offset, parent.offset))


def subcubes(parent: DyadicCube, level: int) -> list[DyadicCube]:
    """All level-``level`` cubes inside ``parent``, lexicographic in the offset."""
    shift = level - parent.level
    if shift < 0:
        raise ValueError(f"level {level} is coarser than the parent level {parent.level}")
    _guard(level, parent.d)
    width = 1 << shift
    ranges = [range(k * width, (k + 1) * width) for k in parent.offset]
    return [DyadicCube(level, m) for m in itertools.product(*ranges)]


class CubeIndexSet:
    """``K_j``: offsets ``k`` of the unit cubes ``Q_{0,k}`` inside ``Q_{-j,0}``."""

    def __init__(self, j: int, d: int):
        if j < 0 or d < 1:
            raise ValueError("need j >= 0 and d >= 1")
        _guard(j, d)
        self.j, self.d = j, d
        self.root = DyadicCube(-j, (0,) * d)

    def __len__(self) -> int:
        return 1 << (self.j * self.d)

    def __iter__(self):
        return iter(itertools.product(range(1 << self.j), repeat=self.d))

    def members(self) -> list[tuple[int, ...]]:
        return list(self)

    def index(self, k) -> int:
        """Position of offset ``k`` in the lexicographic enumeration."""
        side = 1 << self.j
        pos = 0
        for m in k:
            if not 0 <= m < side:
                raise ValueError(f"offset {tuple(k)} is not in K_{self.j}")
            pos = pos * side + m
        return pos

    def block_labels(self, nu: int) -> np.ndarray:
        """For each member (in order), the lexicographic index of the ``Q_{-nu,.}`` cube holding it."""
        if not 0 <= nu <= self.j:
            raise ValueError(f"need 0 <= nu <= j, got nu={nu}")
        side = 1 << self.j
        coarse = 1 << (self.j - nu)
        grids = np.indices((side,) * self.d).reshape(self.d, -1)
        lab = np.zeros(grids.shape[1], dtype=np.int64)
        for axis in range(self.d):
            lab = lab * coarse + (grids[axis] >> nu)
        return lab
