"""
Dyadic grid D and the shifted grid D_shift.

    D       = {[2^j n, 2^j (n + 1))}
    D_shift = {2^j ([n, n + 1) + (-1)^j / 3)}

Both grids are nested: every cell of scale j is the disjoint union of two cells
of scale j - 1 of the same grid.
"""
from __future__ import annotations

import logging
import math
from collections import namedtuple
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from .constant import GridKind, DEFAULT_SCALE_RANGE
from .errors import ScaleRange
from .measure import RationalInterval, as_fraction

logger = logging.getLogger(__name__)


def pow2(j: int) -> Fraction:
    return Fraction(2) ** j


class GridFamily(namedtuple('GridFamily', 'kind j_min j_max')):
    """One grid restricted to the scales ``j_min <= j <= j_max``."""

    __slots__ = ()

    def __new__(cls, kind: GridKind = GridKind.DYADIC, j_min: int = DEFAULT_SCALE_RANGE[0],
                j_max: int = DEFAULT_SCALE_RANGE[1]):
        if kind is GridKind.FULL:
            raise ValueError("A GridFamily is a single grid; use grid_pair() for dyadic and shifted together")
        if j_min > j_max:
            raise ScaleRange(f"Empty scale range [{j_min}, {j_max}]")
        return super().__new__(cls, kind, j_min, j_max)

    @property
    def scales(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def offset(self, j: int) -> Fraction:
        if self.kind is GridKind.DYADIC:
            return Fraction(0)
        sign = 1 if j % 2 == 0 else -1
        return sign * pow2(j) / 3

    def cell(self, x, j: int) -> RationalInterval:
        """The scale-j cell containing ``x``."""
        x = as_fraction(x)
        size = pow2(j)
        shift = self.offset(j)
        n = math.floor((x - shift) / size)
        return RationalInterval(shift + n * size, shift + (n + 1) * size)

    def children(self, cell: RationalInterval) -> Tuple[RationalInterval, RationalInterval]:
        middle = cell.center
        return RationalInterval(cell.a, middle), RationalInterval(middle, cell.b)

    def cells_meeting(self, interval: RationalInterval, j: int) -> Iterator[RationalInterval]:
        """Scale-j cells that intersect ``interval``, left to right."""
        cell = self.cell(interval.a, j)
        while cell.a < interval.b:
            yield cell
            cell = cell.translate(cell.length)

    def chain(self, x) -> List[RationalInterval]:
        """Cells containing ``x`` from the coarsest scale down to the finest."""
        return [self.cell(x, j) for j in reversed(self.scales)]

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "j_min": self.j_min, "j_max": self.j_max}


def grid_pair(j_min: int = DEFAULT_SCALE_RANGE[0],
              j_max: int = DEFAULT_SCALE_RANGE[1]) -> Tuple[GridFamily, GridFamily]:
    return GridFamily(GridKind.DYADIC, j_min, j_max), GridFamily(GridKind.SHIFTED, j_min, j_max)


def grids_for(kind: GridKind, scale_range: Tuple[int, int] = DEFAULT_SCALE_RANGE) -> Tuple[GridFamily, ...]:
    if kind is GridKind.FULL:
        return grid_pair(*scale_range)
    return (GridFamily(kind, *scale_range),)


CoverResult = namedtuple('CoverResult', 'cell grid scale ratio')


def christ_cover(interval: RationalInterval, grids: Sequence[GridFamily]) -> CoverResult:
    """Smallest cell of ``grids`` containing ``interval``.

    Scales are scanned upward from the first one whose cells are at least as long
    as ``interval``. Within a scale the dyadic grid is preferred. A containing
    cell always exists once ``2^j >= 3|I|`` provided both grids are present, so
    the ratio ``|I_d| / |I|`` stays below 6.

    Raises:
        ScaleRange: if no cell within the scale range contains ``interval``.
    """
    if not grids:
        raise ScaleRange("No grid given")
    j_min = min(g.j_min for g in grids)
    j_max = max(g.j_max for g in grids)
    length = interval.length
    # smallest j with 2^j >= |I|
    j = max(j_min, math.ceil(math.log2(length.numerator) - math.log2(length.denominator)) - 1)
    while pow2(j) < length:
        j += 1
    ordered = sorted(grids, key=lambda g: g.kind is not GridKind.DYADIC)
    while j <= j_max:
        for grid in ordered:
            if not grid.j_min <= j <= grid.j_max:
                continue
            cell = grid.cell(interval.a, j)
            if cell.contains_interval(interval):
                return CoverResult(cell, grid.kind, j, cell.length / length)
        j += 1
    raise ScaleRange(f"No grid cell up to scale {j_max} contains {interval}")
