"""
Hardy-Littlewood maximal function of piecewise-uniform measures.

``maximal_exact`` computes

    M mu(x) = sup { mu(I) / |I| : I an interval containing x }

exactly. For fixed right endpoint the average is monotone in the left endpoint
while that endpoint moves through a piece of constant density, and likewise for
the right endpoint, so the supremum is attained with both endpoints in
``breakpoints(mu) u {x}`` or in the limit of intervals shrinking to ``x``, where
it equals ``density_at(mu, x)``.
"""
from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constant import DEFAULT_ORACLE_GRID
from .errors import AtomicPart, ScaleRange, UsageError
from .grids import GridFamily, pow2
from .measure import PiecewiseMeasure, RationalInterval, as_fraction
from .quadrature import node_distances

logger = logging.getLogger(__name__)


def _require_atom_free(measure: PiecewiseMeasure, what: str) -> None:
    if not measure.is_atom_free:
        raise AtomicPart(f"{what} needs an atom-free measure, got {len(measure.atoms)} atoms")


def average(measure: PiecewiseMeasure, interval: RationalInterval):
    return measure.measure_of(interval) / interval.length


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _lower_hull(points):
    hull = []
    for point in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    return hull


def _upper_hull(points):
    hull = []
    for point in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) >= 0:
            hull.pop()
        hull.append(point)
    return hull


def _best_slope_from(left, hull):
    """Largest slope from ``left`` to a vertex of the concave ``hull`` lying to its right."""
    start = 0
    while start < len(hull) and hull[start][0] <= left[0]:
        start += 1
    if start == len(hull):
        return None

    def slope(j):
        return (hull[j][1] - left[1]) / (hull[j][0] - left[0])

    lo, hi = start, len(hull) - 1
    # slopes to the vertices of a concave chain seen from a point on its left are unimodal
    while lo < hi:
        mid = (lo + hi) // 2
        if slope(mid) < slope(mid + 1):
            lo = mid + 1
        else:
            hi = mid
    return slope(lo)


def maximal_exact(measure: PiecewiseMeasure, x):
    """Exact value of the uncentered maximal function at ``x``.

    Only breakpoints within ``total_mass / best`` of ``x`` can beat the current
    best average, so the candidate set shrinks as the seed improves. Among the
    remaining candidates the optimal left endpoint is a vertex of the lower
    convex hull of the distribution function on the left of ``x`` and the
    optimal right endpoint a vertex of the upper hull on the right.

    Raises:
        AtomicPart: if the measure has atoms.
    """
    _require_atom_free(measure, "maximal_exact")
    x = as_fraction(x)
    best = measure.density_at(x)
    breaks = measure.breakpoints()
    if not breaks:
        return best
    total = measure.total_mass()
    i = bisect_right(breaks, x)

    # seeds: the hull of the support and x, then the neighbouring breakpoints
    lo, hi = min(breaks[0], x), max(breaks[-1], x)
    best = max(best, total / (hi - lo))
    if 0 < i < len(breaks):
        best = max(best, average(measure, RationalInterval(breaks[i - 1], breaks[i])))
    if best == 0:
        return best
    window = total / best

    cum = measure.cumulative
    here = (x, cum(x))
    left = [here]
    j = i - 1
    while j >= 0 and x - breaks[j] <= window:
        if breaks[j] < x:
            left.append((breaks[j], cum(breaks[j])))
        j -= 1
    left.reverse()
    right = [here]
    j = i
    while j < len(breaks) and breaks[j] - x <= window:
        right.append((breaks[j], cum(breaks[j])))
        j += 1

    right_hull = _upper_hull(right)
    for point in _lower_hull(left):
        value = _best_slope_from(point, right_hull)
        if value is not None and value > best:
            best = value
    logger.debug(f"M({x}) from {len(left)} left and {len(right)} right candidates")
    return best


def maximal_grid_oracle(measure: PiecewiseMeasure, x, n: int = DEFAULT_ORACLE_GRID) -> float:
    """Lower bound for ``maximal_exact`` from float averages over a finite family.

    Endpoints range over a uniform grid of ``n + 1`` points on each side of ``x``,
    points at distance ``span / n**3`` on both sides of every breakpoint, and a
    geometric sequence shrinking toward ``x``.
    """
    _require_atom_free(measure, "maximal_grid_oracle")
    x = as_fraction(x)
    limit = float(measure.density_at(x))
    breaks = measure.breakpoints()
    if not breaks:
        return limit
    lo, hi = min(breaks[0], x), max(breaks[-1], x)
    span = float(hi - lo)
    # coordinates relative to x keep float resolution near x
    rel = np.array([float(b - x) for b in breaks])
    cum = np.array([float(measure.cumulative(b)) for b in breaks])
    delta = span / float(n) ** 3
    near = np.concatenate([rel - delta, rel + delta])
    shrink = span * 2.0 ** -np.arange(1, 21)

    left = np.concatenate([np.linspace(float(lo - x), 0.0, n + 1), near[near <= 0], -shrink])
    right = np.concatenate([np.linspace(0.0, float(hi - x), n + 1), near[near >= 0], shrink])
    c_left = np.interp(left, rel, cum)
    c_right = np.interp(right, rel, cum)
    lengths = right[None, :] - left[:, None]
    masses = c_right[None, :] - c_left[:, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        averages = np.where(lengths > 0, masses / np.where(lengths > 0, lengths, 1.0), -np.inf)
    return max(limit, float(averages.max()))


GridMaximum = namedtuple('GridMaximum', 'value cell tail_bound upper_bound')


def dyadic_maximal(measure: PiecewiseMeasure, x, grids: Union[GridFamily, Sequence[GridFamily]]) -> GridMaximum:
    """Largest average over grid cells containing ``x`` within the scale range.

    Cells coarser than ``j_max`` have average at most ``total_mass / 2^j_max``;
    ``upper_bound`` is the larger of that certificate and ``value``.
    """
    if isinstance(grids, GridFamily):
        grids = (grids,)
    if not grids:
        raise ScaleRange("No grid given")
    x = as_fraction(x)
    best, best_cell = None, None
    for grid in grids:
        for j in grid.scales:
            cell = grid.cell(x, j)
            value = average(measure, cell)
            if best is None or value > best:
                best, best_cell = value, cell
    j_max = max(g.j_max for g in grids)
    tail = measure.total_mass() / pow2(j_max)
    return GridMaximum(best, best_cell, tail, max(best, tail))


FineRun = namedtuple('FineRun', 'region average scale')


@dataclass
class LinearizationMap:
    """Dyadic linearization ``L(1_Q w) = sum_I E_I(1_Q w) 1_{E(I)}``.

    ``assignments`` maps a grid cell I to the pieces of E(I). Where ``1_Q w`` is
    constant on a whole stretch and the finest cells win, the stretch is kept
    as a ``FineRun``: each finest-scale cell inside ``region`` is assigned to
    itself with the common ``average``.
    """
    grid: GridFamily
    Q: RationalInterval
    j_min: int
    assignments: Dict[RationalInterval, List[RationalInterval]] = field(default_factory=dict)
    averages: Dict[RationalInterval, object] = field(default_factory=dict)
    fine_runs: List[FineRun] = field(default_factory=list)

    def assign(self, cell: RationalInterval, part: RationalInterval, value) -> None:
        parts = self.assignments.setdefault(cell, [])
        self.averages[cell] = value
        if parts and parts[-1].b == part.a:
            parts[-1] = RationalInterval(parts[-1].a, part.b)
        else:
            parts.append(part)

    def add_fine_run(self, region: RationalInterval, value) -> None:
        if self.fine_runs:
            last = self.fine_runs[-1]
            if last.region.b == region.a and last.average == value:
                self.fine_runs[-1] = FineRun(RationalInterval(last.region.a, region.b), value, self.j_min)
                return
        self.fine_runs.append(FineRun(region, value, self.j_min))

    def segments(self) -> List[Tuple[RationalInterval, object, Optional[RationalInterval]]]:
        """``(part, average, cell)`` sorted by position; ``cell`` is None for fine runs."""
        out = [(part, self.averages[cell], cell) for cell, parts in self.assignments.items() for part in parts]
        out.extend((run.region, run.average, None) for run in self.fine_runs)
        out.sort(key=lambda item: item[0].a)
        return out

    def value_at(self, x):
        x = as_fraction(x)
        for part, value, _ in self.segments():
            if part.contains(x):
                return value
        return None

    def cell_at(self, x) -> Optional[RationalInterval]:
        """The cell I with ``x`` in E(I)."""
        x = as_fraction(x)
        for part, _, cell in self.segments():
            if part.contains(x):
                return cell if cell is not None else self.grid.cell(x, self.j_min)
        return None

    def covered_length(self) -> Fraction:
        return sum((part.length for part, _, _ in self.segments()), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "Q": self.Q.to_dict(),
            "j_min": self.j_min,
            "assignments": [
                {"I": cell.to_dict(), "average": str(self.averages[cell]), "E": [p.to_dict() for p in parts]}
                for cell, parts in sorted(self.assignments.items(), key=lambda item: (item[0].a, item[0].b))
            ],
            "fine_runs": [{"region": run.region.to_dict(), "average": str(run.average), "scale": run.scale}
                          for run in self.fine_runs],
        }


def linearize_maximal(w: PiecewiseMeasure, Q: RationalInterval, grid: Union[GridFamily, Sequence[GridFamily]],
                      depth: Optional[int] = None) -> LinearizationMap:
    """Assign every point of Q the grid cell maximizing the average of ``1_Q w``.

    Ties go to the smaller cell. The search descends from the coarsest scale and
    stops in cells where ``1_Q w`` has no breakpoint, since all their subcells
    share the same average.

    Args:
        grid: one grid family, or a sequence holding exactly one; a grid pair
            needs one call per family.
        depth: number of scales below ``j_max`` to use; defaults to the full range.

    Raises:
        AtomicPart: if ``w`` has atoms.
        ScaleRange: if ``depth`` leaves no scale.
        UsageError: if more than one grid family is given.
    """
    _require_atom_free(w, "linearize_maximal")
    if not isinstance(grid, GridFamily):
        if len(grid) != 1:
            raise UsageError(f"linearize_maximal takes one grid family, got {len(grid)}")
        grid = grid[0]
    j_min = grid.j_min if depth is None else grid.j_max - depth
    if j_min > grid.j_max or j_min < grid.j_min:
        raise ScaleRange(f"depth {depth} outside the scale range [{grid.j_min}, {grid.j_max}]")
    f = w.restrict(Q)
    breaks = sorted(set(f.breakpoints()) | {Q.a, Q.b})
    lmap = LinearizationMap(grid, Q, j_min)

    def has_break_inside(cell: RationalInterval) -> bool:
        i = bisect_right(breaks, cell.a)
        return i < len(breaks) and breaks[i] < cell.b

    def descend(cell, j, best, best_cell):
        value = average(f, cell)
        if best is None or value >= best:
            best, best_cell = value, cell
        part = cell.intersection(Q)
        if part is None:
            return
        if j == j_min:
            lmap.assign(best_cell, part, best)
            return
        if not has_break_inside(cell):
            # 1_Q w is constant on cell, so every subcell has the same average
            if value >= best:
                lmap.add_fine_run(part, value)
            else:
                lmap.assign(best_cell, part, best)
            return
        for child in grid.children(cell):
            descend(child, j - 1, best, best_cell)

    for top in grid.cells_meeting(Q, grid.j_max):
        descend(top, grid.j_max, None, None)
    logger.debug(f"Linearization of {Q}: {len(lmap.assignments)} cells, {len(lmap.fine_runs)} fine runs")
    return lmap


class MaximalProfile(object):
    """``M mu`` at many points of the line, in float64.

    Between two consecutive breakpoints the density is a constant d (zero in a
    gap of the support). For x there the optimal interval is one of: both
    endpoints at breakpoints outside the cell (a constant), ``[x, r)`` or
    ``[l, x)`` with r, l breakpoints beyond the cell, or the shrinking limit d.
    The best r lies on the upper hull of the distribution function right of the
    cell and the best l on the lower hull left of it, so each cell keeps a
    constant and two short candidate lists.
    """

    def __init__(self, measure: PiecewiseMeasure):
        _require_atom_free(measure, "MaximalProfile")
        self.measure = measure
        self.breaks = measure.breakpoints()
        self.total = measure.total_mass()
        self._cum = [measure.cumulative(b) for b in self.breaks]
        self._cells: Dict[tuple, tuple] = {}

    def _cell_data(self, lo, hi, d):
        """Candidates for the cell ``[lo, hi)`` of density ``d``; None marks an unbounded side."""
        data = self._cells.get((lo, hi))
        if data is not None:
            return data
        window = self.total / d if d > 0 else None

        def near(distance):
            return window is None or distance <= window

        left = []
        if lo is not None:
            j = bisect_right(self.breaks, lo) - 1
            while j >= 0 and near(lo - self.breaks[j]):
                left.append((self.breaks[j], self._cum[j]))
                j -= 1
            left.reverse()
        right = []
        if hi is not None:
            j = bisect_left(self.breaks, hi)
            while j < len(self.breaks) and near(self.breaks[j] - hi):
                right.append((self.breaks[j], self._cum[j]))
                j += 1

        lower = _lower_hull(left)
        upper = _upper_hull(right)
        best = d
        for point in lower:
            value = _best_slope_from(point, upper)
            if value is not None and value > best:
                best = value
        # candidates farther than total / best cannot beat the constant
        window = self.total / best if best > 0 else None
        c_lo = self.measure.cumulative(lo) if lo is not None else 0
        c_hi = self.measure.cumulative(hi) if hi is not None else 0
        r_off = np.array([float(r - hi) for r, _ in upper if hi < r and near(r - hi)])
        r_mass = np.array([float(c - c_hi) for r, c in upper if hi < r and near(r - hi)])
        l_off = np.array([float(lo - l) for l, _ in lower if l < lo and near(lo - l)])
        l_mass = np.array([float(c_lo - c) for l, c in lower if l < lo and near(lo - l)])
        data = (float(best), float(d), r_off, r_mass, l_off, l_mass)
        self._cells[(lo, hi)] = data
        return data

    def on_piece(self, index: int, to_a: np.ndarray, to_b: np.ndarray) -> np.ndarray:
        """Values at the points of piece ``index`` at distances ``to_a``, ``to_b`` from its ends."""
        piece = self.measure.pieces[index]
        return self._evaluate(self._cell_data(piece.interval.a, piece.interval.b, piece.density), to_a, to_b)

    @staticmethod
    def _evaluate(data, to_a: np.ndarray, to_b: np.ndarray) -> np.ndarray:
        best, d, r_off, r_mass, l_off, l_mass = data
        values = np.full(np.shape(to_a), best)
        if r_off.size:
            right = (r_mass[None, :] + d * to_b[:, None]) / (r_off[None, :] + to_b[:, None])
            values = np.maximum(values, right.max(axis=1))
        if l_off.size:
            left = (l_mass[None, :] + d * to_a[:, None]) / (l_off[None, :] + to_a[:, None])
            values = np.maximum(values, left.max(axis=1))
        return values

    def on_nodes(self, interval: RationalInterval, from_right: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """Values at quadrature nodes of ``interval``, which must not cross a breakpoint.

        The interval may lie in a gap of the support, where the density is zero.
        """
        index = self.measure.piece_index(interval.a)
        if index >= 0:
            piece = self.measure.pieces[index]
            cell, lo, hi, d = piece.interval, piece.interval.a, piece.interval.b, piece.density
        else:
            i = bisect_right(self.breaks, interval.a)
            lo = self.breaks[i - 1] if i > 0 else None
            hi = self.breaks[i] if i < len(self.breaks) else None
            cell = RationalInterval(interval.a if lo is None else lo, interval.b if hi is None else hi)
            d = 0
        if not cell.contains_interval(interval):
            raise ValueError(f"{interval} crosses a breakpoint of the measure")
        to_a, to_b = node_distances(cell, interval, from_right, offsets)
        return self._evaluate(self._cell_data(lo, hi, d), to_a, to_b)

    def at(self, x):
        return maximal_exact(self.measure, x)
