"""
Hilbert transform of piecewise-uniform and atomic measures.

Convention: ``H mu(x) = p.v. int dmu(y) / (y - x)``. A uniform piece of density
``d`` on ``[a, b)`` contributes ``d * ln|b - x| / |a - x|`` (principal value when
``a < x < b``) and an atom of mass ``m`` at ``z`` contributes ``m / (z - x)``.
"""
from __future__ import annotations

import math
import logging
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath
import numpy as np
from scipy.integrate import quad

from .config import to_mpf, working_precision
from .constant import ValueKind
from .errors import AtomAtPoint, NoConvergence
from .measure import PiecewiseMeasure, RationalInterval, as_fraction

logger = logging.getLogger(__name__)

TransformValue = namedtuple('TransformValue', 'value kind error_bound')

EPS64 = np.finfo(float).eps
_LATTICE_LIMIT = 2 ** 62
_CHUNK = 1 << 22


def _jump(measure: PiecewiseMeasure, x: Fraction):
    """(is breakpoint, density right of x minus density left of x)."""
    right = left = 0
    hit = False
    for piece in measure.pieces:
        if piece.interval.a == x:
            right = piece.density
            hit = True
        elif piece.interval.b == x:
            left = piece.density
            hit = True
    return hit, right - left


def hilbert_exact(measure: PiecewiseMeasure, x) -> TransformValue:
    """Closed-form transform at a rational point, logs in high-precision floats."""
    x = as_fraction(x)
    if measure.atom_at(x) is not None:
        raise AtomAtPoint(f"Point {x} carries an atom")
    hit, jump = _jump(measure, x)
    if hit and jump != 0:
        kind = ValueKind.PLUS_INFINITY if jump > 0 else ValueKind.MINUS_INFINITY
        return TransformValue(mpmath.inf if jump > 0 else -mpmath.inf, kind, 0.0)

    with working_precision():
        total = mpmath.mpf(0)
        magnitude = mpmath.mpf(0)
        for piece in measure.pieces:
            a, b = piece.interval
            d = to_mpf(piece.density)
            if x < a:
                term = mpmath.log1p(to_mpf((b - a) / (a - x)))
            elif x > b:
                term = -mpmath.log1p(to_mpf((b - a) / (x - b)))
            elif x == a:
                # equal densities on both sides: the log|0| terms cancel
                term = mpmath.log(to_mpf(b - a))
            elif x == b:
                term = -mpmath.log(to_mpf(b - a))
            else:
                term = mpmath.log(to_mpf((b - x) / (x - a)))
            total += d * term
            magnitude += abs(d * term) + abs(d)
        for atom in measure.atoms:
            term = to_mpf(atom.mass) / to_mpf(atom.position - x)
            total += term
            magnitude += abs(term)
        n_terms = len(measure.pieces) + len(measure.atoms)
        bound = float(magnitude * (n_terms + 1) * mpmath.eps * 4)
    return TransformValue(total, ValueKind.FINITE, bound)


def hilbert_quadrature_oracle(measure: PiecewiseMeasure, x, tol: float = 1e-10) -> TransformValue:
    """Independent quadrature value of the transform at ``x``.

    Every piece is integrated by QUADPACK in coordinates relative to ``x``; the
    piece containing ``x`` uses the Cauchy weight ``1 / s`` for the principal
    value.
    """
    x = as_fraction(x)
    if measure.atom_at(x) is not None:
        raise AtomAtPoint(f"Point {x} carries an atom")
    hit, _ = _jump(measure, x)
    if hit:
        raise ValueError(f"Oracle needs a point off the breakpoints, got {x}")
    per_piece_tol = tol / (2 * max(len(measure.pieces), 1))
    total = 0.0
    error = 0.0
    for piece in measure.pieces:
        lo, hi = float(piece.interval.a - x), float(piece.interval.b - x)
        d = float(piece.density)
        if piece.interval.contains(x):
            value, err = quad(lambda s: 1.0, lo, hi, weight='cauchy', wvar=0.0, epsabs=per_piece_tol, limit=200)
        else:
            value, err = quad(lambda s: 1.0 / s, lo, hi, epsabs=per_piece_tol, limit=200)
        total += d * value
        error += d * err
    for atom in measure.atoms:
        total += float(atom.mass) / float(atom.position - x)
    if not math.isfinite(total):
        raise NoConvergence(f"Oracle produced a non-finite value at {x}")
    return TransformValue(total, ValueKind.FINITE, error)


class HilbertEvaluator(object):
    """Vectorised float64 transform of one measure at many points.

    Endpoints are placed on an integer lattice ``Z / D`` (``D`` the common
    denominator) so distances from a point to every endpoint are exact integers
    up to one rounding of the point's own fractional lattice part. Logarithms
    use ``log1p`` of exact length-to-distance ratios.
    """

    def __init__(self, measure: PiecewiseMeasure):
        self.measure = measure
        pieces = measure.pieces
        atoms = measure.atoms
        self.n_pieces = len(pieces)
        self.density = np.array([float(p.density) for p in pieces], dtype=float)
        self.atom_mass = np.array([float(a.mass) for a in atoms], dtype=float)
        endpoints = [p.interval.a for p in pieces] + [p.interval.b for p in pieces] + [a.position for a in atoms]
        denominator = 1
        for value in endpoints:
            denominator = denominator * value.denominator // math.gcd(denominator, value.denominator)
        self.denominator = denominator
        scaled = [value * denominator for value in endpoints]
        self.lattice = all(abs(v) < _LATTICE_LIMIT for v in scaled)
        if self.lattice:
            ints = np.array([int(v) for v in scaled], dtype=np.int64)
            n = self.n_pieces
            self._a = ints[:n]
            self._b = ints[n:2 * n]
            self._z = ints[2 * n:]
            self._len = (self._b - self._a).astype(float)
        else:
            logger.debug(f"Lattice denominator {denominator} too large; using per-point rational distances")
            self._len = np.array([float(p.interval.length) for p in pieces], dtype=float)

    def _distances(self, anchors: Sequence[Fraction], offsets: np.ndarray):
        """Distances endpoint - point for every point, in the evaluator's units."""
        n = len(anchors)
        if self.lattice:
            D = self.denominator
            q = np.empty(n, dtype=np.int64)
            f = np.empty(n, dtype=float)
            for i, anchor in enumerate(anchors):
                scaled = anchor * D
                whole = scaled.numerator // scaled.denominator
                q[i] = whole
                f[i] = float(scaled - whole)
            shift = f + offsets * float(D)
            u = (self._a[None, :] - q[:, None]).astype(float) - shift[:, None]
            v = (self._b[None, :] - q[:, None]).astype(float) - shift[:, None]
            z = (self._z[None, :] - q[:, None]).astype(float) - shift[:, None]
            return u, v, z, float(D)
        pieces = self.measure.pieces
        atoms = self.measure.atoms
        u = np.empty((n, len(pieces)))
        v = np.empty((n, len(pieces)))
        z = np.empty((n, len(atoms)))
        for i, anchor in enumerate(anchors):
            u[i] = [float(p.interval.a - anchor) for p in pieces]
            v[i] = [float(p.interval.b - anchor) for p in pieces]
            z[i] = [float(a.position - anchor) for a in atoms]
        u -= offsets[:, None]
        v -= offsets[:, None]
        z -= offsets[:, None]
        return u, v, z, 1.0

    def evaluate(self, anchors: Sequence[Fraction], offsets: Optional[np.ndarray] = None):
        """Transform at the points ``anchors[i] + offsets[i]``.

        Returns:
            (values, error_bounds) as float arrays; values are ``+-inf`` at
            density jumps.
        """
        anchors = [as_fraction(a) for a in anchors]
        n = len(anchors)
        if offsets is None:
            offsets = np.zeros(n)
        offsets = np.asarray(offsets, dtype=float)
        values = np.empty(n)
        errors = np.empty(n)
        width = max(self.n_pieces + self.atom_mass.size, 1)
        step = max(_CHUNK // width, 1)
        for start in range(0, n, step):
            stop = min(start + step, n)
            values[start:stop], errors[start:stop] = self._evaluate_block(anchors[start:stop], offsets[start:stop])
        return values, errors

    def _evaluate_block(self, anchors, offsets):
        u, v, z, scale = self._distances(anchors, offsets)
        length = self._len[None, :]
        with np.errstate(divide='ignore', invalid='ignore'):
            left = u > 0
            right = v < 0
            inside = ~left & ~right
            term = np.zeros_like(u)
            term = np.where(left, np.log1p(length / np.where(left, u, 1.0)), term)
            term = np.where(right, -np.log1p(length / np.where(right, -v, 1.0)), term)
            safe_inside = inside & (u < 0) & (v > 0)
            term = np.where(safe_inside, np.log(np.where(safe_inside, v / np.where(safe_inside, -u, 1.0), 1.0)), term)
            weighted = term * self.density[None, :]
            values = weighted.sum(axis=1)
            errors = 8 * EPS64 * (np.abs(weighted) + self.density[None, :]).sum(axis=1) * max(self.n_pieces, 1)
            if z.shape[1]:
                atom_terms = self.atom_mass[None, :] * scale / z
                values = values + atom_terms.sum(axis=1)
                errors = errors + 4 * EPS64 * np.abs(atom_terms).sum(axis=1)
        boundary = ((u == 0) | (v == 0)).any(axis=1)
        if z.shape[1]:
            boundary |= (z == 0).any(axis=1)
        for i in np.nonzero(boundary)[0]:
            point = anchors[i] + Fraction(float(offsets[i]))
            exact = hilbert_exact(self.measure, point)
            values[i] = float(exact.value)
            errors[i] = exact.error_bound
        return values, errors

    def at_points(self, points: Sequence) -> tuple:
        return self.evaluate(list(points))

    def certified_value(self, point: Fraction, value: float, error: float) -> float:
        """Re-evaluate in high precision when the float value cannot fix the sign."""
        if abs(value) > error:
            return value
        exact = hilbert_exact(self.measure, point)
        if abs(exact.value) <= exact.error_bound:
            return 0.0
        return float(exact.value)


@dataclass
class ResidualRatios:
    """Sampled ratios ``|H mu(x)| / mu(x)`` on residual middle thirds."""
    k: int
    samples_per_interval: int
    global_min: float
    per_generation_min: List[float]
    per_residual: List[dict] = field(default_factory=list)
    sampled_residuals: int = 0
    total_residuals: int = 0

    @property
    def global_min_over_k(self) -> float:
        return self.global_min / self.k


def residual_sample_points(interval: RationalInterval, n: int) -> List[Fraction]:
    """Midpoints of ``n`` equal cells of ``interval``, exact rationals."""
    step = interval.length / n
    return [interval.a + (j + Fraction(1, 2)) * step for j in range(n)]


def hilbert_ratio_on_residuals(tree, measure: PiecewiseMeasure, samples_per_interval: int,
                               selection: Optional[Sequence[int]] = None) -> ResidualRatios:
    """Min over samples of ``|H mu| / density`` on every residual middle third.

    Args:
        tree: the TriadicTree ``measure`` was built on.
        selection: indices into ``tree.residual_supports()`` to sample; all when None.
    """
    supports = tree.residual_supports()
    indices = range(len(supports)) if selection is None else selection
    evaluator = HilbertEvaluator(measure)
    per_residual = []
    per_generation = {}
    for index in indices:
        generation, J, residual, middle = supports[index]
        points = residual_sample_points(middle, samples_per_interval)
        values, errors = evaluator.at_points(points)
        density = float(measure.density_at(points[0]))
        ratios = []
        for point, value, error in zip(points, values, errors):
            value = evaluator.certified_value(point, float(value), float(error))
            ratios.append(abs(value) / density)
        low = min(ratios)
        per_residual.append({
            "generation": generation,
            "J": J.to_dict(),
            "residual": residual.to_dict(),
            "min_ratio": low,
            "density": density,
            "middle_mass": measure.measure_of(middle),
        })
        per_generation[generation] = min(per_generation.get(generation, math.inf), low)
    generations = [per_generation.get(i, math.nan) for i in range(tree.depth + 1)]
    global_min = min(per_generation.values()) if per_generation else math.nan
    logger.info(f"k={tree.k} depth={tree.depth}: min |H w|/w over {len(per_residual)} residuals = {global_min:.6g}")
    return ResidualRatios(tree.k, samples_per_interval, global_min, generations, per_residual,
                          len(per_residual), len(supports))
