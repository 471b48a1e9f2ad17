"""
Numerical integration rules.

``graded_rule`` builds a composite Gauss-Legendre rule on ``[0, h]`` whose panels
shrink geometrically toward both ends, which handles the logarithmic blow-up of
Hilbert transforms at density jumps. Nodes of the right half are given as
negative offsets from the right endpoint so that distances to either endpoint
are computed without cancellation.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import NoConvergence

logger = logging.getLogger(__name__)

# (levels, order) schedule used by integrate_pieces
REFINEMENT_SCHEDULE = ((3, 4), (6, 6), (10, 8), (14, 10), (18, 12), (24, 16))


@lru_cache(maxsize=None)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    # map [-1, 1] to [0, 1]
    return (nodes + 1.0) / 2.0, weights / 2.0


def graded_rule(h: float, levels: int, order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on ``[0, h]`` graded toward both ends.

    Returns:
        (from_right, offsets, weights): ``from_right`` marks nodes whose offset is
        measured (negatively) from ``h`` rather than from ``0``.
    """
    t, w = _legendre(order)
    # panel edges of the left half, as fractions of h: 0, 2^-levels, ..., 1/4, 1/2
    edges = [0.0] + [2.0 ** (-m) for m in range(levels, 0, -1)]
    offsets = []
    weights = []
    for lo, hi in zip(edges, edges[1:]):
        width = hi - lo
        offsets.append((lo + width * t) * h)
        weights.append(width * w * h)
    left_offsets = np.concatenate(offsets)
    left_weights = np.concatenate(weights)
    from_right = np.concatenate([np.zeros(left_offsets.size, dtype=bool), np.ones(left_offsets.size, dtype=bool)])
    return from_right, np.concatenate([left_offsets, -left_offsets]), np.concatenate([left_weights, left_weights])


def integrate_pieces(g, pieces: Sequence[Tuple[object, float]], tol: float = 1e-6,
                     schedule: Iterable[Tuple[int, int]] = REFINEMENT_SCHEDULE) -> Tuple[float, float]:
    """Integrate ``g`` against piecewise-constant weights.

    Args:
        g: callable ``g(interval, from_right, offsets) -> ndarray`` evaluated on
            the nodes of one piece; node ``i`` is ``interval.b + offsets[i]`` when
            ``from_right[i]`` and ``interval.a + offsets[i]`` otherwise.
        pieces: ``(RationalInterval, density)`` pairs.
        tol: relative change between two refinement rounds that stops the loop.

    Returns:
        (value, error_bound) where ``error_bound`` is the last change.

    Raises:
        NoConvergence: if the schedule is exhausted.
    """
    previous = None
    for levels, order in schedule:
        total = 0.0
        for interval, density in pieces:
            h = float(interval.length)
            from_right, offsets, weights = graded_rule(h, levels, order)
            values = np.asarray(g(interval, from_right, offsets), dtype=float)
            total += float(density) * float(np.dot(values, weights))
        if previous is not None:
            change = abs(total - previous)
            if change <= tol * max(abs(total), 1e-300):
                return total, change
        logger.debug(f"Quadrature round levels={levels} order={order}: {total}")
        previous = total
    raise NoConvergence(f"Quadrature did not reach relative tolerance {tol}; last value {previous}")


def node_anchors(interval, from_right: np.ndarray) -> List:
    return [interval.b if right else interval.a for right in from_right]


def node_distances(piece, interval, from_right: np.ndarray, offsets: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distances from nodes on ``interval`` to the two ends of the enclosing ``piece``.

    Each node is measured from the end of ``interval`` it is anchored at, so the
    distance to the nearer end of ``piece`` carries no cancellation.
    """
    to_a = np.where(from_right, float(interval.b - piece.a) + offsets, float(interval.a - piece.a) + offsets)
    to_b = np.where(from_right, float(piece.b - interval.b) - offsets, float(piece.b - interval.a) - offsets)
    return to_a, to_b
