"""
Small measures and point sets shared by the tests.
"""
import random
from fractions import Fraction

from hypothesis import strategies as st

from weightlab.measure import PiecewiseMeasure, RationalInterval

UNIT = RationalInterval(Fraction(0), Fraction(1))

# density 3/2 on [0, 2/3): the first stage of w_1
FIRST_STAGE = PiecewiseMeasure([(RationalInterval(Fraction(0), Fraction(2, 3)), Fraction(3, 2))])

STEP = PiecewiseMeasure([
    (RationalInterval(Fraction(0), Fraction(1, 4)), Fraction(2)),
    (RationalInterval(Fraction(1, 4), Fraction(1, 2)), Fraction(1, 2)),
    (RationalInterval(Fraction(3, 4), Fraction(1)), Fraction(3)),
])


def uniform_unit(density=1) -> PiecewiseMeasure:
    return PiecewiseMeasure([(UNIT, Fraction(density))])


def random_measure(rng: random.Random, n_pieces: int = 4, denominator: int = 64) -> PiecewiseMeasure:
    """``n_pieces`` disjoint pieces with random rational ends in [0, 1) and densities in [1/4, 4]."""
    ends = sorted(rng.sample(range(denominator + 1), 2 * n_pieces))
    pieces = []
    for a, b in zip(ends[::2], ends[1::2]):
        density = Fraction(rng.randint(1, 16), 4)
        pieces.append((RationalInterval(Fraction(a, denominator), Fraction(b, denominator)), density))
    return PiecewiseMeasure(pieces)


def off_breakpoints(measure: PiecewiseMeasure, rng: random.Random, count: int, denominator: int = 997):
    """Rational points in [-1/2, 3/2) that avoid the breakpoints of ``measure``."""
    breaks = set(measure.breakpoints())
    points = []
    while len(points) < count:
        x = Fraction(rng.randrange(-denominator // 2, 3 * denominator // 2), denominator)
        if x not in breaks:
            points.append(x)
    return points


@st.composite
def measures(draw, max_pieces: int = 5, denominator: int = 48):
    n = draw(st.integers(min_value=1, max_value=max_pieces))
    ends = sorted(draw(st.sets(st.integers(min_value=0, max_value=denominator), min_size=2 * n, max_size=2 * n)))
    densities = draw(st.lists(st.integers(min_value=1, max_value=12), min_size=n, max_size=n))
    pieces = [(RationalInterval(Fraction(a, denominator), Fraction(b, denominator)), Fraction(d, 3))
              for a, b, d in zip(ends[::2], ends[1::2], densities)]
    return PiecewiseMeasure(pieces)


rationals = st.builds(Fraction, st.integers(min_value=-200, max_value=300), st.just(199))
