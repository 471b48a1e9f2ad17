"""
Middle-thirds Cantor family, the Cantor measure approximants gamma_R, the zeros
of H(gamma) on the gaps and the atomic measure lambda.

Level r has the 2^r intervals ``I^r_l`` of length ``3^-r`` (l = 1..2^r, left to
right) and the gaps ``G^r_l``, the open middle thirds of ``I^r_l``. gamma_R has
density ``(3/2)^R`` on every ``I^R_l``; it gives each ``I^r_l`` (r <= R) mass
``2^-r`` exactly.
"""
from __future__ import annotations

import math
import logging
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constant import DEFAULT_CANTOR_CAP, DEFAULT_ATOM_CAP, DEFAULT_ZERO_TOL, CANTOR_MASS_RATIO, ZERO_SAMPLE_COUNT
from .errors import SizeLimit, NoConvergence, MonotonicityViolation, UsageError
from .maximal import maximal_exact
from .measure import PiecewiseMeasure, RationalInterval, fraction_str
from .transform import HilbertEvaluator

logger = logging.getLogger(__name__)

ZeroEstimate = namedtuple('ZeroEstimate', 'r l lo hi estimate R direction')


def _check_level(R: int, cap: int) -> None:
    if R < 0:
        raise ValueError(f"Level must be non-negative, got {R}")
    if 2 ** R > cap:
        raise SizeLimit(f"Level {R} has {2 ** R} intervals, cap is {cap}")


def _left_numerators(r: int) -> List[int]:
    """Left endpoints of the level-r intervals times 3^r."""
    starts = [0]
    for _ in range(r):
        starts = [n for s in starts for n in (3 * s, 3 * s + 2)]
    return starts


def cantor_intervals(r: int, cap: int = DEFAULT_CANTOR_CAP) -> List[RationalInterval]:
    _check_level(r, cap)
    scale = 3 ** r
    return [RationalInterval(Fraction(n, scale), Fraction(n + 1, scale)) for n in _left_numerators(r)]


def cantor_interval(r: int, l: int) -> RationalInterval:
    """``I^r_l`` for ``1 <= l <= 2^r``; the binary digits of l - 1 pick left or right thirds."""
    if not 1 <= l <= 2 ** r:
        raise ValueError(f"No interval I^{r}_{l}")
    numerator = 0
    for bit in format(l - 1, f"0{r}b") if r else "":
        numerator = 3 * numerator + (2 if bit == "1" else 0)
    return RationalInterval(Fraction(numerator, 3 ** r), Fraction(numerator + 1, 3 ** r))


def gap(r: int, l: int) -> RationalInterval:
    """The gap ``G^r_l``, stored as the interval between its endpoints."""
    return cantor_interval(r, l).middle_child


def cantor_measure_approx(R: int, cap: int = DEFAULT_CANTOR_CAP) -> PiecewiseMeasure:
    density = Fraction(3, 2) ** R
    return PiecewiseMeasure([(interval, density) for interval in cantor_intervals(R, cap)])


@lru_cache(maxsize=4)
def _evaluator(R: int) -> HilbertEvaluator:
    return HilbertEvaluator(cantor_measure_approx(R))


def _start_level(r: int, tol: float) -> int:
    # gamma_R and gamma_{R+2} agree in mass and first moment on every I^R_l
    return max(r + 3, math.ceil(math.log(1.0 / tol, 3) / 2) + 1)


def _sign(value: float, error: float) -> int:
    if abs(value) <= error:
        return 0
    return 1 if value > 0 else -1


def _brackets(evaluator: HilbertEvaluator, gaps: Sequence[RationalInterval]):
    """Sign-change bracket of H(gamma_R) on every gap from its interior samples.

    At the left end of a gap the density drops, so H -> -inf there, and H -> +inf
    at the right end. These limits close a bracket when all samples share a sign.
    The direction is recorded only when two samples of opposite sign were seen;
    an exact zero or a bracket closed by a limit leaves it ``None``.
    """
    n = ZERO_SAMPLE_COUNT
    points = [g.a + Fraction(s, n + 1) * g.length for g in gaps for s in range(1, n + 1)]
    values, errors = evaluator.at_points(points)
    out = []
    for index, g in enumerate(gaps):
        row = points[index * n:(index + 1) * n]
        signs = [_sign(float(v), float(e)) for v, e in zip(values[index * n:(index + 1) * n],
                                                        errors[index * n:(index + 1) * n])]
        zeros = [p for p, s in zip(row, signs) if s == 0]
        if zeros:
            out.append((zeros[0], zeros[0], 0, None))
            continue
        changes = [i for i in range(n - 1) if signs[i] != signs[i + 1]]
        if len(changes) > 1:
            raise MonotonicityViolation(f"H(gamma) changes sign {len(changes)} times on the gap {g}")
        if changes:
            i = changes[0]
            direction = "increasing" if signs[i] < 0 else "decreasing"
            out.append((row[i], row[i + 1], signs[i], direction))
        elif signs[0] > 0:
            out.append((g.a, row[0], -1, None))
        else:
            out.append((row[-1], g.b, -1, None))
    return out


def _bisect(evaluator: HilbertEvaluator, brackets, tol: float):
    lo = [b[0] for b in brackets]
    hi = [b[1] for b in brackets]
    sign_lo = [b[2] for b in brackets]
    while True:
        active = [i for i in range(len(lo)) if hi[i] - lo[i] > tol]
        if not active:
            return lo, hi
        mids = [(lo[i] + hi[i]) / 2 for i in active]
        values, errors = evaluator.at_points(mids)
        for i, mid, value, error in zip(active, mids, values, errors):
            sign = _sign(float(value), float(error))
            if sign == 0:
                lo[i] = hi[i] = mid
            elif sign == sign_lo[i]:
                lo[i] = mid
            else:
                hi[i] = mid


def find_zeros(r: int, ls: Sequence[int], tol: float = DEFAULT_ZERO_TOL,
               cap: int = DEFAULT_CANTOR_CAP) -> List[ZeroEstimate]:
    """Zeros of H(gamma) on the gaps ``G^r_l`` for every l in ``ls``.

    H(gamma) is replaced by H(gamma_R); R grows in steps of 2 until every
    bracket midpoint moves by at most ``tol`` between R and R + 2.

    Raises:
        MonotonicityViolation: if the sampled signs on a gap change more than once.
        NoConvergence: if the brackets are not stable before the level cap.
    """
    gaps = [gap(r, l) for l in ls]
    R = _start_level(r, tol)
    previous = None
    while 2 ** R <= cap:
        evaluator = _evaluator(R)
        brackets = _brackets(evaluator, gaps)
        lo, hi = _bisect(evaluator, brackets, tol)
        mids = [(a + b) / 2 for a, b in zip(lo, hi)]
        logger.debug(f"Level {r} zeros with R={R}: {len(gaps)} brackets")
        if previous is not None and all(abs(m - p) <= tol for m, p in zip(mids, previous)):
            return [ZeroEstimate(r, l, a, b, float(m), R, bracket[3])
                    for l, a, b, m, bracket in zip(ls, lo, hi, mids, brackets)]
        previous = mids
        R += 2
    raise NoConvergence(f"Zeros on level {r} not stable to {tol} before gamma_R reached the cap {cap}")


def find_zero(r: int, l: int, tol: float = DEFAULT_ZERO_TOL, cap: int = DEFAULT_CANTOR_CAP) -> ZeroEstimate:
    return find_zeros(r, [l], tol, cap)[0]


@dataclass
class CantorFamily:
    r_max: int
    tol: float
    zeros: Dict[Tuple[int, int], ZeroEstimate] = field(default_factory=dict)

    def intervals(self, r: int) -> List[RationalInterval]:
        return cantor_intervals(r)

    def gaps(self, r: int) -> List[RationalInterval]:
        return [interval.middle_child for interval in cantor_intervals(r)]

    def zero(self, r: int, l: int) -> Fraction:
        """Rational position of ``zeta^r_l``: the midpoint of its bracket."""
        estimate = self.zeros[(r, l)]
        return (estimate.lo + estimate.hi) / 2

    def to_dict(self) -> List[dict]:
        return zeros_to_dict(self.zeros.values())


def build_cantor_family(r_max: int, tol: float = DEFAULT_ZERO_TOL) -> CantorFamily:
    family = CantorFamily(r_max, tol)
    for r in range(r_max + 1):
        for estimate in find_zeros(r, range(1, 2 ** r + 1), tol):
            family.zeros[(r, estimate.l)] = estimate
        logger.info(f"Zeros of level {r} located ({2 ** r} gaps)")
    return family


def zeros_to_dict(zeros) -> List[dict]:
    return [{"r": z.r, "l": z.l, "lo": fraction_str(z.lo), "hi": fraction_str(z.hi), "est": z.estimate,
             "R": z.R, "direction": z.direction}
            for z in sorted(zeros, key=lambda z: (z.r, z.l))]


@dataclass
class LambdaMeasure:
    """``lambda = sum_r sum_l (2/9)^r delta_{zeta^r_l}``, truncated at ``r_max``."""
    family: CantorFamily
    measure: PiecewiseMeasure

    @property
    def atoms(self):
        return self.measure.atoms

    def total_mass(self) -> Fraction:
        return self.measure.total_mass()


def build_lambda(r_max: int, tol: float = DEFAULT_ZERO_TOL) -> LambdaMeasure:
    family = build_cantor_family(r_max, tol)
    atoms = [(family.zero(r, l), CANTOR_MASS_RATIO ** r) for (r, l) in family.zeros]
    return LambdaMeasure(family, PiecewiseMeasure((), atoms))


def lambda_hilbert_energy(lam: LambdaMeasure, R: int,
                          f: Optional[Callable[[RationalInterval], Fraction]] = None) -> Tuple[float, float]:
    """Finite truncation of ``int |H(f gamma_R)|^2 dlambda``.

    Args:
        f: density multiplier per level-R interval; 1 when omitted.

    Returns:
        (value, error_bound)
    """
    gamma = cantor_measure_approx(R)
    if f is not None:
        gamma = PiecewiseMeasure((p.interval, p.density * f(p.interval)) for p in gamma.pieces)
    evaluator = HilbertEvaluator(gamma)
    positions = [atom.position for atom in lam.atoms]
    masses = np.array([float(atom.mass) for atom in lam.atoms])
    values, errors = evaluator.at_points(positions)
    energy = float(np.dot(masses, values ** 2))
    bound = float(np.dot(masses, 2 * np.abs(values) * errors + errors ** 2))
    return energy, bound


@dataclass
class Theorem6Blocks:
    r: int
    T: int
    R: int
    blocks: List[dict] = field(default_factory=list)

    @property
    def partial_sums(self) -> List[Fraction]:
        sums, running = [], Fraction(0)
        for block in self.blocks:
            running += block["value"]
            sums.append(running)
        return sums


def theorem6_blocks(r: int, T: int, R: Optional[int] = None, tol: float = DEFAULT_ZERO_TOL,
                    atom_cap: int = DEFAULT_ATOM_CAP) -> Theorem6Blocks:
    """Blocks ``sum_s M(1_{I^r_1} gamma_R)(zeta^n_s)^2 (2/9)^n`` for ``n = r + 4i``, i = 0..T.

    The sum runs over the ``2^{4i}`` gaps of level n inside ``I^r_1``. Each zeta
    lies in ``G^n_s`` and so in ``I^n_s``, whose average under the restricted
    measure is ``(3/2)^n`` exactly; that witness certifies ``M >= (3/2)^n``.

    Raises:
        UsageError: if ``R < r + 4T + 2``.
        SizeLimit: if ``2^{4T}`` exceeds ``atom_cap``.
    """
    if R is None:
        R = r + 4 * T + 2
    if R < r + 4 * T + 2:
        raise UsageError(f"theorem6 needs R >= r + 4T + 2 = {r + 4 * T + 2}, got R={R}")
    if 2 ** (4 * T) > atom_cap:
        raise SizeLimit(f"T={T} needs {2 ** (4 * T)} atoms per block, cap is {atom_cap}")
    parent = cantor_interval(r, 1)
    restricted = cantor_measure_approx(R).restrict(parent)
    result = Theorem6Blocks(r, T, R)
    for i in range(T + 1):
        n = r + 4 * i
        mass = CANTOR_MASS_RATIO ** n
        witness_average = Fraction(3, 2) ** n
        value = Fraction(0)
        certified = Fraction(0)
        min_ratio = None
        for zero in find_zeros(n, range(1, 2 ** (4 * i) + 1), tol):
            position = (zero.lo + zero.hi) / 2
            witness = cantor_interval(n, zero.l)
            lower = restricted.measure_of(witness) / witness.length
            M = maximal_exact(restricted, position)
            if M < lower:
                raise NoConvergence(f"Maximal value {M} below witness average {lower} at {position}")
            value += M * M * mass
            certified += lower * lower * mass
            ratio = M / witness_average
            min_ratio = ratio if min_ratio is None else min(min_ratio, ratio)
        result.blocks.append({
            "i": i,
            "n": n,
            "atoms": 2 ** (4 * i),
            "value": value,
            "certified": certified,
            "witness_average": witness_average,
            "min_M_over_witness": min_ratio,
        })
        logger.info(f"theorem6 r={r}: block {i} = {float(value):.6g} (certified {float(certified):.6g})")
    return result
