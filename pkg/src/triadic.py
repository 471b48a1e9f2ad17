"""
Triadic construction of the weights w_k.

For a scale parameter k, ``K_0 = {[0, 1)}``. Generation i holds the triadic
intervals K of length ``3^{-ik}``, their middle children ``J = K^m`` and the
residual intervals ``I(J)`` of length ``3^{-(i+1)k}`` placed immediately left of J
(sign +1) or right of J (sign -1). The K of generation i+1 are the triadic
intervals of length ``3^{-(i+1)k}`` tiling the J of generation i.

The stage measure ``w_k^i`` keeps ``w_k^{i-1}`` off the generation-i K, keeps the
mass of each K, and spreads it uniformly on ``K^m u I(K^m)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .constant import SignRule, Closure, DEFAULT_RESIDUAL_CAP
from .errors import SizeLimit
from .measure import PiecewiseMeasure, RationalInterval, uniform
from .transform import HilbertEvaluator, hilbert_exact

logger = logging.getLogger(__name__)

UNIT = RationalInterval(0, 1)


@dataclass
class Generation:
    index: int
    K: List[RationalInterval]
    J: List[RationalInterval]
    residuals: List[RationalInterval]
    signs: List[int]

    @property
    def K_length(self) -> Fraction:
        return self.K[0].length

    def residual_of(self) -> Dict[RationalInterval, RationalInterval]:
        return dict(zip(self.J, self.residuals))

    def sign_of(self) -> Dict[RationalInterval, int]:
        return dict(zip(self.J, self.signs))

    def to_dict(self, with_K: bool = True) -> dict:
        data = {
            "index": self.index,
            "K_length": str(self.K_length),
            "K_count": len(self.K),
            "J": [j.to_dict() for j in self.J],
            "residuals": [r.to_dict() for r in self.residuals],
            "signs": list(self.signs),
        }
        if with_K:
            data["K"] = [kk.to_dict() for kk in self.K]
        return data


@dataclass
class TriadicTree:
    k: int
    depth: int
    sign_rule: SignRule
    generations: List[Generation] = field(default_factory=list)

    def residual_supports(self) -> List[Tuple[int, RationalInterval, RationalInterval, RationalInterval]]:
        """All ``(generation, J, I(J), I(J)^m)`` up to the tree depth."""
        out = []
        for generation in self.generations:
            for J, residual in zip(generation.J, generation.residuals):
                out.append((generation.index, J, residual, residual.middle_child))
        return out

    @property
    def residual_count(self) -> int:
        return sum(len(g.J) for g in self.generations)

    def parent_of(self, J: RationalInterval) -> RationalInterval:
        return RationalInterval(J.a - J.length, J.b + J.length)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "depth": self.depth,
            "sign_rule": self.sign_rule.value,
            "generations": [g.to_dict() for g in self.generations],
        }


@dataclass
class ConstructionState:
    tree: TriadicTree
    partial_measure: PiecewiseMeasure
    generation: int


def residual_count(k: int, depth: int) -> int:
    base = 3 ** (k - 1)
    return sum(base ** i for i in range(depth + 1))


def _check_size(k: int, depth: int, cap: int) -> None:
    if k < 1 or depth < 0:
        raise ValueError(f"Need k >= 1 and depth >= 0, got k={k}, depth={depth}")
    count = residual_count(k, depth)
    if count > cap:
        raise SizeLimit(f"k={k}, depth={depth} needs {count} residual intervals, cap is {cap}")


def place_residual(J: RationalInterval, length: Fraction, sign: int) -> RationalInterval:
    if sign == 1:
        return RationalInterval(J.a - length, J.a)
    return RationalInterval(J.b, J.b + length)


def _sign_of(value, error_bound) -> int:
    """+1 for a positive value or one within ``error_bound`` of zero, else -1."""
    return 1 if abs(value) <= error_bound or value > 0 else -1


def select_sign(state: ConstructionState, J: RationalInterval) -> int:
    """Greedy sign: +1 when the transform of the fixed outside mass at the center of J is >= 0.

    The outside mass is the partial measure restricted to the complement of the
    parent K of J; a value within its rounding bound of zero counts as a tie.
    """
    parent = state.tree.parent_of(J)
    outside = state.partial_measure.restrict_complement(parent)
    value = hilbert_exact(outside, J.center)
    return _sign_of(value.value, value.error_bound)


def _greedy_signs(state: ConstructionState, Js: List[RationalInterval]) -> List[int]:
    """``select_sign`` for a whole generation, with a vectorised first pass.

    The previous stage is uniform on every parent K and K is symmetric about the
    center of J, so the parent's own contribution vanishes and the transform of
    the whole previous stage at the center equals that of the outside mass.
    Centers whose float value is within its bound of zero go to ``select_sign``.
    """
    previous = state.partial_measure
    if not previous.pieces:
        return [1] * len(Js)
    evaluator = HilbertEvaluator(previous)
    values, errors = evaluator.at_points([J.center for J in Js])
    return [select_sign(state, J) if abs(value) <= error else _sign_of(value, 0.0)
            for J, value, error in zip(Js, values, errors)]


def build_w_k(k: int, depth: int, sign_rule: SignRule = SignRule.GREEDY, closure: Closure = Closure.STAGE,
              cap: int = DEFAULT_RESIDUAL_CAP) -> Tuple[TriadicTree, PiecewiseMeasure]:
    """Tree and finite-stage measure ``w_k^depth`` (total mass 1)."""
    _check_size(k, depth, cap)
    tree = TriadicTree(k, depth, sign_rule)
    # Lebesgue measure on [0, 1) plays the role of stage -1: it gives K_0 mass 1
    previous = uniform(UNIT, 1)
    # residual pieces are never touched by later generations
    fixed: List[Tuple[RationalInterval, Fraction]] = []
    Ks = [UNIT]
    for i in range(depth + 1):
        length = Fraction(1, 3 ** ((i + 1) * k))
        Js = [K.middle_child for K in Ks]
        if sign_rule is SignRule.ALL_PLUS or (sign_rule is SignRule.GREEDY and i == 0):
            signs = [1] * len(Js)
        elif sign_rule is SignRule.ALL_MINUS:
            signs = [-1] * len(Js)
        else:
            signs = _greedy_signs(ConstructionState(tree, previous, i), Js)
        residuals = [place_residual(J, length, s) for J, s in zip(Js, signs)]
        tree.generations.append(Generation(i, Ks, Js, residuals, signs))

        last = i == depth
        stage_pieces = list(fixed)
        for K, J, residual in zip(Ks, Js, residuals):
            mass = previous.measure_of(K)
            if last and closure is Closure.RESIDUAL:
                stage_pieces.append((residual, mass / residual.length))
                continue
            density = mass / (J.length + residual.length)
            stage_pieces.append((residual, density))
            stage_pieces.append((J, density))
            fixed.append((residual, density))
        previous = PiecewiseMeasure(stage_pieces)
        logger.info(f"k={k}: generation {i} built with {len(Js)} residuals")
        if not last:
            Ks = [RationalInterval(J.a + n * length, J.a + (n + 1) * length)
                  for J in Js for n in range(int(J.length / length))]
    return tree, previous


def build_tree(k: int, depth: int, sign_rule: SignRule = SignRule.GREEDY,
               cap: int = DEFAULT_RESIDUAL_CAP) -> TriadicTree:
    return build_w_k(k, depth, sign_rule, cap=cap)[0]


def residual_supports(tree: TriadicTree):
    return tree.residual_supports()
