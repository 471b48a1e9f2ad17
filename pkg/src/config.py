"""
Run configuration and working precision.
"""
from __future__ import annotations

import os
import random
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Optional, Tuple

import mpmath

from .constant import (PRECISION_ENV_VAR, DEFAULT_PRECISION_BITS, DEFAULT_RESIDUAL_CAP, DEFAULT_TOL, DEFAULT_QUAD_TOL,
                       DEFAULT_ZERO_TOL, DEFAULT_SAMPLES_PER_INTERVAL, DEFAULT_MAX_RESIDUALS, DEFAULT_PIECE_CAP,
                       DEFAULT_EVAL_PIECE_CAP, DEFAULT_RANDOM_Q, DEFAULT_Q_PER_LEVEL, DEFAULT_SEED,
                       DEFAULT_SCALE_RANGE, SignRule)
from .errors import UsageError

logger = logging.getLogger(__name__)


def precision_bits() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None or raw == "":
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}")
    if bits < 53:
        raise UsageError(f"{PRECISION_ENV_VAR} must be at least 53, got {bits}")
    return bits


@contextmanager
def working_precision(bits: Optional[int] = None):
    """Run a block with mpmath at the configured significand width."""
    with mpmath.workprec(precision_bits() if bits is None else bits):
        yield


def to_mpf(q) -> mpmath.mpf:
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: Tuple[int, ...] = (4,)
    p: Tuple[Fraction, ...] = (Fraction(2),)
    epsilon: Fraction = Fraction(3, 4)
    depth: int = 2
    r: Tuple[int, ...] = (1,)
    T: int = 2
    R: Optional[int] = None
    K_max: int = 4
    sign_rule: SignRule = SignRule.GREEDY
    tol: float = DEFAULT_TOL
    quad_tol: float = DEFAULT_QUAD_TOL
    zero_tol: float = DEFAULT_ZERO_TOL
    samples_per_interval: int = DEFAULT_SAMPLES_PER_INTERVAL
    max_residuals: int = DEFAULT_MAX_RESIDUALS
    piece_cap: int = DEFAULT_PIECE_CAP
    eval_piece_cap: int = DEFAULT_EVAL_PIECE_CAP
    random_q: int = DEFAULT_RANDOM_Q
    q_per_level: int = DEFAULT_Q_PER_LEVEL
    scale_range: Tuple[int, int] = DEFAULT_SCALE_RANGE
    residual_cap: int = DEFAULT_RESIDUAL_CAP
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    json_out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def rng(self, salt: str = "") -> random.Random:
        # str seeds hash deterministically across runs
        return random.Random(f"{self.seed}:{salt}")

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            out[key] = _plain(value)
        return out


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if hasattr(value, "value") and not isinstance(value, (int, float, str)):
        return value.value
    return value
