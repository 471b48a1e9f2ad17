"""
Exact representation of compactly supported measures on the line with
piecewise-constant Lebesgue density and finitely many atoms.

All set-level quantities are ``fractions.Fraction``. A density that cannot be
represented exactly (an irrational power, see ``power_weight``) is stored as an
``mpmath.mpf`` and the measure is flagged ``exact=False``; every quantity derived
from such a measure is an ``mpf`` as well.

Intervals are half-open ``[a, b)``. An atom at ``x`` belongs to every interval
that has ``x`` as its left endpoint and to none that has it as its right endpoint.
"""
from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from collections import namedtuple
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Tuple

import mpmath

from .config import to_mpf, working_precision
from .errors import AtomAtPoint, AtomicPart, NonRationalPower

logger = logging.getLogger(__name__)


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` or decimal strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class RationalInterval(namedtuple('RationalInterval', 'a b')):
    """Half-open interval ``[a, b)`` with exact rational endpoints."""

    __slots__ = ()

    def __new__(cls, a, b):
        a = as_fraction(a)
        b = as_fraction(b)
        if not a < b:
            raise ValueError(f"Empty interval: [{a}, {b})")
        return super().__new__(cls, a, b)

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    @property
    def center(self) -> Fraction:
        return (self.a + self.b) / 2

    def contains(self, x) -> bool:
        return self.a <= x < self.b

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.a <= other.a and other.b <= self.b

    def intersection(self, other: "RationalInterval") -> Optional["RationalInterval"]:
        lo = max(self.a, other.a)
        hi = min(self.b, other.b)
        if lo < hi:
            return RationalInterval(lo, hi)
        return None

    def overlap(self, other: "RationalInterval") -> Fraction:
        lo = max(self.a, other.a)
        hi = min(self.b, other.b)
        return hi - lo if lo < hi else Fraction(0)

    def translate(self, t) -> "RationalInterval":
        return RationalInterval(self.a + t, self.b + t)

    def children(self, n: int = 3) -> List["RationalInterval"]:
        step = self.length / n
        return [RationalInterval(self.a + i * step, self.a + (i + 1) * step) for i in range(n)]

    @property
    def middle_child(self) -> "RationalInterval":
        """Triadic child containing the center."""
        return self.children(3)[1]

    def to_dict(self) -> dict:
        return {"a": fraction_str(self.a), "b": fraction_str(self.b)}

    @classmethod
    def from_dict(cls, data: dict) -> "RationalInterval":
        return cls(Fraction(data["a"]), Fraction(data["b"]))

    def __str__(self):
        return f"[{self.a}, {self.b})"


Piece = namedtuple('Piece', 'interval density')
Atom = namedtuple('Atom', 'position mass')


class PiecewiseMeasure(object):
    """Finitely many disjoint uniform pieces plus finitely many atoms."""

    __slots__ = ('_pieces', '_atoms', 'exact', '_starts', '_cum', '_atom_positions', '_breakpoints')

    def __init__(self, pieces: Iterable = (), atoms: Iterable = (), exact: Optional[bool] = None):
        cleaned = []
        for interval, density in pieces:
            if not isinstance(interval, RationalInterval):
                interval = RationalInterval(*interval)
            if not isinstance(density, mpmath.mpf):
                density = as_fraction(density)
            if density < 0:
                raise ValueError(f"Negative density {density} on {interval}")
            if density == 0:
                continue
            cleaned.append(Piece(interval, density))
        cleaned.sort(key=lambda piece: piece.interval.a)

        merged: List[Piece] = []
        for piece in cleaned:
            if merged:
                last = merged[-1]
                if piece.interval.a < last.interval.b:
                    raise ValueError(f"Overlapping pieces {last.interval} and {piece.interval}")
                if piece.interval.a == last.interval.b and piece.density == last.density:
                    merged[-1] = Piece(RationalInterval(last.interval.a, piece.interval.b), last.density)
                    continue
            merged.append(piece)

        atom_list = []
        for position, mass in atoms:
            position = as_fraction(position)
            if not isinstance(mass, mpmath.mpf):
                mass = as_fraction(mass)
            if mass <= 0:
                raise ValueError(f"Atom mass must be positive, got {mass} at {position}")
            atom_list.append(Atom(position, mass))
        atom_list.sort(key=lambda atom: atom.position)
        for left, right in zip(atom_list, atom_list[1:]):
            if left.position == right.position:
                raise ValueError(f"Two atoms at {left.position}")

        if exact is None:
            exact = all(isinstance(p.density, Fraction) for p in merged) and \
                all(isinstance(a.mass, Fraction) for a in atom_list)
        if not exact:
            with working_precision():
                merged = [Piece(p.interval, to_mpf(p.density)) for p in merged]
                atom_list = [Atom(a.position, to_mpf(a.mass)) for a in atom_list]
        self._pieces = tuple(merged)
        self._atoms = tuple(atom_list)
        self.exact = exact
        self._starts = [p.interval.a for p in self._pieces]
        self._atom_positions = [a.position for a in self._atoms]
        self._cum = None
        self._breakpoints = None

    # NOTE: basic access
    @property
    def pieces(self) -> Tuple[Piece, ...]:
        return self._pieces

    @property
    def atoms(self) -> Tuple[Atom, ...]:
        return self._atoms

    @property
    def is_atom_free(self) -> bool:
        return not self._atoms

    def _zero(self):
        return Fraction(0) if self.exact else mpmath.mpf(0)

    def _num(self, value):
        return value if self.exact else to_mpf(value)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        if self._breakpoints is None:
            points = set()
            for piece in self._pieces:
                points.add(piece.interval.a)
                points.add(piece.interval.b)
            self._breakpoints = tuple(sorted(points))
        return self._breakpoints

    def support(self) -> List[RationalInterval]:
        """Closed-up union of the pieces, adjacent pieces joined."""
        out: List[RationalInterval] = []
        for piece in self._pieces:
            if out and out[-1].b == piece.interval.a:
                out[-1] = RationalInterval(out[-1].a, piece.interval.b)
            else:
                out.append(piece.interval)
        return out

    def pieces_in(self, interval: RationalInterval) -> Iterator[Piece]:
        """Pieces meeting ``interval``."""
        start = max(bisect_right(self._starts, interval.a) - 1, 0)
        for piece in self._pieces[start:]:
            if piece.interval.a >= interval.b:
                break
            if piece.interval.b > interval.a:
                yield piece

    def piece_index(self, x) -> int:
        """Index of the piece containing ``x`` or -1."""
        i = bisect_right(self._starts, x) - 1
        if i >= 0 and x < self._pieces[i].interval.b:
            return i
        return -1

    # NOTE: mass queries
    def total_mass(self):
        total = self._zero()
        for piece in self._pieces:
            total += piece.density * self._num(piece.interval.length)
        for atom in self._atoms:
            total += atom.mass
        return total

    def cumulative(self, x):
        """Absolutely continuous mass of ``(-inf, x)``."""
        if self._cum is None:
            running = self._zero()
            cum = []
            for piece in self._pieces:
                cum.append(running)
                running += piece.density * self._num(piece.interval.length)
            cum.append(running)
            self._cum = cum
        i = bisect_right(self._starts, x) - 1
        if i < 0:
            return self._zero()
        piece = self._pieces[i]
        if x >= piece.interval.b:
            return self._cum[i + 1]
        return self._cum[i] + piece.density * self._num(x - piece.interval.a)

    def measure_of(self, interval: RationalInterval):
        value = self.cumulative(interval.b) - self.cumulative(interval.a)
        lo = bisect_left(self._atom_positions, interval.a)
        hi = bisect_left(self._atom_positions, interval.b)
        for atom in self._atoms[lo:hi]:
            value += atom.mass
        return value

    def atom_at(self, x) -> Optional[Atom]:
        i = bisect_left(self._atom_positions, x)
        if i < len(self._atoms) and self._atoms[i].position == x:
            return self._atoms[i]
        return None

    def density_at(self, x):
        x = as_fraction(x)
        if self.atom_at(x) is not None:
            raise AtomAtPoint(f"Point {x} carries an atom")
        i = self.piece_index(x)
        return self._pieces[i].density if i >= 0 else self._zero()

    def translate(self, t) -> "PiecewiseMeasure":
        t = as_fraction(t)
        if t == 0:
            return self
        return PiecewiseMeasure(
            ((p.interval.translate(t), p.density) for p in self._pieces),
            ((a.position + t, a.mass) for a in self._atoms),
            exact=self.exact,
        )

    def power_weight(self, exponent, allow_inexact: bool = False) -> "PiecewiseMeasure":
        """Density ``d**exponent`` on each piece of the support, zero elsewhere."""
        if self._atoms:
            raise AtomicPart("power_weight needs an atom-free measure")
        exponent = as_fraction(exponent)
        pieces = []
        inexact = not self.exact
        for piece in self._pieces:
            value = None
            if isinstance(piece.density, Fraction):
                value = rational_power(piece.density, exponent)
            if value is None:
                if not allow_inexact:
                    raise NonRationalPower(f"{piece.density}**{exponent} is not rational")
                with working_precision():
                    value = to_mpf(piece.density) ** to_mpf(exponent)
                inexact = True
            pieces.append((piece.interval, value))
        if inexact and self.exact:
            logger.debug(f"power_weight with exponent {exponent} fell back to high-precision densities")
        return PiecewiseMeasure(pieces, exact=not inexact)

    # NOTE: supplementary algebra
    def scale(self, c) -> "PiecewiseMeasure":
        if not isinstance(c, mpmath.mpf):
            c = as_fraction(c)
        if c <= 0:
            raise ValueError(f"Scale factor must be positive, got {c}")
        exact = self.exact and isinstance(c, Fraction)
        conv = (lambda v: v * c) if exact else (lambda v: to_mpf(v) * to_mpf(c))
        return PiecewiseMeasure(((p.interval, conv(p.density)) for p in self._pieces),
                                ((a.position, conv(a.mass)) for a in self._atoms), exact=exact)

    def restrict(self, interval: RationalInterval) -> "PiecewiseMeasure":
        pieces = []
        for piece in self.pieces_in(interval):
            part = piece.interval.intersection(interval)
            if part is not None:
                pieces.append((part, piece.density))
        atoms = [a for a in self._atoms if interval.contains(a.position)]
        return PiecewiseMeasure(pieces, atoms, exact=self.exact)

    def restrict_complement(self, interval: RationalInterval) -> "PiecewiseMeasure":
        pieces = []
        for piece in self._pieces:
            iv = piece.interval
            if iv.b <= interval.a or iv.a >= interval.b:
                pieces.append((iv, piece.density))
                continue
            if iv.a < interval.a:
                pieces.append((RationalInterval(iv.a, interval.a), piece.density))
            if iv.b > interval.b:
                pieces.append((RationalInterval(interval.b, iv.b), piece.density))
        atoms = [a for a in self._atoms if not interval.contains(a.position)]
        return PiecewiseMeasure(pieces, atoms, exact=self.exact)

    def reflect(self, c) -> "PiecewiseMeasure":
        """Image under ``x -> 2c - x``."""
        c = as_fraction(c)
        return PiecewiseMeasure(
            ((RationalInterval(2 * c - p.interval.b, 2 * c - p.interval.a), p.density) for p in self._pieces),
            ((2 * c - a.position, a.mass) for a in self._atoms),
            exact=self.exact,
        )

    def add(self, other: "PiecewiseMeasure") -> "PiecewiseMeasure":
        exact = self.exact and other.exact
        points = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        pieces = []
        for lo, hi in zip(points, points[1:]):
            mid = (lo + hi) / 2
            i = self.piece_index(mid)
            j = other.piece_index(mid)
            if i < 0 and j < 0:
                continue
            d1 = self._pieces[i].density if i >= 0 else 0
            d2 = other._pieces[j].density if j >= 0 else 0
            if not exact:
                d1, d2 = to_mpf(d1), to_mpf(d2)
            pieces.append((RationalInterval(lo, hi), d1 + d2))
        masses = {}
        for atom in self._atoms + other._atoms:
            masses[atom.position] = masses.get(atom.position, 0) + atom.mass
        return PiecewiseMeasure(pieces, masses.items(), exact=exact)

    def __add__(self, other):
        if not isinstance(other, PiecewiseMeasure):
            return NotImplemented
        return self.add(other)

    # NOTE: serialization, rationals as "num/den" strings
    def to_dict(self) -> dict:
        def enc(value):
            return fraction_str(value) if isinstance(value, Fraction) else mpmath.nstr(value, 40)
        data = {
            "pieces": [{"a": fraction_str(p.interval.a), "b": fraction_str(p.interval.b), "d": enc(p.density)}
                       for p in self._pieces],
            "atoms": [{"x": fraction_str(a.position), "m": enc(a.mass)} for a in self._atoms],
        }
        if not self.exact:
            data["exact"] = False
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseMeasure":
        exact = data.get("exact", True)

        def dec(text):
            if exact:
                return Fraction(text)
            with working_precision():
                return mpmath.mpf(text)
        pieces = [(RationalInterval(Fraction(p["a"]), Fraction(p["b"])), dec(p["d"])) for p in data.get("pieces", [])]
        atoms = [(Fraction(a["x"]), dec(a["m"])) for a in data.get("atoms", [])]
        return cls(pieces, atoms, exact=exact)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseMeasure):
            return NotImplemented
        return self._pieces == other._pieces and self._atoms == other._atoms

    def __hash__(self):
        return hash((self._pieces, self._atoms))

    def __len__(self):
        return len(self._pieces)

    def __repr__(self):
        return f"PiecewiseMeasure({len(self._pieces)} pieces, {len(self._atoms)} atoms, exact={self.exact})"


def uniform(interval: RationalInterval, density) -> PiecewiseMeasure:
    return PiecewiseMeasure([(interval, density)])


def integer_root(n: int, m: int) -> Optional[int]:
    """Exact ``m``-th root of a non-negative integer, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    lo, hi = 0, 1 << ((n.bit_length() + m - 1) // m + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** m < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** m == n else None


def rational_power(base: Fraction, exponent: Fraction) -> Optional[Fraction]:
    """``base ** exponent`` if it is rational, else None."""
    if base == 0:
        return Fraction(0) if exponent > 0 else None
    if exponent.denominator == 1:
        return base ** exponent.numerator
    raised = base ** exponent.numerator
    num = integer_root(raised.numerator, exponent.denominator)
    den = integer_root(raised.denominator, exponent.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)
