"""Affine incidence constraints and their validation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from tropicount.combinatorics import Degree
from tropicount.linalg import LatticeBasis, lattice_index, rank, saturate, to_fraction


class InvalidConstraints(ValueError):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


def parse_rational(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return to_fraction(x)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class AffineConstraint:
    """``base + span(directions)`` with an integral direction basis."""

    n: int
    base: tuple[Fraction, ...]
    directions: LatticeBasis

    @classmethod
    def make(cls, base: Sequence, directions: Sequence[Sequence[int]] = (), saturated: bool = True):
        """Build a constraint; with ``saturated=False`` the directions are kept verbatim."""
        b = tuple(parse_rational(x) for x in base)
        n = len(b)
        dirs = [tuple(int(x) for x in v) for v in directions]
        basis = saturate(dirs, n) if saturated else LatticeBasis(n, tuple(dirs))
        return cls(n, b, basis)

    @classmethod
    def point(cls, p: Sequence):
        return cls.make(p, ())

    @property
    def dim(self) -> int:
        return self.directions.rank

    @property
    def codim(self) -> int:
        return self.n - 1 - self.dim

    def translate(self, w: Sequence) -> "AffineConstraint":
        return AffineConstraint(self.n, tuple(b + parse_rational(x) for b, x in zip(self.base, w)), self.directions)

    def contains(self, x: Sequence) -> bool:
        diff = [parse_rational(a) - b for a, b in zip(x, self.base)]
        if not self.directions.vectors:
            return not any(diff)
        return rank(list(self.directions.vectors) + [diff]) == self.dim

    @classmethod
    def from_json(cls, data: dict) -> "AffineConstraint":
        return cls.make(data["base"], data.get("directions", []), saturated=False)

    def to_json(self) -> dict:
        return {
            "base": [format_rational(x) for x in self.base],
            "directions": [list(v) for v in self.directions.vectors],
        }


def validate_constraints(d: Degree, constraints: Sequence[AffineConstraint]) -> None:
    """Raise :class:`InvalidConstraints` on rank, saturation or codimension problems."""
    for i, a in enumerate(constraints):
        if a.n != d.n or len(a.base) != d.n:
            raise InvalidConstraints("RankMismatch", f"constraint {i} lives in rank {a.n}, degree in {d.n}")
        if a.dim and rank([list(v) for v in a.directions.vectors]) != a.dim:
            raise InvalidConstraints("RankMismatch", f"constraint {i} has dependent directions")
        if a.dim and lattice_index(a.directions, saturate(a.directions.vectors, a.n)) != 1:
            raise InvalidConstraints("UnsaturatedBasis", f"constraint {i} directions are not saturated")
        if a.codim < 1:
            raise InvalidConstraints("CodimensionSum", f"constraint {i} has codimension {a.codim} < 1")
    total = sum(a.codim for a in constraints)
    if total != d.e + d.n - 3:
        raise InvalidConstraints(
            "CodimensionSum", f"sum of codimensions {total} != e+n-3 = {d.e + d.n - 3}"
        )


def random_generic_translation(
    constraints: Sequence[AffineConstraint], seed: int, box: int, denominator: int = 1
) -> list[AffineConstraint]:
    """Translate each base point by a seeded random vector in ``(1/denominator) * [-box, box]^n``."""
    rng = random.Random(seed)
    out = []
    for a in constraints:
        w = [Fraction(rng.randint(-box, box), denominator) for _ in range(a.n)]
        out.append(a.translate(w))
    return out
