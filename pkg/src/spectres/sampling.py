"""Seeded random instances for property tests and search harnesses.

Every generator takes a :class:`random.Random` so streams are reproducible.
Coordinates are dyadic (multiples of 1/4 in [-2, 2] by default) and masses
are rationals with small denominators.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Sequence

from .algebra import Algebra, Payload
from .spectral import DiscreteSpectralResolution


def random_masses(rng: random.Random, k: int, max_den: int = 64) -> List[Fraction]:
    """k positive rationals summing to 1, all with a common denominator <= max_den."""
    q = rng.randint(k, max(k, max_den))
    cuts = sorted(rng.sample(range(1, q), k - 1)) if k > 1 else []
    edges = [0] + cuts + [q]
    return [Fraction(b - a, q) for a, b in zip(edges, edges[1:])]


def random_values(rng: random.Random, algebra: Algebra, k: int, max_den: int = 64) -> List[Payload]:
    """k atom values summing to the unit, drawn coordinatewise for tribes."""
    if algebra.is_scalar:
        return random_masses(rng, k, max_den)
    if not algebra.payload_shape or len(algebra.payload_shape) != 1:
        raise ValueError(f"no sampler for {algebra.describe()}")
    cols = [random_masses(rng, k, max_den) for _ in range(algebra.size)]
    return [tuple(col[j] for col in cols) for j in range(k)]


def dyadic_points(rng: random.Random, n: int, k: int, lo: int = -2, hi: int = 2,
                  denom: int = 4) -> List[tuple]:
    """k distinct points of the lattice (1/denom)Z^n inside [lo, hi]^n."""
    span = range(lo * denom, hi * denom + 1)
    total = len(span) ** n
    if k > total:
        raise ValueError("not enough lattice points")
    seen = set()
    while len(seen) < k:
        seen.add(tuple(Fraction(rng.choice(span), denom) for _ in range(n)))
    return sorted(seen)


def random_resolution(rng: random.Random, n: int, algebra: Algebra, max_atoms: int = 4,
                      lo: int = -2, hi: int = 2, denom: int = 4,
                      max_den: int = 64) -> DiscreteSpectralResolution:
    k = rng.randint(1, max_atoms)
    pts = dyadic_points(rng, n, k, lo, hi, denom)
    return DiscreteSpectralResolution(n, algebra, list(zip(pts, random_values(rng, algebra, k, max_den))))


def random_factors(rng: random.Random, count: int, algebra: Algebra, max_atoms: int = 4,
                   **kw) -> List[DiscreteSpectralResolution]:
    return [random_resolution(rng, 1, algebra, max_atoms, **kw) for _ in range(count)]


def interior_resolution(rng: random.Random, n: int, algebra: Algebra, max_atoms: int = 4,
                        box: Sequence[int] = (-2, 2), level: int = 2) -> DiscreteSpectralResolution:
    """Atoms on the 2**-level grid strictly inside the box."""
    s = 2 ** level
    span = range(box[0] * s + 1, box[1] * s)
    k = rng.randint(1, min(max_atoms, len(span) ** n))
    seen = set()
    while len(seen) < k:
        seen.add(tuple(Fraction(rng.choice(span), s) for _ in range(n)))
    pts = sorted(seen)
    return DiscreteSpectralResolution(n, algebra, list(zip(pts, random_values(rng, algebra, k))))
