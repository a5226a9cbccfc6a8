"""Discrete n-dimensional observables, block sets, states and moments.

An observable is a finite family of atoms ``(point, value)`` read as the
measure ``x(A) = sum of values whose point lies in A``, evaluated on finite
disjoint unions of semi-closed extended blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import FUZZY_TRIBE, MATRIX_EFFECT, UNIT_INTERVAL, Algebra, AlgebraMismatch, Payload, to_fraction
from .cuboids import Vertex
from .spectral import (DiscreteSpectralResolution, ExtendedBlock, SpectralError,
                       ValidationReport, check_spectral_resolution, tabulate,
                       validation_grid, payload_from_cell)


class InvalidResolution(SpectralError):
    """Raised when a resolution fails validation; carries the report."""

    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.violations[0] if report.violations else None
        msg = "resolution fails validation"
        if first is not None:
            msg += f": {first.axiom} at {first.witness}"
        super().__init__(msg)


class Observable:
    """Atoms read as a measure.  Values must sum to the unit."""

    def __init__(self, n: int, algebra: Algebra, atoms, check_total: bool = True):
        base = DiscreteSpectralResolution(n, algebra, atoms)
        self.n = base.n
        self.algebra = algebra
        self.atoms: Tuple[Tuple[Vertex, Payload], ...] = base.atoms
        if check_total and base.total != algebra.unit():
            raise SpectralError("observable atom values must sum to the unit")

    def __eq__(self, other):
        return (isinstance(other, Observable) and self.n == other.n
                and self.algebra == other.algebra and self.atoms == other.atoms)

    def __repr__(self):
        return f"Observable(n={self.n}, {self.algebra.describe()}, {len(self.atoms)} atoms)"


class BlockSet:
    """Finite union of pairwise disjoint extended blocks."""

    def __init__(self, blocks: Iterable[ExtendedBlock]):
        self.blocks: Tuple[ExtendedBlock, ...] = tuple(blocks)
        dims = {b.n for b in self.blocks}
        if len(dims) > 1:
            raise SpectralError("blocks of different dimensions")
        for i, a in enumerate(self.blocks):
            for b in self.blocks[i + 1:]:
                if not a.disjoint(b):
                    raise SpectralError(f"blocks {a} and {b} overlap")

    @classmethod
    def whole(cls, n: int) -> "BlockSet":
        return cls([ExtendedBlock.whole(n)])

    @classmethod
    def of(cls, *blocks) -> "BlockSet":
        return cls(blocks)

    def contains(self, t) -> bool:
        return any(b.contains(t) for b in self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)


def _as_blockset(S) -> BlockSet:
    if isinstance(S, BlockSet):
        return S
    if isinstance(S, ExtendedBlock):
        return BlockSet([S])
    return BlockSet(S)


def measure(x, S) -> Payload:
    """x(S): sum of atom values with point in some block of S."""
    S = _as_blockset(S)
    if any(b.n != x.n for b in S):
        raise SpectralError("block dimension does not match the observable")
    return x.algebra.total(v for p, v in x.atoms if S.contains(p))


def observable_to_spectral(x: Observable) -> DiscreteSpectralResolution:
    """The distribution function t -> x((-inf, t_1) x ... x (-inf, t_n))."""
    return DiscreteSpectralResolution(x.n, x.algebra, x.atoms)


def materialize_atoms(F) -> Tuple[Tuple[Vertex, Payload], ...]:
    """Recover atoms of a step resolution as the nonzero minimal-cell volumes.

    Each cell of the validation grid is ``<g_j, g_{j+1})`` per axis and the
    mass it carries sits at its lower corner.
    """
    alg = F.algebra
    grid = validation_grid(F)
    d = tabulate(F, grid)
    for k in range(F.n):
        d = np.diff(d, axis=k)
    zero = alg.zero()
    atoms = []
    for idx in np.ndindex(*d.shape[:F.n]):
        val = payload_from_cell(alg, d[idx])
        if val != zero:
            atoms.append((tuple(g[j] for g, j in zip(grid, idx)), val))
    return tuple(atoms)


def spectral_to_observable(F, report: Optional[ValidationReport] = None, **check_opts) -> Observable:
    """The unique observable whose distribution function is F.

    Discrete resolutions hand over their atoms (zero-valued atoms dropped);
    any other step resolution is materialized from minimal-cell volumes.
    """
    if report is None:
        report = check_spectral_resolution(F, **check_opts)
    if not report.passed:
        raise InvalidResolution(report)
    if isinstance(F, DiscreteSpectralResolution):
        zero = F.algebra.zero()
        atoms = [(p, v) for p, v in F.atoms if v != zero]
    else:
        atoms = materialize_atoms(F)
    return Observable(F.n, F.algebra, atoms)


def cylinder(n: int, axis: int, block: ExtendedBlock) -> ExtendedBlock:
    """The preimage of a 1-d block under the projection onto ``axis``."""
    if block.n != 1:
        raise SpectralError("cylinder base must be one-dimensional")
    lo = [None] * n
    hi = [None] * n
    lo[axis], hi[axis] = block.lo[0], block.hi[0]
    return ExtendedBlock(tuple(lo), tuple(hi))


def marginal(x: Observable, axis: int, A) -> Payload:
    if not 0 <= axis < x.n:
        raise SpectralError(f"axis {axis} out of range")
    A = _as_blockset(A)
    return measure(x, BlockSet([cylinder(x.n, axis, b) for b in A]))


def marginal_observable(x: Observable, axis: int) -> Observable:
    """The i-th projection of x as a one-dimensional observable."""
    alg = x.algebra
    acc = {}
    for p, v in x.atoms:
        t = p[axis]
        acc[t] = alg.add(acc[t], v) if t in acc else v
    return Observable(1, alg, [((t,), v) for t, v in sorted(acc.items())])


@dataclass(frozen=True)
class State:
    """Probability weights over the tribe carrier; ``None`` for the unit interval."""

    weights: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.weights is not None:
            w = tuple(to_fraction(x) for x in self.weights)
            if any(x < 0 for x in w) or sum(w) != 1:
                raise ValueError("state weights must be nonnegative and sum to 1")
            object.__setattr__(self, "weights", w)

    @classmethod
    def trivial(cls) -> "State":
        return cls(None)

    def __call__(self, algebra: Algebra, value: Payload) -> Fraction:
        if algebra.kind == UNIT_INTERVAL:
            if self.weights is not None and self.weights != (Fraction(1),):
                raise AlgebraMismatch("the unit interval only carries the trivial state")
            return value
        if algebra.kind == FUZZY_TRIBE:
            if self.weights is None or len(self.weights) != algebra.size:
                raise AlgebraMismatch(f"need {algebra.size} state weights for {algebra.describe()}")
            return sum((w * v for w, v in zip(self.weights, value)), Fraction(0))
        raise AlgebraMismatch("states on matrix effect algebras are not supported")


def state_distribution(s: State, x: Observable, S) -> Fraction:
    """s_x(S) = s(x(S))."""
    if x.algebra.kind == MATRIX_EFFECT:
        raise AlgebraMismatch("states on matrix effect algebras are not supported")
    return s(x.algebra, measure(x, S))


def moment(s: State, x: Observable, k: int) -> Fraction:
    """k-th moment of a one-dimensional observable in the state s."""
    if x.n != 1:
        raise SpectralError("moment needs a one-dimensional observable")
    if k < 1:
        raise ValueError("moment order must be positive")
    return sum((p[0] ** k * s(x.algebra, v) for p, v in x.atoms), Fraction(0))


def mixed_moment_11(s: State, x: Observable) -> Fraction:
    """Integral of u*v against the joint distribution s_x of a 2-d observable."""
    if x.n != 2:
        raise SpectralError("mixed moment needs a two-dimensional observable")
    return sum((p[0] * p[1] * s(x.algebra, v) for p, v in x.atoms), Fraction(0))


def grid_blocks(grid: Sequence[Sequence[Fraction]], infinite: bool = True) -> List[ExtendedBlock]:
    """All blocks with bounds drawn from a per-axis grid, optionally with +-inf."""
    per_axis = []
    for g in grid:
        lows = ([None] if infinite else []) + list(g)
        highs = list(g) + ([None] if infinite else [])
        pairs = [(a, b) for a in lows for b in highs
                 if a is None or b is None or a < b]
        per_axis.append(pairs)
    return [ExtendedBlock(tuple(a for a, _ in c), tuple(b for _, b in c)) for c in product(*per_axis)]
