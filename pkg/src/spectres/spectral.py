"""Discrete n-dimensional spectral resolutions and their volume calculus.

A resolution is anything with ``n``, ``algebra``, ``__call__(point)`` and
``breakpoints()``; it must be a step function on the rectilinear grid spanned
by its breakpoints, constant on every product of half-open cells
``(c_j, c_{j+1}]``.  :class:`DiscreteSpectralResolution` (finitely many atoms)
and :class:`TabulatedResolution` (values sampled on a grid) are the two
concrete forms; the joint constructions supply a third.
"""
from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .algebra import MATRIX_EFFECT, Algebra, Payload, is_psd, to_fraction
from .cuboids import Vertex

MONOTONE = "monotone"
TOTAL = "total"
LEFT_CONTINUITY = "left-continuity"
VANISH = "vanish-at-minus-infinity"
VOLUME = "volume"
AXIOMS = (MONOTONE, TOTAL, LEFT_CONTINUITY, VANISH, VOLUME)


class SpectralError(ValueError):
    pass


def _point(p) -> Vertex:
    return tuple(to_fraction(c) for c in p)


def strictly_below(p: Sequence[Fraction], t: Sequence[Fraction]) -> bool:
    return all(a < b for a, b in zip(p, t))


@dataclass(frozen=True)
class ExtendedBlock:
    """A semi-closed block; ``None`` stands for -inf as a lower bound and
    +inf as an upper bound."""

    lo: Tuple[Optional[Fraction], ...]
    hi: Tuple[Optional[Fraction], ...]

    def __post_init__(self):
        lo = tuple(None if a is None else to_fraction(a) for a in self.lo)
        hi = tuple(None if b is None else to_fraction(b) for b in self.hi)
        if len(lo) != len(hi):
            raise SpectralError("block bounds have different lengths")
        for a, b in zip(lo, hi):
            if a is not None and b is not None and a > b:
                raise SpectralError(f"block lower bound {a} exceeds upper bound {b}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def whole(cls, n: int) -> "ExtendedBlock":
        return cls((None,) * n, (None,) * n)

    @classmethod
    def finite(cls, lo, hi) -> "ExtendedBlock":
        return cls(tuple(lo), tuple(hi))

    @property
    def n(self) -> int:
        return len(self.lo)

    def contains(self, t) -> bool:
        return all((a is None or a <= x) and (b is None or x < b)
                   for x, a, b in zip(t, self.lo, self.hi))

    def is_empty(self) -> bool:
        return any(a is not None and b is not None and a == b
                   for a, b in zip(self.lo, self.hi))

    def intersect(self, other: "ExtendedBlock") -> "ExtendedBlock":
        lo, hi = [], []
        for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi):
            a = a2 if a1 is None else a1 if a2 is None else max(a1, a2)
            b = b2 if b1 is None else b1 if b2 is None else min(b1, b2)
            if a is not None and b is not None and a > b:
                b = a
            lo.append(a)
            hi.append(b)
        return ExtendedBlock(tuple(lo), tuple(hi))

    def disjoint(self, other: "ExtendedBlock") -> bool:
        return self.is_empty() or other.is_empty() or self.intersect(other).is_empty()

    def __str__(self):
        parts = []
        for a, b in zip(self.lo, self.hi):
            left = "(-inf" if a is None else f"<{a}"
            right = "+inf)" if b is None else f"{b})"
            parts.append(f"{left},{right}")
        return "x".join(parts)


class DiscreteSpectralResolution:
    """The distribution function of finitely many atoms.

    ``F(t)`` is the sum of the values of atoms strictly below ``t`` in every
    coordinate.  Atom values are not range-checked here, so that invalid
    inputs can be built and then diagnosed by :func:`check_spectral_resolution`.
    """

    def __init__(self, n: int, algebra: Algebra, atoms):
        self.n = int(n)
        self.algebra = algebra
        pts = []
        for p, v in atoms:
            p = _point(p)
            if len(p) != self.n:
                raise SpectralError(f"atom point {p} is not {self.n}-dimensional")
            algebra.check(v)
            pts.append((p, v))
        if len({p for p, _ in pts}) != len(pts):
            raise SpectralError("atom points must be pairwise distinct")
        self.atoms: Tuple[Tuple[Vertex, Payload], ...] = tuple(sorted(pts, key=lambda a: a[0]))

    @property
    def total(self) -> Payload:
        return self.algebra.total(v for _, v in self.atoms)

    def __call__(self, t) -> Payload:
        alg = self.algebra
        acc = alg.zero()
        for p, v in self.atoms:
            if strictly_below(p, t):
                acc = alg.add(acc, v)
        return acc

    def breakpoints(self) -> List[Tuple[Fraction, ...]]:
        return [tuple(sorted({p[i] for p, _ in self.atoms})) for i in range(self.n)]

    def with_atoms(self, atoms) -> "DiscreteSpectralResolution":
        return DiscreteSpectralResolution(self.n, self.algebra, atoms)

    def __eq__(self, other):
        return (isinstance(other, DiscreteSpectralResolution) and self.n == other.n
                and self.algebra == other.algebra and self.atoms == other.atoms)

    def __repr__(self):
        return f"DiscreteSpectralResolution(n={self.n}, {self.algebra.describe()}, {len(self.atoms)} atoms)"


class TabulatedResolution:
    """A step map known on a rectilinear grid.

    ``F(t)`` takes the value at the grid point whose coordinates are, axis by
    axis, the smallest grid coordinates ``>= t`` (clamped to the last one),
    so the map is constant on products of cells ``(g_{j-1}, g_j]``.
    """

    def __init__(self, algebra: Algebra, grid: Sequence[Sequence], values: Mapping):
        self.algebra = algebra
        self.grid = tuple(tuple(sorted(to_fraction(c) for c in axis)) for axis in grid)
        self.n = len(self.grid)
        if any(len(set(g)) != len(g) or not g for g in self.grid):
            raise SpectralError("grid axes must be nonempty and strictly increasing")
        self.values: Dict[Vertex, Payload] = {}
        for p in product(*self.grid):
            if p not in values:
                raise SpectralError(f"missing table value at {p}")
            algebra.check(values[p])
            self.values[p] = values[p]

    def snap(self, t) -> Vertex:
        out = []
        for g, x in zip(self.grid, t):
            j = bisect_left(g, x)
            out.append(g[min(j, len(g) - 1)])
        return tuple(out)

    def __call__(self, t) -> Payload:
        return self.values[self.snap(t)]

    def breakpoints(self):
        return [g for g in self.grid]


# -- Delta calculus ----------------------------------------------------------

def _signed_sum(F, algebra: Algebra, base: Sequence, axes: Sequence[int], bounds) -> Payload:
    """Sum over vertices of (+/-) F, with -inf lowers collapsing to the upper."""
    acc = algebra.zero()
    finite_axes = [i for i in axes if bounds[i][0] is not None]
    inf_axes = [i for i in axes if bounds[i][0] is None]
    pt = list(base)
    for i in inf_axes:
        pt[i] = bounds[i][1]
    for pick in product((0, 1), repeat=len(finite_axes)):
        lows = 0
        for i, choice in zip(finite_axes, pick):
            if choice:
                pt[i] = bounds[i][1]
            else:
                pt[i] = bounds[i][0]
                lows += 1
        val = F(tuple(pt))
        acc = algebra.sub(acc, val) if lows % 2 else algebra.add(acc, val)
    return acc


def volume(F, block: ExtendedBlock) -> Payload:
    """Signed inclusion-exclusion volume of ``F`` over a block with finite uppers."""
    if block.n != F.n:
        raise SpectralError("block dimension does not match the resolution")
    if any(b is None for b in block.hi):
        raise SpectralError("volume needs finite upper bounds; use observable.measure instead")
    bounds = list(zip(block.lo, block.hi))
    return _signed_sum(F, F.algebra, [None] * F.n, range(F.n), bounds)


def derived_volume(F, axes: Sequence[int], fixed: Mapping[int, Fraction],
                   bounds: Mapping[int, Tuple[Optional[Fraction], Fraction]]) -> Payload:
    """Delta-operators applied along ``axes`` only, other coordinates held at ``fixed``."""
    axes = list(axes)
    if not axes:
        raise SpectralError("derived volume needs at least one axis")
    if len(set(axes)) != len(axes):
        raise SpectralError("axes must be mutually different")
    if any(not 0 <= i < F.n for i in axes):
        raise SpectralError("axis out of range")
    base: List[Optional[Fraction]] = [None] * F.n
    for i in range(F.n):
        if i in axes:
            if i not in bounds:
                raise SpectralError(f"missing bounds for axis {i}")
        else:
            if i not in fixed:
                raise SpectralError(f"missing fixed coordinate for axis {i}")
            base[i] = to_fraction(fixed[i])
    bnd = [None] * F.n
    for i in axes:
        a, b = bounds[i]
        a = None if a is None else to_fraction(a)
        b = to_fraction(b)
        if a is not None and a > b:
            raise SpectralError("lower bound exceeds upper bound")
        bnd[i] = (a, b)
    return _signed_sum(F, F.algebra, base, axes, bnd)


def delta_composition(F, order: Sequence[int], lo: Sequence, hi: Sequence) -> Payload:
    """Apply Delta_{order[0]} ... Delta_{order[-1]} to F literally, innermost last."""
    alg = F.algebra

    def rec(k, pt):
        if k == len(order):
            return F(tuple(pt))
        i = order[k]
        up, down = list(pt), list(pt)
        up[i], down[i] = hi[i], lo[i]
        return alg.sub(rec(k + 1, up), rec(k + 1, down))

    return rec(0, [to_fraction(x) for x in lo])


def check_permutation_invariance(F, block: ExtendedBlock, samples: int = 24, seed: int = 0) -> bool:
    """Delta-compositions along every axis order agree (all orders for n <= 4)."""
    if any(a is None for a in block.lo) or any(b is None for b in block.hi):
        raise SpectralError("permutation invariance is checked on finite blocks")
    n = F.n
    if n <= 4:
        orders = list(permutations(range(n)))
    else:
        rng = random.Random(seed)
        orders = [tuple(range(n))]
        for _ in range(samples):
            o = list(range(n))
            rng.shuffle(o)
            orders.append(tuple(o))
    ref = delta_composition(F, orders[0], block.lo, block.hi)
    return all(delta_composition(F, o, block.lo, block.hi) == ref for o in orders[1:])


# -- validation --------------------------------------------------------------

@dataclass
class Violation:
    axiom: str
    witness: dict
    value: Payload

    def block(self) -> Optional[ExtendedBlock]:
        if "lo" in self.witness:
            return ExtendedBlock(tuple(self.witness["lo"]), tuple(self.witness["hi"]))
        return None


@dataclass
class ValidationReport:
    passed: bool
    violations: List[Violation] = field(default_factory=list)
    grid: Tuple[Tuple[Fraction, ...], ...] = ()
    blocks_checked: int = 0

    def by_axiom(self, axiom: str) -> List[Violation]:
        return [v for v in self.violations if v.axiom == axiom]

    def __bool__(self):
        return self.passed


def validation_grid(F) -> Tuple[Tuple[Fraction, ...], ...]:
    """Breakpoints per axis plus one coordinate below and one above them."""
    grid = []
    for axis in F.breakpoints():
        axis = sorted(set(axis)) or [Fraction(0)]
        grid.append(tuple([axis[0] - 1] + axis + [axis[-1] + 1]))
    return tuple(grid)


def tabulate(F, grid) -> np.ndarray:
    """Evaluate F on a grid into an object array with trailing payload axes."""
    alg = F.algebra
    shape = tuple(len(g) for g in grid)
    table = np.empty(shape + alg.payload_shape, dtype=object)
    fast = getattr(F, "evaluate_grid", None)
    values = fast(grid) if fast is not None else None
    for idx in np.ndindex(*shape):
        t = tuple(g[j] for g, j in zip(grid, idx))
        table[idx] = values[t] if values is not None else F(t)
    return table


def payload_from_cell(alg: Algebra, cell) -> Payload:
    if alg.kind == MATRIX_EFFECT:
        return tuple(tuple(r) for r in cell)
    if alg.payload_shape:
        return tuple(cell)
    return cell


def _cone_mask(alg: Algebra, arr: np.ndarray, spatial: int) -> np.ndarray:
    """Boolean array over the spatial axes: entry lies in the positive cone."""
    if alg.kind == MATRIX_EFFECT:
        shape = arr.shape[:spatial]
        mask = np.empty(shape, dtype=bool)
        for idx in np.ndindex(*shape):
            mask[idx] = is_psd(arr[idx])
        return mask
    ge = np.asarray(arr >= 0, dtype=bool)
    if alg.payload_shape:
        ge = ge.all(axis=-1)
    return ge


def check_spectral_resolution(F, budget: int = 2000, cascade: Optional[bool] = None,
                              spot_checks: bool = True, max_witnesses: int = 16) -> ValidationReport:
    """Validate the resolution axioms of F on its validation grid.

    Checks, in order: vanishing on the sub-minimal slices, the total at the
    super-maximal corner, monotonicity between grid neighbours, left-continuity
    by probing midpoints below each grid point, nonnegative volume of every
    minimal grid cell, and nonnegative volume of further grid sub-blocks up to
    ``budget`` blocks.  With ``cascade`` (default: matrix instances only) the
    partial Delta-compositions along every axis subset are also required to
    lie between 0 and the unit.
    """
    alg = F.algebra
    n = F.n
    if cascade is None:
        cascade = alg.kind == MATRIX_EFFECT
    grid = validation_grid(F)
    table = tabulate(F, grid)
    shape = table.shape[:n]
    unit = alg.unit()
    violations: List[Violation] = []
    counts: Dict[str, int] = {}

    def record(axiom, witness, value):
        counts[axiom] = counts.get(axiom, 0) + 1
        if counts[axiom] <= max_witnesses:
            violations.append(Violation(axiom, witness, value))

    def pt(idx) -> Vertex:
        return tuple(g[j] for g, j in zip(grid, idx))

    # (3.4): F vanishes on the sub-minimal slice of each axis.
    zero = alg.zero()
    for k in range(n):
        for idx in np.ndindex(*shape):
            if idx[k] == 0:
                val = payload_from_cell(alg, table[idx])
                if val != zero:
                    record(VANISH, {"point": pt(idx), "axis": k}, val)

    # (3.2): the value beyond every breakpoint is the unit.
    last = tuple(s - 1 for s in shape)
    top = payload_from_cell(alg, table[last])
    if top != unit:
        record(TOTAL, {"point": pt(last)}, top)
    if isinstance(F, DiscreteSpectralResolution) and F.total != top:
        record(TOTAL, {"point": pt(last), "atoms": True}, F.total)

    # (3.1): monotone between neighbours along each axis.
    for k in range(n):
        diff = np.diff(table, axis=k)
        ok = _cone_mask(alg, diff, n)
        for idx in zip(*np.nonzero(~ok)):
            nxt = list(idx)
            nxt[k] += 1
            record(MONOTONE, {"from": pt(idx), "to": pt(nxt)}, payload_from_cell(alg, diff[idx]))

    # (3.3): left-continuity, probed at midpoints below each grid point.
    if spot_checks:
        for idx in np.ndindex(*shape):
            probe = []
            for g, j in zip(grid, idx):
                probe.append(g[0] - Fraction(1, 2) if j == 0 else (g[j - 1] + g[j]) / 2)
            probe = tuple(probe)
            val, here = F(probe), payload_from_cell(alg, table[idx])
            if val != here:
                record(LEFT_CONTINUITY, {"point": pt(idx), "probe": probe}, alg.sub(here, val))

    # (3.5) on minimal cells, and the derived cascade when requested.
    subsets = [tuple(range(n))]
    if cascade:
        subsets = [s for r in range(1, n + 1) for s in combinations(range(n), r)]
    checked = 0
    for axes in subsets:
        d = table
        for k in axes:
            d = np.diff(d, axis=k)
        ok = _cone_mask(alg, d, n)
        if cascade:
            ok &= _cone_mask(alg, _unit_minus(alg, d, n), n)
        checked += int(np.prod(d.shape[:n]))
        for idx in zip(*np.nonzero(~ok)):
            lo = list(pt(idx))
            hi = list(lo)
            for k in axes:
                hi[k] = grid[k][idx[k] + 1]
            w = {"lo": tuple(lo), "hi": tuple(hi)}
            if len(axes) < n:
                w["axes"] = axes
            record(VOLUME, w, payload_from_cell(alg, d[idx]))

    # Larger grid sub-blocks, up to the budget.  Cells are already done.
    if budget > 0:
        pairs = [[(a, b) for a in range(len(g)) for b in range(a + 1, len(g))] for g in grid]
        seen = 0
        for choice in product(*pairs):
            if all(b == a + 1 for a, b in choice):
                continue
            if seen >= budget:
                break
            seen += 1
            acc = alg.zero()
            for pick in product((0, 1), repeat=n):
                idx = tuple(c[p] for c, p in zip(choice, pick))
                val = payload_from_cell(alg, table[idx])
                acc = alg.add(acc, val) if (n - sum(pick)) % 2 == 0 else alg.sub(acc, val)
            if not alg.is_positive(acc):
                record(VOLUME, {"lo": pt([a for a, _ in choice]), "hi": pt([b for _, b in choice])}, acc)
        checked += seen

    return ValidationReport(passed=not counts, violations=violations, grid=grid,
                            blocks_checked=checked)


def _unit_minus(alg: Algebra, arr: np.ndarray, spatial: int) -> np.ndarray:
    if not alg.payload_shape:
        return Fraction(1) - arr
    unit = np.empty(alg.payload_shape, dtype=object)
    u = alg.unit()
    if alg.kind == MATRIX_EFFECT:
        for i in range(alg.size):
            for j in range(alg.size):
                unit[i, j] = u[i][j]
    else:
        unit[:] = list(u)
    return unit - arr


def atom_mass(F: DiscreteSpectralResolution, block: ExtendedBlock) -> Payload:
    """Brute-force measure of a block: sum of atom values it contains."""
    return F.algebra.total(v for p, v in F.atoms if block.contains(p))


def is_finite_block(block: ExtendedBlock) -> bool:
    return all(a is not None for a in block.lo) and all(b is not None for b in block.hi)


__all__ = [
    "AXIOMS", "DiscreteSpectralResolution", "ExtendedBlock", "SpectralError",
    "TabulatedResolution", "ValidationReport", "Violation", "atom_mass",
    "check_permutation_invariance", "check_spectral_resolution", "delta_composition",
    "derived_volume", "is_finite_block", "tabulate", "validation_grid", "volume",
]
