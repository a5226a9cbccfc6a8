"""Joint resolutions composed from lower-dimensional factors.

Given factors F_1, ..., F_k of dimensions n_1, ..., n_k over one algebra, the
composed map on R^(n_1 + ... + n_k) sends a point, split into per-factor
slices, to the meet, product or Lukasiewicz product of the factor values.
With one-dimensional factors the meet always yields a resolution and so does
the product on algebras with a product.  The Lukasiewicz mode and the
higher-dimensional group modes are validated, never assumed valid.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import Algebra, Payload, UnsupportedOperation
from .cuboids import Vertex
from .observable import Observable, marginal, measure, spectral_to_observable
from .sampling import random_factors
from .spectral import (VOLUME, DiscreteSpectralResolution, ExtendedBlock, SpectralError,
                       ValidationReport, check_spectral_resolution, validation_grid, volume)

MEET = "meet"
PRODUCT = "product"
ODOT = "odot"
MODES = (MEET, PRODUCT, ODOT)


class JointError(ValueError):
    pass


class ComposedResolution:
    """Pointwise composition of factor resolutions, evaluable anywhere."""

    def __init__(self, mode: str, factors: Sequence):
        if mode not in MODES:
            raise JointError(f"unknown composition mode {mode!r}")
        factors = list(factors)
        if not factors:
            raise JointError("need at least one factor")
        algebra = factors[0].algebra
        if any(f.algebra != algebra for f in factors):
            raise JointError("all factors must live on the same algebra")
        if mode in (MEET, ODOT) and not algebra.is_lattice:
            raise UnsupportedOperation(f"{mode} composition needs a lattice-ordered instance")
        if mode == PRODUCT and not algebra.has_product:
            raise UnsupportedOperation(f"{algebra.describe()} has no product")
        self.mode = mode
        self.factors = tuple(factors)
        self.algebra: Algebra = algebra
        self.dims = tuple(f.n for f in factors)
        self.n = sum(self.dims)
        self._combine = {MEET: algebra.meet, PRODUCT: algebra.product, ODOT: algebra.mv_odot}[mode]

    def _slices(self, t):
        t = tuple(t)
        if len(t) != self.n:
            raise SpectralError(f"expected a point with {self.n} coordinates")
        out, k = [], 0
        for d in self.dims:
            out.append(t[k:k + d])
            k += d
        return out

    def factor_values(self, t) -> List[Payload]:
        return [f(s) for f, s in zip(self.factors, self._slices(t))]

    def __call__(self, t) -> Payload:
        return reduce(self._combine, self.factor_values(t))

    def breakpoints(self):
        out = []
        for f in self.factors:
            out.extend(f.breakpoints())
        return out

    def evaluate_grid(self, grid) -> Dict[Vertex, Payload]:
        """Values on a product grid, evaluating each factor once per slice."""
        grid = [tuple(g) for g in grid]
        per_factor, k = [], 0
        for f, d in zip(self.factors, self.dims):
            sub = grid[k:k + d]
            per_factor.append({p: f(p) for p in product(*sub)})
            k += d
        out = {}
        for parts in product(*[list(m.items()) for m in per_factor]):
            point = tuple(c for p, _ in parts for c in p)
            out[point] = reduce(self._combine, [v for _, v in parts])
        return out

    def __repr__(self):
        return f"ComposedResolution({self.mode}, dims={self.dims}, {self.algebra.describe()})"


def _one_dimensional(factors):
    if any(f.n != 1 for f in factors):
        raise JointError("this construction takes one-dimensional factors")


def meet_joint(factors) -> ComposedResolution:
    """F(s) = F_1(s_1) ^ ... ^ F_n(s_n)."""
    _one_dimensional(factors)
    return ComposedResolution(MEET, factors)


def product_joint(factors) -> ComposedResolution:
    """F(s) = F_1(s_1) * ... * F_n(s_n) for algebras with a product."""
    _one_dimensional(factors)
    return ComposedResolution(PRODUCT, factors)


def odot_joint(factors, **check_opts) -> Tuple[ComposedResolution, ValidationReport]:
    """The Lukasiewicz composition, returned with its validation report."""
    _one_dimensional(factors)
    F = ComposedResolution(ODOT, factors)
    return F, check_spectral_resolution(F, **check_opts)


def group_joint(factors, mode: str = MEET, **check_opts) -> Tuple[ComposedResolution, ValidationReport]:
    """Compose factors of arbitrary dimensions by meet or odot; validate the result."""
    if mode not in (MEET, ODOT):
        raise JointError("group composition supports the meet and odot modes")
    F = ComposedResolution(mode, factors)
    return F, check_spectral_resolution(F, **check_opts)


# -- volume formulas ------------------------------------------------------------

def claim_volume(lows: Sequence[Payload], highs: Sequence[Payload], algebra: Algebra) -> Payload:
    """Signed sum over phi in {0,1}^n of the meets of x^i_phi(i).

    ``lows[i] = F_i(a_i)`` and ``highs[i] = F_i(b_i)``; phi has sign +1 when it
    picks an even number of lows.
    """
    if len(lows) != len(highs) or not lows:
        raise JointError("need matching, nonempty endpoint value lists")
    acc = algebra.zero()
    for phi in product((0, 1), repeat=len(lows)):
        m = reduce(algebra.meet, [highs[i] if b else lows[i] for i, b in enumerate(phi)])
        acc = algebra.sub(acc, m) if phi.count(0) % 2 else algebra.add(acc, m)
    return acc


def delta_volume(lows: Sequence[Payload], highs: Sequence[Payload], algebra: Algebra) -> Payload:
    """Two-term form of the meet volume on a linearly ordered instance.

    Factors are first sorted by their lower value; the one with the largest
    lower value plays the role of the last coordinate.
    """
    if not algebra.is_scalar:
        raise UnsupportedOperation("the two-term form needs a linearly ordered instance")
    if len(lows) != len(highs) or not lows:
        raise JointError("need matching, nonempty endpoint value lists")
    pairs = sorted(zip(lows, highs), key=lambda p: p[0])
    if len(pairs) == 1:
        return pairs[0][1] - pairs[0][0]
    an, bn = pairs[-1]
    rest = [b for _, b in pairs[:-1]]
    return min(min(rest), bn) - min(min(rest), an)


def endpoint_values(F: ComposedResolution, block: ExtendedBlock):
    lows = [f((a,)) for f, a in zip(F.factors, block.lo)]
    highs = [f((b,)) for f, b in zip(F.factors, block.hi)]
    return lows, highs


def product_volume(F: ComposedResolution, block: ExtendedBlock) -> Payload:
    """The product of one-dimensional increments F_i(b_i) - F_i(a_i)."""
    alg = F.algebra
    lows, highs = endpoint_values(F, block)
    return reduce(alg.product, [alg.sub(h, l) for l, h in zip(lows, highs)])


def finite_grid_blocks(grid) -> List[ExtendedBlock]:
    per_axis = [[(g[a], g[b]) for a in range(len(g)) for b in range(a + 1, len(g))] for g in grid]
    return [ExtendedBlock(tuple(c[0] for c in pick), tuple(c[1] for c in pick)) for pick in product(*per_axis)]


# -- marginals and the product bound -------------------------------------------

@dataclass
class MarginalReport:
    marginals_ok: bool
    bound_ok: bool
    marginal_checks: int = 0
    bound_checks: int = 0
    mismatches: List[tuple] = field(default_factory=list)
    strict: List[Tuple[Tuple[ExtendedBlock, ...], Payload, Payload]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.marginals_ok and self.bound_ok


def _line_blocks(grid_axis) -> List[ExtendedBlock]:
    cuts = [None] + list(grid_axis) + [None]
    out = []
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            a, b = cuts[i], cuts[j]
            if (i == 0 or a is not None) and (j == len(cuts) - 1 or b is not None):
                out.append(ExtendedBlock((a,), (b,)))
    return out


def marginal_and_bound_checks(x: Observable, factors, samples: int = 200, seed: int = 0) -> MarginalReport:
    """Check x(pi_i^-1(A)) == x_i(A) on factor-grid blocks and
    x(A_1 x ... x A_n) <= meet_i x_i(A_i) on sampled block products."""
    alg = x.algebra
    obs = [spectral_to_observable(f) for f in factors]
    per_axis = [_line_blocks(validation_grid(f)[0]) for f in factors]
    report = MarginalReport(True, True)
    for i, (xi, blocks) in enumerate(zip(obs, per_axis)):
        for A in blocks:
            report.marginal_checks += 1
            if marginal(x, i, A) != measure(xi, A):
                report.marginals_ok = False
                report.mismatches.append(("marginal", i, A))
    rng = random.Random(seed)
    combos = list(product(*[range(len(b)) for b in per_axis]))
    if len(combos) > samples:
        combos = rng.sample(combos, samples)
    for combo in combos:
        parts = [per_axis[i][j] for i, j in enumerate(combo)]
        block = ExtendedBlock(tuple(p.lo[0] for p in parts), tuple(p.hi[0] for p in parts))
        lhs = measure(x, block)
        rhs = alg.meet_all(measure(xi, p) for xi, p in zip(obs, parts))
        report.bound_checks += 1
        if not alg.leq(lhs, rhs):
            report.bound_ok = False
            report.mismatches.append(("bound", tuple(parts)))
        elif lhs != rhs:
            report.strict.append((tuple(parts), lhs, rhs))
    return report


def strict_bound_search(algebra: Optional[Algebra] = None, trials: int = 200, seed: int = 0):
    """Search meet joints of random 2-atom factors for a strict product bound.

    Returns ``(factors, blocks, lhs, rhs)`` for the first strict case, or None.
    """
    algebra = algebra or Algebra.unit_interval()
    rng = random.Random(seed)
    for _ in range(trials):
        factors = [_two_atom_factor(rng, algebra) for _ in range(2)]
        x = spectral_to_observable(meet_joint(factors), budget=0)
        rep = marginal_and_bound_checks(x, factors)
        if rep.strict:
            blocks, lhs, rhs = rep.strict[0]
            return factors, blocks, lhs, rhs
    return None


def _two_atom_factor(rng: random.Random, algebra: Algebra) -> DiscreteSpectralResolution:
    while True:
        f = random_factors(rng, 1, algebra, max_atoms=2)[0]
        if len(f.atoms) == 2:
            return f


# -- the group counterexample ----------------------------------------------------

H = Fraction(1, 10)
COUNTEREXAMPLE_X = [((0,), Fraction(1, 20)), ((1,), Fraction(3, 10)), ((2,), Fraction(13, 20))]
COUNTEREXAMPLE_Y = [((0, 0), Fraction(1, 10)), ((0, 1), Fraction(1, 10)),
                    ((1, 0), Fraction(1, 5)), ((2, 2), Fraction(3, 5))]
COUNTEREXAMPLE_BLOCK = ExtendedBlock((H, H, H), (1 + H, 1 + H, 1 + H))


@dataclass
class CounterexampleReport:
    block: ExtendedBlock
    positive: Fraction
    negative: Fraction
    volume: Fraction
    vertex_values: Dict[Vertex, Fraction]
    report: ValidationReport

    @property
    def violates(self) -> bool:
        return self.volume < 0


def counterexample_factors():
    u = Algebra.unit_interval()
    return [DiscreteSpectralResolution(1, u, COUNTEREXAMPLE_X),
            DiscreteSpectralResolution(2, u, COUNTEREXAMPLE_Y)]


def counterexample() -> CounterexampleReport:
    """Meet of a 1-d and a 2-d resolution that fails the volume condition."""
    F, report = group_joint(counterexample_factors(), MEET, budget=0, spot_checks=False)
    B = COUNTEREXAMPLE_BLOCK
    pos = neg = Fraction(0)
    values = {}
    for pick in product((0, 1), repeat=3):
        v = tuple(B.hi[i] if c else B.lo[i] for i, c in enumerate(pick))
        values[v] = F(v)
        if pick.count(0) % 2:
            neg += values[v]
        else:
            pos += values[v]
    vol = volume(F, B)
    if vol != pos - neg:
        raise AssertionError("signed vertex sums disagree with the volume")
    return CounterexampleReport(B, pos, neg, vol, values, report)


# -- the Lukasiewicz evidence harness ----------------------------------------------

@dataclass
class OdotWitness:
    trial: int
    factors: List[DiscreteSpectralResolution]
    block: ExtendedBlock
    value: Payload


@dataclass
class OdotSearchReport:
    n: int
    trials: int
    seed: int
    violations: List[OdotWitness] = field(default_factory=list)
    failed_trials: int = 0

    @property
    def summary(self) -> str:
        if not self.violations:
            return f"no violation in {self.trials} trials"
        return f"{self.failed_trials} of {self.trials} trials violate the volume condition"


def _odot_cell_volumes(factors):
    """Exact minimal-cell volumes of the Lukasiewicz joint in integer arithmetic.

    Factor values on the validation grid are scaled to a common denominator D,
    so ``a1 (.) ... (.) an`` becomes ``max(0, sum - (n-1) D)`` on integers.
    Returns the grid, the n-fold differenced table and D.
    """
    alg = factors[0].algebra
    n = len(factors)
    grids = [validation_grid(f)[0] for f in factors]
    cols = [[alg.as_tuple(f((t,))) for t in g] for f, g in zip(factors, grids)]
    den = 1
    for col in cols:
        for comp in col:
            for c in comp:
                den = lcm(den, c.denominator)
    dtype = np.int64 if den < 2 ** 40 else object
    total = 0
    for i, col in enumerate(cols):
        arr = np.array([[c.numerator * (den // c.denominator) for c in comp] for comp in col], dtype=dtype)
        shape = [1] * n + [arr.shape[1]]
        shape[i] = arr.shape[0]
        total = total + arr.reshape(shape)
    table = np.maximum(total - (n - 1) * den, 0)
    for k in range(n):
        table = np.diff(table, axis=k)
    return tuple(grids), table, den


def odot_search(n: int, trials: int, seed: int, algebra: Optional[Algebra] = None,
                max_atoms: int = 4, max_witnesses: int = 5) -> OdotSearchReport:
    """Seeded search for volume violations of the n-fold Lukasiewicz joint.

    Trial k draws its factors from ``random.Random(f"{seed}:{k}")`` so any trial
    can be reproduced on its own.  Only minimal grid cells are screened; a
    violation on any block forces one on some cell.
    """
    algebra = algebra or Algebra.unit_interval()
    if not algebra.is_lattice:
        raise UnsupportedOperation("the Lukasiewicz joint needs an MV instance")
    report = OdotSearchReport(n, trials, seed)
    for k in range(trials):
        rng = random.Random(f"{seed}:{k}")
        factors = random_factors(rng, n, algebra, max_atoms)
        grid, cells, den = _odot_cell_volumes(factors)
        neg = (cells < 0).any(axis=-1)
        if not neg.any():
            continue
        report.failed_trials += 1
        if len(report.violations) < max_witnesses:
            idx = tuple(int(j) for j in np.argwhere(neg)[0])
            lo = tuple(g[j] for g, j in zip(grid, idx))
            hi = tuple(g[j + 1] for g, j in zip(grid, idx))
            raw = cells[idx]
            value = Fraction(int(raw[0]), den) if algebra.is_scalar else tuple(Fraction(int(v), den) for v in raw)
            report.violations.append(OdotWitness(k, factors, ExtendedBlock(lo, hi), value))
    return report


def reaudit_witness(w: OdotWitness) -> bool:
    """Recompute a reported witness volume from scratch through the Delta calculus."""
    F = ComposedResolution(ODOT, w.factors)
    val = volume(F, w.block)
    if val != w.value or F.algebra.is_positive(val):
        return False
    report = check_spectral_resolution(F, budget=0, spot_checks=False)
    return any(v.block() == w.block for v in report.by_axiom(VOLUME))


__all__ = [
    "COUNTEREXAMPLE_BLOCK", "COUNTEREXAMPLE_X", "COUNTEREXAMPLE_Y", "ComposedResolution",
    "CounterexampleReport", "JointError", "MEET", "MODES", "MarginalReport", "ODOT",
    "OdotSearchReport", "OdotWitness", "PRODUCT", "claim_volume", "counterexample",
    "counterexample_factors", "delta_volume", "endpoint_values", "finite_grid_blocks",
    "group_joint", "marginal_and_bound_checks", "meet_joint", "odot_joint", "odot_search",
    "product_joint", "product_volume", "reaudit_witness", "strict_bound_search",
]
