"""Constructive lifting of spectral resolutions through a homomorphism with (LP).

Given a resolution F over a target algebra and a surjective homomorphism
``pi`` from a source algebra onto it, the engine builds values ``L(t)`` in the
source, one grid point at a time, such that ``pi(L(t)) == F(t)`` and every
cuboid with vertices in the lifted set has a nonnegative signed volume.

Each new value is obtained from the lifting-property oracle with bounds of the
form ``|v - C|_L <= g`` (v of odd order in C) and ``g <= |v + C|_L`` (v of even
order), for a handful of cuboids C determined by the configuration.  The
domain grows

* cube by cube over the integer points of a box, in an order where each new
  cube meets the earlier ones in an admissible facet pattern, then
* level by level, refining every cube at its midpoints.

The last stage subtracts floor slices axis by axis so that the result vanishes
at the bottom of the box, giving an almost-resolution ``K`` with
``pi(K) == F`` on the grid.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .algebra import MATRIX_EFFECT, Algebra, Payload
from .cuboids import Chain, Cuboid, Vertex, chain_eval
from .spectral import TabulatedResolution, check_spectral_resolution

IDENTITY = "identity"
RESTRICTION = "tribe-restriction"
EVALUATION = "tribe-evaluation"

Facet = Tuple[int, bool]  # (axis, is_upper)


class LiftError(ValueError):
    pass


class BoundInconsistency(LiftError):
    """The oracle was handed bounds with some lower above some upper."""


class InadmissibleConfiguration(LiftError):
    pass


class LiftBudgetExceeded(LiftError):
    pass


# -- homomorphisms ----------------------------------------------------------

@dataclass(frozen=True)
class SigmaHom:
    """A surjective homomorphism between concrete algebras.

    * identity on any algebra;
    * restriction of functions on {0..m-1} to the first ``keep`` points;
    * evaluation of functions on {0..m-1} at ``point``.
    """

    kind: str
    source: Algebra
    target: Algebra
    keep: int = 0
    point: int = 0

    @classmethod
    def identity(cls, algebra: Algebra) -> "SigmaHom":
        return cls(IDENTITY, algebra, algebra)

    @classmethod
    def restriction(cls, omega: int, omega_prime: int) -> "SigmaHom":
        if not 1 <= omega_prime <= omega:
            raise LiftError("restriction needs 1 <= omega_prime <= omega")
        return cls(RESTRICTION, Algebra.fuzzy_tribe(omega), Algebra.fuzzy_tribe(omega_prime),
                   keep=omega_prime)

    @classmethod
    def evaluation(cls, omega: int, point: int) -> "SigmaHom":
        if not 0 <= point < omega:
            raise LiftError("evaluation point outside the carrier")
        return cls(EVALUATION, Algebra.fuzzy_tribe(omega), Algebra.unit_interval(), point=point)

    def __call__(self, g: Payload) -> Payload:
        if self.kind == IDENTITY:
            return g
        if self.kind == RESTRICTION:
            return tuple(g[: self.keep])
        return g[self.point]

    def preimage(self, h: Payload, rng: Optional[random.Random] = None) -> Payload:
        """Some f with pi(f) == h: zero (or random) extension, or a constant."""
        if self.kind == IDENTITY:
            return h
        m = self.source.size
        if self.kind == RESTRICTION:
            rest = [Fraction(0)] * (m - self.keep)
            if rng is not None:
                rest = [Fraction(rng.randint(0, 16), 16) for _ in rest]
            return tuple(h) + tuple(rest)
        vals = [h] * m
        if rng is not None:
            vals = [Fraction(rng.randint(0, 16), 16) for _ in range(m)]
            vals[self.point] = h
        return tuple(vals)


def lp_oracle(pi: SigmaHom, lowers: Sequence[Payload], uppers: Sequence[Payload],
              target: Payload, rng: Optional[random.Random] = None) -> Payload:
    """Return g with pi(g) == target and every lower <= g <= every upper.

    The canonical choice is ``g = join(lowers) v (meet(uppers) ^ f1)`` with f1
    the zero-extension (or constant) preimage of the target; passing ``rng``
    draws a random preimage before clamping instead.
    """
    src, tgt = pi.source, pi.target
    for lo in lowers:
        for up in uppers:
            if not src.is_positive(src.sub(up, lo)):
                raise BoundInconsistency(f"lower bound {lo} not below upper bound {up}")
    for lo in lowers:
        if not tgt.is_positive(tgt.sub(target, pi(lo))):
            raise BoundInconsistency(f"target {target} below the image of lower bound {lo}")
    for up in uppers:
        if not tgt.is_positive(tgt.sub(pi(up), target)):
            raise BoundInconsistency(f"target {target} above the image of upper bound {up}")
    if pi.kind == IDENTITY and not src.is_lattice:
        return target
    u = src.zero()
    if lowers:
        u = lowers[0]
        for lo in lowers[1:]:
            u = src.join(u, lo)
    v = src.unit()
    if uppers:
        v = uppers[0]
        for up in uppers[1:]:
            v = src.meet(v, up)
    g = src.join(u, src.meet(v, pi.preimage(target, rng)))
    if pi(g) != target:
        raise LiftError("oracle produced a value with the wrong image")
    return g


# -- partial lifts ------------------------------------------------------------

class PartialLift:
    """Accumulates lifted values; a single engine run mutates one instance."""

    def __init__(self, F, pi: SigmaHom, rng: Optional[random.Random] = None):
        if F.algebra != pi.target:
            raise LiftError("resolution does not live on the homomorphism's target")
        self.F = F
        self.pi = pi
        self.rng = rng
        self.values: Dict[Vertex, Payload] = {}
        self.solves = 0

    @property
    def algebra(self) -> Algebra:
        return self.pi.source

    def __contains__(self, v) -> bool:
        return v in self.values

    def __getitem__(self, v) -> Payload:
        return self.values[v]

    def __len__(self):
        return len(self.values)

    def defined(self, C: Cuboid) -> Set[Vertex]:
        return {v for v in C.vertices() if v in self.values}

    def volume(self, C) -> Payload:
        return chain_eval(C, self.values, self.algebra)

    def set(self, v: Vertex, g: Payload) -> None:
        """Assign a value directly (no oracle).  Used to seed known values."""
        self.values[v] = g

    def solve(self, v: Vertex, cuboids: Iterable[Cuboid]) -> Payload:
        """Lift ``v`` subject to the volume conditions of ``cuboids``.

        Every other vertex of each cuboid must already be lifted.
        """
        if v in self.values:
            raise LiftError(f"vertex {v} is already lifted")
        alg = self.algebra
        lowers, uppers = [alg.zero()], [alg.unit()]
        for C in cuboids:
            if C.vertex_order(v) % 2:
                lowers.append(chain_eval(Chain.of(v) - C.signed_chain(), self.values, alg))
            else:
                uppers.append(chain_eval(Chain.of(v) + C.signed_chain(), self.values, alg))
        g = lp_oracle(self.pi, lowers, uppers, self.F(v), self.rng)
        self.values[v] = g
        self.solves += 1
        return g


def classify(L: PartialLift, C: Cuboid):
    """Describe the lifted part of C as a facet pattern.

    Returns ``("empty",)``, ``("full",)``, ``("lower", i)`` for exactly one
    lower facet, or ``("upper", i, J)`` for one upper facet plus the lower
    facets along J.  Anything else raises :class:`InadmissibleConfiguration`.
    """
    verts = list(C.vertices())
    defined = {v for v in verts if v in L}
    if not defined:
        return ("empty",)
    if len(defined) == len(verts):
        return ("full",)
    ups = [i for i in C.dims if all(v in defined for v in C.upper(i).vertices())]
    lows = [i for i in C.dims if all(v in defined for v in C.lower(i).vertices())]
    covered = set()
    for i in ups:
        covered.update(C.upper(i).vertices())
    for i in lows:
        covered.update(C.lower(i).vertices())
    if covered == defined:
        if not ups and len(lows) == 1:
            return ("lower", lows[0])
        if len(ups) == 1 and ups[0] not in lows:
            return ("upper", ups[0], tuple(lows))
    raise InadmissibleConfiguration(f"lifted part of {C} is not an admissible facet pattern")


def extend_on_cuboid(L: PartialLift, C: Cuboid) -> PartialLift:
    """Lift every vertex of C, starting from an empty, one-lower-facet, or
    one-upper-plus-lower-facets configuration."""
    state = classify(L, C)
    if state[0] == "full":
        raise InadmissibleConfiguration(f"{C} is already fully lifted")
    while True:
        if state[0] == "full":
            return L
        if state[0] == "empty":
            if C.dim == 0:
                L.solve(C.top, [])
                return L
            extend_on_cuboid(L, C.upper(C.dims[0]))
        elif state[0] == "lower":
            i = state[1]
            others = [j for j in C.dims if j != i]
            if not others:
                L.solve(C.top, [C])
                return L
            extend_on_cuboid(L, C.upper(others[0]))
        else:
            _, i, J = state
            rest = [k for k in C.dims if k != i and k not in J]
            if rest:
                extend_on_cuboid(L, C.lower(rest[0]))
            else:
                beta = list(C.hi)
                beta[i] = C.lo[i]
                L.solve(tuple(beta), [C, C.lower(i)])
                return L
        state = classify(L, C)


def _check_facets(facets: FrozenSet[Facet], dims: Sequence[int]) -> None:
    if any(k not in dims for k, _ in facets):
        raise InadmissibleConfiguration("facet along an inactive axis")
    if any((k, True) in facets and (k, False) in facets for k in dims):
        raise InadmissibleConfiguration("opposite facets in the collection")
    if sum(1 for _, up in facets if up) > 1:
        raise InadmissibleConfiguration("more than one upper facet")


def extend_on_section(L: PartialLift, C: Cuboid, i: int, c, facets: Iterable[Facet] = ()) -> PartialLift:
    """Lift the section of C at ``x_i = c``.

    L must be defined on the vertices of C and on the given facets of the
    section ``S`` (pairs ``(axis, is_upper)`` naming facets of S).
    """
    facets = frozenset(facets)
    C1, C2 = C.split(i, c)
    S = C1.upper(i)
    _check_facets(facets, S.dims)
    missing = [v for v in C.vertices() if v not in L]
    if missing:
        raise InadmissibleConfiguration(f"cuboid vertices {missing[:3]} are not lifted")
    for k, up in facets:
        face = S.facet(k, up)
        if any(v not in L for v in face.vertices()):
            raise InadmissibleConfiguration(f"facet {face} of the section is not lifted")

    for k in S.dims:
        if (k, True) not in facets and (k, False) not in facets:
            extend_on_section(L, C.lower(k), i, c, facets)
            facets = facets | {(k, False)}

    ups = [k for k, up in facets if up]
    if ups:
        k = ups[0]
        gamma = list(S.hi)
        gamma[k] = S.lo[k]
        target, cuboids = tuple(gamma), [C1, C1.lower(k), C2, C2.lower(k)]
    else:
        target, cuboids = S.top, [C1, C2]
    rest = [v for v in S.vertices() if v not in L]
    if rest != [target]:
        raise LiftError(f"section {S}: expected only {target} unlifted, found {rest}")
    L.solve(target, cuboids)
    return L


def refine_lift(L: PartialLift, C: Cuboid, J: Sequence[int], cuts, facets: Iterable[Facet] = ()) -> PartialLift:
    """Lift the refinement of C cut along the axes J at ``cuts[j]``.

    ``facets`` lists facets of C (``(axis, is_upper)``) whose refined points
    are already lifted; at most one upper facet and no opposite pair.
    """
    facets = frozenset(facets)
    _check_facets(facets, C.dims)
    J = list(J)
    if not J:
        return L
    j, rest = J[0], J[1:]
    common = frozenset(f for f in facets if f[0] != j)
    extend_on_section(L, C, j, cuts[j], common)
    if not rest:
        return L
    C1, C2 = C.split(j, cuts[j])
    if (j, True) in facets:
        refine_lift(L, C2, rest, cuts, common | {(j, True)})
        refine_lift(L, C1, rest, cuts, common | {(j, True)})
    else:
        refine_lift(L, C1, rest, cuts, common | (facets & {(j, False)}))
        refine_lift(L, C2, rest, cuts, common | {(j, False)})
    return L


# -- enumeration of unit cubes ------------------------------------------------

def _lex(ranges: Sequence[Tuple[int, int]]) -> List[Tuple[int, ...]]:
    return list(product(*[range(a, b) for a, b in ranges]))


def _upper_slab(ranges: List[Tuple[int, int]], free: Sequence[int]) -> List[Tuple[int, ...]]:
    """Order a slab grown across an upper facet: floors from the top down."""
    if not free:
        return _lex(ranges)
    l, rest = free[0], free[1:]
    a, b = ranges[l]
    out = []
    for idx, level in enumerate(range(b - 1, a - 1, -1)):
        sub = list(ranges)
        sub[l] = (level, level + 1)
        out.extend(_upper_slab(sub, rest) if idx == 0 else _lex(sub))
    return out


def enumerate_unit_cubes(lo: Sequence[int], hi: Sequence[int]) -> List[Tuple[int, ...]]:
    """List every unit cube of the integer box ``[lo, hi]`` (by lower corner).

    Starts from a cube near the middle and grows the covered box one slab at a
    time, alternating lower and upper moves along each axis.  Lower moves
    list the slab lexicographically; upper moves go floor by floor from the
    top.  Every prefix then meets the next cube in an admissible pattern.
    """
    lo, hi = [int(x) for x in lo], [int(x) for x in hi]
    n = len(lo)
    if n == 0 or any(a >= b for a, b in zip(lo, hi)):
        raise LiftError("empty box")
    start = [(a + b - 1) // 2 for a, b in zip(lo, hi)]
    cur = [(s, s + 1) for s in start]
    order = [tuple(start)]
    for axis in range(n):
        lower_turn = True
        while cur[axis][0] > lo[axis] or cur[axis][1] < hi[axis]:
            a, b = cur[axis]
            if (lower_turn and a > lo[axis]) or b == hi[axis]:
                slab = list(cur)
                slab[axis] = (a - 1, a)
                order.extend(_lex(slab))
                cur[axis] = (a - 1, b)
            else:
                slab = list(cur)
                slab[axis] = (b, b + 1)
                order.extend(_upper_slab(slab, [k for k in range(n) if k != axis]))
                cur[axis] = (a, b + 1)
            lower_turn = not lower_turn
    return order


def cube_pattern(cube: Tuple[int, ...], previous: Set[Tuple[int, ...]]) -> Optional[FrozenSet[Facet]]:
    """Facets of ``cube`` shared with earlier cubes, or None if the geometric
    intersection with the earlier cubes is not an admissible pattern."""
    n = len(cube)
    facets = set()
    for k in range(n):
        for step, up in ((1, True), (-1, False)):
            nb = list(cube)
            nb[k] += step
            if tuple(nb) in previous:
                facets.add((k, up))
    for off in product((-1, 0, 1), repeat=n):
        if not any(off):
            continue
        q = tuple(c + o for c, o in zip(cube, off))
        if q not in previous:
            continue
        fixed = [(k, o > 0) for k, o in enumerate(off) if o]
        if not any(f in facets for f in fixed):
            return None
    ups = [f for f in facets if f[1]]
    lows = [f for f in facets if not f[1]]
    if not facets:
        return frozenset()
    if not ups and len(lows) == 1:
        return frozenset(facets)
    if len(ups) == 1 and (ups[0][0], False) not in facets:
        return frozenset(facets)
    return None


def verify_enumeration(order: Sequence[Tuple[int, ...]]) -> List[FrozenSet[Facet]]:
    """Check that each cube meets the union of its predecessors in an
    admissible pattern; return the shared facets per cube."""
    if len(set(order)) != len(order):
        raise InadmissibleConfiguration("a cube is listed twice")
    seen: Set[Tuple[int, ...]] = set()
    patterns = []
    for m, cube in enumerate(order):
        pat = cube_pattern(cube, seen)
        if pat is None:
            raise InadmissibleConfiguration(f"cube #{m} {cube} meets its predecessors inadmissibly")
        patterns.append(pat)
        seen.add(cube)
    return patterns


# -- the pipeline ---------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Integer box ``[lo_i, hi_i]`` per axis sampled at spacing ``2**-level``."""

    lo: Tuple[int, ...]
    hi: Tuple[int, ...]
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(int(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(int(x) for x in self.hi))
        if len(self.lo) != len(self.hi) or any(a >= b for a, b in zip(self.lo, self.hi)):
            raise LiftError("grid box must have lo < hi on every axis")
        if self.level < 0:
            raise LiftError("grid level must be nonnegative")

    @classmethod
    def cube(cls, n: int, lo: int, hi: int, level: int = 0) -> "GridSpec":
        return cls((lo,) * n, (hi,) * n, level)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def step(self) -> Fraction:
        return Fraction(1, 2 ** self.level)

    def axis(self, i: int) -> Tuple[Fraction, ...]:
        s = 2 ** self.level
        return tuple(Fraction(k, s) for k in range(self.lo[i] * s, self.hi[i] * s + 1))

    def axes(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(self.axis(i) for i in range(self.n))

    def points(self):
        return product(*self.axes())

    @property
    def size(self) -> int:
        s = 2 ** self.level
        out = 1
        for a, b in zip(self.lo, self.hi):
            out *= (b - a) * s + 1
        return out


def _check_inside(F, grid: GridSpec) -> None:
    if F.n != grid.n:
        raise LiftError("grid dimension does not match the resolution")
    for i, coords in enumerate(F.breakpoints()):
        for c in coords:
            if not grid.lo[i] < c < grid.hi[i]:
                raise LiftError(f"atom coordinate {c} on axis {i} not strictly inside the box")


def partial_lift(F, pi: SigmaHom, grid: GridSpec, rng: Optional[random.Random] = None,
                 budget: int = 200_000, validate: bool = True) -> PartialLift:
    """Lift F on every point of the dyadic grid.

    Level 0 walks the unit cubes of the box in enumeration order and extends
    the lift over each; every further level refines each cube of the previous
    level at its midpoints, again in enumeration order.
    """
    _check_inside(F, grid)
    if grid.size > budget:
        raise LiftBudgetExceeded(f"grid has {grid.size} points, budget is {budget}")
    if validate:
        report = check_spectral_resolution(F, budget=0)
        if not report.passed:
            from .observable import InvalidResolution
            raise InvalidResolution(report)
    L = PartialLift(F, pi, rng)
    n = grid.n
    order = enumerate_unit_cubes(grid.lo, grid.hi)
    verify_enumeration(order)
    for idx in order:
        extend_on_cuboid(L, Cuboid(idx, tuple(x + 1 for x in idx)))
    for level in range(1, grid.level + 1):
        s = 2 ** (level - 1)
        h = Fraction(1, s)
        order = enumerate_unit_cubes([a * s for a in grid.lo], [b * s for b in grid.hi])
        patterns = verify_enumeration(order)
        for idx, facets in zip(order, patterns):
            C = Cuboid(tuple(x * h for x in idx), tuple((x + 1) * h for x in idx))
            cuts = {j: (C.lo[j] + C.hi[j]) / 2 for j in range(n)}
            refine_lift(L, C, list(range(n)), cuts, facets)
    if len(L) != grid.size:
        raise LiftError(f"lifted {len(L)} of {grid.size} grid points")
    return L


@dataclass
class AuditReport:
    passed: bool
    failures: List[Tuple[str, object]] = field(default_factory=list)
    cuboids_checked: int = 0
    exhaustive: bool = True


def _scalar_volume_failures(values, axes, alg: Algebra):
    """Signed volumes of every grid cuboid, degenerate ones included.

    Values are scaled to a common integer denominator; along each axis the
    table is replaced by ``T[b] - T[a]`` over all index pairs ``a <= b``, with
    ``a == b`` keeping ``T[a]`` itself (a degenerate side).
    """
    shape = tuple(len(g) for g in axes)
    pts = list(product(*axes))
    comps = [alg.as_tuple(values[p]) for p in pts]
    den = 1
    for comp in comps:
        for c in comp:
            den = lcm(den, c.denominator)
    X = np.array([[c.numerator * (den // c.denominator) for c in comp] for comp in comps],
                 dtype=object).reshape(shape + (len(comps[0]),))
    pairs = []
    for j, k in enumerate(shape):
        a, b = np.triu_indices(k)
        zero = np.zeros(X.shape[:j] + (1,) + X.shape[j + 1:], dtype=object)
        padded = np.concatenate([X, zero], axis=j)
        low = np.where(a == b, k, a)
        X = padded.take(b, axis=j) - padded.take(low, axis=j)
        pairs.append((a, b))
    bad = np.argwhere((X < 0).any(axis=-1))
    failures = []
    for idx in bad:
        lo = tuple(g[pairs[j][0][i]] for j, (g, i) in enumerate(zip(axes, idx)))
        hi = tuple(g[pairs[j][1][i]] for j, (g, i) in enumerate(zip(axes, idx)))
        failures.append(Cuboid(lo, hi))
    return failures, int(np.prod(X.shape[:-1]))


def _grid_cuboids(axes, exhaustive: bool):
    if exhaustive:
        per = [[(g[a], g[b]) for a in range(len(g)) for b in range(a, len(g))] for g in axes]
        for pick in product(*per):
            yield Cuboid(tuple(p[0] for p in pick), tuple(p[1] for p in pick))
    else:
        seen = set()
        for cell in product(*[range(len(g) - 1) for g in axes]):
            C = Cuboid(tuple(g[j] for g, j in zip(axes, cell)), tuple(g[j + 1] for g, j in zip(axes, cell)))
            for face in C.faces():
                if face not in seen:
                    seen.add(face)
                    yield face


def audit_lift(values, F, pi: SigmaHom, grid: GridSpec, budget: int = 100_000,
               floor_zero: bool = False) -> AuditReport:
    """Check a lifted grid table independently of how it was built.

    Verifies ``pi(value) == F`` pointwise, values between 0 and the unit,
    monotonicity along each axis, and a nonnegative volume for every grid
    cuboid (exhaustive below ``budget`` cuboids, otherwise every face of every
    minimal cell, which suffices by additivity).  With ``floor_zero`` the
    table must also vanish wherever a coordinate sits at the box floor.
    """
    alg = pi.source
    axes = grid.axes()
    failures = []
    for p in grid.points():
        if p not in values:
            failures.append(("missing", p))
            continue
        g = values[p]
        if pi(g) != F(p):
            failures.append(("projection", p))
        if not alg.is_effect(g):
            failures.append(("range", p))
        if floor_zero and any(x == a for x, a in zip(p, grid.lo)) and g != alg.zero():
            failures.append(("floor", p))
    if failures:
        return AuditReport(False, failures, 0)
    for p in grid.points():
        for k in range(grid.n):
            j = axes[k].index(p[k])
            if j + 1 < len(axes[k]):
                q = list(p)
                q[k] = axes[k][j + 1]
                if not alg.is_positive(alg.sub(values[tuple(q)], values[p])):
                    failures.append(("monotone", (p, tuple(q))))
    count = 1
    for g in axes:
        count *= len(g) * (len(g) + 1) // 2
    exhaustive = count <= budget
    if exhaustive and alg.kind != MATRIX_EFFECT:
        bad, checked = _scalar_volume_failures(values, axes, alg)
        failures.extend(("volume", C) for C in bad)
        return AuditReport(not failures, failures, checked, True)
    checked = 0
    for C in _grid_cuboids(axes, exhaustive):
        checked += 1
        if not alg.is_positive(chain_eval(C, values, alg)):
            failures.append(("volume", C))
    return AuditReport(not failures, failures, checked, exhaustive)


@dataclass
class LiftResult:
    grid: GridSpec
    K: Dict[Vertex, Payload]
    u0: Payload
    lift: PartialLift
    audit: Optional[AuditReport] = None

    @property
    def solves(self) -> int:
        return self.lift.solves

    def as_resolution(self) -> TabulatedResolution:
        return TabulatedResolution(self.lift.algebra, self.grid.axes(), self.K)


def floor_corrections(values: Dict[Vertex, Payload], grid: GridSpec, algebra: Algebra) -> Dict[Vertex, Payload]:
    """Subtract, axis after axis, the value on the box-floor slice of that axis."""
    K = dict(values)
    for i in range(grid.n):
        floor = Fraction(grid.lo[i])
        prev = K
        K = {}
        for p, g in prev.items():
            q = list(p)
            q[i] = floor
            K[p] = algebra.sub(g, prev[tuple(q)])
    return K


def lift_spectral(F, pi: SigmaHom, grid: GridSpec, rng: Optional[random.Random] = None,
                  audit: bool = True, budget: int = 200_000) -> LiftResult:
    """Lift F to a grid-sampled almost-resolution K with pi(K) == F."""
    L = partial_lift(F, pi, grid, rng=rng, budget=budget)
    K = floor_corrections(L.values, grid, pi.source)
    u0 = K[tuple(Fraction(b) for b in grid.hi)]
    result = LiftResult(grid, K, u0, L)
    if audit:
        result.audit = audit_lift(K, F, pi, grid, floor_zero=True)
    return result


def snap_to_grid(F, level: int):
    """Snap atom coordinates toward -inf onto the 2**-level lattice.

    Returns the snapped resolution and the list of moved atoms; atoms that
    collide are merged.
    """
    from .spectral import DiscreteSpectralResolution
    s = 2 ** level
    moved = []
    merged: Dict[Vertex, Payload] = {}
    for p, v in F.atoms:
        q = tuple(Fraction((c * s).__floor__(), s) for c in p)
        if q != p:
            moved.append((p, q))
        merged[q] = F.algebra.add(merged[q], v) if q in merged else v
    return DiscreteSpectralResolution(F.n, F.algebra, list(merged.items())), moved


__all__ = [
    "AuditReport", "BoundInconsistency", "GridSpec", "InadmissibleConfiguration",
    "LiftBudgetExceeded", "LiftError", "LiftResult", "PartialLift", "SigmaHom",
    "audit_lift", "classify", "cube_pattern", "enumerate_unit_cubes", "extend_on_cuboid",
    "extend_on_section", "floor_corrections", "lift_spectral", "lp_oracle", "partial_lift",
    "refine_lift", "snap_to_grid", "verify_enumeration",
]
