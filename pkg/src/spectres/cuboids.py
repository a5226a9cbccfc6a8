"""Cuboids, their facets, and the free abelian group of vertex chains.

A cuboid is stored by its lower and upper corner in the ambient space Q^n.
Axes with ``lo[i] == hi[i]`` are degenerate; the remaining axes form
``dims``.  As a point set a cuboid is just its 2**len(dims) vertices.

Axes are 0-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, Iterable, Iterator, Mapping, Tuple, Union

from .algebra import Algebra, Payload, to_fraction

Vertex = Tuple[Fraction, ...]


class CuboidError(ValueError):
    pass


def vertex(*coords) -> Vertex:
    if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
        coords = coords[0]
    return tuple(to_fraction(c) for c in coords)


@dataclass(frozen=True)
class Cuboid:
    lo: Vertex
    hi: Vertex

    def __post_init__(self):
        lo = tuple(to_fraction(c) for c in self.lo)
        hi = tuple(to_fraction(c) for c in self.hi)
        if len(lo) != len(hi):
            raise CuboidError("corner dimensions differ")
        if any(a > b for a, b in zip(lo, hi)):
            raise CuboidError(f"lower corner {lo} not below upper corner {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, p) -> "Cuboid":
        p = vertex(p)
        return cls(p, p)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.lo[i] < self.hi[i])

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def top(self) -> Vertex:
        return self.hi

    @property
    def bottom(self) -> Vertex:
        return self.lo

    def vertices(self) -> Iterator[Vertex]:
        choices = [(self.lo[i], self.hi[i]) if self.lo[i] < self.hi[i] else (self.lo[i],)
                   for i in range(self.n)]
        return product(*choices)

    def __contains__(self, v) -> bool:
        """Vertex membership (the cuboid as a finite point set)."""
        if len(v) != self.n:
            return False
        return all(x == a or x == b for x, a, b in zip(v, self.lo, self.hi))

    def is_inside(self, other: "Cuboid") -> bool:
        """Geometric containment of ``self`` in ``other``."""
        return all(oa <= a and b <= ob
                   for a, b, oa, ob in zip(self.lo, self.hi, other.lo, other.hi))

    def is_subcuboid(self, other: "Cuboid") -> bool:
        """All vertices of ``self`` are vertices of ``other``."""
        return all(v in other for v in self.vertices())

    def _with(self, i, lo=None, hi=None) -> "Cuboid":
        new_lo, new_hi = list(self.lo), list(self.hi)
        if lo is not None:
            new_lo[i] = lo
        if hi is not None:
            new_hi[i] = hi
        return Cuboid(tuple(new_lo), tuple(new_hi))

    def facet(self, i: int, upper: bool) -> "Cuboid":
        """Upper facet (coordinate i fixed to hi) or lower facet (fixed to lo)."""
        if i not in self.dims:
            raise CuboidError(f"axis {i} is not an active dimension of {self}")
        if upper:
            return self._with(i, lo=self.hi[i])
        return self._with(i, hi=self.lo[i])

    def upper(self, i: int) -> "Cuboid":
        return self.facet(i, True)

    def lower(self, i: int) -> "Cuboid":
        return self.facet(i, False)

    def facets(self) -> Iterator[Tuple[int, bool, "Cuboid"]]:
        for i in self.dims:
            yield i, True, self.upper(i)
            yield i, False, self.lower(i)

    def faces(self) -> Iterator["Cuboid"]:
        """Every face, from the vertices up to the cuboid itself."""
        choices = []
        for i in range(self.n):
            if self.lo[i] < self.hi[i]:
                choices.append([(self.lo[i], self.lo[i]), (self.hi[i], self.hi[i]),
                                (self.lo[i], self.hi[i])])
            else:
                choices.append([(self.lo[i], self.lo[i])])
        for pick in product(*choices):
            yield Cuboid(tuple(p[0] for p in pick), tuple(p[1] for p in pick))

    def vertex_order(self, v) -> int:
        """1 + the number of active axes at which ``v`` sits on the lower side."""
        v = tuple(v)
        if v not in self:
            raise CuboidError(f"{v} is not a vertex of {self}")
        return 1 + sum(1 for i in self.dims if v[i] == self.lo[i])

    def signed_chain(self) -> "Chain":
        """The cuboid as a vertex chain: sign +1 on odd-order vertices, -1 on even."""
        coeffs = {}
        for v in self.vertices():
            low = sum(1 for i in self.dims if v[i] == self.lo[i])
            coeffs[v] = -1 if low % 2 else 1
        return Chain(coeffs)

    def split(self, i: int, c) -> Tuple["Cuboid", "Cuboid"]:
        c = to_fraction(c)
        if i not in self.dims:
            raise CuboidError(f"axis {i} is not an active dimension of {self}")
        if not self.lo[i] < c < self.hi[i]:
            raise CuboidError(f"cut {c} not strictly inside ({self.lo[i]}, {self.hi[i]})")
        return self._with(i, hi=c), self._with(i, lo=c)

    def __str__(self):
        parts = []
        for a, b in zip(self.lo, self.hi):
            parts.append(f"{a}" if a == b else f"[{a},{b}]")
        return "x".join(parts)


class Chain:
    """Finite formal integer combination of vertices."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Union[Mapping[Vertex, int], Iterable[Tuple[Vertex, int]], None] = None):
        self._c: Dict[Vertex, int] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else (coeffs or ())
        for v, k in items:
            v = tuple(v)
            s = self._c.get(v, 0) + k
            if s:
                self._c[v] = s
            else:
                self._c.pop(v, None)

    @classmethod
    def of(cls, v, k: int = 1) -> "Chain":
        return cls({tuple(v): k})

    def items(self):
        return self._c.items()

    def support(self):
        return set(self._c)

    def __getitem__(self, v) -> int:
        return self._c.get(tuple(v), 0)

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(list(self._c.items()) + list(_as_chain(other)._c.items()))

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-_as_chain(other))

    def __neg__(self) -> "Chain":
        return Chain({v: -k for v, k in self._c.items()})

    def __eq__(self, other):
        if isinstance(other, Cuboid):
            other = other.signed_chain()
        return isinstance(other, Chain) and self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        body = " ".join(f"{'+' if k > 0 else '-'}{abs(k) if abs(k) != 1 else ''}"
                        f"({','.join(str(x) for x in v)})" for v, k in sorted(self._c.items()))
        return f"Chain({body or '0'})"


def _as_chain(x) -> Chain:
    if isinstance(x, Chain):
        return x
    if isinstance(x, Cuboid):
        return x.signed_chain()
    return Chain.of(x)


def chain_eval(chain, values: Union[Mapping[Vertex, Payload], Callable[[Vertex], Payload]],
               algebra: Algebra) -> Payload:
    """The signed sum of ``values`` over ``chain``, computed in the enveloping group.

    ``values`` is a mapping (a partial lift) or a callable; a vertex missing from
    a mapping raises ``KeyError``.
    """
    chain = _as_chain(chain)
    lookup = values.__getitem__ if isinstance(values, Mapping) else values
    acc = algebra.zero()
    for v, k in chain.items():
        try:
            val = lookup(v)
        except KeyError:
            raise KeyError(f"vertex {v} outside the domain of the mapping") from None
        if k == 1:
            acc = algebra.add(acc, val)
        elif k == -1:
            acc = algebra.sub(acc, val)
        else:
            acc = algebra.add(acc, algebra.scale(k, val))
    return acc
