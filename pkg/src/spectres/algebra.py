"""Concrete effect algebras and MV-algebras with exact rational arithmetic.

Three instances are provided, all living inside an ordered abelian group
(the enveloping group) so that differences are always representable:

* ``unit-interval-mv``: the interval [0, 1] of rationals, payload ``Fraction``;
* ``fuzzy-tribe``: functions on a finite carrier {0, ..., m-1} with values in
  [0, 1], payload ``tuple[Fraction, ...]`` of length m;
* ``symmetric-matrix-effect``: symmetric d x d rational matrices between 0
  and the identity in the Loewner order, payload ``tuple[tuple[Fraction]]``.

Payloads are plain immutable Python values.  The :class:`Algebra` object
carries the operations; it never mutates anything.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Any, Iterable, NamedTuple, Optional, Sequence, Union

Scalar = Fraction
Payload = Union[Fraction, tuple]

UNIT_INTERVAL = "unit-interval-mv"
FUZZY_TRIBE = "fuzzy-tribe"
MATRIX_EFFECT = "symmetric-matrix-effect"
KINDS = (UNIT_INTERVAL, FUZZY_TRIBE, MATRIX_EFFECT)


class AlgebraError(ValueError):
    """Base class for algebra errors."""


class AlgebraMismatch(AlgebraError):
    """A value does not belong to the algebra it is used with."""


class UnsupportedOperation(AlgebraError):
    """The operation is not available on this kind of algebra."""


def to_fraction(x: Any) -> Fraction:
    """Convert an int, Fraction or string such as ``"3/4"`` to a Fraction.

    Floats are rejected: every value entering the library must be exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {x!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                row_r, row_c = a[r], a[col]
                for c in range(col, n):
                    row_r[c] -= f * row_c[c]
    return det


def is_psd(m: Sequence[Sequence[Fraction]]) -> bool:
    """Decide positive semidefiniteness of a symmetric rational matrix.

    Uses the exact criterion that every principal minor is nonnegative.
    Exponential in the dimension, which is fine for d <= 4.
    """
    d = len(m)
    for k in range(1, d + 1):
        for idx in combinations(range(d), k):
            sub = [[m[i][j] for j in idx] for i in idx]
            if determinant(sub) < 0:
                return False
    return True


class Compatibility(NamedTuple):
    """Result of :meth:`Algebra.compatibility_witness`."""

    defined: bool
    a1: Optional[Payload]
    b1: Optional[Payload]
    c: Optional[Payload]
    status: str


@dataclass(frozen=True)
class Algebra:
    """One concrete algebra instance.

    ``size`` is the carrier size for ``fuzzy-tribe`` and the matrix
    dimension for ``symmetric-matrix-effect``; it is 1 for the unit interval.
    """

    kind: str = UNIT_INTERVAL
    size: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AlgebraError(f"unknown algebra kind {self.kind!r}")
        if self.size < 1:
            raise AlgebraError("algebra size must be positive")
        if self.kind == UNIT_INTERVAL and self.size != 1:
            raise AlgebraError("the unit interval has size 1")

    # -- constructors -------------------------------------------------
    @classmethod
    def unit_interval(cls) -> "Algebra":
        return cls(UNIT_INTERVAL, 1)

    @classmethod
    def fuzzy_tribe(cls, m: int) -> "Algebra":
        return cls(FUZZY_TRIBE, m)

    @classmethod
    def matrix_effect(cls, d: int) -> "Algebra":
        return cls(MATRIX_EFFECT, d)

    # -- capabilities -------------------------------------------------
    @property
    def is_lattice(self) -> bool:
        """Lattice and MV operations exist (the matrix effects form an antilattice)."""
        return self.kind != MATRIX_EFFECT

    @property
    def has_product(self) -> bool:
        return self.kind != MATRIX_EFFECT

    @property
    def is_scalar(self) -> bool:
        return self.kind == UNIT_INTERVAL

    @property
    def payload_shape(self) -> tuple:
        if self.kind == UNIT_INTERVAL:
            return ()
        if self.kind == FUZZY_TRIBE:
            return (self.size,)
        return (self.size, self.size)

    def describe(self) -> str:
        if self.kind == UNIT_INTERVAL:
            return UNIT_INTERVAL
        return f"{self.kind}({self.size})"

    # -- elements ---------------------------------------------------------
    def zero(self) -> Payload:
        return self.constant(0)

    def unit(self) -> Payload:
        if self.kind == MATRIX_EFFECT:
            d = self.size
            return tuple(
                tuple(Fraction(1) if i == j else Fraction(0) for j in range(d))
                for i in range(d)
            )
        return self.constant(1)

    def constant(self, k) -> Payload:
        """``k`` times the unit (for matrices: ``k`` times the identity)."""
        k = to_fraction(k)
        if self.kind == UNIT_INTERVAL:
            return k
        if self.kind == FUZZY_TRIBE:
            return (k,) * self.size
        d = self.size
        z = Fraction(0)
        return tuple(tuple(k if i == j else z for j in range(d)) for i in range(d))

    def coerce(self, obj: Any) -> Payload:
        """Build a group element of this instance from loose Python data.

        Scalars take a rational; tribes a sequence of m rationals; matrices
        either nested rows or a flat row-major sequence of d*d rationals.
        Range membership is *not* checked (see :meth:`is_effect`).
        """
        if self.kind == UNIT_INTERVAL:
            if isinstance(obj, (list, tuple)):
                if len(obj) != 1:
                    raise AlgebraMismatch("scalar value expected")
                obj = obj[0]
            return to_fraction(obj)
        if self.kind == FUZZY_TRIBE:
            if not isinstance(obj, (list, tuple)) or len(obj) != self.size:
                raise AlgebraMismatch(f"expected {self.size} carrier values")
            return tuple(to_fraction(v) for v in obj)
        d = self.size
        if not isinstance(obj, (list, tuple)):
            raise AlgebraMismatch("matrix value expected")
        if len(obj) == d and all(isinstance(r, (list, tuple)) for r in obj):
            rows = [[to_fraction(v) for v in r] for r in obj]
        elif len(obj) == d * d:
            flat = [to_fraction(v) for v in obj]
            rows = [flat[i * d:(i + 1) * d] for i in range(d)]
        else:
            raise AlgebraMismatch(f"expected a {d}x{d} matrix")
        if any(len(r) != d for r in rows):
            raise AlgebraMismatch(f"expected a {d}x{d} matrix")
        for i in range(d):
            for j in range(i + 1, d):
                if rows[i][j] != rows[j][i]:
                    raise AlgebraMismatch("matrix effect values must be symmetric")
        return tuple(tuple(r) for r in rows)

    def check(self, a: Payload) -> None:
        """Raise :class:`AlgebraMismatch` unless ``a`` has this instance's shape."""
        if self.kind == UNIT_INTERVAL:
            ok = isinstance(a, (Fraction, int)) and not isinstance(a, bool)
        elif self.kind == FUZZY_TRIBE:
            ok = isinstance(a, tuple) and len(a) == self.size and all(
                not isinstance(v, tuple) for v in a)
        else:
            ok = (isinstance(a, tuple) and len(a) == self.size
                  and all(isinstance(r, tuple) and len(r) == self.size for r in a))
        if not ok:
            raise AlgebraMismatch(f"value {a!r} does not belong to {self.describe()}")

    # -- enveloping group -------------------------------------------------
    def add(self, a: Payload, b: Payload) -> Payload:
        if self.kind == UNIT_INTERVAL:
            return a + b
        if self.kind == FUZZY_TRIBE:
            return tuple(x + y for x, y in zip(a, b))
        return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def sub(self, a: Payload, b: Payload) -> Payload:
        if self.kind == UNIT_INTERVAL:
            return a - b
        if self.kind == FUZZY_TRIBE:
            return tuple(x - y for x, y in zip(a, b))
        return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def scale(self, k, a: Payload) -> Payload:
        if self.kind == UNIT_INTERVAL:
            return k * a
        if self.kind == FUZZY_TRIBE:
            return tuple(k * x for x in a)
        return tuple(tuple(k * x for x in r) for r in a)

    def total(self, values: Iterable[Payload]) -> Payload:
        return reduce(self.add, values, self.zero())

    def is_zero(self, a: Payload) -> bool:
        return a == self.zero()

    def is_positive(self, a: Payload) -> bool:
        """Membership in the positive cone of the enveloping group."""
        if self.kind == UNIT_INTERVAL:
            return a >= 0
        if self.kind == FUZZY_TRIBE:
            return all(x >= 0 for x in a)
        return is_psd(a)

    # -- order and partial addition -----------------------------------
    def leq(self, a: Payload, b: Payload) -> bool:
        """``a <= b`` iff ``b - a`` lies in the positive cone."""
        self.check(a)
        self.check(b)
        return self.is_positive(self.sub(b, a))

    def is_effect(self, a: Payload) -> bool:
        """``0 <= a <= unit``."""
        return self.is_positive(a) and self.is_positive(self.sub(self.unit(), a))

    def partial_add(self, a: Payload, b: Payload) -> Optional[Payload]:
        """``a + b`` when it stays below the unit, else ``None`` (undefined)."""
        self.check(a)
        self.check(b)
        s = self.add(a, b)
        return s if self.is_positive(self.sub(self.unit(), s)) else None

    # -- lattice / MV operations -----------------------------------------
    def _require_lattice(self, name):
        if not self.is_lattice:
            raise UnsupportedOperation(
                f"{name} is not available on {self.describe()}: not a lattice")

    def _pointwise(self, f, *args):
        if self.kind == UNIT_INTERVAL:
            return f(*args)
        return tuple(f(*xs) for xs in zip(*args))

    def meet(self, a: Payload, b: Payload) -> Payload:
        self._require_lattice("meet")
        return self._pointwise(min, a, b)

    def join(self, a: Payload, b: Payload) -> Payload:
        self._require_lattice("join")
        return self._pointwise(max, a, b)

    def meet_all(self, values: Iterable[Payload]) -> Payload:
        return reduce(self.meet, values, self.unit())

    def join_all(self, values: Iterable[Payload]) -> Payload:
        return reduce(self.join, values, self.zero())

    def mv_oplus(self, a: Payload, b: Payload) -> Payload:
        self._require_lattice("oplus")
        return self._pointwise(lambda x, y: min(x + y, Fraction(1)), a, b)

    def mv_odot(self, a: Payload, b: Payload) -> Payload:
        self._require_lattice("odot")
        return self._pointwise(lambda x, y: max(x + y - 1, Fraction(0)), a, b)

    def mv_neg(self, a: Payload) -> Payload:
        self._require_lattice("negation")
        return self._pointwise(lambda x: 1 - x, a)

    def product(self, a: Payload, b: Payload) -> Payload:
        """Pointwise product (the product MV-algebra structure)."""
        if not self.has_product:
            raise UnsupportedOperation(f"{self.describe()} has no product")
        return self._pointwise(lambda x, y: x * y, a, b)

    def compatibility_witness(self, a: Payload, b: Payload) -> Compatibility:
        """Decompose ``a = a1 + c`` and ``b = b1 + c`` with ``a1 + b1 + c`` defined.

        In an MV instance ``c = a meet b`` always works.  Matrix effects get
        an undefined result, since no meet is available there.
        """
        if not self.is_lattice:
            return Compatibility(False, None, None, None,
                                 f"{self.describe()} is not a lattice; no canonical witness")
        self.check(a)
        self.check(b)
        c = self.meet(a, b)
        a1, b1 = self.sub(a, c), self.sub(b, c)
        s = self.partial_add(a1, b1)
        if s is None or self.partial_add(s, c) is None:
            return Compatibility(False, a1, b1, c, "a1 + b1 + c is not defined")
        return Compatibility(True, a1, b1, c, "compatible")

    # -- numeric views ----------------------------------------------------
    def as_tuple(self, a: Payload) -> tuple:
        """Flatten a payload to a tuple of Fractions (row-major for matrices)."""
        if self.kind == UNIT_INTERVAL:
            return (a,)
        if self.kind == FUZZY_TRIBE:
            return tuple(a)
        return tuple(x for r in a for x in r)
