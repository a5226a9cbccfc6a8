"""JSON (de)serialization with exact rationals.

Rationals travel as strings in canonical ``"p/q"`` form (``"0"``, ``"1"``,
``"-1/20"``); JSON integers are accepted on input, floats never.  Parsers
raise :class:`SchemaError` carrying a dotted location such as
``atoms[2].point[0]``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .algebra import FUZZY_TRIBE, MATRIX_EFFECT, UNIT_INTERVAL, Algebra, AlgebraError, Payload
from .lifting import EVALUATION, IDENTITY, RESTRICTION, GridSpec, LiftError, SigmaHom
from .observable import BlockSet, Observable, State
from .spectral import DiscreteSpectralResolution, ExtendedBlock, SpectralError, TabulatedResolution


class SchemaError(ValueError):
    def __init__(self, where: str, msg: str):
        self.where = where
        super().__init__(f"{where or '<root>'}: {msg}")


def _at(where: str, key) -> str:
    if isinstance(key, int):
        return f"{where}[{key}]"
    return f"{where}.{key}" if where else str(key)


def _get(obj, key, where, kind=None, default=...):
    if not isinstance(obj, dict):
        raise SchemaError(where, "expected an object")
    if key not in obj:
        if default is not ...:
            return default
        raise SchemaError(_at(where, key), "missing field")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(_at(where, key), f"expected {getattr(kind, '__name__', kind)}")
    return val


# -- rationals and values --------------------------------------------------------

def parse_rational(x, where: str = "") -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise SchemaError(where, f"expected a rational string such as \"3/4\", got {x!r}")
    try:
        return Fraction(x.strip() if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError):
        raise SchemaError(where, f"not a rational: {x!r}") from None


def render_rational(q) -> str:
    return str(Fraction(q))


def _rationals_deep(obj, where):
    if isinstance(obj, list):
        return [_rationals_deep(v, _at(where, i)) for i, v in enumerate(obj)]
    return parse_rational(obj, where)


def parse_value(obj, algebra: Algebra, where: str = "") -> Payload:
    try:
        return algebra.coerce(_rationals_deep(obj, where))
    except AlgebraError as exc:
        raise SchemaError(where, str(exc)) from None


def render_value(v: Payload, algebra: Algebra):
    if algebra.kind == UNIT_INTERVAL:
        return render_rational(v)
    if algebra.kind == FUZZY_TRIBE:
        return [render_rational(c) for c in v]
    return [[render_rational(c) for c in row] for row in v]


def render_point(p) -> List[str]:
    return [render_rational(c) for c in p]


def parse_point(obj, n: Optional[int], where: str):
    if not isinstance(obj, list):
        raise SchemaError(where, "expected an array of rationals")
    if n is not None and len(obj) != n:
        raise SchemaError(where, f"expected {n} coordinates")
    return tuple(parse_rational(c, _at(where, i)) for i, c in enumerate(obj))


# -- algebras ---------------------------------------------------------------------

def parse_algebra(obj, where: str = "algebra") -> Algebra:
    kind = _get(obj, "kind", where, str)
    if kind == UNIT_INTERVAL:
        return Algebra.unit_interval()
    if kind == FUZZY_TRIBE:
        size = _get(obj, "size", where, int, default=None)
        size = _get(obj, "omega", where, int) if size is None else size
        if size < 1:
            raise SchemaError(_at(where, "size"), "carrier size must be positive")
        return Algebra.fuzzy_tribe(size)
    if kind == MATRIX_EFFECT:
        d = _get(obj, "dim", where, int, default=None)
        d = _get(obj, "size", where, int) if d is None else d
        if d < 1:
            raise SchemaError(_at(where, "dim"), "matrix dimension must be positive")
        return Algebra.matrix_effect(d)
    raise SchemaError(_at(where, "kind"), f"unknown algebra kind {kind!r}")


def render_algebra(alg: Algebra) -> Dict[str, Any]:
    if alg.kind == UNIT_INTERVAL:
        return {"kind": UNIT_INTERVAL}
    if alg.kind == FUZZY_TRIBE:
        return {"kind": FUZZY_TRIBE, "size": alg.size}
    return {"kind": MATRIX_EFFECT, "dim": alg.size}


# -- resolutions and observables ----------------------------------------------------

def parse_resolution(obj, where: str = ""):
    """Atom form ``{"n", "algebra", "atoms"}`` or table form ``{"n", "algebra", "grid", "values"}``."""
    alg = parse_algebra(_get(obj, "algebra", where), _at(where, "algebra"))
    n = _get(obj, "n", where, int)
    if n < 1:
        raise SchemaError(_at(where, "n"), "dimension must be positive")
    try:
        if "atoms" in obj:
            atoms = []
            for i, a in enumerate(_get(obj, "atoms", where, list)):
                w = _at(_at(where, "atoms"), i)
                p = parse_point(_get(a, "point", w), n, _at(w, "point"))
                atoms.append((p, parse_value(_get(a, "value", w), alg, _at(w, "value"))))
            return DiscreteSpectralResolution(n, alg, atoms)
        grid_w = _at(where, "grid")
        grid = _get(obj, "grid", where, list)
        if len(grid) != n:
            raise SchemaError(grid_w, f"expected {n} axes")
        axes = [parse_point(g, None, _at(grid_w, i)) for i, g in enumerate(grid)]
        values = {}
        for i, e in enumerate(_get(obj, "values", where, list)):
            w = _at(_at(where, "values"), i)
            p = parse_point(_get(e, "point", w), n, _at(w, "point"))
            values[p] = parse_value(_get(e, "value", w), alg, _at(w, "value"))
        return TabulatedResolution(alg, axes, values)
    except SpectralError as exc:
        raise SchemaError(where, str(exc)) from None


def render_resolution(F) -> Dict[str, Any]:
    alg = F.algebra
    out = {"n": F.n, "algebra": render_algebra(alg)}
    if isinstance(F, TabulatedResolution):
        out["grid"] = [render_point(g) for g in F.grid]
        out["values"] = [{"point": render_point(p), "value": render_value(v, alg)}
                         for p, v in sorted(F.values.items())]
    else:
        out["atoms"] = [{"point": render_point(p), "value": render_value(v, alg)} for p, v in F.atoms]
    return out


def render_observable(x: Observable) -> Dict[str, Any]:
    return {"n": x.n, "algebra": render_algebra(x.algebra),
            "atoms": [{"point": render_point(p), "value": render_value(v, x.algebra)} for p, v in x.atoms]}


# -- blocks ---------------------------------------------------------------------------

def _parse_bound(x, where, infinite):
    if isinstance(x, str) and x.strip() == infinite:
        return None
    return parse_rational(x, where)


def parse_block(obj, n: Optional[int] = None, where: str = "") -> ExtendedBlock:
    lo = _get(obj, "lo", where, list)
    hi = _get(obj, "hi", where, list)
    if len(lo) != len(hi) or (n is not None and len(lo) != n):
        raise SchemaError(where, f"block corners must have {n or len(lo)} coordinates")
    los = tuple(_parse_bound(c, _at(_at(where, "lo"), i), "-inf") for i, c in enumerate(lo))
    his = tuple(_parse_bound(c, _at(_at(where, "hi"), i), "+inf") for i, c in enumerate(hi))
    try:
        return ExtendedBlock(los, his)
    except SpectralError as exc:
        raise SchemaError(where, str(exc)) from None


def parse_blockset(obj, n: Optional[int] = None, where: str = "") -> BlockSet:
    if isinstance(obj, dict) and "blocks" not in obj:
        blocks = [parse_block(obj, n, where)]
    else:
        raw = _get(obj, "blocks", where, list)
        blocks = [parse_block(b, n, _at(_at(where, "blocks"), i)) for i, b in enumerate(raw)]
    try:
        return BlockSet(blocks)
    except SpectralError as exc:
        raise SchemaError(where, str(exc)) from None


def render_block(b: ExtendedBlock) -> Dict[str, Any]:
    return {"lo": ["-inf" if a is None else render_rational(a) for a in b.lo],
            "hi": ["+inf" if a is None else render_rational(a) for a in b.hi]}


# -- homs, states, grids -----------------------------------------------------------------

def parse_hom(obj, where: str = "hom", default_algebra: Optional[Algebra] = None) -> SigmaHom:
    kind = _get(obj, "kind", where, str)
    try:
        if kind == IDENTITY:
            if "algebra" in obj:
                return SigmaHom.identity(parse_algebra(obj["algebra"], _at(where, "algebra")))
            if default_algebra is None:
                raise SchemaError(_at(where, "algebra"), "identity needs an algebra")
            return SigmaHom.identity(default_algebra)
        if kind == RESTRICTION:
            return SigmaHom.restriction(_get(obj, "omega", where, int), _get(obj, "omega_prime", where, int))
        if kind == EVALUATION:
            return SigmaHom.evaluation(_get(obj, "omega", where, int), _get(obj, "point", where, int))
    except LiftError as exc:
        raise SchemaError(where, str(exc)) from None
    raise SchemaError(_at(where, "kind"), f"unknown homomorphism kind {kind!r}")


def render_hom(pi: SigmaHom) -> Dict[str, Any]:
    if pi.kind == IDENTITY:
        return {"kind": IDENTITY, "algebra": render_algebra(pi.source)}
    if pi.kind == RESTRICTION:
        return {"kind": RESTRICTION, "omega": pi.source.size, "omega_prime": pi.keep}
    return {"kind": EVALUATION, "omega": pi.source.size, "point": pi.point}


def parse_state(obj, where: str = "state") -> State:
    if obj is None:
        return State.trivial()
    weights = _get(obj, "weights", where, default=None)
    if weights is None:
        return State.trivial()
    if not isinstance(weights, list):
        raise SchemaError(_at(where, "weights"), "expected an array")
    w = [parse_rational(x, _at(_at(where, "weights"), i)) for i, x in enumerate(weights)]
    try:
        return State(tuple(w))
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from None


def parse_box(obj, n: int, where: str = "box"):
    if not isinstance(obj, list) or len(obj) != n:
        raise SchemaError(where, f"expected {n} [lo, hi] pairs")
    lo, hi = [], []
    for i, pair in enumerate(obj):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) for x in pair)):
            raise SchemaError(_at(where, i), "expected an integer pair [lo, hi]")
        lo.append(pair[0])
        hi.append(pair[1])
    return lo, hi


def parse_grid(box, level, n) -> GridSpec:
    lo, hi = parse_box(box, n)
    try:
        return GridSpec(tuple(lo), tuple(hi), level)
    except LiftError as exc:
        raise SchemaError("box", str(exc)) from None


# -- reports -------------------------------------------------------------------------------

def render_witness(w: dict) -> Dict[str, Any]:
    out = {}
    for k, v in w.items():
        if isinstance(v, tuple) and v and isinstance(v[0], Fraction):
            out[k] = render_point(v)
        elif isinstance(v, tuple):
            out[k] = list(v)
        elif isinstance(v, Fraction):
            out[k] = render_rational(v)
        else:
            out[k] = v
    return out


def render_report(report, algebra: Algebra) -> Dict[str, Any]:
    return {
        "passed": report.passed,
        "blocks_checked": report.blocks_checked,
        "violations": [{"axiom": v.axiom, "witness": render_witness(v.witness),
                        "value": render_value(v.value, algebra)} for v in report.violations],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(path, f"cannot read file: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
