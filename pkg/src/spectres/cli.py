"""Command-line front end: ``spectres <subcommand> ...``.

Reports are deterministic JSON on stdout (or ``--output``).  Exit status is
0 on success, 1 when a validation or audit fails, 2 on malformed input.
"""
from __future__ import annotations

import argparse
import random
import sys
from typing import List, Optional

from .algebra import AlgebraError, UnsupportedOperation
from .joint import (MEET, MODES, ODOT, ComposedResolution, counterexample,
                    odot_search, reaudit_witness)
from .lifting import LiftError, SigmaHom, lift_spectral, snap_to_grid
from .observable import (InvalidResolution, marginal_observable, measure, mixed_moment_11, moment,
                         spectral_to_observable)
from .serialize import (SchemaError, dumps, load_json, parse_blockset, parse_grid, parse_hom,
                        parse_resolution, parse_state, render_block, render_hom, render_observable,
                        render_point, render_rational, render_report, render_resolution, render_value, render_witness)
from .spectral import DiscreteSpectralResolution, check_spectral_resolution, is_finite_block, volume

OK, FAILED, MALFORMED = 0, 1, 2


class UsageError(ValueError):
    pass


def _warn(msg: str) -> None:
    print(f"spectres: warning: {msg}", file=sys.stderr)


def _emit(args, payload) -> None:
    text = dumps(payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_validate(args):
    F = parse_resolution(load_json(args.resolution))
    report = check_spectral_resolution(F, budget=args.budget)
    out = {"command": "validate", "n": F.n, "algebra": F.algebra.describe()}
    out.update(render_report(report, F.algebra))
    return out, OK if report.passed else FAILED


def cmd_volume(args):
    F = parse_resolution(load_json(args.resolution))
    S = parse_blockset(load_json(args.block), F.n, "block")
    alg = F.algebra
    rows, total = [], alg.zero()
    for b in S:
        if is_finite_block(b) or not isinstance(F, DiscreteSpectralResolution):
            v = volume(F, b)
            how = "delta"
        else:
            v = measure(F, [b])
            how = "atoms"
        total = alg.add(total, v)
        rows.append({**render_block(b), "volume": render_value(v, alg), "method": how})
    return {"command": "volume", "blocks": rows, "total": render_value(total, alg)}, OK


def _parse_box_flag(text: str, n: int):
    parts = text.split(",")
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise UsageError(f"--box needs one lo:hi range or {n} comma-separated ranges")
    box = []
    for p in parts:
        try:
            lo, hi = (int(x) for x in p.split(":"))
        except ValueError:
            raise UsageError(f"--box range {p!r} is not of the form lo:hi") from None
        box.append([lo, hi])
    return box


def cmd_lift(args):
    doc = load_json(args.resolution)
    request = doc if isinstance(doc, dict) and "resolution" in doc else {"resolution": doc}
    F = parse_resolution(request["resolution"], "resolution" if "resolution" in doc else "")
    if not isinstance(F, DiscreteSpectralResolution):
        raise UsageError("lift takes an atom-form resolution")
    hom_doc = load_json(args.hom) if args.hom else request.get("hom")
    pi = parse_hom(hom_doc, "hom", F.algebra) if hom_doc is not None else SigmaHom.identity(F.algebra)
    level = args.level if args.level is not None else request.get("level", 0)
    if not isinstance(level, int) or level < 0:
        raise SchemaError("level", "expected a nonnegative integer")
    box = _parse_box_flag(args.box, F.n) if args.box else request.get("box")
    if box is None:
        raise UsageError("lift needs a box (--box lo:hi or a \"box\" field)")
    grid = parse_grid(box, level, F.n)
    F, moved = snap_to_grid(F, level)
    for old, new in moved:
        _warn(f"atom at ({','.join(render_point(old))}) snapped to ({','.join(render_point(new))})")
    report = check_spectral_resolution(F, budget=args.budget)
    if not report.passed:
        return {"command": "lift", "input": render_report(report, F.algebra)}, FAILED
    rng = random.Random(args.seed) if args.seed is not None else None
    result = lift_spectral(F, pi, grid, rng=rng)
    alg = pi.source
    audit = result.audit
    out = {
        "command": "lift",
        "hom": render_hom(pi),
        "box": [list(p) for p in zip(grid.lo, grid.hi)],
        "level": grid.level,
        "solves": result.solves,
        "snapped": [{"from": render_point(a), "to": render_point(b)} for a, b in moved],
        "u0": render_value(result.u0, alg),
        "grid": [render_point(g) for g in grid.axes()],
        "values": [{"point": render_point(p), "value": render_value(v, alg)} for p, v in sorted(result.K.items())],
        "audit": {
            "passed": audit.passed,
            "cuboids_checked": audit.cuboids_checked,
            "exhaustive": audit.exhaustive,
            "failures": [{"kind": k, "where": str(w)} for k, w in audit.failures[:16]],
        },
    }
    return out, OK if audit.passed else FAILED


def cmd_joint(args):
    doc = load_json(args.request)
    if not isinstance(doc, dict):
        raise SchemaError("", "expected an object")
    mode = doc.get("mode")
    group = isinstance(mode, str) and mode.startswith("group-")
    base = mode[len("group-"):] if group else mode
    if base not in MODES or (group and base not in (MEET, ODOT)):
        raise SchemaError("mode", f"unknown joint mode {mode!r}")
    factors_doc = doc.get("factors")
    if not isinstance(factors_doc, list) or not factors_doc:
        raise SchemaError("factors", "expected a nonempty array of resolutions")
    factors = [parse_resolution(f, f"factors[{i}]") for i, f in enumerate(factors_doc)]
    if not group and any(f.n != 1 for f in factors):
        raise SchemaError("factors", f"{mode} mode takes one-dimensional factors")
    F = ComposedResolution(base, factors)
    report = check_spectral_resolution(F, budget=args.budget)
    out = {"command": "joint", "mode": mode, "n": F.n, "algebra": F.algebra.describe(),
           "breakpoints": [render_point(g) for g in F.breakpoints()]}
    out.update(render_report(report, F.algebra))
    if report.passed and doc.get("materialize", True):
        out["observable"] = render_observable(spectral_to_observable(F, report=report))
    return out, OK if report.passed else FAILED


def cmd_moments(args):
    F = parse_resolution(load_json(args.resolution))
    s = parse_state(load_json(args.state) if args.state else None)
    x = spectral_to_observable(F, budget=args.budget)
    if args.k < 1:
        raise UsageError("-k must be positive")
    out = {"command": "moments", "n": x.n, "k": args.k}
    if x.n == 1:
        out["moment"] = render_rational(moment(s, x, args.k))
        out["mean"] = render_rational(moment(s, x, 1))
    else:
        out["marginals"] = [render_rational(moment(s, marginal_observable(x, i), args.k)) for i in range(x.n)]
        if x.n == 2:
            out["mixed_moment_11"] = render_rational(mixed_moment_11(s, x))
    return out, OK


def cmd_odot_search(args):
    if args.n < 2:
        raise UsageError("-n must be at least 2")
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    rep = odot_search(args.n, args.trials, args.seed)
    witnesses = []
    for w in rep.violations:
        witnesses.append({
            "trial": w.trial,
            "block": render_block(w.block),
            "value": render_value(w.value, w.factors[0].algebra),
            "reaudited": reaudit_witness(w),
            "factors": [render_resolution(f) for f in w.factors],
        })
    out = {"command": "odot-search", "n": rep.n, "trials": rep.trials, "seed": rep.seed,
           "failed_trials": rep.failed_trials, "summary": rep.summary, "witnesses": witnesses}
    return out, OK


def cmd_counterexample(args):
    c = counterexample()
    out = {
        "command": "counterexample",
        "block": render_block(c.block),
        "positive_sum": render_rational(c.positive),
        "negative_sum": render_rational(c.negative),
        "volume": render_rational(c.volume),
        "violates_volume_condition": c.violates,
        "vertices": [{"point": render_point(p), "value": render_rational(v)}
                     for p, v in sorted(c.vertex_values.items())],
        "validator": {"passed": c.report.passed,
                      "volume_violations": len(c.report.by_axiom("volume"))},
    }
    return out, FAILED if c.violates else OK


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectres", description="Exact n-dimensional spectral resolutions.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=2000,
                        help="non-cell sub-blocks checked by the validator (default 2000)")
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the resolution axioms")
    s.add_argument("resolution")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("volume", parents=[common], help="volumes of blocks")
    s.add_argument("resolution")
    s.add_argument("--block", required=True, help="block or block-set JSON")
    s.set_defaults(func=cmd_volume)

    s = sub.add_parser("lift", parents=[common], help="lift through a homomorphism")
    s.add_argument("resolution", help="resolution or full lift request JSON")
    s.add_argument("--hom", help="homomorphism JSON")
    s.add_argument("--box", help="lo:hi for every axis or comma-separated per axis, e.g. -2:2")
    s.add_argument("--level", type=int)
    s.add_argument("--seed", type=int, help="use the randomized oracle with this seed")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("joint", parents=[common], help="compose factors into a joint resolution")
    s.add_argument("request")
    s.set_defaults(func=cmd_joint)

    s = sub.add_parser("moments", parents=[common], help="moments in a state")
    s.add_argument("resolution")
    s.add_argument("--state", help="state JSON (default: trivial state)")
    s.add_argument("-k", type=int, default=1)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("odot-search", parents=[common], help="search the Lukasiewicz joint for violations")
    s.add_argument("-n", type=int, default=3)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_odot_search)

    s = sub.add_parser("counterexample", parents=[common], help="reproduce the group-joint counterexample")
    s.set_defaults(func=cmd_counterexample)
    return p


def _join_box(argv: List[str]) -> List[str]:
    # "--box -2:2" would otherwise be read as an unknown option.
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--box" and i + 1 < len(argv):
            out.append(f"--box={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[List[str]] = None) -> int:
    argv = _join_box(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return MALFORMED if exc.code else OK
    try:
        payload, status = args.func(args)
    except InvalidResolution as exc:
        payload = {"command": args.command, "passed": False, "error": str(exc),
                   "violations": [{"axiom": v.axiom, "witness": render_witness(v.witness)}
                                  for v in exc.report.violations]}
        status = FAILED
    except (SchemaError, UsageError, AlgebraError, UnsupportedOperation, LiftError) as exc:
        print(f"spectres: error: {exc}", file=sys.stderr)
        return MALFORMED
    _emit(args, payload)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
