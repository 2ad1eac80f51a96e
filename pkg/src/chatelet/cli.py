"""Command-line driver: end-to-end pipelines with bit-stable JSON reports.

Exit codes: 0 verification certified, 2 usage error, 3 stage failure,
4 verification ran but was inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from chatelet import __version__
from chatelet import bundle as bundle_mod
from chatelet import surface as surface_mod
from chatelet.local import (
    REAL,
    finite_place,
    hilbert_symbol,
    support_places,
)
from chatelet.numbers import is_prime
from chatelet.surface import (
    ChateletSurface,
    ParamSearchError,
    surface_from_json,
    surface_to_json,
)

SCHEMA = "chatelet-report/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STAGE = 3
EXIT_INCONCLUSIVE = 4


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.message = message


def _frac(q) -> str:
    return surface_mod._frac_str(Fraction(q))


def _point(x) -> Optional[list[str]]:
    if x is None:
        return None
    return [str(x[0]), str(x[1])]


def _witness(w) -> Optional[list[str]]:
    if w is None:
        return None
    return [_frac(w[0]), _frac(w[1])]


def _local_report(rep) -> dict:
    return {
        "surface": rep.surface_id,
        "places": [
            {
                "place": str(r.place),
                "solvable": r.solvable,
                "x": _point(r.witness.x if r.witness else None),
                "certificate": (str(r.witness.certificate)
                                if r.witness else None),
            }
            for r in rep.results
        ],
        "good_places": rep.good_places_tag,
        "disc_cofactor": str(rep.uncertified_disc_cofactor),
        "all_solvable": rep.all_solvable,
    }


def _obstruction(rep) -> dict:
    return {
        "surface": rep.surface_id,
        "invariants": [
            {
                "place": str(r.place),
                "invariant": _frac(r.invariant),
                "samples": r.samples,
                "justification": r.justification,
            }
            for r in rep.records
        ],
        "good_places": rep.good_places_tag,
        "sum": _frac(rep.invariant_sum),
        "conclusion": rep.conclusion,
    }


def _search(res) -> dict:
    return {
        "height": res.height,
        "found": res.found,
        "x": _point(res.x),
        "witness": _witness(res.witness),
        "note": res.note,
    }


def _fiber_record(r) -> dict:
    return {
        "t": _point(r.t),
        "fiber": _point((r.fiber_param.u, r.fiber_param.v)),
        "smooth": r.smooth,
        "irreducible": r.irreducible,
        "locally_solvable": r.locally_solvable,
        "bad_places": [str(v) for v in r.bad_places],
        "disc_cofactor": str(r.disc_cofactor),
        "point_found": r.point_found,
        "point": _point(r.point),
        "note": r.note,
    }


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2,
                      separators=(",", ": ")) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_shell(args, subcommand: str) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "out") and v is not None}
    return {
        "schema": SCHEMA,
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_counterexample(args) -> int:
    report = _report_shell(args, "counterexample")
    stages: dict = {}
    report["stages"] = stages
    try:
        try:
            params = surface_mod.find_params(args.bound)
        except (ParamSearchError, ValueError) as e:
            raise StageError("find_params", str(e))
        stages["params"] = {"a": params.a, "b": params.b, "c": params.c}
        S = surface_mod.build_surface(params)
        stages["surface"] = surface_to_json(S)
        stages["surface"]["disc"] = _frac(S.disc())
        local = surface_mod.verify_local_everywhere(S)
        stages["local"] = _local_report(local)
        if not local.all_solvable:
            raise StageError("local", "constructed surface not locally "
                             "solvable everywhere")
        ob = surface_mod.obstruction_report(
            S, samples_per_place=args.samples, seed=args.seed)
        stages["obstruction"] = _obstruction(ob)
        stages["search"] = _search(
            surface_mod.rational_point_search(S, args.height))
    except StageError as e:
        report["error"] = {"stage": e.stage, "message": e.message}
        report["status"] = "error"
        _emit(report, args.out)
        return EXIT_STAGE
    certified = (ob.conclusion == "no-rational-point-certified"
                 and not stages["search"]["found"])
    report["status"] = "certified" if certified else "inconclusive"
    _emit(report, args.out)
    return EXIT_OK if certified else EXIT_INCONCLUSIVE


def cmd_bundle(args) -> int:
    report = _report_shell(args, "bundle")
    stages: dict = {}
    report["stages"] = stages
    try:
        try:
            params = surface_mod.find_params(args.bound)
            S = surface_mod.build_surface(params)
            B = bundle_mod.make_bundle(S)
        except (ParamSearchError, ValueError) as e:
            raise StageError("build", str(e))
        stages["bundle"] = bundle_mod.bundle_to_json(B)
        F = bundle_mod.bad_fibers(B)
        stages["bad_fibers"] = {
            "fibers": [_point((f.u, f.v)) for f in F.fibers],
            "affine_classes": sorted(_frac(q)
                                     for q in F.affine_classes()),
        }
        if args.d is not None:
            d = args.d
        else:
            d = bundle_mod.good_d_candidates(F, 1)[0]
        try:
            W = bundle_mod.pullback(B, d)
        except ValueError as e:
            raise StageError("pullback", str(e))
        stages["pullback"] = {"d": str(d)}
        ts = bundle_mod.default_sample_ts(2 + args.fibers)
        try:
            rep = bundle_mod.verify_pullback(
                W, ts, search_H=args.height,
                obstruction_samples=args.samples, seed=args.seed)
        except ArithmeticError as e:
            raise StageError("verify_pullback", str(e))
        stages["special_fiber"] = {
            "obstruction": _obstruction(rep.special),
            "search": _search(rep.special_search),
        }
        stages["fibers"] = [_fiber_record(r) for r in rep.fibers]
        stages["summary"] = {
            "sampled": len(rep.fibers),
            "locally_solvable": rep.n_solvable,
            "points_found": rep.n_points_found,
            "point_fraction": (f"{rep.n_points_found}/{len(rep.fibers)}"
                               if rep.fibers else "0/0"),
        }
    except StageError as e:
        report["error"] = {"stage": e.stage, "message": e.message}
        report["status"] = "error"
        _emit(report, args.out)
        return EXIT_STAGE
    certified = rep.all_affine_ok  # special fiber already hard-checked
    report["status"] = "certified" if certified else "inconclusive"
    _emit(report, args.out)
    return EXIT_OK if certified else EXIT_INCONCLUSIVE


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def cmd_hilbert(args) -> int:
    report = _report_shell(args, "hilbert")
    a, b = args.a, args.b
    if a == 0 or b == 0:
        sys.stderr.write("hilbert: arguments must be nonzero\n")
        return EXIT_USAGE
    report["config"]["a"] = _frac(a)
    report["config"]["b"] = _frac(b)
    if args.place is not None:
        if args.place == "oo":
            v = REAL
        else:
            try:
                p = int(args.place)
                if not is_prime(p):
                    raise ValueError
            except ValueError:
                sys.stderr.write(
                    f"hilbert: --place must be 'oo' or a prime, "
                    f"got {args.place!r}\n")
                return EXIT_USAGE
            v = finite_place(p)
        report["stages"] = {
            "symbol": {"place": str(v), "value": hilbert_symbol(a, b, v)}}
    else:
        table = [{"place": str(v), "value": hilbert_symbol(a, b, v)}
                 for v in support_places(a, b)]
        product = 1
        for row in table:
            product *= row["value"]
        report["stages"] = {
            "table": table,
            "product": product,
            "product_formula_holds": product == 1,
        }
    report["status"] = "certified"
    _emit(report, args.out)
    return EXIT_OK


def _verify_surface(report: dict, S: ChateletSurface, args) -> int:
    stages: dict = {}
    report["stages"] = stages
    stages["surface"] = surface_to_json(S)
    stages["surface"]["disc"] = _frac(S.disc())
    try:
        S.require_smooth()
        local = surface_mod.verify_local_everywhere(S)
    except (ValueError, ArithmeticError) as e:
        report["error"] = {"stage": "local", "message": str(e)}
        report["status"] = "error"
        _emit(report, args.out)
        return EXIT_STAGE
    stages["local"] = _local_report(local)
    stages["search"] = _search(
        surface_mod.rational_point_search(S, args.height))
    report["status"] = "certified"
    _emit(report, args.out)
    return EXIT_OK


def cmd_iskovskikh(args) -> int:
    report = _report_shell(args, "iskovskikh")
    return _verify_surface(report, surface_mod.iskovskikh(), args)


def cmd_surface(args) -> int:
    report = _report_shell(args, "surface")
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input) as fh:
            text = fh.read()
    try:
        S = surface_from_json(text)
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        sys.stderr.write(f"surface: invalid input: {e}\n")
        return EXIT_USAGE
    return _verify_surface(report, S, args)


# ---------------------------------------------------------------------------
# parser


def _common(sub, height=100):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--height", type=int, default=height,
                     help="height bound for rational point search")
    sub.add_argument("--samples", type=int, default=20,
                     help="certified local points per place")
    sub.add_argument("--out", help="write the JSON report to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chatelet",
        description="Chatelet surfaces violating the Hasse principle, "
                    "and surface bundles with one pointless fiber")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    ce = subs.add_parser("counterexample",
                         help="construct and certify the counterexample")
    _common(ce)
    ce.add_argument("--bound", type=int, default=100,
                    help="parameter search bound")
    ce.set_defaults(func=cmd_counterexample)

    bu = subs.add_parser("bundle",
                         help="build and verify the pulled-back bundle")
    _common(bu)
    bu.add_argument("--bound", type=int, default=100)
    bu.add_argument("--fibers", type=int, default=50,
                    help="number of sampled affine fibers beyond 0")
    bu.add_argument("--d", type=int, default=None,
                    help="override the base-change coefficient")
    bu.set_defaults(func=cmd_bundle)

    hi = subs.add_parser("hilbert", help="Hilbert symbol table")
    hi.add_argument("a", type=_parse_rational)
    hi.add_argument("b", type=_parse_rational)
    hi.add_argument("--place", help="'oo' or a prime; default: full table")
    hi.add_argument("--out")
    hi.set_defaults(func=cmd_hilbert)

    isk = subs.add_parser("iskovskikh",
                          help="local table and search on the classical "
                               "surface y^2+z^2 = (x^2-2)(3-x^2)")
    _common(isk, height=500)
    isk.set_defaults(func=cmd_iskovskikh)

    su = subs.add_parser("surface", help="verify a serialized surface")
    su.add_argument("input", help="JSON file, or '-' for stdin")
    _common(su)
    su.set_defaults(func=cmd_surface)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
