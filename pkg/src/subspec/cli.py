"""Command-line interface: analyze, riesz, lyapunov, scan, diffract,
bernoulli, catalog.  Emits versioned JSON reports and plot-ready CSV grids.

Exit codes: 0 success, 1 input error, 2 precondition violation, 3 internal
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, classify, cocycle, lyapunov
from .catalog import CATALOG_NAMES, catalog_source, catalog_substitution
from .errors import NumericalError, PreconditionError, RuleError
from .substitution import (
    Substitution,
    SuspensionParams,
    is_primitive,
    parse_substitution,
    perron_data,
    substitution_matrix,
)

SCHEMA = "subspec-report/1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's default 2
        self.exit(1, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "-inf" if x < 0 else "inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, complex):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _load_substitution(args) -> Substitution:
    rules = getattr(args, "rule", None)
    if rules:
        return parse_substitution("\n".join(rules))
    src = args.source
    if src is None:
        raise RuleError("no rule source: give a file, catalog:NAME, or --rule")
    if src.startswith("catalog:"):
        return catalog_substitution(src[len("catalog:"):])
    if not os.path.exists(src):
        raise RuleError(f"no such rule file: {src}")
    with open(src, encoding="utf-8") as fh:
        return parse_substitution(fh.read())


def _suspension(args, zeta: Substitution) -> SuspensionParams:
    if getattr(args, "self_similar", False):
        return SuspensionParams.self_similar(zeta)
    heights = getattr(args, "heights", None)
    if heights:
        vals = [float(x) for x in heights.split(",")]
        if len(vals) != zeta.d:
            raise PreconditionError(f"--heights needs {zeta.d} comma-separated values")
        return SuspensionParams.explicit(vals)
    return SuspensionParams.unit(zeta.d)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", out)


def _criteria_json(criteria):
    return [
        {"id": c.id, "verdict": c.verdict, "theorem": c.theorem,
         "evidence": _jsonable(c.evidence)}
        for c in criteria
    ]


def _base_report(zeta: Substitution) -> dict:
    ok, witness = is_primitive(zeta)
    rep = {
        "schema": SCHEMA,
        "version": __version__,
        "substitution": {
            "tokens": list(zeta.tokens),
            "rules": zeta.rule_lines(),
        },
        "matrix": substitution_matrix(zeta).tolist(),
        "primitive": ok,
        "primitivity_witness": witness,
    }
    if ok:
        pf = perron_data(zeta)
        rep["perron"] = {
            "theta": pf.theta,
            "right": pf.right.tolist(),
            "left": pf.left.tolist(),
            "frequencies": pf.frequencies.tolist(),
        }
    return rep


def cmd_analyze(args) -> int:
    zeta = _load_substitution(args)
    rep = _base_report(zeta)
    if not rep["primitive"]:
        raise PreconditionError("substitution is not primitive; analysis stops here")
    summary = classify.spectrum_summary(zeta)
    rep["classification"] = {
        "headline": summary.headline,
        "criteria": _criteria_json(summary.criteria),
    }
    _emit_json(rep, args.out)
    return 0


def cmd_riesz(args) -> int:
    zeta = _load_substitution(args)
    s = _suspension(args, zeta)
    grid = cocycle.riesz_density(zeta, args.level, args.grid, s=s)
    if args.scalar:
        weights = [complex(x) for x in args.scalar.split(",")]
        if len(weights) != zeta.d:
            raise PreconditionError(f"--scalar needs {zeta.d} comma-separated weights")
        grid = cocycle.contract_density(grid, weights)
    if args.format == "json":
        _emit_json({"schema": SCHEMA, "level": grid.level,
                    "omegas": grid.omegas, "values": grid.values}, args.out)
    else:
        _emit(grid.to_csv(), args.out)
    return 0


def cmd_lyapunov(args) -> int:
    zeta = _load_substitution(args)
    report = classify.pisot_report(zeta)
    if not report.irreducible:
        # the singularity criterion needs an irreducible characteristic
        # polynomial; report not-applicable instead of estimating
        rep = _base_report(zeta)
        rep["verdict"] = {
            "id": "lyapunov-singularity",
            "verdict": "not-applicable",
            "theorem": "bufetov-solomyak-lyapunov-singularity",
            "evidence": {"reason": "characteristic polynomial reducible over Q",
                         "char_poly": list(report.char_poly)},
        }
        _emit_json(rep, args.out)
        return 0
    est = lyapunov.global_exponent(zeta, args.depth, args.samples, seed=args.seed)
    verdict = lyapunov.singularity_verdict_irreducible(zeta, est, report=report)
    if args.format == "csv":
        lines = ["k,estimate,stderr,samples,seed"]
        for k in range(len(est.estimates)):
            lines.append(f"{k + 1},{est.estimates[k]:.17g},{est.stderrs[k]:.17g},"
                         f"{est.samples},{est.seed}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        rep = _base_report(zeta)
        rep["exponent"] = {
            "estimates": est.estimates,
            "stderrs": est.stderrs,
            "samples": est.samples,
            "seed": est.seed,
            "degenerate": est.degenerate,
            "value": est.value,
            "value_stderr": est.value_stderr,
            "log_theta": math.log(est.theta),
        }
        rep["verdict"] = _criteria_json([verdict])[0]
        _emit_json(rep, args.out)
    return 0


def cmd_scan(args) -> int:
    zeta = _load_substitution(args)
    s = _suspension(args, zeta)
    lo, hi = args.range
    res = lyapunov.eigenvalue_scan(zeta, s, lo, hi, args.grid, K=args.depth)
    lines = ["omega,max_distance_last5,candidate"]
    for w, dist, cand in zip(res.omegas, res.max_distance_last5, res.candidate):
        lines.append(f"{float(w):.17g},{dist:.17g},{int(cand)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_diffract(args) -> int:
    zeta = _load_substitution(args)
    s = _suspension(args, zeta)
    lo, hi = args.range
    res = cocycle.diffraction_autocorrelation(zeta, s, args.letter, args.window,
                                              args.grid, lo=lo, hi=hi)
    if args.format == "json":
        _emit_json({"schema": SCHEMA, "point_count": res.point_count,
                    "window": res.window, "mass_at_zero": res.mass_at_zero,
                    "omegas": res.grid.omegas, "values": res.grid.values}, args.out)
    else:
        _emit(res.grid.to_csv(), args.out)
    return 0


def cmd_bernoulli(args) -> int:
    value, tail = classify.bernoulli_fourier(args.contraction, args.bias,
                                             args.xi, args.terms)
    _emit_json({"schema": SCHEMA, "lambda": args.contraction, "p": args.bias,
                "xi": args.xi, "terms": args.terms, "value": value,
                "abs": abs(value), "tail_bound": tail}, args.out)
    return 0


def cmd_catalog(args) -> int:
    entries = []
    for name in CATALOG_NAMES:
        src = catalog_source(name if name != "family-01k" else "family-01k?k=4")
        entries.append({"name": name, "rules": src.strip().splitlines()})
    _emit_json({"schema": SCHEMA, "catalog": entries}, args.out)
    return 0


def build_parser() -> _Parser:
    seed_default = int(os.environ.get("SUBSPEC_SEED", "1"))
    p = _Parser(prog="subspec",
                description="Spectral analysis of primitive aperiodic substitutions")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, source=True):
        if source:
            sp.add_argument("source", nargs="?",
                            help="rule file or catalog:NAME")
            sp.add_argument("--rule", action="append",
                            help="inline rule line (repeatable)")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads (results are thread-count independent)")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--seed", type=int, default=seed_default)

    sp = sub.add_parser("analyze", help="classification report")
    common(sp)
    sp.set_defaults(func=cmd_analyze, format="json")

    sp = sub.add_parser("riesz", help="matrix Riesz-product density grid")
    common(sp)
    sp.add_argument("--grid", type=int, default=1024)
    sp.add_argument("--level", type=int, default=10)
    sp.add_argument("--scalar", default=None,
                    help="comma-separated weights for a scalar contraction")
    sp.add_argument("--self-similar", action="store_true", dest="self_similar")
    sp.add_argument("--heights", default=None)
    sp.set_defaults(func=cmd_riesz, format="csv")

    sp = sub.add_parser("lyapunov", help="exponent estimate + singularity verdict")
    common(sp)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.set_defaults(func=cmd_lyapunov, format="json")

    sp = sub.add_parser("scan", help="eigenvalue candidate scan")
    common(sp)
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--range", type=float, nargs=2, default=[0.0, 1.0])
    sp.add_argument("--self-similar", action="store_true", dest="self_similar")
    sp.add_argument("--heights", default=None)
    sp.set_defaults(func=cmd_scan, format="csv")

    sp = sub.add_parser("diffract", help="windowed diffraction of a tile point set")
    common(sp)
    sp.add_argument("--grid", type=int, default=1024)
    sp.add_argument("--range", type=float, nargs=2, default=[0.0, 1.0])
    sp.add_argument("--letter", type=int, default=0)
    sp.add_argument("--window", type=float, default=2000.0)
    sp.add_argument("--self-similar", action="store_true", dest="self_similar")
    sp.add_argument("--heights", default=None)
    sp.set_defaults(func=cmd_diffract, format="csv")

    sp = sub.add_parser("bernoulli", help="Bernoulli-convolution Fourier product")
    common(sp, source=False)
    sp.add_argument("--contraction", type=float, required=True, metavar="LAMBDA")
    sp.add_argument("--bias", type=float, default=0.5)
    sp.add_argument("--xi", type=float, required=True)
    sp.add_argument("--terms", type=int, default=200)
    sp.set_defaults(func=cmd_bernoulli, format="json")

    sp = sub.add_parser("catalog", help="list built-in substitutions")
    common(sp, source=False)
    sp.set_defaults(func=cmd_catalog, format="json")
    return p


def entry(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RuleError as exc:
        print(f"subspec: input error: {exc}", file=sys.stderr)
        return 1
    except PreconditionError as exc:
        print(f"subspec: precondition violation: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"subspec: numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(entry())


if __name__ == "__main__":
    main()
