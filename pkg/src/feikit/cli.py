"""Command-line entry point."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import certificate_aggregates, parity_certificate, verify_fmei_bound
from .core import BooleanFunction, construct, measures, point_coords, point_index, wht
from .dnf import mansour_approximate, read_dnf_file
from .errors import BadParams, FeikitError
from .io import format_truth_table, load_json, parse_truth_table
from .lp import approx_degree, approx_spectral_norm, verify_minentropy_vs_norm
from .partitions import (EXACT_AUC_N_MAX, CertificateDistribution, aep_sample_check, chebyshev_copies,
                         SubcubePartition, heuristic_partition, min_aUC_exact, partition_from_json,
                         verify_entropy_vs_aUC, verify_partition, verify_typical_coefficient_claims)
from .polyforms import BlockMultilinearForm, bh_quantities, reconstruct_boolean
from .scan import CHECKS, ScanConfig, render, scan

EXIT_USAGE = 1
EXIT_INPUT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def jsonable(obj):
    """Recursively convert results into plain JSON values.

    Fractions become strings, numpy scalars become Python numbers and
    non-finite floats become the strings "inf", "-inf" or "nan".
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def parse_construct(text: str) -> BooleanFunction:
    """``kind:key=value,key=value`` such as ``tribes:w=2,s=3``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise BadParams(f"construct parameter {item!r} must look like key=value")
        params[key.strip()] = _parse_value(value.strip())
    return construct(kind.strip(), **params)


def _function(args) -> BooleanFunction:
    if args.fn and args.construct:
        raise BadParams("give either --fn or --construct, not both")
    if args.construct:
        return parse_construct(args.construct)
    if args.fn:
        return parse_truth_table(Path(args.fn).read_text())
    raise BadParams("a function is required: --fn FILE or --construct KIND:k=v,...")


def _add_fn(p):
    p.add_argument("--fn", metavar="FILE", help="truth-table file")
    p.add_argument("--construct", metavar="SPEC", help="named family, e.g. and:n=3 or tribes:w=2,s=2")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _point(text: str):
    """Input index, or comma separated +-1 coordinates."""
    if "," in text or text.startswith(("+", "-")):
        return tuple(int(v) for v in text.split(","))
    return int(text)


# subcommands; each returns a JSON-able object


def cmd_wht(args):
    f = _function(args)
    s = wht(f)
    return {"n": f.n, "scale": f"2^{f.n}", "coeffs": s.to_json(), "degree": s.degree}


def cmd_measures(args):
    f = _function(args)
    orders = tuple(float(a) for a in args.renyi.split(",")) if args.renyi else None
    prof = measures(wht(f), orders) if orders else measures(wht(f))
    return dataclasses.asdict(prof)


def cmd_certificates(args):
    return certificate_aggregates(_function(args)).to_json(per_input=args.per_input)


def cmd_parity_cert(args):
    f = _function(args)
    if args.x is not None:
        k, h = parity_certificate(f, args.x)
        return {"x": list(point_coords(f.n, point_index(f.n, args.x))), "C_parity": k, "subspace": h.to_json()}
    h_inf, bound, holds = verify_fmei_bound(f)
    rep = certificate_aggregates(f, parity_certs=True)
    return {"C_parity": rep.C_parity, "C_min_parity": rep.C_min_parity,
            "min_entropy": h_inf, "twice_C_min_parity": bound, "min_entropy_bound_holds": holds}


def cmd_verify_partition(args):
    f = _function(args)
    part = partition_from_json(load_json(args.partition), f.n)
    auc = verify_partition(f, part)
    h, rhs, holds = verify_entropy_vs_aUC(f, part)
    return {"valid": True, "cells": len(part.cells), "auc": auc, "auc_float": float(auc),
            "entropy": h, "twice_auc": rhs, "entropy_bound_holds": holds}


def cmd_min_auc(args):
    f = _function(args)
    if args.heuristic or f.n > EXACT_AUC_N_MAX:
        part = heuristic_partition(f, args.mode)
        exact = False
        auc = verify_partition(f, part)
    else:
        auc, part = min_aUC_exact(f)
        exact = True
    h, rhs, holds = verify_entropy_vs_aUC(f, part)
    return {"auc": auc, "auc_float": float(auc), "exact": exact, "entropy": h,
            "entropy_bound_holds": holds, "partition": part.to_json()}


def cmd_lp_norm(args):
    f = _function(args)
    eps = args.eps if args.exact else float(args.eps)
    d = args.deg if args.deg is not None else approx_degree(f, eps)
    res = approx_spectral_norm(f, eps, d, dual=True, exact=args.exact)
    out = res.to_json()
    out["degree"] = d
    if args.dual and res.dual is not None:
        out["dual"] = [v if isinstance(v, Fraction) else float(v) for v in res.dual.values]
    if args.check:
        h, rhs, holds = verify_minentropy_vs_norm(f, eps, exact=args.exact)
        out.update(min_entropy=h, norm_bound=rhs, min_entropy_bound_holds=holds)
    return out


def cmd_approx_degree(args):
    f = _function(args)
    return {"eps": args.eps, "degree": approx_degree(f, float(args.eps))}


def cmd_mansour(args):
    d = read_dnf_file(Path(args.dnf).read_text())
    return mansour_approximate(d, args.eps, args.delta1, args.delta2).to_json()


def _form(path):
    return BlockMultilinearForm.from_json(load_json(path))


def cmd_bh(args):
    rep = bh_quantities(_form(args.form), restarts=args.restarts, rng=args.seed)
    return rep.to_json()


def cmd_reconstruct(args):
    poly, f = reconstruct_boolean(_form(args.form))
    return {"n": f.n, "truth_table": format_truth_table(f).strip(), "polynomial": poly.to_json()}


def cmd_aep_demo(args):
    f = _function(args)
    if args.partition:
        part = partition_from_json(load_json(args.partition), f.n)
    elif f.n <= EXACT_AUC_N_MAX:
        part = min_aUC_exact(f)[1]
    else:
        part = heuristic_partition(f, "subcube")
    if not isinstance(part, SubcubePartition):
        raise BadParams("aep-demo needs a subcube partition")
    verify_partition(f, part)
    delta = args.delta
    dist = CertificateDistribution.of(part)
    claims = [verify_typical_coefficient_claims(f, part, M, delta).to_json() for M in args.M]
    m_cheb = chebyshev_copies(dist, delta)
    coverage = aep_sample_check(dist, m_cheb, delta, args.trials, args.seed)
    d = float(delta)
    sigma = math.sqrt(d * (1 - d) / args.trials)
    return {"entropy": float(dist.entropy), "auc": dist.entropy, "variance": dist.variance,
            "claims": claims, "chebyshev_M": m_cheb, "trials": args.trials, "coverage": coverage,
            "coverage_floor": 1 - d - 3 * sigma, "coverage_ok": coverage >= 1 - d - 3 * sigma}


def cmd_scan(args):
    checks = tuple(c.strip() for c in args.checks.split(",")) if args.checks else CHECKS
    cfg = ScanConfig(n=args.n, mode=args.mode, count=args.count, seed=args.seed, path=args.path,
                     checks=checks, output=args.output, format=args.format)
    report = scan(cfg, threads=args.threads)
    text = render(report, args.format, timing=args.timing)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    bad = report.violations()
    if bad:
        print(f"proved inequality reported false: {bad[:5]}", file=sys.stderr)
        return 4
    return 0


def _add_globals(p, defaults: bool):
    # accepted before or after the subcommand; the later copy only
    # overrides when actually given
    def dflt(v):
        return v if defaults else argparse.SUPPRESS

    p.add_argument("--seed", type=int, default=dflt(0), help="RNG seed (default 0)")
    p.add_argument("--threads", type=int, default=dflt(1), help="worker processes for scan (default 1)")
    p.add_argument("--format", choices=("json", "csv"), default=dflt("json"), help="output format (csv: scan only)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="feikit", description="Fourier entropy, influence and certificate tools for Boolean functions.")
    p.add_argument("--version", action="version", version=f"feikit {__version__}")
    _add_globals(p, defaults=True)
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_text, fn=True):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        _add_globals(sp, defaults=False)
        if fn:
            _add_fn(sp)
        sp.set_defaults(func=func)
        return sp

    add("wht", cmd_wht, "integer Walsh-Hadamard spectrum 2^n * fhat")
    sp = add("measures", cmd_measures, "entropies, influences, variance and degree")
    sp.add_argument("--renyi", help="comma separated Renyi orders")
    sp = add("certificates", cmd_certificates, "sensitivity and certificate complexities")
    sp.add_argument("--per-input", action="store_true", help="include per-input values")
    sp = add("parity-cert", cmd_parity_cert, "affine (parity) certificates")
    sp.add_argument("--x", type=_point, help="input index or +-1 coordinates (write --x=-1,1 for a leading minus); omit for aggregates")
    sp = add("verify-partition", cmd_verify_partition, "check a partition file and report its aUC")
    sp.add_argument("--partition", required=True, metavar="FILE")
    sp = add("min-auc", cmd_min_auc, "optimal (n <= 4) or greedy monochromatic partition")
    sp.add_argument("--heuristic", action="store_true", help="use the greedy partition")
    sp.add_argument("--mode", choices=("subcube", "affine"), default="subcube", help="greedy cell shape")
    sp = add("lp-norm", cmd_lp_norm, "approximate spectral norm by linear programming")
    sp.add_argument("--eps", type=_rational, required=True)
    sp.add_argument("--deg", type=int, help="degree bound (default: approximate degree)")
    sp.add_argument("--dual", action="store_true", help="include the dual witness")
    sp.add_argument("--exact", action="store_true", help="rational simplex (n <= 6)")
    sp.add_argument("--check", action="store_true", help="compare with the min-entropy")
    sp = add("approx-degree", cmd_approx_degree, "least degree of a uniform eps-approximation")
    sp.add_argument("--eps", type=_rational, required=True)
    sp = add("mansour", cmd_mansour, "sparse approximation of a DNF", fn=False)
    sp.add_argument("--dnf", required=True, metavar="FILE")
    sp.add_argument("--eps", type=_rational, required=True)
    sp.add_argument("--delta1", type=_rational)
    sp.add_argument("--delta2", type=_rational)
    sp = add("bh", cmd_bh, "Bohnenblust-Hille ratio of a block multilinear form", fn=False)
    sp.add_argument("--form", required=True, metavar="FILE")
    sp.add_argument("--restarts", type=int, default=32)
    sp = add("reconstruct", cmd_reconstruct, "exact Boolean function behind a 1/8-approximating form", fn=False)
    sp.add_argument("--form", required=True, metavar="FILE")
    sp = add("aep-demo", cmd_aep_demo, "typical-set counts and sampled coverage for a partition")
    sp.add_argument("--partition", metavar="FILE")
    sp.add_argument("--delta", type=_rational, default=Fraction(1, 2))
    sp.add_argument("--M", type=lambda s: [int(v) for v in s.split(",")], default=[1, 2, 3],
                    help="comma separated copy counts")
    sp.add_argument("--trials", type=int, default=10000)
    sp = add("scan", cmd_scan, "run inequality checks over a corpus", fn=False)
    sp.add_argument("--n", type=int)
    sp.add_argument("--mode", choices=("exhaustive", "random", "file"), default="exhaustive")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--path", help="function file for file mode")
    sp.add_argument("--checks", help=f"comma separated subset of {','.join(CHECKS)}")
    sp.add_argument("--output", "-o", help="write the report here instead of stdout")
    sp.add_argument("--timing", action="store_true", help="add runtime stats to JSON output")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.format == "csv" and args.command != "scan":
        parser.error("--format csv is only available for scan")
    try:
        result = args.func(args)
    except FeikitError as exc:
        print(f"feikit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"feikit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(result, int):
        return result
    sys.stdout.write(json.dumps(jsonable(result), indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
