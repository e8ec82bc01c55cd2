"""Command-line front end.

Exit codes: 0 flat / torsion-free / success, 1 not flat / torsion found,
2 parse or semantic error, 3 resource limit hit, 4 certificate verification
failure or corpus mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .flatness import (FlatnessVerdict, OriginNotOnVariety, Status, first_torsion_power,
                       flat_at_origin, flat_check)
from .geometry import fibre_report, image_closure
from .groebner import ResourceExceeded, ResourceLimits, buchberger, collect_stats
from .modules import CertificateFailure, ModulePresentation, make_certificate, torsion_submodule
from .oracle import (BudgetExceeded, SearchBounds, brute_torsion_search, cross_validate,
                     load_corpus, witness_certificate)
from .parsing import ProblemError, ProblemFile, parse_problem
from .poly import MonomialOrder, rational

EXIT_OK, EXIT_NOTFLAT, EXIT_INPUT, EXIT_RESOURCE, EXIT_CERTIFICATE = range(5)


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _load(path: str) -> ProblemFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_INPUT, f"cannot read {path}: {exc.strerror}")
    except UnicodeDecodeError:
        raise _Exit(EXIT_INPUT, f"{path}: not valid UTF-8")
    try:
        return parse_problem(text, Path(path).stem)
    except ProblemError as exc:
        kind = type(exc).__name__
        where = f"{path}:{exc.line}:{exc.col}" if exc.line else path
        raise _Exit(EXIT_INPUT, f"{where}: {kind}: {exc.message}")


def _limits(args) -> ResourceLimits:
    return ResourceLimits.from_env(max_degree=args.max_degree, max_basis=args.max_basis,
                                   timeout=args.timeout)


def _module_dict(P: ModulePresentation) -> dict:
    return {"base": list(P.tower.base), "fiber": list(P.tower.fiber_names),
            "rank": P.rank, "relations": [[str(p) for p in v] for v in P.relations]}


def _emit(args, data: dict, lines: list[str]):
    if args.format == "json":
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _verdict_lines(v: FlatnessVerdict, show_cert: bool) -> list[str]:
    lines = [f"status: {v.status.value}", f"scope: {v.scope}", f"power: {v.power_used}"]
    lines += [f"notice: {n}" for n in v.notices]
    if v.annihilator:
        lines.append("torsion annihilator: " + ", ".join(str(p) for p in v.annihilator))
    if v.certificate is not None and show_cert:
        c = v.certificate
        lines.append(f"certificate: m = {c.element}, r = {c.annihilator}")
        lines += [f"  check: {t}" for t in c.verification_trace]
    return lines


def _verdict_code(v: FlatnessVerdict) -> int:
    return {Status.FLAT: EXIT_OK, Status.INCONCLUSIVE: EXIT_OK,
            Status.NOT_FLAT: EXIT_NOTFLAT,
            Status.RESOURCE_EXCEEDED: EXIT_RESOURCE}[v.status]


def cmd_flatcheck(args) -> int:
    pf = _load(args.file)
    problem = pf.problem()
    limits = _limits(args)
    if args.at_origin:
        if args.power is not None:
            raise _Exit(EXIT_INPUT, "--at-origin always uses the n-fold power")
        try:
            v = flat_at_origin(problem, limits)
        except OriginNotOnVariety as exc:
            raise _Exit(EXIT_INPUT, str(exc))
    else:
        v = flat_check(problem, args.power, limits)
    data = v.to_dict()
    if not args.certificate:
        data.pop("certificate")
    elif v.certificate is not None:
        data["certificate"]["module"] = _module_dict(v.presentation)
    _emit(args, data, _verdict_lines(v, args.certificate))
    return _verdict_code(v)


def cmd_torsion(args) -> int:
    problem = _load(args.file).problem()
    limits = _limits(args).started()
    if problem.n == 0:
        _emit(args, {"power": args.power, "torsion": [], "torsion_free": True},
              ["torsion-free (no base variables)"])
        return EXIT_OK
    with collect_stats() as stats:
        P = problem.power(args.power)
        tor = torsion_submodule(P, limits)
        cert = make_certificate(P, tor.generators[0], limits) if tor.generators else None
    data = {"power": args.power, "torsion_free": tor.is_zero(),
            "torsion": [[str(p) for p in g] for g in tor.generators],
            "clearing_element": str(tor.clearing), "statistics": dict(sorted(stats.items())),
            "notice": tor.notice,
            "certificate": cert.to_dict() if cert else None}
    lines = [f"power {args.power}: " + ("torsion-free" if tor.is_zero()
                                         else f"{len(tor.generators)} torsion generator(s)")]
    lines += [f"  {g}" for g in tor.generators]
    if tor.notice:
        lines.append(f"notice: {tor.notice}")
    if cert:
        lines.append(f"certificate: m = {cert.element}, r = {cert.annihilator}")
    _emit(args, data, lines)
    return EXIT_OK if tor.is_zero() else EXIT_NOTFLAT


def cmd_first_torsion(args) -> int:
    problem = _load(args.file).problem()
    k = first_torsion_power(problem, _limits(args))
    data = {"first_torsion_power": k, "base_dimension": problem.n}
    text = "none (flat)" if k is None else str(k)
    _emit(args, data, [f"first torsion power: {text}"])
    return EXIT_OK if k is None else EXIT_NOTFLAT


def _point(pf: ProblemFile, label: str):
    if label in pf.points:
        return pf.points[label]
    try:
        coords = tuple(rational(c.strip()) for c in label.split(","))
    except (ValueError, ZeroDivisionError):
        raise _Exit(EXIT_INPUT, f"unknown point {label!r}; defined: {sorted(pf.points)}")
    if len(coords) != len(pf.base):
        raise _Exit(EXIT_INPUT, f"point {label!r} needs {len(pf.base)} coordinates")
    return coords


def cmd_fibredim(args) -> int:
    pf = _load(args.file)
    rep = fibre_report(pf.problem(), _point(pf, args.point), _limits(args))
    data = rep.to_dict()
    data["name"] = args.point
    image = ", ".join(str(p) for p in rep.image_closure) or "0"
    _emit(args, data, [f"fibre dimension over {args.point}: {rep.fibre_dimension_at_point}",
                       f"generic fibre dimension: {rep.generic_fibre_dimension}",
                       f"image closure: ({image})", f"dominant: {str(rep.dominant).lower()}"])
    return EXIT_OK


def cmd_image(args) -> int:
    image = image_closure(_load(args.file).problem(), _limits(args))
    text = ", ".join(str(p) for p in image) or "0"
    _emit(args, {"image_closure": [str(p) for p in image], "dominant": not image},
          [f"image closure: ({text})"])
    return EXIT_OK


def cmd_gb(args) -> int:
    P = _load(args.file).problem().presentation()
    ring = P.ring
    if args.order == "grevlex":
        order = MonomialOrder.grevlex(ring.ngens)
    elif args.order == "lex":
        order = MonomialOrder.lex(ring.ngens)
    else:
        order = P.tower.torsion_order()
    if not P.relations:
        gens = []
    else:
        G = buchberger(P.relations, order, _limits(args), ring=ring, rank=P.rank)
        gens = [str(g) for g in G.elements]
    _emit(args, {"order": args.order, "rank": P.rank, "basis": gens}, gens or ["0"])
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = _load(args.file).problem()
    k = args.power if args.power is not None else max(problem.n, 1)
    P = problem.power(k)
    if args.multiplier_degree is None:
        bounds = SearchBounds.recommended(P, args.degree)
    else:
        bounds = SearchBounds(args.degree, args.multiplier_degree)
    if args.timeout:
        bounds = SearchBounds(bounds.witness_degree, bounds.multiplier_degree, args.timeout)
    try:
        w = brute_torsion_search(P, bounds)
    except BudgetExceeded as exc:
        raise _Exit(EXIT_RESOURCE, str(exc))
    data = {"power": k, "bounds": [bounds.witness_degree, bounds.multiplier_degree],
            "witness": None}
    if w is None:
        _emit(args, data, [f"no witness <= bounds (D={bounds.witness_degree}, "
                           f"E={bounds.multiplier_degree})"])
        return EXIT_OK
    cert = witness_certificate(P, w)
    data["witness"] = cert.to_dict()
    data["witness"]["combination"] = [[str(c), str(u), j] for c, u, j in w.combination]
    _emit(args, data, [f"witness: m = {w.element}, r = {w.annihilator}"]
          + [f"  check: {t}" for t in cert.verification_trace])
    return EXIT_NOTFLAT


def cmd_corpus(args) -> int:
    try:
        corpus = load_corpus(args.directory)
    except ProblemError as exc:
        raise _Exit(EXIT_INPUT, str(exc))
    except ValueError as exc:
        raise _Exit(EXIT_INPUT, str(exc))
    report = cross_validate(corpus, _limits(args), jobs=args.jobs)
    lines = []
    for e in report.entries:
        mark = "agree" if e.agree else "MISMATCH"
        lines.append(f"{e.name}: {mark} (expected {e.expected}, engine {e.engine}, "
                     f"oracle {e.oracle}, D={e.bounds[0]}, E={e.bounds[1]})")
        if not e.agree or args.verbose:
            lines += [f"  {d}" for d in e.detail]
    lines.append("all agree" if report.all_agree else f"{len(report.mismatches)} mismatch(es)")
    _emit(args, report.to_dict(), lines)
    return EXIT_OK if report.all_agree else EXIT_CERTIFICATE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-degree", type=int, default=None)
    common.add_argument("--max-basis", type=int, default=None)
    common.add_argument("--timeout", type=float, default=None,
                        help="wall-clock budget in seconds (fallback: FLATKIT_TIMEOUT)")
    parser = argparse.ArgumentParser(
        prog="flatkit",
        description="Decide flatness of modules over QQ[y1..yn] via torsion in tensor powers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flatcheck", parents=[common], help="flat or not flat")
    p.add_argument("file")
    p.add_argument("--power", type=int, default=None, help="tensor power (default n)")
    p.add_argument("--at-origin", action="store_true", help="localise at the origin")
    p.add_argument("--certificate", action="store_true", help="print the torsion certificate")
    p.set_defaults(run=cmd_flatcheck)

    p = sub.add_parser("torsion", parents=[common], help="torsion of the k-th tensor power")
    p.add_argument("file")
    p.add_argument("--power", type=int, required=True)
    p.set_defaults(run=cmd_torsion)

    p = sub.add_parser("first-torsion-power", parents=[common],
                       help="smallest k <= n with torsion in the k-th power")
    p.add_argument("file")
    p.set_defaults(run=cmd_first_torsion)

    p = sub.add_parser("fibredim", parents=[common], help="fibre dimension over a point",
                       description="Fibre dimension over a named point (or comma-separated "
                       "coordinates). Only point queries are supported: the stratification "
                       "of the base by fibre dimension of the fibred powers is not computed.")
    p.add_argument("file")
    p.add_argument("--point", required=True)
    p.set_defaults(run=cmd_fibredim)

    p = sub.add_parser("image", parents=[common], help="closure of the image in the base")
    p.add_argument("file")
    p.set_defaults(run=cmd_image)

    p = sub.add_parser("gb", parents=[common], help="Gröbner basis of the presentation")
    p.add_argument("file")
    p.add_argument("--order", choices=("grevlex", "lex", "block"), default="grevlex")
    p.set_defaults(run=cmd_gb)

    p = sub.add_parser("oracle", parents=[common], help="brute-force torsion witness search")
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True, help="witness degree bound D")
    p.add_argument("--multiplier-degree", type=int, default=None,
                   help="span degree bound E (default D + max relation degree)")
    p.add_argument("--power", type=int, default=None)
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("corpus", parents=[common], help="cross-validate engine and oracle")
    p.add_argument("directory", nargs="?", default=None,
                   help="directory of .prob files (default: the shipped corpus)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(run=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "power", None) is not None and args.power < 1:
        parser.error("--power must be at least 1")
    try:
        return args.run(args)
    except _Exit as exc:
        print(f"flatkit: {exc.message}", file=sys.stderr)
        return exc.code
    except ResourceExceeded as exc:
        print(f"flatkit: resource limit: {exc.reason}", file=sys.stderr)
        return EXIT_RESOURCE
    except CertificateFailure as exc:
        print(f"flatkit: certificate verification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except ValueError as exc:
        print(f"flatkit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
