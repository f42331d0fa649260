"""Command-line front end.

Exit codes: 0 verified, 1 not found or invalid, 2 usage error, 3 time budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import catalog, certfile, constructions, render
from .errors import BudgetExhausted, CertificateFormatError, MrcertError
from .rules import replay
from .search import SearchConfig, search_certificate
from .tables import (
    CaseParams,
    build_tensor_table,
    build_vanishing_table,
    erase,
    is_unimaginative,
    validate_sequence,
)

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
SWEEP_COLUMNS = ("g", "r", "d", "m", "N", "provenance", "status", "ms")


class UsageError(Exception):
    pass


def _int_list(text: str | None) -> list[int] | None:
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _int_range(text: str | None) -> range | None:
    """'3..6' -> 3,4,5,6; '5' -> 5."""
    if text is None:
        return None
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return range(int(lo), int(hi) + 1)
        v = int(text)
        return range(v, v + 1)
    except ValueError:
        raise UsageError(f"expected an integer or a range like 3..6, got {text!r}") from None


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- default inputs when no construction applies --------------------------------------------------


def default_sequence(g: int, r: int, d: int) -> tuple[int, ...]:
    """Nondecreasing blocks of the forced repetitions, then the 0..r cycle."""
    ell = max(r + g - d, 0)
    entries = [v for v in range(r + 1) for _ in range(ell)][:g]
    while len(entries) < g:
        entries.append((len(entries) - ell * (r + 1)) % (r + 1))
    return tuple(entries)


def default_twist(g: int, m: int, d: int) -> tuple[int, ...]:
    """Degree spread evenly over the components."""
    md = m * d
    return tuple((i - 1) * md // g for i in range(2, g + 1))


# -- certification dispatch -----------------------------------------------------------------------


def auto_certify(g: int, r: int, d: int, m: int, budget: float = 10.0, strict_vi: bool = True):
    """(certificate, provenance, status) with status in found / not_found / budget."""
    case = CaseParams(g, r, d, m)
    res = None
    if m == 2 and case.rho >= 0 and case.ell > 0:
        res = constructions.m2_certify(g, r, d)
    elif m == 3 and case.rho >= 0:
        res = _m3_construction(case)
    if res is None and case.rho >= 0 and g >= (r + 1) * ((m + 1) ** (r - 1) - r) and case.injective:
        res = constructions.big_g_inject(r, m, g, d)
    if res is not None:
        return res.certificate, res.provenance, "found"
    if case.rho < 0:
        raise UsageError(f"({g},{r},{d}) has negative Brill-Noether number")
    seq = validate_sequence(default_sequence(g, r, d), g, r, d)
    tt = build_tensor_table(build_vanishing_table(seq), m)
    mask = erase(tt, default_twist(g, m, d))
    result = search_certificate(tt, mask, case.n_target, SearchConfig(time_budget=budget, strict_vi=strict_vi))
    return result.certificate, "search", result.status


def _m3_construction(case: CaseParams):
    g, r, d = case.g, case.r, case.d
    if r in catalog.M3_BY_RANK:
        base = constructions.m3_catalog(r)
        if (g, d) == (base.case.g, base.case.d):
            return base
        if case.injective and g >= base.case.g and d >= base.case.d:
            try:
                return constructions.injective_extend(base, g, d)
            except MrcertError:
                pass
    if case.surjective:
        for case_id in ("i", "ii"):
            try:
                return constructions.surj_m3(g, r, d, case_id)
            except MrcertError:
                continue
    return None


# -- subcommands ----------------------------------------------------------------------------------


def cmd_table(args) -> int:
    _need(args, "g", "r", "d", "delta")
    delta = _int_list(args.delta)
    seq = validate_sequence(delta, args.g, args.r, args.d, args.shift)
    vt = build_vanishing_table(seq)
    if args.table == "vanishing":
        fmt = {"text": render.render_vanishing_text, "latex": render.render_vanishing_latex}
        if args.format == "csv":
            raise UsageError("the vanishing table has no CSV form; use text or latex")
        _emit(fmt[args.format](vt), args.out)
        return EXIT_OK
    tt = build_tensor_table(vt, args.m)
    mask = None
    if args.table == "erased":
        if args.w is None:
            raise UsageError("the erased table needs --w")
        mask = erase(tt, _int_list(args.w))
    renderer = {"text": render.render_text, "csv": render.render_csv, "latex": render.render_latex}[args.format]
    _emit(renderer(tt, mask, args.order), args.out)
    return EXIT_OK


def _summary(cert, provenance: str, path: str | None) -> str:
    ttable_steady = "yes" if replay(cert).steady else "no"
    uni = "yes" if is_unimaginative(cert.w, cert.case.m) else "no"
    c = cert.case
    line = (f"verified (g,r,d,m)=({c.g},{c.r},{c.d},{c.m}) N={cert.N} steady={ttable_steady} "
            f"unimaginative={uni} provenance={provenance}")
    return line + (f" file={path}" if path else "")


def cmd_certify(args) -> int:
    _need(args, "g", "r", "d")
    g, r, d, m = args.g, args.r, args.d, args.m
    case = CaseParams(g, r, d, m)
    try:
        if args.delta is None and args.w is None:
            cert, provenance, status = auto_certify(g, r, d, m, args.budget, args.strict_vi)
        else:
            _need(args, "delta", "w")
            seq = validate_sequence(_int_list(args.delta), g, r, d, args.shift)
            tt = build_tensor_table(build_vanishing_table(seq), m)
            mask = erase(tt, _int_list(args.w))
            result = search_certificate(tt, mask, case.n_target,
                                        SearchConfig(time_budget=args.budget, strict_vi=args.strict_vi))
            cert, provenance, status = result.certificate, "search", result.status
    except BudgetExhausted as exc:
        print(f"budget exhausted after {args.budget}s: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if cert is None:
        print(f"no certificate found for ({g},{r},{d},{m}) [{status}]")
        return EXIT_BUDGET if status == "budget" else EXIT_NOT_FOUND
    report = replay(cert, args.strict_vi)
    if not report.valid:
        print(f"internal error: produced certificate does not verify: {report.message}", file=sys.stderr)
        return EXIT_NOT_FOUND
    path = args.out or f"cert-{g}-{r}-{d}-{m}.json"
    certfile.save(cert, path)
    print(_summary(cert, provenance, path))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = certfile.load(args.path)
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from None
    except CertificateFormatError as exc:
        raise UsageError(f"malformed certificate: {exc}") from None
    try:
        report = replay(cert, args.strict_vi)
    except (MrcertError, ValueError) as exc:
        print(f"invalid: {exc}")
        return EXIT_NOT_FOUND
    if args.verbose:
        for outcome in report.trace:
            mark = "ok " if outcome.ok else "BAD"
            extra = "" if outcome.ok else f"  ({outcome.message})"
            print(f"{mark} {outcome.index + 1:4d}  {outcome.step.describe()}{extra}")
    if report.valid:
        print(f"valid N={report.N} steady={'yes' if report.steady else 'no'}")
        return EXIT_OK
    print(f"invalid: {report.message}")
    return EXIT_NOT_FOUND


def _sweep_cases(args):
    rs = _int_range(args.r)
    if rs is None:
        raise UsageError("sweep needs --r")
    cases = []
    for r in rs:
        if args.g is not None:
            gs = _int_range(args.g)
        else:
            gs = range(1, (args.g_max or 0) + 1)
        for g in gs:
            for d in range(1, r + g):
                try:
                    case = CaseParams(g, r, d, args.m)
                except ValueError:
                    continue
                if case.rho >= 0:
                    cases.append((g, r, d, args.m))
    return cases


def _sweep_one(job):
    (g, r, d, m), budget, strict_vi, out_dir = job
    start = time.perf_counter()
    try:
        cert, provenance, status = auto_certify(g, r, d, m, budget, strict_vi)
        if cert is not None:
            status = "verified" if replay(cert, strict_vi).valid else "invalid"
            if out_dir:
                certfile.save(cert, Path(out_dir) / f"cert-{g}-{r}-{d}-{m}.json")
        n = cert.N if cert is not None else ""
    except BudgetExhausted:
        provenance, status, n = "search", "budget", ""
    except (MrcertError, UsageError, ValueError) as exc:
        provenance, status, n = f"error: {exc}", "error", ""
    ms = round((time.perf_counter() - start) * 1000)
    return {"g": g, "r": r, "d": d, "m": m, "N": n, "provenance": provenance, "status": status, "ms": ms}


def cmd_sweep(args) -> int:
    cases = _sweep_cases(args)
    if args.cert_dir:
        Path(args.cert_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(c, args.budget, args.strict_vi, args.cert_dir) for c in cases]
    if args.parallel and args.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    if args.deterministic:
        for row in rows:
            row["ms"] = 0
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    passed = sum(row["status"] == "verified" for row in rows)
    print(f"# {passed}/{len(rows)} verified", file=sys.stderr)
    if any(row["status"] == "budget" for row in rows):
        return EXIT_BUDGET
    return EXIT_OK if passed == len(rows) else EXIT_NOT_FOUND


def cmd_catalog(args) -> int:
    names = [args.name] if args.name else list(catalog.EXAMPLES)
    for name in names:
        if name not in catalog.EXAMPLES:
            raise UsageError(f"unknown example {name!r}; known: {', '.join(catalog.EXAMPLES)}")
    if args.name and args.format == "json":
        _emit(certfile.dumps(catalog.example_certificate(catalog.EXAMPLES[args.name], args.strict_vi)), args.out)
        return EXIT_OK
    lines = []
    ok = True
    for name in names:
        ex = catalog.EXAMPLES[name]
        cert = catalog.example_certificate(ex, args.strict_vi)
        valid = replay(cert, args.strict_vi).valid
        ok &= valid
        lines.append(f"{name:16s} (g,r,d,m)=({ex.g},{ex.r},{ex.d},{ex.m}) N={cert.N} steps={len(cert.steps)} "
                     f"{'verified' if valid else 'INVALID'}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_NOT_FOUND


# -- argument parsing -----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, case_ints: bool = True) -> None:
    if case_ints:
        p.add_argument("--g", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--d", type=int)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--delta", help="comma-separated sequence entries")
    p.add_argument("--w", help="comma-separated twist vector c_2..c_g")
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--format", choices=("text", "csv", "latex"), default="text")
    p.add_argument("--out", help="output path (default: stdout, or a generated name for certificates)")
    p.add_argument("--budget", type=float, default=10.0, help="search time budget in seconds")
    p.add_argument("--strict-vi", action=argparse.BooleanOptionalAction, default=True,
                   help="require both Rule VI rows in both columns (default on)")
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=False,
                   help="suppress timings so output is byte-stable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrcert", description="Build tables and check row-dropping certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="render the vanishing, tensor or erased table")
    _common(p)
    p.add_argument("--table", choices=("vanishing", "tensor", "erased"), default="erased")
    p.add_argument("--order", choices=("graded", "lex"), default="graded")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("certify", help="produce and verify a certificate for one case")
    _common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="replay a certificate file")
    p.add_argument("path")
    p.add_argument("--verbose", "-v", action="store_true")
    p.add_argument("--strict-vi", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="certify every case in a range")
    _common(p, case_ints=False)
    p.add_argument("--r", help="rank or range, e.g. 3..6")
    p.add_argument("--g", help="genus or range, e.g. 7..12")
    p.add_argument("--g-max", type=int, help="sweep genera 1..G")
    p.add_argument("--parallel", type=int, default=0, help="worker processes")
    p.add_argument("--cert-dir", help="write one certificate file per case here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("catalog", help="list and verify the stored worked examples")
    p.add_argument("--name")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.add_argument("--strict-vi", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MrcertError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
