"""Command-line entry point: ``infconv {transform, verify, list}``.

Exit codes: 0 all pass, 1 a check failed, 2 usage or config error,
3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import os
import re
import sys

from . import _backend
from .errors import GridInvariantError, UsageError
from .families import BUILTINS, parse_family
from .grid import GridSpec, default_grid, dumps_grid, load_grid, make_grid, sample
from .report import fmt_float

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_grid_arg(text: str) -> GridSpec:
    """``d1-default`` / ``d2-default`` / ``d3-default`` or ``d=2,L=4,n=81``."""
    m = re.fullmatch(r"d([123])-default", text.strip())
    if m:
        return default_grid(int(m.group(1)))
    fields = {}
    for item in text.split(","):
        k, eq, v = item.partition("=")
        if not eq:
            raise UsageError(f"bad grid {text!r}; use dN-default or d=N,L=..,n=..")
        fields[k.strip()] = v.strip()
    try:
        return make_grid(int(fields["d"]), float(fields["L"]), int(fields["n"]))
    except KeyError as exc:
        raise UsageError(f"grid {text!r} lacks {exc.args[0]!r}") from None
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    except GridInvariantError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="infconv", description="Infimum-convolution transforms and inequality checks.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    t = sub.add_parser("transform", help="apply a transform to a sampled function")
    t.add_argument("kind", choices=["moreau", "legendre", "polar", "symmetrize"])
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", help="family spec, e.g. quadratic:a=1")
    src.add_argument("--input", help="grid function JSON file")
    t.add_argument("--grid", default=None, help="dN-default or d=N,L=..,n=.. (with --family)")
    t.add_argument("--t", type=float, default=None, help="cost scale for moreau (required)")
    t.add_argument("--block", type=int, choices=[1, 2], default=None,
                   help="symmetrize one block of the product split (last axis is block 2)")
    t.add_argument("--backend", choices=sorted(_backend.BACKENDS), default=None)
    t.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("config", nargs="?", default=None, help="suite JSON (default: bundled suite)")
    v.add_argument("--out", required=True, help="directory for report.json / report.csv")
    v.add_argument("--backend", choices=sorted(_backend.BACKENDS), default=None)

    sub.add_parser("list", help="list families, inequality ids and kernel backends")
    return p


def cmd_transform(args) -> int:
    from . import transforms as T

    if args.input:
        if args.grid:
            raise UsageError("--grid applies to --family input only")
        f = load_grid(args.input)
    else:
        spec = parse_grid_arg(args.grid or "d1-default")
        f = sample(parse_family(args.family), spec)
    if args.kind == "moreau":
        if args.t is None:
            raise UsageError("moreau needs --t")
        out = T.moreau(f, args.t, args.backend)
    elif args.t is not None:
        raise UsageError(f"--t does not apply to {args.kind}")
    elif args.kind == "legendre":
        out = T.legendre(f, backend=args.backend)
    elif args.kind == "polar":
        out = T.polar(f, backend=args.backend)
    elif args.block is not None:
        out = T.symmetrize_partial(f, args.block, backend=args.backend)
    else:
        out = T.symmetrize(f, args.backend)
    with open(args.output, "w") as fh:
        fh.write(dumps_grid(out))
    return EXIT_OK


def _summary(reports) -> str:
    width = max([len(r.check_id) for r in reports] + [2])
    lines = [f"{'id':<{width}}  {'margin':>24}  pass"]
    for r in reports:
        lines.append(f"{r.check_id:<{width}}  {fmt_float(r.margin):>24}  {'PASS' if r.passed else 'FAIL'}")
    n_pass = sum(r.passed for r in reports)
    lines.append(f"{n_pass}/{len(reports)} checks passed")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    from . import suite

    cfg = suite.load_config(args.config) if args.config else suite.default_config()
    reports = suite.run_suite(cfg, backend=args.backend)
    os.makedirs(args.out, exist_ok=True)
    for name, text in (("report.json", suite.reports_json(reports)),
                       ("report.csv", suite.reports_csv(reports)),
                       ("scaling.csv", suite.scaling_csv(reports))):
        with open(os.path.join(args.out, name), "w") as fh:
            fh.write(text)
    print(_summary(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_list(_args) -> int:
    from .verify import MODES

    print("families:")
    for name, (_ctor, parity, desc) in BUILTINS.items():
        print(f"  {name:<18} {parity:<6} {desc}")
    print("inequality_ids:")
    for m in MODES:
        print(f"  {m}")
    print("backends: " + ", ".join(sorted(_backend.BACKENDS)) + f" (active: {_backend.NAME})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handler = {"transform": cmd_transform, "verify": cmd_verify, "list": cmd_list}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"infconv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GridInvariantError as exc:
        print(f"infconv: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"infconv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
