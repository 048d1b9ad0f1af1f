"""Command line: ``sheafpair validate | compute | prove | list``.

Results go to stdout as JSON (sorted keys, so identical input gives identical
bytes); diagnostics go to stderr. Exit status 0 means pass, 1 a mathematical
failure or operation error, 2 a usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import AlgebraError
from .ops import OPS, UsageError, run_op
from .rings import ring_from_name
from .suites import SUITES, run_suite
from .topology import catalog
from .workspace import WorkspaceError, read_workspace, validate_workspace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse already exits 2; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj, compact: bool) -> None:
    if compact:
        sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _parse_kv(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"arguments look like key=value, got {item!r}")
        out[key] = value
    return out


def cmd_validate(args) -> int:
    ws = read_workspace(args.file, args.ring)
    reports = validate_workspace(ws)
    ok = all(r.ok for r in reports.values())
    _emit({"ok": ok, "reports": {k: r.to_json() for k, r in reports.items()}}, args.json)
    for name, rep in reports.items():
        for v in rep.violations:
            print(f"{name}: {v.kind}: {v.message}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_compute(args) -> int:
    ws = read_workspace(args.file, args.ring)
    op = args.op
    kv = _parse_kv(args.args)
    if op is None:
        if not ws.reproduce:
            raise UsageError("no operation given and the file has no 'reproduce' entry")
        op = ws.reproduce.get("op")
        kv = {**ws.reproduce.get("args", {}), **kv}
    try:
        result = run_op(ws, op, kv)
    except AlgebraError as exc:
        _emit({"ok": False, "error": exc.code, "message": str(exc)}, args.json)
        print(f"{op}: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(result, args.json)
    return EXIT_FAIL if result.get("ok") is False else EXIT_OK


def cmd_prove(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: all, {', '.join(sorted(SUITES))}")
    if args.cases < 0 or args.max_rank < 1:
        raise UsageError("--cases must be >= 0 and --max-rank >= 1")
    ring = ring_from_name(args.ring) if args.ring else None
    reports = []
    for name in names:
        start = time.perf_counter()
        rep = run_suite(name, args.cases, args.seed, args.max_rank, ring, out_dir=args.out)
        elapsed = time.perf_counter() - start
        print(f"{name}: {len(rep.results) - len(rep.failures)}/{rep.cases} passed in {elapsed:.2f}s",
              file=sys.stderr)
        if args.cases == 0:
            print(f"{name}: warning: --cases 0, nothing was checked", file=sys.stderr)
        for f in rep.failures:
            print(f"{name}: case {f.index} {f.code}: {f.message}"
                  + (f" (reproducer {f.reproducer})" if f.reproducer else ""), file=sys.stderr)
        reports.append(rep)
    body = reports[0].to_json() if len(reports) == 1 else {
        "ok": all(r.ok for r in reports), "suites": [r.to_json() for r in reports]}
    _emit(body, args.json)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def cmd_list(args) -> int:
    _emit({"operations": sorted(OPS), "suites": sorted(SUITES),
           "spaces": {k: v.to_json() for k, v in catalog().items()}}, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="compact single-line JSON output")
    common.add_argument("--ring", choices=["qq", "zz", "QQ", "ZZ"], help="coefficient ring override")

    parser = _Parser(prog="sheafpair", description="Exact pairings of sheaf modules on finite spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="check a workspace file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compute", parents=[common], help="run one operation on a workspace")
    p.add_argument("file")
    p.add_argument("op", nargs="?", help="operation name (default: the file's 'reproduce' entry)")
    p.add_argument("args", nargs="*", help="key=value arguments")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("prove", parents=[common], help="run a randomized verification suite")
    p.add_argument("suite", help="suite name or 'all'")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rank", type=int, default=6)
    p.add_argument("--out", default="reproducers", help="directory for failing-case files")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("list", parents=[common], help="list operations, suites and catalog spaces")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WorkspaceError as exc:
        print(f"parse error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
