"""Command-line interface: enumeration, power operations, verification.

Exit codes: 0 success; 1 failed verification property; 2 invalid spec or
parse error; 3 size-cap violation; 4 level mismatch; 5 section out of
range.  JSON output is canonical (sorted keys, fixed separators) so equal
configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .classfn import (
    ClassFunction,
    c0_coordinate,
    c0_delta,
    c0_one,
    constant_value,
    from_json_dict,
    power_op,
    to_json_dict,
    total_power_op,
)
from .errors import (
    CharpowError,
    GroupTooLargeError,
    LevelMismatchError,
    SectionOutOfRangeError,
)
from .groups import (
    build_group,
    enumerate_hom_classes,
    wreath_class_to_decorated,
    wreath_group,
    product_group,
    symmetric_group,
)
from .isogeny import canonical_section, random_section
from .torsion import enumerate_subgroups, enumerate_sums
from .verify import VerifyConfig, run_suites

EXIT_VERIFY_FAILED = 1
EXIT_BAD_SPEC = 2
EXIT_TOO_LARGE = 3
EXIT_LEVEL_MISMATCH = 4
EXIT_SECTION_RANGE = 5


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header_record, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header_record)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _matrix_cell(matrix) -> str:
    return ";".join(" ".join(str(x) for x in row) for row in matrix)


def _required_bound(p: int, m: int) -> int:
    e, q = 0, 1
    while q * p <= m:
        q *= p
        e += 1
    return e


def _make_section(args, bound: int):
    spec = args.section
    if spec == "canonical":
        return canonical_section(args.p, args.n, bound)
    if spec == "seeded":
        return random_section(args.p, args.n, bound, args.seed)
    if spec.startswith("seeded:"):
        return random_section(args.p, args.n, bound, int(spec.split(":", 1)[1]))
    raise ValueError(f"bad section spec {spec!r}")


def _check_session_level(group, p: int, level: int):
    needed = group.exponent_valuation(p)
    if level < needed:
        raise LevelMismatchError(
            f"group {group.name} requires level N >= {needed} at p = {p}; "
            f"got N = {level}"
        )


def cmd_enumerate(args) -> int:
    if args.kind == "subgroups":
        subs = enumerate_subgroups(args.p, args.n, args.k)
        items = [{"matrix": [list(r) for r in h.matrix], "order": h.order}
                 for h in subs]
        rows = [(i, h.order, _matrix_cell(h.matrix)) for i, h in enumerate(subs)]
        header = ("index", "order", "matrix")
        payload = {"kind": "subgroups", "p": args.p, "n": args.n, "k": args.k,
                   "count": len(items), "items": items}
    elif args.kind == "sums":
        sums = enumerate_sums(args.p, args.n, args.m)
        items = [
            {"total": s.total,
             "summands": [[list(r) for r in h.matrix] for h in s.summands]}
            for s in sums
        ]
        rows = [
            (i, s.total, "|".join(_matrix_cell(h.matrix) for h in s.summands))
            for i, s in enumerate(sums)
        ]
        header = ("index", "total", "summands")
        payload = {"kind": "sums", "p": args.p, "n": args.n, "m": args.m,
                   "count": len(items), "items": items}
    elif args.kind == "hom-classes":
        group = build_group(args.group)
        classes = enumerate_hom_classes(group, args.n, args.p)
        items = [
            {"rep": list(c.rep),
             "elements": [str(group.elements[i]) for i in c.rep]}
            for c in classes
        ]
        rows = [(i, " ".join(map(str, c.rep))) for i, c in enumerate(classes)]
        header = ("index", "rep")
        payload = {"kind": "hom-classes", "group": group.name, "p": args.p,
                   "n": args.n, "count": len(items), "items": items}
    elif args.kind == "wreath-classes":
        base = build_group(args.group)
        group = wreath_group(base, args.m)
        classes = enumerate_hom_classes(group, args.n, args.p)
        items = []
        for c in classes:
            dec = wreath_class_to_decorated(c)
            items.append(
                {
                    "rep": list(c.rep),
                    "decorated": [
                        {"subgroup": [list(r) for r in h.matrix],
                         "class": list(a.rep)}
                        for h, a in dec.summands
                    ],
                }
            )
        rows = [(i, " ".join(map(str, c.rep))) for i, c in enumerate(classes)]
        header = ("index", "rep")
        payload = {"kind": "wreath-classes", "group": group.name, "p": args.p,
                   "n": args.n, "m": args.m, "count": len(items), "items": items}
    else:
        raise ValueError(f"unknown kind {args.kind!r}")
    if args.format == "json":
        _emit(_canonical_json(payload), args.out)
    else:
        rows = [("count", len(payload["items"]), *[""] * (len(header) - 2))] + rows
        _emit(_csv_text(header, rows), args.out)
    return 0


def _builtin_generator(name: str, group, p, n, level) -> ClassFunction:
    if name == "one":
        return constant_value(group, p, n, level, c0_one(p, n, level))
    if name == "coord":
        return constant_value(group, p, n, level, c0_coordinate(p, n, level))
    if name.startswith("delta:"):
        return constant_value(
            group, p, n, level, c0_delta(p, n, level, int(name.split(":", 1)[1]))
        )
    raise ValueError(f"unknown generator {name!r}")


def cmd_powerop(args) -> int:
    if args.input:
        with open(args.input, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        f = from_json_dict(data)
        group = f.group
        if (f.p, f.n, f.level) != (args.p, args.n, args.level):
            raise LevelMismatchError(
                "input class function does not match --p/--n/--level"
            )
    else:
        group = build_group(args.group)
        f = _builtin_generator(args.generator, group, args.p, args.n, args.level)
    target = (
        wreath_group(group, args.m)
        if args.total
        else product_group(group, symmetric_group(args.m))
    )
    _check_session_level(target, args.p, args.level)
    section = _make_section(args, _required_bound(args.p, args.m))
    result = (
        total_power_op(f, args.m, section)
        if args.total
        else power_op(f, args.m, section)
    )
    _emit(_canonical_json(to_json_dict(result)), args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = VerifyConfig(
        p=args.p,
        n=args.n,
        level=args.level,
        max_m=args.max_m,
        seeds=(args.seed + 1, args.seed + 2),
    )
    results = run_suites([args.suite], cfg)
    failures = 0
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        failures += 0 if r.ok else 1
        detail = f"  [{r.detail}]" if r.detail else ""
        lines.append(f"[{status}] {r.suite}/{r.name} {r.params}{detail}")
    lines.append(
        f"{len(results) - failures}/{len(results)} properties passed"
    )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_VERIFY_FAILED if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charpow",
        description="Exact workbench for class functions, isogenies of the "
        "p-divisible torus, and power operations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--p", type=int, default=2, help="prime")
        p.add_argument("--n", type=int, default=2, help="rank of the torus")
        p.add_argument("--level", type=int, default=2, help="working level N")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    enum = sub.add_parser("enumerate", help="canonical listings with counts")
    common(enum)
    enum.add_argument(
        "--kind",
        required=True,
        choices=("subgroups", "sums", "hom-classes", "wreath-classes"),
    )
    enum.add_argument("--k", type=int, default=1, help="order exponent (subgroups)")
    enum.add_argument("--m", type=int, default=2)
    enum.add_argument("--group", default="S1", help="group spec, e.g. S3, C2xC4, wr(S2,2)")
    enum.set_defaults(func=cmd_enumerate)

    pw = sub.add_parser("powerop", help="apply a power operation to a class function")
    common(pw)
    pw.add_argument("--m", type=int, required=True)
    pw.add_argument("--group", default="S1")
    pw.add_argument("--section", default="canonical",
                    help="canonical | seeded:<u64>")
    pw.add_argument("--seed", type=int, default=0, help="seed for --section seeded")
    pw.add_argument("--input", default=None, help="class function JSON file")
    pw.add_argument("--generator", default="one",
                    help="built-in input: one | coord | delta:<index>")
    pw.add_argument("--total", action="store_true",
                    help="total power operation (into the wreath product)")
    pw.set_defaults(func=cmd_powerop)

    ver = sub.add_parser("verify", help="run property suites")
    common(ver)
    ver.add_argument(
        "--suite",
        default="all",
        choices=("all", "bijections", "transfers", "powerops", "invariance",
                 "stabilizer", "fgl"),
    )
    ver.add_argument("--max-m", type=int, default=4, dest="max_m")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_SPEC if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except GroupTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except LevelMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEVEL_MISMATCH
    except SectionOutOfRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SECTION_RANGE
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    except CharpowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC


if __name__ == "__main__":
    sys.exit(main())
