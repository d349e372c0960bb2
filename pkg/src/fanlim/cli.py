"""Command-line interface.

Commands operate on fan, presheaf and map JSON files (see the shipped
schemas).  Twist vectors are comma-separated integers in the fan file's
ray order.  Windows are "auto" or per-coordinate ranges "lo:hi,lo:hi".
Exit codes: 0 success, 1 check verdict false, 2 input error,
3 window insufficient.
"""

import argparse
import os
import sys

from . import io as fio
from .colocal import (
    colocal_acyclicity_report,
    is_homotopy_sheaf,
    r_sigma,
    weak_generator_report,
)
from .errors import FanlimError, WindowInsufficient
from .monomial import is_acyclic_everywhere
from .presheaves import holim_graded, line_bundle

EXIT_OK = 0
EXIT_VERDICT_FALSE = 1
EXIT_INPUT_ERROR = 2
EXIT_WINDOW = 3


def parse_twist(text, fan):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(fan.rays):
        raise FanlimError(
            f"twist vector needs {len(fan.rays)} entries, got {len(parts)}")
    return tuple(int(p) for p in parts)


def parse_window(text, fan):
    if text == "auto":
        return "auto"
    box = []
    for part in text.split(","):
        lo, _, hi = part.partition(":")
        box.append((int(lo), int(hi)))
    if len(box) != fan.rank:
        raise FanlimError(
            f"window needs {fan.rank} coordinate ranges, got {len(box)}")
    return box


def emit(args, payload, tsv_text=None, compact=False):
    if args.format == "tsv":
        if tsv_text is None:
            raise FanlimError("this command has no TSV form")
        sys.stdout.write(tsv_text)
    elif compact:
        import json
        sys.stdout.write(json.dumps(payload, separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(fio.dumps_json(payload))


def cmd_fan_check(args):
    fan = fio.load_fan(args.fan)
    report = {
        "valid": True,
        "rank": fan.rank,
        "rays": len(fan.rays),
        "cones": len(fan.cones),
        "regular": fan.is_regular(),
        "complete": fan.is_complete(),
    }
    tsv = "".join(f"{k}\t{v}\n" for k, v in sorted(report.items()))
    emit(args, report, tsv)
    return EXIT_OK


def cmd_rsigma(args):
    fan = fio.load_fan(args.fan)
    vectors = [list(v) for v in r_sigma(fan)]
    emit(args, vectors, fio.rsigma_to_tsv(vectors))
    return EXIT_OK


def cmd_cohomology(args):
    fan = fio.load_fan(args.fan)
    k = parse_twist(args.bundle, fan)
    window = parse_window(args.window, fan)
    table = holim_graded(line_bundle(fan, k), window, jobs=args.jobs)
    emit(args, fio.table_to_json(table), fio.table_to_tsv(table))
    return EXIT_OK


def cmd_holim(args):
    presheaf = fio.load_presheaf(args.presheaf)
    window = parse_window(args.window, presheaf.fan)
    table = holim_graded(presheaf, window, jobs=args.jobs)
    emit(args, fio.table_to_json(table), fio.table_to_tsv(table))
    return EXIT_OK


def _defects_json(defects):
    return [[list(m), {str(d): v for d, v in sorted(h.items())}]
            for m, h in defects]


def cmd_sheaf_check(args):
    presheaf = fio.load_presheaf(args.presheaf)
    window = None
    if args.mode == "window":
        window = parse_window(args.window, presheaf.fan)
        if window == "auto":
            raise FanlimError("sheaf-check window mode needs an explicit box")
    verdict = is_homotopy_sheaf(presheaf, mode=args.mode, window=window)
    report = {
        "passed": verdict.passed,
        "mode": verdict.mode,
        "relations": [
            {"big": list(big), "small": list(small), "passed": ok,
             "defects": _defects_json(defects)}
            for (big, small), ok, defects in verdict.relations
        ],
    }
    lines = [f"passed\t{report['passed']}"]
    for rel in report["relations"]:
        lines.append(
            f"{','.join(map(str, rel['big']))}->"
            f"{','.join(map(str, rel['small']))}\t{rel['passed']}")
    emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK if verdict.passed else EXIT_VERDICT_FALSE


def cmd_colocal_check(args):
    presheaf = fio.load_presheaf(args.presheaf)
    fan = presheaf.fan
    generators = r_sigma(fan)
    window = None if args.window == "chambers" else parse_window(args.window,
                                                                 fan)
    checks = colocal_acyclicity_report(presheaf, generators, window)
    acyclic = all(chk["acyclic"] for chk in checks)
    report = {
        "r_sigma": [list(v) for v in generators],
        "acyclic": acyclic,
        "checks": checks,
        "window": ({"mode": "chambers"} if window is None
                   else {"mode": "box", "box": [list(b) for b in window]}),
    }
    if args.conewise:
        conewise = []
        for key in presheaf.poset.elements:
            ok, _ = is_acyclic_everywhere(presheaf.complexes[key])
            conewise.append({"cone": list(key), "acyclic": ok})
        report["conewise"] = conewise
    lines = [f"acyclic\t{acyclic}"]
    for chk in checks:
        lines.append(f"{','.join(map(str, chk['k']))}\t{chk['acyclic']}")
    emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK if acyclic else EXIT_VERDICT_FALSE


def cmd_generator_report(args):
    fmap = fio.load_map(args.map)
    generators = r_sigma(fmap.source.fan)
    rep = weak_generator_report(fmap, generators=generators)
    report = {
        "objectwise_qiso": rep["objectwise_qiso"],
        "colocal": rep["colocal"],
        "r_sigma": [list(v) for v in generators],
    }
    tsv = (f"objectwise_qiso\t{rep['objectwise_qiso']}\n"
           f"colocal\t{rep['colocal']}\n")
    emit(args, report, tsv)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fanlim",
        description="Exact hyper-derived inverse limits on regular fans.",
    )
    parser.add_argument("--format", choices=("json", "tsv"), default="json",
                        help="output format (default json)")
    parser.add_argument(
        "--jobs", type=int,
        default=int(os.environ.get("FANLIM_JOBS", "1")),
        help="worker processes for graded sweeps (env FANLIM_JOBS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fan-check", help="validate a fan file")
    p.add_argument("fan")
    p.set_defaults(func=cmd_fan_check)

    p = sub.add_parser("rsigma", help="the weak-generator twist vectors")
    p.add_argument("fan")
    p.set_defaults(func=cmd_rsigma)

    p = sub.add_parser("cohomology",
                       help="graded homotopy-limit table of a line bundle")
    p.add_argument("fan")
    p.add_argument("--bundle", required=True,
                   help="twist vector, comma-separated in ray order")
    p.add_argument("--window", default="auto",
                   help='"auto" or per-coordinate ranges lo:hi,lo:hi')
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("holim",
                       help="graded homotopy-limit table of a presheaf file")
    p.add_argument("presheaf")
    p.add_argument("--window", default="auto")
    p.set_defaults(func=cmd_holim)

    p = sub.add_parser("sheaf-check", help="homotopy-sheaf test")
    p.add_argument("presheaf")
    p.add_argument("--mode", choices=("chambers", "window"),
                   default="chambers")
    p.add_argument("--window", default="auto")
    p.set_defaults(func=cmd_sheaf_check)

    p = sub.add_parser("colocal-check",
                       help="generator-twisted acyclicity of a presheaf")
    p.add_argument("presheaf")
    p.add_argument("--window", default="chambers",
                   help='"chambers" (exact), "auto", or a box lo:hi,...')
    p.add_argument("--conewise", action="store_true",
                   help="also report per-cone acyclicity (exploratory)")
    p.set_defaults(func=cmd_colocal_check)

    p = sub.add_parser("generator-report",
                       help="objectwise and colocal verdicts for a map of "
                            "homotopy sheaves")
    p.add_argument("map")
    p.set_defaults(func=cmd_generator_report)
    return parser


def _fold_value_flags(argv):
    """Join '--bundle -1,-1' into '--bundle=-1,-1' so negative twist
    entries are not mistaken for options."""
    out = []
    i = 0
    folding = {"--bundle", "--window", "--jobs", "--format", "--mode"}
    while i < len(argv):
        arg = argv[i]
        if arg in folding and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_fold_value_flags(list(argv)))
    try:
        return args.func(args)
    except WindowInsufficient as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except (FanlimError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
