"""Command-line interface.

    measureiso dist --metric wp --p 2 a.json b.json
    measureiso transport a.json b.json --p 1 --emit-plan plan.json
    measureiso gen --space sphere --dim 3 --atoms 5 --seed 7 --out mu.json
    measureiso verify --suite oracle --seed 0 --trials 50

Exit codes: 0 success/pass, 1 verification failure, 2 usage or parse error,
3 domain error (space mismatch, support too large, wrong space).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import spaces as sp
from .errors import DomainError, MeasureIsoError, ValidationError
from .measures import load_measure, random_measure, save_measure
from .metrics import distance_by_name
from .suites import SUITES, run_suite
from .transport import transport

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
DIST_METRICS = ("wp", "tv", "ks", "levy", "kuiper", "lp")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error("USAGE", message)
        sys.exit(EXIT_USAGE)


def _emit_error(code, message):
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)


def _load_pair(a, b):
    mu, nu = load_measure(a), load_measure(b)
    if mu.space != nu.space:
        raise DomainError("SPACE_MISMATCH", f"{mu.space} vs {nu.space}")
    return mu, nu


def cmd_dist(args):
    mu, nu = _load_pair(args.a, args.b)
    value = distance_by_name(args.metric, mu, nu, args.p)
    out = {"metric": args.metric, "value": value}
    if args.metric == "wp":
        out["p"] = args.p
    print(json.dumps(out))
    return EXIT_PASS


def cmd_transport(args):
    mu, nu = _load_pair(args.a, args.b)
    res = transport(mu.space, mu, nu, args.p)
    text = json.dumps(res.to_json(args.p))
    if args.emit_plan:
        with open(args.emit_plan, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_PASS


def cmd_gen(args):
    s = sp.SpaceDescriptor(args.space, args.dim)
    if args.atoms < 1:
        raise ValidationError("BAD_ATOMS", "--atoms must be >= 1")
    if s.is_discrete and args.atoms > s.dim:
        raise ValidationError("BAD_ATOMS", f"discrete({s.dim}) has only {s.dim} points")
    m = random_measure(s, args.atoms, np.random.default_rng(args.seed))
    if args.out:
        save_measure(m, args.out)
    else:
        print(json.dumps(m.to_json(), sort_keys=True))
    return EXIT_PASS


def cmd_verify(args):
    report = run_suite(args.suite, args.seed, args.trials)
    print(report.dumps())
    return EXIT_PASS if report.passed else EXIT_FAIL


def build_parser():
    parser = _Parser(prog="measureiso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="distance between two measure files")
    d.add_argument("--metric", choices=DIST_METRICS, required=True)
    d.add_argument("--p", type=float, default=1.0)
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_dist)

    t = sub.add_parser("transport", help="optimal plan for the cost d^p")
    t.add_argument("--p", type=float, default=1.0)
    t.add_argument("--emit-plan", dest="emit_plan", default=None)
    t.add_argument("a")
    t.add_argument("b")
    t.set_defaults(func=cmd_transport)

    g = sub.add_parser("gen", help="write a seeded random measure")
    g.add_argument("--space", choices=sp.KINDS, required=True)
    g.add_argument("--dim", type=int, default=1)
    g.add_argument("--atoms", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run a seeded verification suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=None)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "p", 1.0) < 1:
        _emit_error("INVALID_P", f"p={args.p} (need p >= 1)")
        return EXIT_USAGE
    try:
        return args.func(args)
    except DomainError as exc:
        _emit_error(exc.code, str(exc))
        return EXIT_DOMAIN
    except (ValidationError, OSError) as exc:
        _emit_error(getattr(exc, "code", "IO_ERROR"), str(exc))
        return EXIT_USAGE
    except MeasureIsoError as exc:
        _emit_error(exc.code, str(exc))
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
