"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
3 configuration error (a bad modulus).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .baselocus import HypothesisViolation, verify_base_locus, verify_shifted_base_locus
from .cohomo import UnsupportedTwist, regions, verify_h1_structure
from .degrees import Box
from .exactla import DEFAULT_PRIME, check_modulus
from .kerbundle import verify_cotangent_points, verify_cotangent_thresholds
from .mingen import (UnsupportedSpace, generator_table, verify_mixed_cokernel, verify_p1_cokernel,
                     verify_plane_surjectivity, verify_stabilization)
from .ring import Space
from .scheme import SchemeFormatError, ZeroScheme, random_general

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CONFIG = 0, 1, 2, 3

VERIFIERS = ("bb1", "p2p1", "bg2", "ee2", "pbg1", "f3", "f4", "prop0bg1", "stabilization")


class UsageError(Exception):
    pass


def int_list(text: str) -> tuple[int, ...]:
    """Parse '1,2,3' (an empty string gives the empty tuple)."""
    if text.strip() == "":
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--modulus", type=int, default=DEFAULT_PRIME, help="prime field size")
    common.add_argument("--seed", type=int, default=0, help="base random seed")
    common.add_argument("--seeds", type=int, default=20, help="number of random trials")
    common.add_argument("--threshold", type=float, default=19 / 20, help="required pass rate")
    common.add_argument("--box", type=int_list, help="upper corner a1,...,ak of the degree box")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")

    scheme_args = argparse.ArgumentParser(add_help=False)
    scheme_args.add_argument("--scheme", type=Path, help="scheme JSON file")
    scheme_args.add_argument("--space", type=int_list, help="factor dimensions n1,...,nk")
    scheme_args.add_argument("--s", type=int, default=0, help="number of random components")
    scheme_args.add_argument("--kind", default="reduced", choices=("reduced", "tangent", "double", "mixed"))

    parser = argparse.ArgumentParser(prog="multiproj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("regions", parents=[common, scheme_args], help="h0/h1 table over a box")
    sub.add_parser("generators", parents=[common, scheme_args], help="minimal generators per degree")

    v = sub.add_parser("verify", parents=[common], help="run a randomized verification campaign")
    v.add_argument("which", help="one of: " + ", ".join(VERIFIERS))
    v.add_argument("--space", type=int_list, help="factor dimensions (outer factors for bg2/pbg1)")
    v.add_argument("--k", type=int, default=2, help="number of P^1 factors")
    v.add_argument("--z", type=int, default=3, help="number of general points")
    v.add_argument("--s", type=int, help="number of general points")
    v.add_argument("--a", type=int_list, help="multidegree (outer twist for bg2/pbg1)")
    v.add_argument("--i", type=int, default=0, help="factor index")
    v.add_argument("--t", type=int, default=0, help="P^2 twist")
    v.add_argument("--x", type=int_list, default=(2, 3, 4), help="cotangent twists")
    v.add_argument("--alpha", type=int, help="h0 of the outer line bundle, realised on P^(alpha-1)")
    v.add_argument("--probes", type=int, default=1000, help="uniform probes per instance")
    v.add_argument("--instances", type=int, help="corpus size for prop0bg1/stabilization")
    return parser


def load_scheme(args, p: int) -> ZeroScheme:
    if args.scheme is not None:
        try:
            text = args.scheme.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read scheme file: {exc}") from None
        return ZeroScheme.from_json(text, p)
    if args.space is None:
        raise UsageError("give --scheme FILE or --space n1,...,nk")
    if not args.space or any(n < 1 for n in args.space):
        raise UsageError("--space needs positive dimensions")
    if args.s < 0:
        raise UsageError("--s must be nonnegative")
    return random_general(Space(args.space), args.s, args.kind, args.seed, p)


def make_box(args, k: int) -> Box | None:
    if args.box is None:
        return None
    if len(args.box) != k or any(u < 0 for u in args.box):
        raise UsageError(f"--box needs {k} nonnegative entries")
    return Box(args.box)


def cmd_regions(args, p: int) -> tuple[str, int]:
    Z = load_scheme(args, p)
    box = make_box(args, Z.space.k)
    if box is None:
        # minimal degrees of I0 can sit at a_i = deg(Z), one past where h1 dies
        box = Box.for_degree(Z.space.k, Z.degree).widened(1)
    table = regions(Z, box)
    if args.format == "csv":
        return table.to_csv(), EXIT_PASS
    if args.format == "text":
        head = (f"space {list(Z.space.dims)}  deg {Z.degree}  box {list(table.box.upper)}\n"
                f"minimal I0: {[list(a) for a in table.minimal_I0]}\n"
                f"maximal rank: {table.maximal_rank}\n")
        if Z.space.k == 2:
            return head + table.grid() + "\n", EXIT_PASS
        return head + table.to_csv(), EXIT_PASS
    return table.to_json() + "\n", EXIT_PASS


def cmd_generators(args, p: int) -> tuple[str, int]:
    Z = load_scheme(args, p)
    gt = generator_table(Z, make_box(args, Z.space.k))
    if args.format == "csv":
        lines = ["a,h0,image,gens"]
        for a, (h0, im, g) in sorted(gt.records.items()):
            lines.append(f"\"{','.join(map(str, a))}\",{h0},{'' if im is None else im},{'' if g is None else g}")
        return "\n".join(lines) + "\n", EXIT_PASS
    if args.format == "text":
        lines = [f"{list(a)}: {g}" for a, g in gt.nonzero.items()]
        lines.append(f"total: {gt.total}")
        return "\n".join(lines) + "\n", EXIT_PASS
    return json.dumps(gt.to_dict(), sort_keys=True, indent=2) + "\n", EXIT_PASS


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"this verifier needs {flag}")
    return value


def run_verifier(args, p: int):
    which = args.which
    common = {"seeds": args.seeds, "base_seed": args.seed, "threshold": args.threshold, "p": p}
    if which == "bb1":
        return verify_p1_cokernel(args.k, args.z, make_box(args, args.k), **common)
    if which == "p2p1":
        space = _need(args.space, "--space")
        return verify_mixed_cokernel(space, args.z, make_box(args, len(space)), **common)
    if which == "bg2":
        if args.alpha is not None:
            if args.alpha < 1:
                raise UsageError("--alpha must be positive")
            outer_dims, outer = ((), ()) if args.alpha == 1 else ((args.alpha - 1,), (1,))
        else:
            outer_dims, outer = args.space or (), args.a or ()
        return verify_cotangent_points(outer_dims, outer, args.x, **common)
    if which == "ee2":
        return verify_cotangent_thresholds(_need(args.space, "--space"), args.i, _need(args.a, "--a"),
                                           **common)
    if which == "pbg1":
        return verify_plane_surjectivity(args.space or (), args.a or (), args.t, _need(args.s, "--s"),
                                         **common)
    if which == "f3":
        return verify_base_locus(_need(args.space, "--space"), _need(args.s, "--s"),
                                 _need(args.a, "--a"), probes=args.probes, **common)
    if which == "f4":
        return verify_shifted_base_locus(_need(args.space, "--space"), _need(args.s, "--s"),
                                         _need(args.a, "--a"), args.i, probes=args.probes, **common)
    if which == "prop0bg1":
        return verify_h1_structure(args.instances or 1000, args.seed, p=p)
    if which == "stabilization":
        return verify_stabilization(args.instances or 200, args.seed, p=p)
    raise UsageError(f"unknown verifier {which!r}; choose from {', '.join(VERIFIERS)}")


def cmd_verify(args, p: int) -> tuple[str, int]:
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    report = run_verifier(args, p)
    code = EXIT_PASS if report.ok else EXIT_FAIL
    if args.format == "text":
        lines = [f"{report.name}: {'PASS' if report.ok else 'FAIL'} "
                 f"(pass rate {report.pass_rate:.3f}, threshold {report.threshold:.3f})"]
        lines += [json.dumps(f, sort_keys=True) for f in report.failures]
        return "\n".join(lines) + "\n", code
    if args.format == "csv":
        lines = ["seed_index,pass"] + [f"{j},{int(ok)}" for j, ok in enumerate(report.seed_pass)]
        return "\n".join(lines) + "\n", code
    return report.to_json() + "\n", code


COMMANDS = {"regions": cmd_regions, "generators": cmd_generators, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        p = check_modulus(args.modulus)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, code = COMMANDS[args.command](args, p)
    except SchemeFormatError as exc:
        print(f"error: invalid scheme: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, HypothesisViolation, UnsupportedSpace, UnsupportedTwist, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
