import argparse
import logging
from functools import wraps
from logging import getLogger
from pathlib import Path
import sys
from traceback import format_exc
from typing import Callable, Iterable

from dotenv import load_dotenv

from rigidity.config import Settings
from rigidity.errors import RigidityError
from rigidity.permgroup import OrbitAction
from rigidity.structures import canonical_json
from rigidity_cli.analyse import run_approx, run_aut, run_equiv0, run_even, run_indisc, run_maxgood
from rigidity_cli.construct import run_bounds, run_rigidify, run_sample, run_verify
from rigidity_cli.groups import (
    run_closure,
    run_orbit_eq,
    run_orbits,
    run_regorbit,
    run_relgroup,
    run_transfer,
)
from rigidity_cli.options import UsageError

LOGGER = getLogger("rigidity_cli.run")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

# flags echoed under "config" besides the resolved settings
ECHOED = (
    "verb", "kind", "oracle", "targets", "ledger", "mode", "group", "degree", "k", "on", "kmax", "threshold", "n", "input"
)


def setup_package_logging(
    package_names: Iterable[str] = ("rigidity", "rigidity_cli"),
    level: int = logging.DEBUG,
    root_level: int = logging.WARNING,  # Keep libraries quiet (INFO/DEBUG hidden)
    log_file: Path | str | None = None,
):
    formatter = logging.Formatter(
        "%(asctime)s: %(levelname)s: %(name)s: %(message)s",
        datefmt="%d/%m/%Y %H:%M:%S",
    )

    # stdout carries the JSON result, so logs go to stderr
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)

    file_handler = None
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, mode="a")
        file_handler.setFormatter(formatter)

    root = getLogger()
    root.setLevel(root_level)
    root.handlers.clear()
    root.addHandler(stream_handler)
    if file_handler is not None:
        root.addHandler(file_handler)

    for name in package_names:
        logger = getLogger(name)
        logger.setLevel(level)
        logger.handlers.clear()
        logger.propagate = False  # Prevent double-logging to root
        logger.addHandler(stream_handler)
        if file_handler is not None:
            logger.addHandler(file_handler)


def handle_errors(func: Callable[[argparse.Namespace], int]):
    """
    A decorator to turn exceptions raised by a command into exit codes.
    Domain errors are reported as JSON on stdout, usage errors name the flag.
    """

    @wraps(func)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            return func(args)
        except UsageError as error:
            print(f"rigidity {args.verb}: error: {error}", file=sys.stderr)
            return EXIT_USAGE
        except RigidityError as error:
            LOGGER.error(f"Command '{args.verb}' failed: {error}")
            print(canonical_json({"error": str(error), "type": type(error).__name__}))
            return EXIT_DOMAIN
        except ValueError as error:
            print(f"rigidity {args.verb}: error: {error}", file=sys.stderr)
            return EXIT_USAGE
        except Exception:
            LOGGER.error(f"An unexpected error occurred in command '{args.verb}': {format_exc()}")
            return EXIT_DOMAIN

    return wrapper


def _caps(parser: argparse.ArgumentParser):
    parser.add_argument("--budget", type=int, help="Scan budget for neighbourhood differences.")
    parser.add_argument("--probe", type=int, help="Probe depth for comparability estimates.")
    parser.add_argument("--search-cap", type=int, help="Largest structure the automorphism search accepts.")
    parser.add_argument("--node-budget", type=int, help="Search-tree nodes before giving up.")
    parser.add_argument("--orbit-cap", type=int, help="Largest orbit enumeration domain.")
    parser.add_argument("--attempts", type=int, help="Construction attempts before giving up.")


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("-v", "--verbose", action="count", default=0, help="INFO logs on stderr, DEBUG with -vv.")
    parser.add_argument("--log-file", help="Also append logs to this file.")
    parser.add_argument("--out", help="Write the JSON result here instead of stdout.")
    _caps(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rigidity",
        description="Rigidifying extensions, automorphisms and orbit-equivalence of permutation groups.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, command, summary: str) -> argparse.ArgumentParser:
        sub = verbs.add_parser(name, help=summary)
        sub.set_defaults(command=command)
        _common(sub)
        return sub

    sub = verb("sample", run_sample, "Finite structure induced by an oracle on given vertices.")
    sub.add_argument(
        "--oracle",
        required=True,
        help="kind[:seed], e.g. rado, generic:0, layered, local:3. "
        "The layered order is the transitive closure of the sampled comparisons.",
    )
    sub.add_argument("--targets", required=True, help="Comma-separated naturals.")

    sub = verb("rigidify", run_rigidify, "Build a finite extension in which the targets are fixed.")
    sub.add_argument("kind", choices=("tournament", "ordered-graph"))
    sub.add_argument("--oracle", required=True, help="kind[:seed], e.g. rado, generic:0, layered, local:3.")
    sub.add_argument("--targets", required=True, help="Comma-separated naturals.")
    sub.add_argument("--ledger", help="Also write the build ledger here, one JSON event per line.")

    sub = verb("verify", run_verify, "Check rigidity of a structure or report.")
    sub.add_argument("--in", dest="input", default="-", help="JSON file, '-' for stdin.")
    sub.add_argument("--mode", choices=("brute", "certificate"), default="brute")

    for name, command, summary in (
        ("aut", run_aut, "Automorphism group generators and order."),
        ("maxgood", run_maxgood, "Maximal good sets of a tournament."),
        ("approx", run_approx, "Classes of ≈_Y in a graph."),
        ("indisc", run_indisc, "Extract mutually indiscernible blocks."),
        ("equiv0", run_equiv0, "Classes of thresholded neighbourhood difference."),
        ("even", run_even, "Even-distance graph of a connected graph."),
    ):
        sub = verb(name, command, summary)
        sub.add_argument("--in", dest="input", default="-", help="JSON file, '-' for stdin.")
        if name == "approx":
            sub.add_argument("--targets", help="The set Y; all vertices when omitted.")
        if name == "equiv0":
            sub.add_argument("--threshold", type=int, required=True)

    for name, command, summary in (
        ("orbits", run_orbits, "Orbits on points, tuples, subsets or the power set."),
        ("orbit-eq", run_orbit_eq, "Compare subset and tuple orbits of two groups."),
        ("closure", run_closure, "Orbit closure of a group."),
        ("relgroup", run_relgroup, "Whether a group is a relation group."),
        ("regorbit", run_regorbit, "A regular orbit on the power set."),
        ("transfer", run_transfer, "Replay the local-rigidity transfer argument."),
    ):
        sub = verb(name, command, summary)
        sub.add_argument("--group", action="append", help="Generators in cycle notation; repeat for a second group.")
        sub.add_argument("--degree", type=int, help="Number of points; inferred from the generators when omitted.")
        if name == "orbits":
            sub.add_argument("--k", type=int, default=1)
            sub.add_argument("--on", choices=[a.value for a in OrbitAction], default=OrbitAction.points.value)
        if name in ("orbit-eq", "transfer"):
            sub.add_argument("--kmax", type=int, default=3)

    sub = verb("bounds", run_bounds, "Size bounds of both constructions.")
    sub.add_argument("n", type=int)
    return parser


def resolve_settings(args: argparse.Namespace) -> Settings:
    return Settings.from_env().updated(
        scan_budget=args.budget,
        probe=args.probe,
        search_cap=args.search_cap,
        node_budget=args.node_budget,
        orbit_cap=args.orbit_cap,
        attempts=args.attempts,
    )


@handle_errors
def run(args: argparse.Namespace) -> int:
    for flag in ("budget", "probe", "search_cap", "node_budget", "orbit_cap", "attempts"):
        value = getattr(args, flag)
        if value is not None and value <= 0:
            raise UsageError(f"--{flag.replace('_', '-')}", f"must be positive, got {value}")
    settings = resolve_settings(args)
    config = {key: value for key, value in vars(args).items() if key in ECHOED and value is not None}
    result = args.command(args, settings)
    text = canonical_json({"config": config | {"settings": settings.to_json()}, "result": result})
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        LOGGER.info(f"Wrote {args.verb} result to {out}")
    else:
        print(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    setup_package_logging(level=level, log_file=args.log_file)
    return run(args)


if __name__ == "__main__":
    raise SystemExit(main())
