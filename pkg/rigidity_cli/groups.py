from argparse import Namespace

from rigidity.config import Settings
from rigidity.permgroup import (
    OrbitAction,
    is_relation_group,
    orbit_closure,
    orbit_equivalent,
    orbit_transfer_check,
    orbits,
    regular_powerset_orbit,
)
from rigidity_cli.options import UsageError, parse_groups


def run_orbits(args: Namespace, settings: Settings) -> dict:
    (G,) = parse_groups(args, 1)
    if args.k < 0:
        raise UsageError("--k", f"arity must be non-negative, got {args.k}")
    return orbits(G, OrbitAction(args.on), args.k, settings.orbit_cap).to_json()


def _kmax(args: Namespace) -> int:
    if args.kmax < 1:
        raise UsageError("--kmax", f"must be positive, got {args.kmax}")
    return args.kmax


def run_orbit_eq(args: Namespace, settings: Settings) -> dict:
    G, H = parse_groups(args, 2)
    return orbit_equivalent(G, H, _kmax(args), settings.orbit_cap).to_json()


def run_closure(args: Namespace, settings: Settings) -> dict:
    (G,) = parse_groups(args, 1)
    closure = orbit_closure(G, settings.closure_degree_cap)
    return {
        "group": G.to_json() | {"order": G.order()},
        "closure": closure.to_json() | {"order": closure.order()},
        "orbitClosed": closure.order() == G.order(),
    }


def run_relgroup(args: Namespace, settings: Settings) -> dict:
    (G,) = parse_groups(args, 1)
    return is_relation_group(G, settings.relation_degree_cap, settings.relation_candidate_cap).to_json()


def run_regorbit(args: Namespace, settings: Settings) -> dict:
    (G,) = parse_groups(args, 1)
    orbit = regular_powerset_orbit(G, settings.powerset_degree_cap)
    return {"order": G.order(), "orbit": None if orbit is None else [list(a) for a in orbit]}


def run_transfer(args: Namespace, settings: Settings) -> dict:
    G, H = parse_groups(args, 2)
    try:
        return orbit_transfer_check(G, H, _kmax(args), settings.orbit_cap).to_json()
    except ValueError as error:
        raise UsageError("--group", str(error)) from None
