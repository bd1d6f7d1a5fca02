from argparse import Namespace

from rigidity.analysis import approx_classes, equiv0_classes, even_distance_graph, maximal_good_partition
from rigidity.autgroup import automorphisms, vertex_orbits
from rigidity.config import Settings
from rigidity.errors import KindMismatch
from rigidity.indiscernible import IndiscernibilityProblem, extract
from rigidity.structures import Graph, OrderedGraph, Tournament
from rigidity_cli.options import UsageError, parse_targets, read_structure


def _graph(args: Namespace) -> Graph | OrderedGraph:
    structure, _ = read_structure(args.input)
    if isinstance(structure, Tournament):
        raise KindMismatch(f"The {args.verb} command needs a graph, got a tournament")
    return structure


def run_aut(args: Namespace, settings: Settings) -> dict:
    structure, _ = read_structure(args.input)
    caps = {"search_cap": settings.search_cap, "node_budget": settings.node_budget}
    return automorphisms(structure, **caps).to_json() | {"orbits": vertex_orbits(structure, **caps).to_json()["blocks"]}


def run_maxgood(args: Namespace, settings: Settings) -> dict:
    structure, _ = read_structure(args.input)
    if not isinstance(structure, Tournament):
        raise KindMismatch("Maximal good sets are defined for tournaments")
    return maximal_good_partition(structure).to_json()


def run_approx(args: Namespace, settings: Settings) -> dict:
    g = _graph(args)
    Y = parse_targets(args.targets) if args.targets else range(g.n)
    return approx_classes(g, Y).to_json()


def run_indisc(args: Namespace, settings: Settings) -> dict:
    structure, payload = read_structure(args.input)
    if "Q" not in payload:
        raise UsageError("--in", "an indiscernibility problem needs Q and n next to the structure")
    return extract(IndiscernibilityProblem.from_json(structure, payload)).to_json()


def run_equiv0(args: Namespace, settings: Settings) -> dict:
    if args.threshold is None or args.threshold < 0:
        raise UsageError("--threshold", "a non-negative threshold is required")
    return equiv0_classes(_graph(args), args.threshold).to_json()


def run_even(args: Namespace, settings: Settings) -> dict:
    return even_distance_graph(_graph(args)).to_json()
