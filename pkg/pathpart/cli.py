import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import tqdm

from . import analysis
from .decpart import PALETTES, DecGraph, MGHandle, build, decgraph_from_json, random_decgraphs, uniform
from .fingroup import builtin_group, find_isomorphism, group_from_json, identify
from .graphs import RealizationError, aut_table, complete, frucht_realize, graph_to_json, isomorphic, path, small_connected_graphs
from .morphisms import aut_group, oracle_agreement, predicted_aut_order
from .options import (
    DEFAULT_ELEM_LEN,
    DEFAULT_POWER_BOUND,
    DEFAULT_SEED,
    DEFAULT_WORD_LEN,
    RECOVERY_BOUNDS,
    Bounds,
    EnumerationOverflow,
    SearchLimitExceeded,
    SearchLimits,
)
from .partialcore import (
    DomainError,
    GroupDiagram,
    PartialGroupHandle,
    check_axioms,
    colimit_of_groups,
    corrupt_product,
    free_on_one,
    from_group,
)
from .words import (
    CRWord,
    Letter,
    invert,
    is_cyclically_reduced,
    is_cyclically_reduced_literal,
    power,
    reduce,
    reduce_concat,
)

logger = logging.getLogger(__name__)

COMMANDS = ("build", "domain-test", "check-axioms", "aut", "recover", "maxsub", "nerve", "normalizer", "realize", "suite")

FIXTURES_DIR = Path(__file__).parent / "fixtures"

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class InputError(ValueError):
    """An input file is missing, not JSON, or not a valid handle spec."""


@dataclass
class RunConfig:
    command: str
    input: Optional[Path] = None
    bounds: Bounds = field(default_factory=Bounds)
    format: str = "json"
    seed: int = DEFAULT_SEED
    max_vertices: Optional[int] = None
    verbose: bool = False

    # command-specific
    words: List[str] = field(default_factory=list)
    list_elems: Optional[int] = None
    oracle: bool = False
    strong: bool = False
    dim: int = 2
    group: str = "S3"
    count: int = 3
    fixtures: Path = FIXTURES_DIR
    filter: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command {self.command!r}")
        if self.format not in ("json", "text"):
            raise ValueError("Format must be `json` or `text`")
        if self.dim < 0 or self.count < 1:
            raise ValueError("--dim must be non-negative and --count positive")


def load_json(p: Path):
    try:
        with open(p, encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError(f"{p}: no such file") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{p}:{e.lineno}:{e.colno}: {e.msg}") from None


def handle_from_json(obj) -> PartialGroupHandle:
    """
    Build a handle from its JSON spec.

    Kinds: "group" ({"group": name or table}), "free-on-one", "group-diagram"
    ({"ambient", "nodes": {name: [labels]}, "inclusions": [[src, dst]]}),
    "decgraph" (the decorated-graph format; the default when "graph" is
    present) and "corrupted" ({"inner", "word": [elems], "value": elem}).
    """
    if not isinstance(obj, dict):
        raise InputError("Handle spec must be a JSON object")
    kind = obj.get("kind", "decgraph" if "graph" in obj else None)
    if kind == "group":
        return from_group(group_from_json(obj.get("group")))
    if kind == "free-on-one":
        return free_on_one()
    if kind == "group-diagram":
        ambient = group_from_json(obj.get("ambient"))
        nodes = obj.get("nodes")
        if not isinstance(nodes, dict) or not nodes:
            raise InputError("'nodes' must map node names to element label lists")
        names = list(nodes)
        position = {name: i for i, name in enumerate(names)}
        try:
            inclusions = [(position[src], position[dst]) for src, dst in obj.get("inclusions", [])]
        except KeyError as e:
            raise InputError(f"Inclusion names unknown node {e}") from None
        return colimit_of_groups(GroupDiagram.from_subgroups(ambient, [nodes[n] for n in names], inclusions, names))
    if kind == "decgraph":
        return build(decgraph_from_json(obj))
    if kind == "corrupted":
        inner = handle_from_json(obj.get("inner"))
        word = tuple(inner.parse_elem(text) for text in obj.get("word", []))
        if not inner.in_domain(word):
            raise InputError("Corrupted word must be in the domain")
        return corrupt_product(inner, word, inner.parse_elem(obj.get("value", "")))
    raise InputError(f"Unknown handle kind {kind!r}")


def _decgraph_input(cfg: RunConfig) -> DecGraph:
    h = handle_from_json(load_json(_need_input(cfg)))
    if not isinstance(h, MGHandle):
        raise InputError(f"`{cfg.command}` needs a decorated graph, got {h.describe()}")
    return h.decgraph


def _need_input(cfg: RunConfig) -> Path:
    if cfg.input is None:
        raise InputError(f"`{cfg.command}` needs --input")
    return cfg.input


def _bounds_dict(b: Bounds) -> dict:
    return {"elem_len": b.elem_len, "word_len": b.word_len, "power_bound": b.power_bound}


def cmd_build(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    length = cfg.bounds.elem_len if cfg.list_elems is None else cfg.list_elems
    elems = sorted(h.enum_elems(length), key=h.elem_key)
    return EXIT_OK, {
        "handle": h.describe(),
        "bounds": {"elem_len": length},
        "count": len(elems),
        "elements": [h.format_elem(e) for e in elems],
    }


def cmd_domain_test(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    word = tuple(h.parse_elem(text) for text in cfg.words)
    inside = h.in_domain(word)
    report = {"word": h.format_word(word), "in_domain": inside}
    if inside:
        report["product"] = h.format_elem(h.product(word))
    return EXIT_OK, report


def cmd_check_axioms(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    report = check_axioms(h, cfg.bounds.elem_len, cfg.bounds.word_len, verbose=cfg.verbose)
    out = {"handle": h.describe(), **report.to_dict(h)}
    return (EXIT_OK if report.passed else EXIT_FAILED), out


def cmd_aut(cfg: RunConfig) -> Tuple[int, dict]:
    dg = _decgraph_input(cfg)
    result = aut_group(dg, verbose=cfg.verbose)
    seq = result.exact_sequence()
    out = {
        "order": result.order,
        "exact_sequence": seq,
        "elements": [m.describe() for m in result.elements],
        "table": result.table.table.tolist(),
        "summary": (
            f"order {result.order}; exact sequence {seq['text']}; "
            f"image in Aut_Graphs {'trivial' if seq['image_trivial'] else 'of order ' + str(seq['image_order'])}"
        ),
    }
    code = EXIT_OK
    if cfg.oracle:
        agreement = oracle_agreement(dg, cfg.bounds.elem_len, cfg.bounds.word_len, verbose=cfg.verbose, aut=result)
        out["oracle"] = {
            "max_len": agreement.max_len,
            "max_word_len": cfg.bounds.word_len,
            "agree": agreement.agree,
            "oracle_count": agreement.oracle_count,
            "predicted_count": agreement.predicted_count,
            "spurious": len(agreement.spurious),
            "missing": len(agreement.missing),
        }
        if not agreement.agree:
            code = EXIT_FAILED
    return code, out


def cmd_recover(cfg: RunConfig) -> Tuple[int, dict]:
    dg = _decgraph_input(cfg)
    bounds = cfg.bounds
    found = analysis.recover_check(dg, bounds)
    out = {"bounds": _bounds_dict(bounds), "isomorphism_found": found is not None}
    if found is not None:
        maxsub = analysis.maxsub_graph(build(dg), bounds)
        out["map"] = {maxsub.label(v): dg.graph.label(found(v)) for v in maxsub.vertices}
        out["summary"] = "isomorphism found"
        return EXIT_OK, out
    out["summary"] = "no isomorphism between the subgroup graph and the input graph"
    return EXIT_FAILED, out


def cmd_maxsub(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    bounds = cfg.bounds
    result = analysis.maxsub(h, bounds, strong=cfg.strong)
    g = result.graph
    return EXIT_OK, {
        "bounds": _bounds_dict(bounds),
        "adjacency": "strong" if cfg.strong else "existential",
        "subgroups": [
            {
                "name": g.label(k),
                "order": r.order,
                "group": identify(r.table),
                "elements": [h.format_elem(e) for e in sorted(r.elements, key=h.elem_key)],
            }
            for k, r in enumerate(result.records)
        ],
        "graph": graph_to_json(g),
        "witnesses": {
            f"{g.label(i)}-{g.label(j)}": h.format_word(w) for (i, j), w in sorted(result.witnesses.items())
        },
    }


def cmd_nerve(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    truncation = analysis.nerve(h, cfg.dim, cfg.bounds.elem_len)
    failures = truncation.check_simplicial_identities()
    unfilled = truncation.inner_horn_fillers()
    out = {
        "bounds": {"dim": cfg.dim, "elem_len": cfg.bounds.elem_len},
        "counts": {str(k): len(v) for k, v in sorted(truncation.dims.items())},
        "non_degenerate": {str(k): len(truncation.non_degenerate(k)) for k in sorted(truncation.dims)},
        "identity_failures": failures[:10],
        "unfilled_horns": [h.format_word(w) for w in unfilled[:10]],
        "nerve": truncation.to_json(),
    }
    return (EXIT_FAILED if failures or unfilled else EXIT_OK), out


def cmd_normalizer(cfg: RunConfig) -> Tuple[int, dict]:
    h = handle_from_json(load_json(_need_input(cfg)))
    found = analysis.normalizer(h, cfg.bounds.elem_len)
    out = {
        "bounds": {"elem_len": cfg.bounds.elem_len},
        "normalizer": [h.format_elem(e) for e in sorted(found, key=h.elem_key)],
        "trivial": found == {h.unit},
    }
    if isinstance(h, MGHandle) and out["trivial"]:
        out["homotopy_selfequiv_order"] = analysis.homotopy_selfequiv_order(h, cfg.bounds)
    return EXIT_OK, out


def cmd_realize(cfg: RunConfig) -> Tuple[int, dict]:
    group = builtin_group(cfg.group)
    graphs = frucht_realize(group, cfg.count)
    out = {"group": cfg.group, "graphs": []}
    code = EXIT_OK
    for g in graphs:
        aut = aut_group(uniform(g, builtin_group("Z2")))
        matches = find_isomorphism(aut.table, group) is not None
        code = code if matches else EXIT_FAILED
        out["graphs"].append({"vertices": g.n, "edges": len(g.edges), "aut_matches": matches, "graph": graph_to_json(g)})
    return code, out


# acceptance criteria, each returning (passed, detail)

def _criterion_aut_k2(cfg: RunConfig) -> Tuple[bool, str]:
    dg = decgraph_from_json(load_json(cfg.fixtures / "k2_z2z3.json"))
    result = aut_group(dg)
    seq = result.exact_sequence()
    b = dg.graph.vertex("b")
    moved = [m for m in result.elements if not m.is_identity()]
    ok = (
        result.order == 2
        and len(moved) == 1
        and moved[0].gmap.is_identity()
        and moved[0].fam[b](1) == 2
        and seq["kernel"] == "Z2"
        and seq["image_trivial"]
    )
    return ok, f"order {result.order}; {seq['text']}"


def _criterion_path_aut_oracle(cfg: RunConfig) -> Tuple[bool, str]:
    """
    Connected graphs on up to five vertices, decorated by Z2: the brute-force
    automorphisms at element length 6 and domain-word length 3 are exactly
    the graph automorphisms.
    """
    graphs = small_connected_graphs(5)
    bad = []
    for g in tqdm.tqdm(graphs, disable=not cfg.verbose, desc="path oracle"):
        dg = uniform(g, builtin_group("Z2"))
        aut = aut_group(dg)
        agreement = oracle_agreement(dg, 6, max_word_len=3, aut=aut)
        if not agreement.agree or agreement.oracle_count != len(aut.graph_aut):
            bad.append(repr(g))
    return not bad, f"{len(graphs) - len(bad)}/{len(graphs)} graphs at max_len 6, word_len 3"


def _criterion_oracle_agreement(cfg: RunConfig) -> Tuple[bool, str]:
    """
    Ten seeded decorated graphs (at most five vertices, Z2/Z3/V4, at most 200
    predicted automorphisms) agree with the brute-force oracle at length 3.
    """
    corpus = random_decgraphs(
        10, 5, PALETTES["oracle"], seed=cfg.seed, accept=lambda dg: predicted_aut_order(dg) <= 200
    )
    agree = sum(oracle_agreement(dg, 3).agree for dg in corpus)
    return agree == len(corpus), f"{agree}/{len(corpus)} decorated graphs at max_len 3"


def _criterion_recover(cfg: RunConfig) -> Tuple[bool, str]:
    corpus = random_decgraphs(20, 8, PALETTES["recovery"], seed=cfg.seed)
    fixture = cfg.fixtures / "random_g.json"
    corpus.append(decgraph_from_json(load_json(fixture)))
    found = sum(analysis.recover_check(dg) is not None for dg in tqdm.tqdm(corpus, disable=not cfg.verbose))
    return found == len(corpus), f"{found}/{len(corpus)} recovered at elem_len {RECOVERY_BOUNDS.elem_len}"


def _criterion_k2_example(cfg: RunConfig) -> Tuple[bool, str]:
    h = build(uniform(complete(2), builtin_group("Z2")))
    a, b = (CRWord((Letter(v, 1),)) for v in (0, 1))
    ab = h.product((a, b))
    elems = set(h.enum_elems(6))
    # unit, both letters, and the even-length alternating words
    expected = {h.unit, a, b} | {CRWord(power(w, k, h.dec)) for w in (ab, h.product((b, a))) for k in (1, 2, 3)}
    lengths = [len(power(ab, n, h.dec)) for n in range(1, 6)]
    records = analysis.maximal_finite_subgroups(h)
    order_class, _ = analysis.classify_order(h, ab, DEFAULT_POWER_BOUND)
    ok = (
        elems == expected
        and lengths == [2 * n for n in range(1, 6)]
        and [r.order for r in records] == [2, 2]
        and order_class is analysis.OrderClass.INFINITE
    )
    return ok, f"{len(elems)} elements at length 6; subgroup orders {[r.order for r in records]}; (a,b) {order_class.value}"


def _criterion_d8_colimit(cfg: RunConfig) -> Tuple[bool, str]:
    h = handle_from_json(load_json(cfg.fixtures / "d8_colimit.json"))
    x2, t, tx = (h.parse_elem(s) for s in ("x2", "t", "tx"))
    weak = analysis.maxsub(h, RECOVERY_BOUNDS)
    strong = analysis.maxsub(h, RECOVERY_BOUNDS, strong=True, records=weak.records)
    v, v_prime = (h.node_elements(h.diagram.names.index(n)) for n in ("V", "V'"))
    ok = (
        h.in_domain((x2, x2))
        and not h.in_domain((t, tx))
        and {r.elements for r in weak.records} == {v, v_prime}
        and len(weak.graph.edges) == 1
        and not strong.graph.edges
    )
    return ok, f"{len(weak.records)} maximal subgroups; edges {len(weak.graph.edges)} existential, {len(strong.graph.edges)} strong"


def _criterion_axioms(cfg: RunConfig) -> Tuple[bool, str]:
    """
    Every shipped handle passes D1-P3 at `cfg.bounds` (5 and 4 by default).

    The random part of the corpus keeps decorated graphs with at most one
    edge and at most 16 elements at the element bound.
    """
    bounds = cfg.bounds
    handles = [from_group(builtin_group("S3")), free_on_one(), handle_from_json(load_json(cfg.fixtures / "d8_colimit.json"))]
    handles += [build(decgraph_from_json(load_json(cfg.fixtures / name))) for name in ("k2_z2z3.json", "path_p3.json")]

    def small(dg):
        return len(dg.graph.edges) <= 1 and sum(1 for _ in build(dg).enum_elems(bounds.elem_len)) <= 16

    handles += [build(dg) for dg in random_decgraphs(5, 4, PALETTES["oracle"], seed=cfg.seed, accept=small)]
    reports = [check_axioms(h, bounds.elem_len, bounds.word_len, verbose=cfg.verbose) for h in handles]
    passed = sum(r.passed and not r.incomplete for r in reports)
    corrupted = handle_from_json(load_json(cfg.fixtures / "corrupted.json"))
    negative = check_axioms(corrupted, 1, 3)
    cx = negative.counterexamples.get("P2")
    ok = passed == len(handles) and cx is not None and cx.replay(corrupted)
    return ok, (
        f"{passed}/{len(handles)} handles pass at elem_len {bounds.elem_len}, word_len {bounds.word_len}; "
        f"corrupted product {'fails P2' if cx else 'passes P2'}"
    )


def _criterion_nerve(cfg: RunConfig) -> Tuple[bool, str]:
    problems = 0
    for h in (build(uniform(path(3), builtin_group("Z2"))), from_group(builtin_group("Z2"))):
        truncation = analysis.nerve(h, 3, 2)
        problems += len(truncation.check_simplicial_identities()) + len(truncation.inner_horn_fillers())
    graphs = [g for g in small_connected_graphs(4) if g.n >= 2]
    trivial = 0
    for g in graphs:
        h = build(uniform(g, builtin_group("Z2")))
        trivial += analysis.normalizer(h, 4) == {h.unit}
    order = analysis.homotopy_selfequiv_order(build(uniform(complete(2), builtin_group("Z2"))))
    ok = problems == 0 and trivial == len(graphs) and order == 2
    return ok, f"{problems} identity/horn failures; {trivial}/{len(graphs)} trivial normalizers; |E(P(K2))| = {order}"


def _criterion_realize(cfg: RunConfig) -> Tuple[bool, str]:
    names = ("Z1", "Z2", "Z3", "S3")
    good = 0
    for name in names:
        group = builtin_group(name)
        graphs = frucht_realize(group, 3)
        distinct = all(isomorphic(a, b) is None for i, a in enumerate(graphs) for b in graphs[i + 1:])
        lifted = all(
            find_isomorphism(aut_table(g), group) is not None
            and find_isomorphism(aut_group(uniform(g, builtin_group("Z2"))).table, group) is not None
            for g in graphs
        )
        good += distinct and lifted
    return good == len(names), f"{good}/{len(names)} groups realized three times"


def _criterion_wreath(cfg: RunConfig) -> Tuple[bool, str]:
    result = aut_group(uniform(path(3), builtin_group("Z3")))
    ok = result.order == 16 and result.is_section()
    return ok, f"order {result.order}"


def _criterion_words(cfg: RunConfig) -> Tuple[bool, str]:
    rng = np.random.default_rng(cfg.seed)
    dec = [builtin_group(n) for n in ("Z2", "Z3", "Z3")]
    failures = 0
    for _ in range(10_000):
        words = []
        for _ in range(3):
            length = int(rng.integers(0, 8))
            vs = rng.integers(0, 3, size=length)
            words.append([Letter(int(v), int(rng.integers(1, dec[v].order))) for v in vs])
        u, v, w = words
        ru = reduce(u, dec)
        failures += reduce(ru, dec) != ru
        failures += reduce_concat([ru, invert(ru, dec)], dec) != ()
        failures += reduce_concat([reduce_concat([u, v], dec), w], dec) != reduce_concat([u, reduce_concat([v, w], dec)], dec)
        failures += is_cyclically_reduced(ru) != is_cyclically_reduced_literal(ru)
    return failures == 0, f"{failures} failures over 10000 seeded words"


CRITERIA: Dict[str, Callable[[RunConfig], Tuple[bool, str]]] = {
    "aut-k2-z2z3": _criterion_aut_k2,
    "path-aut-oracle": _criterion_path_aut_oracle,
    "oracle-agreement": _criterion_oracle_agreement,
    "recover": _criterion_recover,
    "k2-example": _criterion_k2_example,
    "d8-colimit": _criterion_d8_colimit,
    "axioms": _criterion_axioms,
    "nerve": _criterion_nerve,
    "realize": _criterion_realize,
    "wreath": _criterion_wreath,
    "words": _criterion_words,
}


def run_suite(cfg: RunConfig) -> Tuple[int, dict]:
    names = [n for n in CRITERIA if cfg.filter is None or cfg.filter in n]
    if not names:
        raise InputError(f"No criterion matches {cfg.filter!r}; known: {', '.join(CRITERIA)}")
    results = {}
    for name in tqdm.tqdm(names, disable=not cfg.verbose, desc="suite", unit="criterion"):
        try:
            ok, detail = CRITERIA[name](cfg)
        except InputError as e:
            ok, detail = False, f"missing or invalid fixture: {e}"
        results[name] = {"passed": bool(ok), "detail": detail}
        logger.info("%s: %s (%s)", name, "pass" if ok else "FAIL", detail)
    failed = [n for n, r in results.items() if not r["passed"]]
    return (EXIT_FAILED if failed else EXIT_OK), {"seed": cfg.seed, "criteria": results, "failed": failed}


HANDLERS: Dict[str, Callable[[RunConfig], Tuple[int, dict]]] = {
    "build": cmd_build,
    "domain-test": cmd_domain_test,
    "check-axioms": cmd_check_axioms,
    "aut": cmd_aut,
    "recover": cmd_recover,
    "maxsub": cmd_maxsub,
    "nerve": cmd_nerve,
    "normalizer": cmd_normalizer,
    "realize": cmd_realize,
    "suite": run_suite,
}


def run(cfg: RunConfig) -> Tuple[int, dict]:
    """Run one command; returns the exit status and the report."""
    if cfg.max_vertices is not None:
        SearchLimits.set_max_vertices(cfg.max_vertices)
    try:
        return HANDLERS[cfg.command](cfg)
    except (InputError, DomainError, KeyError, ValueError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        return EXIT_USAGE, {"error": message}
    except (EnumerationOverflow, SearchLimitExceeded) as e:
        return EXIT_USAGE, {"error": str(e), "hint": "lower --max-len/--word-len or raise the limits"}
    except RealizationError as e:
        return EXIT_FAILED, {"error": str(e)}


def format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    lines = []

    def emit(prefix: str, value):
        if isinstance(value, dict):
            for k in sorted(value):
                emit(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            for i, item in enumerate(value):
                emit(f"{prefix}[{i}]", item)
        else:
            lines.append(f"{prefix}: {value}")

    emit("", report)
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="handle spec or decorated graph (JSON)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--max-len", type=int, default=None, help=f"longest element enumerated (default {DEFAULT_ELEM_LEN})")
    common.add_argument("--word-len", type=int, default=None, help=f"longest domain word enumerated (default {DEFAULT_WORD_LEN})")
    common.add_argument("--power-bound", type=int, default=None, help=f"powers tried per element (default {DEFAULT_POWER_BOUND})")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--max-vertices", type=int, default=None, help="refuse graph searches above this size")
    common.add_argument("--verbose", action="store_true", help="show progress bars")

    parser = argparse.ArgumentParser(prog="pathpart", description="Partial groups from decorated graphs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("build", parents=[common], help="list the elements of a handle")
    p.add_argument("--list-elems", type=int, default=None)
    p = sub.add_parser("domain-test", parents=[common], help="test one word for domain membership")
    p.add_argument("--word", action="append", default=[], help="one entry, e.g. 'a.1 b.1'; repeat for each entry")
    sub.add_parser("check-axioms", parents=[common], help="bounded partial-group axiom check")
    p = sub.add_parser("aut", parents=[common], help="automorphism group of M(G,H)")
    p.add_argument("--oracle", action="store_true", help="compare with the truncated brute-force search")
    sub.add_parser("recover", parents=[common], help="recover the graph from maximal finite subgroups")
    p = sub.add_parser("maxsub", parents=[common], help="graph of maximal finite subgroups")
    p.add_argument("--strong", action="store_true", help="adjacent only when every pair is in the domain")
    p = sub.add_parser("nerve", parents=[common], help="truncated nerve with identity checks")
    p.add_argument("--dim", type=int, default=2)
    sub.add_parser("normalizer", parents=[common], help="normalizer certificate")
    p = sub.add_parser("realize", parents=[common], help="graphs with a prescribed automorphism group")
    p.add_argument("--group", default="S3")
    p.add_argument("--count", type=int, default=3)
    p = sub.add_parser("suite", parents=[common], help="run the acceptance criteria")
    p.add_argument("--fixtures", type=Path, default=FIXTURES_DIR)
    p.add_argument("--filter", default=None, help="only criteria whose name contains this")
    return parser


def _bounds_from_args(args: argparse.Namespace) -> Bounds:
    # recovery commands default to the smaller recovery bounds
    base = RECOVERY_BOUNDS if args.command in ("recover", "maxsub") else Bounds()
    given = {"elem_len": args.max_len, "word_len": args.word_len, "power_bound": args.power_bound}
    return base.with_(**{k: v for k, v in given.items() if v is not None})


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=args.input,
        bounds=_bounds_from_args(args),
        format=args.format,
        seed=args.seed,
        max_vertices=args.max_vertices,
        verbose=args.verbose,
        words=getattr(args, "word", []),
        list_elems=getattr(args, "list_elems", None),
        oracle=getattr(args, "oracle", False),
        strong=getattr(args, "strong", False),
        dim=getattr(args, "dim", 2),
        group=getattr(args, "group", "S3"),
        count=getattr(args, "count", 3),
        fixtures=getattr(args, "fixtures", FIXTURES_DIR),
        filter=getattr(args, "filter", None),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except ValueError as e:
        print(f"pathpart: {e}", file=sys.stderr)
        return EXIT_USAGE
    code, report = run(cfg)
    print(format_report(report, cfg.format))
    return code
