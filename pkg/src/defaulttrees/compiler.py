"""Greedy compilation of decision networks into default trees.

``compile_dd`` performs the single best expansion per iteration. ``compile_ddn``
looks up to ``depth`` levels ahead, scoring candidate expansion subtrees by the
unweighted mean of their per-node expansion gains, and splices the best one.
Candidate scores depend only on the target's path, so they are computed once
per default node and never invalidated; one network evaluation per node covers
the whole lookahead.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from .diagram import InfluenceDiagram
from .dtree import DTree, ExpansionSubtree, Shape
from .errors import (
    ClosedNodeError,
    DefaultTreeError,
    ItemAlreadyObservedError,
    NoEvidenceItemsWarning,
)
from .inference import InferenceEngine

ALGORITHMS = ("dd", "ddn")
ENUMERATIONS = ("greedy", "exhaustive")


@dataclass
class CompilerConfig:
    algorithm: str = "dd"
    depth: int = 1
    enumeration: str = "greedy"
    max_enodes: int | None = None
    min_gain: float = 1e-9
    eu_fraction_target: float | None = None

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise DefaultTreeError(f"unknown algorithm {self.algorithm!r}")
        if self.enumeration not in ENUMERATIONS:
            raise DefaultTreeError(f"unknown enumeration mode {self.enumeration!r}")
        if not isinstance(self.depth, int) or self.depth < 1:
            raise DefaultTreeError("depth must be an integer >= 1")
        if self.algorithm == "dd" and self.depth != 1:
            raise DefaultTreeError("algorithm 'dd' has no lookahead; use 'ddn' for depth > 1")
        if self.max_enodes is not None and self.max_enodes < 0:
            raise DefaultTreeError("max_enodes must be >= 0")
        if self.min_gain < 0:
            raise DefaultTreeError("min_gain must be >= 0")
        if self.eu_fraction_target is not None and not (0.0 < self.eu_fraction_target <= 1.0):
            raise DefaultTreeError("eu_fraction_target must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "depth": self.depth,
            "enumeration": self.enumeration,
            "max_enodes": self.max_enodes,
            "min_gain": self.min_gain,
            "eu_fraction_target": self.eu_fraction_target,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CompilerConfig":
        unknown = set(doc) - set(cls().to_dict())
        if unknown:
            raise DefaultTreeError(f"unknown config fields {sorted(unknown)}")
        cfg = cls(**doc)
        cfg.validate()
        return cfg


@dataclass
class CompilationStats:
    """Instrumentation for the complexity accounting: how often the network
    was processed, per iteration and in total."""

    iterations: int = 0
    setup_calls: int = 0
    per_iteration_calls: list[int] = field(default_factory=list)
    inference_calls: int = 0
    ne: int = 0
    enodes: int = 0
    nodes: int = 0
    eu_trace: list[float] = field(default_factory=list)
    expansions: list[dict] = field(default_factory=list)
    eu_upper_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "setup_calls": self.setup_calls,
            "per_iteration_calls": list(self.per_iteration_calls),
            "inference_calls": self.inference_calls,
            "ne": self.ne,
            "enodes": self.enodes,
            "nodes": self.nodes,
            "eu_trace": list(self.eu_trace),
            "expansions": list(self.expansions),
            "eu_upper_bound": self.eu_upper_bound,
        }


def _merge_ext(key, sigma, item, label, item_index):
    pairs = list(sigma) + [(item, label)]
    pairs.sort(key=lambda kv: item_index[kv[0]])
    return tuple(pairs)


def _gain_from_table(table, sigma, item, values, item_index) -> float:
    """Expansion gain of ``item`` at the extension ``sigma`` of the table's
    base path, from absolute utility sums."""
    if table.mass(sigma) <= 0.0:
        return 0.0
    total = 0.0
    for label in values[item]:
        ext = _merge_ext(None, sigma, item, label, item_index)
        if table.mass(ext) > 0.0:
            total += float(table.util(ext).max())
    return total - float(table.util(sigma).max())


class _Draft:
    __slots__ = ("item", "gain", "branches")

    def __init__(self, item, gain, branches):
        self.item = item
        self.gain = gain
        self.branches = branches  # list[_Draft | None]


def _build_greedy_draft(table, sigma, rem, depth, values, item_index):
    if depth == 0 or not rem or table.mass(sigma) <= 0.0:
        return None
    best_item, best_gain = None, None
    for item in rem:
        g = _gain_from_table(table, sigma, item, values, item_index)
        if best_gain is None or g > best_gain:
            best_item, best_gain = item, g
    branches = []
    rest = [i for i in rem if i != best_item]
    for label in values[best_item]:
        child_sigma = _merge_ext(None, sigma, best_item, label, item_index)
        branches.append(
            _build_greedy_draft(table, child_sigma, rest, depth - 1, values, item_index)
        )
    return _Draft(best_item, best_gain, branches)


def _prune_draft(root: _Draft) -> _Draft:
    """Leaf-up, mean-raising prune: repeatedly drop the deepest prospective
    node whose gain is below the current mean (the root always stays).
    Removing a below-mean element raises the mean, so this runs to a
    fixpoint."""
    while True:
        records = []

        def collect(node, level, parent, branch):
            records.append((node, level, parent, branch))
            for bi, b in enumerate(node.branches):
                if b is not None:
                    collect(b, level + 1, node, bi)

        collect(root, 1, None, None)
        if len(records) == 1:
            return root
        mean = sum(r[0].gain for r in records) / len(records)
        removed = False
        for node, level, parent, branch in sorted(
            records, key=lambda r: -r[1]
        ):
            if level == 1:
                continue
            if all(b is None for b in node.branches) and node.gain < mean:
                parent.branches[branch] = None
                removed = True
                break
        if not removed:
            return root


def _freeze_draft(d: _Draft) -> Shape:
    return Shape(
        d.item,
        tuple(_freeze_draft(b) if b is not None else None for b in d.branches),
    )


def _all_shapes(table, sigma, rem, depth, values, item_index):
    """Every legal expansion shape of depth <= depth over the remaining
    items, in canonical order (item declaration order, stop before nest).
    Branches into zero-probability children are never nested."""
    if depth == 0 or not rem:
        return
    for item in rem:
        rest = [i for i in rem if i != item]
        options = []
        for label in values[item]:
            child_sigma = _merge_ext(None, sigma, item, label, item_index)
            opts = [None]
            if table.mass(child_sigma) > 0.0:
                opts.extend(
                    _all_shapes(table, child_sigma, rest, depth - 1, values, item_index)
                )
            options.append(opts)
        for combo in itertools.product(*options):
            yield Shape(item, combo)


def _score_shape(table, sigma, shape, values, item_index):
    """(sum of gains, node count) of a shape hypothetically spliced at the
    table's base path extended by sigma."""
    total = _gain_from_table(table, sigma, shape.item, values, item_index)
    count = 1
    for label, branch in zip(values[shape.item], shape.branches):
        if branch is None:
            continue
        child_sigma = _merge_ext(None, sigma, shape.item, label, item_index)
        s, c = _score_shape(table, child_sigma, branch, values, item_index)
        total += s
        count += c
    return total, count


def _shape_lex_key(shape, item_index):
    return (
        item_index[shape.item],
        tuple(
            _shape_lex_key(b, item_index) if b is not None else ()
            for b in shape.branches
        ),
    )


def _item_maps(diagram):
    items = list(diagram.decision.observed)
    item_index = {it: i for i, it in enumerate(items)}
    values = {it: diagram.chance(it).values for it in items}
    return items, item_index, values


def enumerate_candidates(tree: DTree, dnode_ref, depth: int, mode: str = "greedy"):
    """Candidate expansion subtrees at one open default node.

    Depth 1 always yields one candidate per unobserved item. At deeper
    lookahead, greedy mode yields the single level-wise max-evoi construction
    (pruned leaf-up); exhaustive mode yields every legal shape.
    """
    if depth < 1:
        raise DefaultTreeError("lookahead depth must be >= 1")
    entry = tree.entry(dnode_ref)
    if not entry.node.is_dnode or not entry.node.open:
        raise ClosedNodeError("target is not an open default node")
    items, item_index, values = _item_maps(tree.diagram)
    on_path = {i for i, _ in entry.path}
    rem = [i for i in items if i not in on_path]
    d = min(depth, len(rem))
    table = tree.engine.table(dict(entry.path), d)
    if d <= 1:
        shapes = [Shape(it, (None,) * len(values[it])) for it in rem]
    elif mode == "greedy":
        draft = _build_greedy_draft(table, (), rem, d, values, item_index)
        shapes = [_freeze_draft(_prune_draft(draft))] if draft is not None else []
    elif mode == "exhaustive":
        shapes = list(_all_shapes(table, (), rem, d, values, item_index))
    else:
        raise DefaultTreeError(f"unknown enumeration mode {mode!r}")
    return [ExpansionSubtree(entry.id, s) for s in shapes]


def _check_shape_legal(shape: Shape, used: set):
    if shape.item in used:
        raise ItemAlreadyObservedError(f"{shape.item!r} repeats along a branch")
    for branch in shape.branches:
        if branch is not None:
            _check_shape_legal(branch, used | {shape.item})


def mean_eu_expand(tree: DTree, sub: ExpansionSubtree) -> float:
    """Unweighted mean of the expansion gains of every evidence node the
    subtree would create, each at its own path in the spliced tree."""
    entry = tree.entry(sub.target)
    _check_shape_legal(sub.shape, {i for i, _ in entry.path})
    items, item_index, values = _item_maps(tree.diagram)
    table = tree.engine.table(dict(entry.path), sub.shape.depth)
    total, count = _score_shape(table, (), sub.shape, values, item_index)
    return total / count


def stopping(tree: DTree, stats: CompilationStats, config: CompilerConfig,
             best_gain: float | None) -> bool:
    """The shared stopping criterion: budget exhausted, best candidate gain
    at or below the floor, EU target reached, or nothing left to expand."""
    if best_gain is None:
        return True
    if config.max_enodes is not None and stats.enodes >= config.max_enodes:
        return True
    if best_gain <= config.min_gain:
        return True
    if (
        config.eu_fraction_target is not None
        and stats.eu_upper_bound is not None
        and stats.eu_trace
        and stats.eu_trace[-1] >= config.eu_fraction_target * stats.eu_upper_bound
    ):
        return True
    return False


def _start(diagram, config, engine, lookahead):
    config.validate()
    if engine is None:
        engine = InferenceEngine(diagram)
    stats = CompilationStats()
    items, _, values = _item_maps(diagram)
    stats.ne = max((len(values[i]) for i in items), default=0)
    if config.eu_fraction_target is not None:
        from .oracle import optimal_policy_eu

        stats.eu_upper_bound = optimal_policy_eu(diagram)
    calls0 = engine.counter.calls
    if items:
        engine.table({}, lookahead)  # warm the root pass at full lookahead
    tree = DTree.initial(diagram, engine)
    stats.setup_calls = engine.counter.calls - calls0
    stats.eu_trace.append(tree.root.eu)
    if not items:
        warnings.warn(
            "diagram has no evidence items; returning the single-node tree",
            NoEvidenceItemsWarning,
        )
    return tree, stats, engine


def _finish(tree, stats, engine, calls0):
    stats.inference_calls = engine.counter.calls - calls0
    stats.iterations = len(stats.expansions)
    stats.enodes = len(tree.enodes())
    stats.nodes = tree.node_count()
    return tree, stats


def compile_dd(diagram: InfluenceDiagram, config: CompilerConfig | None = None,
               engine: InferenceEngine | None = None):
    """One maximal-gain single expansion per iteration, until the stopping
    criterion fires. Ties go to the lower node id, then earlier item."""
    config = config or CompilerConfig(algorithm="dd")
    if engine is None:
        engine = InferenceEngine(diagram)
    calls0 = engine.counter.calls
    tree, stats, engine = _start(diagram, config, engine, lookahead=1)
    items, item_index, values = _item_maps(diagram)
    while True:
        t0 = engine.counter.calls
        best = None  # (gain, key, entry_id, item)
        for e in tree.open_dnodes():
            table = engine.table(dict(e.path), 1)
            on_path = {i for i, _ in e.path}
            for item in (i for i in items if i not in on_path):
                gain = _gain_from_table(table, (), item, values, item_index)
                key = (e.id, item_index[item])
                if best is None or gain > best[0] or (gain == best[0] and key < best[1]):
                    best = (gain, key, e.id, item)
        stop = stopping(tree, stats, config, best[0] if best else None)
        if not stop:
            gain, _, target, item = best
            tree = tree.expand(target, item)
            stats.enodes += 1
            stats.eu_trace.append(stats.eu_trace[-1] + gain)
            stats.expansions.append({"dnode": target, "item": item, "gain": gain})
        stats.per_iteration_calls.append(engine.counter.calls - t0)
        if stop:
            break
    return _finish(tree, stats, engine, calls0)


def compile_ddn(diagram: InfluenceDiagram, config: CompilerConfig | None = None,
                engine: InferenceEngine | None = None):
    """Lookahead compilation: per iteration, splice the candidate subtree
    with the maximal mean expansion gain. Ties go to the lower node id, then
    earlier root item, then shallower shape, then lexicographic shape."""
    config = config or CompilerConfig(algorithm="ddn", depth=1)
    if engine is None:
        engine = InferenceEngine(diagram)
    calls0 = engine.counter.calls
    tree, stats, engine = _start(diagram, config, engine, lookahead=config.depth)
    items, item_index, values = _item_maps(diagram)
    scored: dict[tuple, list] = {}  # path key -> [(mean, total, key, shape)]
    while True:
        t0 = engine.counter.calls
        best = None  # (mean, key, entry_id, shape, total, count)
        for e in tree.open_dnodes():
            pkey = tuple(e.path)
            cands = scored.get(pkey)
            if cands is None:
                on_path = {i for i, _ in e.path}
                rem = [i for i in items if i not in on_path]
                d = min(config.depth, len(rem))
                table = engine.table(dict(e.path), d)
                if d <= 1:
                    shapes = [Shape(it, (None,) * len(values[it])) for it in rem]
                elif config.enumeration == "greedy":
                    draft = _build_greedy_draft(table, (), rem, d, values, item_index)
                    shapes = [_freeze_draft(_prune_draft(draft))] if draft else []
                else:
                    shapes = list(_all_shapes(table, (), rem, d, values, item_index))
                cands = []
                for s in shapes:
                    total, count = _score_shape(table, (), s, values, item_index)
                    cands.append((total / count, total, s))
                scored[pkey] = cands
            for mean, total, s in cands:
                key = (e.id, item_index[s.item], s.depth, _shape_lex_key(s, item_index))
                if best is None or mean > best[0] or (mean == best[0] and key < best[1]):
                    best = (mean, key, e.id, s, total)
        stop = stopping(tree, stats, config, best[0] if best else None)
        if not stop:
            mean, _, target, shape, total = best
            tree = tree.expand_subtree(ExpansionSubtree(target, shape))
            stats.enodes += shape.enode_count()
            stats.eu_trace.append(stats.eu_trace[-1] + total)
            stats.expansions.append(
                {
                    "dnode": target,
                    "shape": _shape_to_plain(shape),
                    "mean_gain": mean,
                    "gain": total,
                }
            )
        stats.per_iteration_calls.append(engine.counter.calls - t0)
        if stop:
            break
    return _finish(tree, stats, engine, calls0)


def _shape_to_plain(shape: Shape):
    return {
        "item": shape.item,
        "branches": [
            _shape_to_plain(b) if b is not None else None for b in shape.branches
        ],
    }


def compile_diagram(diagram: InfluenceDiagram, config: CompilerConfig,
                    engine: InferenceEngine | None = None):
    """Dispatch on the configured algorithm."""
    if config.algorithm == "dd":
        return compile_dd(diagram, config, engine)
    return compile_ddn(diagram, config, engine)
