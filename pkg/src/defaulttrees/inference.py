"""Exact inference and decision evaluation over an influence diagram.

The engine enumerates the joint chance space once per *network evaluation*.
A single evaluation at an evidence path also produces, in the same pass, the
decision tables for every extension of that path up to a configurable
lookahead depth; results are cached per path, so repeated queries are free.
The evaluation counter therefore counts enumeration passes, which is the
"number of times the network is processed" that the compiler's complexity
accounting relies on.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .diagram import InfluenceDiagram, as_path_dict, validate
from .errors import (
    IllegalAssignmentError,
    InvalidDiagramError,
    ItemAlreadyObservedError,
    ZeroProbabilityPathError,
)

EU_TIE_TOL = 1e-12


@dataclass(frozen=True)
class DecisionSet:
    """The full argmax set of decision alternatives and their common EU."""

    decisions: tuple[str, ...]
    eu: float

    @property
    def first(self) -> str:
        return self.decisions[0]


class InferenceCounter:
    """Thread-safe count of network evaluations (enumeration passes)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._calls = 0

    def increment(self) -> None:
        with self._lock:
            self._calls += 1

    @property
    def calls(self) -> int:
        return self._calls


class ExtensionTable:
    """Masses and per-decision utility sums for a base path and all
    assignments extending it by up to ``depth`` further items.

    Entries are keyed by the extension assignment: a tuple of (item, value)
    pairs in item declaration order, ``()`` for the base path itself. Utility
    sums are unnormalized (absolute, probability-weighted), so
    ``util.max()`` equals ``P(path) * EU(dec(path))``.
    """

    def __init__(self, depth: int, masses: dict, utils: dict):
        self.depth = depth
        self._masses = masses
        self._utils = utils

    def mass(self, ext=()) -> float:
        return self._masses[ext]

    def util(self, ext=()) -> np.ndarray:
        return self._utils[ext]

    def has(self, ext) -> bool:
        return ext in self._masses


class InferenceEngine:
    """Exact, cached inference over one validated diagram.

    The diagram is immutable after validation; all queries are pure, so one
    engine may be shared freely. ``cache=False`` recomputes every pass (used
    to verify that caching does not change results).
    """

    def __init__(self, diagram: InfluenceDiagram, cache: bool = True,
                 counter: InferenceCounter | None = None):
        violations = validate(diagram)
        if violations:
            raise InvalidDiagramError(violations)
        self.diagram = diagram
        self.counter = counter or InferenceCounter()
        self._use_cache = cache
        self._tables: dict[tuple, ExtensionTable] = {}
        self._prepare()

    # -- precomputation ----------------------------------------------------

    def _prepare(self):
        dg = self.diagram
        names = list(dg.chance_names)
        self._col = {n: i for i, n in enumerate(names)}
        cards = [dg.chance(n).card for n in names]
        self._cards = cards
        grids = np.meshgrid(*[np.arange(k) for k in cards], indexing="ij")
        self._configs = np.stack([g.reshape(-1) for g in grids], axis=1)
        n_cfg = self._configs.shape[0]

        joint = np.ones(n_cfg)
        for i, name in enumerate(names):
            node = dg.chance(name)
            if node.parents:
                pcols = [self._col[p] for p in node.parents]
                pcards = [dg.chance(p).card for p in node.parents]
                rows = np.ravel_multi_index(
                    tuple(self._configs[:, c] for c in pcols), tuple(pcards)
                )
            else:
                rows = np.zeros(n_cfg, dtype=int)
            joint = joint * node.cpt[rows, self._configs[:, i]]
        self._joint = joint

        alts = dg.decision.alternatives
        self._alt_index = {a: i for i, a in enumerate(alts)}
        util = np.empty((n_cfg, len(alts)))
        vparents = dg.value.parents
        dims = []
        for p in vparents:
            if p == dg.decision.name:
                dims.append(len(alts))
            else:
                dims.append(dg.chance(p).card)
        for di in range(len(alts)):
            idx = []
            for p in vparents:
                if p == dg.decision.name:
                    idx.append(np.full(n_cfg, di, dtype=int))
                else:
                    idx.append(self._configs[:, self._col[p]])
            flat = (
                np.ravel_multi_index(tuple(idx), tuple(dims))
                if vparents
                else np.zeros(n_cfg, dtype=int)
            )
            util[:, di] = dg.value.utility[flat]
        self._util = util

        self._items = list(dg.decision.observed)
        self._item_index = {it: i for i, it in enumerate(self._items)}
        self._values = {it: dg.chance(it).values for it in self._items}
        self._value_index = {
            it: {v: j for j, v in enumerate(self._values[it])} for it in self._items
        }

    # -- path handling -----------------------------------------------------

    def _path_key(self, path) -> tuple[tuple[str, str], ...]:
        d = as_path_dict(path)
        for item, value in d.items():
            if item not in self._item_index:
                raise IllegalAssignmentError(f"{item!r} is not an evidence item")
            if value not in self._value_index[item]:
                raise IllegalAssignmentError(f"{value!r} is not a value of {item!r}")
        return tuple(sorted(d.items(), key=lambda kv: self._item_index[kv[0]]))

    # -- the enumeration pass ----------------------------------------------

    def _sweep(self, key, depth: int) -> ExtensionTable:
        """One pass over the joint space: masses and utility sums for the
        path and every extension assignment of size <= depth."""
        self.counter.increment()
        weights = self._joint
        for item, value in key:
            col = self._col[item]
            vi = self._value_index[item][value]
            weights = weights * (self._configs[:, col] == vi)
        observed = {item for item, _ in key}
        rem = [it for it in self._items if it not in observed]

        masses: dict[tuple, float] = {}
        utils: dict[tuple, np.ndarray] = {}
        n_alts = self._util.shape[1]
        wu = [weights * self._util[:, d] for d in range(n_alts)]
        for r in range(0, min(depth, len(rem)) + 1):
            for subset in itertools.combinations(rem, r):
                scards = [len(self._values[it]) for it in subset]
                size = int(np.prod(scards)) if subset else 1
                if subset:
                    codes = np.ravel_multi_index(
                        tuple(self._configs[:, self._col[it]] for it in subset),
                        tuple(scards),
                    )
                else:
                    codes = np.zeros(len(weights), dtype=int)
                m = np.bincount(codes, weights=weights, minlength=size)
                us = [
                    np.bincount(codes, weights=wu[d], minlength=size)
                    for d in range(n_alts)
                ]
                for flat in range(size):
                    combo = np.unravel_index(flat, tuple(scards)) if subset else ()
                    ext = tuple(
                        (it, self._values[it][vi]) for it, vi in zip(subset, combo)
                    )
                    masses[ext] = float(m[flat])
                    utils[ext] = np.array([us[d][flat] for d in range(n_alts)])
        return ExtensionTable(depth, masses, utils)

    def table(self, path, depth: int = 1) -> ExtensionTable:
        """Extension table for a path, reusing any cached pass that covers it.

        A cached table at an ancestor path covers this request when the
        requested extensions are within its lookahead; deriving the view is a
        cache read, not a new evaluation.
        """
        key = self._path_key(path)
        if not self._use_cache:
            return self._sweep(key, depth)
        hit = self._tables.get(key)
        if hit is not None and hit.depth >= depth:
            return hit
        derived = self._derive(key, depth)
        if derived is not None:
            return derived
        fresh = self._sweep(key, max(depth, hit.depth if hit else 0))
        self._tables[key] = fresh
        return fresh

    def _derive(self, key, depth):
        # Prefer the deepest covering ancestor: it yields the smallest view.
        for r in range(len(key) - 1, -1, -1):
            for base in itertools.combinations(key, r):
                tab = self._tables.get(base)
                if tab is None:
                    continue
                sigma = tuple(p for p in key if p not in set(base))
                if len(sigma) + depth > tab.depth:
                    continue
                prefix = dict(sigma)
                masses, utils = {}, {}
                for ext, m in tab._masses.items():
                    extd = dict(ext)
                    if not all(extd.get(i) == v for i, v in prefix.items()):
                        continue
                    rest = tuple((i, v) for i, v in ext if i not in prefix)
                    if len(rest) > depth:
                        continue
                    masses[rest] = m
                    utils[rest] = tab._utils[ext]
                return ExtensionTable(depth, masses, utils)
        return None

    # -- public operations ---------------------------------------------------

    def joint_prob(self, assignment) -> float:
        """Chain-rule product for a total assignment over all chance nodes."""
        dg = self.diagram
        a = as_path_dict(assignment)
        missing = set(dg.chance_names) - set(a)
        if missing:
            raise IllegalAssignmentError(f"assignment misses chance nodes {sorted(missing)}")
        p = 1.0
        for name in dg.chance_names:
            node = dg.chance(name)
            try:
                vi = node.values.index(a[name])
            except ValueError:
                raise IllegalAssignmentError(f"{a[name]!r} is not a value of {name!r}")
            if node.parents:
                row = 0
                for pa in node.parents:
                    pnode = dg.chance(pa)
                    row = row * pnode.card + pnode.values.index(a[pa])
            else:
                row = 0
            p *= float(node.cpt[row, vi])
        return p

    def prob_of_path(self, path) -> float:
        return self.table(path, 0).mass(())

    def _decision_set(self, mass: float, util: np.ndarray) -> DecisionSet:
        if mass <= 0.0:
            raise ZeroProbabilityPathError("path has probability zero")
        eus = util / mass
        best = float(eus.max())
        alts = self.diagram.decision.alternatives
        members = tuple(a for i, a in enumerate(alts) if eus[i] >= best - EU_TIE_TOL)
        return DecisionSet(members, best)

    def expected_utility(self, alternative: str, path) -> float:
        if alternative not in self._alt_index:
            raise IllegalAssignmentError(f"unknown alternative {alternative!r}")
        t = self.table(path, 0)
        mass = t.mass(())
        if mass <= 0.0:
            raise ZeroProbabilityPathError("path has probability zero")
        return float(t.util(())[self._alt_index[alternative]] / mass)

    def best_decisions(self, path=None) -> DecisionSet:
        t = self.table(path, 0)
        return self._decision_set(t.mass(()), t.util(()))

    def path_utility(self, path, alternative: str) -> float:
        """Absolute contribution P(path) * EU(alternative | path); exactly 0
        for zero-probability paths."""
        if alternative not in self._alt_index:
            raise IllegalAssignmentError(f"unknown alternative {alternative!r}")
        t = self.table(path, 0)
        return float(t.util(())[self._alt_index[alternative]])

    def _check_item(self, path_key, item):
        if item not in self._item_index:
            raise IllegalAssignmentError(f"{item!r} is not an evidence item")
        if any(i == item for i, _ in path_key):
            raise ItemAlreadyObservedError(f"{item!r} already on the path")

    def evoi(self, path, item: str) -> float:
        """Expected gain in utility from observing ``item`` before deciding.

        Probability-weighted best EU over the item's values minus the current
        best EU; values with zero conditional probability contribute nothing.
        """
        key = self._path_key(path)
        self._check_item(key, item)
        t = self.table(path, 1)
        mass = t.mass(())
        if mass <= 0.0:
            raise ZeroProbabilityPathError("path has probability zero")
        total = 0.0
        for value in self._values[item]:
            ext = ((item, value),)
            if t.mass(ext) > 0.0:
                total += float(t.util(ext).max())
        return (total - float(t.util(()).max())) / mass

    def eu_expand(self, path, item: str) -> float:
        """Tree-level EU gain of one expansion: P(path) * evoi(item | path).

        Computed from absolute utility sums, so a zero-probability path
        yields 0 rather than an undefined conditional.
        """
        key = self._path_key(path)
        self._check_item(key, item)
        t = self.table(path, 1)
        if t.mass(()) <= 0.0:
            return 0.0
        total = 0.0
        for value in self._values[item]:
            ext = ((item, value),)
            if t.mass(ext) > 0.0:
                total += float(t.util(ext).max())
        return total - float(t.util(()).max())

    def max_evoi(self, path, candidates=None) -> tuple[str, float]:
        """Argmax item by evoi; ties go to the earliest-declared item."""
        key = self._path_key(path)
        on_path = {i for i, _ in key}
        if candidates is None:
            candidates = [it for it in self._items if it not in on_path]
        candidates = list(candidates)
        if not candidates:
            raise IllegalAssignmentError("no candidate items")
        best_item, best_val = None, None
        for item in sorted(candidates, key=lambda it: self._item_index[it]):
            v = self.evoi(path, item)
            if best_val is None or v > best_val:
                best_item, best_val = item, v
        return best_item, best_val


# Convenience wrappers constructing a transient engine. Reuse an engine for
# anything beyond a one-off query; caching is per engine.

def joint_prob(diagram, assignment):
    return InferenceEngine(diagram).joint_prob(assignment)


def prob_of_path(diagram, path):
    return InferenceEngine(diagram).prob_of_path(path)


def expected_utility(diagram, alternative, path=None):
    return InferenceEngine(diagram).expected_utility(alternative, path)


def best_decisions(diagram, path=None):
    return InferenceEngine(diagram).best_decisions(path)


def evoi(diagram, path, item):
    return InferenceEngine(diagram).evoi(path, item)


def eu_expand(diagram, path, item):
    return InferenceEngine(diagram).eu_expand(path, item)


def max_evoi(diagram, path, candidates=None):
    return InferenceEngine(diagram).max_evoi(path, candidates)
