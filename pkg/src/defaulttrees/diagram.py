"""Discrete decision networks: chance nodes with CPTs, one decision node with
information arcs, one value node with a utility table.

Tables are indexed row-major over the declared parent order and declared value
order, which keeps the JSON file format bit-stable.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError

ROW_SUM_TOL = 1e-9


def _as_tuple(seq):
    return tuple(seq)


@dataclass(eq=False)
class ChanceNode:
    """A discrete chance variable with a conditional probability table.

    ``cpt`` holds one row per configuration of ``parents`` (row-major over the
    declared parent order) and one column per value.
    """

    name: str
    values: tuple[str, ...]
    parents: tuple[str, ...] = ()
    cpt: np.ndarray = None

    def __post_init__(self):
        self.values = _as_tuple(self.values)
        self.parents = _as_tuple(self.parents)
        self.cpt = np.asarray(self.cpt, dtype=float)

    @property
    def card(self) -> int:
        return len(self.values)


@dataclass(eq=False)
class DecisionNode:
    """The decision variable: alternatives plus the observed evidence items."""

    name: str
    alternatives: tuple[str, ...]
    observed: tuple[str, ...] = ()

    def __post_init__(self):
        self.alternatives = _as_tuple(self.alternatives)
        self.observed = _as_tuple(self.observed)


@dataclass(eq=False)
class ValueNode:
    """Utility table over the cross product of its parents (chance and/or
    the decision node), flat row-major."""

    parents: tuple[str, ...]
    utility: np.ndarray = None

    def __post_init__(self):
        self.parents = _as_tuple(self.parents)
        self.utility = np.asarray(self.utility, dtype=float).reshape(-1)


@dataclass(eq=False)
class InfluenceDiagram:
    """A validated-on-demand decision network."""

    chance_nodes: tuple[ChanceNode, ...]
    decision: DecisionNode
    value: ValueNode

    def __post_init__(self):
        self.chance_nodes = _as_tuple(self.chance_nodes)
        self._by_name = {c.name: c for c in self.chance_nodes}

    def chance(self, name: str) -> ChanceNode:
        return self._by_name[name]

    @property
    def chance_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.chance_nodes)

    @property
    def evidence_items(self) -> tuple[str, ...]:
        return self.decision.observed

    @property
    def hidden_names(self) -> tuple[str, ...]:
        observed = set(self.decision.observed)
        return tuple(n for n in self.chance_names if n not in observed)


@dataclass(frozen=True)
class Violation:
    node: str
    rule: str
    detail: str = ""

    def __str__(self):
        text = f"{self.node}: {self.rule}"
        if self.detail:
            text += f" ({self.detail})"
        return text


@dataclass(frozen=True)
class EvidencePath:
    """A partial assignment of values to evidence items, no item repeated."""

    assignments: tuple[tuple[str, str], ...] = ()

    @classmethod
    def from_mapping(cls, mapping) -> "EvidencePath":
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignments)

    def items(self) -> tuple[str, ...]:
        return tuple(item for item, _ in self.assignments)

    def extend(self, item: str, value: str) -> "EvidencePath":
        return EvidencePath(self.assignments + ((item, value),))

    def __len__(self):
        return len(self.assignments)

    def __contains__(self, item):
        return any(i == item for i, _ in self.assignments)


class EvidenceState(EvidencePath):
    """A total assignment: one value for every evidence item."""


def as_path_dict(path) -> dict[str, str]:
    """Normalize a path argument (mapping, EvidencePath, or pair iterable)."""
    if path is None:
        return {}
    if isinstance(path, EvidencePath):
        return path.as_dict()
    if isinstance(path, dict):
        return dict(path)
    return dict(path)


def evidence_items(diagram: InfluenceDiagram) -> list[str]:
    """Evidence items in declaration order (the global tie-break order)."""
    return list(diagram.decision.observed)


def enumerate_evidence_states(diagram: InfluenceDiagram) -> list[EvidenceState]:
    """All total evidence assignments, lexicographic in declaration order."""
    items = diagram.decision.observed
    value_sets = [diagram.chance(i).values for i in items]
    states = []
    for combo in itertools.product(*value_sets):
        states.append(EvidenceState(tuple(zip(items, combo))))
    return states


def _parent_config_count(diagram, parents, extra_card=None):
    n = 1
    for p in parents:
        if p == diagram.decision.name:
            n *= len(diagram.decision.alternatives)
        elif p in diagram._by_name:
            n *= diagram.chance(p).card
        else:
            return None
    return n


def validate(diagram: InfluenceDiagram) -> list[Violation]:
    """Check every structural invariant; an empty report means valid.

    Violations are data, not failures: callers decide what to do with them.
    """
    out = []
    chance_names = [c.name for c in diagram.chance_nodes]
    seen = set()
    all_names = chance_names + [diagram.decision.name]
    for name in all_names:
        if name in seen:
            out.append(Violation(name, "duplicate name"))
        seen.add(name)

    for node in diagram.chance_nodes:
        if len(node.values) < 2:
            out.append(Violation(node.name, "fewer than 2 values"))
        if len(set(node.values)) != len(node.values):
            out.append(Violation(node.name, "duplicate value labels"))
        for p in node.parents:
            if p not in diagram._by_name:
                out.append(Violation(node.name, "unknown parent", p))
            elif p == node.name:
                out.append(Violation(node.name, "self parent"))
        rows = _parent_config_count(diagram, node.parents)
        if rows is None:
            continue
        cpt = node.cpt
        if cpt.ndim == 1:
            cpt = cpt.reshape(rows, -1) if cpt.size == rows * node.card else cpt
        if cpt.shape != (rows, node.card):
            out.append(
                Violation(
                    node.name,
                    "cpt shape mismatch",
                    f"expected {rows}x{node.card}, got {cpt.shape}",
                )
            )
            continue
        if np.any(cpt < 0.0) or np.any(cpt > 1.0):
            out.append(Violation(node.name, "cpt entry outside [0, 1]"))
        bad_rows = np.where(np.abs(cpt.sum(axis=1) - 1.0) > ROW_SUM_TOL)[0]
        for r in bad_rows:
            out.append(
                Violation(node.name, "row sum != 1", f"row {r} sums to {float(cpt[r].sum())!r}")
            )

    # chance-parent graph must be acyclic
    order, remaining = [], {c.name: set(p for p in c.parents if p in diagram._by_name) for c in diagram.chance_nodes}
    while remaining:
        ready = [n for n, ps in remaining.items() if not ps]
        if not ready:
            out.append(Violation(",".join(sorted(remaining)), "cycle"))
            break
        for n in ready:
            del remaining[n]
            for ps in remaining.values():
                ps.discard(n)
        order.extend(ready)

    dec = diagram.decision
    if len(dec.alternatives) < 2:
        out.append(Violation(dec.name, "fewer than 2 alternatives"))
    if len(set(dec.alternatives)) != len(dec.alternatives):
        out.append(Violation(dec.name, "duplicate alternatives"))
    if len(set(dec.observed)) != len(dec.observed):
        out.append(Violation(dec.name, "duplicate observed items"))
    for item in dec.observed:
        if item not in diagram._by_name:
            out.append(Violation(dec.name, "observed item is not a chance node", item))

    val = diagram.value
    if len(set(val.parents)) != len(val.parents):
        out.append(Violation("value", "duplicate parents"))
    for p in val.parents:
        if p not in diagram._by_name and p != dec.name:
            out.append(Violation("value", "unknown parent", p))
    rows = _parent_config_count(diagram, val.parents)
    if rows is not None and val.utility.size != rows:
        out.append(
            Violation("value", "utility size mismatch", f"expected {rows}, got {val.utility.size}")
        )
    if not np.all(np.isfinite(val.utility)):
        out.append(Violation("value", "non-finite utility"))
    return out


# ---------------------------------------------------------------------------
# JSON model format
# ---------------------------------------------------------------------------

_CHANCE_KEYS = {"name", "values", "parents", "cpt"}
_DECISION_KEYS = {"name", "alternatives", "observed"}
_VALUE_KEYS = {"parents", "utility"}
_TOP_KEYS = {"chance_nodes", "decision", "value"}


def _require_keys(obj, keys, where):
    if not isinstance(obj, dict):
        raise SchemaError(where, "expected an object")
    unknown = set(obj) - keys
    if unknown:
        raise SchemaError(where, f"unknown fields {sorted(unknown)}")
    missing = keys - set(obj)
    if missing:
        raise SchemaError(where, f"missing fields {sorted(missing)}")


def diagram_from_dict(doc: dict) -> InfluenceDiagram:
    """Parse the strict JSON model schema; unknown fields are rejected."""
    _require_keys(doc, _TOP_KEYS, "$")
    if not isinstance(doc["chance_nodes"], list):
        raise SchemaError("$.chance_nodes", "expected a list")
    chance = []
    for i, c in enumerate(doc["chance_nodes"]):
        where = f"$.chance_nodes[{i}]"
        _require_keys(c, _CHANCE_KEYS, where)
        values = c["values"]
        rows = len(c["cpt"]) // max(len(values), 1) if values else 0
        try:
            cpt = np.asarray(c["cpt"], dtype=float).reshape(rows, len(values))
        except (ValueError, TypeError) as exc:
            raise SchemaError(where + ".cpt", str(exc)) from exc
        chance.append(ChanceNode(c["name"], values, c["parents"], cpt))
    _require_keys(doc["decision"], _DECISION_KEYS, "$.decision")
    d = doc["decision"]
    decision = DecisionNode(d["name"], d["alternatives"], d["observed"])
    _require_keys(doc["value"], _VALUE_KEYS, "$.value")
    v = doc["value"]
    try:
        utility = np.asarray(v["utility"], dtype=float)
    except (ValueError, TypeError) as exc:
        raise SchemaError("$.value.utility", str(exc)) from exc
    return InfluenceDiagram(tuple(chance), decision, ValueNode(v["parents"], utility))


def diagram_to_dict(diagram: InfluenceDiagram) -> dict:
    return {
        "chance_nodes": [
            {
                "name": c.name,
                "values": list(c.values),
                "parents": list(c.parents),
                "cpt": [float(x) for x in c.cpt.reshape(-1)],
            }
            for c in diagram.chance_nodes
        ],
        "decision": {
            "name": diagram.decision.name,
            "alternatives": list(diagram.decision.alternatives),
            "observed": list(diagram.decision.observed),
        },
        "value": {
            "parents": list(diagram.value.parents),
            "utility": [float(x) for x in diagram.value.utility],
        },
    }


def canonical_model_bytes(diagram: InfluenceDiagram) -> bytes:
    doc = diagram_to_dict(diagram)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def model_fingerprint(diagram: InfluenceDiagram) -> str:
    """Content hash of the canonical model serialization."""
    return hashlib.sha256(canonical_model_bytes(diagram)).hexdigest()


def load_model(path) -> InfluenceDiagram:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"not valid JSON: {exc}") from exc
    return diagram_from_dict(doc)


def save_model(diagram: InfluenceDiagram, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(diagram_to_dict(diagram), fh, indent=2)
        fh.write("\n")
