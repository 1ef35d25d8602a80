"""Default trees: evidence nodes that examine an item while carrying a
default decision, and default (decision) nodes that end processing.

Trees are persistent values: every expansion returns a new tree that shares
all untouched nodes with its predecessor, so candidate expansions can be
scored without mutation hazards. Node ids are assigned breadth-first,
left-to-right in branch value order, and are recomputed per tree snapshot.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
from dataclasses import dataclass

from .diagram import (
    EvidencePath,
    InfluenceDiagram,
    as_path_dict,
    enumerate_evidence_states,
    model_fingerprint,
)
from .errors import (
    ClosedNodeError,
    DefaultTreeError,
    IllegalResponseError,
    ItemAlreadyObservedError,
    SchemaError,
)
from .inference import InferenceEngine

STOP = "stop"
E_DESC_TOL = 1e-12

ENODE = "enode"
DNODE = "dnode"


@dataclass(frozen=True, eq=False)
class DTreeNode:
    """One tree node. Evidence nodes carry the item they examine, the branch
    labels (the item's values, in order), one child per label, and the
    default decision they would fall back to; default nodes carry only the
    decision. ``prob`` and ``eu`` are the annotations fixed at creation."""

    kind: str
    decisions: tuple[str, ...]
    eu: float
    prob: float
    item: str | None = None
    branch_labels: tuple[str, ...] | None = None
    children: tuple["DTreeNode | None", ...] | None = None
    open: bool = False
    eu_expand: float | None = None

    @property
    def is_enode(self) -> bool:
        return self.kind == ENODE

    @property
    def is_dnode(self) -> bool:
        return self.kind == DNODE


@dataclass(frozen=True)
class Shape:
    """Recursive description of an expansion subtree: an item plus, per
    value, either None (stop) or a nested shape."""

    item: str
    branches: tuple["Shape | None", ...]

    @property
    def depth(self) -> int:
        sub = [b.depth for b in self.branches if b is not None]
        return 1 + (max(sub) if sub else 0)

    def enode_count(self) -> int:
        return 1 + sum(b.enode_count() for b in self.branches if b is not None)

    def items_used(self):
        used = {self.item}
        for b in self.branches:
            if b is not None:
                used |= b.items_used()
        return used


@dataclass(frozen=True)
class ExpansionSubtree:
    """A candidate splice: a shape to graft at one open default node."""

    target: int
    shape: Shape

    @property
    def depth(self) -> int:
        return self.shape.depth


@dataclass(frozen=True)
class WalkTrace:
    status: str  # "decided" | "stopped-early"
    decisions: tuple[str, ...]
    visited: tuple[int, ...]
    responses: tuple[tuple[str, str], ...]
    final_node: int

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "decisions": list(self.decisions),
            "visited": list(self.visited),
            "responses": [{"item": i, "value": v} for i, v in self.responses],
            "final_node": self.final_node,
        }


@dataclass
class _Entry:
    node: DTreeNode
    id: int
    path: tuple[tuple[str, str], ...]
    parent: DTreeNode | None
    branch: int | None


class DTree:
    """A default tree over one diagram, plus the machinery to grow, score,
    export, and execute it."""

    def __init__(self, root: DTreeNode, diagram: InfluenceDiagram | None = None,
                 engine: InferenceEngine | None = None, fingerprint: str | None = None):
        self.root = root
        self.diagram = diagram
        if engine is None and diagram is not None:
            engine = InferenceEngine(diagram)
        self.engine = engine
        if fingerprint is None and diagram is not None:
            fingerprint = model_fingerprint(diagram)
        self.fingerprint = fingerprint
        self._entries: list[_Entry] | None = None
        self._by_node: dict[int, _Entry] | None = None

    # -- construction --------------------------------------------------------

    @classmethod
    def initial(cls, diagram: InfluenceDiagram,
                engine: InferenceEngine | None = None) -> "DTree":
        """The one-node tree: a single default node holding the best
        no-evidence decisions."""
        engine = engine or InferenceEngine(diagram)
        ds = engine.best_decisions({})
        root = DTreeNode(
            kind=DNODE,
            decisions=ds.decisions,
            eu=ds.eu,
            prob=1.0,
            open=bool(diagram.decision.observed),
        )
        return cls(root, diagram, engine)

    def _spawn(self, root: DTreeNode) -> "DTree":
        return DTree(root, self.diagram, self.engine, self.fingerprint)

    # -- indexing ------------------------------------------------------------

    def _index(self) -> list[_Entry]:
        if self._entries is None:
            entries = []
            by_node = {}
            queue = [(self.root, (), None, None)]
            next_id = 1
            while queue:
                node, path, parent, branch = queue.pop(0)
                e = _Entry(node, next_id, path, parent, branch)
                entries.append(e)
                by_node[id(node)] = e
                next_id += 1
                if node.is_enode and node.children is not None:
                    for bi, child in enumerate(node.children):
                        if child is not None:
                            label = node.branch_labels[bi]
                            queue.append((child, path + ((node.item, label),), node, bi))
            self._entries = entries
            self._by_node = by_node
        return self._entries

    def entries(self) -> list[_Entry]:
        return self._index()

    def entry(self, ref) -> _Entry:
        """Resolve a node reference: a BFS id, a node object, or a path."""
        self._index()
        if isinstance(ref, DTreeNode):
            return self._by_node[id(ref)]
        if isinstance(ref, int):
            for e in self._entries:
                if e.id == ref:
                    return e
            raise DefaultTreeError(f"no node with id {ref}")
        key = tuple(sorted(as_path_dict(ref).items()))
        for e in self._entries:
            if tuple(sorted(e.path)) == key:
                return e
        raise DefaultTreeError(f"no node at path {ref!r}")

    def node_count(self) -> int:
        return len(self._index())

    def enodes(self) -> list[_Entry]:
        return [e for e in self._index() if e.node.is_enode]

    def dnodes(self) -> list[_Entry]:
        return [e for e in self._index() if e.node.is_dnode]

    def open_dnodes(self) -> list[_Entry]:
        return [e for e in self._index() if e.node.is_dnode and e.node.open]

    def path(self, ref) -> EvidencePath:
        return EvidencePath(self.entry(ref).path)

    def evid_path(self, ref) -> tuple[str, ...]:
        return tuple(item for item, _ in self.entry(ref).path)

    # -- expansion -----------------------------------------------------------

    def _require_engine(self):
        if self.engine is None:
            raise DefaultTreeError("tree has no diagram attached")

    def expand(self, ref, item: str) -> "DTree":
        """Replace an open default node with an evidence node over ``item``,
        adding one default child per value. The new evidence node keeps the
        old decisions as its default; zero-probability children become closed
        default nodes inheriting the parent decisions."""
        self._require_engine()
        entry = self.entry(ref)
        node = entry.node
        if not node.is_dnode or not node.open:
            raise ClosedNodeError("target is not an open default node")
        if any(i == item for i, _ in entry.path):
            raise ItemAlreadyObservedError(f"{item!r} already on the path")
        eng = self.engine
        path = dict(entry.path)
        table = eng.table(path, 1)
        gain = eng.eu_expand(path, item)
        labels = self.diagram.chance(item).values
        on_path = {i for i, _ in entry.path} | {item}
        items_left = [i for i in self.diagram.decision.observed if i not in on_path]
        children = []
        for label in labels:
            ext = ((item, label),)
            mass = table.mass(ext)
            if mass > 0.0:
                ds = eng._decision_set(mass, table.util(ext))
                children.append(
                    DTreeNode(
                        kind=DNODE,
                        decisions=ds.decisions,
                        eu=ds.eu,
                        prob=mass,
                        open=bool(items_left),
                    )
                )
            else:
                children.append(
                    DTreeNode(
                        kind=DNODE,
                        decisions=node.decisions,
                        eu=node.eu,
                        prob=0.0,
                        open=False,
                    )
                )
        enode = DTreeNode(
            kind=ENODE,
            decisions=node.decisions,
            eu=node.eu,
            prob=node.prob,
            item=item,
            branch_labels=labels,
            children=tuple(children),
            eu_expand=gain,
        )
        return self._spawn(self._replace(entry, enode))

    def _replace(self, entry: _Entry, new_node: DTreeNode) -> DTreeNode:
        # rebuild the spine from the target up to the root
        chain = []
        e = entry
        while e.parent is not None:
            parent_entry = self._by_node[id(e.parent)]
            chain.append((parent_entry, e.branch))
            e = parent_entry
        current = new_node
        for parent_entry, branch in chain:
            p = parent_entry.node
            kids = p.children[:branch] + (current,) + p.children[branch + 1:]
            current = dataclasses.replace(p, children=kids)
        return current

    def expand_subtree(self, sub: ExpansionSubtree) -> "DTree":
        """Splice a shape at an open default node: the induced sequence of
        single expansions, applied depth-first in branch value order."""
        if not isinstance(sub.shape, Shape):
            raise DefaultTreeError("an expansion subtree needs at least one evidence node")
        entry = self.entry(sub.target)
        return self._splice(dict(entry.path), sub.shape)

    def _splice(self, path: dict, shape: Shape) -> "DTree":
        tree = self.expand(path, shape.item)
        labels = tree.diagram.chance(shape.item).values
        for label, branch in zip(labels, shape.branches):
            if branch is None:
                continue
            child_path = dict(path)
            child_path[shape.item] = label
            tree = tree._splice(child_path, branch)
        return tree

    # -- expected utility ------------------------------------------------------

    def eu_direct(self) -> float:
        """EU of executing the tree: every evidence state is walked to its
        default node and that node's (first) decision is applied."""
        self._require_engine()
        total = 0.0
        for e in self._index():
            if e.node.is_dnode:
                if e.node.prob <= 0.0:
                    continue
                total += self.engine.path_utility(dict(e.path), e.node.decisions[0])
        return total

    def eu_theorem1(self) -> float:
        """EU by decomposition: best no-evidence EU plus the sum of every
        evidence node's expansion gain, all recomputed from the diagram."""
        self._require_engine()
        total = self.engine.best_decisions({}).eu
        for e in self.enodes():
            total += self.engine.eu_expand(dict(e.path), e.node.item)
        return total

    # -- predicates -------------------------------------------------------------

    def dt_compiles(self, diagram: InfluenceDiagram | None = None) -> bool:
        """True iff every evidence state of the diagram reaches a default
        node when walked down the tree."""
        diagram = diagram or self.diagram
        if diagram is None:
            raise DefaultTreeError("no diagram to check against")
        limit = len(diagram.decision.observed) + 1
        for state in enumerate_evidence_states(diagram):
            values = state.as_dict()
            node = self.root
            steps = 0
            while node is not None and node.is_enode:
                if steps > limit:
                    return False
                steps += 1
                if node.item not in values or node.branch_labels is None:
                    return False
                try:
                    bi = node.branch_labels.index(values[node.item])
                except ValueError:
                    return False
                node = node.children[bi] if node.children else None
            if node is None or not node.is_dnode:
                return False
        return True

    def is_e_descending(self, min_insert: int = 1):
        """Check that no insertion of an evidence-value set (of at least
        ``min_insert`` values, over items off the path and distinct from the
        checked item) can raise an item's expansion gain below any open
        default node. Returns (ok, violations-with-witnesses)."""
        self._require_engine()
        eng = self.engine
        items = list(self.diagram.decision.observed)
        violations = []
        for entry in self.open_dnodes():
            on_path = {i for i, _ in entry.path}
            free = [i for i in items if i not in on_path]
            for item in free:
                lhs = eng.eu_expand(dict(entry.path), item)
                others = [i for i in free if i != item]
                for r in range(min_insert, len(others) + 1):
                    for subset in itertools.combinations(others, r):
                        value_sets = [self.diagram.chance(i).values for i in subset]
                        for combo in itertools.product(*value_sets):
                            inserted = dict(zip(subset, combo))
                            extended = dict(entry.path)
                            extended.update(inserted)
                            rhs = eng.eu_expand(extended, item)
                            if rhs > lhs + E_DESC_TOL:
                                violations.append(
                                    EDescViolation(
                                        dnode=entry.id,
                                        item=item,
                                        inserted=tuple(inserted.items()),
                                        gain_before=lhs,
                                        gain_after=rhs,
                                    )
                                )
        return (not violations, violations)

    # -- execution ---------------------------------------------------------------

    def walk(self, responses) -> WalkTrace:
        """Execute the tree against a response source.

        ``responses`` is an iterable of values or a callable
        ``(item, node) -> value``. The value :data:`STOP` at any evidence
        node takes that node's default decisions immediately.
        """
        if callable(responses):
            ask = responses
        else:
            it = iter(responses)

            def ask(item, node):
                try:
                    return next(it)
                except StopIteration:
                    raise IllegalResponseError(f"no response provided for {item!r}")

        self._index()
        node = self.root
        visited = [self._by_node[id(node)].id]
        answered = []
        while node.is_enode:
            value = ask(node.item, node)
            if value == STOP:
                return WalkTrace(
                    status="stopped-early",
                    decisions=node.decisions,
                    visited=tuple(visited),
                    responses=tuple(answered),
                    final_node=visited[-1],
                )
            if node.branch_labels is None or value not in node.branch_labels:
                raise IllegalResponseError(
                    f"{value!r} is not a value of {node.item!r}"
                )
            child = node.children[node.branch_labels.index(value)]
            if child is None:
                raise IllegalResponseError(
                    f"tree has no branch for {node.item}={value}"
                )
            answered.append((node.item, value))
            node = child
            visited.append(self._by_node[id(node)].id)
        return WalkTrace(
            status="decided",
            decisions=node.decisions,
            visited=tuple(visited),
            responses=tuple(answered),
            final_node=visited[-1],
        )

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        self._index()
        for e in self._entries:
            n = e.node
            rec = {
                "id": e.id,
                "kind": n.kind,
                "decisions": list(n.decisions),
                "eu": float(n.eu),
                "prob_of_path": float(n.prob),
            }
            if n.is_enode:
                rec["item"] = n.item
                rec["eu_expand"] = float(n.eu_expand) if n.eu_expand is not None else None
                rec["children"] = {
                    label: self._by_node[id(child)].id
                    for label, child in zip(n.branch_labels, n.children)
                    if child is not None
                }
            else:
                rec["open"] = bool(n.open)
            nodes.append(rec)
        return {
            "format": "defaulttrees.dtree/1",
            "fingerprint": self.fingerprint,
            "nodes": nodes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict, diagram: InfluenceDiagram | None = None,
                  engine: InferenceEngine | None = None) -> "DTree":
        if not isinstance(doc, dict):
            raise SchemaError("$", "expected an object")
        for field in ("format", "fingerprint", "nodes"):
            if field not in doc:
                raise SchemaError(f"$.{field}", "missing field")
        if doc["format"] != "defaulttrees.dtree/1":
            raise SchemaError("$.format", f"unsupported format {doc['format']!r}")
        if not isinstance(doc["nodes"], list) or not doc["nodes"]:
            raise SchemaError("$.nodes", "expected a non-empty list")
        specs = {}
        for i, rec in enumerate(doc["nodes"]):
            where = f"$.nodes[{i}]"
            if not isinstance(rec, dict):
                raise SchemaError(where, "expected an object")
            for field in ("id", "kind", "decisions", "eu", "prob_of_path"):
                if field not in rec:
                    raise SchemaError(f"{where}.{field}", "missing field")
            if rec["kind"] not in (ENODE, DNODE):
                raise SchemaError(f"{where}.kind", f"unknown kind {rec['kind']!r}")
            if rec["kind"] == ENODE:
                for field in ("item", "children", "eu_expand"):
                    if field not in rec:
                        raise SchemaError(f"{where}.{field}", "missing field")
            specs[rec["id"]] = rec

        building = set()

        def build(node_id, where) -> DTreeNode:
            if node_id not in specs:
                raise SchemaError(where, f"no node with id {node_id}")
            if node_id in building:
                raise SchemaError(where, f"cycle through node {node_id}")
            building.add(node_id)
            rec = specs[node_id]
            if rec["kind"] == ENODE:
                labels = tuple(rec["children"].keys())
                children = tuple(
                    build(cid, f"$.nodes[{node_id}].children[{label!r}]")
                    for label, cid in rec["children"].items()
                )
                node = DTreeNode(
                    kind=ENODE,
                    decisions=tuple(rec["decisions"]),
                    eu=float(rec["eu"]),
                    prob=float(rec["prob_of_path"]),
                    item=rec["item"],
                    branch_labels=labels,
                    children=children,
                    eu_expand=rec["eu_expand"],
                )
            else:
                node = DTreeNode(
                    kind=DNODE,
                    decisions=tuple(rec["decisions"]),
                    eu=float(rec["eu"]),
                    prob=float(rec["prob_of_path"]),
                    open=bool(rec.get("open", False)),
                )
            building.discard(node_id)
            return node

        root_id = doc["nodes"][0]["id"]
        root = build(root_id, "$.nodes[0]")
        tree = cls(root, diagram, engine, fingerprint=doc["fingerprint"])
        # If a diagram is attached, branch labels must follow declared value
        # order so that recomputed ids stay stable.
        if diagram is not None:
            for e in tree.entries():
                n = e.node
                if n.is_enode and n.item in diagram._by_name:
                    declared = diagram.chance(n.item).values
                    order = [l for l in declared if l in n.branch_labels]
                    if tuple(order) != n.branch_labels:
                        raise SchemaError("$.nodes", f"children of item {n.item!r} out of value order")
        return tree

    @classmethod
    def from_json(cls, text: str, diagram=None, engine=None) -> "DTree":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"not valid JSON: {exc}") from exc
        return cls.from_dict(doc, diagram, engine)

    def to_dot(self) -> str:
        """Graphviz text for documentation and quick visual checks."""
        self._index()
        lines = ["digraph dtree {", "  node [fontname=Helvetica];"]
        for e in self._entries:
            n = e.node
            if n.is_enode:
                label = f"{n.item}?\\ndefault {'/'.join(n.decisions)}"
                shape = "ellipse"
            else:
                label = f"{'/'.join(n.decisions)}\\neu={n.eu:.4g}"
                shape = "box"
            style = ", style=dashed" if (n.is_dnode and n.open) else ""
            lines.append(f'  n{e.id} [label="{label}", shape={shape}{style}];')
        for e in self._entries:
            n = e.node
            if n.is_enode and n.children:
                for label, child in zip(n.branch_labels, n.children):
                    if child is not None:
                        cid = self._by_node[id(child)].id
                        lines.append(f'  n{e.id} -> n{cid} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EDescViolation:
    dnode: int
    item: str
    inserted: tuple[tuple[str, str], ...]
    gain_before: float
    gain_after: float

    def __str__(self):
        ins = ", ".join(f"{i}={v}" for i, v in self.inserted)
        return (
            f"node {self.dnode}: inserting {{{ins}}} raises gain of "
            f"{self.item} from {self.gain_before!r} to {self.gain_after!r}"
        )


# Module-level forms of the tree operations.

def path(tree: DTree, ref) -> EvidencePath:
    return tree.path(ref)


def evid_path(tree: DTree, ref) -> tuple[str, ...]:
    return tree.evid_path(ref)


def expand(tree: DTree, ref, item: str) -> DTree:
    return tree.expand(ref, item)


def expand_subtree(tree: DTree, sub: ExpansionSubtree) -> DTree:
    return tree.expand_subtree(sub)


def dtree_eu_direct(tree: DTree) -> float:
    return tree.eu_direct()


def dtree_eu_theorem1(tree: DTree) -> float:
    return tree.eu_theorem1()


def dt_compiles(tree: DTree, diagram: InfluenceDiagram | None = None) -> bool:
    return tree.dt_compiles(diagram)


def is_e_descending(tree: DTree, min_insert: int = 1):
    return tree.is_e_descending(min_insert)


def walk(tree: DTree, responses) -> WalkTrace:
    return tree.walk(responses)
