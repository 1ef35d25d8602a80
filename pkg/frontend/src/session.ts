/**
 * Walk sessions over exported default trees.
 *
 * The session layer is pure and does no probability computation: every number
 * it ever exposes comes straight from the export's annotations. Walking here
 * must match the command-line walker response for response, which the fixture
 * tests enforce.
 */

export interface EnodeRec {
  id: number;
  kind: "enode";
  decisions: string[];
  eu: number;
  prob_of_path: number;
  item: string;
  eu_expand: number | null;
  children: Record<string, number>;
}

export interface DnodeRec {
  id: number;
  kind: "dnode";
  decisions: string[];
  eu: number;
  prob_of_path: number;
  open: boolean;
}

export type NodeRec = EnodeRec | DnodeRec;

export interface TreeDoc {
  format: string;
  fingerprint: string;
  nodes: NodeRec[];
}

export type SessionStatus = "in-progress" | "decided" | "stopped-early";

export interface WalkSession {
  tree: TreeDoc;
  byId: Map<number, NodeRec>;
  cursor: number;
  visited: number[];
  history: { item: string; value: string }[];
  status: SessionStatus;
}

export interface TraceDoc {
  status: "decided" | "stopped-early";
  decisions: string[];
  visited: number[];
  responses: { item: string; value: string }[];
  final_node: number;
}

export class SchemaError extends Error {
  constructor(public path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = "SchemaError";
  }
}

export class IllegalValueError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "IllegalValueError";
  }
}

function isObject(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function requireField(obj: Record<string, unknown>, field: string, where: string): unknown {
  if (!(field in obj)) {
    throw new SchemaError(`${where}.${field}`, "missing field");
  }
  return obj[field];
}

function parseNode(raw: unknown, where: string): NodeRec {
  if (!isObject(raw)) {
    throw new SchemaError(where, "expected an object");
  }
  const id = requireField(raw, "id", where);
  const kind = requireField(raw, "kind", where);
  const decisions = requireField(raw, "decisions", where);
  const eu = requireField(raw, "eu", where);
  const prob = requireField(raw, "prob_of_path", where);
  if (typeof id !== "number") throw new SchemaError(`${where}.id`, "expected a number");
  if (!Array.isArray(decisions) || decisions.some((d) => typeof d !== "string")) {
    throw new SchemaError(`${where}.decisions`, "expected a list of strings");
  }
  if (typeof eu !== "number") throw new SchemaError(`${where}.eu`, "expected a number");
  if (typeof prob !== "number") {
    throw new SchemaError(`${where}.prob_of_path`, "expected a number");
  }
  if (kind === "enode") {
    const item = requireField(raw, "item", where);
    const children = requireField(raw, "children", where);
    const gain = requireField(raw, "eu_expand", where);
    if (typeof item !== "string") throw new SchemaError(`${where}.item`, "expected a string");
    if (!isObject(children)) throw new SchemaError(`${where}.children`, "expected an object");
    const kids: Record<string, number> = {};
    for (const [label, cid] of Object.entries(children)) {
      if (typeof cid !== "number") {
        throw new SchemaError(`${where}.children[${JSON.stringify(label)}]`, "expected a node id");
      }
      kids[label] = cid;
    }
    return {
      id,
      kind: "enode",
      decisions: decisions as string[],
      eu,
      prob_of_path: prob,
      item,
      eu_expand: typeof gain === "number" ? gain : null,
      children: kids,
    };
  }
  if (kind === "dnode") {
    return {
      id,
      kind: "dnode",
      decisions: decisions as string[],
      eu,
      prob_of_path: prob,
      open: Boolean((raw as Record<string, unknown>)["open"]),
    };
  }
  throw new SchemaError(`${where}.kind`, `unknown kind ${JSON.stringify(kind)}`);
}

/** Parse and validate an exported tree document. */
export function parseTree(raw: unknown): TreeDoc {
  if (!isObject(raw)) throw new SchemaError("$", "expected an object");
  const format = requireField(raw, "format", "$");
  if (format !== "defaulttrees.dtree/1") {
    throw new SchemaError("$.format", `unsupported format ${JSON.stringify(format)}`);
  }
  const fingerprint = requireField(raw, "fingerprint", "$");
  if (typeof fingerprint !== "string") {
    throw new SchemaError("$.fingerprint", "expected a string");
  }
  const nodes = requireField(raw, "nodes", "$");
  if (!Array.isArray(nodes) || nodes.length === 0) {
    throw new SchemaError("$.nodes", "expected a non-empty list");
  }
  const parsed = nodes.map((n, i) => parseNode(n, `$.nodes[${i}]`));
  const ids = new Set(parsed.map((n) => n.id));
  for (const n of parsed) {
    if (n.kind === "enode") {
      for (const [label, cid] of Object.entries(n.children)) {
        if (!ids.has(cid)) {
          throw new SchemaError(
            `$.nodes[id=${n.id}].children[${JSON.stringify(label)}]`,
            `no node with id ${cid}`,
          );
        }
      }
    }
  }
  return { format, fingerprint, nodes: parsed };
}

/** Start a session at the root; a root default node is decided immediately. */
export function loadTree(raw: unknown): WalkSession {
  const tree = parseTree(raw);
  const byId = new Map(tree.nodes.map((n) => [n.id, n]));
  const rootRec = tree.nodes[0]!;
  return {
    tree,
    byId,
    cursor: rootRec.id,
    visited: [rootRec.id],
    history: [],
    status: rootRec.kind === "dnode" ? "decided" : "in-progress",
  };
}

export function currentNode(session: WalkSession): NodeRec {
  const node = session.byId.get(session.cursor);
  if (!node) throw new SchemaError("$", `dangling cursor ${session.cursor}`);
  return node;
}

/** Descend the branch for an entered evidence value. */
export function answer(session: WalkSession, value: string): WalkSession {
  if (session.status !== "in-progress") {
    throw new IllegalValueError("the walk has already ended");
  }
  const node = currentNode(session);
  if (node.kind !== "enode") {
    throw new IllegalValueError("the current node takes no evidence");
  }
  const childId = node.children[value];
  if (childId === undefined) {
    throw new IllegalValueError(`'${value}' is not a value of '${node.item}'`);
  }
  const child = session.byId.get(childId)!;
  return {
    ...session,
    cursor: childId,
    visited: [...session.visited, childId],
    history: [...session.history, { item: node.item, value }],
    status: child.kind === "dnode" ? "decided" : "in-progress",
  };
}

/** End processing now, taking the current node's default decisions. */
export function stop(session: WalkSession): WalkSession {
  if (session.status !== "in-progress") {
    throw new IllegalValueError("the walk has already ended");
  }
  return { ...session, status: "stopped-early" };
}

/** The trace document, byte-compatible with the command-line walker. */
export function exportTrace(session: WalkSession): TraceDoc {
  if (session.status === "in-progress") {
    throw new IllegalValueError("the walk has not ended yet");
  }
  const node = currentNode(session);
  return {
    status: session.status,
    decisions: [...node.decisions],
    visited: [...session.visited],
    responses: session.history.map((h) => ({ ...h })),
    final_node: session.cursor,
  };
}
