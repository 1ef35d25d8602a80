/**
 * Fixture-driven equivalence with the command-line walker: for every tree in
 * tests/fixtures and every response sequence (early stops included), the
 * session must reproduce the recorded trace exactly.
 */
import { readdirSync, readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  answer,
  currentNode,
  exportTrace,
  loadTree,
  parseTree,
  stop,
  IllegalValueError,
  SchemaError,
  TraceDoc,
  WalkSession,
} from "../src/session.js";

const fixtureDir = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

interface Fixture {
  name: string;
  tree: unknown;
  cases: { responses: string[]; trace: TraceDoc }[];
}

const fixtures: Fixture[] = readdirSync(fixtureDir)
  .filter((f) => f.endsWith(".json"))
  .sort()
  .map((f) => JSON.parse(readFileSync(join(fixtureDir, f), "utf-8")));

function drive(session: WalkSession, responses: string[]): WalkSession {
  for (const r of responses) {
    session = r === "stop" ? stop(session) : answer(session, r);
  }
  return session;
}

describe("walker sessions replay the command-line traces", () => {
  for (const fixture of fixtures) {
    it(`${fixture.name} (${fixture.cases.length} sequences)`, () => {
      for (const c of fixture.cases) {
        const session = drive(loadTree(fixture.tree), c.responses);
        expect(exportTrace(session)).toEqual(c.trace);
      }
    });
  }
});

describe("session mechanics", () => {
  const walkthrough = fixtures.find((f) => f.name === "walkthrough")!;

  it("starts at the root with the default on display", () => {
    const s = loadTree(walkthrough.tree);
    const node = currentNode(s);
    expect(s.status).toBe("in-progress");
    expect(node.kind).toBe("enode");
    expect(node.decisions).toEqual(["d1"]);
  });

  it("a single-dnode tree is decided immediately", () => {
    const doc = {
      format: "defaulttrees.dtree/1",
      fingerprint: "x",
      nodes: [
        { id: 1, kind: "dnode", decisions: ["d1"], eu: 0.5, prob_of_path: 1.0, open: false },
      ],
    };
    const s = loadTree(doc);
    expect(s.status).toBe("decided");
    expect(exportTrace(s)).toEqual({
      status: "decided",
      decisions: ["d1"],
      visited: [1],
      responses: [],
      final_node: 1,
    });
  });

  it("rejects unknown values and leaves the session unchanged", () => {
    const s = loadTree(walkthrough.tree);
    expect(() => answer(s, "nope")).toThrow(IllegalValueError);
    expect(s.status).toBe("in-progress");
    expect(s.visited).toEqual([1]);
  });

  it("stop takes the current default and marks the session stopped", () => {
    let s = loadTree(walkthrough.tree);
    s = answer(s, "a3");
    s = stop(s);
    expect(s.status).toBe("stopped-early");
    expect(exportTrace(s).decisions).toEqual(["d3"]);
  });

  it("decided sessions accept no further input", () => {
    let s = loadTree(walkthrough.tree);
    s = answer(s, "a2");
    expect(s.status).toBe("decided");
    expect(() => answer(s, "b1")).toThrow(IllegalValueError);
    expect(() => stop(s)).toThrow(IllegalValueError);
  });

  it("truncated documents raise schema errors naming the field", () => {
    expect(() => parseTree({ format: "defaulttrees.dtree/1" })).toThrow(SchemaError);
    expect(() => parseTree({ format: "defaulttrees.dtree/1", fingerprint: "x", nodes: [] }))
      .toThrow(/nodes/);
    const missingItem = {
      format: "defaulttrees.dtree/1",
      fingerprint: "x",
      nodes: [
        { id: 1, kind: "enode", decisions: ["d1"], eu: 0, prob_of_path: 1, eu_expand: 0, children: {} },
      ],
    };
    expect(() => parseTree(missingItem)).toThrow(/item/);
  });

  it("dangling child ids are rejected", () => {
    const doc = {
      format: "defaulttrees.dtree/1",
      fingerprint: "x",
      nodes: [
        { id: 1, kind: "enode", decisions: ["d1"], eu: 0, prob_of_path: 1,
          item: "A", eu_expand: 0, children: { a1: 99 } },
      ],
    };
    expect(() => parseTree(doc)).toThrow(/99/);
  });
});
