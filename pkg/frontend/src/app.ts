/**
 * DOM shell around the walk session: load an exported tree, answer the
 * questions as evidence arrives, stop whenever time runs out, download the
 * trace. All displayed numbers are the export's annotations.
 */
import {
  answer,
  currentNode,
  exportTrace,
  loadTree,
  stop,
  IllegalValueError,
  SchemaError,
  WalkSession,
} from "./session.js";

let session: WalkSession | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function fmt(x: number): string {
  return x.toFixed(4);
}

function setError(message: string) {
  el("error").textContent = message;
}

function render() {
  const panel = el("panel");
  const historyList = el<HTMLUListElement>("history");
  const actions = el("actions");
  panel.innerHTML = "";
  actions.innerHTML = "";
  historyList.innerHTML = "";
  setError("");
  if (!session) {
    panel.textContent = "Load an exported tree file to begin.";
    return;
  }
  const s = session;
  const node = currentNode(s);

  for (const h of s.history) {
    const li = document.createElement("li");
    li.textContent = `${h.item} = ${h.value}`;
    historyList.appendChild(li);
  }

  const status = document.createElement("p");
  status.className = "status";
  const defaults = node.decisions.join(", ");
  if (s.status === "decided") {
    status.textContent = `Decision: ${defaults}`;
  } else if (s.status === "stopped-early") {
    status.textContent = `Stopped early — default decision: ${defaults}`;
  } else {
    status.textContent = `Current default: ${defaults}`;
  }
  panel.appendChild(status);

  const annotations = document.createElement("p");
  annotations.className = "annotations";
  annotations.textContent =
    `node ${node.id} · P(path) ${fmt(node.prob_of_path)} · EU ${fmt(node.eu)}` +
    (node.kind === "enode" && node.eu_expand !== null
      ? ` · expansion gain ${fmt(node.eu_expand)}`
      : "");
  panel.appendChild(annotations);

  if (s.status === "in-progress" && node.kind === "enode") {
    const q = document.createElement("p");
    q.textContent = `Examine ${node.item}:`;
    panel.appendChild(q);
    for (const label of Object.keys(node.children)) {
      const btn = document.createElement("button");
      btn.textContent = `${node.item} = ${label}`;
      btn.addEventListener("click", () => {
        try {
          session = answer(s, label);
        } catch (err) {
          if (err instanceof IllegalValueError) {
            setError(err.message);
            return;
          }
          throw err;
        }
        render();
      });
      actions.appendChild(btn);
    }
    const stopBtn = document.createElement("button");
    stopBtn.textContent = "Stop — take the default";
    stopBtn.className = "stop";
    stopBtn.addEventListener("click", () => {
      session = stop(s);
      render();
    });
    actions.appendChild(stopBtn);
  } else {
    const dl = document.createElement("button");
    dl.textContent = "Download trace";
    dl.addEventListener("click", () => {
      const doc = exportTrace(s);
      const blob = new Blob([JSON.stringify(doc, null, 2) + "\n"], {
        type: "application/json",
      });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "walk-trace.json";
      a.click();
      URL.revokeObjectURL(a.href);
    });
    actions.appendChild(dl);
    const again = document.createElement("button");
    again.textContent = "Walk again";
    again.addEventListener("click", () => {
      if (session) {
        session = loadTree(session.tree as unknown);
        render();
      }
    });
    actions.appendChild(again);
  }
}

function wireFileInput() {
  const input = el<HTMLInputElement>("tree-file");
  input.addEventListener("change", async () => {
    const file = input.files?.[0];
    if (!file) return;
    try {
      const text = await file.text();
      session = loadTree(JSON.parse(text));
    } catch (err) {
      session = null;
      if (err instanceof SchemaError) {
        setError(`not a tree export — ${err.message}`);
      } else if (err instanceof SyntaxError) {
        setError(`not valid JSON: ${err.message}`);
      } else {
        throw err;
      }
    }
    render();
  });
}

wireFileInput();
render();
