"""Regenerate the walker's test fixtures from the Python implementation.

For the hand-built walkthrough tree and twenty random compiled trees, this
drives the command-line walker through every response sequence the tree
admits (every full path plus an early stop at every evidence node) and
records the trace documents. The vitest suite replays the same sequences
through the browser session logic and demands identical traces.

Run from the repository root:  python3 frontend/scripts/make_fixtures.py
"""
import contextlib
import io
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "tests"))

import nets  # noqa: E402
from defaulttrees import (  # noqa: E402
    CompilerConfig,
    NetworkGenSpec,
    compile_diagram,
    generate_network,
    save_model,
)
from defaulttrees.cli import main as cli_main  # noqa: E402

FIXTURE_DIR = ROOT / "frontend" / "tests" / "fixtures"


def response_sequences(doc):
    """Every full root-to-decision sequence plus a stop at every Enode."""
    by_id = {n["id"]: n for n in doc["nodes"]}
    out = []

    def rec(node_id, prefix):
        node = by_id[node_id]
        if node["kind"] == "dnode":
            out.append(prefix)
            return
        out.append(prefix + ["stop"])
        for label, child in node["children"].items():
            rec(child, prefix + [label])

    rec(doc["nodes"][0]["id"], [])
    return out


def cli_trace(tree_path, responses):
    buf = io.StringIO()
    argv = ["walk", str(tree_path), "--responses", ",".join(responses), "--json"]
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv)
    assert code == 0, f"walk failed for {responses}"
    return json.loads(buf.getvalue())


def write_fixture(name, doc, tmp_dir):
    tree_path = tmp_dir / f"{name}.tree.json"
    tree_path.write_text(json.dumps(doc, indent=2) + "\n")
    cases = [
        {"responses": seq, "trace": cli_trace(tree_path, seq)}
        for seq in response_sequences(doc)
    ]
    fixture = {"name": name, "tree": doc, "cases": cases}
    out = FIXTURE_DIR / f"{name}.json"
    out.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"{out.relative_to(ROOT)}: {len(cases)} sequences")


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    tmp_dir = FIXTURE_DIR / ".work"
    tmp_dir.mkdir(exist_ok=True)

    write_fixture("walkthrough", nets.walkthrough_tree_doc(), tmp_dir)

    for i in range(20):
        spec = NetworkGenSpec(
            seed=500 + i,
            hidden=1 + i % 2,
            items=2 + i % 3,
            item_card=(2, 3),
            alternatives=2 + i % 2,
            sharpness=(0.5, 1.0, 2.0)[i % 3],
        )
        diagram = generate_network(spec)
        cfg = (
            CompilerConfig(algorithm="dd", min_gain=0.0, max_enodes=4)
            if i % 2 == 0
            else CompilerConfig(algorithm="ddn", depth=2, min_gain=0.0, max_enodes=5)
        )
        tree, _ = compile_diagram(diagram, cfg)
        write_fixture(f"compiled-{i:02d}", tree.to_dict(), tmp_dir)

    for leftover in tmp_dir.iterdir():
        leftover.unlink()
    tmp_dir.rmdir()


if __name__ == "__main__":
    main()
