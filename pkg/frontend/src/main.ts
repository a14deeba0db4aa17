/** Page wire-up: create or attach a session from the query string, lay out
 * the graph once, then long-poll and repaint on version changes. */

import { SessionClient } from "./api.js";
import { computeLayout } from "./layout.js";
import { SessionViewModel } from "./model.js";
import { CurvePanel, GraphView, LabelPicker } from "./render.js";

async function boot() {
  const params = new URLSearchParams(window.location.search);
  const dataset = params.get("dataset") ?? "karate";
  const strategy = params.get("strategy") ?? "mi";
  const seed = Number(params.get("seed") ?? "0");
  const kParam = params.get("k");

  // same-origin by default; ?api=http://host:port points elsewhere
  const client = new SessionClient(params.get("api") ?? "");
  const model = new SessionViewModel(client);
  const existing = params.get("session");
  if (existing) {
    await model.attach(existing);
  } else {
    await model.start(dataset, strategy, seed, kParam ? Number(kParam) : undefined);
  }
  const graph = model.graph!;

  const graphHost = document.getElementById("graph")!;
  const curveHost = document.getElementById("curve")!;
  const statusEl = document.getElementById("status")!;

  const layout = computeLayout(graph.n, graph.edges);
  const classNames =
    graph.class_names ?? Array.from({ length: graph.k }, (_, i) => `class ${i}`);
  const picker = new LabelPicker(document.body, classNames);
  const benchmark = model.state?.accuracy != null;
  const curve = new CurvePanel(curveHost, benchmark);

  const view = new GraphView(graphHost, graph, layout, {
    onNodeClick: (node) => {
      if (model.isExplored(node) || model.phase !== "awaiting-label") return;
      picker.open(node, graph.nodes[node].name, async (label) => {
        const result = await model.submitLabel(node, label);
        if (result.outcome === "conflict") {
          // state was refetched; re-prompt against the fresh version
          statusEl.textContent = `conflict (${result.code}); state refreshed, try again`;
        } else if (result.outcome === "rejected") {
          statusEl.textContent = `rejected: ${result.message}`;
        }
      });
    },
  });

  model.onChange((state) => {
    view.update(state);
    curve.update(model.curve);
    const suggestion =
      state.suggested_node !== null ? graph.nodes[state.suggested_node].name : "-";
    statusEl.textContent =
      `stage ${state.stage} | ${state.phase} | strategy ${state.strategy}` +
      (state.phase === "awaiting-label" ? ` | suggested: ${suggestion}` : "");
  });
  model.refresh();

  // long-poll loop; on network failure retry with the last seen version
  for (;;) {
    if (model.phase === "finished") break;
    try {
      await model.pollOnce();
    } catch {
      await new Promise((r) => setTimeout(r, 1000));
    }
  }
}

boot().catch((err) => {
  const el = document.getElementById("status");
  if (el) el.textContent = `failed to start: ${err}`;
});
