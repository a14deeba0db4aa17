/** DOM rendering: network view with confidence coloring, label picker,
 * and the live curve panel. All state flows in from SessionViewModel;
 * nothing here talks to the server. */

import { GraphPayload, StatePayload } from "./api.js";
import { LayoutPoint } from "./layout.js";
import { confidence, CurvePoint } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// two-class palettes blend toward grey at low confidence
const CLASS_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                      "#8c564b", "#e377c2", "#7f7f7f"];

function mix(hex: string, t: number): string {
  // t=1 keeps the class color, t=0 gives neutral grey
  const grey = 209;
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  const c = (x: number) => Math.round(grey + (x - grey) * t);
  return `rgb(${c(r)},${c(g)},${c(b)})`;
}

export function nodeColor(marginal: number[] | null, k: number): string {
  if (!marginal) return "#d1d1d1";
  let best = 0;
  for (let c = 1; c < marginal.length; c++) if (marginal[c] > marginal[best]) best = c;
  return mix(CLASS_COLORS[best % CLASS_COLORS.length], confidence(marginal, k));
}

export interface GraphViewCallbacks {
  onNodeClick: (node: number) => void;
}

export class GraphView {
  private svg: SVGSVGElement;
  private circles: SVGCircleElement[] = [];
  private lastVersion = -1;

  constructor(
    container: HTMLElement,
    private graph: GraphPayload,
    layout: LayoutPoint[],
    private callbacks: GraphViewCallbacks,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", "0 0 800 600");
    container.appendChild(this.svg);
    for (const [u, v] of graph.edges) {
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(layout[u].x));
      line.setAttribute("y1", String(layout[u].y));
      line.setAttribute("x2", String(layout[v].x));
      line.setAttribute("y2", String(layout[v].y));
      line.setAttribute("stroke", "#bbb");
      this.svg.appendChild(line);
    }
    for (const node of graph.nodes) {
      const c = document.createElementNS(SVG_NS, "circle");
      c.setAttribute("cx", String(layout[node.id].x));
      c.setAttribute("cy", String(layout[node.id].y));
      c.setAttribute("r", "9");
      c.setAttribute("data-node", String(node.id));
      c.addEventListener("click", () => this.callbacks.onNodeClick(node.id));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = node.name;
      c.appendChild(title);
      this.svg.appendChild(c);
      this.circles.push(c);
    }
  }

  /** Recolor nodes and move the suggestion badge; skips stale repaints. */
  update(state: StatePayload) {
    if (state.version === this.lastVersion) return;
    this.lastVersion = state.version;
    const explored = new Map(state.explored.map((e) => [e.node, e.label]));
    for (const node of this.graph.nodes) {
      const c = this.circles[node.id];
      const lab = explored.get(node.id);
      if (lab !== undefined) {
        c.setAttribute("fill", CLASS_COLORS[lab % CLASS_COLORS.length]);
        c.setAttribute("stroke", "#000");
        c.setAttribute("stroke-width", "2");
      } else {
        const row = state.marginals ? state.marginals[node.id] : null;
        c.setAttribute("fill", nodeColor(row, state.k));
        c.setAttribute("stroke", "#666");
        c.setAttribute("stroke-width", "1");
      }
      const suggested = state.suggested_node === node.id;
      c.setAttribute("r", suggested ? "14" : "9");
      c.classList.toggle("suggested", suggested);
    }
  }
}

export class LabelPicker {
  private root: HTMLElement;

  constructor(container: HTMLElement, private classNames: string[]) {
    this.root = document.createElement("div");
    this.root.className = "label-picker";
    this.root.style.display = "none";
    container.appendChild(this.root);
  }

  /** Offer exactly the k known classes for an unexplored node; out-of-range
   * labels are impossible by construction. */
  open(node: number, nodeName: string, onPick: (label: number) => void) {
    this.root.innerHTML = "";
    const heading = document.createElement("div");
    heading.textContent = `label node ${nodeName}`;
    this.root.appendChild(heading);
    this.classNames.forEach((name, label) => {
      const btn = document.createElement("button");
      btn.textContent = name;
      btn.addEventListener("click", () => {
        this.close();
        onPick(label);
      });
      this.root.appendChild(btn);
    });
    this.root.style.display = "block";
  }

  close() {
    this.root.style.display = "none";
  }
}

export class CurvePanel {
  private svg: SVGSVGElement;
  private benchmark: boolean;

  constructor(container: HTMLElement, benchmark: boolean) {
    this.benchmark = benchmark;
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", "0 0 400 160");
    container.appendChild(this.svg);
  }

  /** Benchmark mode plots accuracy at q=0.9; field mode (no truth file on
   * the server) falls back to the mean marginal entropy trend. */
  update(curve: CurvePoint[]) {
    this.svg.innerHTML = "";
    if (curve.length === 0) return;
    const values = curve.map((p) =>
      this.benchmark && p.accuracy !== null ? p.accuracy : normEntropy(p));
    const maxStage = Math.max(curve[curve.length - 1].stage, 1);
    const pts = curve
      .map((p, i) => {
        const x = 20 + (p.stage / maxStage) * 360;
        const y = 140 - values[i] * 120;
        return `${x},${y}`;
      })
      .join(" ");
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", pts);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", this.benchmark ? "#1f77b4" : "#d62728");
    line.setAttribute("stroke-width", "2");
    this.svg.appendChild(line);
  }
}

function normEntropy(p: CurvePoint): number {
  // flipped so "higher is better" like accuracy
  return Math.max(0, 1 - p.meanEntropy);
}
