/** Deterministic force-directed layout, computed once per graph and then
 * frozen. Fruchterman-Reingold style: spring attraction along edges,
 * pairwise repulsion, cooling schedule. Small networks only (n <= a few
 * hundred), so the O(n^2) repulsion pass is fine. */

export interface LayoutPoint {
  x: number;
  y: number;
}

// deterministic PRNG so layouts are reproducible across page loads
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function computeLayout(
  n: number,
  edges: [number, number][],
  width = 800,
  height = 600,
  iterations = 300,
  seed = 1,
): LayoutPoint[] {
  const rand = mulberry32(seed);
  const pos: LayoutPoint[] = Array.from({ length: n }, () => ({
    x: (rand() - 0.5) * width,
    y: (rand() - 0.5) * height,
  }));
  if (n <= 1) return pos.map((p) => ({ x: p.x + width / 2, y: p.y + height / 2 }));

  const area = width * height;
  const ideal = Math.sqrt(area / n);
  const disp = Array.from({ length: n }, () => ({ x: 0, y: 0 }));

  for (let iter = 0; iter < iterations; iter++) {
    const temp = (width / 10) * (1 - iter / iterations);
    for (const d of disp) {
      d.x = 0;
      d.y = 0;
    }
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = pos[i].x - pos[j].x;
        let dy = pos[i].y - pos[j].y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-6) {
          dx = rand() - 0.5;
          dy = rand() - 0.5;
          dist = Math.hypot(dx, dy);
        }
        const force = (ideal * ideal) / dist;
        disp[i].x += (dx / dist) * force;
        disp[i].y += (dy / dist) * force;
        disp[j].x -= (dx / dist) * force;
        disp[j].y -= (dy / dist) * force;
      }
    }
    for (const [u, v] of edges) {
      if (u === v) continue;
      const dx = pos[u].x - pos[v].x;
      const dy = pos[u].y - pos[v].y;
      const dist = Math.max(Math.hypot(dx, dy), 1e-6);
      const force = (dist * dist) / ideal;
      disp[u].x -= (dx / dist) * force;
      disp[u].y -= (dy / dist) * force;
      disp[v].x += (dx / dist) * force;
      disp[v].y += (dy / dist) * force;
    }
    for (let i = 0; i < n; i++) {
      const len = Math.max(Math.hypot(disp[i].x, disp[i].y), 1e-6);
      const step = Math.min(len, temp);
      pos[i].x += (disp[i].x / len) * step;
      pos[i].y += (disp[i].y / len) * step;
      // gentle pull to the center keeps disconnected parts on screen
      pos[i].x *= 0.99;
      pos[i].y *= 0.99;
    }
  }

  // normalize into the viewport with a margin
  const xs = pos.map((p) => p.x);
  const ys = pos.map((p) => p.y);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const margin = 30;
  const sx = (width - 2 * margin) / Math.max(maxX - minX, 1e-6);
  const sy = (height - 2 * margin) / Math.max(maxY - minY, 1e-6);
  return pos.map((p) => ({
    x: margin + (p.x - minX) * sx,
    y: margin + (p.y - minY) * sy,
  }));
}
