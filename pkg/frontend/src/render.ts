import { EditorState } from "./state.js";
import type { TemplatePayload } from "./types.js";
import { provenanceColor } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export function uvToScreen(
  uv: [number, number],
  vp: Viewport,
): [number, number] {
  const side = Math.min(vp.width, vp.height) - 2 * vp.margin;
  return [vp.margin + uv[0] * side, vp.margin + uv[1] * side];
}

export function screenToUv(
  x: number,
  y: number,
  vp: Viewport,
): [number, number] {
  const side = Math.min(vp.width, vp.height) - 2 * vp.margin;
  return [(x - vp.margin) / side, (y - vp.margin) / side];
}

export function draw(
  ctx: CanvasRenderingContext2D,
  template: TemplatePayload,
  state: EditorState,
  vp: Viewport,
): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillStyle = "#1c1f26";
  ctx.fillRect(0, 0, vp.width, vp.height);

  ctx.fillStyle = "#3a414f";
  for (const uv of template.uv) {
    const [x, y] = uvToScreen(uv, vp);
    ctx.fillRect(x - 0.5, y - 0.5, 1, 1);
  }

  state.points.forEach((p, ordinal) => {
    const [x, y] = uvToScreen(p.uv, vp);
    ctx.beginPath();
    ctx.arc(x, y, ordinal === state.selection ? 5 : 3, 0, 2 * Math.PI);
    ctx.fillStyle = provenanceColor(p.provenance);
    ctx.fill();
    if (ordinal === state.selection) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#ffffff";
      ctx.stroke();
    }
  });
}

/** legend rows as "tag: count", ordered by tag name */
export function legendRows(state: EditorState): string[] {
  return [...state.provenanceCounts().entries()]
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([tag, count]) => `${tag}: ${count}`);
}

/** nearest keypoint ordinal to a screen position, within a pick radius */
export function pickKeypoint(
  state: EditorState,
  x: number,
  y: number,
  vp: Viewport,
  radius = 8,
): number | null {
  let best: number | null = null;
  let bestD2 = radius * radius;
  state.points.forEach((p, ordinal) => {
    const [px, py] = uvToScreen(p.uv, vp);
    const d2 = (px - x) * (px - x) + (py - y) * (py - y);
    if (d2 <= bestD2) {
      best = ordinal;
      bestD2 = d2;
    }
  });
  return best;
}
