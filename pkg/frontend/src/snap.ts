import type { TemplatePayload } from "./types.js";

/**
 * Nearest template vertex to (u, v) over the decimated transport cloud.
 * Ties resolve to the lowest vertex index, matching the server rule, so the
 * client preview agrees with the authoritative re-snap wherever the
 * decimated cloud contains the true nearest vertex.
 */
export function snapToVertex(
  u: number,
  v: number,
  template: TemplatePayload,
): { vertex: number; cloudOrdinal: number } {
  const { uv, indices } = template;
  if (uv.length === 0) throw new Error("empty template cloud");
  let best = 0;
  let bestD2 = Infinity;
  let bestVertex = Infinity;
  for (let k = 0; k < uv.length; k++) {
    const point = uv[k]!;
    const du = point[0] - u;
    const dv = point[1] - v;
    const d2 = du * du + dv * dv;
    const vertex = indices[k]!;
    if (d2 < bestD2 || (d2 === bestD2 && vertex < bestVertex)) {
      best = k;
      bestD2 = d2;
      bestVertex = vertex;
    }
  }
  return { vertex: bestVertex, cloudOrdinal: best };
}
